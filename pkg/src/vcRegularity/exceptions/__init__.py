class VCRegularityError(Exception):
    """Base class for every error raised by vcRegularity."""


class EmptySideError(VCRegularityError, ValueError):
    """A density or measure was requested over an empty vertex set."""


class TooLargeToShatterCheck(VCRegularityError, ValueError):
    """The test set is beyond the shattering enumeration guard."""


class DomainError(VCRegularityError, ValueError):
    """A formula was evaluated outside its stated domain."""


class GroundMismatchError(VCRegularityError, ValueError):
    """Two objects that must live over the same ground sets do not."""


class TooLargeForExact(VCRegularityError, ValueError):
    """A block pair is too large for the exhaustive regularity test."""


class DegenerateWitness(VCRegularityError, ArithmeticError):
    """Witness amplification produced an empty intermediate set."""


class SpecError(VCRegularityError, ValueError):
    """Invalid generator specification."""


class GraphFormatError(VCRegularityError, ValueError):
    """Malformed .big graph file or partition file."""
