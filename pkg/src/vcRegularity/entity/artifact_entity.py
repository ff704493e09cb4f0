from dataclasses import asdict, dataclass, field
from enum import Enum
from functools import cached_property
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from vcRegularity.constants import EXIT_CAPPED, EXIT_REGULAR, EXIT_STAGNATED
from vcRegularity.entity.config_entity import TesterConfig
from vcRegularity.entity.graph_entity import Side, VertexSubset


@dataclass(frozen=True)
class NetPair:
    x_net: VertexSubset
    y_net: VertexSubset
    quality: Fraction

    def __post_init__(self):
        if self.x_net.side is not Side.X or self.y_net.side is not Side.Y:
            raise ValueError("x_net must be X-side and y_net Y-side")

    @classmethod
    def empty(cls, n_x: int, n_y: int) -> "NetPair":
        return cls(VertexSubset.empty(Side.X, n_x), VertexSubset.empty(Side.Y, n_y), Fraction(1))


@dataclass(frozen=True)
class Partition:
    """
    A pair of partitions ({X_i}, {Y_j}). Blocks are stored non-empty, in
    order of their smallest vertex.
    """
    x_blocks: Tuple[VertexSubset, ...]
    y_blocks: Tuple[VertexSubset, ...]
    provenance: Optional[NetPair] = None

    def __post_init__(self):
        object.__setattr__(self, "x_blocks", tuple(self.x_blocks))
        object.__setattr__(self, "y_blocks", tuple(self.y_blocks))
        for side, blocks in ((Side.X, self.x_blocks), (Side.Y, self.y_blocks)):
            if not blocks:
                raise ValueError(f"{side.value}-side has no blocks")
            ground = blocks[0].ground_size
            covered = 0
            for block in blocks:
                if block.side is not side or block.ground_size != ground:
                    raise ValueError(f"{side.value}-block on the wrong side or ground")
                if block.is_empty():
                    raise ValueError(f"empty {side.value}-block")
                if covered & block.members:
                    raise ValueError(f"{side.value}-blocks overlap")
                covered |= block.members
            if covered != (1 << ground) - 1:
                raise ValueError(f"{side.value}-blocks do not cover the side")

    @classmethod
    def trivial(cls, n_x: int, n_y: int) -> "Partition":
        return cls((VertexSubset.full(Side.X, n_x),), (VertexSubset.full(Side.Y, n_y),))

    @classmethod
    def singletons(cls, n_x: int, n_y: int) -> "Partition":
        return cls(
            tuple(VertexSubset(Side.X, 1 << x, n_x) for x in range(n_x)),
            tuple(VertexSubset(Side.Y, 1 << y, n_y) for y in range(n_y)),
        )

    @property
    def n_x(self) -> int:
        return self.x_blocks[0].ground_size

    @property
    def n_y(self) -> int:
        return self.y_blocks[0].ground_size

    def size(self) -> int:
        return max(len(self.x_blocks), len(self.y_blocks))

    def blocks(self, side: Side) -> Tuple[VertexSubset, ...]:
        return self.x_blocks if side is Side.X else self.y_blocks

    def labels(self, side: Side) -> np.ndarray:
        """Block index of every vertex of `side`."""
        blocks = self.blocks(side)
        labels = np.empty(blocks[0].ground_size, dtype=np.intp)
        for index, block in enumerate(blocks):
            labels[block.indices()] = index
        return labels

    def same_blocks(self, other: "Partition") -> bool:
        return self.x_blocks == other.x_blocks and self.y_blocks == other.y_blocks


@dataclass(frozen=True)
class BlockRestriction:
    """The blocks of a finer partition lying inside the pair (bx, by)."""
    bx: VertexSubset
    by: VertexSubset
    x_blocks: Tuple[VertexSubset, ...]
    y_blocks: Tuple[VertexSubset, ...]


@dataclass(frozen=True)
class BuildStats:
    samples_drawn: int = 0
    resample_rounds: int = 0
    fell_back: bool = False


@dataclass
class DifferenceNet:
    """
    A net `members` inside `universe` for the neighbourhoods of the vertices of
    `index_block` (which lie on the opposite side).
    """
    side: Side
    universe: VertexSubset
    index_block: VertexSubset
    members: VertexSubset
    epsilon: Fraction
    verified: bool = False
    build_stats: BuildStats = field(default_factory=BuildStats)


@dataclass(frozen=True)
class NetVerification:
    ok: bool
    counterexample: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class ClosenessCheck:
    ok: bool
    side: Optional[Side] = None
    counterexample: Optional[Tuple[int, int]] = None
    measure: Optional[Fraction] = None


@dataclass(frozen=True)
class IrregularityWitness:
    pair: Tuple[int, int]
    wx: VertexSubset
    wy: VertexSubset
    defect: Fraction
    epsilon: Fraction
    block_density: Fraction
    witness_density: Fraction


class Verdict(str, Enum):
    REGULAR_CERTIFIED = "regular-certified"
    IRREGULAR = "irregular-with-witness"
    REGULAR_PROBABLE = "regular-probable"


@dataclass(frozen=True)
class PairVerdict:
    pair: Tuple[int, int]
    verdict: Verdict
    method: str
    witness: Optional[IrregularityWitness] = None


@dataclass(frozen=True)
class RegularityReport:
    epsilon: Fraction
    verdicts: Tuple[PairVerdict, ...]
    """Verdicts of the tested (mixed-density) pairs only. Pairs of density 0 or 1
    are certified without a test and only counted in `uniform_pairs`;
    `verdict_for` and `all_verdicts` fill them in on demand."""
    irregular_mass: Fraction
    is_regular: bool
    tester_config: TesterConfig
    uniform_pairs: int = 0
    shape: Tuple[int, int] = (0, 0)

    @cached_property
    def _tested(self) -> Dict[Tuple[int, int], PairVerdict]:
        return {entry.pair: entry for entry in self.verdicts}

    def verdict_for(self, i: int, j: int) -> PairVerdict:
        """The verdict of block pair (i, j); untested pairs are certified as uniform."""
        if not (0 <= i < self.shape[0] and 0 <= j < self.shape[1]):
            raise IndexError(f"pair ({i}, {j}) outside a {self.shape[0]}x{self.shape[1]} partition")
        tested = self._tested.get((i, j))
        if tested is not None:
            return tested
        return PairVerdict((i, j), Verdict.REGULAR_CERTIFIED, "uniform")

    def all_verdicts(self) -> Iterator[PairVerdict]:
        for i in range(self.shape[0]):
            for j in range(self.shape[1]):
                yield self.verdict_for(i, j)

    def counts(self) -> Dict[str, int]:
        tally = {verdict.value: 0 for verdict in Verdict}
        tally[Verdict.REGULAR_CERTIFIED.value] = self.uniform_pairs
        for entry in self.verdicts:
            tally[entry.verdict.value] += 1
        return tally

    def witnesses(self) -> List[IrregularityWitness]:
        return [entry.witness for entry in self.verdicts if entry.verdict is Verdict.IRREGULAR]

    @property
    def all_certified(self) -> bool:
        return all(entry.method != "sampled" for entry in self.verdicts)


@dataclass(frozen=True)
class BoostStats:
    mu_x: Fraction
    mu_y: Fraction
    density: Fraction
    block_density: Fraction
    x_core_size: int
    y_core_size: int


@dataclass(frozen=True)
class BoostResult:
    x_tilde: VertexSubset
    y_tilde: VertexSubset
    stats: BoostStats


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    rho: Fraction
    parts_x: int
    parts_y: int
    net_x_size: int
    net_y_size: int
    irregular_mass: Fraction
    wall_ms: int
    forecast_x: Optional[float] = None
    forecast_y: Optional[float] = None
    step_forecast_log2: Optional[float] = None
    tower_log2: Optional[float] = None


@dataclass
class EnergyTrace:
    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def rhos(self) -> List[Fraction]:
        return [record.rho for record in self.records]

    def is_monotone(self) -> bool:
        rhos = self.rhos()
        return all(a <= b for a, b in zip(rhos, rhos[1:]))

    def __len__(self) -> int:
        return len(self.records)


class LoopOutcome(str, Enum):
    REGULAR = "regular"
    CAPPED = "iteration-capped"
    STAGNATED = "stagnated"

    @property
    def exit_code(self) -> int:
        return {
            LoopOutcome.REGULAR: EXIT_REGULAR,
            LoopOutcome.CAPPED: EXIT_CAPPED,
            LoopOutcome.STAGNATED: EXIT_STAGNATED,
        }[self]


@dataclass(frozen=True)
class RegularizationResult:
    partition: Partition
    nets: NetPair
    trace: EnergyTrace
    report: RegularityReport
    outcome: LoopOutcome
    history: Tuple[Partition, ...] = ()

    @property
    def rounds(self) -> int:
        return len(self.trace) - 1


@dataclass(frozen=True)
class BoundValue:
    formula: str
    c1: float
    log2: float
    log2_log2: float
    value: Optional[float]
    overflow_to_infinity: bool


@dataclass(frozen=True)
class TheoreticalBounds:
    iter_cap: int
    size_at_iter: BoundValue
    final_size: BoundValue


@dataclass(frozen=True)
class RunManifest:
    command: str
    inputs: Dict[str, str]
    config: Dict[str, object]
    version: str
    outcome: str
    exit_code: int
    outputs: Dict[str, str]

    def to_dict(self) -> dict:
        return asdict(self)
