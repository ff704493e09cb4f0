import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Iterator, List, Tuple, Union

from vcRegularity import logger
from vcRegularity.constants import SHATTER_GUARD
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset, iter_bits
from vcRegularity.exceptions import DomainError, TooLargeToShatterCheck


class FamilyKind(str, Enum):
    NEIGHBOURHOOD = "neighbourhood"
    DIFFERENCE = "difference"


@dataclass(frozen=True)
class TraceFamily:
    """
    A set family over one side of a relation.

    NEIGHBOURHOOD with index side X is {E_x}, with index side Y it is {E^y}.
    DIFFERENCE with index side X is {E_x \\ E_x'} indexed by ordered pairs
    (x, x'); its members are produced lazily, never as an n^2 x n_y matrix.
    """
    base: BipartiteRelation
    index_side: Side
    kind: FamilyKind = FamilyKind.NEIGHBOURHOOD

    @property
    def ground_side(self) -> Side:
        return self.index_side.opposite

    @property
    def ground_size(self) -> int:
        return self.base.ground_size(self.ground_side)

    def _neighbourhoods(self) -> Tuple[int, ...]:
        return self.base.rows if self.index_side is Side.X else self.base.cols

    def member(self, index: Union[int, Tuple[int, int]]) -> int:
        rows = self._neighbourhoods()
        if self.kind is FamilyKind.NEIGHBOURHOOD:
            return rows[index]
        a, b = index
        return rows[a] & ~rows[b]

    def members(self) -> Iterator[Tuple[Union[int, Tuple[int, int]], int]]:
        rows = self._neighbourhoods()
        if self.kind is FamilyKind.NEIGHBOURHOOD:
            yield from enumerate(rows)
            return
        for a, row_a in enumerate(rows):
            for b, row_b in enumerate(rows):
                yield (a, b), row_a & ~row_b

    @cached_property
    def distinct_members(self) -> FrozenSet[int]:
        rows = frozenset(self._neighbourhoods())
        if self.kind is FamilyKind.NEIGHBOURHOOD:
            return rows
        return frozenset(row_a & ~row_b for row_a in rows for row_b in rows)

    def distinct_traces(self, test_set: VertexSubset) -> FrozenSet[int]:
        self._check_test_set(test_set)
        return frozenset(member & test_set.members for member in self.distinct_members)

    def _check_test_set(self, test_set: VertexSubset) -> None:
        if test_set.side is not self.ground_side or test_set.ground_size != self.ground_size:
            raise ValueError(
                f"test set must be a {self.ground_side.value}-side subset of size-{self.ground_size} ground"
            )


def primal_family(g: BipartiteRelation) -> TraceFamily:
    return TraceFamily(g, Side.X)


def dual_family(g: BipartiteRelation) -> TraceFamily:
    return TraceFamily(g, Side.Y)


def difference_family(g: BipartiteRelation) -> TraceFamily:
    """The family {E_x \\ E_x'} over Y, indexed by ordered pairs (x, x')."""
    return TraceFamily(g, Side.X, FamilyKind.DIFFERENCE)


def _shatters_bits(members: FrozenSet[int], mask: int, size: int) -> bool:
    target = 1 << size
    if len(members) < target:
        return False
    traces = set()
    for member in members:
        traces.add(member & mask)
        if len(traces) == target:
            return True
    return False


def shatters(f: TraceFamily, test_set: VertexSubset) -> bool:
    """
    True iff every J ⊆ I is the trace of some member of the family.

    Raises:
        TooLargeToShatterCheck: If |I| exceeds the enumeration guard.
    """
    f._check_test_set(test_set)
    if test_set.size > SHATTER_GUARD:
        raise TooLargeToShatterCheck(
            f"|I| = {test_set.size} exceeds the shattering guard of {SHATTER_GUARD}"
        )
    return _shatters_bits(f.distinct_members, test_set.members, test_set.size)


def vc_dimension(f: TraceFamily, cap: int) -> int:
    """
    Exact VC dimension of the family, saturating at cap + 1 (meaning "> cap").

    Candidate k-sets are extensions of shattered (k-1)-sets whose every
    (k-1)-subset is shattered; the search stops at the first size with no
    shattered set.
    """
    if cap < 0:
        raise ValueError(f"cap must be non-negative, got {cap}")
    members = f.distinct_members
    n = f.ground_size
    previous: List[int] = [0]
    dimension = 0
    for k in range(1, cap + 2):
        if k > n or len(members) < (1 << k):
            break
        previous_set = set(previous)
        level = []
        for base in previous:
            start = base.bit_length()
            for j in range(start, n):
                candidate = base | (1 << j)
                if k > 1 and any(candidate & ~(1 << i) not in previous_set for i in iter_bits(candidate)):
                    continue
                if _shatters_bits(members, candidate, k):
                    level.append(candidate)
        if not level:
            break
        dimension = k
        previous = level
    logger.debug(f"VC dimension of {f.kind.value} family over {f.ground_side.value}: "
                 f"{dimension if dimension <= cap else f'> {cap}'}")
    return dimension


def vc_dimension_of_relation(g: BipartiteRelation, cap: int) -> int:
    """The larger of the primal and dual VC dimensions, same saturation as vc_dimension."""
    return max(vc_dimension(primal_family(g), cap), vc_dimension(dual_family(g), cap))


def sauer_shelah_bound(d: int, set_size: int) -> float:
    """
    (e |I| / d)^d, the bound on distinct traces of a VC-dimension-d family on I.

    Raises:
        DomainError: If d < 1 or set_size < d.
    """
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if set_size < d:
        raise DomainError(f"the bound needs |I| >= d, got |I|={set_size}, d={d}")
    try:
        return (math.e * set_size / d) ** d
    except OverflowError:
        return math.inf
