from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Iterator, List, Sequence, Tuple

import numpy as np


def popcount(bits: int) -> int:
    return bits.bit_count()


def iter_bits(bits: int) -> Iterator[int]:
    """Yields the indices of the set bits of `bits`, lowest first."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


def bits_from_indices(indices: Iterable[int]) -> int:
    bits = 0
    for index in indices:
        bits |= 1 << index
    return bits


def bits_to_array(bits: int, length: int) -> np.ndarray:
    raw = bits.to_bytes((length + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:length]


def array_to_bits(values: np.ndarray) -> int:
    packed = np.packbits(np.asarray(values, dtype=np.uint8), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


class Side(str, Enum):
    X = "x"
    Y = "y"

    @property
    def opposite(self) -> "Side":
        return Side.Y if self is Side.X else Side.X


@dataclass(frozen=True)
class VertexSubset:
    """
    A side-tagged subset of X or Y stored as an integer bit-vector.

    Bit `v` of `members` is set iff vertex `v` belongs to the subset.
    """
    side: Side
    members: int
    ground_size: int

    def __post_init__(self):
        if self.ground_size < 0:
            raise ValueError(f"ground_size must be non-negative, got {self.ground_size}")
        if self.members < 0 or self.members >> self.ground_size:
            raise ValueError(f"members reference indices outside [0, {self.ground_size})")

    @classmethod
    def from_indices(cls, side: Side, indices: Iterable[int], ground_size: int) -> "VertexSubset":
        return cls(side=side, members=bits_from_indices(indices), ground_size=ground_size)

    @classmethod
    def full(cls, side: Side, ground_size: int) -> "VertexSubset":
        return cls(side=side, members=(1 << ground_size) - 1, ground_size=ground_size)

    @classmethod
    def empty(cls, side: Side, ground_size: int) -> "VertexSubset":
        return cls(side=side, members=0, ground_size=ground_size)

    @cached_property
    def size(self) -> int:
        return popcount(self.members)

    def __len__(self) -> int:
        return self.size

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.members)

    def __contains__(self, vertex: int) -> bool:
        return vertex >= 0 and bool((self.members >> vertex) & 1)

    def indices(self) -> List[int]:
        return list(iter_bits(self.members))

    def is_empty(self) -> bool:
        return self.members == 0

    def first(self) -> int:
        if self.members == 0:
            raise ValueError("empty subset has no first element")
        return (self.members & -self.members).bit_length() - 1

    def _check_compatible(self, other: "VertexSubset") -> None:
        if self.side is not other.side or self.ground_size != other.ground_size:
            raise ValueError(
                f"incompatible subsets: {self.side.value}/{self.ground_size} "
                f"vs {other.side.value}/{other.ground_size}"
            )

    def union(self, other: "VertexSubset") -> "VertexSubset":
        self._check_compatible(other)
        return VertexSubset(self.side, self.members | other.members, self.ground_size)

    def intersection(self, other: "VertexSubset") -> "VertexSubset":
        self._check_compatible(other)
        return VertexSubset(self.side, self.members & other.members, self.ground_size)

    def difference(self, other: "VertexSubset") -> "VertexSubset":
        self._check_compatible(other)
        return VertexSubset(self.side, self.members & ~other.members, self.ground_size)

    def issubset(self, other: "VertexSubset") -> bool:
        self._check_compatible(other)
        return self.members & ~other.members == 0


@dataclass(frozen=True)
class BipartiteRelation:
    """
    The edge set E of a bipartite graph between X = {0..n_x-1} and
    Y = {0..n_y-1}.

    `rows[x]` is the bit-vector of E_x over Y and `cols[y]` the bit-vector of
    E^y over X. Both stores are kept so that the two sides cost the same.
    """
    n_x: int
    n_y: int
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError(f"both sides need at least one vertex, got {self.n_x}x{self.n_y}")
        if len(self.rows) != self.n_x or len(self.cols) != self.n_y:
            raise ValueError("rows/cols length does not match n_x/n_y")

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "BipartiteRelation":
        adjacency = np.asarray(matrix, dtype=bool)
        if adjacency.ndim != 2:
            raise ValueError(f"adjacency must be two-dimensional, got shape {adjacency.shape}")
        n_x, n_y = adjacency.shape
        rows = tuple(array_to_bits(row) for row in adjacency)
        cols = tuple(array_to_bits(col) for col in adjacency.T)
        return cls(n_x=n_x, n_y=n_y, rows=rows, cols=cols)

    @classmethod
    def from_rows(cls, n_x: int, n_y: int, rows: Sequence[int]) -> "BipartiteRelation":
        if len(rows) != n_x:
            raise ValueError(f"expected {n_x} rows, got {len(rows)}")
        cols = [0] * n_y
        for x, row in enumerate(rows):
            if row < 0 or row >> n_y:
                raise ValueError(f"row {x} references columns outside [0, {n_y})")
            for y in iter_bits(row):
                cols[y] |= 1 << x
        return cls(n_x=n_x, n_y=n_y, rows=tuple(rows), cols=tuple(cols))

    @classmethod
    def from_edges(cls, n_x: int, n_y: int, edges: Iterable[Tuple[int, int]]) -> "BipartiteRelation":
        rows = [0] * n_x
        for x, y in edges:
            if not (0 <= x < n_x and 0 <= y < n_y):
                raise ValueError(f"edge ({x}, {y}) outside {n_x}x{n_y}")
            rows[x] |= 1 << y
        return cls.from_rows(n_x, n_y, rows)

    def ground_size(self, side: Side) -> int:
        return self.n_x if side is Side.X else self.n_y

    def full_side(self, side: Side) -> VertexSubset:
        return VertexSubset.full(side, self.ground_size(side))

    def neighbourhood(self, side: Side, vertex: int) -> int:
        """E_x when `side` is X, E^y when `side` is Y, as a bit-vector of the opposite side."""
        return self.rows[vertex] if side is Side.X else self.cols[vertex]

    @cached_property
    def num_edges(self) -> int:
        return sum(popcount(row) for row in self.rows)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense 0/1 adjacency, shape (n_x, n_y)."""
        return np.stack([bits_to_array(row, self.n_y) for row in self.rows]).astype(np.uint8)

    def submatrix(self, xs: Sequence[int], ys: Sequence[int]) -> np.ndarray:
        return self.matrix[np.ix_(np.asarray(xs, dtype=np.intp), np.asarray(ys, dtype=np.intp))]

    def edges(self) -> Iterator[Tuple[int, int]]:
        for x, row in enumerate(self.rows):
            for y in iter_bits(row):
                yield x, y

    def is_transpose_consistent(self) -> bool:
        for x, row in enumerate(self.rows):
            for y in range(self.n_y):
                if bool((row >> y) & 1) != bool((self.cols[y] >> x) & 1):
                    return False
        return True
