from fractions import Fraction
from typing import Dict, Sequence, Tuple

import numpy as np

from vcRegularity.components.bigraph import edge_count
from vcRegularity.entity.artifact_entity import BlockRestriction, ClosenessCheck, NetPair, Partition
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset, popcount
from vcRegularity.exceptions import GroundMismatchError


def _group_by_trace(g: BipartiteRelation, side: Side, net: VertexSubset) -> Tuple[VertexSubset, ...]:
    classes: Dict[int, int] = {}
    for vertex in range(g.ground_size(side)):
        trace = g.neighbourhood(side, vertex) & net.members
        classes[trace] = classes.get(trace, 0) | (1 << vertex)
    n = g.ground_size(side)
    return tuple(VertexSubset(side, members, n) for members in classes.values())


def induced_partition(g: BipartiteRelation, nets: NetPair) -> Partition:
    """
    The partition induced by (X̂, Ŷ): x's grouped by E_x ∩ Ŷ, y's by E^y ∩ X̂.
    Only realized traces become blocks.
    """
    if nets.x_net.ground_size != g.n_x or nets.y_net.ground_size != g.n_y:
        raise GroundMismatchError("nets do not live over the relation's sides")
    return Partition(
        x_blocks=_group_by_trace(g, Side.X, nets.y_net),
        y_blocks=_group_by_trace(g, Side.Y, nets.x_net),
        provenance=nets,
    )


def refines(fine: Partition, coarse: Partition) -> bool:
    """True iff every block of `fine` lies inside a block of `coarse`, on both sides."""
    if fine.n_x != coarse.n_x or fine.n_y != coarse.n_y:
        raise GroundMismatchError(
            f"partitions over {fine.n_x}x{fine.n_y} and {coarse.n_x}x{coarse.n_y}"
        )
    for side in (Side.X, Side.Y):
        coarse_blocks = coarse.blocks(side)
        labels = coarse.labels(side)
        for block in fine.blocks(side):
            home = coarse_blocks[labels[block.first()]]
            if block.members & ~home.members:
                return False
    return True


def block_edge_counts(g: BipartiteRelation, p: Partition) -> np.ndarray:
    """Matrix of |E ∩ (X_i × Y_j)| with shape (#x_blocks, #y_blocks)."""
    if p.n_x != g.n_x or p.n_y != g.n_y:
        raise GroundMismatchError(f"partition over {p.n_x}x{p.n_y} for a {g.n_x}x{g.n_y} relation")
    one_hot_x = np.zeros((len(p.x_blocks), g.n_x))
    one_hot_x[p.labels(Side.X), np.arange(g.n_x)] = 1.0
    one_hot_y = np.zeros((g.n_y, len(p.y_blocks)))
    one_hot_y[np.arange(g.n_y), p.labels(Side.Y)] = 1.0
    counts = one_hot_x @ g.matrix.astype(np.float64) @ one_hot_y
    return np.rint(counts).astype(np.int64)


def block_sizes(p: Partition) -> Tuple[np.ndarray, np.ndarray]:
    return (np.array([block.size for block in p.x_blocks], dtype=np.int64),
            np.array([block.size for block in p.y_blocks], dtype=np.int64))


def _sum_squares_over_weights(counts: np.ndarray, weights: np.ndarray) -> Fraction:
    # Σ e² / w, grouped by w so that only one Fraction is built per distinct weight
    nonzero = counts > 0
    keys, inverse = np.unique(weights[nonzero], return_inverse=True)
    totals = np.zeros(len(keys), dtype=np.int64)
    squares = counts[nonzero].astype(np.int64) ** 2
    np.add.at(totals, inverse, squares)
    return sum((Fraction(int(total), int(key)) for total, key in zip(totals, keys)), Fraction(0))


def energy(g: BipartiteRelation, p: Partition) -> Fraction:
    """
    ρ(𝒫) = Σ d²(X_i, Y_j) μ(X_i) μ(Y_j), computed exactly as
    Σ e_ij² / (|X_i| |Y_j|) divided by n_x n_y.
    """
    counts = block_edge_counts(g, p)
    sizes_x, sizes_y = block_sizes(p)
    weights = np.outer(sizes_x, sizes_y)
    return _sum_squares_over_weights(counts, weights) / (g.n_x * g.n_y)


def local_energy(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset,
                 x_parts: Sequence[VertexSubset], y_parts: Sequence[VertexSubset]) -> Fraction:
    """ρ_{i,j}: the energy of the parts of (bx, by) under the block measures μ_i, μ^j."""
    total = Fraction(0)
    for part_x in x_parts:
        if part_x.is_empty():
            continue
        for part_y in y_parts:
            if part_y.is_empty():
                continue
            edges = edge_count(g, part_x, part_y)
            if edges:
                total += Fraction(edges * edges, part_x.size * part_y.size)
    return total / (bx.size * by.size)


def restrict_partition(p: Partition, bx: VertexSubset, by: VertexSubset) -> BlockRestriction:
    """𝒫'_{i,j}: the blocks of `p` inside (bx, by). `p` must refine the pair."""
    restricted = []
    for block_set, side in ((bx, Side.X), (by, Side.Y)):
        inside = []
        for block in p.blocks(side):
            overlap = block.members & block_set.members
            if not overlap:
                continue
            if overlap != block.members:
                raise ValueError(f"a {side.value}-block straddles the restriction boundary")
            inside.append(block)
        restricted.append(tuple(inside))
    return BlockRestriction(bx=bx, by=by, x_blocks=restricted[0], y_blocks=restricted[1])


def block_closeness_check(g: BipartiteRelation, p: Partition, eps: Fraction) -> ClosenessCheck:
    """
    Checks that any two vertices sharing a block have neighbourhoods whose
    symmetric difference has measure < eps, on both sides.

    Returns:
        ClosenessCheck: ok, or the first violating same-block pair.
    """
    for side in (Side.X, Side.Y):
        opposite_size = g.ground_size(side.opposite)
        for block in p.blocks(side):
            representatives: Dict[int, int] = {}
            for vertex in block:
                representatives.setdefault(g.neighbourhood(side, vertex), vertex)
            items = list(representatives.items())
            for i, (row_a, a) in enumerate(items):
                for row_b, b in items[i + 1:]:
                    measure = Fraction(popcount(row_a ^ row_b), opposite_size)
                    if measure >= eps:
                        return ClosenessCheck(ok=False, side=side, counterexample=(a, b), measure=measure)
    return ClosenessCheck(ok=True)
