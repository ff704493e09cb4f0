"""Hypothesis strategies and brute-force oracles shared by the tests."""
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Sequence

import numpy as np
from hypothesis import strategies as st

from vcRegularity.entity.artifact_entity import Partition
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset


@st.composite
def relations(draw, max_x=6, max_y=6, min_x=1, min_y=1):
    n_x = draw(st.integers(min_x, max_x))
    n_y = draw(st.integers(min_y, max_y))
    cells = draw(st.lists(st.booleans(), min_size=n_x * n_y, max_size=n_x * n_y))
    return BipartiteRelation.from_matrix(np.array(cells, dtype=bool).reshape(n_x, n_y))


def blocks_from_labels(side: Side, labels: Sequence[int], n: int):
    groups: Dict[int, List[int]] = {}
    for vertex, label in enumerate(labels):
        groups.setdefault(label, []).append(vertex)
    return tuple(VertexSubset.from_indices(side, members, n) for members in groups.values())


def partition_from_labels(x_labels: Sequence[int], y_labels: Sequence[int]) -> Partition:
    return Partition(blocks_from_labels(Side.X, x_labels, len(x_labels)),
                     blocks_from_labels(Side.Y, y_labels, len(y_labels)))


@st.composite
def labellings(draw, n, max_parts=4):
    return draw(st.lists(st.integers(0, max_parts - 1), min_size=n, max_size=n))


@st.composite
def subsets(draw, side: Side, n: int):
    return VertexSubset.from_indices(side, draw(st.sets(st.integers(0, n - 1))), n)


def coarsen(labels: Sequence[int], merge: Sequence[int]) -> List[int]:
    """Labels of a partition that `labels` refines: label l is mapped to merge[l]."""
    return [merge[label] for label in labels]


# oracles

def nonempty_subsets(members: Sequence[int], min_size: int = 1):
    for size in range(max(min_size, 1), len(members) + 1):
        yield from combinations(members, size)


def naive_max_defect(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset, eps: Fraction) -> Fraction:
    """Largest |d(X', Y') - d(bx, by)| over qualifying sub-pairs, by double enumeration."""
    m = g.matrix
    xs, ys = bx.indices(), by.indices()
    block = Fraction(int(m[np.ix_(xs, ys)].sum()), len(xs) * len(ys))
    best = Fraction(0)
    for wx in nonempty_subsets(xs):
        if len(wx) < eps * len(xs):
            continue
        for wy in nonempty_subsets(ys):
            if len(wy) < eps * len(ys):
                continue
            sub = Fraction(int(m[np.ix_(wx, wy)].sum()), len(wx) * len(wy))
            best = max(best, abs(sub - block))
    return best


def naive_shatters(rows: Sequence[int], test_set: Sequence[int]) -> bool:
    mask = sum(1 << i for i in test_set)
    traces = {row & mask for row in rows}
    return all(
        sum(1 << i for i in chosen) in traces
        for size in range(len(test_set) + 1)
        for chosen in combinations(test_set, size)
    )


def naive_vc(rows: Sequence[int], ground_size: int) -> int:
    best = 0
    for size in range(1, ground_size + 1):
        if any(naive_shatters(rows, test_set) for test_set in combinations(range(ground_size), size)):
            best = size
        else:
            break
    return best


def naive_net_ok(g: BipartiteRelation, index_block: VertexSubset, universe: VertexSubset,
                 net: VertexSubset, eps: Fraction) -> bool:
    side = index_block.side
    vertices = index_block.indices()
    for a, b in combinations(vertices, 2):
        row_a, row_b = g.neighbourhood(side, a), g.neighbourhood(side, b)
        if (row_a ^ row_b) & net.members:
            continue
        if Fraction(((row_a ^ row_b) & universe.members).bit_count(), universe.size) >= eps:
            return False
    return True
