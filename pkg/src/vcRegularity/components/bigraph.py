from fractions import Fraction

from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset, popcount
from vcRegularity.exceptions import EmptySideError


def mu(s: VertexSubset) -> Fraction:
    """
    Normalized counting measure of a vertex subset, |s| / |ground|.

    Args:
        s: The subset to measure.

    Returns:
        Fraction: the exact measure in [0, 1].
    """
    if s.ground_size == 0:
        raise EmptySideError("measure over an empty ground set")
    return Fraction(s.size, s.ground_size)


def edge_count(g: BipartiteRelation, sx: VertexSubset, sy: VertexSubset) -> int:
    """|E ∩ (sx × sy)|, scanning the smaller of the two sides."""
    if sx.size <= sy.size:
        return sum(popcount(g.rows[x] & sy.members) for x in sx)
    return sum(popcount(g.cols[y] & sx.members) for y in sy)


def _check_pair(sx: VertexSubset, sy: VertexSubset) -> None:
    if sx.side is not Side.X or sy.side is not Side.Y:
        raise ValueError("density expects an X-side and a Y-side subset")
    if sx.is_empty() or sy.is_empty():
        raise EmptySideError("density is undefined when a side is empty")


def density(g: BipartiteRelation, sx: VertexSubset, sy: VertexSubset) -> Fraction:
    """
    Edge density d(sx, sy) = |E ∩ (sx × sy)| / (|sx| |sy|).

    Raises:
        EmptySideError: If sx or sy is empty.
    """
    _check_pair(sx, sy)
    return Fraction(edge_count(g, sx, sy), sx.size * sy.size)


def edge_measure(g: BipartiteRelation) -> Fraction:
    """μ(E) = |E| / (n_x n_y)."""
    return Fraction(g.num_edges, g.n_x * g.n_y)


def sym_diff_measure(g: BipartiteRelation, a: int, b: int, side: Side,
                     within: VertexSubset) -> Fraction:
    """
    Measure of the symmetric difference of the neighbourhoods of a and b,
    normalized to `within` (a subset of the opposite side).

    With `within` the whole opposite side this is μ(E_a △ E_b); with a block it
    is the block measure μ_i or μ^j.
    """
    if within.side is not side.opposite:
        raise ValueError("`within` must lie on the side opposite to a and b")
    if within.is_empty():
        raise EmptySideError("symmetric difference measured within an empty set")
    differing = (g.neighbourhood(side, a) ^ g.neighbourhood(side, b)) & within.members
    return Fraction(popcount(differing), within.size)


def complement_within(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset) -> BipartiteRelation:
    """The relation with E replaced by (bx × by) \\ E inside the pair, unchanged outside it."""
    rows = list(g.rows)
    for x in bx:
        rows[x] ^= by.members
    return BipartiteRelation.from_rows(g.n_x, g.n_y, rows)


def restrict(g: BipartiteRelation, sx: VertexSubset, sy: VertexSubset) -> BipartiteRelation:
    """E ∩ (sx × sy) relabelled onto dense indices 0..|sx|-1, 0..|sy|-1."""
    _check_pair(sx, sy)
    ys = sy.indices()
    rows = []
    for x in sx:
        row = g.rows[x]
        rows.append(sum(1 << new for new, y in enumerate(ys) if (row >> y) & 1))
    return BipartiteRelation.from_rows(sx.size, sy.size, rows)


