import math
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from vcRegularity import logger
from vcRegularity.components.bigraph import complement_within, density
from vcRegularity.components.partition_energy import block_edge_counts, block_sizes, local_energy
from vcRegularity.entity.artifact_entity import (BlockRestriction, BoostResult, BoostStats,
                                                 IrregularityWitness, PairVerdict, Partition,
                                                 RegularityReport, Verdict)
from vcRegularity.entity.config_entity import TesterConfig
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset, popcount
from vcRegularity.exceptions import DegenerateWitness, EmptySideError, TooLargeForExact

Pair = Tuple[int, int]


def _check_block_pair(bx: VertexSubset, by: VertexSubset, eps: Fraction) -> None:
    if bx.side is not Side.X or by.side is not Side.Y:
        raise ValueError("expected an X-side block and a Y-side block")
    if bx.is_empty() or by.is_empty():
        raise EmptySideError("regularity of a pair with an empty side is undefined")
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")


def _min_subset_size(eps: Fraction, block_size: int) -> int:
    # μ(X') ≥ ε μ(X_i)  ⇔  |X'| ≥ ε |X_i|
    return max(1, math.ceil(eps * block_size))


def make_witness(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset, wx_indices: Sequence[int],
                 wy_indices: Sequence[int], eps: Fraction, pair: Pair = (0, 0)) -> IrregularityWitness:
    """Builds a witness, recomputing both densities exactly."""
    wx = VertexSubset.from_indices(Side.X, wx_indices, g.n_x)
    wy = VertexSubset.from_indices(Side.Y, wy_indices, g.n_y)
    block_density = density(g, bx, by)
    witness_density = density(g, wx, wy)
    return IrregularityWitness(
        pair=pair,
        wx=wx,
        wy=wy,
        defect=abs(witness_density - block_density),
        epsilon=eps,
        block_density=block_density,
        witness_density=witness_density,
    )


def is_valid_witness(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset,
                     w: IrregularityWitness) -> bool:
    """Recomputes the size conditions and the defect of `w` from scratch."""
    if w.wx.is_empty() or w.wy.is_empty():
        return False
    if not (w.wx.issubset(bx) and w.wy.issubset(by)):
        return False
    if w.wx.size < w.epsilon * bx.size or w.wy.size < w.epsilon * by.size:
        return False
    defect = abs(density(g, w.wx, w.wy) - density(g, bx, by))
    return defect == w.defect and defect >= w.epsilon


def _exact_max_defect(block: np.ndarray, eps: Fraction) -> Optional[Tuple[List[int], List[int]]]:
    """
    Local row/column indices of a maximal-defect refuting sub-pair, or None.

    Subsets of the smaller side are enumerated; for a fixed subset and a fixed
    size k, the sub-density is extremal on the k columns of largest or of
    smallest count, so scanning those two per k attains the maximum defect over
    all qualifying pairs. All comparisons are integer cross-multiplications.
    """
    a, b = block.shape
    edges = int(block.sum())
    if edges == 0 or edges == a * b:
        return None
    transposed = b < a
    matrix = block.T if transposed else block
    s_n, t_n = matrix.shape
    min_s = _min_subset_size(eps, s_n)
    min_t = _min_subset_size(eps, t_n)
    if min_s > s_n or min_t > t_n:
        return None

    masks = np.arange(1, 1 << s_n, dtype=np.int64)
    bits = (masks[:, None] >> np.arange(s_n, dtype=np.int64)) & 1
    sizes = bits.sum(axis=1)
    keep = sizes >= min_s
    masks, bits, sizes = masks[keep], bits[keep], sizes[keep]

    counts = bits @ matrix
    descending = np.argsort(-counts, axis=1, kind="stable")
    ascending = np.argsort(counts, axis=1, kind="stable")
    top = np.cumsum(np.take_along_axis(counts, descending, axis=1), axis=1)
    bottom = np.cumsum(np.take_along_axis(counts, ascending, axis=1), axis=1)

    ks = np.arange(1, t_n + 1, dtype=np.int64)
    area = sizes[:, None] * ks[None, :]
    ab = a * b
    # defect = |e / ab - S / (s k)| = |e s k - S ab| / (ab s k)
    numer = np.stack([np.abs(edges * area - top * ab), np.abs(edges * area - bottom * ab)], axis=1)
    denom = np.broadcast_to((ab * area)[:, None, :], numer.shape)
    valid = np.broadcast_to((ks >= min_t)[None, None, :], numer.shape)
    # float screen (a superset of the refuting cells), then an exact check in Python ints:
    # eps.numerator / eps.denominator may be far beyond int64
    screened = valid & (numer >= (float(eps) - 1e-9) * denom)
    candidates = np.flatnonzero(screened.ravel())
    if candidates.size:
        exact = (numer.ravel()[candidates].astype(object) * eps.denominator
                 >= eps.numerator * denom.ravel()[candidates].astype(object))
        candidates = candidates[np.asarray(exact, dtype=bool)]
    if not candidates.size:
        return None

    nums = numer.ravel()[candidates]
    dens = denom.ravel()[candidates]
    areas = np.broadcast_to(area[:, None, :], numer.shape).ravel()[candidates]
    ratio = nums / dens
    best = int(np.argmax(ratio))
    while True:
        better = nums * dens[best] > nums[best] * dens
        if not better.any():
            break
        better_idx = np.flatnonzero(better)
        best = int(better_idx[np.argmax(ratio[better_idx])])
    ties = np.flatnonzero(nums * dens[best] == nums[best] * dens)
    chosen = int(candidates[ties[np.argmax(areas[ties])]])

    row, remainder = divmod(chosen, 2 * t_n)
    variant, k_index = divmod(remainder, t_n)
    order = descending if variant == 0 else ascending
    s_members = [i for i in range(s_n) if (int(masks[row]) >> i) & 1]
    t_members = sorted(order[row, :k_index + 1].tolist())
    if transposed:
        return t_members, s_members
    return s_members, t_members


def pair_regular_exact(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset, eps: Fraction,
                       size_cap: int = 14, pair: Pair = (0, 0)) -> Optional[IrregularityWitness]:
    """
    Exhaustive ε-regularity test of (bx, by).

    A qualifying sub-pair with defect ≥ ε refutes regularity (the definition
    asks for a strict < ε).

    Returns:
        None if the pair is ε-regular, else a maximal-defect witness (ties go
        to the larger sub-pair, then to enumeration order).

    Raises:
        TooLargeForExact: If a block is larger than `size_cap`.
    """
    eps = Fraction(eps)
    _check_block_pair(bx, by, eps)
    if bx.size > size_cap or by.size > size_cap:
        raise TooLargeForExact(
            f"exact test limited to blocks of size {size_cap}, got {bx.size}x{by.size}"
        )
    xs, ys = bx.indices(), by.indices()
    found = _exact_max_defect(g.submatrix(xs, ys).astype(np.int64), eps)
    if found is None:
        return None
    rows, cols = found
    return make_witness(g, bx, by, [xs[i] for i in rows], [ys[j] for j in cols], eps, pair)


class _WitnessSearch:
    """Deviation-guided search for a refuting sub-pair of one block pair."""

    def __init__(self, block: np.ndarray, eps: Fraction):
        self.block = block
        self.eps = eps
        self.a, self.b = block.shape
        self.edges = int(block.sum())
        self.block_density = Fraction(self.edges, self.a * self.b)
        self.density_float = self.edges / (self.a * self.b)
        self.min_x = _min_subset_size(eps, self.a)
        self.min_y = _min_subset_size(eps, self.b)
        self.best: Optional[Tuple[Fraction, int, np.ndarray, np.ndarray]] = None

    def consider(self, rows: np.ndarray, cols: np.ndarray) -> None:
        size_x, size_y = int(rows.sum()), int(cols.sum())
        if size_x < self.min_x or size_y < self.min_y:
            return
        sub_edges = int(self.block[np.ix_(rows, cols)].sum())
        defect = abs(Fraction(sub_edges, size_x * size_y) - self.block_density)
        if defect < self.eps:
            return
        area = size_x * size_y
        if self.best is None or (defect, area) > (self.best[0], self.best[1]):
            self.best = (defect, area, rows.copy(), cols.copy())

    def _select(self, deviation: np.ndarray, minimum: int) -> Iterator[np.ndarray]:
        # the threshold set, and the `minimum` most deviating entries
        threshold = deviation >= float(self.eps) / 2
        if threshold.sum() >= minimum:
            yield threshold
        top = np.zeros(len(deviation), dtype=bool)
        top[np.argsort(-deviation, kind="stable")[:minimum]] = True
        yield top

    def columns_for(self, rows: np.ndarray, sign: int) -> List[np.ndarray]:
        size = rows.sum()
        if size == 0:
            return []
        col_density = self.block[rows].sum(axis=0) / size
        return list(self._select(sign * (col_density - self.density_float), self.min_y))

    def rows_for(self, cols: np.ndarray, sign: int) -> List[np.ndarray]:
        size = cols.sum()
        if size == 0:
            return []
        row_density = self.block[:, cols].sum(axis=1) / size
        return list(self._select(sign * (row_density - self.density_float), self.min_x))

    def climb(self, rows: np.ndarray, sign: int, steps: int = 2) -> None:
        """Alternating best responses starting from a row set."""
        for _ in range(steps):
            columns = self.columns_for(rows, sign)
            if not columns:
                return
            for cols in columns:
                self.consider(rows, cols)
            cols = columns[0]
            candidates = self.rows_for(cols, sign)
            if not candidates:
                return
            for candidate in candidates:
                self.consider(candidate, cols)
            rows = candidates[0]


def find_witness_sampled(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset, eps: Fraction,
                         trials: int, seed, pair: Pair = (0, 0)) -> Optional[IrregularityWitness]:
    """
    One-sided randomized refuter for block pairs beyond exact reach.

    Candidates, in order: rows whose degree into `by` deviates from d(bx, by)
    by ≥ ε/2 (one candidate per sign); the neighbourhood of pivot vertices
    (most deviating first) and its complement as column sets; `trials` random
    row sets. Every candidate is improved by alternating best responses. A
    returned witness has its defect recomputed exactly; None means the pair is
    only probably regular.
    """
    eps = Fraction(eps)
    _check_block_pair(bx, by, eps)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    xs, ys = bx.indices(), by.indices()
    search = _WitnessSearch(g.submatrix(xs, ys).astype(np.int64), eps)
    if search.edges in (0, search.a * search.b) or search.min_x > search.a or search.min_y > search.b:
        return None
    rng = np.random.default_rng(seed)
    block = search.block

    row_deviation = block.sum(axis=1) / search.b - search.density_float
    for sign in (1, -1):
        for rows in search._select(sign * row_deviation, search.min_x):
            search.climb(rows, sign)

    pivots = np.argsort(-np.abs(row_deviation), kind="stable")[:min(search.a, trials)]
    for pivot in pivots:
        neighbourhood = block[pivot] == 1
        for cols in (neighbourhood, ~neighbourhood):
            if cols.sum() < search.min_y:
                continue
            for sign in (1, -1):
                for rows in search.rows_for(cols, sign):
                    search.consider(rows, cols)
                    search.climb(rows, sign, steps=1)

    for trial in range(trials):
        size = int(rng.integers(search.min_x, search.a + 1))
        rows = np.zeros(search.a, dtype=bool)
        rows[rng.choice(search.a, size=size, replace=False)] = True
        search.climb(rows, 1 if trial % 2 == 0 else -1)

    if search.best is None:
        return None
    _, _, rows, cols = search.best
    return make_witness(g, bx, by, [xs[i] for i in np.flatnonzero(rows)],
                        [ys[j] for j in np.flatnonzero(cols)], eps, pair)


def _judge_pair(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset, eps: Fraction,
                cfg: TesterConfig, pair: Pair) -> PairVerdict:
    if bx.size <= cfg.exact_cap and by.size <= cfg.exact_cap:
        witness = pair_regular_exact(g, bx, by, eps, cfg.exact_cap, pair)
        if witness is None:
            return PairVerdict(pair, Verdict.REGULAR_CERTIFIED, "exact")
        return PairVerdict(pair, Verdict.IRREGULAR, "exact", witness)
    seed = np.random.SeedSequence([cfg.seed, pair[0], pair[1]])
    witness = find_witness_sampled(g, bx, by, eps, cfg.trials, seed, pair)
    if witness is None:
        return PairVerdict(pair, Verdict.REGULAR_PROBABLE, "sampled")
    return PairVerdict(pair, Verdict.IRREGULAR, "sampled", witness)


def partition_regularity(g: BipartiteRelation, p: Partition, eps: Fraction,
                         cfg: TesterConfig) -> RegularityReport:
    """
    Tests every block pair of `p` and decides whether `p` is ε-regular.

    Pairs of density 0 or 1 are certified directly; pairs within
    `cfg.exact_cap` go to the exact test, the rest to the sampled refuter.
    The partition is ε-regular iff the witnessed-irregular mass is < ε.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError(f"epsilon must be positive, got {eps}")
    counts = block_edge_counts(g, p)
    sizes_x, sizes_y = block_sizes(p)
    weights = np.outer(sizes_x, sizes_y)
    mixed = (counts > 0) & (counts < weights)
    uniform_pairs = int(mixed.size - mixed.sum())

    cells = [(int(i), int(j)) for i, j in np.argwhere(mixed)]
    verdicts = Parallel(n_jobs=cfg.n_jobs)(
        delayed(_judge_pair)(g, p.x_blocks[i], p.y_blocks[j], eps, cfg, (i, j)) for i, j in cells
    ) if cells else []

    irregular_weight = sum(int(weights[v.pair]) for v in verdicts if v.verdict is Verdict.IRREGULAR)
    irregular_mass = Fraction(irregular_weight, g.n_x * g.n_y)
    report = RegularityReport(
        epsilon=eps,
        verdicts=tuple(verdicts),
        irregular_mass=irregular_mass,
        is_regular=irregular_mass < eps,
        tester_config=cfg,
        uniform_pairs=uniform_pairs,
        shape=(len(p.x_blocks), len(p.y_blocks)),
    )
    logger.info(f"regularity at eps={eps}: {report.counts()}, irregular mass {irregular_mass} "
                f"-> {'regular' if report.is_regular else 'not regular'}")
    return report


def orient_witness(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset,
                   w: IrregularityWitness) -> Tuple[BipartiteRelation, IrregularityWitness]:
    """
    Returns (relation, witness) with the witness denser than its pair,
    complementing E inside (bx, by) for a sparse witness. The defect is unchanged.
    """
    if w.witness_density >= w.block_density:
        return g, w
    flipped = complement_within(g, bx, by)
    oriented = IrregularityWitness(
        pair=w.pair,
        wx=w.wx,
        wy=w.wy,
        defect=w.defect,
        epsilon=w.epsilon,
        block_density=1 - w.block_density,
        witness_density=1 - w.witness_density,
    )
    return flipped, oriented


def _union_of_meeting_blocks(blocks: Sequence[VertexSubset], core: int) -> int:
    members = 0
    for block in blocks:
        if block.members & core:
            members |= block.members
    return members


def witness_boost(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset, w: IrregularityWitness,
                  r: int, sub: BlockRestriction) -> BoostResult:
    """
    Amplifies a dense witness into unions of blocks of a finer partition.

    X̃' = {x ∈ bx : |E_x ∩ wy| / |wy| ≥ d + 1/2r}, X̃ = union of the sub-blocks
    meeting X̃'; Ỹ' = {y ∈ by : |E^y ∩ X̃| / |X̃| ≥ d + 1/5r}, Ỹ = union of the
    sub-blocks meeting Ỹ', where d = d(bx, by).

    Raises:
        ValueError: If the witness is not at least 1/r denser than the pair.
        DegenerateWitness: If X̃' or Ỹ' is empty.
    """
    block_density = density(g, bx, by)
    if density(g, w.wx, w.wy) < block_density + Fraction(1, r):
        raise ValueError("witness_boost needs d(wx, wy) >= d(bx, by) + 1/r; orient the witness first")

    x_threshold = block_density + Fraction(1, 2 * r)
    wy_bits, wy_size = w.wy.members, w.wy.size
    x_core = 0
    for x in bx:
        if Fraction(popcount(g.rows[x] & wy_bits), wy_size) >= x_threshold:
            x_core |= 1 << x
    if not x_core:
        raise DegenerateWitness("no x in the block is 1/2r denser into wy than the pair")
    x_tilde = VertexSubset(Side.X, _union_of_meeting_blocks(sub.x_blocks, x_core), g.n_x)

    y_threshold = block_density + Fraction(1, 5 * r)
    y_core = 0
    for y in by:
        if Fraction(popcount(g.cols[y] & x_tilde.members), x_tilde.size) >= y_threshold:
            y_core |= 1 << y
    if not y_core:
        raise DegenerateWitness("no y in the block is 1/5r denser from X̃ than the pair")
    y_tilde = VertexSubset(Side.Y, _union_of_meeting_blocks(sub.y_blocks, y_core), g.n_y)

    stats = BoostStats(
        mu_x=Fraction(x_tilde.size, bx.size),
        mu_y=Fraction(y_tilde.size, by.size),
        density=density(g, x_tilde, y_tilde),
        block_density=block_density,
        x_core_size=popcount(x_core),
        y_core_size=popcount(y_core),
    )
    logger.debug(f"witness boost on pair {w.pair}: mu_i={stats.mu_x}, mu^j={stats.mu_y}, "
                 f"d={stats.density} vs block {block_density}")
    return BoostResult(x_tilde=x_tilde, y_tilde=y_tilde, stats=stats)


def two_block_energy_gain(g: BipartiteRelation, bx: VertexSubset, by: VertexSubset,
                          x_tilde: VertexSubset, y_tilde: VertexSubset) -> Fraction:
    """ρ_{i,j} of ({X̃, bx \\ X̃}, {Ỹ, by \\ Ỹ}) minus d²(bx, by)."""
    if not (x_tilde.issubset(bx) and y_tilde.issubset(by)):
        raise ValueError("X̃ and Ỹ must lie inside the block pair")
    x_parts = [x_tilde, bx.difference(x_tilde)]
    y_parts = [y_tilde, by.difference(y_tilde)]
    return local_energy(g, bx, by, x_parts, y_parts) - density(g, bx, by) ** 2


def boost_bounds(result: BoostResult, gain: Fraction, r: int) -> Dict[str, bool]:
    """
    Checks the three amplification bounds; failures are logged as findings.

    mu_i(X̃) ≥ 1/2r², d(X̃, Ỹ) ≥ d + 1/10r, gain ≥ 1/10³r⁶.
    """
    stats = result.stats
    checks = {
        "mu_x": stats.mu_x >= Fraction(1, 2 * r**2),
        "density": stats.density >= stats.block_density + Fraction(1, 10 * r),
        "gain": gain >= Fraction(1, 10**3 * r**6),
    }
    for name, holds in checks.items():
        if not holds:
            logger.warning(f"amplification bound '{name}' failed at r={r}: {stats}, gain={gain}")
    return checks
