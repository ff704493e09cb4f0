from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vcRegularity.components.bigraph import density
from vcRegularity.components.graph_generators import generate
from vcRegularity.components.partition_energy import energy, local_energy, restrict_partition
from vcRegularity.components.refine_loop import refine_once
from vcRegularity.components.regularity_tester import (boost_bounds, find_witness_sampled,
                                                       is_valid_witness, make_witness,
                                                       orient_witness, pair_regular_exact,
                                                       partition_regularity, two_block_energy_gain,
                                                       witness_boost)
from vcRegularity.entity.artifact_entity import NetPair, Partition, Verdict
from vcRegularity.entity.config_entity import FamilySpec, LoopConfig, NetBudget, TesterConfig
from vcRegularity.entity.graph_entity import BipartiteRelation, Side, VertexSubset
from vcRegularity.exceptions import DegenerateWitness, TooLargeForExact

from strategies import labellings, naive_max_defect, partition_from_labels, relations

QUARTER = Fraction(1, 4)


def X(indices, n=8):
    return VertexSubset.from_indices(Side.X, indices, n)


def Y(indices, n=8):
    return VertexSubset.from_indices(Side.Y, indices, n)


def full(g):
    return g.full_side(Side.X), g.full_side(Side.Y)


def four_blocks():
    return partition_from_labels([0] * 4 + [1] * 4, [0] * 4 + [1] * 4)


def test_exact_complete_pair_is_regular(complete):
    assert pair_regular_exact(complete, *full(complete), Fraction(1, 10)) is None


def test_exact_block_diagonal_witness(block_diagonal):
    w = pair_regular_exact(block_diagonal, *full(block_diagonal), QUARTER)
    assert w.wx.indices() == [0, 1, 2, 3]
    assert w.wy.indices() == [0, 1, 2, 3]
    assert w.defect == Fraction(1, 2)
    assert w.witness_density == 1
    assert is_valid_witness(block_diagonal, *full(block_diagonal), w)


def test_exact_single_vertex_blocks_are_regular(block_diagonal):
    for eps in (Fraction(1, 3), Fraction(1)):
        assert pair_regular_exact(block_diagonal, X([5]), Y([2]), eps) is None


def test_exact_refuses_large_blocks():
    g = generate(FamilySpec(family="block-diagonal", n_x=16, n_y=16))
    with pytest.raises(TooLargeForExact):
        pair_regular_exact(g, *full(g), QUARTER, size_cap=14)


def test_sampled_finds_the_planted_witness(block_diagonal):
    w = find_witness_sampled(block_diagonal, *full(block_diagonal), QUARTER, trials=50, seed=7)
    assert w is not None
    assert w.defect == Fraction(1, 2)
    assert is_valid_witness(block_diagonal, *full(block_diagonal), w)


def test_sampled_on_large_block_diagonal():
    g = generate(FamilySpec(family="block-diagonal", n_x=40, n_y=40))
    w = find_witness_sampled(g, *full(g), QUARTER, trials=50, seed=7)
    assert w is not None and w.defect == Fraction(1, 2)


def test_sampled_complete_pair_has_no_witness():
    g = generate(FamilySpec(family="complete", n_x=20, n_y=20))
    assert find_witness_sampled(g, *full(g), QUARTER, trials=50, seed=7) is None


def test_sampled_needs_a_trial(block_diagonal):
    with pytest.raises(ValueError):
        find_witness_sampled(block_diagonal, *full(block_diagonal), QUARTER, trials=0, seed=7)


def test_partition_regularity_examples(block_diagonal):
    cfg = TesterConfig()
    singletons = partition_regularity(block_diagonal, Partition.singletons(8, 8), QUARTER, cfg)
    assert singletons.is_regular and singletons.irregular_mass == 0

    trivial = partition_regularity(block_diagonal, Partition.trivial(8, 8), QUARTER, cfg)
    assert not trivial.is_regular
    assert trivial.irregular_mass == 1
    assert trivial.counts()[Verdict.IRREGULAR.value] == 1

    separated = partition_regularity(block_diagonal, four_blocks(), QUARTER, cfg)
    assert separated.is_regular
    assert separated.counts()[Verdict.REGULAR_CERTIFIED.value] == 4
    assert separated.all_certified


def test_report_has_a_verdict_for_every_pair(block_diagonal):
    cfg = TesterConfig()
    for p in (Partition.trivial(8, 8), four_blocks(), Partition.singletons(8, 8)):
        report = partition_regularity(block_diagonal, p, QUARTER, cfg)
        n_pairs = len(p.x_blocks) * len(p.y_blocks)
        assert report.shape == (len(p.x_blocks), len(p.y_blocks))
        assert sum(report.counts().values()) == n_pairs
        listed = list(report.all_verdicts())
        assert len(listed) == n_pairs
        assert [entry.pair for entry in listed][:2] == [(0, 0), (0, 1)][:n_pairs]

    trivial = partition_regularity(block_diagonal, Partition.trivial(8, 8), QUARTER, cfg)
    assert trivial.verdict_for(0, 0).verdict is Verdict.IRREGULAR
    assert trivial.verdict_for(0, 0).method == "exact"

    separated = partition_regularity(block_diagonal, four_blocks(), QUARTER, cfg)
    assert separated.verdicts == ()
    uniform = separated.verdict_for(0, 1)
    assert uniform.verdict is Verdict.REGULAR_CERTIFIED
    assert uniform.method == "uniform" and uniform.witness is None
    with pytest.raises(IndexError):
        separated.verdict_for(2, 0)


def test_sampled_verdicts_never_count_as_irregular():
    g = generate(FamilySpec(family="erdos-renyi", n_x=24, n_y=24, p=0.5, seed=1))
    report = partition_regularity(g, Partition.trivial(24, 24), Fraction(1, 2), TesterConfig(exact_cap=4))
    assert not report.all_certified
    for entry in report.verdicts:
        if entry.verdict is Verdict.REGULAR_PROBABLE:
            assert entry.witness is None
    irregular = sum(1 for entry in report.verdicts if entry.verdict is Verdict.IRREGULAR)
    assert report.irregular_mass == irregular


def test_partition_regularity_ignores_n_jobs():
    g = generate(FamilySpec(family="interval-incidence", n_x=24, n_y=24, seed=2))
    p = partition_from_labels([i % 3 for i in range(24)], [i % 2 for i in range(24)])
    serial = partition_regularity(g, p, QUARTER, TesterConfig(exact_cap=6, n_jobs=1))
    parallel = partition_regularity(g, p, QUARTER, TesterConfig(exact_cap=6, n_jobs=2))
    assert serial.verdicts == parallel.verdicts
    assert serial.irregular_mass == parallel.irregular_mass


def test_witness_boost_on_block_diagonal(block_diagonal):
    g = block_diagonal
    bx, by = full(g)
    w = pair_regular_exact(g, bx, by, QUARTER)
    oriented_g, oriented = orient_witness(g, bx, by, w)
    assert oriented_g is g
    result = witness_boost(g, bx, by, oriented, 2, restrict_partition(Partition.singletons(8, 8), bx, by))
    assert result.x_tilde.indices() == [0, 1, 2, 3]
    assert result.y_tilde.indices() == [0, 1, 2, 3]
    assert result.stats.density == 1
    assert result.stats.density >= Fraction(1, 2) + Fraction(1, 20)
    gain = two_block_energy_gain(g, bx, by, result.x_tilde, result.y_tilde)
    assert gain == QUARTER
    assert all(boost_bounds(result, gain, 2).values())


def test_gain_of_no_split_is_zero(block_diagonal):
    assert two_block_energy_gain(block_diagonal, *full(block_diagonal), *full(block_diagonal)) == 0


def test_sparse_witness_is_oriented_by_complementing(block_diagonal):
    g = block_diagonal
    bx, by = full(g)
    w = make_witness(g, bx, by, [0, 1, 2, 3], [4, 5, 6, 7], QUARTER)
    assert w.witness_density == 0
    flipped, oriented = orient_witness(g, bx, by, w)
    assert oriented.defect == w.defect
    assert density(flipped, oriented.wx, oriented.wy) == 1
    assert oriented.witness_density == 1


def test_witness_boost_needs_a_dense_witness(block_diagonal):
    g = block_diagonal
    bx, by = full(g)
    w = make_witness(g, bx, by, [0, 1, 2, 3], [4, 5, 6, 7], QUARTER)
    with pytest.raises(ValueError):
        witness_boost(g, bx, by, w, 2, restrict_partition(Partition.singletons(8, 8), bx, by))


def test_witness_boost_degenerates_with_a_coarse_sub_partition(block_diagonal):
    # X̃ grows to the whole side, where every column sits exactly at the block density
    g = block_diagonal
    bx, by = full(g)
    w = pair_regular_exact(g, bx, by, QUARTER)
    with pytest.raises(DegenerateWitness):
        witness_boost(g, bx, by, w, 2, restrict_partition(Partition.trivial(8, 8), bx, by))


def _planted(r, seed):
    # a complete corner A x C, random B x D, nothing across
    n = 4 * r
    rng = np.random.default_rng(seed)
    p = rng.uniform(0.2, 0.8)
    matrix = np.zeros((n, n), dtype=bool)
    matrix[: n // 2, : n // 2] = True
    matrix[n // 2:, n // 2:] = rng.random((n // 2, n // 2)) < p
    return BipartiteRelation.from_matrix(matrix)


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("seed", range(25))
def test_boost_bounds_on_planted_instances(r, seed):
    g = _planted(r, seed)
    n = g.n_x
    bx, by = full(g)
    w = make_witness(g, bx, by, range(n // 2), range(n // 2), Fraction(1, r))
    assert is_valid_witness(g, bx, by, w)
    oriented_g, oriented = orient_witness(g, bx, by, w)
    assert oriented.defect >= Fraction(1, r)

    cfg = LoopConfig(r=r, d=1, net_budget=NetBudget(d=1, r=r), seed=seed, record_wall_time=False)
    _, refined = refine_once(g, NetPair.empty(n, n), Partition.trivial(n, n), cfg, 1)
    sub = restrict_partition(refined, bx, by)
    result = witness_boost(oriented_g, bx, by, oriented, r, sub)
    gain = two_block_energy_gain(oriented_g, bx, by, result.x_tilde, result.y_tilde)
    assert boost_bounds(result, gain, r) == {"mu_x": True, "density": True, "gain": True}


@pytest.mark.parametrize("eps", [Fraction(1, 3) + Fraction(1, 10**17), Fraction("0.33333333333333333")])
@pytest.mark.parametrize("seed", range(40))
def test_exact_handles_epsilon_with_huge_denominator(eps, seed):
    g = BipartiteRelation.from_matrix(np.random.default_rng(seed).random((6, 6)) < 0.5)
    bx, by = full(g)
    w = pair_regular_exact(g, bx, by, eps)
    best = naive_max_defect(g, bx, by, eps)
    if best >= eps:
        assert w is not None
        assert w.defect == best
        assert is_valid_witness(g, bx, by, w)
    else:
        assert w is None


@settings(max_examples=40, deadline=None)
@given(relations(min_x=2, min_y=2, max_x=5, max_y=5), st.sampled_from([Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]))
def test_exact_agrees_with_double_enumeration(g, eps):
    bx, by = full(g)
    w = pair_regular_exact(g, bx, by, eps)
    best = naive_max_defect(g, bx, by, eps)
    if best >= eps:
        assert w is not None
        assert w.defect == best
        assert is_valid_witness(g, bx, by, w)
    else:
        assert w is None


@settings(max_examples=30, deadline=None)
@given(relations(min_x=2, min_y=2, max_x=6, max_y=6), st.data())
def test_exact_partition_report_matches_oracle(g, data):
    p = partition_from_labels(data.draw(labellings(g.n_x, 2)), data.draw(labellings(g.n_y, 2)))
    eps = QUARTER
    report = partition_regularity(g, p, eps, TesterConfig(exact_cap=14))
    expected = Fraction(0)
    for bx in p.x_blocks:
        for by in p.y_blocks:
            if naive_max_defect(g, bx, by, eps) >= eps:
                expected += Fraction(bx.size * by.size, g.n_x * g.n_y)
    assert report.irregular_mass == expected
    assert report.is_regular == (expected < eps)


@settings(max_examples=30, deadline=None)
@given(relations(min_x=4, min_y=4, max_x=10, max_y=10), st.integers(0, 1000))
def test_sampled_witnesses_are_genuine(g, seed):
    bx, by = full(g)
    w = find_witness_sampled(g, bx, by, QUARTER, trials=5, seed=seed)
    if w is not None:
        assert is_valid_witness(g, bx, by, w)


@settings(max_examples=40, deadline=None)
@given(relations(max_x=6, max_y=6), st.data())
def test_local_energy_of_trivial_split_is_density_squared(g, data):
    bx = X(data.draw(st.sets(st.integers(0, g.n_x - 1), min_size=1)), g.n_x)
    by = Y(data.draw(st.sets(st.integers(0, g.n_y - 1), min_size=1)), g.n_y)
    assert local_energy(g, bx, by, [bx], [by]) == density(g, bx, by) ** 2
    assert energy(g, Partition.trivial(g.n_x, g.n_y)) == density(g, *full(g)) ** 2
