import math

import pytest
from hypothesis import given, settings, strategies as st

from vcRegularity.components.bigraph import restrict
from vcRegularity.components.graph_generators import generate
from vcRegularity.components.vc_dimension import (difference_family, dual_family, primal_family,
                                                  sauer_shelah_bound, shatters, vc_dimension,
                                                  vc_dimension_of_relation)
from vcRegularity.entity.config_entity import FamilySpec
from vcRegularity.entity.graph_entity import Side, VertexSubset
from vcRegularity.exceptions import DomainError, TooLargeToShatterCheck

from strategies import naive_shatters, naive_vc, relations


def Y(indices, n):
    return VertexSubset.from_indices(Side.Y, indices, n)


def test_shatters_examples(matching3):
    family = primal_family(matching3)
    assert shatters(family, VertexSubset.empty(Side.Y, 3))
    assert shatters(family, Y([0], 3))
    assert not shatters(family, Y([0, 1], 3))


def test_shatters_guard():
    g = generate(FamilySpec(family="matching", n_x=31, n_y=31))
    with pytest.raises(TooLargeToShatterCheck):
        shatters(primal_family(g), g.full_side(Side.Y))


def test_shatters_rejects_a_set_on_the_index_side(matching3):
    with pytest.raises(ValueError):
        shatters(primal_family(matching3), matching3.full_side(Side.X))


def test_vc_dimension_examples(complete, matching, powerset3):
    assert vc_dimension(primal_family(complete), cap=4) == 0
    assert vc_dimension(primal_family(matching), cap=4) == 1
    assert vc_dimension(primal_family(powerset3), cap=4) == 3


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_powerset_primal_dimension_is_k(k):
    g = generate(FamilySpec(family="powerset", n_x=2**k, n_y=k))
    assert vc_dimension(primal_family(g), cap=k + 1) == k


def test_vc_dimension_saturates_at_cap(powerset3):
    assert vc_dimension(primal_family(powerset3), cap=2) == 3


def test_vc_dimension_of_relation_examples(complete, matching, powerset3):
    assert vc_dimension_of_relation(complete, cap=4) == 0
    assert vc_dimension_of_relation(matching, cap=4) == 1
    assert vc_dimension_of_relation(powerset3, cap=4) == 3
    assert vc_dimension(dual_family(powerset3), cap=4) < 2 ** (3 + 1)


def test_difference_family_members(matching):
    family = difference_family(matching)
    assert family.member((2, 2)) == 0
    assert family.member((1, 2)) == 1 << 1


def test_difference_family_members_are_lazy_pairs(powerset3):
    family = difference_family(powerset3)
    listed = list(family.members())
    assert len(listed) == powerset3.n_x ** 2
    assert [index for index, _ in listed][:3] == [(0, 0), (0, 1), (0, 2)]
    for (a, b), member in listed:
        assert member == family.member((a, b))
        assert member == powerset3.rows[a] & ~powerset3.rows[b]
    assert frozenset(member for _, member in listed) == family.distinct_members


def test_primal_family_members_enumerate_rows(matching):
    assert list(primal_family(matching).members()) == list(enumerate(matching.rows))


def test_sauer_shelah_examples():
    assert sauer_shelah_bound(1, 1) == pytest.approx(math.e)
    assert sauer_shelah_bound(2, 10) == pytest.approx(184.726, abs=1e-3)


def test_sauer_shelah_domain():
    with pytest.raises(DomainError):
        sauer_shelah_bound(3, 2)
    with pytest.raises(DomainError):
        sauer_shelah_bound(0, 5)


@settings(max_examples=60, deadline=None)
@given(relations(max_x=7, max_y=6), st.data())
def test_shatters_agrees_with_enumeration(g, data):
    test_set = sorted(data.draw(st.sets(st.integers(0, g.n_y - 1), max_size=4)))
    assert shatters(primal_family(g), Y(test_set, g.n_y)) == naive_shatters(g.rows, test_set)


@settings(max_examples=60, deadline=None)
@given(relations(max_x=8, max_y=6))
def test_vc_dimension_agrees_with_brute_force(g):
    assert vc_dimension(primal_family(g), cap=6) == naive_vc(g.rows, g.n_y)
    assert vc_dimension(dual_family(g), cap=8) == naive_vc(g.cols, g.n_x)


@settings(max_examples=40, deadline=None)
@given(relations(max_x=8, max_y=8), st.data())
def test_restriction_never_raises_vc_dimension(g, data):
    xs = data.draw(st.sets(st.integers(0, g.n_x - 1), min_size=1))
    ys = data.draw(st.sets(st.integers(0, g.n_y - 1), min_size=1))
    sub = restrict(g, VertexSubset.from_indices(Side.X, xs, g.n_x), Y(ys, g.n_y))
    assert vc_dimension_of_relation(sub, cap=8) <= vc_dimension_of_relation(g, cap=8)


@settings(max_examples=40, deadline=None)
@given(relations(max_x=10, max_y=10))
def test_dual_dimension_below_exponential_bound(g):
    d = vc_dimension(primal_family(g), cap=10)
    assert vc_dimension(dual_family(g), cap=10) < 2 ** (d + 1)


@settings(max_examples=40, deadline=None)
@given(relations(max_x=10, max_y=8), st.data())
def test_trace_count_within_sauer_shelah(g, data):
    d = vc_dimension(primal_family(g), cap=8)
    if d == 0:
        assert len(primal_family(g).distinct_members) == 1
        return
    test_set = data.draw(st.sets(st.integers(0, g.n_y - 1), min_size=d))
    traces = primal_family(g).distinct_traces(Y(test_set, g.n_y))
    assert len(traces) <= sauer_shelah_bound(d, len(test_set)) + 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**16))
def test_difference_family_within_ten_d(seed):
    g = generate(FamilySpec(family="interval-incidence", n_x=8, n_y=6, seed=seed))
    d = vc_dimension_of_relation(g, cap=6)
    assert vc_dimension(difference_family(g), cap=10 * max(d, 1)) <= 10 * max(d, 1)
