from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flopgw.lattice import CurveClassLattice
from flopgw.novikov import (DivergentExpansionError, NovikovElement, NovikovError,
                            analytic_continue, from_terms, isomorphic, parse, serialize,
                            series_equal, substitute, truncate, truncated_product)
from flopgw.models import local_model

L1 = CurveClassLattice("L1", ["q"], [(1,)])
L2 = CurveClassLattice("L2", ["C", "h"], [(1, 0), (0, 1)])


def tail(lat, b, g, c=1):
    return NovikovElement.tail(lat, b, g, c)


def test_geometric_tail_truncates():
    assert truncate(tail(L1, (1,), (1,)), cutoff=3) == {(1,): 1, (2,): 1, (3,): 1}


def test_continuation_rewrite():
    f = tail(L1, (-1,), (-1,))
    g = NovikovElement.constant(L1, -1) + tail(L1, (1,), (1,), -1)
    assert analytic_continue(f) == g
    assert isomorphic(f, g)
    assert truncate(g, cutoff=2) == {(0,): -1, (1,): -1, (2,): -1}


def test_divergent_expansion_refused():
    with pytest.raises(DivergentExpansionError):
        truncate(tail(L1, (-1,), (-1,)), cutoff=3)


def test_ample_must_be_positive():
    with pytest.raises(NovikovError):
        truncate(tail(L2, (1, 0), (1, 0)), ample=(0, 1))


def test_series_equality_is_semantic():
    assert series_equal(tail(L1, (1,), (2,)) + tail(L1, (2,), (2,)), tail(L1, (1,), (1,)))
    assert series_equal(tail(L1, (0,), (1,)), NovikovElement.constant(L1, 1) + tail(L1, (1,), (1,)))
    assert not series_equal(tail(L1, (1,), (1,)), tail(L1, (1,), (1,), 2))
    assert not series_equal(tail(L2, (1, 0), (1, 0)), tail(L2, (0, 1), (0, 1)))


def test_opposite_rays_compare():
    a = tail(L1, (-1,), (-1,))
    b = NovikovElement.constant(L1, -1) + tail(L1, (1,), (1,), -1)
    assert series_equal(a, b)


def test_products():
    f = NovikovElement.monomial(L2, (1, 0), 2) + NovikovElement.constant(L2, 1)
    g = NovikovElement.monomial(L2, (0, 1), 3)
    assert (f * g).poly == {(1, 1): 6, (0, 1): 3}
    with pytest.raises(NovikovError):
        tail(L2, (1, 0), (1, 0)) * tail(L2, (0, 1), (0, 1))
    prod = truncated_product(tail(L1, (1,), (1,)), tail(L1, (1,), (1,)), cutoff=4)
    assert prod == {(2,): 1, (3,): 2, (4,): 3}


def test_substitute_along_flop():
    m = local_model(1)
    f = tail(m.X, (1, 0), (1, 0), 3) + NovikovElement.monomial(m.X, (1, 1), 5)
    g = substitute(f, m.phi)
    assert g.lattice == m.Xp
    assert g.tails == {((-1, 0), (-1, 0)): 3}
    assert g.poly == {(-1, 1): 5}
    with pytest.raises(NovikovError):
        substitute(tail(m.X, (1, 0), (1, 0)), m.phi_e)


def test_serialize_parse():
    f = NovikovElement.constant(L2, Fraction(-1, 2)) + tail(L2, (1, 0), (1, 0), 3) \
        + NovikovElement.monomial(L2, (2, 1), Fraction(7, 4))
    text = serialize(f)
    assert text == "-1/2 * q^[0,0] + 7/4 * q^[2,1] + 3 * q^[1,0] / (1 - q^[1,0])"
    assert parse(L2, text) == f
    assert serialize(NovikovElement.zero(L2)) == "0"


def test_from_terms_accumulates():
    f = from_terms(L2, [(L2.cls(1, 0), 1), (L2.cls(1, 0), 2)])
    assert f.poly == {(1, 0): 3}


coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)
vec = st.tuples(st.integers(-3, 3), st.integers(-3, 3))
dirs = st.sampled_from([(1, 0), (0, 1), (1, 1), (-1, 0), (0, -1), (2, 0), (1, 2)])
elements = st.builds(
    lambda ps, ts: sum((NovikovElement.monomial(L2, b, c) for b, c in ps), NovikovElement.zero(L2))
    + sum((tail(L2, b, g, c) for b, g, c in ts), NovikovElement.zero(L2)),
    st.lists(st.tuples(vec, coeffs), max_size=4),
    st.lists(st.tuples(vec, dirs, coeffs), max_size=3))


@given(elements)
@settings(max_examples=150, deadline=None)
def test_round_trip(f):
    assert parse(L2, serialize(f)) == f


@given(elements)
@settings(max_examples=150, deadline=None)
def test_continuation_preserves_the_function(f):
    assert series_equal(f, analytic_continue(f))
    assert isomorphic(f, analytic_continue(f))


@given(elements, elements)
@settings(max_examples=100, deadline=None)
def test_equality_is_an_equivalence(f, g):
    assert series_equal(f, f)
    assert series_equal(f, g) == series_equal(g, f)
    assert series_equal(f + g, g + f)


@given(st.integers(1, 4), st.integers(0, 3), coeffs.filter(bool))
@settings(max_examples=80, deadline=None)
def test_period_splitting(k, shift, c):
    """q^b/(1-q) equals the sum over residues of q^{b+j}/(1-q^k)."""
    one = tail(L1, (shift,), (1,), c)
    split = sum((tail(L1, (shift + j,), (k,), c) for j in range(k)), NovikovElement.zero(L1))
    assert series_equal(one, split)
    assert truncate(one, cutoff=12) == truncate(split, cutoff=12)
