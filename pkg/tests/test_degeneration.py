from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flopgw.degeneration import (AdmissibilityError, AdmissibleGraph, AdmissibleTriple,
                                 CapError, CohomologyBasis, RelativeGWTable, blowup_geometry,
                                 canonical_key, check_triple, conifold_geometry,
                                 enumerate_triples, eq_count, evaluate_degeneration, genus,
                                 graph_key, parse_graph_key, permute_roots, root_multiplicity,
                                 simplified_form_applies, vdim_additivity_check)
from flopgw.models import local_model

CAPS = dict(max_vertices=3, max_weight=3)


def enum(g, n, beta, geom):
    return enumerate_triples(g, n, beta, geom, max_genus=g, **CAPS)


def test_graph_validation():
    m = local_model(1)
    with pytest.raises(AdmissibilityError):
        AdmissibleGraph(m.Xt, ((-1, (0, 1, 0)),))
    with pytest.raises(AdmissibilityError):
        AdmissibleGraph(m.Xt, ((0, (0, 1, 0)),), roots=((0, 0),))
    with pytest.raises(AdmissibilityError):
        # second vertex carries no root, so it cannot reach the divisor
        AdmissibleGraph(m.Xt, ((0, (0, 1, -1)), (0, (0, 0, 1))), roots=((0, 1),))


def test_triple_validation():
    m = local_model(1)
    g1 = AdmissibleGraph(m.Xt, ((0, (0, 1, -1)),), legs=(0,), roots=((0, 1),))
    g2 = AdmissibleGraph(m.Y, ((0, (0, 1)),), legs=(0,), roots=((0, 1),))
    t = AdmissibleTriple(g1, g2, (2,))
    assert t.n == 2 and t.leg_labels() == ((2,), (1,)) and genus(t) == 0
    with pytest.raises(AdmissibilityError):
        AdmissibleTriple(g1, g2, (3,))
    g2b = AdmissibleGraph(m.Y, ((0, (0, 2)),), roots=((0, 2),))
    with pytest.raises(AdmissibilityError):
        AdmissibleTriple(g1, g2b, (1,))


def test_caps_are_required():
    geom = blowup_geometry(local_model(1))
    with pytest.raises(CapError):
        enumerate_triples(0, 0, (0, 1), geom, max_vertices=3, max_weight=3)


# counts for (beta, g, n) frozen from the enumerator and matched against the
# brute-force oracle in the acceptance suite
BLOWUP_COUNTS = {
    0: {((1, 1), 1, 1): 0, ((0, 1), 1, 1): 1, ((1, 0), 0, 0): 1},
    1: {((0, 1), 0, 0): 2, ((0, 1), 0, 1): 3, ((0, 1), 1, 1): 5, ((1, 1), 1, 1): 5},
    2: {((0, 1), 0, 0): 4, ((0, 1), 1, 0): 8, ((0, 1), 1, 1): 16, ((1, 1), 1, 1): 24},
}
CONIFOLD_COUNTS = {
    1: {((1,), 0, 0): 3, ((2,), 0, 0): 8, ((2,), 1, 1): 27},
    2: {((1,), 1, 1): 22, ((2,), 0, 1): 77, ((2,), 1, 1): 255},
}


@pytest.mark.parametrize("k", sorted(BLOWUP_COUNTS))
def test_blowup_counts(k):
    geom = blowup_geometry(local_model(k))
    for (beta, g, n), count in BLOWUP_COUNTS[k].items():
        assert len(enum(g, n, beta, geom)) == count, (beta, g, n)


@pytest.mark.parametrize("k", sorted(CONIFOLD_COUNTS))
def test_conifold_counts(k):
    geom = conifold_geometry(local_model(k))
    for (beta, g, n), count in CONIFOLD_COUNTS[k].items():
        assert len(enum(g, n, beta, geom)) == count, (beta, g, n)


def test_degree_zero_and_multiples_of_C():
    for k in range(4):
        geom = blowup_geometry(local_model(k))
        assert enum(0, 0, (0, 0), geom) == []
        assert enum(1, 0, (0, 0), geom) == []
        assert len(enum(1, 1, (0, 0), geom)) == 2
        for m in (1, 2, 3):
            (t,) = enum(0, 0, (m, 0), geom)
            assert t.first.is_empty()


def test_known_triples_for_a_line_meeting_C_once():
    geom = blowup_geometry(local_model(1))
    keys = {canonical_key(t) for t in enum(0, 0, (0, 1), geom)}
    assert keys == {
        (((0, (0, 1, -1), ()),), ((0, (0, 1), ()),), ((0, 0, 1),)),
        (((0, (0, 1, 0), ()),), (), ()),
    }


def test_symmetries_and_multiplicities():
    geom = blowup_geometry(local_model(2))
    by_key = {canonical_key(t): t for t in enum(1, 0, (0, 1), geom)}
    t = by_key[(((0, (0, 1, -2), ()),), ((0, (0, 2), ()),), ((0, 0, 1), (0, 0, 1)))]
    assert eq_count(t) == 2 and root_multiplicity(t) == 1
    t = by_key[(((0, (0, 1, -2), ()),), ((1, (0, 2), ()),), ((0, 0, 2),))]
    assert eq_count(t) == 1 and root_multiplicity(t) == 2
    t = by_key[(((0, (0, 1, -2), ()),), ((0, (0, 1), ()), (1, (0, 1), ())),
                ((0, 0, 1), (0, 1, 1)))]
    assert eq_count(t) == 1
    swapped = permute_roots(t, (1, 0))
    assert canonical_key(swapped) == canonical_key(t)


@pytest.mark.parametrize("kind", ["blowup", "conifold"])
def test_every_triple_passes_post_checks(kind):
    for k in range(4):
        m = local_model(k)
        geom = blowup_geometry(m) if kind == "blowup" else conifold_geometry(m)
        betas = [(0, 1), (1, 1), (2, 0)] if kind == "blowup" else [(1,), (2,)]
        for beta in betas:
            for g in range(2):
                for n in range(3):
                    for t in enum(g, n, beta, geom):
                        assert check_triple(t, g, n, beta, geom) == []
                        rep = vdim_additivity_check(t, geom)
                        assert rep.holds and rep.simplified_holds


def test_simplified_form_applicability():
    m = local_model(1)
    assert simplified_form_applies(blowup_geometry(m))
    assert simplified_form_applies(conifold_geometry(m))


def test_graph_key_round_trip():
    geom = conifold_geometry(local_model(2))
    for t in enum(1, 2, (2,), geom):
        for gr in (t.first, t.second):
            key, perm = graph_key(gr)
            back = parse_graph_key(gr.lattice, key)
            assert graph_key(back)[0] == key
            assert sorted(perm) == list(range(gr.n_roots))


def test_basis_validation():
    with pytest.raises(ValueError):
        CohomologyBasis(("a", "b"), [[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        CohomologyBasis(("a", "b"), [[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        CohomologyBasis(("a", "a"), [[1, 0], [0, 1]])
    assert CohomologyBasis.p1xp1().pairing("h1", "h2") == 1


def test_evaluate_by_hand():
    m = local_model(1)
    geom = blowup_geometry(m)
    triples = enum(0, 0, (0, 1), geom)
    t1, t2 = RelativeGWTable(m.Xt), RelativeGWTable(m.Y)
    t1.set("0|0,1,-1|-|1", ("pt",), 2)
    t1.set("0|0,1,-1|-|1", ("h1",), 3)
    t1.set("0|0,1,0|-|-", (), 11)
    t2.set("0|0,1|-|1", ("1",), 5)
    t2.set("0|0,1|-|1", ("h2",), 7)
    value, missing = evaluate_degeneration(triples, t1, t2, CohomologyBasis.p1xp1())
    assert value == 2 * 5 + 3 * 7 + 11
    assert missing == []


def test_evaluate_weights_and_symmetry_factors():
    m = local_model(2)
    geom = blowup_geometry(m)
    by_key = {canonical_key(t): t for t in enum(1, 0, (0, 1), geom)}
    two_roots = by_key[(((0, (0, 1, -2), ()),), ((0, (0, 2), ()),), ((0, 0, 1), (0, 0, 1)))]
    double = by_key[(((0, (0, 1, -2), ()),), ((1, (0, 2), ()),), ((0, 0, 2),))]
    t1, t2 = RelativeGWTable(m.Xt), RelativeGWTable(m.Y)
    t1.set(two_roots.first, ("pt", "pt"), 3)
    t2.set(two_roots.second, ("1", "1"), 4)
    t1.set(double.first, ("pt",), 5)
    t2.set(double.second, ("1",), 6)
    value, missing = evaluate_degeneration([two_roots, double], t1, t2, CohomologyBasis.p1xp1())
    assert value == Fraction(3 * 4, 2) + 2 * 5 * 6
    assert missing == []
    value, missing = evaluate_degeneration([two_roots], RelativeGWTable(m.Xt), t2,
                                           CohomologyBasis.p1xp1())
    assert value == 0 and missing == ["0|0,1,-2|-|1,1"]


def test_relative_table_label_transport():
    m = local_model(2)
    geom = blowup_geometry(m)
    (t,) = [x for x in enum(1, 0, (0, 1), geom) if len(x.second.vertices) == 2
            and x.first.genus_sum() == 0]
    tab = RelativeGWTable(m.Y)
    tab.set(t.second, ("h1", "pt"), 9)
    got = tab.values_for(t.second)
    assert got == {("h1", "pt"): 9}


@given(st.integers(0, 3), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2),
       st.integers(0, 1))
@settings(max_examples=40, deadline=None)
def test_genus_and_leg_bookkeeping(k, a, b, n, g):
    geom = blowup_geometry(local_model(k))
    for t in enum(g, n, (a, b), geom):
        assert genus(t) == g
        assert t.n == n
        assert sorted(t.I + t.leg_labels()[1]) == list(range(1, n + 1))
