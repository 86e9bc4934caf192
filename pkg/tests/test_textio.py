import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_flop_table
from flopgw import data_path
from flopgw.degeneration import RelativeGWTable
from flopgw.models import local_model
from flopgw.textio import (ParseError, geometry_equal, parse_geometry, parse_reltable,
                           parse_table, serialize_geometry, serialize_reltable,
                           serialize_table)

HEADER = "#% flopgw-geometry v1\n"


def test_shipped_geometry_parses(shipped):
    geo, tables = shipped
    assert set(geo.lattices) == {"X", "Xp", "Xt", "Xpp", "Y", "Q"}
    assert geo.flop and geo.blowup and geo.conifold and geo.transition
    assert geo.transition.insertion_map == {"Dpp": "D"}
    assert set(tables) == {"X", "Xp", "Xpp"}
    assert str(geo.rings["AY"].element("w^3")) == "2 * v*w^2"


def test_geometry_round_trip(shipped):
    geo, _ = shipped
    text = serialize_geometry(geo)
    again = parse_geometry(text)
    assert geometry_equal(geo, again)
    assert serialize_geometry(again) == text


@pytest.mark.parametrize("body, line, fragment", [
    ("lattice X a\nbogus 1\n", 3, "unknown statement"),
    ("lattice X a\neffective X 1,x\n", 3, "integers"),
    ("lattice X a\nlattice X b\n", 3, "twice"),
    ("lattice X a\nmap f X Y 1\n", 3, "unknown lattice"),
    ("lattice X a\nmap f X X 1,0\n", 3, "matrix"),
    ("ring R v:1\ntop R 2\nrule R v^2 = v\n", 2, "homogeneous"),
    ("lattice X a\neffective X 1\ninsertion X H 1 0\ntriple X H H 1\n", 5, "three labels"),
    ("lattice X a\neffective X 1\nflop X=X\n", 4, "missing field"),
])
def test_geometry_errors_carry_line_numbers(body, line, fragment):
    with pytest.raises(ParseError) as err:
        parse_geometry(HEADER + body, "g.geom")
    assert f"g.geom:{line}:" in str(err.value)
    assert fragment in str(err.value)


def test_missing_header():
    with pytest.raises(ParseError, match=":1:"):
        parse_geometry("lattice X a\n")


def test_table_errors(shipped):
    geo, _ = shipped
    with pytest.raises(ParseError, match=":3:"):
        parse_table("#% gwtable v1\nlattice X\n0 1 0,1 H\n", geo.lattices)
    with pytest.raises(ParseError, match=":4:.*duplicate"):
        parse_table("#% gwtable v1\nlattice X\n0 0 0,1 - 1\n0 0 0,1 - 2\n", geo.lattices)
    with pytest.raises(ParseError, match="effective"):
        parse_table("#% gwtable v1\nlattice X\n0 0 -1,0 - 1\n", geo.lattices)
    with pytest.raises(ParseError, match="rational"):
        parse_table("#% gwtable v1\nlattice X\n0 0 0,1 - 1/0\n", geo.lattices)


def test_shipped_tables_are_canonical(shipped):
    _, tables = shipped
    for name, fname in (("X", "local_p1_X.gw"), ("Xp", "local_p1_Xp.gw"),
                        ("Xpp", "local_p1_Xpp.gw")):
        assert serialize_table(tables[name]) == data_path(fname).read_text()


@given(st.integers(0, 3), st.integers(0, 10 ** 6), st.booleans())
@settings(max_examples=60, deadline=None)
def test_table_round_trip(k, seed, rule):
    m = local_model(k)
    t = random_flop_table(random.Random(seed), m, rule=rule)
    t.provenance = "random"
    text = serialize_table(t)
    back = parse_table(text, {"X": m.X})
    assert back == t and back.provenance == "random"
    assert serialize_table(back) == text


def test_rational_format():
    m = local_model(1)
    t = random_flop_table(random.Random(0), m)
    t.set(0, 0, (0, 1), (), Fraction(6, -4))
    assert "0 0 0,1 - -3/2" in serialize_table(t)


def test_relative_table_round_trip():
    m = local_model(1)
    t = RelativeGWTable(m.Xt)
    t.set("0|0,1,-1|-|1", ("pt",), Fraction(2, 3))
    t.set("0|0,1,0|1|-", (), -4)
    text = serialize_reltable(t)
    assert text.startswith("#% relgw v1\nlattice Xt\n")
    back = parse_reltable(text, {"Xt": m.Xt})
    assert back == t
    assert serialize_reltable(back) == text
    with pytest.raises(ParseError, match=":3:"):
        parse_reltable("#% relgw v1\nlattice Xt\n0|0,1,-1|-|1 - 1\n", {"Xt": m.Xt})
