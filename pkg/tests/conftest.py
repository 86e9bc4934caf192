import random
from fractions import Fraction

import pytest

from flopgw import data_path
from flopgw.models import flop_geometry, local_model, transition_geometry
from flopgw.textio import parse_geometry, parse_table
from flopgw.transform import GWTable, InsertionClass, InsertionRegistry


@pytest.fixture
def model():
    return local_model(1)


@pytest.fixture(scope="session")
def shipped():
    geo = parse_geometry(data_path("local_p1.geom").read_text())
    tables = {}
    for name in ("local_p1_X.gw", "local_p1_Xp.gw", "local_p1_Xpp.gw"):
        t = parse_table(data_path(name).read_text(), geo.lattices)
        tables[t.lattice.name] = t
    return geo, tables


def c_registry(a1, a2, a3, product=1):
    """Registry with three divisor-like classes of prescribed c-pairings."""
    classes = [InsertionClass(f"A{i}", 1, a) for i, a in enumerate((a1, a2, a3))]
    return InsertionRegistry(classes, {("A0", "A1", "A2"): product})


def random_flop_table(rng: random.Random, model, labels=("A0", "A1", "A2"), size=8,
                      rule=True) -> GWTable:
    """Random finite table on X whose classes survive the flop."""
    t = GWTable(model.X, multiple_cover_rule=rule)
    k = model.k
    for _ in range(size):
        b = rng.randint(1, 3)
        a = rng.randint(0, k * b)
        g = rng.choice([0, 0, 1])
        labs = labels if g == 0 else ()
        t.set(g, len(labs), (a, b), labs, Fraction(rng.randint(-9, 9), rng.randint(1, 6)))
    for m in range(1, rng.randint(1, 3) + 1):
        t.set(rng.randint(0, 2), 0, (m, 0), (), Fraction(rng.randint(-5, 5), m ** 3))
    return t


@pytest.fixture
def flop(model):
    return flop_geometry(model)


@pytest.fixture
def transition(model):
    return transition_geometry(model, {"Dpp": "D"})
