"""Three-point functions on both sides of a flop.

A (-1,-1) curve C meets a second curve h once (k = 1). We put a few genus-0
invariants on X, push them to the flopped side, and watch the constant term
jump by -a1*a2*a3 once the multiple-cover tail is continued across the wall.
"""

from fractions import Fraction

from flopgw import GWTable, InsertionClass, InsertionRegistry, local_model
from flopgw.models import flop_geometry
from flopgw.novikov import serialize, truncate
from flopgw.transform import flop_registry, flop_transform, three_point_function, wallcrossing_check

model = local_model(k=1)
flop = flop_geometry(model)

# divisor-like insertions; c-pairings (H.C) = 2, -1, 3
reg = InsertionRegistry(
    [InsertionClass("H1", 1, 2), InsertionClass("H2", 1, -1), InsertionClass("H3", 1, 3)],
    {("H1", "H2", "H3"): 4},
)
labels = ("H1", "H2", "H3")

table = GWTable(model.X, multiple_cover_rule=True)
table.set(0, 3, (0, 1), labels, Fraction(1, 2))
table.set(0, 3, (1, 1), labels, -3)
table.set(0, 3, (1, 2), labels, 5)

psi = three_point_function(table, labels, reg, flop.C)
print("Psi^X            =", serialize(psi))
print("  first terms    =", truncate(psi, cutoff=3))

flopped = flop_transform(table, flop)
print("\nflopped table    :", dict(flopped.entries))
print("corrected triple :", flop_registry(reg).triple(labels), "(was", reg.triple(labels), ")")

rep = wallcrossing_check(table, labels, reg, flop)
print("\nphi(Psi^X)       =", serialize(rep.pushed))
print("continued        =", serialize(rep.continued))
print("Psi^X'           =", serialize(rep.flopped))
print("isomorphic       :", rep.isomorphic)
print("lambda+ - lambda- =", rep.discrepancy, " (-a1 a2 a3 =", -2 * -1 * 3, ")")
