"""Invariants of the smoothing X'' from those of X, using the bundled example.

Each class b on X'' collects the X invariants of h*b + l*C for l = 0..k*b;
outside that window the invariants must vanish.
"""

from flopgw import data_path
from flopgw.novikov import serialize
from flopgw.textio import parse_geometry, parse_table
from flopgw.transform import (transition_index_set, transition_table,
                              transition_threepoint_check, transition_transform)

geo = parse_geometry(data_path("local_p1.geom").read_text())
tx = parse_table(data_path("local_p1_X.gw").read_text(), geo.lattices)
geom = geo.transition

for b in (1, 2):
    print(f"b = {b}: window {transition_index_set((b,), geom)}, "
          f"pushforward {geom.pushforward((b,))}, "
          f"value {transition_transform(tx, (b,), 0, ('Dpp',) * 3, geom)}")

tpp = transition_table(tx, geom)
rep = transition_threepoint_check(tx, tpp, ("Dpp",) * 3, geo.registry("X"),
                                  geo.registry("Xpp"), geom)
print("\nPsi^X after q^C -> 1 :", serialize(rep.lhs))
print("Psi^X''             :", serialize(rep.rhs))
print("equal               :", rep.equal)
