"""Admissible triples for degenerating X to the blow-up along C plus a
projective bundle, and the weighted sum they feed.

For k = 2 and the class h (which meets C twice), genus 1, no markings.
"""

from fractions import Fraction

from flopgw import CohomologyBasis, RelativeGWTable, local_model
from flopgw.degeneration import (blowup_geometry, canonical_key, enumerate_blowup_triples,
                                 eq_count, evaluate_degeneration, genus, root_multiplicity,
                                 vdim_additivity_check)

model = local_model(k=2)
geom = blowup_geometry(model)
triples = enumerate_blowup_triples(1, 0, (0, 1), geom, max_vertices=3, max_genus=1, max_weight=3)

print(f"{len(triples)} triples for beta = h, g = 1, n = 0")
for t in triples:
    rep = vdim_additivity_check(t, geom)
    print(f"  {canonical_key(t)}")
    print(f"      g={genus(t)} m={root_multiplicity(t)} |Eq|={eq_count(t)} "
          f"vdim {rep.lhs} = {rep.rhs}")

# made-up relative invariants: only the graphs with a single root on each side
t1, t2 = RelativeGWTable(model.Xt), RelativeGWTable(model.Y)
for t in triples:
    if t.r == 1:
        t1.set(t.first, ("pt",), Fraction(1, 2))
        t2.set(t.second, ("1",), 3)
value, missing = evaluate_degeneration(triples, t1, t2, CohomologyBasis.p1xp1())
print("\nweighted sum over the triples:", value)
print("graphs without table data (counted as 0):", len(missing))
