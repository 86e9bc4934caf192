"""GW tables under a standard flop and a small extremal transition.

Insertions are abstract labels carrying a codimension, the pairing with the
flopping curve and registered classical triple products.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .lattice import (CurveClassLattice, LatticeMap, Vector, minimal_lift, vadd,
                      vscale)
from .novikov import NovikovElement, analytic_continue, series_equal, substitute


class TransformError(ValueError):
    """Raised with the list of (entry, reason) pairs that could not be mapped."""

    def __init__(self, message: str, rejected: Sequence = ()):
        super().__init__(message)
        self.rejected = list(rejected)


class MissingDataError(KeyError):
    pass


class VanishingViolation(ValueError):
    pass


# -- insertions ----------------------------------------------------------


@dataclass(frozen=True)
class InsertionClass:
    label: str
    codim: int
    c_pairing: int = 0

    def __post_init__(self):
        if not 0 <= self.codim <= 3:
            raise ValueError(f"insertion {self.label!r}: codimension must be 0..3")
        if self.codim != 1 and self.c_pairing != 0:
            raise ValueError(f"insertion {self.label!r}: only divisors pair with a curve")


def _tkey(labels: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(labels))


class InsertionRegistry:
    """Insertion classes of one 3-fold with classical products (a.b.c)_0."""

    def __init__(self, classes: Iterable[InsertionClass] = (),
                 triples: Mapping[Sequence[str], object] | None = None):
        self.classes: dict[str, InsertionClass] = {}
        for c in classes:
            if c.label in self.classes:
                raise ValueError(f"insertion {c.label!r} registered twice")
            self.classes[c.label] = c
        self.triples: dict[tuple[str, ...], Fraction] = {}
        for labels, v in (triples or {}).items():
            self.set_triple(labels, v)

    def get(self, label: str) -> InsertionClass:
        try:
            return self.classes[label]
        except KeyError:
            raise MissingDataError(f"insertion {label!r} is not registered") from None

    def set_triple(self, labels: Sequence[str], value) -> None:
        labels = _tkey(labels)
        if len(labels) != 3:
            raise ValueError("classical products take exactly three labels")
        for lab in labels:
            self.get(lab)
        if sum(self.classes[lab].codim for lab in labels) != 3 and Fraction(value) != 0:
            raise ValueError(f"product {labels} has no zero-dimensional part")
        self.triples[labels] = Fraction(value)

    def triple(self, labels: Sequence[str]) -> Fraction:
        labels = _tkey(labels)
        for lab in labels:
            self.get(lab)
        if labels in self.triples:
            return self.triples[labels]
        if sum(self.classes[lab].codim for lab in labels) != 3:
            return Fraction(0)
        raise MissingDataError(f"classical product {labels} is not registered")

    def c_pairings(self, labels: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.get(lab).c_pairing for lab in labels)

    def __eq__(self, other):
        return (isinstance(other, InsertionRegistry) and self.classes == other.classes
                and self.triples == other.triples)


# -- tables --------------------------------------------------------------


TableKey = tuple[int, int, Vector, tuple[str, ...]]


class GWTable:
    """Finite map (g, n, beta, labels) -> rational, labels stored sorted."""

    def __init__(self, lattice: CurveClassLattice,
                 entries: Mapping[TableKey, object] | None = None,
                 multiple_cover_rule: bool = False, provenance: str = ""):
        self.lattice = lattice
        self.multiple_cover_rule = bool(multiple_cover_rule)
        self.provenance = provenance
        self.entries: dict[TableKey, Fraction] = {}
        for (g, n, beta, labels), v in (entries or {}).items():
            self.set(g, n, beta, labels, v)

    def set(self, g: int, n: int, beta, labels: Sequence[str], value) -> None:
        beta = self.lattice._coords(beta)
        labels = _tkey(labels)
        if g < 0 or n != len(labels):
            raise ValueError(f"bad entry (g={g}, n={n}, labels={labels})")
        if not self.lattice.is_effective(beta):
            raise ValueError(f"class {beta} is not effective in {self.lattice.name!r}")
        self.entries[(int(g), int(n), beta, labels)] = Fraction(value)

    def value(self, g: int, beta, labels: Sequence[str] = ()) -> Fraction:
        labels = _tkey(labels)
        return self.entries.get((g, len(labels), self.lattice._coords(beta), labels), Fraction(0))

    def items(self):
        return sorted(self.entries.items(), key=lambda kv: kv[0])

    def __len__(self):
        return len(self.entries)

    def __eq__(self, other):
        return (isinstance(other, GWTable) and self.lattice == other.lattice
                and self.entries == other.entries
                and self.multiple_cover_rule == other.multiple_cover_rule)

    def copy(self) -> GWTable:
        t = GWTable(self.lattice, multiple_cover_rule=self.multiple_cover_rule,
                    provenance=self.provenance)
        t.entries = dict(self.entries)
        return t


# -- flop ------------------------------------------------------------------


@dataclass(frozen=True)
class FlopGeometry:
    X: CurveClassLattice
    Xp: CurveClassLattice
    phi: LatticeMap
    phi_inv: LatticeMap
    C: Vector
    Cp: Vector

    def __post_init__(self):
        object.__setattr__(self, "C", self.X._coords(self.C))
        object.__setattr__(self, "Cp", self.Xp._coords(self.Cp))
        if self.phi.source != self.X or self.phi.target != self.Xp:
            raise ValueError("phi must map X to X'")
        if self.phi_inv.source != self.Xp or self.phi_inv.target != self.X:
            raise ValueError("phi_inv must map X' to X")
        if self.phi.apply_coords(self.C) != vscale(-1, self.Cp):
            raise ValueError("phi must send [C] to -[C']")
        for lat, a, b in ((self.X, self.phi, self.phi_inv), (self.Xp, self.phi_inv, self.phi)):
            for i in range(lat.rank):
                e = tuple(int(i == j) for j in range(lat.rank))
                if b.apply_coords(a.apply_coords(e)) != e:
                    raise ValueError("phi_inv is not inverse to phi")

    def reversed(self) -> FlopGeometry:
        return FlopGeometry(self.Xp, self.X, self.phi_inv, self.phi, self.Cp, self.C)

    def multiple_of_C(self, beta: Vector) -> int | None:
        """m with beta = m[C], or None."""
        return _multiple(beta, self.C)


def _multiple(beta: Vector, c: Vector) -> int | None:
    i = next(j for j, x in enumerate(c) if x)
    if beta[i] % c[i]:
        return None
    m = beta[i] // c[i]
    return m if vscale(m, c) == tuple(beta) else None


def flop_provenance(flop: FlopGeometry) -> str:
    a, b = sorted((flop.X.name, flop.Xp.name))
    return f"flop pushforward between {a} and {b}"


def flop_transform(table: GWTable, flop: FlopGeometry) -> GWTable:
    """Push a GW table of X to X' entry by entry."""
    if table.lattice != flop.X:
        raise TransformError(f"table lives on {table.lattice.name!r}, not {flop.X.name!r}")
    out = GWTable(flop.Xp, multiple_cover_rule=table.multiple_cover_rule,
                  provenance=flop_provenance(flop))
    rejected = []
    for key, v in table.items():
        g, n, beta, labels = key
        m = flop.multiple_of_C(beta)
        if m == 0:
            rejected.append((key, "degree-zero entries are not transformed"))
            continue
        if m is not None:
            if n > 0:
                rejected.append((key, "multiple of [C] with insertions"))
                continue
            image = vscale(m, flop.Cp)
        else:
            image = flop.phi.apply_coords(beta)
        if not flop.Xp.is_effective(image):
            rejected.append((key, f"image {image} is not effective"))
            continue
        out.set(g, n, image, labels, v)
    if rejected:
        lines = "; ".join(f"{k}: {why}" for k, why in rejected)
        raise TransformError(f"{len(rejected)} entries rejected: {lines}", rejected)
    return out


def flop_involution_check(table: GWTable, flop: FlopGeometry) -> bool:
    back = flop_transform(flop_transform(table, flop), flop.reversed())
    return back.entries == table.entries and back.multiple_cover_rule == table.multiple_cover_rule


@dataclass(frozen=True)
class TripleCorrection:
    labels: tuple[str, ...]
    product: Fraction
    correction: Fraction

    @property
    def value(self) -> Fraction:
        return self.product - self.correction


def triple_product_correction(labels: Sequence[str], registry: InsertionRegistry,
                              target: InsertionRegistry | None = None) -> TripleCorrection:
    """phi(a1).phi(a2).phi(a3) = a1.a2.a3 - (C.a1)(C.a2)(C.a3).

    Writes the value into ``target`` when given.
    """
    labels = _tkey(labels)
    prod = registry.triple(labels)
    corr = Fraction(math.prod(registry.c_pairings(labels)))
    rec = TripleCorrection(labels, prod, corr)
    if target is not None:
        target.set_triple(labels, rec.value)
    return rec


def flop_registry(registry: InsertionRegistry) -> InsertionRegistry:
    """Insertion data on X': c-pairings negated, triple products corrected."""
    classes = [InsertionClass(c.label, c.codim, -c.c_pairing) for c in registry.classes.values()]
    out = InsertionRegistry(classes)
    for labels in registry.triples:
        triple_product_correction(labels, registry, out)
    return out


# -- 3-point functions -------------------------------------------------------


def multiple_cover_tail(a1: int, a2: int, a3: int, lattice: CurveClassLattice,
                        C: Vector) -> NovikovElement:
    """a1 a2 a3 q^C / (1 - q^C)."""
    c = a1 * a2 * a3
    if c == 0:
        return NovikovElement(lattice)
    return NovikovElement.tail(lattice, C, C, c)


def multiple_cover_series(a: Sequence[int], C: Vector, M: int) -> dict[Vector, Fraction]:
    """Sum over m <= M of (m a1)(m a2)(m a3) / m^3 q^{mC}, term by term."""
    out = {}
    for m in range(1, M + 1):
        v = Fraction(math.prod(m * x for x in a), m ** 3)
        if v:
            out[vscale(m, C)] = v
    return out


def three_point_function(table: GWTable, labels: Sequence[str], registry: InsertionRegistry,
                         C: Vector | None = None) -> NovikovElement:
    """Classical part + finite middle sum + multiple-cover tail along C."""
    lat = table.lattice
    labels = _tkey(labels)
    if len(labels) != 3:
        raise ValueError("three insertion labels required")
    f = NovikovElement.constant(lat, registry.triple(labels))
    C = None if C is None else lat._coords(C)
    poly = {}
    for (g, n, beta, labs), v in table.items():
        if g != 0 or labs != labels or not any(beta):
            continue
        if C is not None and table.multiple_cover_rule and _multiple(beta, C):
            continue
        poly[beta] = poly.get(beta, 0) + v
    f = f + NovikovElement(lat, poly)
    if C is not None and table.multiple_cover_rule:
        a = registry.c_pairings(labels)
        f = f + multiple_cover_tail(*a, lat, C)
    return f


@dataclass(frozen=True)
class WallCrossingReport:
    isomorphic: bool
    pushed: NovikovElement
    continued: NovikovElement
    flopped: NovikovElement
    lambda_minus: Fraction
    lambda_plus: Fraction

    @property
    def discrepancy(self) -> Fraction:
        return self.lambda_plus - self.lambda_minus

    def __bool__(self):
        return self.isomorphic


def wallcrossing_check(table: GWTable, labels: Sequence[str], registry: InsertionRegistry,
                       flop: FlopGeometry, table_p: GWTable | None = None,
                       registry_p: InsertionRegistry | None = None) -> WallCrossingReport:
    """Compare phi(Psi^X(a)) with Psi^{X'}(phi a) up to analytic continuation.

    X' data default to the flop images of the X data.
    """
    if table_p is None:
        table_p = flop_transform(table, flop)
    if registry_p is None:
        registry_p = flop_registry(registry)
    lhs = substitute(three_point_function(table, labels, registry, flop.C), flop.phi)
    rhs = three_point_function(table_p, labels, registry_p, flop.Cp)
    cont = analytic_continue(lhs)
    iso = series_equal(cont, analytic_continue(rhs))
    return WallCrossingReport(iso, lhs, cont, rhs, lhs.constant_term(), cont.constant_term())


# -- small extremal transition -----------------------------------------------


@dataclass(frozen=True)
class TransitionGeometry:
    """X with a contracted curve C and the smoothing X''.

    ``rulings = (gamma_21, gamma_22)`` are the two rulings of E in the blow-up,
    the first mapping onto C and the second contracted by ``p1``.
    ``insertion_map`` sends X'' labels to their X counterparts.
    """

    X: CurveClassLattice
    Xt: CurveClassLattice
    Xpp: CurveClassLattice
    p1: LatticeMap
    phi_e: LatticeMap
    C: Vector
    rulings: tuple[Vector, Vector]
    divisor: str = "E"
    insertion_map: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "C", self.X._coords(self.C))
        if any(self.phi_e.apply_coords(self.C)):
            raise ValueError("phi_e must contract [C]")
        if self.phi_e.kernel_rank() != 1:
            raise ValueError("ker(phi_e) must have rank one")
        r1, r2 = (self.Xt._coords(r) for r in self.rulings)
        if self.p1.apply_coords(r1) != self.C or any(self.p1.apply_coords(r2)):
            raise ValueError("rulings must map to [C] and to 0 under p1")
        object.__setattr__(self, "insertion_map", dict(self.insertion_map))

    @property
    def contraction(self) -> LatticeMap:
        return self.phi_e.compose(self.p1, "contract")

    def minimal_lift(self, beta) -> Vector:
        return minimal_lift(self.contraction, beta, self.rulings).coords

    def pushforward(self, beta) -> Vector:
        """phi_*(beta) in H_2(X): image of the minimal lifting."""
        return self.p1.apply_coords(self.minimal_lift(beta))

    def map_labels(self, labels: Sequence[str]) -> tuple[str, ...]:
        try:
            return tuple(self.insertion_map[lab] for lab in labels)
        except KeyError as exc:
            raise MissingDataError(f"insertion {exc.args[0]!r} has no image in X") from None


def transition_index_set(beta, geom: TransitionGeometry) -> list[int]:
    beta = geom.Xpp._coords(beta)
    if not any(beta):
        raise ValueError("the transition formula needs beta != 0")
    if not geom.Xpp.is_effective(beta):
        raise ValueError(f"{beta} is not effective in {geom.Xpp.name!r}")
    e = geom.Xt.pair(geom.divisor, geom.minimal_lift(beta))
    return list(range(e + 1))


def transition_transform(table: GWTable, beta, g: int, labels: Sequence[str],
                         geom: TransitionGeometry) -> Fraction:
    """Psi^{X''}_{(g,n;beta)}(labels) as a finite sum of X invariants."""
    if table.lattice != geom.X:
        raise ValueError("table must live on X")
    base = geom.pushforward(beta)
    xl = geom.map_labels(labels)
    return sum((table.value(g, vadd(base, vscale(l, geom.C)), xl)
                for l in transition_index_set(beta, geom)), Fraction(0))


def transition_transform_fiber_sum(table: GWTable, beta, g: int, labels: Sequence[str],
                                   geom: TransitionGeometry, cutoff: int) -> Fraction:
    """Sum over the fiber phi_e^{-1}(beta), |k| <= cutoff around phi_*(beta).

    Nonzero entries outside the index set contradict the vanishing of those
    invariants and raise VanishingViolation.
    """
    index = set(transition_index_set(beta, geom))
    base = geom.pushforward(beta)
    xl = geom.map_labels(labels)
    total = Fraction(0)
    for k in range(-cutoff, cutoff + 1):
        v = table.value(g, vadd(base, vscale(k, geom.C)), xl)
        if not v:
            continue
        if k not in index:
            raise VanishingViolation(
                f"nonzero invariant at {vadd(base, vscale(k, geom.C))}, outside the index set")
        total += v
    return total


def transition_table(table: GWTable, geom: TransitionGeometry) -> GWTable:
    """GW table of X'' built from every X entry whose labels have X'' preimages."""
    back = {}
    for src, dst in geom.insertion_map.items():
        back.setdefault(dst, src)
    out = GWTable(geom.Xpp, provenance=f"transition from {geom.X.name} to {geom.Xpp.name}")
    seen = set()
    for (g, n, beta, labels), _ in table.items():
        b = geom.phi_e.apply_coords(beta)
        if not any(b) or not all(lab in back for lab in labels):
            continue
        pp = tuple(back[lab] for lab in labels)
        key = (g, b, _tkey(pp))
        if key in seen or not geom.Xpp.is_effective(b):
            continue
        seen.add(key)
        v = transition_transform(table, b, g, pp, geom)
        if v:
            out.set(g, n, b, pp, v)
    return out


@dataclass(frozen=True)
class TransitionReport:
    equal: bool
    lhs: NovikovElement
    rhs: NovikovElement

    def __bool__(self):
        return self.equal


def transition_threepoint_check(table: GWTable, table_pp: GWTable, labels: Sequence[str],
                                registry: InsertionRegistry, registry_pp: InsertionRegistry,
                                geom: TransitionGeometry) -> TransitionReport:
    """Psi^X(phi a) with q^beta -> q^{phi_e(beta)} equals Psi^{X''}(a)."""
    xl = geom.map_labels(labels)
    if any(registry.c_pairings(xl)):
        raise ValueError("insertions must be disjoint from C (zero c-pairing)")
    lhs = substitute(three_point_function(table, xl, registry, geom.C), geom.phi_e)
    rhs = three_point_function(table_pp, labels, registry_pp)
    return TransitionReport(series_equal(lhs, rhs), lhs, rhs)
