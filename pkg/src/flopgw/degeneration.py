"""Admissible weighted graphs and triples, the explicit Omega sets of the
blow-up and conifold degenerations, and numerical degeneration sums.

Relative invariants are user input; only the bookkeeping is computed here.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .lattice import (CurveClassLattice, LatticeMap, Vector, dot, minimal_lift,
                      minimal_lift_blowup, vadd, vscale, vsub)

MAX_EQ_ROOTS = 8


class AdmissibilityError(ValueError):
    pass


class CapError(ValueError):
    pass


# -- graphs --------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleGraph:
    """Edgeless graph with vertex genera and classes, legs and weighted roots.

    ``legs[i]`` is the vertex carrying leg i; ``roots[j] = (vertex, mu)``.
    """

    lattice: CurveClassLattice
    vertices: tuple[tuple[int, Vector], ...] = ()
    legs: tuple[int, ...] = ()
    roots: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices",
                           tuple((int(g), self.lattice._coords(b)) for g, b in self.vertices))
        object.__setattr__(self, "legs", tuple(int(v) for v in self.legs))
        object.__setattr__(self, "roots", tuple((int(v), int(m)) for v, m in self.roots))
        nv = len(self.vertices)
        for g, _ in self.vertices:
            if g < 0:
                raise AdmissibilityError("vertex genus must be non-negative")
        for v in self.legs:
            if not 0 <= v < nv:
                raise AdmissibilityError(f"leg attached to missing vertex {v}")
        for v, mu in self.roots:
            if not 0 <= v < nv:
                raise AdmissibilityError(f"root attached to missing vertex {v}")
            if mu < 1:
                raise AdmissibilityError("root weights must be positive")
        if nv > 1:
            rooted = {v for v, _ in self.roots}
            if len(rooted) != nv:
                raise AdmissibilityError("graph is not relatively connected")

    @property
    def n_legs(self) -> int:
        return len(self.legs)

    @property
    def n_roots(self) -> int:
        return len(self.roots)

    def total_class(self) -> Vector:
        total = (0,) * self.lattice.rank
        for _, b in self.vertices:
            total = vadd(total, b)
        return total

    def genus_sum(self) -> int:
        return sum(g for g, _ in self.vertices)

    def weights(self) -> tuple[int, ...]:
        return tuple(m for _, m in self.roots)

    def is_empty(self) -> bool:
        return not self.vertices


@dataclass(frozen=True)
class AdmissibleTriple:
    """(Gamma_1, Gamma_2, I). The k-th leg of Gamma_1 carries the k-th
    smallest label of I; Gamma_2's legs carry the remaining labels in order."""

    first: AdmissibleGraph
    second: AdmissibleGraph
    I: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "I", tuple(sorted(int(i) for i in self.I)))
        if len(set(self.I)) != len(self.I):
            raise AdmissibilityError("I has repeated labels")
        if len(self.I) != self.first.n_legs:
            raise AdmissibilityError("|I| must equal the number of legs of Gamma_1")
        if any(not 1 <= i <= self.n for i in self.I):
            raise AdmissibilityError("I must be a subset of {1..n}")
        if self.first.weights() != self.second.weights():
            raise AdmissibilityError("root weights of the two graphs differ")
        if not _glued_connected(self):
            raise AdmissibilityError("glued graph is not connected")

    @property
    def n(self) -> int:
        return self.first.n_legs + self.second.n_legs

    @property
    def r(self) -> int:
        return self.first.n_roots

    def leg_labels(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        rest = tuple(i for i in range(1, self.n + 1) if i not in self.I)
        return self.I, rest


def _glued_connected(t: AdmissibleTriple) -> bool:
    a, b = len(t.first.vertices), len(t.second.vertices)
    if a + b == 0:
        return False
    parent = list(range(a + b))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (v1, _), (v2, _) in zip(t.first.roots, t.second.roots):
        parent[find(v1)] = find(a + v2)
    return len({find(x) for x in range(a + b)}) == 1


# -- numerical data of a triple -------------------------------------------


def genus(eta: AdmissibleTriple) -> int:
    nv = len(eta.first.vertices) + len(eta.second.vertices)
    return eta.r + 1 - nv + eta.first.genus_sum() + eta.second.genus_sum()


def degree(eta: AdmissibleTriple, h1: Sequence[int], h2: Sequence[int]) -> int:
    """H-degree: sum of b(v).H over both sides."""
    if len(h1) != eta.first.lattice.rank or len(h2) != eta.second.lattice.rank:
        raise AdmissibilityError("functional length does not match lattice rank")
    return dot(h1, eta.first.total_class()) + dot(h2, eta.second.total_class())


def root_multiplicity(eta: AdmissibleTriple) -> int:
    return math.prod(eta.first.weights())


def _flat(eta: AdmissibleTriple):
    """Vertex lists, ordered roots (v1, v2, mu) and per-vertex leg labels."""
    i1, i2 = eta.leg_labels()
    legs1 = [[] for _ in eta.first.vertices]
    legs2 = [[] for _ in eta.second.vertices]
    for lab, v in zip(i1, eta.first.legs):
        legs1[v].append(lab)
    for lab, v in zip(i2, eta.second.legs):
        legs2[v].append(lab)
    roots = tuple((v1, v2, m) for (v1, m), (v2, _) in zip(eta.first.roots, eta.second.roots))
    return (tuple(eta.first.vertices), tuple(map(tuple, legs1)),
            tuple(eta.second.vertices), tuple(map(tuple, legs2)), roots)


def _relabelled_forms(eta: AdmissibleTriple, sort_roots: bool) -> Iterator[tuple]:
    v1, l1, v2, l2, roots = _flat(eta)
    for p1 in itertools.permutations(range(len(v1))):
        side1 = [None] * len(v1)
        for old, new in enumerate(p1):
            side1[new] = (v1[old][0], v1[old][1], l1[old])
        for p2 in itertools.permutations(range(len(v2))):
            side2 = [None] * len(v2)
            for old, new in enumerate(p2):
                side2[new] = (v2[old][0], v2[old][1], l2[old])
            rs = tuple((p1[a], p2[b], m) for a, b, m in roots)
            if sort_roots:
                rs = tuple(sorted(rs))
            yield (tuple(side1), tuple(side2), rs), p1, p2


def canonical_key(eta: AdmissibleTriple) -> tuple:
    """Invariant under vertex relabelling and root reordering."""
    return min(form for form, _, _ in _relabelled_forms(eta, True))


def ordered_key(eta: AdmissibleTriple) -> tuple:
    """Invariant under vertex relabelling only; root order matters."""
    return min(form for form, _, _ in _relabelled_forms(eta, False))


def permute_roots(eta: AdmissibleTriple, sigma: Sequence[int]) -> AdmissibleTriple:
    """New triple whose j-th root pair is the sigma[j]-th root pair of eta."""
    f, s = eta.first, eta.second
    f2 = AdmissibleGraph(f.lattice, f.vertices, f.legs, tuple(f.roots[i] for i in sigma))
    s2 = AdmissibleGraph(s.lattice, s.vertices, s.legs, tuple(s.roots[i] for i in sigma))
    return AdmissibleTriple(f2, s2, eta.I)


def eq_count(eta: AdmissibleTriple) -> int:
    """Number of root permutations leaving eta unchanged."""
    r = eta.r
    if r > MAX_EQ_ROOTS:
        raise CapError(f"eq_count supports at most {MAX_EQ_ROOTS} roots, got {r}")
    base = ordered_key(eta)
    return sum(1 for sigma in itertools.permutations(range(r))
               if ordered_key(permute_roots(eta, sigma)) == base)


def triple_from_key(key: tuple, lat1: CurveClassLattice,
                    lat2: CurveClassLattice) -> AdmissibleTriple:
    side1, side2, roots = key
    legs1 = sorted((lab, v) for v, (_, _, labs) in enumerate(side1) for lab in labs)
    legs2 = sorted((lab, v) for v, (_, _, labs) in enumerate(side2) for lab in labs)
    g1 = AdmissibleGraph(lat1, tuple((g, b) for g, b, _ in side1), tuple(v for _, v in legs1),
                         tuple((a, m) for a, _, m in roots))
    g2 = AdmissibleGraph(lat2, tuple((g, b) for g, b, _ in side2), tuple(v for _, v in legs2),
                         tuple((b, m) for _, b, m in roots))
    return AdmissibleTriple(g1, g2, tuple(lab for lab, _ in legs1))


# -- degeneration geometries -----------------------------------------------


@dataclass(frozen=True)
class DegenerationGeometry:
    """W degenerating to Y1 glued to Y2 along a divisor labelled ``divisor``.

    ``p1``/``p2`` push classes down to W. For a blow-up degeneration
    ``fibers1 = (gamma,)`` and ``fibers2 = (gamma,)``; for a conifold
    degeneration ``fibers1`` holds the two rulings and ``fibers2`` the
    line class of the quadric.
    """

    kind: str
    W: CurveClassLattice
    Y1: CurveClassLattice
    Y2: CurveClassLattice
    p1: LatticeMap
    p2: LatticeMap
    fibers1: tuple[Vector, ...]
    fibers2: tuple[Vector, ...]
    divisor: str = "E"
    dims: tuple[int, int, int, int] = (3, 3, 3, 2)
    _lifts: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("blowup", "conifold"):
            raise ValueError(f"unknown degeneration kind {self.kind!r}")
        if self.p1.source != self.Y1 or self.p1.target != self.W:
            raise ValueError("p1 must map Y1 to W")
        if self.p2.source != self.Y2 or self.p2.target != self.W:
            raise ValueError("p2 must map Y2 to W")
        E = self.divisor
        for f in self.fibers1:
            if self.Y1.pair(E, f) != -1:
                raise ValueError("fiber classes of Y1 must pair to -1 with the divisor")
        for f in self.fibers2:
            if self.Y2.pair(E, f) != 1:
                raise ValueError("fiber class of Y2 must pair to +1 with the divisor")

    def e1(self, v: Vector) -> int:
        return self.Y1.pair(self.divisor, v)

    def e2(self, v: Vector) -> int:
        return self.Y2.pair(self.divisor, v)

    def lift1(self, beta: Vector) -> Vector:
        """Minimal lifting of a W-class to Y1."""
        key = (1, tuple(beta))
        if key not in self._lifts:
            if self.kind == "blowup":
                x = minimal_lift_blowup(self.p1, self.divisor, beta, self.fibers1[0])
            else:
                x = minimal_lift(self.p1, beta, self.fibers1)
            self._lifts[key] = x.coords
        return self._lifts[key]

    def lift2(self, beta: Vector) -> Vector | None:
        """Minimal lifting of a W-class to Y2 (None if beta is not a Y2 image)."""
        key = (2, tuple(beta))
        if key not in self._lifts:
            try:
                x = minimal_lift(self.p2, beta, self.fibers2).coords
            except ValueError:
                x = None
            self._lifts[key] = x
        return self._lifts[key]


def blowup_geometry(model) -> DegenerationGeometry:
    """X degenerating to the blow-up along C glued to P(N + O)."""
    return DegenerationGeometry("blowup", model.X, model.Xt, model.Y, model.p1, model.p2,
                                ((0, 0, 1),), ((0, 1),))


def conifold_geometry(model) -> DegenerationGeometry:
    """X'' degenerating to the conifold, resolved as the blow-up glued to a quadric."""
    return DegenerationGeometry("conifold", model.Xpp, model.Xt, model.Q, model.contraction,
                                model.q_to_xpp, ((1, 0, 1), (0, 0, 1)), ((1,),))


# -- enumeration -----------------------------------------------------------


@dataclass(frozen=True)
class Caps:
    max_vertices: int
    max_genus: int
    max_weight: int

    def __post_init__(self):
        for name in ("max_vertices", "max_genus", "max_weight"):
            v = getattr(self, name)
            if v is None:
                raise CapError(f"enumeration needs an explicit {name}")
            if v < (0 if name == "max_genus" else 1):
                raise CapError(f"{name} out of range: {v}")


def _caps(max_vertices, max_genus, max_weight) -> Caps:
    return Caps(max_vertices, max_genus, max_weight)


def _partitions(total: int, max_part: int, max_len: int) -> list[tuple[int, ...]]:
    """Partitions of ``total`` into non-increasing parts <= max_part."""
    out = []

    def rec(rest, cap, acc):
        if rest == 0:
            out.append(tuple(acc))
            return
        if len(acc) == max_len:
            return
        for p in range(min(rest, cap), 0, -1):
            rec(rest - p, p, acc + [p])

    rec(total, max_part, [])
    return out


def _class_multisets(lattice: CurveClassLattice, total: Vector, size: int, pair) -> list:
    """Non-increasing tuples of effective classes c with pair(c) >= 1 summing to total."""
    deg = lattice.degree(total)
    cands = [c for c in lattice.effective_classes(deg)
             if any(c) and pair(c) >= 1 and lattice.is_effective(vsub(total, c))]
    cands.sort(reverse=True)
    out = []

    def rec(rest, start, acc):
        if len(acc) == size:
            if not any(rest):
                out.append(tuple(acc))
            return
        for i in range(start, len(cands)):
            c = cands[i]
            nxt = vsub(rest, c)
            if lattice.is_effective(nxt):
                rec(nxt, i, acc + [c])

    rec(total, 0, [])
    return out


def _genus_splits(total: int, slots: int, cap: int) -> Iterator[tuple[int, ...]]:
    if total < 0:
        return
    for gs in itertools.product(range(min(total, cap) + 1), repeat=slots):
        if sum(gs) == total:
            yield gs


def _matchings(roots1: list, roots2: list) -> Iterator[tuple]:
    """Bijections pairing roots of equal weight, up to swapping identical roots."""
    if not roots1:
        yield ()
        return
    (v1, m), rest1 = roots1[0], roots1[1:]
    seen = set()
    for j, (v2, m2) in enumerate(roots2):
        if m2 != m or (v2, m2) in seen:
            continue
        seen.add((v2, m2))
        for tail in _matchings(rest1, roots2[:j] + roots2[j + 1:]):
            yield ((v1, v2, m),) + tail


def _connected(a: int, b: int, roots) -> bool:
    adj = {i: set() for i in range(a + b)}
    for v1, v2, _ in roots:
        adj[v1].add(a + v2)
        adj[a + v2].add(v1)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return len(seen) == a + b


def _one_sided(lattice, other, total: Vector, g: int, n: int, side: int, caps: Caps,
               pair) -> list[AdmissibleTriple]:
    """Single vertex, no roots, all n legs."""
    if pair(total) != 0 or g > caps.max_genus or not lattice.is_effective(total):
        return []
    if not any(total) and 2 * g - 2 + n <= 0:
        return []
    gr = AdmissibleGraph(lattice, ((g, total),), (0,) * n, ())
    empty = AdmissibleGraph(other)
    if side == 1:
        return [AdmissibleTriple(gr, empty, tuple(range(1, n + 1)))]
    return [AdmissibleTriple(empty, gr, ())]


def _two_sided(geom: DegenerationGeometry, b1: Vector, b2: Vector, g: int, n: int,
               caps: Caps) -> list[AdmissibleTriple]:
    l = geom.e1(b1)
    if l < 1 or geom.e2(b2) != l:
        return []
    L1, L2 = geom.Y1, geom.Y2
    if not (L1.is_effective(b1) and L2.is_effective(b2)):
        return []
    keys = set()
    out = []
    for a in range(1, caps.max_vertices + 1):
        for dec1 in _class_multisets(L1, b1, a, geom.e1):
            for b in range(1, caps.max_vertices + 1):
                for dec2 in _class_multisets(L2, b2, b, geom.e2):
                    parts1 = [_partitions(geom.e1(c), caps.max_weight, l) for c in dec1]
                    parts2 = [_partitions(geom.e2(c), caps.max_weight, l) for c in dec2]
                    for ps1 in itertools.product(*parts1):
                        roots1 = [(v, m) for v, p in enumerate(ps1) for m in p]
                        w1 = sorted(m for _, m in roots1)
                        for ps2 in itertools.product(*parts2):
                            roots2 = [(v, m) for v, p in enumerate(ps2) for m in p]
                            if sorted(m for _, m in roots2) != w1:
                                continue
                            r = len(roots1)
                            gsum = g - r - 1 + a + b
                            if gsum < 0:
                                continue
                            for match in _matchings(roots1, roots2):
                                if not _connected(a, b, match):
                                    continue
                                for gs in _genus_splits(gsum, a + b, caps.max_genus):
                                    for legs in itertools.product(range(a + b), repeat=n):
                                        t = _build(L1, L2, dec1, dec2, gs, match, legs)
                                        k = canonical_key(t)
                                        if k not in keys:
                                            keys.add(k)
                                            out.append(triple_from_key(k, L1, L2))
    return out


def _build(L1, L2, dec1, dec2, gs, match, legs) -> AdmissibleTriple:
    a = len(dec1)
    I = tuple(i + 1 for i, v in enumerate(legs) if v < a)
    g1 = AdmissibleGraph(L1, tuple(zip(gs[:a], dec1)), tuple(v for v in legs if v < a),
                         tuple((v1, m) for v1, _, m in match))
    g2 = AdmissibleGraph(L2, tuple(zip(gs[a:], dec2)), tuple(v - a for v in legs if v >= a),
                         tuple((v2, m) for _, v2, m in match))
    return AdmissibleTriple(g1, g2, I)


def _finish(triples: Iterable[AdmissibleTriple]) -> list[AdmissibleTriple]:
    uniq = {}
    for t in triples:
        uniq.setdefault(canonical_key(t), t)
    return [uniq[k] for k in sorted(uniq)]


def blowup_class_pairs(beta: Vector, geom: DegenerationGeometry) -> list[tuple[str, Vector | None, Vector | None]]:
    """The (block, b(Gamma_1), b(Gamma_2)) totals of the blow-up Omega set."""
    W = geom.W
    beta = W._coords(beta)
    out = []
    if W.is_effective(beta):
        # two-sided: beta = beta1 + beta2 with beta2 a Y2 image
        seen = set()
        for beta2 in _y2_images_below(beta, geom):
            if beta2 in seen:
                continue
            seen.add(beta2)
            beta1 = vsub(beta, beta2)
            if not any(beta1) or not W.is_effective(beta1):
                continue
            lo1 = geom.lift1(beta1)
            lo2 = geom.lift2(beta2)
            e = geom.e1(lo1)
            if lo2 is None or e < 1 or geom.e2(lo2) != 0:
                continue
            for l2 in range(1, e + 1):
                b1 = vadd(lo1, vscale(e - l2, geom.fibers1[0]))
                b2 = vadd(lo2, vscale(l2, geom.fibers2[0]))
                out.append(("two-sided", b1, b2))
        lo = geom.lift1(beta)
        e = geom.e1(lo)
        if e >= 0:
            out.append(("first-only", vadd(lo, vscale(e, geom.fibers1[0])), None))
        lo2 = geom.lift2(beta)
        if lo2 is not None:
            out.append(("second-only", None, lo2))
    return out


def _y2_images_below(beta: Vector, geom: DegenerationGeometry) -> list[Vector]:
    """Effective W-classes beta2 <= beta lying in p2(effective Y2 classes)."""
    W = geom.W
    out = []
    for c in W.effective_classes(W.degree(beta)):
        if geom.lift2(c) is not None and W.is_effective(vsub(beta, c)):
            out.append(c)
    return out


def enumerate_blowup_triples(g: int, n: int, beta, geom: DegenerationGeometry, *,
                             max_vertices=None, max_genus=None,
                             max_weight=None) -> list[AdmissibleTriple]:
    """Representatives of the blow-up Omega set modulo root reordering."""
    if geom.kind != "blowup":
        raise ValueError("geometry is not a blow-up degeneration")
    caps = _caps(max_vertices, max_genus, max_weight)
    found = []
    for block, b1, b2 in blowup_class_pairs(beta, geom):
        if block == "two-sided":
            found += _two_sided(geom, b1, b2, g, n, caps)
        elif block == "first-only":
            found += _one_sided(geom.Y1, geom.Y2, b1, g, n, 1, caps, geom.e1)
        else:
            found += _one_sided(geom.Y2, geom.Y1, b2, g, n, 2, caps, geom.e2)
    return _finish(found)


def conifold_class_pairs(beta: Vector, geom: DegenerationGeometry) -> list[tuple[str, Vector, Vector]]:
    W = geom.W
    beta = W._coords(beta)
    if not W.is_effective(beta):
        return []
    lo = geom.lift1(beta)
    e = geom.e1(lo)
    f1, f2 = geom.fibers1
    out = []
    for l2 in range(0, e + 1):
        for l11 in range(0, e - l2 + 1):
            l12 = e - l2 - l11
            b1 = vadd(vadd(lo, vscale(l11, f1)), vscale(l12, f2))
            out.append(((l11, l12, l2), b1, vscale(l2, geom.fibers2[0])))
    return out


def enumerate_conifold_triples(g: int, n: int, beta, geom: DegenerationGeometry, *,
                               max_vertices=None, max_genus=None,
                               max_weight=None) -> list[AdmissibleTriple]:
    """Representatives of the conifold Omega set modulo root reordering."""
    if geom.kind != "conifold":
        raise ValueError("geometry is not a conifold degeneration")
    caps = _caps(max_vertices, max_genus, max_weight)
    found = []
    for _, b1, b2 in conifold_class_pairs(beta, geom):
        if any(b2):
            found += _two_sided(geom, b1, b2, g, n, caps)
        else:
            found += _one_sided(geom.Y1, geom.Y2, b1, g, n, 1, caps, geom.e1)
            if not any(b1):
                found += _one_sided(geom.Y2, geom.Y1, b2, g, n, 2, caps, geom.e2)
    return _finish(found)


def enumerate_triples(g, n, beta, geom, **caps) -> list[AdmissibleTriple]:
    if geom.kind == "blowup":
        return enumerate_blowup_triples(g, n, beta, geom, **caps)
    return enumerate_conifold_triples(g, n, beta, geom, **caps)


def check_triple(eta: AdmissibleTriple, g: int, n: int, beta, geom: DegenerationGeometry) -> list[str]:
    """Post-hoc conditions every enumerated triple must satisfy; returns violations."""
    bad = []
    b1, b2 = eta.first.total_class(), eta.second.total_class()
    pushed = vadd(geom.p1.apply_coords(b1), geom.p2.apply_coords(b2))
    if pushed != geom.W._coords(beta):
        bad.append("pushforward of b(Gamma_1)+b(Gamma_2) differs from beta")
    if geom.e1(b1) != geom.e2(b2):
        bad.append("divisor pairings of the two sides differ")
    if sum(eta.first.weights()) != geom.e1(b1):
        bad.append("root weights do not sum to the divisor pairing")
    if genus(eta) != g or eta.n != n:
        bad.append("genus or number of legs is wrong")
    return bad


# -- cohomology of the divisor and relative tables -------------------------


class CohomologyBasis:
    """Basis labels of H*(D) with their (symmetric, non-degenerate) pairing."""

    def __init__(self, labels: Sequence[str], matrix: Sequence[Sequence]):
        import sympy

        self.labels = tuple(labels)
        self.matrix = tuple(tuple(Fraction(x) for x in row) for row in matrix)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("basis labels must be distinct")
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            raise ValueError("pairing matrix must be square of the basis size")
        if any(self.matrix[i][j] != self.matrix[j][i] for i in range(n) for j in range(n)):
            raise ValueError("pairing matrix must be symmetric")
        if sympy.Matrix(self.matrix).rank() != n:
            raise ValueError("pairing matrix is degenerate")
        self.index = {lab: i for i, lab in enumerate(self.labels)}

    def pairing(self, a: str, b: str) -> Fraction:
        try:
            return self.matrix[self.index[a]][self.index[b]]
        except KeyError as exc:
            raise ValueError(f"unknown basis label {exc.args[0]!r}") from None

    @classmethod
    def p1xp1(cls) -> CohomologyBasis:
        """1, the two rulings, and the point."""
        return cls(("1", "h1", "h2", "pt"),
                   [[0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0], [1, 0, 0, 0]])


def _fmt_vec(v: Vector) -> str:
    return ",".join(str(x) for x in v)


def graph_key(gr: AdmissibleGraph) -> tuple[str, tuple[int, ...]]:
    """Text key of a graph and the root order it induces.

    Returns (key, perm) where the canonical j-th root is ``gr.roots[perm[j]]``.
    """
    if gr.is_empty():
        return "empty", ()
    nv = len(gr.vertices)
    legs = [[] for _ in range(nv)]
    for i, v in enumerate(gr.legs):
        legs[v].append(i + 1)
    rws = [sorted(m for w, m in gr.roots if w == v) for v in range(nv)]
    data = [(gr.vertices[v][0], gr.vertices[v][1], tuple(legs[v]), tuple(rws[v]))
            for v in range(nv)]
    order = sorted(range(nv), key=lambda v: data[v])
    newpos = {old: new for new, old in enumerate(order)}
    perm = tuple(sorted(range(gr.n_roots),
                        key=lambda j: (newpos[gr.roots[j][0]], gr.roots[j][1], j)))
    parts = []
    for v in order:
        g, b, lg, ws = data[v]
        parts.append(f"{g}|{_fmt_vec(b)}|{_fmt_vec(lg) or '-'}|{_fmt_vec(ws) or '-'}")
    return ";".join(parts), perm


def parse_graph_key(lattice: CurveClassLattice, key: str) -> AdmissibleGraph:
    if key == "empty":
        return AdmissibleGraph(lattice)
    verts, legs, roots = [], {}, []
    for v, chunk in enumerate(key.split(";")):
        fields = chunk.split("|")
        if len(fields) != 4:
            raise ValueError(f"malformed vertex {chunk!r} in graph key")
        g, b, lg, ws = fields
        verts.append((int(g), tuple(int(x) for x in b.split(","))))
        if lg != "-":
            for lab in lg.split(","):
                legs[int(lab)] = v
        if ws != "-":
            roots.extend((v, int(m)) for m in ws.split(","))
    if sorted(legs) != list(range(1, len(legs) + 1)):
        raise ValueError(f"legs of {key!r} are not numbered 1..n")
    return AdmissibleGraph(lattice, tuple(verts), tuple(legs[i] for i in sorted(legs)),
                           tuple(roots))


class RelativeGWTable:
    """Relative invariants keyed by (graph key, root basis labels)."""

    def __init__(self, lattice: CurveClassLattice,
                 entries: Mapping[tuple[str, tuple[str, ...]], object] | None = None):
        self.lattice = lattice
        self.entries: dict[tuple[str, tuple[str, ...]], Fraction] = {}
        self._by_graph: dict[str, dict[tuple[str, ...], Fraction]] = {}
        for (key, labels), v in (entries or {}).items():
            self.set(key, labels, v)

    def set(self, key, labels: Sequence[str], value) -> None:
        if isinstance(key, AdmissibleGraph):
            gk, perm = graph_key(key)
            labels = tuple(labels[p] for p in perm)
            key = gk
        gr = parse_graph_key(self.lattice, key)
        labels = tuple(labels)
        if len(labels) != gr.n_roots:
            raise ValueError(f"entry for {key!r} needs {gr.n_roots} labels, got {len(labels)}")
        value = Fraction(value)
        self.entries[(key, labels)] = value
        self._by_graph.setdefault(key, {})[labels] = value

    def values_for(self, gr: AdmissibleGraph) -> dict[tuple[str, ...], Fraction] | None:
        """Entries of ``gr`` with labels in the graph's own root order."""
        gk, perm = graph_key(gr)
        stored = self._by_graph.get(gk)
        if stored is None:
            return None
        out = {}
        for canon, v in stored.items():
            labels = [None] * len(perm)
            for j, p in enumerate(perm):
                labels[p] = canon[j]
            out[tuple(labels)] = v
        return out

    def __eq__(self, other):
        return (isinstance(other, RelativeGWTable) and self.lattice == other.lattice
                and self.entries == other.entries)

    def __len__(self):
        return len(self.entries)


def evaluate_degeneration(triples: Iterable[AdmissibleTriple], table1: RelativeGWTable,
                          table2: RelativeGWTable,
                          basis: CohomologyBasis) -> tuple[Fraction, list[str]]:
    """Sum of m(eta)/|Eq(eta)| [Psi_1 . Psi_2]_0 over the given triples.

    Returns the value and the keys of graphs missing from the tables (their
    contribution is taken to be 0). An empty graph contributes the factor 1.
    """
    total = Fraction(0)
    missing: list[str] = []
    for eta in triples:
        sides = []
        for gr, tab in ((eta.first, table1), (eta.second, table2)):
            if gr.is_empty():
                sides.append({(): Fraction(1)})
                continue
            if tab.lattice != gr.lattice:
                raise ValueError("table lattice does not match graph lattice")
            vals = tab.values_for(gr)
            if vals is None:
                missing.append(graph_key(gr)[0])
                vals = {}
            sides.append(vals)
        pairing_sum = Fraction(0)
        for a, va in sides[0].items():
            for b, vb in sides[1].items():
                if len(a) != eta.r or len(b) != eta.r:
                    raise ValueError("table entry arity does not match the number of roots")
                prod = va * vb
                for x, y in zip(a, b):
                    if not prod:
                        break
                    prod *= basis.pairing(x, y)
                pairing_sum += prod
        if pairing_sum:
            total += Fraction(root_multiplicity(eta), eq_count(eta)) * pairing_sum
    return total, sorted(set(missing))


# -- virtual dimension bookkeeping -----------------------------------------


@dataclass(frozen=True)
class AdditivityReport:
    lhs: int
    rhs: int
    simplified_lhs: int
    simplified_rhs: int

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    @property
    def simplified_holds(self) -> bool:
        return (self.simplified_lhs == self.simplified_rhs
                and self.simplified_lhs == self.lhs and self.simplified_rhs == self.rhs)


def vdim_additivity_check(eta: AdmissibleTriple, geom: DegenerationGeometry) -> AdditivityReport:
    """Both sides of the virtual-dimension additivity relation for eta.

    The simplified pair is the specialisation using K(Y1) = p1^*K(W) + E
    (blow-up) or the raw K(Y1) bracket (conifold), and K(Y2) = -3E.
    """
    dimW, dim1, dim2, dimD = geom.dims
    E = geom.divisor
    b1, b2 = eta.first.total_class(), eta.second.total_class()
    beta = vadd(geom.p1.apply_coords(b1), geom.p2.apply_coords(b2))
    g, n, r = genus(eta), eta.n, eta.r
    n1, n2 = eta.first.n_legs, eta.second.n_legs
    g1, g2 = eta.first.genus_sum(), eta.second.genus_sum()
    KW = geom.W.functional("K")
    K1, K2 = geom.Y1.functional("K"), geom.Y2.functional("K")
    e1, e2 = geom.Y1.pair(E, b1), geom.Y2.pair(E, b2)
    lhs = (1 - g) * (dimW - 3) - dot(beta, KW) + n
    rhs = ((1 - g1) * (dim1 - 3) - dot(b1, K1) + n1 + (r - e1)
           + (1 - g2) * (dim2 - 3) - dot(b2, K2) + n2 + (r - e2)
           - r * dimD)
    s_lhs = -dot(beta, KW) + n
    if geom.kind == "blowup":
        first = -dot(geom.p1.apply_coords(b1), KW) + n1 + r - 2 * e1
    else:
        first = -dot(b1, K1) + n1 + r - e1
    s_rhs = first + (2 * e2 + n2 + r) - 2 * r
    return AdditivityReport(lhs, rhs, s_lhs, s_rhs)


def simplified_form_applies(geom: DegenerationGeometry) -> bool:
    """Whether the canonical classes satisfy the relations behind the simplified form."""
    E = geom.divisor
    K1, K2 = geom.Y1.functional("K"), geom.Y2.functional("K")
    D2 = geom.Y2.functional(E)
    if K2 != tuple(-3 * x for x in D2):
        return False
    if geom.kind == "blowup":
        KW = geom.W.functional("K")
        pulled = tuple(dot(KW, col) for col in zip(*geom.p1.matrix))
        return K1 == tuple(a + b for a, b in zip(pulled, geom.Y1.functional(E)))
    return True
