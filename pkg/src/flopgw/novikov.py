"""Closed-form elements of the completed group ring Q{{H_2}}.

An element is a Laurent polynomial plus finitely many geometric tails
``c * q^b / (1 - q^g)``. Tails are stored structurally; ``series_equal``
decides equality of the underlying rational functions.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping

from .lattice import (CurveClass, CurveClassLattice, LatticeMap, Vector, dot,
                      vadd, vscale, vsub)


class NovikovError(ValueError):
    pass


class DivergentExpansionError(NovikovError):
    pass


def fmt_rational(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _acc(d: dict, key, c) -> None:
    v = d.get(key, 0) + c
    if v:
        d[key] = v
    else:
        d.pop(key, None)


class NovikovElement:
    """Immutable ``poly + sum of tails``; ``tails`` maps (beta, gamma) -> c."""

    __slots__ = ("lattice", "poly", "tails")

    def __init__(self, lattice: CurveClassLattice,
                 poly: Mapping[Vector, Fraction] | None = None,
                 tails: Mapping[tuple[Vector, Vector], Fraction] | None = None):
        self.lattice = lattice
        p: dict = {}
        for b, c in (poly or {}).items():
            _acc(p, lattice._coords(b), Fraction(c))
        t: dict = {}
        for (b, g), c in (tails or {}).items():
            g = lattice._coords(g)
            if not any(g):
                raise NovikovError("tail with zero denominator class")
            _acc(t, (lattice._coords(b), g), Fraction(c))
        self.poly = dict(sorted(p.items()))
        self.tails = dict(sorted(t.items(), key=lambda kv: (kv[0][1], kv[0][0])))

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, lattice):
        return cls(lattice)

    @classmethod
    def constant(cls, lattice, c):
        return cls(lattice, {(0,) * lattice.rank: c})

    @classmethod
    def monomial(cls, lattice, beta, c=1):
        return cls(lattice, {lattice._coords(beta): c})

    @classmethod
    def tail(cls, lattice, beta, gamma, c=1):
        """``c * q^beta / (1 - q^gamma)``."""
        return cls(lattice, tails={(lattice._coords(beta), lattice._coords(gamma)): c})

    # -- arithmetic ------------------------------------------------------

    def _check(self, other: NovikovElement) -> None:
        if not isinstance(other, NovikovElement):
            raise TypeError("expected a NovikovElement")
        if other.lattice != self.lattice:
            raise NovikovError(f"lattice mismatch: {self.lattice.name!r} vs {other.lattice.name!r}")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = NovikovElement.constant(self.lattice, other)
        self._check(other)
        p = dict(self.poly)
        for b, c in other.poly.items():
            _acc(p, b, c)
        t = dict(self.tails)
        for k, c in other.tails.items():
            _acc(t, k, c)
        return NovikovElement(self.lattice, p, t)

    __radd__ = __add__

    def scale(self, c) -> NovikovElement:
        c = Fraction(c)
        return NovikovElement(self.lattice, {b: c * v for b, v in self.poly.items()},
                              {k: c * v for k, v in self.tails.items()})

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        if self.tails and other.tails:
            raise NovikovError("product of two elements with tails is not supported; "
                               "use truncated_product")
        a, b = (self, other) if not self.tails else (other, self)
        p: dict = {}
        t: dict = {}
        for x, cx in a.poly.items():
            for y, cy in b.poly.items():
                _acc(p, vadd(x, y), cx * cy)
            for (y, g), cy in b.tails.items():
                _acc(t, (vadd(x, y), g), cx * cy)
        return NovikovElement(self.lattice, p, t)

    __rmul__ = __mul__

    # -- structure -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, NovikovElement):
            return NotImplemented
        return (self.lattice == other.lattice and self.poly == other.poly
                and self.tails == other.tails)

    def __hash__(self):
        return hash((self.lattice, tuple(self.poly.items()), tuple(self.tails.items())))

    def __bool__(self):
        return bool(self.poly or self.tails)

    def constant_term(self) -> Fraction:
        return self.poly.get((0,) * self.lattice.rank, Fraction(0))

    def is_effective_supported(self) -> bool:
        eff = self.lattice.is_effective
        return (all(eff(b) for b in self.poly)
                and all(eff(b) and eff(g) for b, g in self.tails))

    def __str__(self):
        return serialize(self)

    def __repr__(self):
        return f"NovikovElement({self.lattice.name}: {serialize(self)})"


# -- operations ----------------------------------------------------------


def add(f: NovikovElement, g: NovikovElement) -> NovikovElement:
    return f + g


def scalar_mul(c, f: NovikovElement) -> NovikovElement:
    return f.scale(c)


def _check_ample(lattice: CurveClassLattice, ample: Vector) -> Vector:
    ample = tuple(int(x) for x in ample)
    if len(ample) != lattice.rank:
        raise NovikovError("ample functional has wrong length")
    for g in lattice.effective_generators:
        if dot(ample, g) <= 0:
            raise NovikovError(f"functional {ample} is not positive on effective generator {g}")
    return ample


def truncate(f: NovikovElement, ample: Vector | None = None,
             cutoff: int = 10) -> dict[Vector, Fraction]:
    """Expand tails geometrically and keep classes of ample degree <= cutoff."""
    lat = f.lattice
    ample = lat.positive_functional if ample is None else _check_ample(lat, ample)
    out: dict = {}
    for b, c in f.poly.items():
        if dot(ample, b) <= cutoff:
            _acc(out, b, c)
    for (b, g), c in f.tails.items():
        step = dot(ample, g)
        if step <= 0:
            raise DivergentExpansionError(
                f"tail denominator {g} has non-positive degree {step}; expansion diverges")
        x = b
        while dot(ample, x) <= cutoff:
            _acc(out, x, c)
            x = vadd(x, g)
    return dict(sorted(out.items(), key=lambda kv: (dot(ample, kv[0]), kv[0])))


def truncated_product(f: NovikovElement, g: NovikovElement, ample: Vector | None = None,
                      cutoff: int = 10) -> dict[Vector, Fraction]:
    """Product of two effective-supported elements, to ample degree ``cutoff``."""
    f._check(g)
    ample = f.lattice.positive_functional if ample is None else ample
    a, b = truncate(f, ample, cutoff), truncate(g, ample, cutoff)
    out: dict = {}
    for x, cx in a.items():
        for y, cy in b.items():
            z = vadd(x, y)
            if dot(ample, z) <= cutoff:
                _acc(out, z, cx * cy)
    return dict(sorted(out.items(), key=lambda kv: (dot(ample, kv[0]), kv[0])))


def analytic_continue(f: NovikovElement) -> NovikovElement:
    """Rewrite every tail with anti-effective denominator.

    ``c q^b / (1 - q^{-d}) = -c q^{b+d} / (1 - q^d)``; a resulting numerator
    q^0 is split off as ``-c - c q^d/(1 - q^d)``.
    """
    lat = f.lattice
    p = dict(f.poly)
    t: dict = {}
    for (b, g), c in f.tails.items():
        if lat.is_effective(g):
            _acc(t, (b, g), c)
            continue
        d = vscale(-1, g)
        if not lat.is_effective(d):
            raise NovikovError(
                f"tail denominator {g} is neither effective nor anti-effective")
        nb = vadd(b, d)
        if any(nb):
            _acc(t, (nb, d), -c)
        else:
            _acc(p, nb, -c)
            _acc(t, (d, d), -c)
    return NovikovElement(lat, p, t)


def _primitive(g: Vector) -> tuple[Vector, int]:
    k = math.gcd(*g)
    return tuple(x // k for x in g), k


def _leading_index(v: Vector) -> int:
    return next(i for i, x in enumerate(v) if x)


def series_equal(f: NovikovElement, g: NovikovElement) -> bool:
    """Exact equality of the rational functions represented by f and g."""
    f._check(g)
    diff = f - g
    poly = dict(diff.poly)
    groups: dict = defaultdict(list)
    for (b, gam), c in diff.tails.items():
        p, k = _primitive(gam)
        if p[_leading_index(p)] < 0:
            # c q^b/(1 - q^{-kp'}) = -c q^{b+kp'}/(1 - q^{kp'})
            p = vscale(-1, p)
            b = vsub(b, gam)
            c = -c
        groups[p].append((b, k, c))
    for p, items in groups.items():
        big = 1
        for _, k, _ in items:
            big = big * k // math.gcd(big, k)
        period = vscale(big, p)
        # numerator over the common denominator 1 - q^period
        num: dict = {}
        for b, k, c in items:
            for j in range(big // k):
                _acc(num, vadd(b, vscale(j * k, p)), c)
        i0 = _leading_index(period)
        cosets: dict = defaultdict(list)
        for b, c in num.items():
            t = b[i0] // period[i0]
            cosets[vsub(b, vscale(t, period))].append((t, c))
        for rep, entries in cosets.items():
            if sum(c for _, c in entries) != 0:
                return False
            entries.sort()
            running = Fraction(0)
            coeff = dict(entries)
            lo, hi = entries[0][0], entries[-1][0]
            for t in range(lo, hi + 1):
                running += coeff.get(t, 0)
                if running:
                    _acc(poly, vadd(rep, vscale(t, period)), running)
    return not poly


def isomorphic(f: NovikovElement, g: NovikovElement) -> bool:
    """Equal after analytic continuation of both sides."""
    return series_equal(analytic_continue(f), analytic_continue(g))


def substitute(f: NovikovElement, m: LatticeMap) -> NovikovElement:
    """Change of variables q^b -> q^{m(b)}."""
    if m.source != f.lattice:
        raise NovikovError(f"map {m.name!r} does not start at {f.lattice.name!r}")
    p: dict = {}
    for b, c in f.poly.items():
        _acc(p, m.apply_coords(b), c)
    t: dict = {}
    for (b, g), c in f.tails.items():
        mg = m.apply_coords(g)
        if not any(mg):
            raise NovikovError(f"tail denominator {g} maps to zero under {m.name!r}")
        _acc(t, (m.apply_coords(b), mg), c)
    return NovikovElement(m.target, p, t)


# -- text form -----------------------------------------------------------


def _fmt_q(v: Vector) -> str:
    return "q^[" + ",".join(str(x) for x in v) + "]"


def serialize(f: NovikovElement) -> str:
    h = f.lattice.positive_functional
    terms = []
    for b in sorted(f.poly, key=lambda v: (dot(h, v), v)):
        terms.append(f"{fmt_rational(f.poly[b])} * {_fmt_q(b)}")
    for b, g in sorted(f.tails, key=lambda k: (dot(h, k[0]), k[0], dot(h, k[1]), k[1])):
        terms.append(f"{fmt_rational(f.tails[(b, g)])} * {_fmt_q(b)} / (1 - {_fmt_q(g)})")
    return " + ".join(terms) if terms else "0"


_TERM = re.compile(
    r"\s*(-?\d+(?:/\d+)?)\s*\*\s*q\^\[([-\d,\s]*)\]"
    r"(?:\s*/\s*\(\s*1\s*-\s*q\^\[([-\d,\s]*)\]\s*\))?\s*")


def _vec(text: str) -> Vector:
    return tuple(int(x) for x in text.split(",")) if text.strip() else ()


def parse(lattice: CurveClassLattice, text: str) -> NovikovElement:
    """Inverse of ``serialize``."""
    text = text.strip()
    if text == "0":
        return NovikovElement(lattice)
    p: dict = {}
    t: dict = {}
    for chunk in text.split(" + "):
        m = _TERM.fullmatch(chunk)
        if not m:
            raise NovikovError(f"cannot parse series term {chunk!r}")
        c = Fraction(m.group(1))
        b = lattice._coords(_vec(m.group(2)))
        if m.group(3) is None:
            _acc(p, b, c)
        else:
            _acc(t, (b, lattice._coords(_vec(m.group(3)))), c)
    return NovikovElement(lattice, p, t)


def from_terms(lattice: CurveClassLattice, terms: Iterable[tuple[CurveClass, object]]) -> NovikovElement:
    p: dict = {}
    for b, c in terms:
        _acc(p, lattice._coords(b), Fraction(c))
    return NovikovElement(lattice, p)
