"""Graded quotient rings given by monomial rewrite rules.

Only finite-dimensional presentations are supported: every monomial above
``top_degree`` is zero, and the rules must terminate and be confluent on the
finitely many monomials of degree <= top_degree. Both properties are checked
when a presentation is built.

    >>> A = RingPresentation.parse("v:1 w:1", ["v^2 = 0", "w^3 = 2*v*w^2"], 3,
    ...                            {"v*w^2": 1})
    >>> str(A.element("w^3"))
    '2 * v*w^2'
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Monomial = tuple[int, ...]
Poly = dict  # Monomial -> Fraction


class RingError(ValueError):
    pass


def _fmt_rational(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _padd(acc: dict, mono: Monomial, c) -> None:
    v = acc.get(mono, 0) + c
    if v:
        acc[mono] = v
    else:
        acc.pop(mono, None)


class RingPresentation:
    """Generators with degrees, rewrite rules lhs -> rhs, and a top degree.

    ``integrals`` declares the degree (integral) of top-degree monomials,
    which is how the point class enters.
    """

    def __init__(
        self,
        names: Sequence[str],
        degrees: Sequence[int],
        rules: Iterable[tuple[Monomial, Mapping[Monomial, Fraction]]],
        top_degree: int,
        integrals: Mapping[Monomial, Fraction] | None = None,
        name: str = "A",
    ):
        self.name = name
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        if len(self.names) != len(self.degrees) or any(d < 1 for d in self.degrees):
            raise RingError("each generator needs a positive degree")
        self.top_degree = int(top_degree)
        self.rules = tuple((tuple(lhs), {tuple(m): Fraction(c) for m, c in rhs.items() if c})
                           for lhs, rhs in rules)
        self.integrals = {tuple(m): Fraction(c) for m, c in (integrals or {}).items()}
        for lhs, rhs in self.rules:
            d = self.mono_degree(lhs)
            for m in rhs:
                if self.mono_degree(m) != d:
                    raise RingError(f"rule {self.format_monomial(lhs)} is not homogeneous")
        for m in self.integrals:
            if self.mono_degree(m) != self.top_degree:
                raise RingError(f"integral declared on non-top monomial {self.format_monomial(m)}")
        self._nf: dict[Monomial, dict] = {}
        self._build_normal_forms()
        for m in self.integrals:
            if self._nf[m] != {m: Fraction(1)}:
                raise RingError(f"integral declared on reducible monomial {self.format_monomial(m)}")

    # -- monomials -------------------------------------------------------

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def monomials(self, degree: int) -> list[Monomial]:
        out = []
        for exps in itertools.product(*(range(degree // d + 1) for d in self.degrees)):
            if self.mono_degree(exps) == degree:
                out.append(exps)
        return sorted(out, reverse=True)

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) or "1"

    def parse_monomial(self, text: str) -> Monomial:
        exps = [0] * len(self.names)
        text = text.strip()
        if text in ("", "1"):
            return tuple(exps)
        for factor in text.split("*"):
            factor = factor.strip()
            base, _, power = factor.partition("^")
            if base not in self.names:
                raise RingError(f"unknown generator {base!r}")
            exps[self.names.index(base)] += int(power) if power else 1
        return tuple(exps)

    def parse_poly(self, text: str) -> dict:
        """Parse e.g. ``"2*v*w^2 - w^3 + 1/2"`` into a coefficient map."""
        src = text.replace(" ", "").replace("+-", "-").replace("-+", "-").replace("--", "+")
        if not src:
            raise RingError("empty polynomial")
        if src[0] not in "+-":
            src = "+" + src
        out: dict = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", src):
            factors = body.split("*")
            coef = Fraction(1)
            mono_parts = []
            for f in factors:
                if re.fullmatch(r"\d+(/\d+)?", f):
                    coef *= Fraction(f)
                else:
                    mono_parts.append(f)
            m = self.parse_monomial("*".join(mono_parts))
            _padd(out, m, coef if sign == "+" else -coef)
        if not re.fullmatch(r"([+-][^+-]+)+", src):
            raise RingError(f"cannot parse polynomial {text!r}")
        return out

    # -- rewriting -------------------------------------------------------

    def _rewrite_once(self, m: Monomial):
        """All one-step rewrites of m, one polynomial per applicable rule."""
        for lhs, rhs in self.rules:
            if all(a >= b for a, b in zip(m, lhs)):
                q = tuple(a - b for a, b in zip(m, lhs))
                yield {tuple(x + y for x, y in zip(q, r)): c for r, c in rhs.items()}

    def _build_normal_forms(self) -> None:
        # DFS over the finite monomial graph; a back edge means non-termination
        state: dict[Monomial, int] = {}

        def visit(m: Monomial):
            if state.get(m) == 2:
                return
            if state.get(m) == 1:
                raise RingError(f"rewriting does not terminate at {self.format_monomial(m)}")
            state[m] = 1
            results = []
            for step in self._rewrite_once(m):
                acc: dict = {}
                for m2, c in step.items():
                    visit(m2)
                    for m3, c3 in self._nf[m2].items():
                        _padd(acc, m3, c * c3)
                results.append(acc)
            if not results:
                self._nf[m] = {m: Fraction(1)}
            else:
                first = results[0]
                for other in results[1:]:
                    if other != first:
                        raise RingError(
                            f"rewriting is not confluent at {self.format_monomial(m)}")
                self._nf[m] = first
            state[m] = 2

        for d in range(self.top_degree + 1):
            for m in self.monomials(d):
                visit(m)

    def normal_form_monomial(self, m: Monomial) -> dict:
        if self.mono_degree(m) > self.top_degree:
            return {}
        return self._nf[m]

    def normal_basis(self, degree: int | None = None) -> list[Monomial]:
        degs = range(self.top_degree + 1) if degree is None else [degree]
        out = []
        for d in degs:
            out.extend(m for m in self.monomials(d) if self._nf[m] == {m: Fraction(1)})
        return out

    def normal_form(self, poly) -> RingElement:
        if isinstance(poly, str):
            poly = self.parse_poly(poly)
        acc: dict = {}
        for m, c in poly.items():
            for m2, c2 in self.normal_form_monomial(tuple(m)).items():
                _padd(acc, m2, Fraction(c) * c2)
        return RingElement(self, acc)

    element = normal_form

    def one(self) -> RingElement:
        return RingElement(self, {(0,) * len(self.names): Fraction(1)})

    def gen(self, name: str) -> RingElement:
        i = self.names.index(name)
        return RingElement(self, {tuple(int(j == i) for j in range(len(self.names))): Fraction(1)})

    def point(self) -> RingElement:
        """The point class: the first declared top monomial scaled to integral 1."""
        if not self.integrals:
            raise RingError(f"ring {self.name!r} declares no point-class integral")
        m, c = sorted(self.integrals.items())[0]
        return RingElement(self, {m: 1 / c})

    def integrate(self, x: RingElement) -> Fraction:
        total = Fraction(0)
        for m, c in x.terms.items():
            if self.mono_degree(m) != self.top_degree:
                continue
            if m not in self.integrals:
                raise RingError(
                    f"no point-class declaration for {self.format_monomial(m)} in {self.name!r}")
            total += c * self.integrals[m]
        return total

    @classmethod
    def parse(cls, gens: str, rules: Sequence[str], top_degree: int,
              integrals: Mapping[str, object] | None = None, name: str = "A") -> RingPresentation:
        """Build from text: ``gens`` like ``"v:1 w:1"``, rules like ``"w^3 = 2*v*w^2"``."""
        names, degrees = [], []
        for tok in gens.split():
            n, _, d = tok.partition(":")
            names.append(n)
            degrees.append(int(d) if d else 1)
        shell = cls.__new__(cls)
        shell.names = tuple(names)
        shell.degrees = tuple(degrees)
        parsed = []
        for r in rules:
            lhs, _, rhs = r.partition("=")
            lhs_poly = cls.parse_poly(shell, lhs)
            if len(lhs_poly) != 1 or next(iter(lhs_poly.values())) != 1:
                raise RingError(f"rule left-hand side must be a single monomial: {r!r}")
            parsed.append((next(iter(lhs_poly)), cls.parse_poly(shell, rhs)))
        ints = {cls.parse_monomial(shell, k): Fraction(v) for k, v in (integrals or {}).items()}
        return cls(names, degrees, parsed, top_degree, ints, name)

    def _key(self):
        return (self.name, self.names, self.degrees,
                tuple((lhs, tuple(sorted(rhs.items()))) for lhs, rhs in self.rules),
                self.top_degree, tuple(sorted(self.integrals.items())))

    def __eq__(self, other):
        if not isinstance(other, RingPresentation):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"RingPresentation({self.name!r}, gens={self.names})"


class RingElement:
    """Normal-form element: monomial -> nonzero exact rational."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: RingPresentation, terms: Mapping[Monomial, Fraction]):
        self.ring = ring
        self.terms = {m: Fraction(c) for m, c in terms.items() if c}

    def _check(self, other: RingElement) -> None:
        if other.ring != self.ring:
            raise RingError("elements of different rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.one() * other
        self._check(other)
        acc = dict(self.terms)
        for m, c in other.terms.items():
            _padd(acc, m, c)
        return RingElement(self.ring, acc)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RingElement(self.ring, {m: c * other for m, c in self.terms.items()})
        self._check(other)
        acc: dict = {}
        for (m1, c1), (m2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            m = tuple(a + b for a, b in zip(m1, m2))
            for m3, c3 in self.ring.normal_form_monomial(m).items():
                _padd(acc, m3, c1 * c2 * c3)
        return RingElement(self.ring, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.one() * other
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self.terms.items()))))

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        order = sorted(self.terms, key=lambda m: (self.ring.mono_degree(m), tuple(-e for e in m)))
        return " + ".join(f"{_fmt_rational(self.terms[m])} * {self.ring.format_monomial(m)}"
                          for m in order)

    __repr__ = __str__


def normal_form(ring: RingPresentation, poly) -> RingElement:
    return ring.normal_form(poly)


def multiply(a: RingElement, b: RingElement) -> RingElement:
    return a * b


def add(a: RingElement, b: RingElement) -> RingElement:
    return a + b


def triple_degree0(a: RingElement, b: RingElement, c: RingElement) -> Fraction:
    """Degree of the zero-dimensional part of a*b*c."""
    if not (a.ring == b.ring == c.ring):
        raise RingError("elements of different rings")
    return a.ring.integrate(a * b * c)


def parse_element(ring: RingPresentation, text: str) -> RingElement:
    """Inverse of ``str(RingElement)`` (also accepts any polynomial syntax)."""
    text = text.strip()
    if text == "0":
        return RingElement(ring, {})
    return ring.normal_form(text.replace(" * ", "*"))
