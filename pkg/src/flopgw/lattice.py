"""Curve-class lattices: free Z-modules with an effective cone and pairings.

Classes are integer coordinate vectors. Divisors (and the canonical class)
only enter through their pairing functionals, so a lattice stores those
functionals and nothing geometric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

Vector = tuple[int, ...]

DEFAULT_BOUND = 64


class LatticeError(ValueError):
    """Malformed lattice data or an operation across mismatched lattices."""


class UndecidedError(RuntimeError):
    """A bounded search hit its bound before reaching a decision."""


class LiftError(ValueError):
    """A class has no (minimal) lift along the given map."""


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c: int, v: Vector) -> Vector:
    return tuple(c * a for a in v)


@lru_cache(maxsize=None)
def _positive_functional(gens: tuple[Vector, ...], rank: int) -> Vector:
    """Integer functional taking value >= 1 on every generator.

    Exists iff the cone spanned by ``gens`` is strictly convex.
    """
    if not gens:
        return (0,) * rank
    a_ub = -np.array(gens, dtype=float)
    b_ub = -np.ones(len(gens))
    res = linprog(np.zeros(rank), A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * rank, method="highs")
    if res.status != 0:
        raise LatticeError("effective cone is not strictly convex")
    # round a rational approximation and verify exactly
    for denom in (1, 2, 3, 4, 6, 8, 12, 16, 24, 60, 120, 720):
        approx = [Fraction(x).limit_denominator(denom) for x in res.x]
        for scale in (1, 2, 4):
            cand = [x * scale for x in approx]
            lcm = 1
            for x in cand:
                lcm = lcm * x.denominator // gcd(lcm, x.denominator)
            h = tuple(int(x * lcm) for x in cand)
            if all(dot(h, g) >= 1 for g in gens):
                return h
    raise LatticeError("could not find an integral positive functional on the effective cone")


class CurveClassLattice:
    """H_2 modulo torsion, with semigroup generators of the effective cone.

    ``divisors`` maps a label to its pairing functional; ``canonical`` is the
    pairing with K (optional).
    """

    def __init__(
        self,
        name: str,
        generator_names: Sequence[str],
        effective_generators: Iterable[Sequence[int]] = (),
        divisors: dict[str, Sequence[int]] | None = None,
        canonical: Sequence[int] | None = None,
    ):
        self.name = name
        self.generator_names = tuple(generator_names)
        self.rank = len(self.generator_names)
        if self.rank < 1:
            raise LatticeError(f"lattice {name!r}: rank must be positive")
        self.effective_generators = tuple(tuple(int(x) for x in g) for g in effective_generators)
        self.divisors = {k: tuple(int(x) for x in v) for k, v in (divisors or {}).items()}
        self.canonical = None if canonical is None else tuple(int(x) for x in canonical)

        for g in self.effective_generators:
            if len(g) != self.rank:
                raise LatticeError(f"lattice {name!r}: generator {g} has wrong length")
            if not any(g):
                raise LatticeError(f"lattice {name!r}: zero effective generator")
        for label, f in self.divisors.items():
            if len(f) != self.rank:
                raise LatticeError(f"lattice {name!r}: divisor {label!r} has wrong length")
        if self.canonical is not None and len(self.canonical) != self.rank:
            raise LatticeError(f"lattice {name!r}: canonical functional has wrong length")

        self._key_cache = None
        self.positive_functional = _positive_functional(self.effective_generators, self.rank)
        self._effective_cached = lru_cache(maxsize=None)(self._effective_from)

    def _key(self):
        if self._key_cache is None:
            self._key_cache = (self.name, self.generator_names, self.effective_generators,
                               tuple(sorted(self.divisors.items())), self.canonical)
        return self._key_cache

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, CurveClassLattice):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"CurveClassLattice({self.name!r}, rank={self.rank})"

    # -- classes ---------------------------------------------------------

    def cls(self, *coords: int) -> CurveClass:
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        return CurveClass(self, tuple(int(c) for c in coords))

    def zero(self) -> CurveClass:
        return CurveClass(self, (0,) * self.rank)

    def basis(self, name: str) -> CurveClass:
        i = self.generator_names.index(name)
        return CurveClass(self, tuple(int(j == i) for j in range(self.rank)))

    def _coords(self, c) -> Vector:
        if isinstance(c, CurveClass):
            if c.lattice != self:
                raise LatticeError(f"class lives in {c.lattice.name!r}, not {self.name!r}")
            return c.coords
        v = tuple(int(x) for x in c)
        if len(v) != self.rank:
            raise LatticeError(f"expected {self.rank} coordinates, got {len(v)}")
        return v

    # -- pairings --------------------------------------------------------

    def functional(self, label: str) -> Vector:
        if label in ("K", "canonical"):
            if self.canonical is None:
                raise LatticeError(f"lattice {self.name!r} has no canonical functional")
            return self.canonical
        try:
            return self.divisors[label]
        except KeyError:
            raise LatticeError(f"lattice {self.name!r} has no divisor {label!r}") from None

    def pair(self, label: str, c) -> int:
        return dot(self.functional(label), self._coords(c))

    def degree(self, c) -> int:
        """Degree against the internal strictly positive functional."""
        return dot(self.positive_functional, self._coords(c))

    # -- effectivity -----------------------------------------------------

    def _effective_from(self, v: Vector, start: int) -> bool:
        if not any(v):
            return True
        h = self.positive_functional
        for i in range(start, len(self.effective_generators)):
            g = self.effective_generators[i]
            rest = vsub(v, g)
            if dot(h, rest) >= 0 and self._effective_cached(rest, i):
                return True
        return False

    def is_effective(self, c, bound: int = DEFAULT_BOUND) -> bool:
        """True iff ``c`` is a non-negative integer combination of generators.

        Raises UndecidedError when the class has positive-functional degree
        above ``bound``.
        """
        v = self._coords(c)
        if not any(v):
            return True
        d = dot(self.positive_functional, v)
        if d <= 0:
            return False
        if d > bound:
            raise UndecidedError(
                f"effectivity of {v} in {self.name!r} undecided at bound {bound} (degree {d})")
        return self._effective_cached(v, 0)

    def effective_classes(self, max_degree: int) -> list[Vector]:
        """All effective classes of positive-functional degree <= max_degree."""
        seen = {(0,) * self.rank}
        frontier = [(0,) * self.rank]
        h = self.positive_functional
        while frontier:
            nxt = []
            for v in frontier:
                for g in self.effective_generators:
                    w = vadd(v, g)
                    if dot(h, w) <= max_degree and w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return sorted(seen, key=lambda v: (dot(h, v), v))


@dataclass(frozen=True)
class CurveClass:
    lattice: CurveClassLattice = field(compare=True)
    coords: Vector

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise LatticeError(f"class {self.coords} does not fit lattice {self.lattice.name!r}")

    def _other(self, other) -> Vector:
        if isinstance(other, CurveClass):
            if other.lattice != self.lattice:
                raise LatticeError("classes from different lattices")
            return other.coords
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return CurveClass(self.lattice, vadd(self.coords, o))

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return CurveClass(self.lattice, vsub(self.coords, o))

    def __neg__(self):
        return CurveClass(self.lattice, vscale(-1, self.coords))

    def __mul__(self, k: int):
        return CurveClass(self.lattice, vscale(int(k), self.coords))

    __rmul__ = __mul__

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        return f"{self.lattice.name}{list(self.coords)}"


def pair(lattice: CurveClassLattice, divisor_label: str, c) -> int:
    return lattice.pair(divisor_label, c)


def is_effective(lattice: CurveClassLattice, c, bound: int = DEFAULT_BOUND) -> bool:
    return lattice.is_effective(c, bound)


# -- integer linear algebra ----------------------------------------------


def _column_hermite(matrix: Sequence[Sequence[int]], ncols: int):
    """Column-reduce ``matrix`` to echelon form H = A U with U unimodular.

    Returns (H, U, pivots) where pivots maps row index -> pivot column.
    """
    a = [list(row) for row in matrix]
    m = len(a)
    u = [[int(i == j) for j in range(ncols)] for i in range(ncols)]

    def colop(i, j, x, y, z, w):
        # columns (i, j) <- (x*ci + y*cj, z*ci + w*cj)
        for rows in (a, u):
            for row in rows:
                ci, cj = row[i], row[j]
                row[i], row[j] = x * ci + y * cj, z * ci + w * cj

    pivots = {}
    col = 0
    for r in range(m):
        if col >= ncols:
            break
        for j in range(col + 1, ncols):
            if a[r][j] == 0:
                continue
            p, q = a[r][col], a[r][j]
            # extended gcd: s*p + t*q = g
            g, s, t = _ext_gcd(p, q)
            colop(col, j, s, t, -q // g, p // g)
        if a[r][col] != 0:
            if a[r][col] < 0:
                colop(col, col, -1, 0, -1, 0)
            pivots[r] = col
            col += 1
    return a, u, pivots


def _ext_gcd(a: int, b: int):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def solve_integer(matrix: Sequence[Sequence[int]], rhs: Sequence[int], ncols: int) -> Vector | None:
    """Some integer x with matrix @ x == rhs, or None if there is none."""
    h, u, pivots = _column_hermite(matrix, ncols)
    y = [0] * ncols
    for r, row in enumerate(h):
        s = sum(row[j] * y[j] for j in range(ncols))
        rest = rhs[r] - s
        if r in pivots:
            c = pivots[r]
            if rest % row[c]:
                return None
            y[c] = rest // row[c]
        elif rest:
            return None
    x = tuple(sum(u[i][j] * y[j] for j in range(ncols)) for i in range(ncols))
    return x


def integer_rank(matrix: Sequence[Sequence[int]]) -> int:
    if not matrix or not matrix[0]:
        return 0
    return int(np.linalg.matrix_rank(np.array(matrix, dtype=float)))


# -- maps ----------------------------------------------------------------


class LatticeMap:
    """Integer matrix (target rank x source rank) between two lattices."""

    def __init__(self, name: str, source: CurveClassLattice, target: CurveClassLattice,
                 matrix: Sequence[Sequence[int]]):
        self.name = name
        self.source = source
        self.target = target
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        if len(self.matrix) != target.rank or any(len(row) != source.rank for row in self.matrix):
            raise LatticeError(
                f"map {name!r}: matrix must be {target.rank}x{source.rank}")

    def _key(self):
        return (self.name, self.source, self.target, self.matrix)

    def __eq__(self, other):
        if not isinstance(other, LatticeMap):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"LatticeMap({self.name!r}: {self.source.name} -> {self.target.name})"

    def apply_coords(self, v: Vector) -> Vector:
        return tuple(dot(row, v) for row in self.matrix)

    def __call__(self, c) -> CurveClass:
        return apply_map(self, c)

    def compose(self, first: LatticeMap, name: str | None = None) -> LatticeMap:
        """self after first."""
        if first.target != self.source:
            raise LatticeError(f"cannot compose {self.name} after {first.name}")
        cols = list(zip(*first.matrix))
        mat = [[dot(row, col) for col in cols] for row in self.matrix]
        return LatticeMap(name or f"{self.name}.{first.name}", first.source, self.target, mat)

    def preimage(self, c) -> CurveClass | None:
        v = self.target._coords(c)
        x = solve_integer(self.matrix, v, self.source.rank)
        return None if x is None else CurveClass(self.source, x)

    def kernel_rank(self) -> int:
        return self.source.rank - integer_rank(self.matrix)

    @classmethod
    def identity(cls, lattice: CurveClassLattice, name: str = "id") -> LatticeMap:
        return cls(name, lattice, lattice, [[int(i == j) for j in range(lattice.rank)]
                                            for i in range(lattice.rank)])


def apply_map(m: LatticeMap, c) -> CurveClass:
    v = m.source._coords(c)
    return CurveClass(m.target, m.apply_coords(v))


def minimal_lift(
    p: LatticeMap,
    beta,
    fibers: Sequence,
    bound: int = 24,
) -> CurveClass:
    """The minimal effective lift of ``beta`` along ``p``.

    ``fibers`` are effective classes spanning ker(p). The result x satisfies
    p(x) = beta and every effective lift equals x + sum(t_i * fibers[i]) with
    t_i >= 0. Lifts are searched with fiber coefficients in [-bound, bound].
    """
    src = p.source
    ks = tuple(src._coords(f) for f in fibers)
    return CurveClass(src, _minimal_lift(p, p.target._coords(beta), ks, bound))


@lru_cache(maxsize=4096)
def _minimal_lift(p: LatticeMap, beta: Vector, ks: tuple[Vector, ...], bound: int) -> Vector:
    src = p.source
    for k in ks:
        if any(p.apply_coords(k)):
            raise LiftError(f"fiber class {k} is not contracted by {p.name}")
    if p.kernel_rank() != len(ks) or integer_rank(ks) != len(ks):
        raise LiftError(f"fiber classes must form a basis of ker({p.name})")
    x0 = p.preimage(beta)
    if x0 is None:
        raise LiftError(f"{beta} is not in the image of {p.name}")

    effective = []
    for t in itertools.product(range(-bound, bound + 1), repeat=len(ks)):
        x = x0.coords
        for ti, k in zip(t, ks):
            x = vadd(x, vscale(ti, k))
        d = src.degree(x)
        if d < 0 or d > DEFAULT_BOUND:
            continue
        if src.is_effective(x):
            effective.append(t)
    if not effective:
        raise LiftError(f"{beta} has no effective lift along {p.name} within the search bound")
    tmin = tuple(min(t[i] for t in effective) for i in range(len(ks)))
    if tmin not in set(effective):
        raise LiftError(f"effective lifts of {beta} along {p.name} have no minimum")
    if any(ti == -bound for ti in tmin):
        raise UndecidedError(f"minimal lift of {beta} sits on the search boundary {bound}")
    x = x0.coords
    for ti, k in zip(tmin, ks):
        x = vadd(x, vscale(ti, k))
    return x


def minimal_lift_blowup(p1: LatticeMap, divisor: str, beta, fiber, bound: int = 24) -> CurveClass:
    """Minimal lift along a blow-down whose kernel is spanned by ``fiber``.

    ``fiber`` must pair to -1 with the exceptional divisor, so lifts are
    x + l*fiber with E-pairing decreasing in l.
    """
    if p1.source.pair(divisor, fiber) != -1:
        raise LiftError(f"fiber class must pair to -1 with {divisor}")
    return minimal_lift(p1, beta, [fiber], bound)


def orthogonal_lift(p1: LatticeMap, divisor: str, beta, fiber, bound: int = 24) -> CurveClass:
    """The lift of ``beta`` with zero pairing against the exceptional divisor.

    Equals minimal + (E . minimal) * fiber; this is the class picked out by
    a representative disjoint from the blown-up curve.
    """
    lo = minimal_lift_blowup(p1, divisor, beta, fiber, bound)
    e = p1.source.pair(divisor, lo)
    if e < 0:
        raise LiftError(f"{beta} has no effective lift orthogonal to {divisor}")
    return lo + e * p1.source.cls(p1.source._coords(fiber))
