"""Line-oriented text formats: geometry descriptions and invariant tables.

Geometry file (``#% flopgw-geometry v1``), one statement per line, ``#``
starts a comment::

    lattice <name> <generator names...>
    effective <lattice> <v> <v> ...          # v = comma-separated integers
    divisor <lattice> <label> <v>
    canonical <lattice> <v>
    map <name> <source> <target> <row> <row> ...
    class <lattice> <name> <v>
    ring <name> <gen:deg> ...
    top <ring> <degree>
    rule <ring> <monomial> = <polynomial>
    integral <ring> <monomial> <rational>
    insertion <lattice> <label> <codim> <c-pairing>
    triple <lattice> <label> <label> <label> <rational>
    basis <name> <labels...>
    pairing <basis> <label> <label> <rational>
    flop X=<l> Xp=<l> phi=<map> phi_inv=<map> C=<v> Cp=<v>
    blowup W=<l> Y1=<l> Y2=<l> p1=<map> p2=<map> fiber1=<v> fiber2=<v> [divisor=E]
    conifold W=<l> Y1=<l> Y2=<l> p1=<map> p2=<map> fiber1=<v>;<v> fiber2=<v> [divisor=E]
    transition X=<l> Xt=<l> Xpp=<l> p1=<map> phi_e=<map> C=<v> ruling1=<v> ruling2=<v> [divisor=E]
    transition-insertion <label on X''> <label on X>
    check <kind> <argument>

GW table file (``#% gwtable v1``)::

    lattice <name>
    rule multiple-cover                      # optional
    # provenance: <text>                     # optional
    <g> <n> <beta> <labels comma-separated or -> <rational>
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .chow import RingError, RingPresentation
from .degeneration import (CohomologyBasis, DegenerationGeometry, RelativeGWTable)
from .lattice import CurveClassLattice, LatticeError, LatticeMap, Vector
from .novikov import fmt_rational
from .transform import (FlopGeometry, GWTable, InsertionClass, InsertionRegistry,
                        TransitionGeometry)

GEOMETRY_HEADER = "#% flopgw-geometry v1"
TABLE_HEADER = "#% gwtable v1"
RELTABLE_HEADER = "#% relgw v1"


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = ""):
        where = f"{source}:{line}: " if line is not None else (f"{source}: " if source else "")
        super().__init__(where + message)
        self.line = line


def parse_vec(text: str) -> Vector:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValueError(f"expected comma-separated integers, got {text!r}") from None


def fmt_vec(v: Iterable[int]) -> str:
    return ",".join(str(x) for x in v)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"expected a rational p/q, got {text!r}") from None


@dataclass
class Geometry:
    lattices: dict[str, CurveClassLattice] = field(default_factory=dict)
    maps: dict[str, LatticeMap] = field(default_factory=dict)
    classes: dict[str, dict[str, Vector]] = field(default_factory=dict)
    rings: dict[str, RingPresentation] = field(default_factory=dict)
    registries: dict[str, InsertionRegistry] = field(default_factory=dict)
    bases: dict[str, CohomologyBasis] = field(default_factory=dict)
    flop: FlopGeometry | None = None
    blowup: DegenerationGeometry | None = None
    conifold: DegenerationGeometry | None = None
    transition: TransitionGeometry | None = None
    checks: list[tuple[str, str]] = field(default_factory=list)
    statements: list[str] = field(default_factory=list)

    def lattice(self, name: str) -> CurveClassLattice:
        try:
            return self.lattices[name]
        except KeyError:
            raise ValueError(f"unknown lattice {name!r}") from None

    def map(self, name: str) -> LatticeMap:
        try:
            return self.maps[name]
        except KeyError:
            raise ValueError(f"unknown map {name!r}") from None

    def resolve_class(self, lattice: str, text: str) -> Vector:
        named = self.classes.get(lattice, {})
        if text in named:
            return named[text]
        return self.lattice(lattice)._coords(parse_vec(text))

    def registry(self, lattice: str) -> InsertionRegistry:
        return self.registries.setdefault(lattice, InsertionRegistry())


def _kv(tokens: list[str], required: Iterable[str], optional: Iterable[str] = ()) -> dict:
    out = {}
    for t in tokens:
        k, sep, v = t.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {t!r}")
        out[k] = v
    missing = [k for k in required if k not in out]
    if missing:
        raise ValueError(f"missing field(s): {', '.join(missing)}")
    extra = set(out) - set(required) - set(optional)
    if extra:
        raise ValueError(f"unknown field(s): {', '.join(sorted(extra))}")
    return out


def parse_geometry(text: str, source: str = "<geometry>") -> Geometry:
    lines = text.splitlines()
    if not lines or lines[0].strip() != GEOMETRY_HEADER:
        raise ParseError(f"missing header {GEOMETRY_HEADER!r}", 1, source)
    stmts: list[tuple[int, list[str], str]] = []
    for no, raw in enumerate(lines[1:], start=2):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            toks = shlex.split(body)
        except ValueError as exc:
            raise ParseError(str(exc), no, source) from None
        stmts.append((no, toks, body))

    geo = Geometry(statements=[body for _, _, body in stmts])
    lat_decl: dict[str, dict] = {}
    ring_decl: dict[str, dict] = {}
    order = ["lattice", "effective", "divisor", "canonical", "class", "map", "ring", "top",
             "rule", "integral", "insertion", "triple", "basis", "pairing", "flop",
             "blowup", "conifold", "transition", "transition-insertion", "check"]
    for kw in (s[1][0] for s in stmts):
        if kw not in order:
            no = next(s[0] for s in stmts if s[1][0] == kw)
            raise ParseError(f"unknown statement {kw!r}", no, source)

    def run(phase: Iterable[str], handler):
        for no, toks, body in stmts:
            if toks[0] in phase:
                try:
                    handler(toks[0], toks[1:], body)
                except (ValueError, KeyError, LatticeError, RingError) as exc:
                    msg = exc.args[0] if exc.args else str(exc)
                    raise ParseError(str(msg), no, source) from None

    def lattice_stmt(kw, a, body):
        if kw == "lattice":
            if len(a) < 2:
                raise ValueError("lattice needs a name and generator names")
            if a[0] in lat_decl:
                raise ValueError(f"lattice {a[0]!r} declared twice")
            lat_decl[a[0]] = {"gens": a[1:], "eff": [], "div": {}, "K": None}
            return
        if not a or a[0] not in lat_decl:
            raise ValueError(f"unknown lattice {a[0] if a else ''!r}")
        decl = lat_decl[a[0]]
        if kw == "effective":
            decl["eff"].extend(parse_vec(v) for v in a[1:])
        elif kw == "divisor":
            if len(a) != 3:
                raise ValueError("divisor needs a lattice, a label and a functional")
            decl["div"][a[1]] = parse_vec(a[2])
        elif kw == "canonical":
            if len(a) != 2:
                raise ValueError("canonical needs a lattice and a functional")
            decl["K"] = parse_vec(a[1])

    run(["lattice"], lattice_stmt)
    run(["effective", "divisor", "canonical"], lattice_stmt)
    for name, decl in lat_decl.items():
        no = next(s[0] for s in stmts if s[1][0] == "lattice" and s[1][1] == name)
        try:
            geo.lattices[name] = CurveClassLattice(name, decl["gens"], decl["eff"],
                                                   decl["div"], decl["K"])
        except LatticeError as exc:
            raise ParseError(str(exc), no, source) from None

    def class_stmt(kw, a, body):
        if len(a) != 3:
            raise ValueError("class needs a lattice, a name and coordinates")
        geo.classes.setdefault(a[0], {})[a[1]] = geo.lattice(a[0])._coords(parse_vec(a[2]))

    def map_stmt(kw, a, body):
        if len(a) < 3:
            raise ValueError("map needs a name, a source and a target")
        if a[0] in geo.maps:
            raise ValueError(f"map {a[0]!r} declared twice")
        rows = [parse_vec(r) for r in a[3:]]
        geo.maps[a[0]] = LatticeMap(a[0], geo.lattice(a[1]), geo.lattice(a[2]), rows)

    run(["class"], class_stmt)
    run(["map"], map_stmt)

    def ring_stmt(kw, a, body):
        if kw == "ring":
            if a[0] in ring_decl:
                raise ValueError(f"ring {a[0]!r} declared twice")
            ring_decl[a[0]] = {"gens": " ".join(a[1:]), "top": None, "rules": [], "ints": {}}
            return
        if not a or a[0] not in ring_decl:
            raise ValueError(f"unknown ring {a[0] if a else ''!r}")
        decl = ring_decl[a[0]]
        if kw == "top":
            decl["top"] = int(a[1])
        elif kw == "rule":
            decl["rules"].append(body.split(None, 2)[2])
        elif kw == "integral":
            if len(a) != 3:
                raise ValueError("integral needs a ring, a monomial and a value")
            decl["ints"][a[1]] = parse_rational(a[2])

    run(["ring"], ring_stmt)
    run(["top", "rule", "integral"], ring_stmt)
    for name, decl in ring_decl.items():
        no = next(s[0] for s in stmts if s[1][0] == "ring" and s[1][1] == name)
        if decl["top"] is None:
            raise ParseError(f"ring {name!r} has no top degree", no, source)
        try:
            geo.rings[name] = RingPresentation.parse(decl["gens"], decl["rules"], decl["top"],
                                                     decl["ints"], name)
        except (RingError, ValueError) as exc:
            raise ParseError(str(exc), no, source) from None

    def insertion_stmt(kw, a, body):
        if kw == "insertion":
            if len(a) != 4:
                raise ValueError("insertion needs a lattice, a label, a codimension and a c-pairing")
            geo.lattice(a[0])
            reg = geo.registry(a[0])
            c = InsertionClass(a[1], int(a[2]), int(a[3]))
            if c.label in reg.classes:
                raise ValueError(f"insertion {c.label!r} registered twice")
            reg.classes[c.label] = c
        else:
            if len(a) != 5:
                raise ValueError("triple needs a lattice, three labels and a value")
            geo.registry(a[0]).set_triple(a[1:4], parse_rational(a[4]))

    run(["insertion"], insertion_stmt)
    run(["triple"], insertion_stmt)

    basis_decl: dict[str, dict] = {}

    def basis_stmt(kw, a, body):
        if kw == "basis":
            basis_decl[a[0]] = {"labels": a[1:], "pairs": {}}
        else:
            if a[0] not in basis_decl:
                raise ValueError(f"unknown basis {a[0]!r}")
            basis_decl[a[0]]["pairs"][(a[1], a[2])] = parse_rational(a[3])

    run(["basis"], basis_stmt)
    run(["pairing"], basis_stmt)
    for name, decl in basis_decl.items():
        no = next(s[0] for s in stmts if s[1][0] == "basis" and s[1][1] == name)
        labs = decl["labels"]
        mat = [[Fraction(0)] * len(labs) for _ in labs]
        try:
            for (x, y), v in decl["pairs"].items():
                i, j = labs.index(x), labs.index(y)
                mat[i][j] = mat[j][i] = v
            geo.bases[name] = CohomologyBasis(labs, mat)
        except ValueError as exc:
            raise ParseError(str(exc), no, source) from None

    def role_stmt(kw, a, body):
        if kw == "flop":
            f = _kv(a, ["X", "Xp", "phi", "phi_inv", "C", "Cp"])
            geo.flop = FlopGeometry(geo.lattice(f["X"]), geo.lattice(f["Xp"]), geo.map(f["phi"]),
                                    geo.map(f["phi_inv"]), geo.resolve_class(f["X"], f["C"]),
                                    geo.resolve_class(f["Xp"], f["Cp"]))
        elif kw in ("blowup", "conifold"):
            f = _kv(a, ["W", "Y1", "Y2", "p1", "p2", "fiber1", "fiber2"], ["divisor"])
            fib1 = tuple(geo.resolve_class(f["Y1"], v) for v in f["fiber1"].split(";"))
            fib2 = tuple(geo.resolve_class(f["Y2"], v) for v in f["fiber2"].split(";"))
            dg = DegenerationGeometry(kw, geo.lattice(f["W"]), geo.lattice(f["Y1"]),
                                      geo.lattice(f["Y2"]), geo.map(f["p1"]), geo.map(f["p2"]),
                                      fib1, fib2, f.get("divisor", "E"))
            setattr(geo, kw, dg)
        elif kw == "transition":
            f = _kv(a, ["X", "Xt", "Xpp", "p1", "phi_e", "C", "ruling1", "ruling2"], ["divisor"])
            geo.transition = TransitionGeometry(
                geo.lattice(f["X"]), geo.lattice(f["Xt"]), geo.lattice(f["Xpp"]),
                geo.map(f["p1"]), geo.map(f["phi_e"]), geo.resolve_class(f["X"], f["C"]),
                (geo.resolve_class(f["Xt"], f["ruling1"]), geo.resolve_class(f["Xt"], f["ruling2"])),
                f.get("divisor", "E"))
        elif kw == "transition-insertion":
            if geo.transition is None:
                raise ValueError("transition-insertion needs a transition statement")
            if len(a) != 2:
                raise ValueError("transition-insertion needs two labels")
            geo.transition.insertion_map[a[0]] = a[1]
        elif kw == "check":
            if not a:
                raise ValueError("check needs a kind")
            geo.checks.append((a[0], " ".join(a[1:])))

    run(["flop", "blowup", "conifold", "transition"], role_stmt)
    run(["transition-insertion", "check"], role_stmt)
    return geo


def _term(ring: RingPresentation, m, c: Fraction) -> str:
    mono = ring.format_monomial(m)
    return fmt_rational(c) if mono == "1" else f"{fmt_rational(c)}*{mono}"


def serialize_geometry(geo: Geometry) -> str:
    """Normalised text of a parsed geometry (statements in parse order)."""
    out = [GEOMETRY_HEADER]
    for name, lat in geo.lattices.items():
        out.append(f"lattice {name} " + " ".join(lat.generator_names))
        if lat.effective_generators:
            out.append(f"effective {name} " + " ".join(fmt_vec(g) for g in lat.effective_generators))
        for lab, f in lat.divisors.items():
            out.append(f"divisor {name} {lab} {fmt_vec(f)}")
        if lat.canonical is not None:
            out.append(f"canonical {name} {fmt_vec(lat.canonical)}")
    for lat, named in geo.classes.items():
        for name, v in named.items():
            out.append(f"class {lat} {name} {fmt_vec(v)}")
    for name, m in geo.maps.items():
        out.append(f"map {name} {m.source.name} {m.target.name} "
                   + " ".join(fmt_vec(r) for r in m.matrix))
    for name, ring in geo.rings.items():
        out.append(f"ring {name} " + " ".join(f"{n}:{d}" for n, d in zip(ring.names, ring.degrees)))
        out.append(f"top {name} {ring.top_degree}")
        for lhs, rhs in ring.rules:
            rhs_text = " + ".join(_term(ring, m, c) for m, c in sorted(rhs.items(), reverse=True)) or "0"
            out.append(f"rule {name} {ring.format_monomial(lhs)} = {rhs_text}")
        for m, v in ring.integrals.items():
            out.append(f"integral {name} {ring.format_monomial(m)} {fmt_rational(v)}")
    for lat, reg in geo.registries.items():
        for c in reg.classes.values():
            out.append(f"insertion {lat} {c.label} {c.codim} {c.c_pairing}")
        for labels, v in reg.triples.items():
            out.append(f"triple {lat} {' '.join(labels)} {fmt_rational(v)}")
    for name, b in geo.bases.items():
        out.append(f"basis {name} " + " ".join(b.labels))
        for i, x in enumerate(b.labels):
            for j in range(i, len(b.labels)):
                if b.matrix[i][j]:
                    out.append(f"pairing {name} {x} {b.labels[j]} {fmt_rational(b.matrix[i][j])}")
    if geo.flop:
        f = geo.flop
        out.append(f"flop X={f.X.name} Xp={f.Xp.name} phi={f.phi.name} "
                   f"phi_inv={f.phi_inv.name} C={fmt_vec(f.C)} Cp={fmt_vec(f.Cp)}")
    for dg in (geo.blowup, geo.conifold):
        if dg:
            out.append(f"{dg.kind} W={dg.W.name} Y1={dg.Y1.name} Y2={dg.Y2.name} "
                       f"p1={dg.p1.name} p2={dg.p2.name} "
                       f"fiber1={';'.join(fmt_vec(v) for v in dg.fibers1)} "
                       f"fiber2={';'.join(fmt_vec(v) for v in dg.fibers2)} divisor={dg.divisor}")
    if geo.transition:
        t = geo.transition
        out.append(f"transition X={t.X.name} Xt={t.Xt.name} Xpp={t.Xpp.name} p1={t.p1.name} "
                   f"phi_e={t.phi_e.name} C={fmt_vec(t.C)} ruling1={fmt_vec(t.rulings[0])} "
                   f"ruling2={fmt_vec(t.rulings[1])} divisor={t.divisor}")
        for a, b in t.insertion_map.items():
            out.append(f"transition-insertion {a} {b}")
    for kind, arg in geo.checks:
        out.append(f"check {kind} {arg}".rstrip())
    return "\n".join(out) + "\n"


def geometry_equal(a: Geometry, b: Geometry) -> bool:
    return (a.lattices == b.lattices and a.maps == b.maps and a.classes == b.classes
            and a.rings == b.rings and a.registries == b.registries
            and {k: (v.labels, v.matrix) for k, v in a.bases.items()}
            == {k: (v.labels, v.matrix) for k, v in b.bases.items()}
            and a.flop == b.flop and a.blowup == b.blowup and a.conifold == b.conifold
            and a.transition == b.transition and a.checks == b.checks)


# -- GW tables -------------------------------------------------------------


def parse_table(text: str, lattices: dict[str, CurveClassLattice],
                source: str = "<table>") -> GWTable:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TABLE_HEADER:
        raise ParseError(f"missing header {TABLE_HEADER!r}", 1, source)
    table = None
    rule = False
    provenance = ""
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("provenance:"):
                provenance = body[len("provenance:"):].strip()
            continue
        toks = line.split()
        try:
            if toks[0] == "lattice":
                if table is not None:
                    raise ValueError("lattice declared twice")
                if len(toks) != 2 or toks[1] not in lattices:
                    raise ValueError(f"unknown lattice {' '.join(toks[1:])!r}")
                table = GWTable(lattices[toks[1]])
            elif toks[0] == "rule":
                if toks[1:] != ["multiple-cover"]:
                    raise ValueError(f"unknown rule {' '.join(toks[1:])!r}")
                rule = True
            else:
                if table is None:
                    raise ValueError("entries before the lattice line")
                if len(toks) != 5:
                    raise ValueError("entry needs: g n beta labels value")
                g, n = int(toks[0]), int(toks[1])
                labels = () if toks[3] == "-" else tuple(toks[3].split(","))
                key = (g, n, table.lattice._coords(parse_vec(toks[2])), tuple(sorted(labels)))
                if key in table.entries:
                    raise ValueError("duplicate entry")
                table.set(g, n, parse_vec(toks[2]), labels, parse_rational(toks[4]))
        except (ValueError, LatticeError) as exc:
            raise ParseError(str(exc), no, source) from None
    if table is None:
        raise ParseError("no lattice line", None, source)
    table.multiple_cover_rule = rule
    table.provenance = provenance
    return table


def serialize_table(table: GWTable) -> str:
    out = [TABLE_HEADER, f"lattice {table.lattice.name}"]
    if table.multiple_cover_rule:
        out.append("rule multiple-cover")
    if table.provenance:
        out.append(f"# provenance: {table.provenance}")
    for (g, n, beta, labels), v in table.items():
        out.append(f"{g} {n} {fmt_vec(beta)} {','.join(labels) or '-'} {fmt_rational(v)}")
    return "\n".join(out) + "\n"


def parse_reltable(text: str, lattices: dict[str, CurveClassLattice],
                   source: str = "<relative table>") -> RelativeGWTable:
    lines = text.splitlines()
    if not lines or lines[0].strip() != RELTABLE_HEADER:
        raise ParseError(f"missing header {RELTABLE_HEADER!r}", 1, source)
    table = None
    for no, raw in enumerate(lines[1:], start=2):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "lattice":
                if len(toks) != 2 or toks[1] not in lattices:
                    raise ValueError(f"unknown lattice {' '.join(toks[1:])!r}")
                table = RelativeGWTable(lattices[toks[1]])
            else:
                if table is None:
                    raise ValueError("entries before the lattice line")
                if len(toks) != 3:
                    raise ValueError("entry needs: graph-key labels value")
                labels = () if toks[1] == "-" else tuple(toks[1].split(","))
                table.set(toks[0], labels, parse_rational(toks[2]))
        except (ValueError, LatticeError) as exc:
            raise ParseError(str(exc), no, source) from None
    if table is None:
        raise ParseError("no lattice line", None, source)
    return table


def serialize_reltable(table: RelativeGWTable) -> str:
    out = [RELTABLE_HEADER, f"lattice {table.lattice.name}"]
    for (key, labels), v in sorted(table.entries.items()):
        out.append(f"{key} {','.join(labels) or '-'} {fmt_rational(v)}")
    return "\n".join(out) + "\n"
