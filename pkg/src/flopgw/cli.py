"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 an identity check failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import novikov
from .chow import RingError, parse_element
from .degeneration import (CapError, canonical_key, enumerate_triples, eq_count, genus,
                           root_multiplicity, simplified_form_applies, vdim_additivity_check)
from .lattice import LatticeError, dot
from .novikov import NovikovError, fmt_rational, serialize, truncate
from .textio import (Geometry, ParseError, fmt_vec, parse_geometry, parse_table, parse_vec,
                     serialize_table)
from .transform import (GWTable, MissingDataError, TransformError, flop_registry,
                        flop_transform, multiple_cover_series, multiple_cover_tail,
                        transition_table, transition_threepoint_check, transition_transform,
                        wallcrossing_check)

log = logging.getLogger("flopgw")

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
REPORT_HEADER = "#% flopgw-report v1"


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    geometry: Path | None = None
    tables: list[Path] = field(default_factory=list)
    max_vertices: int = 3
    max_genus: int | None = None
    max_weight: int = 3
    cutoff: int = 10
    out: Path | None = None
    verbosity: int = 0

    def __post_init__(self):
        for name in ("max_vertices", "max_weight", "cutoff"):
            if getattr(self, name) < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.max_genus is not None and self.max_genus < 0:
            raise UsageError("--max-genus must be non-negative")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load(cfg: RunConfig) -> tuple[Geometry, dict[str, GWTable]]:
    if cfg.geometry is None:
        raise UsageError("--geometry is required")
    geo = parse_geometry(_read(cfg.geometry), str(cfg.geometry))
    tables = {}
    for p in cfg.tables:
        t = parse_table(_read(p), geo.lattices, str(p))
        if t.lattice.name in tables:
            raise UsageError(f"two tables given for lattice {t.lattice.name!r}")
        tables[t.lattice.name] = t
    return geo, tables


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        Path(cfg.out).write_text(text)


# -- enumerate ---------------------------------------------------------------


def _fmt_triple(eta) -> str:
    side1, side2, roots = canonical_key(eta)

    def side(vs):
        return ";".join(f"{g}|{fmt_vec(b)}|{fmt_vec(legs) or '-'}" for g, b, legs in vs) or "empty"

    rs = ",".join(f"{a}-{b}:{m}" for a, b, m in roots) or "-"
    return f"Y1[{side(side1)}] Y2[{side(side2)}] roots[{rs}]"


def cmd_enumerate(cfg: RunConfig, args) -> int:
    geo, _ = _load(cfg)
    geom = getattr(geo, args.kind)
    if geom is None:
        raise UsageError(f"geometry has no {args.kind} statement")
    if args.beta is None:
        raise UsageError("--beta is required")
    beta = geo.resolve_class(geom.W.name, args.beta)
    g, n = args.genus, args.legs
    lines = [f"# enumerate {args.kind} beta={fmt_vec(beta)} g={g} n={n}"]
    if not geom.W.is_effective(beta):
        lines.append(f"# note: beta is not effective in {geom.W.name}")
        lines.append("count 0")
        _emit(cfg, "\n".join(lines) + "\n")
        return EXIT_OK
    h1, h2 = geom.Y1.positive_functional, geom.Y2.positive_functional
    lines.append(f"# d1 = ({fmt_vec(h1)}).b(Gamma_1), d2 = ({fmt_vec(h2)}).b(Gamma_2)")
    triples = enumerate_triples(g, n, beta, geom, max_vertices=cfg.max_vertices,
                                max_genus=g if cfg.max_genus is None else cfg.max_genus,
                                max_weight=cfg.max_weight)
    for eta in triples:
        try:
            eq = str(eq_count(eta))
        except CapError as exc:
            log.warning("%s", exc)
            eq = "?"
        d1 = dot(h1, eta.first.total_class())
        d2 = dot(h2, eta.second.total_class())
        lines.append(f"{_fmt_triple(eta)} I={fmt_vec(eta.I) or '-'} g={genus(eta)} "
                     f"d1={d1} d2={d2} m={root_multiplicity(eta)} eq={eq}")
    lines.append(f"count {len(triples)}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


# -- transforms ----------------------------------------------------------------


def _single_table(cfg: RunConfig, tables: dict[str, GWTable]) -> GWTable:
    if len(tables) != 1:
        raise UsageError("exactly one --table is required")
    return next(iter(tables.values()))


def cmd_transform_flop(cfg: RunConfig, args) -> int:
    geo, tables = _load(cfg)
    if geo.flop is None:
        raise UsageError("geometry has no flop statement")
    table = _single_table(cfg, tables)
    flop = geo.flop if table.lattice == geo.flop.X else geo.flop.reversed()
    out = flop_transform(table, flop)
    _emit(cfg, serialize_table(out))
    return EXIT_OK


def cmd_transform_transition(cfg: RunConfig, args) -> int:
    geo, tables = _load(cfg)
    geom = geo.transition
    if geom is None:
        raise UsageError("geometry has no transition statement")
    table = _single_table(cfg, tables)
    if table.lattice != geom.X:
        raise UsageError(f"table must live on {geom.X.name!r}")
    if args.beta is not None:
        beta = geo.resolve_class(geom.Xpp.name, args.beta)
        labels = tuple(args.labels.split(",")) if args.labels else ()
        v = transition_transform(table, beta, args.genus, labels, geom)
        _emit(cfg, fmt_rational(v) + "\n")
        return EXIT_OK
    _emit(cfg, serialize_table(transition_table(table, geom)))
    return EXIT_OK


# -- checks ----------------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    lhs: str
    rhs: str
    notes: list[str] = field(default_factory=list)

    def render(self) -> list[str]:
        out = [f"{'PASS' if self.passed else 'FAIL'} {self.name}",
               f"  lhs: {self.lhs}", f"  rhs: {self.rhs}"]
        out += [f"  {n}" for n in self.notes]
        return out


def _labels(text: str) -> tuple[str, ...]:
    labs = tuple(x for x in text.split(",") if x)
    if len(labs) != 3:
        raise UsageError(f"expected three comma-separated labels, got {text!r}")
    return labs


def _need(tables, name, what):
    if name not in tables:
        raise UsageError(f"{what} needs a table on {name!r}")
    return tables[name]


def _check_wallcrossing(geo, tables, arg, cfg) -> CheckResult:
    flop = geo.flop
    if flop is None:
        raise UsageError("wallcrossing needs a flop statement")
    labels = _labels(arg)
    table = _need(tables, flop.X.name, "wallcrossing")
    reg = geo.registry(flop.X.name)
    reg_p = geo.registries.get(flop.Xp.name) or flop_registry(reg)
    rep = wallcrossing_check(table, labels, reg, flop, tables.get(flop.Xp.name), reg_p)
    a = reg.c_pairings(labels)
    notes = [f"pushed: {serialize(rep.pushed)}",
             f"lambda- = {fmt_rational(rep.lambda_minus)}, lambda+ = {fmt_rational(rep.lambda_plus)}, "
             f"discrepancy = {fmt_rational(rep.discrepancy)} (expected {-a[0] * a[1] * a[2]})"]
    return CheckResult(f"wallcrossing {','.join(labels)}", rep.isomorphic,
                       serialize(rep.continued), serialize(novikov.analytic_continue(rep.flopped)),
                       notes)


def _check_transition(geo, tables, arg, cfg) -> CheckResult:
    geom = geo.transition
    if geom is None:
        raise UsageError("transition check needs a transition statement")
    labels = _labels(arg)
    table = _need(tables, geom.X.name, "transition")
    table_pp = tables.get(geom.Xpp.name) or transition_table(table, geom)
    rep = transition_threepoint_check(table, table_pp, labels, geo.registry(geom.X.name),
                                      geo.registry(geom.Xpp.name), geom)
    return CheckResult(f"transition {','.join(labels)}", rep.equal,
                       serialize(rep.lhs), serialize(rep.rhs))


def _check_additivity(geo, tables, arg, cfg) -> CheckResult:
    try:
        kind, beta_text, g, n = arg.split(":")
        g, n = int(g), int(n)
    except ValueError:
        raise UsageError(f"additivity check needs kind:beta:g:n, got {arg!r}") from None
    geom = getattr(geo, kind, None) if kind in ("blowup", "conifold") else None
    if geom is None:
        raise UsageError(f"geometry has no {kind} statement")
    beta = geo.resolve_class(geom.W.name, beta_text)
    triples = enumerate_triples(g, n, beta, geom, max_vertices=cfg.max_vertices,
                                max_genus=g if cfg.max_genus is None else cfg.max_genus,
                                max_weight=cfg.max_weight)
    simple = simplified_form_applies(geom)
    bad, lhs, rhs = [], [], []
    for eta in triples:
        rep = vdim_additivity_check(eta, geom)
        lhs.append(str(rep.lhs))
        rhs.append(str(rep.rhs))
        if not rep.holds or (simple and not rep.simplified_holds):
            bad.append(_fmt_triple(eta))
    notes = [f"{len(triples)} triples, simplified form {'checked' if simple else 'not applicable'}"]
    notes += [f"violated by {b}" for b in bad]
    return CheckResult(f"additivity {arg}", not bad, " ".join(lhs) or "-", " ".join(rhs) or "-",
                       notes)


def _check_multiple_cover(geo, tables, arg, cfg) -> CheckResult:
    flop = geo.flop
    if flop is None:
        raise UsageError("multiple-cover check needs a flop statement")
    labels = _labels(arg)
    a = geo.registry(flop.X.name).c_pairings(labels)
    lat = flop.X
    h = lat.positive_functional
    M = cfg.cutoff
    tail = multiple_cover_tail(*a, lat, flop.C)
    lhs = truncate(tail, h, M * dot(h, flop.C))
    rhs = multiple_cover_series(a, flop.C, M)

    def fmt(d):
        return " + ".join(f"{fmt_rational(c)} * q^[{fmt_vec(b)}]" for b, c in d.items()) or "0"

    return CheckResult(f"multiple-cover {','.join(labels)} M={M}", lhs == rhs, fmt(lhs), fmt(rhs))


CHECKS = {
    "wallcrossing": _check_wallcrossing,
    "transition": _check_transition,
    "additivity": _check_additivity,
    "multiple-cover": _check_multiple_cover,
}


def run_checks(geo: Geometry, tables: dict[str, GWTable], requests: list[tuple[str, str]],
               cfg: RunConfig) -> list[CheckResult]:
    results = []
    for kind, arg in requests:
        if kind not in CHECKS:
            raise UsageError(f"unknown check {kind!r} (known: {', '.join(CHECKS)})")
        log.info("running %s %s", kind, arg)
        results.append(CHECKS[kind](geo, tables, arg, cfg))
    return results


def render_report(results: list[CheckResult]) -> str:
    lines = [REPORT_HEADER]
    for r in results:
        lines += r.render()
    npass = sum(r.passed for r in results)
    lines.append(f"summary: {npass} PASS, {len(results) - npass} FAIL")
    return "\n".join(lines) + "\n"


def cmd_check(cfg: RunConfig, args) -> int:
    geo, tables = _load(cfg)
    requests = list(geo.checks)
    for s in args.check or []:
        kind, _, arg = s.partition(":")
        requests.append((kind, arg))
    results = run_checks(geo, tables, requests, cfg)
    _emit(cfg, render_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- small utilities -------------------------------------------------------------


def cmd_ring_nf(cfg: RunConfig, args) -> int:
    geo, _ = _load(cfg)
    if args.ring is None:
        if len(geo.rings) != 1:
            raise UsageError("--ring is required when the geometry declares several rings")
        ring = next(iter(geo.rings.values()))
    elif args.ring in geo.rings:
        ring = geo.rings[args.ring]
    else:
        raise UsageError(f"unknown ring {args.ring!r}")
    lines = [str(parse_element(ring, e)) for e in args.expr]
    if args.integrate:
        lines = [f"{s}  [integral {fmt_rational(ring.integrate(parse_element(ring, e)))}]"
                 for s, e in zip(lines, args.expr)]
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_series_truncate(cfg: RunConfig, args) -> int:
    geo, _ = _load(cfg)
    lat = geo.lattice(args.lattice)
    f = novikov.parse(lat, args.series)
    ample = parse_vec(args.ample) if args.ample else None
    terms = truncate(f, ample, cfg.cutoff)
    text = " + ".join(f"{fmt_rational(c)} * q^[{fmt_vec(b)}]" for b, c in terms.items()) or "0"
    _emit(cfg, text + "\n")
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "transform-flop": cmd_transform_flop,
    "transform-transition": cmd_transform_transition,
    "check": cmd_check,
    "ring-nf": cmd_ring_nf,
    "series-truncate": cmd_series_truncate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--geometry", type=Path, help="geometry description file")
    common.add_argument("--table", type=Path, action="append", default=[],
                        help="GW table file (repeatable)")
    common.add_argument("--max-vertices", type=int, default=3)
    common.add_argument("--max-genus", type=int, default=None,
                        help="per-vertex genus cap (default: the total genus)")
    common.add_argument("--max-weight", type=int, default=3)
    common.add_argument("--cutoff", type=int, default=10,
                        help="truncation degree, or M for the multiple-cover check")
    common.add_argument("--out", type=Path, help="write output here instead of stdout")
    common.add_argument("-v", "--verbose", action="count", default=0)

    p = _Parser(prog="flopgw", description="GW invariants under flops and transitions")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="list admissible triples")
    e.add_argument("--kind", choices=["blowup", "conifold"], default="blowup")
    e.add_argument("--beta", help="class in the degenerating 3-fold (coords or name)")
    e.add_argument("--genus", type=int, default=0)
    e.add_argument("--legs", type=int, default=0)

    sub.add_parser("transform-flop", parents=[common], help="push a GW table through the flop")

    t = sub.add_parser("transform-transition", parents=[common],
                       help="GW invariants of the smoothing from those of X")
    t.add_argument("--beta", help="single class on X'' (prints one value)")
    t.add_argument("--genus", type=int, default=0)
    t.add_argument("--labels", default="", help="comma-separated X'' insertion labels")

    c = sub.add_parser("check", parents=[common], help="verify identities")
    c.add_argument("--check", action="append",
                   help="wallcrossing:A,B,C | transition:A,B,C | additivity:KIND:BETA:G:N "
                        "| multiple-cover:A,B,C")

    r = sub.add_parser("ring-nf", parents=[common], help="normal form in a Chow ring")
    r.add_argument("--ring")
    r.add_argument("--integrate", action="store_true")
    r.add_argument("expr", nargs="+")

    s = sub.add_parser("series-truncate", parents=[common], help="expand a Novikov series")
    s.add_argument("--lattice", required=True)
    s.add_argument("--ample", help="grading functional (default: positive functional)")
    s.add_argument("series")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s")
    try:
        cfg = RunConfig(args.command, args.geometry, list(args.table), args.max_vertices,
                        args.max_genus, args.max_weight, args.cutoff, args.out, args.verbose)
        return COMMANDS[args.command](cfg, args)
    except (UsageError, ParseError, TransformError, MissingDataError, LatticeError, RingError,
            NovikovError, CapError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"flopgw: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
