"""Command-line front end.

Every command takes its network either from ``--input FILE`` or from the
family flags (``--family`` with ``--n``/``--depth``, ``--base``, ``--levels``).
Exit status is 0 when every check passes, 1 when a check fails and 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import comparison as cmp
from . import energy_space as es
from . import families as fam
from . import spectral as sp
from . import walks
from .graph_core import Network, NetworkError, VertexFunction, components, degree, validate
from .io import FormatError, csv_text, dump_network, read_network, read_pair

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

FAMILY_ALIASES = {
    "geometric": "geometric_integers",
    "tree": "binary_tree",
    "hct": "horizontally_connected_tree",
    **{k: k for k in fam.KINDS},
}


class InputError(Exception):
    """Bad command-line input; maps to exit status 2."""


@dataclass
class Report:
    """One table of output plus the pass/fail outcome of any checks in it."""

    title: str
    header: list[str]
    rows: list[list] = field(default_factory=list)
    failed: bool = False

    def check(self, name: str, value: float, limit: str, ok: bool) -> None:
        self.rows.append([name, value, limit, "pass" if ok else "FAIL"])
        self.failed |= not ok


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def render_table(report: Report) -> str:
    cells = [report.header] + [[_fmt(v) for v in row] for row in report.rows]
    widths = [max(len(row[k]) for row in cells) for k in range(len(report.header))]
    lines = [report.title] if report.title else []
    for n, row in enumerate(cells):
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def render(reports: Sequence[Report], fmt: str) -> str:
    if fmt == "csv":
        return "".join(csv_text(r.header, r.rows) for r in reports)
    return "\n".join(render_table(r) for r in reports)


# -- input resolution -----------------------------------------------------------


def _family_spec(args) -> fam.FamilySpec:
    kind = FAMILY_ALIASES.get(args.family)
    if kind is None:
        raise InputError(f"unknown family {args.family!r}")
    size = args.n if args.n is not None else args.depth
    if size is None:
        raise InputError("family needs --n (or --depth for trees)")
    base = args.base[0] if args.base else None
    levels = tuple(args.levels or ())
    return fam.FamilySpec(kind, size, base=base, level_weights=levels)


def _check_one_source(args) -> None:
    if (args.input is None) == (args.family is None):
        raise InputError("give exactly one input source: --input FILE or --family")


def load_network(args) -> tuple[Network, fam.FamilySpec | None]:
    _check_one_source(args)
    if args.input is not None:
        return read_network(args.input), None
    spec = _family_spec(args)
    return fam.generate(spec), spec


def load_pair(args) -> tuple[cmp.ConductancePair, fam.FamilySpec | None]:
    _check_one_source(args)
    if args.input is not None:
        return read_pair(args.input), None
    kind = FAMILY_ALIASES.get(args.family)
    size = args.n if args.n is not None else args.depth
    if size is None:
        raise InputError("family needs --n (or --depth for trees)")
    if kind == "geometric_integers":
        if not args.base or len(args.base) != 2:
            raise InputError("geometric pair needs --base B C")
        b, c = args.base
        spec = fam.FamilySpec(kind, size, base=c)
        return cmp.ConductancePair(fam.geometric_integers(size, b), fam.geometric_integers(size, c)), spec
    if kind == "horizontally_connected_tree":
        spec = fam.FamilySpec(kind, size, level_weights=tuple(args.levels or ()))
        return cmp.ConductancePair(fam.binary_tree(size), fam.generate(spec)), spec
    raise InputError("pair families: geometric_integers (--base B C) or horizontally_connected_tree")


def _vertex(net: Network, name: str | None, flag: str) -> str:
    if name is None:
        raise InputError(f"{flag} is required")
    if name not in net.index:
        raise InputError(f"{flag}: unknown vertex {name!r}")
    return name


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


# -- commands -------------------------------------------------------------------


def cmd_describe(args) -> list[Report]:
    net, _ = load_network(args)
    problems = validate(net)
    rep = Report("network", ["quantity", "value"])
    degs = [degree(net, x) for x in net.vertices] if not problems else []
    rep.rows += [
        ["vertices", len(net.vertices)],
        ["edges", len(net.conductances)],
        ["origin", net.origin],
        ["connected", "yes" if len(components(net)) == 1 else "no"],
    ]
    if degs:
        rep.rows += [["min degree", min(degs)], ["max degree", max(degs)]]
    if net.conductances and not problems:
        crit = cmp.lower_bound_criterion(net)
        rep.rows += [
            ["min conductance (epsilon)", crit.epsilon],
            ["embedding bound 1/sqrt(epsilon)", crit.bound],
            ["measured norm into unit conductances", crit.measured_norm],
        ]
    for p in problems:
        rep.rows.append(["violation", p])
    rep.failed = bool(problems)
    return [rep]


def cmd_generate(args) -> list[Report]:
    net, _ = load_network(args)
    text = dump_network(net)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return []


def _require_valid(net: Network) -> None:
    problems = validate(net)
    if problems:
        raise InputError("invalid network: " + "; ".join(problems))


def cmd_resistance(args) -> list[Report]:
    net, _ = load_network(args)
    _require_valid(net)
    x, y = _vertex(net, args.x, "--x"), _vertex(net, args.y, "--y")
    return [Report("", ["x", "y", "resistance"], [[x, y, es.effective_resistance(net, x, y)]])]


def cmd_dipole(args) -> list[Report]:
    net, _ = load_network(args)
    _require_valid(net)
    x, y = _vertex(net, args.x, "--x"), _vertex(net, args.y, "--y")
    v = es.dipole(net, x, y)
    return [Report(f"dipole {x} -> {y}", ["vertex", "value"], [[k, val] for k, val in v.as_dict().items()])]


def _pair_function(net: Network, args) -> tuple[str, str, VertexFunction]:
    x = _vertex(net, args.x, "--x")
    y = _vertex(net, args.y if args.y is not None else net.origin, "--y")
    kernel = es.energy_kernel(net)
    return x, y, kernel[x] - kernel[y]


def cmd_moments(args) -> list[Report]:
    net, _ = load_network(args)
    _require_valid(net)
    x, y, u = _pair_function(net, args)
    measure = sp.spectral_measure(net, u)
    tol = _tol(args, 1e-7)
    expected = {
        0: es.effective_resistance(net, x, y),
        1: 2.0 - 2.0 * (x == y),
        2: degree(net, x) + 2 * net.conductance(x, y) + degree(net, y) if x != y else 0.0,
    }
    moments = Report(f"moments of u = v_{x} - v_{y}", ["k", "m_k", "spectral", "closed_form", "status"])
    for k in range(args.kmax + 1):
        direct = sp.moment(net, u, k)
        spectral = measure.moment(k)
        ok = abs(direct - spectral) <= tol * max(1.0, abs(direct))
        closed = expected.get(k, "")
        if k in expected:
            ok &= abs(direct - expected[k]) <= tol * max(1.0, abs(direct))
        moments.rows.append([k, direct, spectral, closed, "pass" if ok else "FAIL"])
        moments.failed |= not ok
    atoms = Report("spectral measure", ["lambda", "weight"], [list(a) for a in measure.atoms])
    return [moments, atoms]


def cmd_walk(args) -> list[Report]:
    net, _ = load_network(args)
    _require_valid(net)
    x = _vertex(net, args.x, "--x")
    o = net.origin
    if x == o:
        raise InputError("--x must differ from the origin")
    rec = walks.reciprocity_report(net, x, o)
    rep = Report(f"escape {x} -> {o}", ["method", "probability", "standard_error", "trials", "seed"])
    rep.rows.append(["exact", rec.lhs, "", "", ""])
    rep.rows.append(["1/(c(x)R(x,o))", rec.rhs, "", "", ""])
    rep.failed = rec.gap > _tol(args, 1e-9)
    if args.trials:
        res = walks.escape_probability_mc(net, x, o, args.trials, args.seed)
        rep.rows.append(["monte_carlo", res.probability, res.standard_error, res.trials, res.seed])
        if res.censored:
            rep.rows.append(["censored", res.censored, "", "", ""])
    return [rep]


def cmd_compare(args) -> list[Report]:
    pair, _ = load_pair(args)
    problems = cmp.validate_pair(pair)
    if problems:
        raise InputError("invalid pair: " + "; ".join(problems))
    tol = _tol(args, 1e-8)
    rep = Report("comparison checks", ["check", "value", "limit", "status"])
    norm = cmp.embedding_norm(pair)
    rep.check("embedding norm ||I||", norm, f"<= 1 + {_tol(args, 1e-9):g}", norm <= 1 + _tol(args, 1e-9))
    conj = cmp.conjugation_identity_residual(pair)
    rep.check("conjugation Lap_b = I Lap_c I*", conj, f"<= {tol:g}", conj <= tol)

    rng = np.random.default_rng(args.seed)
    m = cmp.cross_adjoint(pair)
    n = len(pair.vertices)
    resid = max(
        cmp.cross_adjoint_residual(
            pair, VertexFunction(pair.c, rng.uniform(-1, 1, n)), VertexFunction(pair.c, rng.uniform(-1, 1, n)), m
        )
        for _ in range(20)
    )
    rep.check("cross-adjoint relation", resid, f"<= {tol:g}", resid <= tol)

    kernel_b, kernel_c = es.energy_kernel(pair.b), es.energy_kernel(pair.c)
    kern_gap = dirac_gap = 0.0
    m1 = 0.0
    m2 = math.inf
    for x in pair.vertices:
        if x == pair.origin:
            continue
        kern_gap = max(kern_gap, cmp.adjoint_inclusion(pair, kernel_b[x]).max_abs_diff(kernel_c[x]))
        dirac = VertexFunction(pair.c, np.eye(n)[pair.c.index[x]] - np.eye(n)[pair.c.origin_index])
        lhs = cmp.apply_cross_adjoint(pair, kernel_c[x], m)
        dirac_gap = max(dirac_gap, lhs.max_abs_diff(cmp.adjoint_inclusion(pair, dirac)))
        gaps = sp.monotonicity_check(pair, kernel_b[x])
        m1 = max(m1, abs(gaps.m1_gap))
        m2 = min(m2, gaps.m2_gap)
    rep.check("I* v_x^(b) = v_x^(c)", kern_gap, f"<= {tol:g}", kern_gap <= tol)
    rep.check("Lap^(b,c) v_x^(c) = I*(d_x - d_o)", dirac_gap, f"<= {tol:g}", dirac_gap <= tol)
    rep.check("max |m1 gap| over v_x^(b)", m1, f"<= {tol:g}", m1 <= tol)
    rep.check("min m2 gap over v_x^(b)", m2, f">= -{_tol(args, 1e-9):g}", m2 >= -_tol(args, 1e-9))
    lam_b, lam_c = sp.operator_norm(pair.b), sp.operator_norm(pair.c)
    rep.check("lambda_max(b) <= lambda_max(c)", lam_c - lam_b, f">= -{_tol(args, 1e-9):g}", lam_b <= lam_c + _tol(args, 1e-9))
    return [rep]


def cmd_invariant(args) -> list[Report]:
    pair, spec = load_pair(args)
    problems = cmp.validate_pair(pair)
    if problems:
        raise InputError("invalid pair: " + "; ".join(problems))
    if args.interior:
        interior = args.interior
    elif spec is not None:
        interior = fam.natural_interior(spec)
    else:
        raise InputError("pair files need --interior")
    try:
        inv = cmp.harmonic_transfer_invariant(pair, interior)
    except NetworkError as exc:
        raise InputError(str(exc)) from None
    rep = Report("harmonic transfer invariant", ["quantity", "value", "limit", "status"])
    rep.rows.append(["K", inv.K, "", ""])
    if spec is not None and spec.kind == "geometric_integers":
        b, c = args.base
        closed = math.sqrt((b - 1.0) / (c - 1.0))
        rep.rows.append(["closed form sqrt((b-1)/(c-1))", closed, "", ""])
        delta = abs(inv.K - closed)
        rep.check("|K - closed form|", delta, f"<= {_tol(args, 1e-2):g}", delta <= _tol(args, 1e-2))
    rep.check("alignment of I* h_b with h_c", inv.alignment, ">= 0.999", inv.alignment >= 0.999)
    return [rep]


COMMANDS = {
    "describe": cmd_describe,
    "generate": cmd_generate,
    "resistance": cmd_resistance,
    "dipole": cmd_dipole,
    "moments": cmd_moments,
    "walk": cmd_walk,
    "compare": cmd_compare,
    "invariant": cmd_invariant,
}


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="energynet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="network JSON file (pair file for compare/invariant)")
    common.add_argument("--family", help="generate the network: " + ", ".join(sorted(FAMILY_ALIASES)))
    common.add_argument("--n", type=int, help="family size (path edges, vertex count, truncation N)")
    common.add_argument("--depth", type=int, help="tree depth")
    common.add_argument("--base", type=float, nargs="+", help="geometric base c (pairs: B C)")
    common.add_argument("--levels", type=_csv_floats, help="comma-separated level weights c_1,...")
    common.add_argument("--x")
    common.add_argument("--y")
    common.add_argument("--kmax", type=int, default=4)
    common.add_argument("--trials", type=int)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--interior", type=lambda s: [t for t in s.split(",") if t])
    common.add_argument("--format", choices=("table", "csv"), default="table")
    common.add_argument("--tol", type=float, help="override every check tolerance")
    common.add_argument("--out", help="write output to this file instead of stdout")
    for name, fn in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=(fn.__doc__ or name).splitlines()[0])
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        reports = COMMANDS[args.command](args)
    except (InputError, FormatError, NetworkError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "generate":
        return EXIT_OK
    text = render(reports, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_FAIL if any(r.failed for r in reports) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
