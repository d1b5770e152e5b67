"""Command line entry point: ``slicekit verify | eval | convergence``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
import warnings
from dataclasses import replace

import numpy as np

from .algebra import H, Quaternion, clifford
from .config import FAMILY_NAMES, SUITES, RunConfig, format_config, parse_config
from .errors import ConfigError, SliceKitError

CSV_HEADER = ("suite", "case", "quantity", "residual", "tolerance", "nodes", "runtime_ms", "pass")

__all__ = ["RunConfig", "parse_config", "format_config", "emit_reports", "exit_code", "main"]


def _row(rep, timing=True):
    return (
        rep.suite,
        rep.case,
        rep.quantity,
        f"{rep.residual:.6e}",
        f"{rep.tolerance:.1e}",
        str(rep.nodes),
        f"{rep.runtime_ms:.1f}" if timing else "0",
        "true" if rep.passed else "false",
    )


def emit_reports(reports, format="csv", timing=True) -> str:
    """Render reports as CSV (fixed header) or as an aligned text table."""
    rows = [_row(r, timing) for r in reports]
    if format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        w.writerows(rows)
        return buf.getvalue()
    if format != "text":
        raise ConfigError(f"unknown report format {format!r}")
    table = [CSV_HEADER] + rows
    widths = [max(len(r[i]) for r in table) for i in range(len(CSV_HEADER))]
    lines = ["  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in table]
    n_fail = sum(not r.passed for r in reports)
    lines.append(f"{len(reports)} checks, {n_fail} failed")
    return "\n".join(lines) + "\n"


def exit_code(reports) -> int:
    return 0 if all(r.passed for r in reports) else 1


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    else:
        cfg = RunConfig()
    if getattr(args, "suite", None):
        for s in args.suite:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}")
        cfg = replace(cfg, suites=tuple(args.suite))
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "out", None):
        cfg = replace(cfg, output=args.out)
    if getattr(args, "no_timing", False):
        cfg = replace(cfg, timing=False)
    return cfg


# -- subcommands ------------------------------------------------------------------


def cmd_verify(args) -> int:
    from .theorems import run_suite

    cfg = _load_config(args)
    if args.print_config:
        sys.stdout.write(format_config(cfg))
        return 0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        reports = run_suite(cfg)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _write(emit_reports(reports, args.format, cfg.timing), cfg.output)
    return exit_code(reports)


def _test_function(name, alg):
    from .operators import JetFn, jet_product
    from .slice import PowerSeriesFn, wrap

    ident = JetFn.identity(alg)
    if name == "id":
        return ident
    if name == "conj":
        return JetFn.conjugate(alg)
    if name == "square":
        return jet_product(ident, ident)
    if name == "cube":
        return jet_product(ident, jet_product(ident, ident))
    if name.startswith("x") and name[1:].isdigit():
        return JetFn.coordinate(alg, int(name[1:]))
    if name.startswith("series:"):
        coeffs = []
        for part in name[len("series:"):].split(";"):
            vals = np.array([float(v) for v in part.split(",")])
            if vals.size == 1:
                vals = np.concatenate([vals, np.zeros(alg.dim - 1)])
            if vals.size != alg.dim:
                raise ConfigError(f"series coefficient needs 1 or {alg.dim} numbers")
            coeffs.append(wrap(alg, vals))
        return JetFn.from_power_series(PowerSeriesFn(tuple(coeffs)))
    raise ConfigError(f"unknown function {name!r}")


def _map_for(name, n, cfg):
    from . import diffeo

    if n == 3:
        params = {"affine": {"r": cfg.r, "s": cfg.s}, "power": {"alpha": cfg.alpha}, "rotation": {"c": cfg.c}}
        return diffeo.family(name, **params.get(name, {}))
    makers = {"identity": diffeo.identity, "affine": diffeo.affine, "power": diffeo.power,
              "exp": diffeo.exp_map, "sin": diffeo.sin_map, "log": diffeo.log_map}
    if name not in makers:
        raise ConfigError(f"family {name!r} is only available for n = 3")
    return makers[name](n=n)


def cmd_eval(args) -> int:
    from . import operators as ops

    cfg = _load_config(args)
    x = np.array([float(v) for v in args.x.split(",")])
    n = len(x) - 1
    if n < 1:
        raise ConfigError("point needs at least two coordinates")
    alg = ops.algebra_for(n)
    f = _test_function(args.f, alg)
    if args.fd:
        f = f.as_fd(ops.FDConfig(cfg.fd_step, cfg.richardson))
    a = _map_for(args.a, n, cfg)
    table = {
        "G": lambda: ops.apply_G(f, x),
        "Gr": lambda: ops.apply_G_r(f, x),
        "Ha": lambda: ops.apply_H_a(a, f, x),
        "Har": lambda: ops.apply_H_ar(a, f, x),
        "Du": lambda: ops.apply_D_u(a, f, x),
        "value": lambda: f.value(x),
    }
    out = np.asarray(table[args.op]())
    print(" ".join(f"{v:.17g}" for v in out.ravel()))
    return 0


def cmd_convergence(args) -> int:
    from . import formulas as F
    from .quadrature import BallDomain
    from .theorems import _generic_pair, _points_for, _rel, ball_for

    cfg = _load_config(args)
    a = _map_for(args.a, 3, cfg)
    domain = ball_for(a, BallDomain(cfg.domain_center, cfg.domain_radius))
    f, g = _generic_pair()
    base = F.Nodes(tuple(cfg.surface_nodes), cfg.radial_nodes)
    levels = []
    nodes = base
    for _ in range(args.levels - 1):
        nodes = nodes.coarse()
    for k in range(args.levels):
        levels.append(nodes)
        nodes = F.Nodes(tuple(2 * v for v in nodes.angular), 2 * nodes.radial)
    rows = []
    prev = None
    xi, _ = _points_for(domain)
    for nd in levels:
        st = F.Setting(a, domain, f, g, nd)
        if args.kind == "stokes":
            bnd, vol = F.stokes(args.variant, st)
            err = _rel(bnd - vol, np.sqrt(np.sum(bnd ** 2)))
        else:
            lhs, target, _ = F.borel_pompeiu(args.variant, st, xi)
            err = _rel(lhs - target, np.sqrt(np.sum(target ** 2)))
        ratio = "" if prev is None else f"{prev / max(err, 1e-300):.3g}"
        rows.append(("x".join(map(str, nd.angular)), str(nd.radial), str(nd.count()), f"{err:.6e}", ratio))
        prev = err
    header = ("angular", "radial", "nodes", "error", "coarse_over_fine")
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        table = [header] + rows
        widths = [max(len(r[i]) for r in table) for i in range(len(header))]
        text = "\n".join("  ".join(c.ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in table) + "\n"
    _write(text, cfg.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slicekit", description="Numerical checks for slice monogenic operator identities.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="configuration file (key = value lines)")
        sp.add_argument("--seed", type=lambda s: int(s, 0), help="random seed (unsigned 64-bit)")
        sp.add_argument("--out", help="write output to this path instead of stdout")
        sp.add_argument("--format", choices=("text", "csv"), default="text")

    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("--suite", action="append", help="suite id (repeatable); default: all configured")
    v.add_argument("--no-timing", action="store_true", help="report runtime_ms as 0 for reproducible output")
    v.add_argument("--print-config", action="store_true", help="print the effective configuration and exit")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="apply one operator at one point")
    common(e)
    e.add_argument("--op", choices=("G", "Gr", "Ha", "Har", "Du", "value"), default="G")
    e.add_argument("--f", default="square", help="id, conj, square, cube, x<k> or series:c0;c1;...")
    e.add_argument("--a", choices=FAMILY_NAMES, default="identity")
    e.add_argument("--x", required=True, help="comma-separated paravector coordinates")
    e.add_argument("--fd", action="store_true", help="use finite-difference derivatives")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("convergence", help="error table under node refinement")
    common(c)
    c.add_argument("--kind", choices=("borel_pompeiu", "stokes"), default="borel_pompeiu")
    c.add_argument("--variant", choices=("G", "Ha", "Du"), default="G")
    c.add_argument("--a", choices=FAMILY_NAMES, default="identity")
    c.add_argument("--levels", type=int, default=3)
    c.set_defaults(func=cmd_convergence)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        return args.func(args)
    except (SliceKitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
