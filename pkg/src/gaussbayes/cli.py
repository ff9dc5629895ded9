"""Command-line front end.

Subcommands::

    gaussbayes verify-rela [--dim 60] [--tol 1e-6] [--grid-N ...] [--grid-zeta ...] [--out DIR]
    gaussbayes risk --config PATH [--seed U64] [--workers N] [--out DIR]
    gaussbayes sweep --config PATH [--tau2-grid SPEC] [--out DIR]
    gaussbayes selftest [--fast] [--workers N]

Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import os
import sys

import numpy as np

from . import risk, selftest
from .config import ConfigError, config_to_dict, content_hash, load_config
from .fock_linalg import TruncationError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Round-trip decimal text for a real number (17 significant digits)."""
    return format(float(x), ".17g")


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_tau2_grid(spec: str) -> np.ndarray:
    """``geom:START:STOP:COUNT``, ``lin:START:STOP:COUNT`` or a comma-separated list."""
    try:
        if spec.startswith(("geom:", "lin:")):
            kind, start, stop, count = spec.split(":")
            fn = np.geomspace if kind == "geom" else np.linspace
            return fn(float(start), float(stop), int(count))
        return np.array([float(v) for v in spec.split(",")])
    except ValueError as exc:
        raise UsageError(f"bad tau2 grid {spec!r}: {exc}") from exc


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out, command, inputs, outputs):
    manifest = {
        "command": command,
        "inputs": inputs,
        "config_hash": content_hash(inputs),
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": sorted(outputs),
    }
    _write_json(os.path.join(out, f"{command}.manifest.json"), manifest)


def cmd_verify_rela(args) -> int:
    if args.dim < 40:
        raise UsageError(f"--dim must be at least 40, got {args.dim}")
    Ns = [float(v) for v in args.grid_N.split(",")]
    zetas = [parse_complex(v) for v in args.grid_zeta.split(",")]
    try:
        rows = selftest.rela_grid_deviations(args.dim, Ns, zetas)
    except TruncationError as exc:
        print(f"verify-rela: FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL
    inputs = {"dim": args.dim, "tol": args.tol, "grid_N": Ns, "grid_zeta": [[z.real, z.imag] for z in zetas]}
    chash = content_hash(inputs)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "verify_rela.csv")
    _write_csv(path, ["zeta_re", "zeta_im", "N", "zeta2_re", "zeta2_im", "M", "closed", "numeric", "abs_dev", "config_hash"],
               [(z.real, z.imag, N, zp.real, zp.imag, M, c, num, d, chash) for z, N, zp, M, c, num, d in rows])
    _write_manifest(args.out, "verify-rela", inputs, [path])
    worst = max(rows, key=lambda r: r[-1])
    status = "PASS" if worst[-1] <= args.tol else "FAIL"
    print(f"verify-rela: {status}: max |closed - numeric| = {worst[-1]:.3e} (tol {args.tol:g}) "
          f"at zeta={worst[0]}, N={worst[1]}, zeta'={worst[2]}, M={worst[3]}")
    return EXIT_OK if status == "PASS" else EXIT_FAIL


def _load(args):
    try:
        return load_config(args.config, seed=args.seed)
    except (ConfigError, OSError) as exc:
        raise UsageError(f"config error: {exc}") from exc


def _opt(x):
    return None if x is None else float(x)


def cmd_risk(args) -> int:
    cfg = _load(args)
    report = risk.risk_report(cfg, workers=args.workers)
    inputs = config_to_dict(cfg)
    chash = content_hash(inputs)
    data = {
        "seed": cfg.seed,
        "config_hash": chash,
        "r_plugin_closed": report.r_plugin_closed,
        "r_bayes_closed": report.r_bayes_closed,
        "r_star": _opt(report.r_star),
        "inequality_ok": report.inequality_ok,
    }
    if report.r_plugin_mc is not None:
        data.update(
            r_plugin_mc=report.r_plugin_mc, r_plugin_stderr=report.r_plugin_stderr,
            r_bayes_mc=report.r_bayes_mc, r_bayes_stderr=report.r_bayes_stderr,
            numeric_check_deviation=_opt(report.numeric_check_deviation),
        )
    os.makedirs(args.out, exist_ok=True)
    jpath = os.path.join(args.out, "risk.json")
    cpath = os.path.join(args.out, "risk.csv")
    _write_json(jpath, data)
    keys = ["seed", "config_hash", "r_plugin_closed", "r_bayes_closed", "r_star", "r_plugin_mc", "r_plugin_stderr",
            "r_bayes_mc", "r_bayes_stderr", "inequality_ok"]
    row = []
    for k in keys:
        v = data.get(k)
        row.append("" if v is None else str(v).lower() if isinstance(v, bool) else v)
    _write_csv(cpath, keys, [row])
    _write_manifest(args.out, "risk", inputs, [jpath, cpath])
    print(json.dumps(data, indent=2, sort_keys=True))
    return EXIT_OK if report.inequality_ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    cfg = _load(args)
    grid = parse_tau2_grid(args.tau2_grid)
    try:
        table = risk.risk_curve(cfg.N, cfg.n, cfg.m, grid, cfg.prior.xi)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    inputs = {"config": config_to_dict(cfg), "tau2_grid": [float(t) for t in grid]}
    chash = content_hash(inputs)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "sweep.csv")
    _write_csv(path, ["tau2", "r_plugin", "r_bayes", "gap", "seed", "config_hash"],
               [(*map(float, r), cfg.seed, chash) for r in table])
    _write_manifest(args.out, "sweep", inputs, [path])
    ok = bool(np.all(table[:, 3] > 0))
    print(f"sweep: {len(table)} rows written to {path}; gap > 0 everywhere: {ok}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_selftest(args) -> int:
    results = selftest.run_selftest(fast=args.fast, workers=args.workers)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"[{'PASS' if r.ok else 'FAIL'}] {r.name:<{width}}  {r.seconds:6.1f}s  {r.detail}")
    print("\ncoverage:")
    for r in results:
        print(f"  {r.name:<{width}}  -> {r.anchor}")
    failed = [r.name for r in results if not r.ok]
    if failed:
        print(f"\nselftest FAILED: {', '.join(failed)}")
        return EXIT_FAIL
    print(f"\nselftest passed ({len(results)} checks)")
    return EXIT_OK


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _u64(text):
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussbayes", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-rela", help="closed vs matrix relative entropy on a grid")
    p.add_argument("--dim", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--grid-N", default="0.5,1,2")
    p.add_argument("--grid-zeta", default="0,1,0.5+0.5j")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_verify_rela)

    for name, func, help_ in (("risk", cmd_risk, "closed-form and Monte Carlo risks"),
                              ("sweep", cmd_sweep, "risks over a tau2 grid")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=_u64, default=None)
        p.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1)
        p.add_argument("--out", default=".")
        if name == "sweep":
            p.add_argument("--tau2-grid", default="geom:1e-3:1e9:49")
        p.set_defaults(func=func)

    p = sub.add_parser("selftest", help="run the oracle suite")
    p.add_argument("--fast", action="store_true", help="skip the two-mode quadrature checks")
    p.add_argument("--workers", type=_positive_int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
