"""Command-line entry point: ``fractal-langevin <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, analysis, io, validation
from .curve import CurveSpec
from .errors import FractalError, SchemaError
from .fcalculus import build_staircase, fractal_fourier, staircase_eval
from .langevin import map_to_curve, simulate_ensemble
from .noise import NoiseModel, empirical_char_function, sample_stable_increment, stream
from .pipeline import load_config, run_pipeline


def parse_grid(text):
    """``"kmin:kmax:n"`` -> evenly spaced array."""
    try:
        lo, hi, n = text.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like kmin:kmax:n, got {text!r}")


def parse_curve(text):
    """``motif[:depth]`` where motif is koch, line or an IFS JSON path."""
    motif, sep, depth = text.rpartition(":")
    if sep and depth.isdigit():
        return CurveSpec(motif, int(depth))
    return CurveSpec(text, 8)


def _emit_json(obj, path):
    if path is None or path == "-":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        with io.atomic_write(path) as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)


def cmd_curve(args):
    curve = CurveSpec(args.motif, args.depth).build()
    if args.emit:
        io.write_polyline_csv(curve, args.emit)
    print(f"{curve.name}: depth {curve.depth}, {curve.n_vertices} vertices, alpha {curve.alpha:.15g}")
    return 0


def cmd_staircase(args):
    spec = args.curve
    table = build_staircase(spec.build(), args.origin)
    if args.emit:
        io.write_staircase_csv(table, args.emit)
    print(f"total mass {table.total_mass:.17g}, J range [{table.J_min:.6g}, {table.J_max:.6g}]")
    return 0


def cmd_fourier(args):
    table = build_staircase(args.curve.build(), args.origin)
    if args.function == "one":
        def f(u):
            return np.ones_like(u)
    else:
        center, width = table.J_min + table.total_mass / 2, table.total_mass / 20

        def f(u):
            return np.exp(-0.5 * ((staircase_eval(table, u) - center) / width) ** 2)
    v = args.grid
    ft = fractal_fourier(f, v, table)
    rows = zip(v, ft.real, ft.imag)
    if args.emit:
        io.write_rows(args.emit, ["v", "re", "im"], rows)
    else:
        for r in rows:
            print(",".join(io.fmt(x) for x in r))
    return 0


def cmd_noise_check(args):
    model = NoiseModel(args.mu, args.D)
    seed = 0 if args.seed is None else args.seed
    xi = sample_stable_increment(model, args.dt, stream(seed), args.n)
    if args.ecf is not None:
        ecf = empirical_char_function(xi, args.ecf)
        rows = zip(ecf.k, ecf.value.real, ecf.value.imag, ecf.se)
        header = ["k", "re", "im", "se"]
    else:
        rows = ((x,) for x in xi)
        header = ["xi"]
    if args.emit:
        io.write_rows(args.emit, header, rows)
    else:
        print(",".join(header))
        for r in rows:
            print(",".join(io.fmt(x) for x in r))
    return 0


def _job(args):
    job = load_config(args.config)
    if args.seed is not None:
        job = replace(job, run=replace(job.run, seed=args.seed))
    return job


def cmd_simulate(args):
    job = _job(args)
    ens = simulate_ensemble(job.run, threads=args.threads)
    fmt = args.format if args.format in ("csv", "bin") else None
    if job.run.curve is not None and (fmt == "csv" or str(args.out).endswith(".csv")):
        ens = map_to_curve(ens, build_staircase(job.run.curve.build(), job.run.curve.origin))
    io.write_ensemble(ens, args.out, fmt)
    print(f"wrote {ens.n_walkers} walkers x {len(ens.times)} times to {args.out}")
    return 0


def _analysis_params(args, ens):
    mu, D = args.mu, args.D
    if args.config:
        job = load_config(args.config)
        mu = job.run.noise.mu if mu is None else mu
        D = job.run.noise.D if D is None else D
    if mu is None or D is None:
        raise SchemaError("analysis needs --mu and --D (or --config)")
    t = float(ens.times[-1]) if args.t is None else args.t
    return mu, D, t


def cmd_analyze(args):
    ens = io.read_ensemble(args.ensemble)
    mu, D, t = _analysis_params(args, ens)
    snap = ens.snapshot(t)
    if args.test == "ks":
        rep = analysis.ks_gaussian_test(snap, D, t)
    elif args.test == "ecf":
        rep = analysis.ecf_distance(snap, mu, D, t, args.grid)
    elif args.test == "moments":
        slope = analysis.fractional_moment_scaling(ens, args.q, mu=mu)
        dev = abs(slope - args.q / mu)
        rep = analysis.FitReport(f"moment_exponent_q{args.q:g}", dev, 0.05, dev <= 0.05, ens.n_walkers)
    else:
        rep = None
    if args.emit_density or args.test == "density":
        io.write_density_csv(snap, mu, D, t, args.emit_density or "density.csv")
    if rep is None:
        return 0
    _emit_json(rep.to_dict(), args.emit)
    if not rep.passed:
        print(f"{rep.statistic_name} failed: {rep.value:.6g} > {rep.critical_value:.6g}", file=sys.stderr)
    return 0 if rep.passed else 1


def cmd_emit(args):
    ens = io.read_ensemble(args.ensemble)
    mu, D = args.mu, args.D
    if args.config:
        job = load_config(args.config)
        mu = job.run.noise.mu if mu is None else mu
        D = job.run.noise.D if D is None else D
        if args.kind == "trajectory2d" and job.run.curve is not None:
            ens = map_to_curve(ens, build_staircase(job.run.curve.build(), job.run.curve.origin))
    io.emit_plot_data(ens, args.kind, args.out, mu=mu, D=D, t=args.t, k_grid=args.grid,
                      walker=args.walker)
    return 0


def cmd_run(args):
    out = args.out or Path(Path(args.config).stem + "-out")
    manifest = run_pipeline(args.config, out, threads=args.threads)
    print(f"outputs in {out}; config hash {manifest.config_hash[:12]}")
    if not manifest.passed:
        failed = [f"{k} ({r['value']:.6g} > {r['critical_value_or_tolerance']:.6g})"
                  for k, r in manifest.reports.items() if not r["pass"]]
        print("failed reports: " + ", ".join(failed), file=sys.stderr)
        return 1
    return 0


def cmd_validate(args):
    numbers = {int(x) for x in args.only.split(",")} if args.only else None
    results = validation.run_all(numbers)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--threads", type=int, default=1, help="worker threads (speed only)")
    common.add_argument("--format", choices=["csv", "bin", "json"], default=None)

    # global flags are accepted after every subcommand
    p = argparse.ArgumentParser(prog="fractal-langevin",
                                description="Langevin motion on fractal curves")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("curve", parents=[common], help="build a curve and emit its polyline")
    s.add_argument("--motif", default="koch", help="koch, line or an IFS JSON file")
    s.add_argument("--depth", type=int, default=4)
    s.add_argument("--emit", help="polyline CSV (u, x, y)")
    s.set_defaults(func=cmd_curve)

    s = sub.add_parser("staircase", parents=[common], help="tabulate the staircase function")
    s.add_argument("--curve", type=parse_curve, default=CurveSpec("koch", 8), help="motif:depth")
    s.add_argument("--origin", type=float, default=None)
    s.add_argument("--emit", help="staircase CSV (u, J)")
    s.set_defaults(func=cmd_staircase)

    s = sub.add_parser("fourier", parents=[common], help="fractal Fourier transform of a test function")
    s.add_argument("--curve", type=parse_curve, default=CurveSpec("koch", 8))
    s.add_argument("--origin", type=float, default=None)
    s.add_argument("--grid", type=parse_grid, default=parse_grid("-20:20:81"))
    s.add_argument("--function", choices=["one", "gauss"], default="one")
    s.add_argument("--emit", help="CSV (v, re, im)")
    s.set_defaults(func=cmd_fourier)

    s = sub.add_parser("noise-check", parents=[common], help="sample stable increments")
    s.add_argument("--mu", type=float, required=True)
    s.add_argument("--D", type=float, required=True)
    s.add_argument("--dt", type=float, default=1.0)
    s.add_argument("--n", type=int, default=10_000)
    s.add_argument("--ecf", type=parse_grid, default=None, help="kmin:kmax:n")
    s.add_argument("--emit")
    s.set_defaults(func=cmd_noise_check)

    s = sub.add_parser("simulate", parents=[common], help="run an ensemble from a config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True, help="ensemble.bin or ensemble.csv")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("analyze", parents=[common], help="validate an ensemble file")
    s.add_argument("--ensemble", required=True)
    s.add_argument("--test", choices=["ks", "ecf", "moments", "density"], default="ks")
    s.add_argument("--config")
    s.add_argument("--mu", type=float)
    s.add_argument("--D", type=float)
    s.add_argument("--t", type=float)
    s.add_argument("--q", type=float, default=0.5)
    s.add_argument("--grid", type=parse_grid, default=analysis.DEFAULT_K_GRID)
    s.add_argument("--emit", help="report JSON (default stdout)")
    s.add_argument("--emit-density", help="density CSV")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("emit", parents=[common], help="write plot-ready CSV")
    s.add_argument("--ensemble", required=True)
    s.add_argument("--kind", choices=["density", "ecf", "msd", "trajectory2d"], required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--config")
    s.add_argument("--mu", type=float)
    s.add_argument("--D", type=float)
    s.add_argument("--t", type=float)
    s.add_argument("--walker", type=int, default=0)
    s.add_argument("--grid", type=parse_grid, default=None)
    s.set_defaults(func=cmd_emit)

    s = sub.add_parser("run", parents=[common], help="full pipeline with manifest")
    s.add_argument("--config", required=True)
    s.add_argument("--out", help="output directory")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("validate", parents=[common], help="run the acceptance criteria")
    s.add_argument("--only", help="comma-separated criterion numbers")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error at {exc.path or '<root>'} ({exc.pointer or '/'}): {exc.detail}",
              file=sys.stderr)
        return 2
    except (FractalError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
