"""Acceptance criteria as runnable checks.

Each ``criterion_N`` returns a :class:`CriterionResult`.  Tolerances, sizes
and seeds are fixed here; the test suite and the ``validate`` command both
call these functions, so they always agree.
"""

from __future__ import annotations

import filecmp
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, io
from .curve import build_koch, build_line
from .fcalculus import (
    build_staircase,
    fractal_fourier,
    fractal_fourier_inverse,
    falpha_integral,
    mass,
    staircase_eval,
)
from .langevin import RunConfig, map_to_curve, simulate_ensemble
from .noise import NoiseModel


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    time_limit: float = math.inf

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d}. {self.title}: {self.detail} ({self.seconds:.2f} s)"


def _timed(number, title, time_limit=math.inf):
    def wrap(fn):
        def run(**kw):
            t0 = time.perf_counter()
            ok, detail = fn(**kw)
            dt = time.perf_counter() - t0
            if dt >= time_limit:
                detail += f"; runtime {dt:.1f} s over the {time_limit:g} s limit"
            return CriterionResult(number, title, bool(ok and dt < time_limit), detail, dt, time_limit)
        run.number = number
        run.title = title
        return run
    return wrap


@_timed(1, "Koch mass equals 1/Gamma(alpha+1)", 5.0)
def criterion_1(depth=8):
    curve = build_koch(depth)
    est = mass(curve, 0.0, 1.0)
    target = 1.0 / math.gamma(math.log(4) / math.log(3) + 1.0)
    rel = abs(est.value - target) / target
    return rel < 5e-3, f"depth {depth}: mass {est.value:.10f}, target {target:.10f}, rel err {rel:.2e} (tol 5e-3)"


@_timed(2, "staircase symmetry and mass additivity", 5.0)
def criterion_2(depth=10):
    curve = build_koch(depth)
    table = build_staircase(curve, 0.0)
    T = table.total_mass
    sym = abs(staircase_eval(table, 0.5) - T / 2) / (T / 2)
    triples = [(0, 0.25, 1), (0.25, 0.5, 0.75), (0, 1 / 16, 0.25), (3 / 16, 0.5, 15 / 16),
               (1 / 64, 21 / 64, 63 / 64), (0.5, 0.75, 1)]
    worst = 0.0
    for a, b, c in triples:
        lhs = mass(curve, a, b).value + mass(curve, b, c).value
        rhs = mass(curve, a, c).value
        worst = max(worst, abs(lhs - rhs) / rhs)
    ok = sym < 1e-10 and worst < 1e-10
    return ok, f"|J(1/2)-T/2|/(T/2) = {sym:.1e}, worst additivity rel err {worst:.1e} (tol 1e-10)"


@_timed(3, "F-integral of J^m equals T^(m+1)/(m+1)")
def criterion_3(depth=10):
    table = build_staircase(build_koch(depth), 0.0)
    T = table.total_mass
    errs = []
    for m in (0, 1, 2):
        val = falpha_integral(lambda u, m=m: staircase_eval(table, u) ** m, 0.0, 1.0, table)
        errs.append(abs(val - T ** (m + 1) / (m + 1)) / (T ** (m + 1) / (m + 1)))
    return max(errs) < 1e-3, "rel errs " + ", ".join(f"m={m}: {e:.1e}" for m, e in enumerate(errs)) + " (tol 1e-3)"


def _gaussian_check(ens, D, t):
    final = ens.J[-1]
    ks = analysis.ks_gaussian_test(final, D, t)
    var_rel = abs(final.var() / (2 * D * t) - 1.0)
    ok = ks.passed and var_rel < 0.02
    return ok, (f"KS {ks.value:.5f} vs critical {ks.critical_value:.5f}, "
                f"var/(2Dt) - 1 = {var_rel:+.4f} (tol 0.02)")


@_timed(4, "Gaussian solution for mu = 2", 60.0)
def criterion_4(n_walkers=100_000, seed=4):
    cfg = RunConfig(NoiseModel(2.0, 0.5), 1.0, 1000, n_walkers, seed)
    return _gaussian_check(simulate_ensemble(cfg), 0.5, 1.0)


def _ecf_check(snapshot, mu, D, t):
    rep = analysis.ecf_distance(snapshot, mu, D, t, analysis.DEFAULT_K_GRID)
    return rep, f"t={t:g}: max |ECF-CF| {rep.value:.5f} vs {rep.critical_value:.5f}"


@_timed(5, "Cauchy case mu = 1 matches exp(-t|k|)", 60.0)
def criterion_5(n_walkers=100_000, seed=5):
    cfg = RunConfig(NoiseModel(1.0, 1.0), 1.0, 1000, n_walkers, seed)
    rep, detail = _ecf_check(simulate_ensemble(cfg).J[-1], 1.0, 1.0, 1.0)
    return rep.passed, detail + " on 20 points in [0.1, 5]"


@_timed(6, "stable case mu = 1.5: ECF and moment exponent 1/3", 120.0)
def criterion_6(n_walkers=100_000, seed=6):
    mu, D = 1.5, 1.0
    cfg = RunConfig(NoiseModel(mu, D), 2.0, 2000, n_walkers, seed,
                    record_times=(0, 250, 500, 1000, 2000))
    ens = simulate_ensemble(cfg)
    details, ok = [], True
    for t in (1.0, 2.0):
        rep, d = _ecf_check(ens.snapshot(t), mu, D, t)
        ok &= rep.passed
        details.append(d)
    slope = analysis.fractional_moment_scaling(ens, 0.5, times=[0.25, 0.5, 1.0, 2.0])
    ok &= abs(slope - 1 / 3) <= 0.05
    details.append(f"q=0.5 exponent {slope:.4f} (target 1/3 +- 0.05)")
    return ok, "; ".join(details)


@_timed(7, "renormalization invariance of the KS outcome (N vs 2N steps)")
def criterion_7(repetitions=100, n_walkers=10_000, first_seed=7000):
    flips = fails_n = fails_2n = 0
    for r in range(repetitions):
        outcome = []
        for n_steps in (1000, 2000):
            cfg = RunConfig(NoiseModel(2.0, 0.5), 1.0, n_steps, n_walkers, first_seed + r)
            outcome.append(analysis.ks_gaussian_test(simulate_ensemble(cfg).J[-1], 0.5, 1.0).passed)
        fails_n += not outcome[0]
        fails_2n += not outcome[1]
        flips += outcome[0] != outcome[1]
    rate = flips / repetitions
    return rate < 0.01, (f"{flips}/{repetitions} outcome changes (rate {rate:.2%}, limit < 1%); "
                         f"KS failures {fails_n} at N=1000, {fails_2n} at N=2000")


@_timed(8, "alpha = 1 line reproduces Brownian statistics")
def criterion_8(n_walkers=100_000, seed=8):
    curve = build_line(10)
    table = build_staircase(curve, 0.0)
    cfg = RunConfig(NoiseModel(2.0, 0.5), 1.0, 1000, n_walkers, seed)
    ens = map_to_curve(simulate_ensemble(cfg), table)
    ok, detail = _gaussian_check(ens, 0.5, 1.0)
    ident = float(np.max(np.abs(table.J - table.u)))
    along = float(np.max(np.abs(ens.positions.x - ens.positions.reduced)))
    flat = float(np.max(np.abs(ens.positions.y)))
    ok = ok and curve.alpha == 1.0 and ident < 1e-12 and along < 1e-12 and flat == 0.0
    return ok, f"alpha={curve.alpha}, |S(u)-u| {ident:.1e}, |x-J mod 1| {along:.1e}; " + detail


@_timed(9, "byte-identical ensembles for 1, 2 and 8 threads")
def criterion_9(n_walkers=3000, seed=9):
    cfg = RunConfig(NoiseModel(1.5, 1.0), 1.0, 400, n_walkers, seed, record_times=(0, 100, 400))
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for threads in (1, 2, 8):
            p = Path(tmp) / f"ens_{threads}.bin"
            io.write_ensemble_bin(simulate_ensemble(cfg, threads=threads), p)
            paths.append(p)
        same = all(filecmp.cmp(paths[0], p, shallow=False) for p in paths[1:])
        size = paths[0].stat().st_size
    return same, f"{size} byte files {'identical' if same else 'differ'}"


@_timed(10, "fractal Fourier round trip of a band-limited function")
def criterion_10(depth=10):
    table = build_staircase(build_koch(depth), 0.0)
    T = table.total_mass
    center, width = T / 2, T / 20

    def bump(J):
        return np.exp(-0.5 * ((J - center) / width) ** 2)

    def f(u):
        return bump(staircase_eval(table, u))

    # |f~| < 1e-10 beyond v_max; spacing keeps the aliasing period above 2T
    v_max = 7.0 / width
    n = int(math.ceil(2 * v_max / (math.pi / T))) | 1
    v = np.linspace(-v_max, v_max, n)
    back = fractal_fourier_inverse(fractal_fourier(f, v, table), v, table)
    ref = bump(table.J)
    err = float(np.linalg.norm(back.real - ref) / np.linalg.norm(ref))
    imag = float(np.abs(back.imag).max())
    return err < 1e-3, f"depth {depth}, {n} frequencies: relative L2 error {err:.2e} (tol 1e-3), max |imag| {imag:.1e}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(numbers=None, echo=print):
    results = []
    for crit in CRITERIA:
        if numbers and crit.number not in numbers:
            continue
        res = crit()
        if echo:
            echo(res.line())
        results.append(res)
    return results
