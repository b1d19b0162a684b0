"""Statistical checks of Langevin ensembles against the closed-form solution.

The propagator of the driftless equation has characteristic function
``exp(-D |k|**mu t)`` in the mass coordinate.  Densities, Kolmogorov-Smirnov
tests, characteristic-function distances and moment scaling are all
measured on the unwrapped mass ``J``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, stats

from .noise import empirical_char_function

KS_CRITICAL_1PCT = 1.628
KS_MIN_SAMPLES = 10_000
DEFAULT_K_GRID = np.linspace(0.1, 5.0, 20)


class DataError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityCurve:
    grid: np.ndarray
    pdf: np.ndarray
    kind: str
    exceed_low: int = 0
    exceed_high: int = 0
    widths: np.ndarray = None

    def total(self):
        """Quadrature of the density over its grid."""
        if self.widths is not None:
            return float(np.sum(self.pdf * self.widths))
        return float(integrate.trapezoid(self.pdf, self.grid))


@dataclass(frozen=True)
class FitReport:
    statistic_name: str
    value: float
    critical_value: float
    passed: bool
    n_samples: int

    def to_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        d["critical_value_or_tolerance"] = d.pop("critical_value")
        return d


def _report(name, value, critical, n):
    return FitReport(name, float(value), float(critical), bool(value <= critical), int(n))


def analytic_char_function(mu, D, t, k_grid):
    if t < 0:
        raise ValueError("t must be non-negative")
    k = np.asarray(k_grid, dtype=float)
    return np.exp(-D * np.abs(k) ** mu * t)


def gaussian_variance(D, t, convention="cf"):
    """Variance of the mu = 2 solution.

    ``"cf"`` inverts ``exp(-D k^2 t)`` (variance ``2 D t``); ``"paper"`` is the
    printed closed form ``exp(-J^2 / 2Dt) / sqrt(2 pi D t)`` (variance ``D t``).
    """
    if convention == "cf":
        return 2.0 * D * t
    if convention == "paper":
        return D * t
    raise ValueError(f"unknown convention {convention!r}")


def _stable_pdf_unit(x, mu):
    """Density with characteristic function ``exp(-|k|**mu)``, by cosine transform."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    at0 = math.gamma(1.0 + 1.0 / mu) / math.pi
    # exp(-k_max**mu) = e^-45 ~ 3e-20 bounds the truncated tail
    k_max = 45.0 ** (1.0 / mu)
    for i, xi in np.ndenumerate(x):
        if xi == 0.0:
            out[i] = at0
            continue
        val, _ = integrate.quad(lambda k: np.exp(-k ** mu), 0.0, k_max,
                                weight="cos", wvar=xi, epsabs=1e-14, limit=400)
        out[i] = val / math.pi
    return out


def analytic_density(mu, D, t, grid, convention="cf"):
    """Propagator density on ``grid`` of mass values."""
    if t <= 0:
        raise ValueError("the density at t = 0 is a point mass")
    J = np.asarray(grid, dtype=float)
    if mu == 2.0:
        var = gaussian_variance(D, t, convention)
        pdf = np.exp(-J ** 2 / (2.0 * var)) / np.sqrt(2.0 * np.pi * var)
    elif convention != "cf":
        raise ValueError("the printed closed form exists only for mu = 2")
    elif mu == 1.0:
        g = D * t
        pdf = (g / np.pi) / (J ** 2 + g ** 2)
    else:
        scale = (D * t) ** (1.0 / mu)
        pdf = _stable_pdf_unit(J / scale, mu) / scale
    return DensityCurve(J, np.maximum(pdf, 0.0), "analytic")


def empirical_density(snapshot, bins="fd", clip=(0.001, 0.999)):
    """Histogram density on a quantile-clipped core.

    Normalized by the full sample size, so mass beyond the clipped range is
    missing from the integral and reported as exceedance counts instead.
    """
    x = np.asarray(snapshot, dtype=float)
    if x.size < 100:
        raise ValueError(f"empirical density needs at least 100 samples, got {x.size}")
    lo, hi = np.quantile(x, clip)
    core = x[(x >= lo) & (x <= hi)]
    if lo == hi:
        # unit-width window around a point mass, like np.histogram
        nb = 1 if isinstance(bins, str) else int(bins)
        edges = np.linspace(lo - 0.5, lo + 0.5, nb + 1)
    else:
        edges = np.histogram_bin_edges(core, bins=bins, range=(lo, hi))
    counts, edges = np.histogram(core, bins=edges)
    widths = np.diff(edges)
    pdf = counts / (x.size * widths)
    centers = 0.5 * (edges[1:] + edges[:-1])
    return DensityCurve(centers, pdf, "empirical_histogram",
                        int(np.sum(x < lo)), int(np.sum(x > hi)), widths)


def ks_gaussian_test(snapshot, D, t, convention="cf"):
    """One-sample KS test against the zero-mean Gaussian solution at the 1% level."""
    x = np.asarray(snapshot, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DataError("snapshot contains non-finite values")
    if x.size < KS_MIN_SAMPLES:
        raise ValueError(f"KS test needs at least {KS_MIN_SAMPLES} samples, got {x.size}")
    sd = math.sqrt(gaussian_variance(D, t, convention))
    stat = stats.kstest(x, "norm", args=(0.0, sd)).statistic
    return _report("ks", stat, KS_CRITICAL_1PCT / math.sqrt(x.size), x.size)


def ecf_distance(snapshot, mu, D, t, k_grid=DEFAULT_K_GRID):
    """Largest gap between the empirical and the analytic characteristic function.

    Passes when every grid point is within ``3 / sqrt(N)``.
    """
    x = np.asarray(snapshot, dtype=float)
    ecf = empirical_char_function(x, k_grid)
    gap = np.abs(ecf.value - analytic_char_function(mu, D, t, ecf.k))
    return _report("ecf_max_abs", gap.max(), 3.0 / math.sqrt(x.size), x.size)


def fractional_moments(ensemble, q, times=None):
    """``(t, <|J|^q>)`` at the recorded times ``t > 0``."""
    t = ensemble.times if times is None else np.asarray(times, dtype=float)
    idx = [int(np.argmin(np.abs(ensemble.times - ti))) for ti in t]
    keep = [i for i in idx if ensemble.times[i] > 0]
    m = np.array([np.mean(np.abs(ensemble.J[i]) ** q) for i in keep])
    return ensemble.times[keep], m


def fractional_moment_scaling(ensemble, q, times=None, mu=None):
    """Least-squares slope of ``log <|J|^q>`` against ``log t``; ``q / mu`` for a stable law."""
    if mu is None:
        mu = ensemble.config.noise.mu
    if mu < 2.0 and q >= mu:
        raise ValueError(f"moment of order q={q} diverges for mu={mu}")
    t, m = fractional_moments(ensemble, q, times)
    if t.size < 3:
        raise ValueError("moment scaling needs at least three snapshot times with t > 0")
    slope, _ = np.polyfit(np.log(t), np.log(m), 1)
    return float(slope)
