"""Calculus on fractal curves: mass, staircase, F^alpha derivative and integral.

Functions "on the curve" are plain callables of the parameter ``u``: a point
is labelled ``theta = w(u)``, so ``f(u)`` means ``f(theta)``.  They must accept
numpy arrays.  Use :func:`on_points` to lift a function of planar
coordinates.

The mass coordinate ``J = S(u)`` is the cumulative alpha-dimensional mass
from the origin point.  Conjugacy identifies ``f`` on the curve with
``g(J)`` on the mass line, which turns every operation here into ordinary
one-dimensional calculus in ``J``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .curve import FractalCurve, evaluate
from .errors import ConvergenceError, DomainError, SingularityError


@dataclass(frozen=True)
class MassEstimate:
    value: float
    depth_used: int
    cauchy_gap: float
    degenerate: bool = False


def _gamma_norm(alpha):
    return math.gamma(alpha + 1.0)


def _check_param(curve, *us):
    a0, b0 = curve.param_domain
    for u in us:
        if not (a0 <= u <= b0):
            raise DomainError(f"parameter {u} outside [{a0}, {b0}]")


def _chord_sum(knots, pts, alpha, a, b, pa, pb):
    """Sum of |chord|^alpha over {a} + vertices strictly inside (a, b) + {b}."""
    lo = np.searchsorted(knots, a, side="right")
    hi = np.searchsorted(knots, b, side="left")
    path = np.concatenate([pa[None], pts[lo:hi], pb[None]])
    chords = np.hypot(*np.diff(path, axis=0).T)
    return float(np.sum(chords ** alpha))


def mass(curve: FractalCurve, a, b) -> MassEstimate:
    """Mass of the curve between parameters ``a < b``.

    Sums ``|w(t_{i+1}) - w(t_i)|**alpha / Gamma(alpha + 1)`` over the
    subdivision made of ``a``, ``b`` and every depth-``n`` vertex between
    them.  The same sum one level coarser gives ``cauchy_gap``.
    """
    if not a < b:
        raise ValueError(f"mass needs a < b, got a={a}, b={b}")
    _check_param(curve, a, b)
    knots, pts = curve.polyline
    pa, pb = evaluate(curve, a), evaluate(curve, b)
    norm = _gamma_norm(curve.alpha)
    value = _chord_sum(knots, pts, curve.alpha, a, b, pa, pb) / norm
    if curve.depth > 0:
        m = curve.n_maps
        coarse = _chord_sum(knots[::m], pts[::m], curve.alpha, a, b, pa, pb) / norm
        gap = abs(value - coarse)
    else:
        gap = math.inf
    degenerate = value == 0.0
    if degenerate:
        warnings.warn("curve span between a and b is degenerate; mass is zero", RuntimeWarning)
    return MassEstimate(value, curve.depth, gap, degenerate)


@dataclass(frozen=True, eq=False)
class StaircaseTable:
    """Monotone knot table ``(u_i, J_i)`` of the staircase function.

    ``J`` is zero at ``origin``, negative before it and equal to the mass
    from the origin after it.
    """

    curve: FractalCurve
    u: np.ndarray
    J: np.ndarray
    origin: float
    total_mass: float

    @property
    def J_min(self):
        return float(self.J[0])

    @property
    def J_max(self):
        return float(self.J[-1])


def build_staircase(curve: FractalCurve, origin=None) -> StaircaseTable:
    """Tabulate the staircase at every polyline vertex (plus the origin)."""
    a0 = curve.param_domain[0]
    origin = a0 if origin is None else float(origin)
    _check_param(curve, origin)
    knots, pts = curve.polyline
    i0 = int(np.searchsorted(knots, origin))
    if knots[min(i0, len(knots) - 1)] != origin:
        knots = np.insert(knots, i0, origin)
        pts = np.insert(pts, i0, evaluate(curve, origin), axis=0)
    chords = np.hypot(*np.diff(pts, axis=0).T) ** curve.alpha / _gamma_norm(curve.alpha)
    cum = np.concatenate([[0.0], np.cumsum(chords)])
    J = cum - cum[i0]
    J[i0] = 0.0
    return StaircaseTable(curve, knots, J, origin, float(cum[-1]))


def staircase_eval(table: StaircaseTable, u):
    """Piecewise-linear staircase value at ``u``."""
    u = np.asarray(u, dtype=float)
    a0, b0 = table.curve.param_domain
    if np.any(u < a0) or np.any(u > b0) or np.any(~np.isfinite(u)):
        raise DomainError(f"parameter outside [{a0}, {b0}]")
    out = np.interp(u, table.u, table.J)
    return float(out) if out.ndim == 0 else out


def wrap_mass(table: StaircaseTable, J):
    """Reduce ``J`` into the table range by periodic extension.

    Returns ``(reduced, winding)`` with ``J == winding * total_mass + reduced``
    and ``reduced`` in ``[J_min, J_max)``.
    """
    J = np.asarray(J, dtype=float)
    T = table.total_mass
    winding = np.floor((J - table.J_min) / T)
    reduced = J - winding * T
    # the floor can land one period off when the quotient rounds across an integer
    low = reduced < table.J_min
    winding = np.where(low, winding - 1, winding)
    high = reduced >= table.J_max
    winding = np.where(high, winding + 1, winding)
    # J just below a period boundary can round onto J_max after the shift
    reduced = np.clip(J - winding * T, table.J_min, np.nextafter(table.J_max, -np.inf))
    return reduced, winding.astype(np.int64)


def inverse_staircase(table: StaircaseTable, J, periodic=False):
    """Parameter ``u`` with ``S(u) == J``; the leftmost one on flat steps.

    With ``periodic=True`` any real ``J`` is accepted and first reduced with
    :func:`wrap_mass`.
    """
    J = np.asarray(J, dtype=float)
    if periodic:
        J, _ = wrap_mass(table, J)
    elif np.any(J < table.J_min) or np.any(J > table.J_max) or np.any(~np.isfinite(J)):
        raise DomainError(f"mass outside the table range [{table.J_min}, {table.J_max}]")
    Jk, uk = table.J, table.u
    i = np.clip(np.searchsorted(Jk, J, side="left"), 1, len(Jk) - 1)
    j0, j1 = Jk[i - 1], Jk[i]
    step = j1 - j0
    frac = np.divide(J - j0, step, out=np.zeros_like(J), where=step > 0)
    u = uk[i - 1] + frac * (uk[i] - uk[i - 1])
    u = np.where(J == j1, uk[i], u)
    u = np.where(J == Jk[0], uk[0], u)
    return float(u) if u.ndim == 0 else u


def on_points(curve, f):
    """Lift ``f(x, y)`` to a callable of the curve parameter."""
    def lifted(u):
        xy = evaluate(curve, u)
        return f(xy[..., 0], xy[..., 1])
    return lifted


def conjugacy_apply(g, table: StaircaseTable):
    """Function on the curve whose value at ``w(u)`` is ``g(S(u))``."""
    def lifted(u):
        return g(staircase_eval(table, u))
    return lifted


def falpha_derivative(f, u, table: StaircaseTable, *, rtol=1e-6, max_refinements=20, step=None):
    """F^alpha derivative of ``f`` at the point ``w(u)``.

    The difference quotient uses neighbours placed symmetrically in the mass
    coordinate (one-sided at the table ends) and halves the mass step until
    two successive quotients agree to ``rtol``.
    """
    J0 = staircase_eval(table, u)
    h = table.total_mass / 16.0 if step is None else float(step)
    f0 = None
    older = prev = None
    for _ in range(max_refinements + 1):
        hi, lo = min(J0 + h, table.J_max), max(J0 - h, table.J_min)
        up, um = inverse_staircase(table, hi), inverse_staircase(table, lo)
        dJ = staircase_eval(table, up) - staircase_eval(table, um)
        if dJ == 0.0:
            raise SingularityError(f"mass coordinate is flat around u={u}")
        if f0 is None and (up == u or um == u):
            f0 = f(np.asarray(u, dtype=float))
        fp = f0 if up == u else f(np.asarray(up))
        fm = f0 if um == u else f(np.asarray(um))
        d = float((fp - fm) / dJ)
        if prev is not None and abs(d - prev) <= rtol * max(abs(d), abs(prev)):
            return d
        older, prev = prev, d
        h *= 0.5
    raise ConvergenceError(
        f"F-derivative did not converge to rtol={rtol} in {max_refinements} refinements",
        previous=older, last=prev)


def _segments(table, a, b):
    """Knot parameters and masses covering [a, b], endpoints included."""
    a0, b0 = table.curve.param_domain
    if not (a0 <= a <= b <= b0):
        raise DomainError(f"need {a0} <= a <= b <= {b0}, got a={a}, b={b}")
    lo = np.searchsorted(table.u, a, side="right")
    hi = np.searchsorted(table.u, b, side="left")
    u = np.concatenate([[a], table.u[lo:hi], [b]])
    J = np.concatenate([[staircase_eval(table, a)], table.J[lo:hi], [staircase_eval(table, b)]])
    return u, J


def _midpoint_weights(table, a, b):
    u, J = _segments(table, a, b)
    # the staircase is linear between knots, so the mass midpoint is the parameter midpoint
    return 0.5 * (u[1:] + u[:-1]), 0.5 * (J[1:] + J[:-1]), np.diff(J)


def falpha_integral(f, a, b, table: StaircaseTable):
    """F^alpha integral of ``f`` over the curve between ``a`` and ``b``.

    Midpoint rule in the mass coordinate over the table knots.
    """
    if a == b:
        return 0.0
    um, _, dJ = _midpoint_weights(table, a, b)
    return float(np.sum(np.asarray(f(um), dtype=float) * dJ))


def fractal_fourier(f, v_grid, table: StaircaseTable, *, chunk=1 << 22):
    """Fractal Fourier transform ``int f(theta) exp(-i J(theta) v) dF(theta)``.

    ``v_grid`` holds the transform variable ``v = J(psi)``.  The integral
    runs over the whole tabulated curve, which stands in for the unbounded
    curve when ``f`` vanishes near the table ends.
    """
    v = np.atleast_1d(np.asarray(v_grid, dtype=float))
    if v.size == 0:
        raise ValueError("empty transform grid")
    a0, b0 = table.curve.param_domain
    um, Jm, dJ = _midpoint_weights(table, a0, b0)
    w = np.asarray(f(um), dtype=complex) * dJ
    return _phase_sum(w, Jm, v, -1.0, chunk)


def fractal_fourier_inverse(f_tilde, v_grid, table: StaircaseTable, u=None, *, chunk=1 << 22):
    """Inverse transform ``(1/2pi) int f~(psi) exp(+i J(theta) J(psi)) dF(psi)``.

    The ``psi`` integral is the trapezoid rule on ``v_grid`` (the sampled
    ``J(psi)`` values).  Returns complex values at ``u`` (default: knots).
    """
    v = np.asarray(v_grid, dtype=float)
    ft = np.asarray(f_tilde, dtype=complex)
    if v.size < 2 or ft.shape != v.shape:
        raise ValueError("need matching v_grid and f_tilde of length >= 2")
    dv = np.diff(v)
    wts = np.zeros_like(v)
    wts[:-1] += 0.5 * dv
    wts[1:] += 0.5 * dv
    J = table.J if u is None else np.atleast_1d(staircase_eval(table, u))
    return _phase_sum(ft * wts, v, J, 1.0, chunk) / (2.0 * np.pi)


def _phase_sum(weights, nodes, targets, sign, chunk):
    """``out[k] = sum_j weights[j] * exp(sign * 1j * nodes[j] * targets[k])``."""
    out = np.empty(targets.size, dtype=complex)
    rows = max(1, chunk // max(nodes.size, 1))
    for s in range(0, targets.size, rows):
        phase = np.outer(targets[s:s + rows], nodes)
        out[s:s + rows] = np.exp(sign * 1j * phase) @ weights
    return out
