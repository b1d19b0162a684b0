"""Self-similar fractal curves in the plane built from affine IFS motifs.

A curve is the stage-``n`` prefractal of an iterated function system whose
maps chain end to start.  Each map owns a contiguous share of the parameter
interval, so the vertices of the depth-``n`` broken line are exactly the
images of the motif endpoints under all words of length ``n``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import CapacityError, DimensionError, DomainError, GeometryError

MAX_DEPTH = 14
# polylines deeper than this are never materialized; evaluation composes maps
MATERIALIZE_DEPTH = 12
_CHAIN_TOL = 1e-12


def _koch_maps():
    c, s = 0.5, math.sqrt(3.0) / 2.0
    third = 1.0 / 3.0
    return np.array([
        [[third, 0.0, 0.0], [0.0, third, 0.0]],
        [[c * third, -s * third, third], [s * third, c * third, 0.0]],
        [[c * third, s * third, 0.5], [-s * third, c * third, s * third]],
        [[third, 0.0, 2.0 * third], [0.0, third, 0.0]],
    ])


def _apply(maps, pts):
    """Apply one affine map (2, 3) or a stack of them to points (..., 2)."""
    return pts @ maps[..., :2].swapaxes(-1, -2) + maps[..., 2][..., None, :]


def _fixed_point(m):
    A, b = m[:, :2], m[:, 2]
    return np.linalg.solve(np.eye(2) - A, b)


def contraction_ratio(m):
    """Lipschitz constant of the linear part of a 2x3 affine map."""
    return float(np.linalg.svd(np.asarray(m)[:, :2], compute_uv=False)[0])


def similarity_dimension(ratios):
    """Solve the Moran equation ``sum(r**alpha) == 1`` for alpha in [1, 2]."""
    r = np.asarray(ratios, dtype=float)
    if r.size == 1:
        return 1.0

    def excess(a):
        return float(np.sum(r ** a)) - 1.0

    lo, hi = excess(1.0), excess(2.0)
    if abs(lo) <= 1e-12:
        return 1.0
    if abs(hi) <= 1e-12:
        return 2.0
    if lo * hi > 0:
        raise DimensionError(
            f"Moran sum has no root in [1, 2] (sum at 1: {lo + 1:.6g}, at 2: {hi + 1:.6g})")
    return brentq(excess, 1.0, 2.0, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


@dataclass(frozen=True, eq=False)
class FractalCurve:
    """Stage-``depth`` prefractal of a chained IFS motif.

    Attributes
    ----------
    maps : ndarray, shape (m, 2, 3)
        Affine maps ``x -> A x + t`` stored row-major as ``[A | t]``.
    breaks : ndarray, shape (m + 1,)
        Parameter fractions owned by each map, from 0 to 1.
    depth : int
        Recursion stage.
    param_domain : tuple of float
        Parameter interval ``[a0, b0]``.
    alpha : float
        Similarity dimension.
    start, end : ndarray, shape (2,)
        Motif endpoints, pinned at every depth.
    """

    maps: np.ndarray
    breaks: np.ndarray
    depth: int
    param_domain: tuple
    alpha: float
    start: np.ndarray
    end: np.ndarray
    name: str = "ifs"
    ratios: np.ndarray = field(default=None, repr=False)

    @property
    def n_maps(self):
        return len(self.maps)

    @property
    def n_vertices(self):
        return self.n_maps ** self.depth + 1

    @property
    def materialized(self):
        return self.depth <= MATERIALIZE_DEPTH

    @property
    def moran_residual(self):
        if self.n_maps == 1:
            return 0.0
        return abs(float(np.sum(self.ratios ** self.alpha)) - 1.0)

    def to_param(self, frac):
        a0, b0 = self.param_domain
        return a0 + (b0 - a0) * np.asarray(frac, dtype=float)

    def to_frac(self, u):
        a0, b0 = self.param_domain
        return (np.asarray(u, dtype=float) - a0) / (b0 - a0)

    @cached_property
    def polyline(self):
        """Vertex parameters and coordinates, ``(u, points)``."""
        if not self.materialized:
            raise CapacityError(
                f"polyline materialization is limited to depth {MATERIALIZE_DEPTH}; "
                f"curve has depth {self.depth}")
        pts = np.stack([self.start, self.end])
        s = np.array([0.0, 1.0])
        if self.n_maps == 1:
            return self.to_param(s), pts
        lo, width = self.breaks[:-1], np.diff(self.breaks)
        for _ in range(self.depth):
            images = _apply(self.maps, pts)
            pts = np.concatenate([images[0]] + [img[1:] for img in images[1:]])
            parts = lo[:, None] + width[:, None] * s
            s = np.concatenate([parts[0]] + [p[1:] for p in parts[1:]])
        s[-1] = 1.0
        return self.to_param(s), pts

    def coarsen(self, levels=1):
        """Same motif at a lower depth (shares no cached state)."""
        return FractalCurve(self.maps, self.breaks, max(self.depth - levels, 0),
                            self.param_domain, self.alpha, self.start, self.end,
                            self.name, self.ratios)

    def with_depth(self, depth):
        _check_depth(depth, MAX_DEPTH)
        return FractalCurve(self.maps, self.breaks, depth, self.param_domain,
                            self.alpha, self.start, self.end, self.name, self.ratios)


def _check_depth(depth, max_depth):
    if int(depth) != depth or depth < 0:
        raise ValueError(f"depth must be a non-negative integer, got {depth!r}")
    if depth > max_depth:
        raise CapacityError(f"depth {depth} exceeds the maximum depth {max_depth}")


def build_ifs(maps, param_breaks=None, depth=0, *, param_domain=(0.0, 1.0),
              endpoints=None, max_depth=MAX_DEPTH, name="ifs"):
    """Build a curve from a chained list of affine contractions.

    Parameters
    ----------
    maps : array_like, shape (m, 2, 3)
        Affine maps, each a row-major 2x3 matrix ``[[a, b, tx], [c, d, ty]]``.
    param_breaks : sequence of float, optional
        The ``m - 1`` interior parameter fractions separating the maps'
        shares.  Defaults to equal shares ``1/m``.
    depth : int
        Recursion stage.
    endpoints : pair of points, optional
        Motif endpoints.  Required only for a single-map motif; otherwise they
        are the fixed points of the first and last map.

    Raises
    ------
    GeometryError
        If the image of the motif end under map ``i`` is not the image of the
        motif start under map ``i + 1``.
    DimensionError
        If the Moran equation has no root in [1, 2].
    """
    _check_depth(depth, max_depth)
    maps = np.array(maps, dtype=float)
    if maps.ndim != 3 or maps.shape[1:] != (2, 3) or len(maps) == 0:
        raise ValueError(f"maps must have shape (m, 2, 3), got {maps.shape}")
    m = len(maps)
    if param_breaks is None:
        breaks = np.linspace(0.0, 1.0, m + 1)
    else:
        inner = np.asarray(param_breaks, dtype=float)
        if inner.shape != (m - 1,):
            raise ValueError(f"expected {m - 1} interior parameter breaks, got {inner.size}")
        breaks = np.concatenate([[0.0], inner, [1.0]])
        if np.any(np.diff(breaks) <= 0):
            raise ValueError("param_breaks must be strictly increasing inside (0, 1)")

    ratios = np.array([contraction_ratio(f) for f in maps])
    if m == 1:
        if not np.allclose(maps[0], [[1, 0, 0], [0, 1, 0]], atol=_CHAIN_TOL):
            raise GeometryError("a single-map motif must be the identity (a straight initiator)")
        if endpoints is None:
            endpoints = ((0.0, 0.0), (1.0, 0.0))
        start, end = (np.asarray(p, dtype=float) for p in endpoints)
        alpha = 1.0
    else:
        if np.any(ratios >= 1.0) or np.any(ratios <= 0.0):
            raise GeometryError(f"all maps must be strict contractions, ratios {ratios}")
        if endpoints is None:
            start, end = _fixed_point(maps[0]), _fixed_point(maps[-1])
        else:
            start, end = (np.asarray(p, dtype=float) for p in endpoints)
        scale = max(float(np.linalg.norm(end - start)), 1.0)
        if np.linalg.norm(end - start) == 0:
            raise GeometryError("motif endpoints coincide")
        for i in range(m - 1):
            gap = np.linalg.norm(_apply(maps[i], end) - _apply(maps[i + 1], start))
            if gap > _CHAIN_TOL * scale:
                raise GeometryError(
                    f"map {i} does not chain into map {i + 1} (endpoint gap {gap:.3g})")
        alpha = similarity_dimension(ratios)

    return FractalCurve(maps, breaks, int(depth), tuple(map(float, param_domain)),
                        float(alpha), start, end, name, ratios)


def build_koch(depth, *, max_depth=MAX_DEPTH):
    """Standard von Koch curve from (0, 0) to (1, 0) on the parameter interval [0, 1]."""
    curve = build_ifs(_koch_maps(), None, depth, max_depth=max_depth, name="koch")
    # pin the closed form; brentq agrees to ~1e-16
    return FractalCurve(curve.maps, curve.breaks, curve.depth, curve.param_domain,
                        math.log(4.0) / math.log(3.0), curve.start, curve.end,
                        "koch", curve.ratios)


def build_line(depth=0, *, max_depth=MAX_DEPTH):
    """Unit segment written as two half-scale maps, so alpha is exactly 1."""
    maps = [[[0.5, 0.0, 0.0], [0.0, 0.5, 0.0]],
            [[0.5, 0.0, 0.5], [0.0, 0.5, 0.0]]]
    return build_ifs(maps, None, depth, max_depth=max_depth, name="line")


def load_ifs(path, depth, **kwargs):
    """Build a curve from an IFS motif JSON file with ``maps`` and ``param_breaks``."""
    spec = json.loads(Path(path).read_text())
    return build_ifs(spec["maps"], spec.get("param_breaks"), depth,
                     name=Path(path).stem, **kwargs)


def evaluate(curve, u):
    """Point ``w(u)`` on the stage-``depth`` broken line.

    Exact at vertices; piecewise linear between them.  ``u`` may be a scalar
    or an array, the result has shape ``u.shape + (2,)``.
    """
    u = np.asarray(u, dtype=float)
    a0, b0 = curve.param_domain
    if np.any(~np.isfinite(u)) or np.any(u < a0) or np.any(u > b0):
        raise DomainError(f"parameter outside the curve domain [{a0}, {b0}]")
    if curve.materialized:
        knots, pts = curve.polyline
        flat = u.ravel()
        xy = np.stack([np.interp(flat, knots, pts[:, 0]), np.interp(flat, knots, pts[:, 1])], axis=-1)
        # np.interp may round at vertices; restore exact vertex coordinates
        idx = np.searchsorted(knots, flat)
        idx = np.minimum(idx, len(knots) - 1)
        hit = knots[idx] == flat
        xy[hit] = pts[idx[hit]]
        return xy.reshape(u.shape + (2,))
    return _evaluate_composed(curve, curve.to_frac(u))


def _evaluate_composed(curve, s):
    """Evaluate by descending the IFS word of each parameter fraction."""
    shape = s.shape
    s = s.ravel().copy()
    A = np.broadcast_to(np.eye(2), (s.size, 2, 2)).copy()
    t = np.zeros((s.size, 2))
    lo, width = curve.breaks[:-1], np.diff(curve.breaks)
    lin, off = curve.maps[:, :, :2], curve.maps[:, :, 2]
    for _ in range(curve.depth):
        i = np.clip(np.searchsorted(curve.breaks, s, side="right") - 1, 0, curve.n_maps - 1)
        s = np.clip((s - lo[i]) / width[i], 0.0, 1.0)
        t = t + np.einsum("kij,kj->ki", A, off[i])
        A = A @ lin[i]
    local = curve.start + s[:, None] * (curve.end - curve.start)
    return (np.einsum("kij,kj->ki", A, local) + t).reshape(shape + (2,))


@dataclass(frozen=True)
class CurveSpec:
    """Serializable curve reference: motif name or IFS file, depth and origin."""

    motif: str = "koch"
    depth: int = 8
    origin: float = 0.0

    def build(self):
        if self.motif == "koch":
            return build_koch(self.depth)
        if self.motif == "line":
            return build_line(self.depth)
        return load_ifs(self.motif, self.depth)
