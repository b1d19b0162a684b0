"""Overdamped Langevin dynamics in the mass coordinate of a fractal curve.

The equation ``dJ/dt = eta(t)`` is driftless, so the discrete update
``J_{n+1} = J_n + xi_n`` is exact in law once the increments carry the
renormalized stable distribution.  Trajectories live on the unbounded mass
line; positions on a finite prefractal come from periodic tiling.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .curve import CurveSpec, evaluate
from .fcalculus import StaircaseTable, inverse_staircase, wrap_mass
from .noise import NoiseModel, sample_stable_increment, walker_streams

# fixed so that results never depend on the worker count
BLOCK_SIZE = 512


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RunConfig:
    noise: NoiseModel
    t_end: float
    n_steps: int
    n_walkers: int
    seed: int = 0
    record_times: Optional[tuple] = None
    curve: Optional[CurveSpec] = None
    J0: float = 0.0

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be at least 1")
        if self.n_walkers < 1:
            raise ValueError("n_walkers must be at least 1")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        steps = (0, self.n_steps) if self.record_times is None else tuple(
            sorted({int(s) for s in self.record_times}))
        if steps[0] < 0 or steps[-1] > self.n_steps:
            raise ValueError(f"record_times must lie in [0, {self.n_steps}]")
        object.__setattr__(self, "record_times", steps)

    @property
    def delta(self):
        return self.t_end / self.n_steps

    @property
    def times(self):
        return np.array(self.record_times, dtype=float) * self.delta


@dataclass(frozen=True)
class Positions:
    x: np.ndarray
    y: np.ndarray
    winding: np.ndarray
    reduced: np.ndarray


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Recorded mass coordinates, shape ``(n_times, n_walkers)``."""

    times: np.ndarray
    J: np.ndarray
    config: Optional[RunConfig] = None
    positions: Optional[Positions] = field(default=None, repr=False)

    @property
    def n_walkers(self):
        return self.J.shape[1]

    def snapshot(self, t):
        """Walker masses at the recorded time closest to ``t``."""
        return self.J[int(np.argmin(np.abs(self.times - t)))]


def step(J, xi):
    """One Euler step ``J + xi``; ``xi`` is already multiplied by the time step."""
    return J + xi


def alpha_velocity(traj, i, delta):
    """Finite-difference alpha-velocity ``(J_i - J_{i-1}) / delta``."""
    if i < 1:
        raise IndexError("alpha-velocity needs a previous snapshot (i >= 1)")
    return (traj[i] - traj[i - 1]) / delta


def _simulate_block(config, first, count):
    noise, dt = config.noise, config.delta
    steps = np.asarray(config.record_times)
    # column 0 holds J0 so the running sum reproduces repeated step() calls
    path = np.empty((count, config.n_steps + 1))
    path[:, 0] = config.J0
    for row, rng in zip(path, walker_streams(config.seed, first, count)):
        row[1:] = sample_stable_increment(noise, dt, rng, config.n_steps)
    np.cumsum(path, axis=1, out=path)
    return path[:, steps].T


def simulate_ensemble(config: RunConfig, threads=1) -> Ensemble:
    """Integrate every walker from ``J0`` with its own noise stream.

    Walkers are processed in fixed blocks; ``threads`` changes only the speed.
    """
    if config.noise.family != "stable":
        raise ValueError("simulation needs a stable noise model")
    try:
        out = np.empty((len(config.record_times), config.n_walkers))
        starts = range(0, config.n_walkers, BLOCK_SIZE)

        def run(first):
            count = min(BLOCK_SIZE, config.n_walkers - first)
            out[:, first:first + count] = _simulate_block(config, first, count)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(run, starts))
        else:
            for first in starts:
                run(first)
    except MemoryError as exc:
        raise SimulationError(
            f"out of memory simulating {config.n_walkers} walkers x {config.n_steps} steps") from exc
    return Ensemble(config.times, out, config)


def map_to_curve(ensemble: Ensemble, table: StaircaseTable) -> Ensemble:
    """Attach curve positions by tiling the staircase periodically in ``J``."""
    reduced, winding = wrap_mass(table, ensemble.J)
    u = inverse_staircase(table, reduced)
    xy = evaluate(table.curve, u)
    pos = Positions(xy[..., 0], xy[..., 1], winding, reduced)
    return dataclasses.replace(ensemble, positions=pos)
