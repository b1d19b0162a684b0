"""Levy noise: power-law jumps, symmetric stable increments and seeded streams.

Per-step increments follow the renormalized law

    E[exp(-i k xi)] = exp(-D * dt * |k|**mu),

so ``n`` steps of size ``dt`` compose to the same law as one step of size
``n * dt``.  Gaussian (``mu = 2``, variance ``2 D dt``) and Cauchy
(``mu = 1``, scale ``D dt``) are special cases of the same family.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

FAMILIES = ("stable", "power_law")


@dataclass(frozen=True)
class NoiseModel:
    """Noise specification.

    ``D = 0`` is accepted and gives the deterministic (noise-free) limit.
    """

    mu: float
    D: float
    eta0: float = 1.0
    family: str = "stable"

    def __post_init__(self):
        if not 0.0 < self.mu <= 2.0:
            raise ValueError(f"mu must lie in (0, 2], got {self.mu}")
        if not self.D >= 0.0:
            raise ValueError(f"D must be non-negative, got {self.D}")
        if not self.eta0 > 0.0:
            raise ValueError(f"eta0 must be positive, got {self.eta0}")
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")

    @property
    def D1(self):
        """Folded coefficient ``D * eta0**mu``."""
        return self.D * self.eta0 ** self.mu

    def step_scale(self, delta):
        """Scale ``(D dt)**(1/mu)`` of the standardized stable increment."""
        return (self.D * delta) ** (1.0 / self.mu)


def renormalize_cutoff(delta, mu):
    """Cutoff ``eta0`` solving ``eta0**mu * delta**(mu - 1) == 1``."""
    if mu == 0:
        raise ValueError("mu must be non-zero")
    if not 0.0 < mu <= 2.0:
        raise ValueError(f"mu must lie in (0, 2], got {mu}")
    if not delta > 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    return delta ** ((1.0 - mu) / mu)


def sample_power_law(model: NoiseModel, rng, size=None):
    """One-sided Pareto jumps ``eta >= eta0`` with density ``mu eta0^mu eta^(-1-mu)``."""
    if model.family != "power_law":
        raise ValueError("sample_power_law needs a power_law noise model")
    u = 1.0 - rng.random(size)  # uniform on (0, 1]
    return power_law_quantile(u, model.mu, model.eta0)


def power_law_quantile(u, mu, eta0):
    """Inverse CDF of the cutoff power law; ``u = 1`` maps to ``eta0``."""
    return eta0 * np.asarray(u, dtype=float) ** (-1.0 / mu)


def standard_stable(mu, rng, size=None):
    """Symmetric stable variates with characteristic function ``exp(-|k|**mu)``.

    Chambers-Mallows-Stuck transform of a uniform angle and a unit
    exponential.  ``mu = 1`` reduces to ``tan`` of the angle.
    """
    phi = np.pi * (rng.random(size) - 0.5)
    if mu == 1.0:
        return np.tan(phi)
    w = rng.standard_exponential(size)
    return (np.sin(mu * phi) / np.cos(phi) ** (1.0 / mu)
            * (np.cos((1.0 - mu) * phi) / w) ** ((1.0 - mu) / mu))


def sample_stable_increment(model: NoiseModel, delta, rng, size=None):
    """Increments ``xi = delta * eta_n`` of one time step.

    ``mu = 2`` draws a centered normal of variance ``2 D delta`` directly;
    every other index uses :func:`standard_stable` scaled by
    ``(D delta)**(1/mu)``.
    """
    if model.family != "stable":
        raise ValueError("sample_stable_increment needs a stable noise model")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    if model.D == 0.0:
        return np.zeros(size) if size is not None else 0.0
    if model.mu == 2.0:
        return rng.normal(0.0, np.sqrt(2.0 * model.D * delta), size)
    return model.step_scale(delta) * standard_stable(model.mu, rng, size)


class EmpiricalCF(NamedTuple):
    k: np.ndarray
    value: np.ndarray
    se: np.ndarray


def empirical_char_function(samples, k_grid, *, chunk=1 << 22):
    """Sample mean of ``exp(-i k x)`` on ``k_grid`` with standard error ``1/sqrt(N)``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empirical characteristic function of an empty sample")
    k = np.atleast_1d(np.asarray(k_grid, dtype=float))
    out = np.empty(k.size, dtype=complex)
    rows = max(1, chunk // x.size)
    for s in range(0, k.size, rows):
        ph = np.outer(k[s:s + rows], x)
        out[s:s + rows] = np.cos(ph).mean(axis=1) - 1j * np.sin(ph).mean(axis=1)
    out[k == 0] = 1.0
    return EmpiricalCF(k, out, np.full(k.size, 1.0 / np.sqrt(x.size)))


def seed_key(seed):
    """128-bit Philox key derived from a user seed."""
    return np.random.SeedSequence(int(seed)).generate_state(2, np.uint64)


def stream(seed, index=0):
    """Counter-based generator for stream ``index`` of ``seed``.

    Streams differ in the top 64-bit word of the Philox counter, so they
    never overlap and depend only on ``(seed, index)``.
    """
    bg = np.random.Philox(key=seed_key(seed), counter=[0, 0, 0, int(index)])
    return np.random.Generator(bg)


def walker_streams(seed, first, count):
    key = seed_key(seed)
    for w in range(first, first + count):
        yield np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, w]))
