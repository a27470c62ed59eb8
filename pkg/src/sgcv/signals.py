"""Test signals and seeded noise for the order-detection experiments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINEMATIC_SPAN = (0.0, 20.0)


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean noise: Gaussian, or a two-component Gaussian mixture where a
    latent Bernoulli(p_i) switches a sample to the impulsive variance."""

    sigma_w_sq: float
    sigma_i_sq: float = 0.0
    p_i: float = 0.0

    def __post_init__(self):
        if not self.sigma_w_sq >= 0 or not self.sigma_i_sq >= 0:
            raise ValueError("variances must be non-negative")
        if not 0.0 <= self.p_i <= 1.0:
            raise ValueError(f"p_i must lie in [0, 1], got {self.p_i}")
        if self.p_i > 0 and not self.sigma_i_sq > self.sigma_w_sq:
            raise ValueError("impulsive variance must exceed the nominal variance")

    @classmethod
    def gaussian(cls, sigma_w_sq: float) -> "NoiseModel":
        return cls(sigma_w_sq)

    @classmethod
    def mixture(cls, sigma_w_sq: float, sigma_i_sq: float, p_i: float) -> "NoiseModel":
        return cls(sigma_w_sq, sigma_i_sq, p_i)

    @property
    def variant(self) -> str:
        return "mixture" if self.p_i > 0 else "gaussian"

    @property
    def variance(self) -> float:
        return (1.0 - self.p_i) * self.sigma_w_sq + self.p_i * self.sigma_i_sq


def rng(seed) -> np.random.Generator:
    """Counter-based (Philox) generator keyed by an int or a tuple of ints.

    Monte Carlo trials use ``(base_seed, window_len, trial)`` so every trial
    owns its stream regardless of execution order.
    """
    key = [int(s) for s in np.atleast_1d(seed)]
    if any(s < 0 for s in key):
        raise ValueError("seeds must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def draw_noise(model: NoiseModel, n: int, seed) -> np.ndarray:
    gen = rng(seed)
    z = gen.standard_normal(n)
    scale = np.full(n, np.sqrt(model.sigma_w_sq))
    if model.p_i > 0:
        # drawn after z, so p_i = 0 and pure Gaussian share the same z
        impulsive = gen.random(n) < model.p_i
        scale[impulsive] = np.sqrt(model.sigma_i_sq)
    return z * scale


def cubic_grid(n: int) -> np.ndarray:
    """Centered integer grid: ``-N/2..N/2-1`` (even N), ``-(N-1)/2..(N-1)/2`` (odd N)."""
    if n < 3:
        raise ValueError(f"N must be >= 3, got {n}")
    start = -(n // 2)
    return np.arange(start, start + n, dtype=float)


def cubic(t):
    return 0.01 * np.asarray(t, dtype=float) ** 3 + 1.0


def sample_cubic(n: int) -> np.ndarray:
    """``0.01 n^3 + 1`` on :func:`cubic_grid` (unit sampling period)."""
    return cubic(cubic_grid(n))


def sample_kinematic(t):
    """Position of an object moving at 1 m/s until t=6, decelerating at
    0.125 m/s^2 until it stops at 10 m (t=14), then resting until t=20."""
    t_arr = np.asarray(t, dtype=float)
    lo, hi = KINEMATIC_SPAN
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < lo) or np.any(t_arr > hi):
        raise ValueError(f"kinematic signal is defined on [{lo}, {hi}]")
    dt = t_arr - 6.0
    out = np.where(t_arr <= 6.0, t_arr, np.where(t_arr <= 14.0, 6.0 + dt - 0.0625 * dt**2, 10.0))
    return float(out) if out.ndim == 0 else out
