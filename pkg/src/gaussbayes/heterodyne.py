"""Heterodyne measurement of Gaussian states.

On ``rho_{theta,N}`` the heterodyne outcome is complex Gaussian with mean
``theta`` and complex second moment ``E|alpha - theta|^2 = N + 1``, i.e.
each real component has variance ``(N + 1) / 2``.  Throughout the package a
"variance" of a complex quantity means its complex second moment; the
per-component variance is always half of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, stream)``.

    Streams are derived through :class:`numpy.random.SeedSequence` spawn
    keys, so distinct stream indices give statistically independent
    sequences without any shared state.
    """
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class HeterodyneSample:
    outcomes: np.ndarray
    seed: int | None = None
    stream: int = 0

    def __post_init__(self):
        out = np.atleast_1d(np.asarray(self.outcomes, dtype=complex))
        if out.ndim != 1:
            raise ValueError("outcomes must be one-dimensional")
        if not np.all(np.isfinite(out)):
            raise ValueError("outcomes must be finite")
        out.setflags(write=False)
        object.__setattr__(self, "outcomes", out)

    @property
    def n(self) -> int:
        return self.outcomes.shape[0]

    def shifted(self, c) -> "HeterodyneSample":
        return HeterodyneSample(self.outcomes + c, self.seed, self.stream)


def likelihood(alpha, theta, N):
    """Outcome density ``exp(-|alpha - theta|^2 / (N+1)) / (pi (N+1))``."""
    if not N > 0:
        raise ValueError("N must be positive")
    return np.exp(-np.abs(np.asarray(alpha) - theta) ** 2 / (N + 1.0)) / (math.pi * (N + 1.0))


def log_likelihood(sample: HeterodyneSample, theta, N):
    """Joint log-density of all outcomes; broadcasts over an array of ``theta``."""
    theta = np.asarray(theta, dtype=complex)
    d2 = np.abs(sample.outcomes[..., :] - theta[..., None]) ** 2
    return -d2.sum(axis=-1) / (N + 1.0) - sample.n * math.log(math.pi * (N + 1.0))


def draw_outcomes(theta, N, n, rng: np.random.Generator) -> np.ndarray:
    """``n`` outcomes for each entry of ``theta``; result shape ``theta.shape + (n,)``."""
    theta = np.asarray(theta, dtype=complex)
    scale = math.sqrt((N + 1.0) / 2.0)
    shape = theta.shape + (n,)
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return theta[..., None] + scale * (re + 1j * im)


def sample(theta, N, n, seed, stream=0) -> HeterodyneSample:
    """Simulate ``n`` heterodyne outcomes on ``rho_{theta,N}``; deterministic in ``(seed, stream)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not N > 0:
        raise ValueError("N must be positive")
    rng = make_rng(seed, stream)
    return HeterodyneSample(draw_outcomes(complex(theta), N, n, rng), seed, stream)


def mle(sample: HeterodyneSample) -> complex:
    """Maximum likelihood estimate of ``theta``: the sample mean."""
    outcomes = sample.outcomes if isinstance(sample, HeterodyneSample) else np.asarray(sample, dtype=complex)
    if outcomes.size == 0:
        raise ValueError("empty sample")
    return complex(outcomes.mean())
