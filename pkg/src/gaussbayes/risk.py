"""Average relative-entropy risks of plug-in and Bayesian predictives.

Closed forms are exact.  Monte Carlo estimators draw ``theta`` from the prior
and heterodyne data given ``theta``, then average the per-replicate
divergence.  Replicates are split into fixed-size chunks, each with its own
random stream derived from ``(seed, chunk index)``.  Chunk statistics merge
in chunk order, so the result does not depend on how many workers ran them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import gaussian_states
from .bayes_predict import PriorParams, posterior_delta2, predictive_single_mode, PosteriorParams
from .gaussian_states import GaussianParams, gaussian_state_fock, rel_entropy_numeric, required_dim
from .heterodyne import draw_outcomes, make_rng

CHUNK_SIZE = 10_000
MIN_MC_SAMPLES = 100


@dataclass(frozen=True)
class ExperimentConfig:
    N: float
    n: int
    m: int
    prior: PriorParams = field(default_factory=PriorParams)
    mc_samples: int = 100_000
    seed: int = 0
    truncation_dim: int = 60

    def __post_init__(self):
        if not (self.N > 0 and math.isfinite(self.N)):
            raise ValueError("N must be positive")
        for name in ("n", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if isinstance(self.mc_samples, bool) or not isinstance(self.mc_samples, (int, np.integer)):
            raise ValueError("mc_samples must be an integer")
        if self.mc_samples < MIN_MC_SAMPLES:
            raise ValueError(f"mc_samples must be at least {MIN_MC_SAMPLES}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        need = required_dim(0, self.N)
        if self.truncation_dim < need:
            raise ValueError(f"truncation_dim must be at least {need} for N={self.N:g}")


@dataclass(frozen=True)
class RiskReport:
    r_plugin_closed: float
    r_bayes_closed: float
    r_star: float | None
    r_plugin_mc: float | None
    r_plugin_stderr: float | None
    r_bayes_mc: float | None
    r_bayes_stderr: float | None
    inequality_ok: bool
    numeric_check_deviation: float | None = None

    def mc_consistent(self, k=3.0) -> bool:
        if self.r_plugin_mc is None:
            return True
        return (abs(self.r_plugin_mc - self.r_plugin_closed) <= k * self.r_plugin_stderr
                and abs(self.r_bayes_mc - self.r_bayes_closed) <= k * self.r_bayes_stderr)


def risk_plugin_closed(N, n, m) -> float:
    """``(m/n) (N+1) log((N+1)/N)``."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    return m / n * (N + 1.0) * math.log((N + 1.0) / N)


def risk_bayes_closed(N, n, m, prior: PriorParams) -> float:
    """Average divergence of the Bayesian predictive.

    With ``M = N + 2 m delta2``:
    ``log((M+1)/(N+1)) + N log(N/(N+1)) + (N + 2 m delta2) log((M+1)/M)``.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    spread = 2.0 * m * posterior_delta2(prior, n, N)
    M = N + spread
    return (
        math.log1p(M) - math.log1p(N)
        + N * (math.log(N) - math.log1p(N))
        + (N + spread) * (math.log1p(M) - math.log(M))
    )


def risk_star(N) -> float:
    """Flat-prior (supremum over tau2) risk of the one-sample, one-mode Bayesian predictive."""
    if not N > 0:
        raise ValueError("N must be positive")
    return (
        -math.log1p(N) + N * math.log(N / (N + 1.0))
        + math.log(2.0 * N + 2.0) - (2.0 * N + 1.0) * math.log((2.0 * N + 1.0) / (2.0 * N + 2.0))
    )


# -- Monte Carlo -------------------------------------------------------------


@dataclass(frozen=True)
class _Moments:
    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, x):
        x = np.asarray(x, dtype=float)
        mu = float(x.mean())
        return cls(x.size, mu, float(np.sum((x - mu) ** 2)))

    def merge(self, other: "_Moments") -> "_Moments":
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return _Moments(n, mean, m2)

    def estimate(self):
        var = self.m2 / (self.count - 1)
        return self.mean, math.sqrt(var / self.count)


def _draw_chunk(config: ExperimentConfig, chunk: int, size: int):
    prior = config.prior
    if prior.noninformative:
        raise ValueError("theta cannot be drawn from the flat prior")
    rng = make_rng(config.seed, chunk)
    sd = math.sqrt(prior.tau2)
    theta = prior.xi + sd * (rng.standard_normal(size) + 1j * rng.standard_normal(size))
    alphas = draw_outcomes(theta, config.N, config.n, rng)
    return theta, alphas


def _chunk_values(kind, config: ExperimentConfig, chunk: int, size: int):
    theta, alphas = _draw_chunk(config, chunk, size)
    N, n, m = config.N, config.n, config.m
    if kind == "plugin":
        theta_hat = alphas.mean(axis=-1)
        return m * gaussian_states.gaussian_rel_entropy(theta, N, theta_hat, N)
    if kind == "bayes":
        prior = config.prior
        delta2 = posterior_delta2(prior, n, N)
        theta_bar = (2.0 / (N + 1.0) * alphas.sum(axis=-1) + prior.precision * prior.xi) * delta2
        root = math.sqrt(m)
        return gaussian_states.gaussian_rel_entropy(root * theta, N, root * theta_bar, N + 2.0 * m * delta2)
    if kind == "mle_error":
        return np.abs(alphas.mean(axis=-1) - theta) ** 2
    if kind == "posterior_error":
        prior = config.prior
        delta2 = posterior_delta2(prior, n, N)
        theta_bar = (2.0 / (N + 1.0) * alphas.sum(axis=-1) + prior.precision * prior.xi) * delta2
        return np.abs(theta_bar - theta) ** 2
    raise ValueError(f"unknown estimator kind {kind!r}")


def _chunks(total):
    sizes = [CHUNK_SIZE] * (total // CHUNK_SIZE)
    if total % CHUNK_SIZE:
        sizes.append(total % CHUNK_SIZE)
    return list(enumerate(sizes))


def mc_average(kind, config: ExperimentConfig, workers=None):
    """Sample mean and standard error of a per-replicate quantity.

    ``kind`` is one of ``"plugin"``, ``"bayes"`` (relative entropies of the
    predictives), ``"mle_error"`` (``|mean(alpha) - theta|^2``) or
    ``"posterior_error"`` (``|theta_bar - theta|^2``).
    """
    if config.prior.noninformative:
        raise ValueError("Monte Carlo risk needs a proper prior to draw theta from")
    if config.mc_samples < MIN_MC_SAMPLES:
        raise ValueError(f"mc_samples must be at least {MIN_MC_SAMPLES}")
    chunks = _chunks(config.mc_samples)
    workers = workers or os.cpu_count() or 1

    def run(item):
        idx, size = item
        return _Moments.of(_chunk_values(kind, config, idx, size))

    if workers == 1 or len(chunks) == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    total = parts[0]
    for part in parts[1:]:
        total = total.merge(part)
    return total.estimate()


def mc_risk(kind, config: ExperimentConfig, workers=None):
    """Monte Carlo average relative entropy of the ``"plugin"`` or ``"bayes"`` predictive."""
    if kind not in ("plugin", "bayes"):
        raise ValueError(f"kind must be 'plugin' or 'bayes', got {kind!r}")
    return mc_average(kind, config, workers)


# -- inequalities and sweeps -------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    ok: bool
    min_margin: float
    star_ok: bool | None
    min_star_margin: float | None
    points: list = field(default_factory=list, repr=False)

    def __bool__(self):
        return self.ok


def inequality_check(Ns, taus, n, m, xi=0j) -> InequalityReport:
    """Check ``R_p > R_pi`` on a grid; for ``n = m = 1`` also ``R_p > R_* >= R_pi``.

    ``taus`` lists prior variances ``tau2``; ``math.inf`` selects the flat prior.
    """
    Ns, taus = list(Ns), list(taus)
    if not Ns or not taus:
        raise ValueError("grids must be nonempty")
    single = n == 1 and m == 1
    ok = True
    star_ok = True if single else None
    min_margin = math.inf
    min_star = math.inf if single else None
    points = []
    for N in Ns:
        rp = risk_plugin_closed(N, n, m)
        rs = risk_star(N) if single else None
        for tau2 in taus:
            prior = PriorParams(xi, noninformative=True) if math.isinf(tau2) else PriorParams(xi, tau2)
            rb = risk_bayes_closed(N, n, m, prior)
            margin = rp - rb
            ok &= margin > 0
            min_margin = min(min_margin, margin)
            if single:
                # rounding slack for the flat-prior point where R_pi == R_*
                star_margin = min(rp - rs, rs - rb + 1e-12)
                star_ok &= rp > rs and rs >= rb - 1e-12
                min_star = min(min_star, star_margin)
            points.append((N, tau2, rp, rb, margin))
    return InequalityReport(bool(ok and (star_ok is not False)), min_margin, star_ok, min_star, points)


def risk_curve(N, n, m, tau2_grid, xi=0j) -> np.ndarray:
    """Rows ``(tau2, R_p, R_pi, R_p - R_pi)`` over an ascending ``tau2`` grid."""
    grid = np.asarray(tau2_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("tau2 grid must be a nonempty 1-D sequence")
    if np.any(np.diff(grid) <= 0) or grid[0] <= 0:
        raise ValueError("tau2 grid must be positive and strictly ascending")
    rp = risk_plugin_closed(N, n, m)
    rows = []
    for tau2 in grid:
        rb = risk_bayes_closed(N, n, m, PriorParams(xi, float(tau2)))
        rows.append((tau2, rp, rb, rp - rb))
    return np.array(rows)


def numeric_replicate_deviation(config: ExperimentConfig) -> float | None:
    """Closed vs matrix relative entropy for one simulated ``n``-sample, one-mode replicate.

    Amplitudes are scaled toward the origin when needed so the states fit in
    ``config.truncation_dim`` levels.  Returns ``None`` unless ``m == 1``.
    """
    if config.m != 1 or config.prior.noninformative:
        return None
    theta, alphas = _draw_chunk(config, chunk=2**32, size=1)
    post = PosteriorParams(0j, posterior_delta2(config.prior, config.n, config.N), config.n, config.N)
    theta_bar = (2.0 / (config.N + 1.0) * alphas[0].sum() + config.prior.precision * config.prior.xi) * post.delta2
    theta = complex(theta[0])
    M = predictive_single_mode(post).photon_number
    # largest radius with 4(|z|^2 + M) + 30 <= dim
    radius = math.sqrt(max(0.0, (config.truncation_dim - 31) / 4.0 - M))
    big = max(abs(theta), abs(theta_bar))
    if big > radius:
        theta, theta_bar = theta * radius / big, theta_bar * radius / big
    P = GaussianParams(theta, config.N)
    Q = GaussianParams(theta_bar, M)
    dim = config.truncation_dim
    numeric = rel_entropy_numeric(gaussian_state_fock(P, dim), gaussian_state_fock(Q, dim))
    return abs(numeric - gaussian_states.rel_entropy_closed(P, Q))


def risk_report(config: ExperimentConfig, workers=None) -> RiskReport:
    prior = config.prior
    rp = risk_plugin_closed(config.N, config.n, config.m)
    rb = risk_bayes_closed(config.N, config.n, config.m, prior)
    rs = risk_star(config.N) if config.n == config.m == 1 else None
    ineq = rp > rb and (rs is None or (rp > rs and rs >= rb - 1e-12))
    if prior.noninformative:
        return RiskReport(rp, rb, rs, None, None, None, None, bool(ineq))
    pm, pse = mc_risk("plugin", config, workers)
    bm, bse = mc_risk("bayes", config, workers)
    return RiskReport(rp, rb, rs, pm, pse, bm, bse, bool(ineq), numeric_replicate_deviation(config))
