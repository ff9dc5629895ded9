"""Conjugate Bayesian prediction of Gaussian states from heterodyne data.

The prior on the mean amplitude is the complex Gaussian

    pi(theta) = exp(-|theta - xi|^2 / (2 tau2)) / (2 pi tau2),

so ``tau2`` is the per-component variance.  Each heterodyne outcome carries
per-component variance ``(N + 1) / 2``, and the posterior after ``n``
outcomes is complex Gaussian with mean ``theta_bar`` and per-component
variance ``delta2``.  The flat (Lebesgue) prior is handled as the exact
``tau2 -> infinity`` limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gaussian_states
from .gaussian_states import GaussianParams, TruncatedDensityMatrix
from .heterodyne import HeterodyneSample
from .quadrature import DEFAULT_ORDER, product_mixture

MAX_JOINT_MODES = 3
MAX_JOINT_DIM = 4096


@dataclass(frozen=True)
class PriorParams:
    """Conjugate prior on ``theta``: mean ``xi`` and per-component variance ``tau2``.

    With ``noninformative=True`` the prior is the flat measure on the complex
    plane and ``tau2`` is ignored.
    """

    xi: complex = 0j
    tau2: float = 1.0
    noninformative: bool = False

    def __post_init__(self):
        object.__setattr__(self, "xi", complex(self.xi))
        if not self.noninformative:
            if not (self.tau2 > 0 and math.isfinite(self.tau2)):
                raise ValueError(f"tau2 must be positive and finite, got {self.tau2}")

    @property
    def precision(self) -> float:
        """Per-component precision ``1/tau2``; zero for the flat prior."""
        return 0.0 if self.noninformative else 1.0 / self.tau2

    def density(self, theta):
        if self.noninformative:
            raise ValueError("the flat prior has no normalized density")
        return np.exp(-np.abs(np.asarray(theta) - self.xi) ** 2 / (2 * self.tau2)) / (2 * math.pi * self.tau2)


@dataclass(frozen=True)
class PosteriorParams:
    theta_bar: complex
    delta2: float
    n: int
    N: float

    def as_prior(self) -> PriorParams:
        return PriorParams(self.theta_bar, self.delta2)


@dataclass(frozen=True)
class PredictiveMmode:
    """Joint Bayesian predictive of ``m`` modes.

    ``delta2_tilde``, ``p`` and ``q`` are the coefficients of the quadratic
    form ``B`` in the joint P-density: with precisions ``a = 1/delta2`` and
    ``c = 2/N``, ``1/delta2_tilde = a + m c``, ``p = c delta2_tilde`` and
    ``q = a delta2_tilde``. The weights satisfy ``m p + q = 1``, which
    reduces to ``p + q = 1`` for a single mode.
    """

    m: int
    theta_bar: complex
    delta2: float
    delta2_tilde: float
    p: float
    q: float
    N: float


@dataclass(frozen=True)
class ExchangeableState:
    n: int
    prior: PriorParams
    N: float
    dim_per_mode: int
    state: TruncatedDensityMatrix

    @property
    def matrix(self) -> np.ndarray:
        return self.state.matrix


def _outcomes(sample):
    if isinstance(sample, HeterodyneSample):
        return sample.outcomes
    return np.atleast_1d(np.asarray(sample, dtype=complex))


def posterior_delta2(prior: PriorParams, n, N) -> float:
    """Posterior per-component variance after ``n`` outcomes."""
    return 1.0 / (n * 2.0 / (N + 1.0) + prior.precision)


def posterior_update(prior: PriorParams, sample, N) -> PosteriorParams:
    """Posterior over ``theta`` given heterodyne outcomes.

    ``theta_bar`` is the precision-weighted average of the outcome sum and the
    prior mean.  For the flat prior it reduces to the sample mean, with
    ``2 delta2 = (N+1)/n``.
    """
    alphas = _outcomes(sample)
    n = alphas.shape[0]
    if n == 0:
        raise ValueError("empty sample")
    if not N > 0:
        raise ValueError("N must be positive")
    lik_prec = 2.0 / (N + 1.0)
    total = n * lik_prec + prior.precision
    theta_bar = (lik_prec * alphas.sum() + prior.precision * prior.xi) / total
    return PosteriorParams(complex(theta_bar), 1.0 / total, n, float(N))


def posterior_density(theta, post: PosteriorParams):
    """``exp(-|theta - theta_bar|^2 / (2 delta2)) / (2 pi delta2)``."""
    d2 = post.delta2
    return np.exp(-np.abs(np.asarray(theta) - post.theta_bar) ** 2 / (2 * d2)) / (2 * math.pi * d2)


def plugin_predictive(theta_hat, N, m) -> list[GaussianParams]:
    """The plug-in predictive: ``m`` copies of ``rho_{theta_hat,N}``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return [GaussianParams(theta_hat, N)] * m


def predictive_single_mode(post: PosteriorParams, m=1) -> GaussianParams:
    """Gaussian parameters of the predictive seen by one mode.

    For ``m = 1`` this is the predictive itself, ``rho_{theta_bar, N + 2 delta2}``.
    For ``m > 1`` it is the symmetric (center-of-mass) mode of the joint
    predictive, ``(sqrt(m) theta_bar, N + 2 m delta2)``; the other ``m - 1``
    orthogonal modes are thermal with photon number ``N``.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    return GaussianParams(math.sqrt(m) * post.theta_bar, post.N + 2.0 * m * post.delta2)


def predictive_mmode(post: PosteriorParams, m) -> PredictiveMmode:
    if m < 1:
        raise ValueError("m must be at least 1")
    a = 1.0 / post.delta2
    c = 2.0 / post.N
    delta2_tilde = 1.0 / (a + m * c)
    return PredictiveMmode(m, post.theta_bar, post.delta2, delta2_tilde, c * delta2_tilde, a * delta2_tilde, post.N)


def predictive_joint_pdensity(pred: PredictiveMmode, beta):
    """Joint P-density ``p(beta_1, ..., beta_m | data)`` of the Bayesian predictive.

    ``beta`` has trailing axis of length ``m``; leading axes broadcast.  The
    density is

        exp(-B / (2 delta2_tilde)) / (pi (N + 2 m delta2)) / (pi N)^(m-1),

    ``B = p sum|beta_j|^2 + q |theta_bar|^2 - |p sum beta_j + q theta_bar|^2``.
    """
    beta = np.asarray(beta, dtype=complex)
    if beta.shape[-1:] != (pred.m,):
        raise ValueError(f"expected trailing axis of length {pred.m}, got shape {beta.shape}")
    B = joint_quadratic_form(pred, beta)
    N = pred.N
    norm = 1.0 / (math.pi * (N + 2.0 * pred.m * pred.delta2)) / (math.pi * N) ** (pred.m - 1)
    return norm * np.exp(-B / (2.0 * pred.delta2_tilde))


def joint_quadratic_form(pred: PredictiveMmode, beta):
    beta = np.asarray(beta, dtype=complex)
    p, q, tb = pred.p, pred.q, pred.theta_bar
    return (
        p * np.sum(np.abs(beta) ** 2, axis=-1)
        + q * abs(tb) ** 2
        - np.abs(p * beta.sum(axis=-1) + q * tb) ** 2
    )


def predictive_joint_fock(pred: PredictiveMmode, dim_per_mode, order=DEFAULT_ORDER) -> TruncatedDensityMatrix:
    """Fock matrix of the joint Bayesian predictive on ``m <= 3`` modes.

    The P-density factorizes as the posterior mixture of independent
    ``N(theta, N)`` coherent-amplitude densities, one per mode.  The matrix
    is therefore built as the posterior average of ``rho_{theta,N}^{(x) m}``,
    each factor being a Gauss-Hermite sum of coherent projectors.
    """
    if not 1 <= pred.m <= MAX_JOINT_MODES:
        raise ValueError(f"joint predictive supports 1..{MAX_JOINT_MODES} modes, got {pred.m}")
    total = dim_per_mode ** pred.m
    if total > MAX_JOINT_DIM:
        raise ValueError(f"joint predictive needs a {total}x{total} matrix, above the cap of {MAX_JOINT_DIM}")
    mat = product_mixture(pred.theta_bar, pred.delta2, pred.N, dim_per_mode, pred.m, order)
    return TruncatedDensityMatrix(mat, modes=pred.m)


def reduce_predictive_risk(theta, post: PosteriorParams, m=1):
    """``D(rho_theta^{(x) m} || sigma_pi)`` through the center-of-mass mode.

    A passive rotation of the ``m`` modes maps both the product state and the
    joint predictive onto the symmetric mode, the remaining modes being
    identical thermal states in both.  The divergence is then the
    single-mode value between ``(sqrt(m) theta, N)`` and
    ``(sqrt(m) theta_bar, N + 2 m delta2)``.  Broadcasts over ``theta``.
    """
    M = post.N + 2.0 * m * post.delta2
    root = math.sqrt(m)
    return gaussian_states.gaussian_rel_entropy(root * np.asarray(theta), post.N, root * post.theta_bar, M)


def exchangeable_state(prior: PriorParams, N, n, dim_per_mode, order=DEFAULT_ORDER) -> ExchangeableState:
    """The prior mixture ``int pi(theta) rho_{theta,N}^{(x) n} d^2 theta``."""
    if prior.noninformative:
        raise ValueError("the flat prior gives a non-normalizable mixture")
    if not 1 <= n <= 2:
        raise ValueError("exchangeable states are built for n <= 2 modes")
    mat = product_mixture(prior.xi, prior.tau2, N, dim_per_mode, n, order)
    return ExchangeableState(n, prior, float(N), dim_per_mode, TruncatedDensityMatrix(mat, modes=n))
