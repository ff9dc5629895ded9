"""Coherent and displaced thermal states in a truncated Fock basis.

A Gaussian state ``rho_{theta,N}`` is the thermal state with mean photon
number ``N`` displaced by the complex amplitude ``theta``.  Besides building
the states as matrices, this module carries the closed-form relative entropy
between two such states and the intermediate traces used to derive it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fock_linalg import (
    DEFAULT_LOG_FLOOR,
    PSD_TOL,
    TruncationError,
    annihilation_op,
    displacement_op,
    displacement_required_dim,
    hermitian_deviation,
    hermitian_eig,
    trace_product,
)

__all__ = [
    "GaussianParams",
    "TruncatedDensityMatrix",
    "CoherentVector",
    "SupportMismatchError",
    "TruncationError",
    "required_dim",
    "thermal_fock",
    "coherent_fock",
    "gaussian_state_fock",
    "product_state",
    "gaussian_rel_entropy",
    "rel_entropy_closed",
    "rel_entropy_numeric",
    "log_thermal_expectation",
    "cross_trace",
    "thermal_entropy",
    "expectation",
]

TRACE_TOL = 1e-6
DEFAULT_DIM = 60


class SupportMismatchError(ValueError):
    """Raised when rho puts non-negligible weight where sigma was floored."""


@dataclass(frozen=True)
class GaussianParams:
    """Mean amplitude and thermal photon number of a single-mode Gaussian state."""

    mean: complex
    photon_number: float

    def __post_init__(self):
        object.__setattr__(self, "mean", complex(self.mean))
        N = float(self.photon_number)
        if not (N > 0 and math.isfinite(N)):
            raise ValueError(f"photon_number must be positive and finite, got {self.photon_number}")
        if not np.isfinite(self.mean):
            raise ValueError("mean must be finite")
        object.__setattr__(self, "photon_number", N)


@dataclass(frozen=True)
class TruncatedDensityMatrix:
    """A density operator restricted to the lowest ``dim`` Fock levels.

    ``log_matrix`` is the matrix logarithm when it is known exactly from the
    way the state was built (diagonal thermal spectrum, displacement
    covariance, tensor products).  Dense eigensolvers cannot resolve
    eigenvalues much below ``1e-16`` of the largest one, so when available it
    replaces a numerical logarithm in :func:`rel_entropy_numeric`.

    The matrix is never renormalized; ``trace_deficit`` is ``1 - Tr``.
    """

    matrix: np.ndarray
    log_matrix: np.ndarray | None = field(default=None, repr=False)
    modes: int = 1

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace_deficit(self) -> float:
        return 1.0 - float(np.trace(self.matrix).real)

    def validate(self, trace_tol=TRACE_TOL, herm_tol=1e-10, eig_tol=1e-10):
        """Check Hermiticity, positivity and the trace window; return self."""
        dev = hermitian_deviation(self.matrix)
        if dev > herm_tol:
            raise ValueError(f"state is not Hermitian (deviation {dev:.3e})")
        lam_min = np.linalg.eigvalsh(self.matrix)[0]
        if lam_min < -eig_tol:
            raise ValueError(f"state has negative eigenvalue {lam_min:.3e}")
        deficit = self.trace_deficit
        if not (-1e-12 <= deficit <= trace_tol):
            raise ValueError(f"trace deficit {deficit:.3e} outside [-1e-12, {trace_tol:g}]")
        return self

    def log(self, floor=DEFAULT_LOG_FLOOR):
        """Return ``(log_matrix, floored_eigen)``.

        ``floored_eigen`` is ``None`` when the logarithm is exact, otherwise
        the pair ``(eigenvectors, mask)`` of eigen-directions raised to
        ``floor``.
        """
        if self.log_matrix is not None:
            return self.log_matrix, None
        eig = hermitian_eig(self.matrix)
        w = eig.eigenvalues
        if w[0] < -PSD_TOL:
            raise ValueError(f"state is not positive semidefinite: min eigenvalue {w[0]:.3e}")
        L = eig.apply(lambda lam: np.log(np.maximum(lam, floor)))
        return 0.5 * (L + L.conj().T), (eig.eigenvectors, w < floor)


@dataclass(frozen=True)
class CoherentVector:
    """Fock amplitudes ``exp(-|alpha|^2/2) alpha^n / sqrt(n!)`` of ``|alpha>``."""

    alpha: complex
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


def required_dim(theta, N) -> int:
    """Fock cutoff needed for ``rho_{theta,N}``: ``4(|theta|^2 + N) + 30``."""
    return int(math.ceil(4.0 * (abs(theta) ** 2 + N))) + 30


def _check_guard(theta, N, dim):
    need = required_dim(theta, N)
    if dim < need:
        raise TruncationError(
            f"dim={dim} too small for |theta|={abs(theta):.3g}, N={N:g}; need dim >= {need}", need
        )


def _thermal_log_diag(N, dim):
    n = np.arange(dim, dtype=float)
    return -math.log1p(N) + n * math.log(N / (N + 1.0))


def thermal_fock(N, dim, check_guard=True) -> TruncatedDensityMatrix:
    """Thermal state ``sum_n N^n/(N+1)^(n+1) |n><n|`` on ``dim`` levels."""
    N = GaussianParams(0, N).photon_number
    if check_guard:
        _check_guard(0, N, dim)
    log_diag = _thermal_log_diag(N, dim)
    return TruncatedDensityMatrix(np.diag(np.exp(log_diag)).astype(complex), np.diag(log_diag).astype(complex))


def coherent_fock(alpha, dim, check_guard=True) -> CoherentVector:
    """Truncated coherent state vector ``|alpha>``."""
    alpha = complex(alpha)
    if check_guard:
        need = int(math.ceil(4.0 * abs(alpha) ** 2)) + 30
        if dim < need:
            raise TruncationError(f"coherent state |{alpha}> needs dim >= {need}, got {dim}", need)
    amps = np.empty(dim, dtype=complex)
    amps[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for k in range(1, dim):
        amps[k] = amps[k - 1] * alpha / math.sqrt(k)
    return CoherentVector(alpha, amps)


def _padding(theta) -> int:
    return max(20, displacement_required_dim(theta))


def gaussian_state_fock(params: GaussianParams, dim, check_guard=True) -> TruncatedDensityMatrix:
    """Displaced thermal state ``D(theta) rho_{0,N} D(theta)^dagger``.

    The displacement is carried out on an enlarged space and the result is
    cropped to ``dim`` levels, so the stored entries are the true matrix
    elements of the infinite-dimensional state.  The logarithm is obtained
    the same way from the diagonal logarithm of the thermal state.
    """
    if not isinstance(params, GaussianParams):
        params = GaussianParams(*params)
    theta, N = params.mean, params.photon_number
    if check_guard:
        _check_guard(theta, N, dim)
    if theta == 0:
        return thermal_fock(N, dim, check_guard=False)
    work = dim + _padding(theta)
    D = displacement_op(theta, work)
    log_diag = _thermal_log_diag(N, work)
    rho = (D * np.exp(log_diag)) @ D.conj().T
    log_rho = (D * log_diag) @ D.conj().T
    rho = rho[:dim, :dim]
    log_rho = log_rho[:dim, :dim]
    return TruncatedDensityMatrix(0.5 * (rho + rho.conj().T), 0.5 * (log_rho + log_rho.conj().T))


def product_state(states, max_dim=4096) -> TruncatedDensityMatrix:
    """Tensor product of truncated states; the logarithm is assembled as a sum."""
    states = list(states)
    total = math.prod(s.dim for s in states)
    if total > max_dim:
        raise ValueError(f"product dimension {total} exceeds the cap of {max_dim}")
    mat = np.ones((1, 1), dtype=complex)
    for s in states:
        mat = np.kron(mat, s.matrix)
    log_mat = None
    if all(s.log_matrix is not None for s in states):
        log_mat = np.zeros((total, total), dtype=complex)
        for k, s in enumerate(states):
            left = math.prod(t.dim for t in states[:k])
            right = math.prod(t.dim for t in states[k + 1:])
            log_mat += np.kron(np.kron(np.eye(left), s.log_matrix), np.eye(right))
    return TruncatedDensityMatrix(mat, log_mat, modes=sum(s.modes for s in states))


def gaussian_rel_entropy(mean_p, N, mean_q, M):
    """Closed-form ``D(rho_{mean_p,N} || rho_{mean_q,M})``; broadcasts over arrays.

    Written in the manifestly non-negative form
    ``log((M+1)/(N+1)) + N log(N(M+1)/((N+1)M)) + |mean_p - mean_q|^2 log((M+1)/M)``.
    """
    N = np.asarray(N, dtype=float)
    M = np.asarray(M, dtype=float)
    dist2 = np.abs(np.asarray(mean_p) - np.asarray(mean_q)) ** 2
    return (
        np.log1p(M) - np.log1p(N)
        + N * (np.log(N) - np.log1p(N) + np.log1p(M) - np.log(M))
        + dist2 * (np.log1p(M) - np.log(M))
    )


def rel_entropy_closed(P: GaussianParams, Q: GaussianParams) -> float:
    """Quantum relative entropy between two Gaussian states in closed form."""
    val = float(gaussian_rel_entropy(P.mean, P.photon_number, Q.mean, Q.photon_number))
    # exact zero at P == Q despite rounding in the log terms
    return 0.0 if P == Q else val


def rel_entropy_numeric(rho: TruncatedDensityMatrix, sigma: TruncatedDensityMatrix,
                        floor=DEFAULT_LOG_FLOOR, support_tol=1e-8, full_output=False):
    """``Tr[rho (log rho - log sigma)]`` evaluated with matrices.

    Parameters
    ----------
    rho, sigma : TruncatedDensityMatrix
        States of equal dimension.
    floor : float
        Eigenvalue floor for numerically computed logarithms.
    support_tol : float
        Largest tolerated fraction of ``rho``'s weight lying on eigen-directions
        of ``sigma`` that were floored.
    full_output : bool
        If true, also return a dict with ``floored_weight`` and
        ``imag_residue``.

    Raises
    ------
    SupportMismatchError
        When the floored weight exceeds ``support_tol``.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    log_rho, _ = rho.log(floor)
    log_sigma, floored = sigma.log(floor)
    floored_weight = 0.0
    if floored is not None:
        V, mask = floored
        if mask.any():
            Vf = V[:, mask]
            weight = np.einsum("ik,ij,jk->", Vf.conj(), rho.matrix, Vf).real
            floored_weight = float(weight / np.trace(rho.matrix).real)
    if floored_weight > support_tol:
        raise SupportMismatchError(
            f"rho has weight {floored_weight:.3e} on the floored part of sigma's spectrum"
        )
    value = trace_product(rho.matrix, log_rho - log_sigma)
    info = {"floored_weight": floored_weight, "imag_residue": abs(value.imag)}
    if full_output:
        return value.real, info
    return value.real


def log_thermal_expectation(alpha, M) -> float:
    """Coherent-state diagonal element ``<alpha| log rho_{0,M} |alpha>``."""
    if not M > 0:
        raise ValueError("M must be positive")
    return -math.log1p(M) + abs(alpha) ** 2 * math.log(M / (M + 1.0))


def cross_trace(N, eta, M) -> float:
    """``Tr rho_{-eta,N} log rho_{0,M} = log(1/(M+1)) + (|eta|^2 + N) log(M/(M+1))``."""
    if not (N > 0 and M > 0):
        raise ValueError("photon numbers must be positive")
    return -math.log1p(M) + (abs(eta) ** 2 + N) * math.log(M / (M + 1.0))


def thermal_entropy(N) -> float:
    """von Neumann entropy ``(N+1) log(N+1) - N log N`` of a thermal state."""
    return (N + 1.0) * math.log1p(N) - N * math.log(N)


def expectation(state: TruncatedDensityMatrix, op) -> complex:
    """``Tr(rho op)``."""
    return trace_product(state.matrix, op)


def mean_amplitude(state: TruncatedDensityMatrix) -> complex:
    return expectation(state, annihilation_op(state.dim))
