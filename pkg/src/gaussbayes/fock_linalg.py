"""Dense complex linear algebra on truncated Fock spaces.

Everything here operates on plain ``numpy`` complex arrays.  The functions
are pure: inputs are never modified in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-12
DEFAULT_LOG_FLOOR = 1e-14

# Upper bound on the side length of any matrix built by ``kron``.
MAX_KRON_DIM = 4096


class TruncationError(ValueError):
    """A Fock cutoff too small for the requested state or operator."""

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


@dataclass(frozen=True)
class HermitianEigen:
    """Eigendecomposition ``H = V diag(eigenvalues) V^dagger``.

    ``eigenvalues`` are real and ascending; the columns of ``eigenvectors``
    are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T

    def apply(self, func) -> np.ndarray:
        """Return ``V diag(func(eigenvalues)) V^dagger``."""
        V = self.eigenvectors
        return (V * func(self.eigenvalues)) @ V.conj().T


def _as_square(A, name="matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def hermitian_deviation(H) -> float:
    """Largest elementwise modulus of ``H - H^dagger``."""
    H = np.asarray(H)
    return float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0


def jacobi_eigh(H, tol=1e-13, max_sweeps=60):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``H[p, q]`` and then
    applies an ordinary real Jacobi rotation.  Iteration stops once the
    off-diagonal Frobenius norm falls below ``tol * ||H||_F``.

    Returns
    -------
    eigenvalues, eigenvectors : ndarray
        Unsorted eigenvalues and the matching eigenvector columns.
    """
    A = np.array(H, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if scale == 0.0 or n == 1:
        return A.diagonal().real.copy(), V
    off_mask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.linalg.norm(A[off_mask]) < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                # phase rotation making A[p, q] real and positive
                u = (apq / mag).conjugate()
                A[:, q] *= u
                A[q, :] *= u.conjugate()
                V[:, q] *= u
                app = A[p, p].real
                aqq = A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return A.diagonal().real.copy(), V


def hermitian_eig(H, method="lapack") -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix with ascending eigenvalues.

    Parameters
    ----------
    H : array_like
        Square complex matrix, Hermitian to within ``1e-12`` elementwise.
    method : {"lapack", "jacobi"}
        ``"lapack"`` calls :func:`numpy.linalg.eigh`; ``"jacobi"`` uses the
        self-contained :func:`jacobi_eigh`, practical up to a few hundred rows.

    Raises
    ------
    ValueError
        If ``H`` is not square, not finite or not Hermitian.
    """
    H = _as_square(H)
    dev = hermitian_deviation(H)
    if dev > HERMITIAN_TOL:
        raise ValueError(f"matrix is not Hermitian: max |H - H^dagger| = {dev:.3e}")
    H = 0.5 * (H + H.conj().T)
    if method == "lapack":
        w, V = np.linalg.eigh(H)
    elif method == "jacobi":
        w, V = jacobi_eigh(H)
        order = np.argsort(w, kind="stable")
        w, V = w[order], V[:, order]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return HermitianEigen(np.asarray(w, dtype=float), V)


def matrix_log_psd(rho, floor=DEFAULT_LOG_FLOOR, return_floored_mass=False, method="lapack"):
    """Matrix logarithm of a positive semidefinite Hermitian matrix.

    Eigenvalues below ``floor`` are replaced by ``floor`` before taking the
    logarithm, which keeps ``log`` finite on truncated states whose tail
    eigenvalues are numerically zero.

    Parameters
    ----------
    rho : array_like
        Hermitian PSD matrix (eigenvalues ``>= -1e-12``).
    floor : float
        Positive eigenvalue floor.
    return_floored_mass : bool
        Also return the summed (non-negative part of the) eigenvalues that
        were raised to ``floor``.

    Returns
    -------
    log_rho : ndarray
    floored_mass : float, optional
    """
    if not floor > 0:
        raise ValueError("floor must be positive")
    eig = hermitian_eig(rho, method=method)
    w = eig.eigenvalues
    if w[0] < -PSD_TOL:
        raise ValueError(f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e}")
    below = w < floor
    L = eig.apply(lambda lam: np.log(np.maximum(lam, floor)))
    L = 0.5 * (L + L.conj().T)
    if return_floored_mass:
        return L, float(np.sum(np.clip(w[below], 0.0, None)))
    return L


def trace_product(A, B) -> complex:
    """``Tr(A B)`` without forming the product."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or A.shape != B.shape[::-1]:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.einsum("ij,ji->", A, B))


def kron(A, B, max_dim=MAX_KRON_DIM) -> np.ndarray:
    """Kronecker product with a guard on the resulting matrix size."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    rows = A.shape[0] * B.shape[0]
    cols = A.shape[1] * B.shape[1]
    if max(rows, cols) > max_dim:
        raise ValueError(f"kron result {rows}x{cols} exceeds the cap of {max_dim}")
    return np.kron(A, B)


def annihilation_op(dim: int) -> np.ndarray:
    """Truncated annihilation operator, ``a|n> = sqrt(n)|n-1>``."""
    if dim < 2:
        raise ValueError("annihilation operator needs dim >= 2")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def creation_op(dim: int) -> np.ndarray:
    return annihilation_op(dim).conj().T


def displacement_required_dim(theta) -> int:
    """Smallest dimension accepted by :func:`displacement_op` for ``theta``."""
    if theta == 0:
        return 1
    return int(math.ceil(4.0 * abs(theta) ** 2)) + 10


def displacement_op(theta, dim: int) -> np.ndarray:
    """Truncated displacement operator ``exp(theta a^dagger - conj(theta) a)``.

    The anti-Hermitian generator ``G`` is written as ``G = iK`` with ``K``
    Hermitian, so ``exp(G) = V diag(exp(i k)) V^dagger`` from the
    eigendecomposition of ``K``.  The result is exactly unitary on the
    truncated space; its matrix elements agree with the infinite-dimensional
    operator only well below the cutoff.

    Raises
    ------
    TruncationError
        If ``dim < 4|theta|^2 + 10``.
    """
    theta = complex(theta)
    if theta == 0:
        return np.eye(dim, dtype=complex)
    need = displacement_required_dim(theta)
    if dim < need:
        raise TruncationError(
            f"displacement by |theta|={abs(theta):.3g} needs dim >= {need}, got {dim}", need
        )
    a = annihilation_op(dim)
    generator = theta * a.conj().T - theta.conjugate() * a
    K = -1j * generator
    eig = hermitian_eig(0.5 * (K + K.conj().T))
    return eig.apply(lambda k: np.exp(1j * k))
