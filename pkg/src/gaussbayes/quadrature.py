"""Gauss-Hermite rules on the complex plane and Gaussian mixtures of states.

The central object is the mixture

    S = int d^2 theta  g(theta) rho_{theta,N}^{(x) m},

with ``g`` a complex Gaussian density, where each ``rho_{theta,N}`` is itself
the mixture of coherent projectors ``int exp(-|beta-theta|^2/N)/(pi N) |beta><beta|``.
Truncated to ``dim`` levels, every matrix element of a coherent projector is
``exp(-|beta|^2)`` times a polynomial of degree ``<= 2(dim - 1)``.  Folding the
exponential into the Gaussian weight leaves a pure polynomial, so the rules
below pick the smallest order that integrates it exactly.
"""

from __future__ import annotations

import math

import numpy as np

DEFAULT_ORDER = 24


def gauss_hermite_complex(order, mean=0.0, var=0.5):
    """Tensor Gauss-Hermite rule for a complex Gaussian.

    Parameters
    ----------
    order : int
        Nodes per real axis.
    mean : complex
        Center of the Gaussian.
    var : float
        Per-component variance (the complex second moment is ``2 * var``).

    Returns
    -------
    nodes : ndarray of complex, shape (order**2,)
    weights : ndarray of float, summing to one
    """
    x, w = np.polynomial.hermite.hermgauss(order)
    x = x * math.sqrt(2.0 * var)
    w = w / math.sqrt(math.pi)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return (mean + X + 1j * Y).ravel(), np.outer(w, w).ravel()


def gauss_hermite_real(order, mean, cov):
    """Tensor Gauss-Hermite rule for a real multivariate normal ``N(mean, cov)``."""
    mean = np.asarray(mean, dtype=float)
    d = mean.shape[0]
    L = np.linalg.cholesky(np.asarray(cov, dtype=float))
    x, w = np.polynomial.hermite.hermgauss(order)
    x = x * math.sqrt(2.0)
    w = w / math.sqrt(math.pi)
    grids = np.meshgrid(*([x] * d), indexing="ij")
    Z = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w] * d), indexing="ij")
    W = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return mean + Z @ L.T, W


def _fock_scale(dim):
    return np.sqrt(np.array([math.factorial(k) for k in range(dim)], dtype=float))


def displaced_thermal_unnormalized(thetas, N, dim, order=None):
    """``exp(|theta|^2/(N+1)) rho_{theta,N}`` for each theta, built from coherent projectors.

    The factor ``exp(-|theta|^2/(N+1))`` is left out so that callers can fold
    it into their own Gaussian weight; the remaining entries are polynomials
    in ``theta``.
    """
    order = max(order or 0, dim)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=complex))
    # exp(-|b-t|^2/N) exp(-|b|^2) = exp(-|t|^2/(N+1)) exp(-(N+1)/N |b - t/(N+1)|^2)
    b0, wb = gauss_hermite_complex(order, 0.0, N / (2.0 * (N + 1.0)))
    n = np.arange(dim)
    scale = _fock_scale(dim)
    out = np.empty((thetas.size, dim, dim), dtype=complex)
    for k, t in enumerate(thetas):
        b = b0 + t / (N + 1.0)
        V = b[:, None] ** n[None, :] / scale
        out[k] = (V.T * wb) @ V.conj()
    return out / (N + 1.0)


def product_mixture(center, var, N, dim, m, order=DEFAULT_ORDER, node_block=256):
    """``int g(theta) rho_{theta,N}^{(x) m} d^2 theta`` for ``g`` complex Gaussian.

    Parameters
    ----------
    center : complex
        Mean of ``g``.
    var : float
        Per-component variance of ``g``; must be positive.
    N : float
        Thermal photon number of each factor.
    dim : int
        Fock levels per mode.
    m : int
        Number of modes.
    order : int
        Minimum nodes per real axis; raised to the degree-exact value.

    Returns
    -------
    ndarray of shape (dim**m, dim**m)
    """
    if not var > 0:
        raise ValueError("mixing variance must be positive")
    # fold exp(-m|theta|^2/(N+1)) into g
    prec = 1.0 / var + 2.0 * m / (N + 1.0)
    new_var = 1.0 / prec
    new_center = (center / var) * new_var
    log_z = math.log(new_var / var) - 0.5 * (abs(center) ** 2 / var - abs(new_center) ** 2 / new_var)
    outer_order = max(order, m * (dim - 1) + 1)
    thetas, w = gauss_hermite_complex(outer_order, new_center, new_var)
    w = w * math.exp(log_z)
    D = dim ** m
    # nodes per block, keeping the batched partial products near 64 MB
    block = max(1, min(node_block, (1 << 22) // max(1, dim ** (2 * (m - 1)))))
    result = np.zeros((dim ** (m - 1), dim ** (m - 1), dim, dim), dtype=complex)
    for start in range(0, thetas.size, block):
        sl = slice(start, start + block)
        R = displaced_thermal_unnormalized(thetas[sl], N, dim, order)
        k = R.shape[0]
        P = np.ones((k, 1, 1), dtype=complex)
        for _ in range(m - 1):
            a, b = P.shape[1:]
            P = np.einsum("kab,kcd->kacbd", P, R).reshape(k, a * dim, b * dim)
        # sum_k w_k P_k (x) R_k as one contraction over the node axis
        part = (P.reshape(k, -1).T * w[sl]) @ R.reshape(k, -1)
        result += part.reshape(result.shape)
    result = result.transpose(0, 2, 1, 3).reshape(D, D)
    return 0.5 * (result + result.conj().T)
