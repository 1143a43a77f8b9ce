"""Validation helpers for Hermitian positive-semidefinite matrices."""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgumentError, NumericError

HERMITIAN_RTOL = 1e-10
PSD_RTOL = 1e-8


def as_square(mat) -> np.ndarray:
    m = np.asarray(mat, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidArgumentError(f"expected a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidArgumentError("matrix has non-finite entries")
    return m


def is_hermitian(mat, rtol: float = HERMITIAN_RTOL) -> bool:
    m = np.asarray(mat)
    scale = max(np.max(np.abs(m)), 1e-300)
    return bool(np.max(np.abs(m - m.conj().T)) <= rtol * scale)


def hermitize(mat) -> np.ndarray:
    """Return the Hermitian part of ``mat``."""
    m = np.asarray(mat, dtype=complex)
    return 0.5 * (m + m.conj().T)


def check_psd(mat, rtol: float = PSD_RTOL, error=InvalidArgumentError) -> np.ndarray:
    """Return eigenvalues (ascending) after checking PSD within ``rtol``.

    Raises ``error`` if the matrix is not Hermitian or if its smallest
    eigenvalue is below ``-rtol * largest``.
    """
    m = as_square(mat)
    if not is_hermitian(m):
        raise error("matrix is not Hermitian")
    w = np.linalg.eigvalsh(hermitize(m))
    top = max(w[-1], 0.0)
    if w[0] < -rtol * top or (top == 0.0 and w[0] < 0.0):
        raise error(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e}, max {top:.3e})")
    return w


def check_correlation(mat, tol: float = 1e-10) -> None:
    """Assert the invariants of a correlation matrix.

    Hermitian, unit diagonal, entries bounded by one, and PSD.
    """
    m = as_square(mat)
    if not is_hermitian(m, tol):
        raise NumericError("correlation matrix is not Hermitian")
    if np.max(np.abs(np.diag(m) - 1.0)) > tol:
        raise NumericError("correlation matrix diagonal is not unity")
    if np.max(np.abs(m)) > 1.0 + tol:
        raise NumericError("correlation magnitude exceeds one")
    check_psd(m, error=NumericError)


def check_covariance(mat, tol: float = 1e-10) -> None:
    """Assert the invariants of a covariance matrix (diagonal in [0, 1])."""
    m = as_square(mat)
    if not is_hermitian(m, tol):
        raise NumericError("covariance matrix is not Hermitian")
    d = np.diag(m)
    if np.max(np.abs(d.imag)) > tol or d.real.min() < -tol or d.real.max() > 1.0 + tol:
        raise NumericError("covariance diagonal outside [0, 1]")
    check_psd(m, error=NumericError)


def psd_sqrt(mat) -> np.ndarray:
    """Hermitian square root, clamping tiny negative eigenvalues to zero."""
    m = hermitize(as_square(mat))
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T
