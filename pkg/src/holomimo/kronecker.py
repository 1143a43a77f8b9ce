"""Receive covariance from embedded patterns and port efficiencies.

The covariance is the entry-wise product of the pattern correlation matrix
and the efficiency matrix ``sqrt(e) sqrt(e)^T``.  Pattern correlation weights
the co- and cross-polarized field products by an angular power spectrum::

    G_mn = xpd * E_theta_m E_theta_n^* P_theta + E_phi_m E_phi_n^* P_phi
    rho_mn = int G_mn / sqrt(int G_mm * int G_nn)

``xpd`` multiplies the theta term only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError
from .patterns import PatternGrid, solid_angle_weights


@dataclass(frozen=True, eq=False)
class AngularPowerSpectrum:
    """Per-polarization power density sampled on a pattern grid."""

    p_theta: np.ndarray
    p_phi: np.ndarray
    xpd: float = 1.0

    def __post_init__(self):
        pt = np.asarray(self.p_theta, dtype=float)
        pp = np.asarray(self.p_phi, dtype=float)
        if pt.shape != pp.shape:
            raise InvalidArgumentError("p_theta and p_phi must share a shape")
        if np.any(pt < 0) or np.any(pp < 0) or not (np.all(np.isfinite(pt)) and np.all(np.isfinite(pp))):
            raise InvalidArgumentError("angular power spectrum must be finite and non-negative")
        if not (np.any(pt > 0) or np.any(pp > 0)):
            raise DegenerateInputError("angular power spectrum is identically zero")
        if not self.xpd > 0:
            raise InvalidArgumentError("XPD must be positive")
        object.__setattr__(self, "p_theta", pt)
        object.__setattr__(self, "p_phi", pp)


def cap_power_spectrum(theta: np.ndarray, phi: np.ndarray, half_angle: float, xpd: float = 1.0) -> AngularPowerSpectrum:
    """Uniform power inside a cap of ``half_angle`` about +z, zero outside.

    A theta sample straddling the cap edge receives the fraction of its
    quadrature cell that lies inside the cap, so the step is integrated
    without half-cell bias.
    """
    if not 0 < half_angle <= np.pi:
        raise InvalidArgumentError("cap half-angle must lie in (0, pi]")
    theta = np.asarray(theta, dtype=float)
    mids = (theta[1:] + theta[:-1]) / 2
    lo = np.concatenate([[theta[0]], mids])
    hi = np.concatenate([mids, [theta[-1]]])
    width = hi - lo
    inside = np.clip(np.minimum(hi, half_angle) - lo, 0.0, None)
    frac = np.where(width > 0, inside / np.where(width > 0, width, 1.0), (theta <= half_angle).astype(float))
    p = np.repeat(frac[:, None], np.size(phi), axis=1)
    return AngularPowerSpectrum(p, p.copy(), xpd)


def pattern_correlation(patterns: list[PatternGrid], spectrum: AngularPowerSpectrum) -> np.ndarray:
    """Correlation matrix of embedded patterns under ``spectrum``.

    Patterns must share the same angle axes (and already carry their
    position phase).  Integrals use trapezoid quadrature with the
    ``sin(theta)`` Jacobian; the diagonal is exactly one.
    """
    if not patterns:
        raise InvalidArgumentError("at least one pattern is required")
    ref = patterns[0]
    for p in patterns[1:]:
        if not ref.same_axes(p):
            raise InvalidArgumentError("patterns are sampled on different grids")
    if spectrum.p_theta.shape != ref.shape:
        raise InvalidArgumentError("spectrum grid does not match pattern grid")
    w = solid_angle_weights(ref.theta, ref.phi)
    wt = (spectrum.xpd * spectrum.p_theta * w).ravel()
    wp = (spectrum.p_phi * w).ravel()
    et = np.stack([p.e_theta.ravel() for p in patterns])
    ep = np.stack([p.e_phi.ravel() for p in patterns])
    gram = (et * wt) @ et.conj().T + (ep * wp) @ ep.conj().T
    power = np.real(np.diag(gram))
    if np.any(power <= 0):
        bad = int(np.argmin(power))
        raise DegenerateInputError(f"pattern {bad} carries no power under the given spectrum")
    norm = np.sqrt(power)
    rho = gram / np.outer(norm, norm)
    rho = 0.5 * (rho + rho.conj().T)
    np.fill_diagonal(rho, 1.0)
    return rho


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """N-port S-parameters at ascending frequencies.

    ``data[k]`` is the ``N x N`` matrix at ``frequencies[k]`` (Hz), with
    ``data[k][m, n] = S_mn`` (wave out of port m for excitation at port n).
    """

    frequencies: np.ndarray
    data: np.ndarray
    reference_impedance: float = 50.0

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float).reshape(-1)
        s = np.asarray(self.data, dtype=complex)
        if s.ndim == 2:
            s = s[None]
        if s.ndim != 3 or s.shape[1] != s.shape[2] or s.shape[0] != f.size:
            raise InvalidArgumentError("data must have shape (n_freq, N, N) matching frequencies")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(s))):
            raise InvalidArgumentError("S-parameters must be finite")
        if np.any(np.diff(f) <= 0):
            raise InvalidArgumentError("frequencies must be strictly ascending")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "data", s)
        object.__setattr__(self, "reference_impedance", float(self.reference_impedance))

    @property
    def port_count(self) -> int:
        return self.data.shape[1]

    def index_of(self, frequency: float, rtol: float = 1e-6) -> int:
        f = self.frequencies
        if f.size == 0:
            raise InvalidArgumentError("no frequencies available")
        k = int(np.argmin(np.abs(f - frequency)))
        if abs(f[k] - frequency) > rtol * max(abs(frequency), abs(f[k])):
            raise InvalidArgumentError(
                f"frequency {frequency} Hz not present (nearest {f[k]} Hz)"
            )
        return k

    def at(self, frequency: float) -> np.ndarray:
        return self.data[self.index_of(frequency)]

    def max_singular_values(self) -> np.ndarray:
        return np.array([np.linalg.norm(s, 2) for s in self.data])

    def is_passive(self, tol: float = 1e-6) -> bool:
        return bool(np.all(self.max_singular_values() <= 1.0 + tol))

    def __eq__(self, other):
        if not isinstance(other, ScatteringMatrix):
            return NotImplemented
        return (
            np.array_equal(self.frequencies, other.frequencies)
            and np.array_equal(self.data, other.data)
            and self.reference_impedance == other.reference_impedance
        )

    __hash__ = None


def embedded_efficiency(s: ScatteringMatrix, frequency: float) -> np.ndarray:
    """Port efficiencies ``e_n = 1 - sum_m |S_mn|^2`` (ohmic loss neglected).

    Values pushed below zero by a non-passive matrix are clamped to zero with
    a ``RuntimeWarning``.
    """
    mat = s.at(frequency)
    e = 1.0 - np.sum(np.abs(mat) ** 2, axis=0)
    if np.any(e < 0):
        bad = np.flatnonzero(e < 0).tolist()
        warnings.warn(
            f"ports {bad} radiate negative power (non-passive S-matrix); efficiency clamped to 0",
            RuntimeWarning,
            stacklevel=2,
        )
        e = np.clip(e, 0.0, None)
    return e


def check_efficiencies(e) -> np.ndarray:
    v = np.asarray(e, dtype=float).reshape(-1)
    if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
        raise InvalidArgumentError("efficiencies must lie in [0, 1]")
    return v


def covariance(phi: np.ndarray, e) -> np.ndarray:
    """Entry-wise product ``R_mn = rho_mn sqrt(e_m e_n)``."""
    phi = np.asarray(phi, dtype=complex)
    v = check_efficiencies(e)
    if phi.ndim != 2 or phi.shape != (v.size, v.size):
        raise InvalidArgumentError(f"correlation of shape {phi.shape} does not match {v.size} efficiencies")
    root = np.sqrt(v)
    return phi * np.outer(root, root)
