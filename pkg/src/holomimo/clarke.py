"""Spatial correlation of point receivers under a uniform plane-wave ensemble.

Incident plane waves arrive uniformly per unit solid angle from a spherical
cap of half-angle ``spread_half_angle`` about ``mean_direction``.  The
correlation between elements at ``r_n`` and ``r_m`` is the ensemble average
of ``exp(j k . (r_n - r_m))``, which is exactly one on the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidArgumentError
from .geometry import K0, ArrayGeometry

GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))
DEFAULT_NODES = 2584  # a Fibonacci number: the spiral closes evenly


@dataclass(frozen=True)
class AngularSpectrum:
    """Uniform cap of incoming directions.

    ``spread_half_angle`` is in radians.  ``pi/2`` is the upper hemisphere
    (isotropic over a reflector); values up to ``pi`` are accepted so the
    full-sphere ensemble can be formed.
    """

    spread_half_angle: float = np.pi / 2
    mean_direction: tuple = (0.0, 0.0, 1.0)
    distribution: Literal["uniform_solid_angle"] = "uniform_solid_angle"

    def __post_init__(self):
        if not 0.0 < self.spread_half_angle <= np.pi:
            raise InvalidArgumentError(
                f"spread half-angle must lie in (0, pi], got {self.spread_half_angle!r}"
            )
        d = np.asarray(self.mean_direction, dtype=float)
        if d.shape != (3,) or abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise InvalidArgumentError("mean_direction must be a unit 3-vector")
        if self.distribution != "uniform_solid_angle":
            raise InvalidArgumentError(f"unsupported distribution {self.distribution!r}")
        object.__setattr__(self, "mean_direction", tuple(float(v) for v in d))

    @classmethod
    def from_degrees(cls, spread_deg: float, **kwargs) -> "AngularSpectrum":
        return cls(np.radians(spread_deg), **kwargs)


@dataclass(frozen=True)
class QuadratureSpec:
    method: Literal["fibonacci_cap", "monte_carlo"] = "fibonacci_cap"
    node_count: int = DEFAULT_NODES
    seed: int = field(default=0)

    def __post_init__(self):
        if self.method not in ("fibonacci_cap", "monte_carlo"):
            raise InvalidArgumentError(f"unknown quadrature method {self.method!r}")
        if int(self.node_count) != self.node_count or self.node_count < 2:
            raise InvalidArgumentError("quadrature needs at least 2 nodes")


def _rotate_from_z(dirs: np.ndarray, target) -> np.ndarray:
    """Rotate direction set so that +z maps onto ``target`` (Rodrigues)."""
    t = np.asarray(target, dtype=float)
    z = np.array([0.0, 0.0, 1.0])
    c = float(z @ t)
    if c > 1.0 - 1e-15:
        return dirs
    if c < -1.0 + 1e-15:
        return dirs * np.array([1.0, -1.0, -1.0])
    axis = np.cross(z, t)
    s = np.linalg.norm(axis)
    axis /= s
    kx = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    rot = np.eye(3) + s * kx + (1 - c) * (kx @ kx)
    return dirs @ rot.T


def cap_nodes(spectrum: AngularSpectrum, quad: QuadratureSpec | None = None) -> np.ndarray:
    """Equal-weight unit direction vectors covering the spectrum's cap.

    Fibonacci nodes stratify ``cos(theta)`` uniformly over the cap, which is
    the equal-area (uniform solid angle) mapping.  Monte-Carlo nodes draw the
    same distribution from a seeded generator.
    """
    quad = quad or QuadratureSpec()
    n = int(quad.node_count)
    zmin = np.cos(spectrum.spread_half_angle)
    if quad.method == "fibonacci_cap":
        i = np.arange(n) + 0.5
        z = 1.0 - (1.0 - zmin) * i / n
        az = GOLDEN_ANGLE * np.arange(n)
    else:
        rng = np.random.default_rng(quad.seed)
        z = 1.0 - (1.0 - zmin) * rng.random(n)
        az = 2.0 * np.pi * rng.random(n)
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    dirs = np.column_stack([r * np.cos(az), r * np.sin(az), z])
    return _rotate_from_z(dirs, spectrum.mean_direction)


def clarke_correlation(
    geometry: ArrayGeometry,
    spectrum: AngularSpectrum | None = None,
    quad: QuadratureSpec | None = None,
) -> np.ndarray:
    """Correlation matrix of point receivers under a uniform cap ensemble.

    Returns an ``N x N`` complex Hermitian matrix with unit diagonal.  Entries
    are averaged over quadrature nodes in fixed index order, so the result
    does not depend on evaluation schedule.
    """
    if geometry is None or geometry.element_count < 1:
        raise InvalidArgumentError("geometry must contain at least one element")
    spectrum = spectrum or AngularSpectrum()
    nodes = cap_nodes(spectrum, quad)
    steer = np.exp(1j * K0 * (geometry.elements @ nodes.T))
    rho = (steer @ steer.conj().T) / nodes.shape[0]
    iu = np.triu_indices(geometry.element_count, 1)
    upper = rho[iu]
    rho = np.zeros_like(rho)
    rho[iu] = upper
    rho = rho + rho.conj().T
    np.fill_diagonal(rho, 1.0)
    return rho


def isotropic_correlation_closed_form(d: float) -> float:
    """Full-sphere isotropic correlation ``sin(2 pi d) / (2 pi d)``."""
    if d < 0:
        raise InvalidArgumentError("distance must be non-negative")
    return float(np.sinc(2.0 * d))
