"""Sampled far-field patterns of single array elements.

A :class:`PatternGrid` holds the theta- and phi-polarized far-field
components on a regular (theta, phi) grid.  The phase of the samples is
referenced to ``element_position``; :func:`translate_pattern` moves that
reference by multiplying in the plane-wave phase ``exp(j k0 k_hat . offset)``.

Analytic element patterns model a horizontal half-wave dipole above an
infinite reflector by image theory.  Finite-ground and coupling effects are
not modeled; measured grids can be loaded from CSV instead.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .errors import DataError, FormatError, InvalidArgumentError, ParseError
from .geometry import K0

CSV_HEADER = ["theta_deg", "phi_deg", "re_etheta", "im_etheta", "re_ephi", "im_ephi"]
DEFAULT_RESOLUTION = (181, 360)

# Default element heights above the 0-degree (EBG) reflector, in wavelengths.
LOWER_HEIGHT = 0.02
UPPER_HEIGHT = 0.5


def angle_axes(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Regular theta in [0, pi] and phi in [0, 2 pi) axes, in radians.

    Axis values are rounded to hundredths of a degree so grids survive the
    CSV round trip bit-for-bit.
    """
    if n_theta < 2 or n_phi < 2:
        raise InvalidArgumentError("grid resolution must be at least 2 x 2")
    theta_deg = np.round(np.linspace(0.0, 180.0, int(n_theta)), 2)
    phi_deg = np.round(np.arange(int(n_phi)) * (360.0 / n_phi), 2)
    return np.radians(theta_deg), np.radians(phi_deg)


def _theta_weights(theta: np.ndarray) -> np.ndarray:
    """Trapezoid weights in theta, including the sin(theta) Jacobian."""
    w = np.zeros_like(theta)
    dt = np.diff(theta)
    w[:-1] += dt / 2
    w[1:] += dt / 2
    return w * np.sin(theta)


def _phi_weights(phi: np.ndarray) -> np.ndarray:
    """Periodic trapezoid weights in phi."""
    ext = np.concatenate([[phi[-1] - 2 * np.pi], phi, [phi[0] + 2 * np.pi]])
    return (ext[2:] - ext[:-2]) / 2


def solid_angle_weights(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Quadrature weights ``dOmega`` for a (theta, phi) grid."""
    return np.outer(_theta_weights(theta), _phi_weights(phi))


def direction_grid(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Unit propagation vectors on the grid, shape ``(n_theta, n_phi, 3)``."""
    t, p = np.meshgrid(theta, phi, indexing="ij")
    st = np.sin(t)
    return np.stack([st * np.cos(p), st * np.sin(p), np.cos(t)], axis=-1)


def unit_vectors(theta, phi):
    """Spherical unit vectors theta_hat and phi_hat (each ``(..., 3)``)."""
    t, p = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    ct, st, cp, sp = np.cos(t), np.sin(t), np.cos(p), np.sin(p)
    theta_hat = np.stack([ct * cp, ct * sp, -st], axis=-1)
    phi_hat = np.stack([-sp, cp, np.zeros_like(p)], axis=-1)
    return theta_hat, phi_hat


def to_spherical(dirs) -> tuple[np.ndarray, np.ndarray]:
    d = np.asarray(dirs, dtype=float)
    theta = np.arccos(np.clip(d[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(d[..., 1], d[..., 0]), 2 * np.pi)
    return theta, phi


@dataclass(frozen=True, eq=False)
class PatternGrid:
    """Far-field pattern of one element sampled on a regular grid.

    Attributes
    ----------
    theta, phi : ndarray
        Ascending axes in radians; theta in [0, pi], phi in [0, 2 pi).
    e_theta, e_phi : ndarray, shape (len(theta), len(phi))
        Complex field components (V/m at 1 m per unit drive).
    element_position : ndarray, shape (3,)
        Phase reference of the samples, in wavelengths.
    """

    theta: np.ndarray
    phi: np.ndarray
    e_theta: np.ndarray
    e_phi: np.ndarray
    element_position: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        et = np.asarray(self.e_theta, dtype=complex)
        ep = np.asarray(self.e_phi, dtype=complex)
        pos = np.asarray(self.element_position, dtype=float).reshape(3)
        shape = (theta.size, phi.size)
        if theta.ndim != 1 or phi.ndim != 1 or theta.size < 2 or phi.size < 2:
            raise InvalidArgumentError("pattern axes must be 1-D with at least 2 samples")
        if np.any(np.diff(theta) <= 0) or np.any(np.diff(phi) <= 0):
            raise InvalidArgumentError("pattern axes must be strictly ascending")
        if theta[0] < 0 or theta[-1] > np.pi + 1e-12 or phi[0] < 0 or phi[-1] >= 2 * np.pi:
            raise InvalidArgumentError("pattern axes out of range")
        if et.shape != shape or ep.shape != shape:
            raise InvalidArgumentError(f"field arrays must have shape {shape}")
        if not (np.all(np.isfinite(et)) and np.all(np.isfinite(ep))):
            raise InvalidArgumentError("pattern contains NaN or Inf")
        for name, val in (("theta", theta), ("phi", phi), ("e_theta", et), ("e_phi", ep), ("element_position", pos)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)

    @property
    def shape(self):
        return self.e_theta.shape

    def same_axes(self, other: "PatternGrid") -> bool:
        return np.array_equal(self.theta, other.theta) and np.array_equal(self.phi, other.phi)

    def weights(self) -> np.ndarray:
        return solid_angle_weights(self.theta, self.phi)

    def intensity(self) -> np.ndarray:
        return np.abs(self.e_theta) ** 2 + np.abs(self.e_phi) ** 2

    def total_power(self) -> float:
        """Integral of ``|E_theta|^2 + |E_phi|^2`` over the sphere."""
        return float(np.sum(self.intensity() * self.weights()))

    def sample(self, dirs) -> tuple[np.ndarray, np.ndarray]:
        """Bilinearly interpolated ``(e_theta, e_phi)`` toward unit vectors ``dirs``."""
        theta, phi = to_spherical(dirs)
        phi_ext = np.concatenate([self.phi, [self.phi[0] + 2 * np.pi]])
        pts = np.stack([np.ravel(theta), np.ravel(phi)], axis=-1)
        out = []
        for comp in (self.e_theta, self.e_phi):
            table = np.concatenate([comp, comp[:, :1]], axis=1)
            interp = RegularGridInterpolator((self.theta, phi_ext), table, bounds_error=False, fill_value=None)
            out.append(interp(pts).reshape(np.shape(theta)))
        return out[0], out[1]

    def with_fields(self, e_theta, e_phi, element_position=None) -> "PatternGrid":
        pos = self.element_position if element_position is None else element_position
        return PatternGrid(self.theta, self.phi, e_theta, e_phi, pos)


def isotropic_pattern(grid_resolution=DEFAULT_RESOLUTION) -> PatternGrid:
    """Unit theta-polarized field in every direction, phase-referenced at the origin."""
    theta, phi = angle_axes(*grid_resolution)
    ones = np.ones((theta.size, phi.size), dtype=complex)
    return PatternGrid(theta, phi, ones, np.zeros_like(ones))


def dipole_field(theta, phi, axis=(0.0, 1.0, 0.0)):
    """Half-wave dipole oriented along ``axis``; peak magnitude 1.

    Returns ``(e_theta, e_phi)`` as real arrays.
    """
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    t, p = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    khat = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1)
    c = khat @ a
    s2 = 1.0 - c * c
    safe = s2 > 1e-12
    # cos(pi/2 cos psi) / sin(psi), times the unit polarization (a_perp / sin psi)
    amp = np.where(safe, np.cos(0.5 * np.pi * c) / np.where(safe, s2, 1.0), 0.0)
    theta_hat, phi_hat = unit_vectors(t, p)
    return amp * (theta_hat @ a), amp * (phi_hat @ a)


def reflector_factor(theta, height: float, reflection_phase: float) -> np.ndarray:
    """Image-theory factor ``|1 + exp(j(phase - 2 k0 h cos theta))|``; zero below the reflector.

    Exactly on the horizon (``theta = pi/2``) the field jumps to zero.  It is
    scaled by ``1/sqrt(2)`` there, so every quadratic quantity (power,
    correlation products) takes the mean of its one-sided limits and
    trapezoid integration over the step stays second-order accurate.  Round-off
    residues of a cancelling image (below 1e-12) are set to zero.
    """
    t = np.asarray(theta, dtype=float)
    ct = np.cos(t)
    f = np.abs(1.0 + np.exp(1j * (reflection_phase - 2.0 * K0 * height * ct)))
    f = np.where(f < 1e-12, 0.0, f)
    horizon = np.abs(ct) <= 1e-12
    return np.where(ct > 1e-12, f, np.where(horizon, f / np.sqrt(2.0), 0.0))


def element_over_reflector(
    height: float,
    reflection_phase: float = 0.0,
    grid_resolution=DEFAULT_RESOLUTION,
    dipole_axis=(0.0, 1.0, 0.0),
) -> PatternGrid:
    """Horizontal half-wave dipole at ``height`` above an infinite reflector.

    The free dipole field (peak 1) is multiplied by :func:`reflector_factor`;
    the lower hemisphere is dark.  The dipole defaults to the y-axis, i.e.
    parallel neighbours in an x-directed row.
    """
    if not height >= 0:
        raise InvalidArgumentError(f"height must be non-negative, got {height!r}")
    theta, phi = angle_axes(*grid_resolution)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    et, ep = dipole_field(t, p, dipole_axis)
    af = reflector_factor(t, height, reflection_phase)
    return PatternGrid(theta, phi, (et * af).astype(complex), (ep * af).astype(complex))


def _scaled(pattern: PatternGrid, c: float) -> PatternGrid:
    return pattern.with_fields(pattern.e_theta * c, pattern.e_phi * c)


def _canonical_scale(grid_resolution, **kwargs) -> float:
    """Factor that brings the isolated lower element's peak |E| to exactly 1."""
    ref = element_over_reflector(LOWER_HEIGHT, 0.0, grid_resolution, **kwargs)
    return 1.0 / float(np.sqrt(ref.intensity().max()))


def lower_element(grid_resolution=DEFAULT_RESOLUTION, **kwargs) -> PatternGrid:
    """Lower (near-reflector) element on the canonical scale: peak |E| = 1."""
    p = element_over_reflector(LOWER_HEIGHT, 0.0, grid_resolution, **kwargs)
    return _scaled(p, _canonical_scale(grid_resolution, **kwargs))


def upper_element(grid_resolution=DEFAULT_RESOLUTION, **kwargs) -> PatternGrid:
    """Upper (raised) element on the same scale as :func:`lower_element`."""
    p = element_over_reflector(UPPER_HEIGHT, 0.0, grid_resolution, **kwargs)
    return _scaled(p, _canonical_scale(grid_resolution, **kwargs))


def translate_pattern(pattern: PatternGrid, offset) -> PatternGrid:
    """Shift the phase reference by ``offset`` wavelengths."""
    off = np.asarray(offset, dtype=float).reshape(3)
    if not np.any(off):
        return pattern.with_fields(pattern.e_theta, pattern.e_phi, pattern.element_position.copy())
    khat = direction_grid(pattern.theta, pattern.phi)
    phase = np.exp(1j * K0 * (khat @ off))
    return pattern.with_fields(pattern.e_theta * phase, pattern.e_phi * phase, pattern.element_position + off)


def place_patterns(geometry, element_patterns) -> list[PatternGrid]:
    """Translate each element pattern to its geometry position.

    ``element_patterns`` is one pattern per element; each is moved from its
    own phase reference to the corresponding element position.
    """
    if len(element_patterns) != geometry.element_count:
        raise InvalidArgumentError(
            f"{len(element_patterns)} patterns supplied for {geometry.element_count} elements"
        )
    return [
        translate_pattern(p, pos - p.element_position)
        for p, pos in zip(element_patterns, geometry.elements)
    ]


def surrogate_patterns(geometry, grid_resolution=DEFAULT_RESOLUTION, lower=None, upper=None) -> list[PatternGrid]:
    """Element patterns for a one-row array, un-translated.

    Elements on the lowest z level get the lower-element pattern, all others
    the upper-element pattern.
    """
    lower = lower if lower is not None else lower_element(grid_resolution)
    z = geometry.elements[:, 2]
    if np.all(z == z.min()):
        return [lower] * geometry.element_count
    upper = upper if upper is not None else upper_element(grid_resolution)
    return [lower if zi == z.min() else upper for zi in z]


# -- CSV interchange ---------------------------------------------------------


def save_pattern_grid(pattern: PatternGrid, path) -> None:
    """Write ``pattern`` as CSV (theta-major rows, angles with two decimals).

    A non-zero element position is stored in a leading ``#`` comment line.
    """
    with open(path, "w", newline="") as fh:
        if np.any(pattern.element_position):
            fh.write("# element_position=" + ",".join(repr(float(v)) for v in pattern.element_position) + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        tdeg = np.degrees(pattern.theta)
        pdeg = np.degrees(pattern.phi)
        for i, t in enumerate(tdeg):
            for j, p in enumerate(pdeg):
                et = pattern.e_theta[i, j]
                ep = pattern.e_phi[i, j]
                writer.writerow([
                    f"{t:.2f}", f"{p:.2f}",
                    repr(float(et.real)), repr(float(et.imag)),
                    repr(float(ep.real)), repr(float(ep.imag)),
                ])


def load_pattern_grid(path) -> PatternGrid:
    """Read a pattern-grid CSV written by :func:`save_pattern_grid` or by hand.

    Raises
    ------
    ParseError
        Missing/malformed header, wrong field count or non-numeric tokens.
    FormatError
        Angle axes not strictly ascending or grid incomplete.
    DataError
        NaN or infinite field values.
    """
    position = np.zeros(3)
    rows = []
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("element_position="):
                    try:
                        position = np.array([float(v) for v in body.split("=", 1)[1].split(",")])
                    except ValueError as exc:
                        raise ParseError(f"bad element_position comment: {exc}", lineno, path) from exc
                    if position.shape != (3,):
                        raise ParseError("element_position needs three coordinates", lineno, path)
                continue
            fields = [f.strip() for f in line.split(",")]
            if not header_seen:
                if fields != CSV_HEADER:
                    raise ParseError(f"expected header {','.join(CSV_HEADER)!r}", lineno, path)
                header_seen = True
                continue
            if len(fields) != len(CSV_HEADER):
                raise ParseError(f"expected {len(CSV_HEADER)} fields, found {len(fields)}", lineno, path)
            try:
                vals = [float(f) for f in fields]
            except ValueError as exc:
                raise ParseError(f"non-numeric field: {exc}", lineno, path) from exc
            if any(math.isnan(v) or math.isinf(v) for v in vals[2:]):
                raise DataError("non-finite field value", lineno, path)
            if any(math.isnan(v) or math.isinf(v) for v in vals[:2]):
                raise FormatError("non-finite angle", lineno, path)
            rows.append((lineno, vals))
    if not header_seen:
        raise ParseError("missing header line", 1, path)
    if not rows:
        raise FormatError("no data rows", None, path)

    thetas = []
    phis_first = []
    for lineno, vals in rows:
        if not thetas or vals[0] != thetas[-1]:
            if thetas and vals[0] <= thetas[-1]:
                raise FormatError("theta axis is not strictly ascending", lineno, path)
            thetas.append(vals[0])
        if len(thetas) == 1:
            if phis_first and vals[1] <= phis_first[-1]:
                raise FormatError("phi axis is not strictly ascending", lineno, path)
            phis_first.append(vals[1])
    n_t, n_p = len(thetas), len(phis_first)
    if n_t * n_p != len(rows):
        raise FormatError(f"incomplete grid: {len(rows)} rows for {n_t} x {n_p} axes", rows[-1][0], path)
    data = np.array([vals for _, vals in rows]).reshape(n_t, n_p, 6)
    for i in range(n_t):
        if not np.array_equal(data[i, :, 1], phis_first):
            bad = rows[i * n_p][0]
            raise FormatError("phi axis differs between theta rows", bad, path)
    theta = np.radians(np.asarray(thetas))
    phi = np.radians(np.asarray(phis_first))
    et = data[:, :, 2] + 1j * data[:, :, 3]
    ep = data[:, :, 4] + 1j * data[:, :, 5]
    try:
        return PatternGrid(theta, phi, et, ep, position)
    except InvalidArgumentError as exc:
        raise FormatError(str(exc), None, path) from exc
