"""Diversity measure, eigen-spectra, ergodic capacity and beamforming gain."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError, NumericError
from .geometry import ArrayGeometry
from .matrices import as_square, check_psd, is_hermitian, psd_sqrt
from .patterns import PatternGrid, place_patterns, solid_angle_weights

EIG_CLAMP_RTOL = 1e-8
DEFAULT_TRIALS = 2000
_TRIAL_BLOCK = 64


def diversity(r) -> float:
    """Equivalent number of uncorrelated branches, ``(tr R / ||R||_F)^2``.

    Lies in ``[1, N]`` for a Hermitian PSD matrix and is invariant to
    positive scaling of ``R``.
    """
    m = as_square(r)
    if not is_hermitian(m):
        raise InvalidArgumentError("diversity needs a Hermitian matrix")
    fro = np.linalg.norm(m)
    if fro == 0:
        raise DegenerateInputError("diversity of the zero matrix is undefined")
    return float(np.real(np.trace(m)) ** 2 / fro**2)


def eigen_spectrum(r) -> np.ndarray:
    """Eigenvalues in descending order; values above ``-1e-8 * max`` are clamped to 0."""
    w = check_psd(r, rtol=EIG_CLAMP_RTOL, error=NumericError)
    return np.clip(w, 0.0, None)[::-1].copy()


def effective_dof(spectrum, threshold_rel: float) -> int:
    """Number of eigenvalues at least ``threshold_rel`` times the largest."""
    s = np.asarray(spectrum, dtype=float)
    if not 0 < threshold_rel < 1:
        raise InvalidArgumentError("threshold must lie in (0, 1)")
    if s.size == 0 or s.max() <= 0:
        return 0
    return int(np.count_nonzero(s >= threshold_rel * s.max()))


class Normalization(str, Enum):
    STANDARD = "standard"
    HALFWAVE_CAPPED = "halfwave_capped"


@dataclass(frozen=True)
class CapacityEstimate:
    mean_bits_per_s_per_hz: float
    half_width_95: float
    trials: int
    seed: int
    snr_db: float
    normalization_mode: Normalization

    def as_dict(self) -> dict:
        d = asdict(self)
        d["normalization_mode"] = self.normalization_mode.value
        return d


def channel_power_scale(n_r: int, min_spacing: float | None, n_halfwave: int | None) -> tuple[float, Normalization]:
    """Per-entry variance of ``H_w`` and the normalization mode used.

    With element spacing of at least half a wavelength the channel carries
    ``N_t N_r`` in expectation; below that the receive array gain is capped
    at the half-wave element count of the same aperture.
    """
    if min_spacing is None or min_spacing >= 0.5 - 1e-12 or n_halfwave is None:
        return 1.0, Normalization.STANDARD
    if n_halfwave < 1:
        raise InvalidArgumentError("n_halfwave must be positive")
    return n_halfwave / n_r, Normalization.HALFWAVE_CAPPED


def trial_generator(seed: int, index: int) -> np.random.Generator:
    """Independent RNG stream for Monte-Carlo block ``index`` of run ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def ergodic_capacity(
    r,
    snr_db: float,
    n_t: int | None = None,
    trials: int = DEFAULT_TRIALS,
    seed: int = 0,
    min_spacing: float | None = None,
    n_halfwave: int | None = None,
) -> CapacityEstimate:
    """Monte-Carlo mean of ``log2 det(I + (gamma/N_t) R H_w H_w^H)``.

    ``H_w`` has i.i.d. circular complex Gaussian entries scaled so that
    ``E ||H_w||_F^2`` is ``N_t N_r`` (``min_spacing >= 0.5``) or
    ``N_t n_halfwave`` otherwise.  Trials are drawn in fixed blocks whose
    streams depend only on ``(seed, block)``, so results are reproducible.
    """
    if snr_db is None or math.isnan(snr_db):
        raise InvalidArgumentError("snr_db must be a number")
    if trials < 1:
        raise InvalidArgumentError("trials must be positive")
    m = as_square(r)
    check_psd(m, error=InvalidArgumentError)
    n_r = m.shape[0]
    n_t = n_r if n_t is None else int(n_t)
    if n_t < 1:
        raise InvalidArgumentError("n_t must be positive")
    var, mode = channel_power_scale(n_r, min_spacing, n_halfwave)
    gamma = 10.0 ** (snr_db / 10.0)
    root = psd_sqrt(m)
    eye = np.eye(n_r)
    samples = np.empty(trials)
    for block, start in enumerate(range(0, trials, _TRIAL_BLOCK)):
        count = min(_TRIAL_BLOCK, trials - start)
        rng = trial_generator(seed, block)
        h = rng.standard_normal((count, n_r, n_t)) + 1j * rng.standard_normal((count, n_r, n_t))
        h *= math.sqrt(var / 2.0)
        a = root @ h
        gram = eye + (gamma / n_t) * (a @ a.conj().transpose(0, 2, 1))
        chol = np.linalg.cholesky(gram)
        diag = np.real(np.diagonal(chol, axis1=1, axis2=2))
        samples[start:start + count] = 2.0 * np.sum(np.log2(diag), axis=1)
    mean = float(samples.mean())
    half = float(1.96 * samples.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return CapacityEstimate(max(mean, 0.0), half, int(trials), int(seed), float(snr_db), mode)


def geometry_capacity(r, geometry: ArrayGeometry, snr_db: float, **kwargs) -> CapacityEstimate:
    """:func:`ergodic_capacity` with the normalization context taken from ``geometry``."""
    return ergodic_capacity(
        r, snr_db, min_spacing=geometry.min_spacing(), n_halfwave=geometry.halfwave_count(), **kwargs
    )


def rayleigh_siso_capacity(snr_db: float) -> float:
    """Closed-form ergodic capacity of a 1x1 Rayleigh channel, ``e^{1/g} E1(1/g) / ln 2``."""
    from scipy.special import exp1

    g = 10.0 ** (snr_db / 10.0)
    return float(np.exp(1.0 / g) * exp1(1.0 / g) / np.log(2.0))


# -- beamforming -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GainPattern:
    """Array gain (linear, relative to isotropic) on a (theta, phi) grid."""

    theta: np.ndarray
    phi: np.ndarray
    gain: np.ndarray
    scan_theta: float
    scan_phi: float

    def at(self, theta: float, phi: float = 0.0) -> float:
        i = int(np.argmin(np.abs(self.theta - theta)))
        dphi = np.abs(np.angle(np.exp(1j * (self.phi - phi))))
        j = int(np.argmin(dphi))
        return float(self.gain[i, j])

    def scan_gain(self) -> float:
        return self.at(self.scan_theta, self.scan_phi)

    def peak(self) -> float:
        return float(self.gain.max())

    def cut(self, phi: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
        """Gain in the plane containing z and azimuth ``phi``, versus signed angle from broadside."""
        dphi = np.abs(np.angle(np.exp(1j * (self.phi - phi))))
        j_front = int(np.argmin(dphi))
        dphi_back = np.abs(np.angle(np.exp(1j * (self.phi - phi - np.pi))))
        j_back = int(np.argmin(dphi_back))
        angles = np.concatenate([-self.theta[:0:-1], self.theta])
        values = np.concatenate([self.gain[:0:-1, j_back], self.gain[:, j_front]])
        return angles, values


def _scan_direction(scan_angle: float, scan_phi: float):
    theta = abs(scan_angle)
    phi = scan_phi if scan_angle >= 0 else scan_phi + np.pi
    return theta, np.mod(phi, 2 * np.pi)


def beamforming_gain(
    geometry: ArrayGeometry,
    patterns: list[PatternGrid],
    scan_angle: float,
    scan_phi: float = 0.0,
) -> GainPattern:
    """Directivity pattern of a co-phased array steered to ``scan_angle``.

    ``patterns`` are per-element patterns; each is moved from its own phase
    reference to its geometry position.  Elements get unit amplitude and the
    conjugate phase of the dominant polarization toward the scan direction.
    Gain is ``4 pi U / P_rad`` with ``P_rad`` the integral of the combined
    field, so the total radiated power is fixed.
    """
    if geometry is None or not patterns:
        raise InvalidArgumentError("beamforming needs a geometry and patterns")
    placed = place_patterns(geometry, patterns)
    ref = placed[0]
    theta0, phi0 = _scan_direction(scan_angle, scan_phi)
    khat = np.array([np.sin(theta0) * np.cos(phi0), np.sin(theta0) * np.sin(phi0), np.cos(theta0)])
    samples = [p.sample(khat[None, :]) for p in placed]
    et0 = np.array([s[0][0] for s in samples])
    ep0 = np.array([s[1][0] for s in samples])
    use_theta = np.sum(np.abs(et0) ** 2) >= np.sum(np.abs(ep0) ** 2)
    ref_comp = et0 if use_theta else ep0
    weights = np.exp(-1j * np.angle(ref_comp))
    et = sum(w * p.e_theta for w, p in zip(weights, placed))
    ep = sum(w * p.e_phi for w, p in zip(weights, placed))
    u = np.abs(et) ** 2 + np.abs(ep) ** 2
    prad = float(np.sum(u * solid_angle_weights(ref.theta, ref.phi)))
    if prad <= 0:
        raise DegenerateInputError("array radiates no power")
    return GainPattern(ref.theta, ref.phi, 4 * np.pi * u / prad, theta0, phi0)


def gain_limit_2d(aperture_area: float, scan_angle: float) -> float:
    """Aperture gain limit of a planar array, ``4 pi A cos(theta0)`` (A in wavelengths^2)."""
    if not aperture_area > 0:
        raise InvalidArgumentError("aperture area must be positive")
    if not abs(scan_angle) < np.pi / 2:
        raise InvalidArgumentError("scan angle must be inside (-pi/2, pi/2)")
    return float(4 * np.pi * aperture_area * np.cos(scan_angle))


def to_db(x) -> np.ndarray:
    return 10.0 * np.log10(np.asarray(x, dtype=float))
