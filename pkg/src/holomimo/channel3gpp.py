"""Simplified urban-macro (UMa) scenario for spatial-correlation studies.

This is a geometry-based surrogate, not TR 38.901: there is no path loss,
shadowing, delay spread, LOS probability or polarization matrix.  Only the
directions of departure at the base station and their relative powers are
generated, which is all the spatial covariance needs.

Frames
------
World: disc of users centred on the origin, x east, y north, z up.  The base
station sits on the west edge of the disc at ``(-radius, 0, bs_height)`` and
faces east.  Array-local frame: the array row runs along local x (world
north), local y is world up and local z (array broadside) points east into
the cell.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Literal

import numpy as np

from .errors import ConfigError, InvalidArgumentError
from .geometry import K0, ArrayGeometry
from .kronecker import check_efficiencies
from .metrics import diversity, geometry_capacity
from .patterns import PatternGrid

WORLD_TO_LOCAL = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]])
MAX_RESAMPLE = 1000


@dataclass(frozen=True)
class ScenarioConfig:
    dimensionality: Literal["uma2d", "uma3d"] = "uma2d"
    user_count: int = 100
    cell_radius_m: float = 200.0
    bs_height_m: float = 25.0
    indoor_fraction: float | None = None
    outdoor_user_height_m: float = 1.5
    floor_height_m: float = 3.0
    max_floors: int = 8
    cluster_count: int = 20
    per_cluster_angle_sigma_deg: float = 5.0
    cluster_power_decay: float = 0.5
    azimuth_spread_cap_deg: float = 52.0
    carrier_ghz: float = 2.45
    seed: int = 0

    def __post_init__(self):
        if self.dimensionality not in ("uma2d", "uma3d"):
            raise InvalidArgumentError(f"unknown dimensionality {self.dimensionality!r}")
        if self.indoor_fraction is None:
            object.__setattr__(self, "indoor_fraction", 0.8 if self.dimensionality == "uma3d" else 0.0)
        if not self.cell_radius_m > 0:
            raise InvalidArgumentError("cell radius must be positive")
        if int(self.user_count) != self.user_count or self.user_count < 1:
            raise InvalidArgumentError("user_count must be a positive integer")
        if not 0.0 <= self.indoor_fraction <= 1.0:
            raise InvalidArgumentError("indoor_fraction must lie in [0, 1]")
        if not 0.0 < self.azimuth_spread_cap_deg <= 52.0:
            raise InvalidArgumentError("azimuth_spread_cap_deg must lie in (0, 52]")
        if self.max_floors < 1:
            raise InvalidArgumentError("max_floors must be at least 1")
        if self.per_cluster_angle_sigma_deg < 0 or self.cluster_power_decay < 0:
            raise InvalidArgumentError("cluster parameters must be non-negative")

    @classmethod
    def from_dict(cls, doc: dict, path: str = "") -> "ScenarioConfig":
        names = {f.name for f in fields(cls)}
        for key in doc:
            if key not in names:
                raise ConfigError(f"unknown key {key!r}", f"{path}.{key}" if path else key)
        try:
            return cls(**doc)
        except (InvalidArgumentError, TypeError) as exc:
            raise ConfigError(str(exc), path) from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True, eq=False)
class PathRecord:
    """One departing path: unit direction in the world frame and complex gain."""

    direction: np.ndarray
    gain: complex


@dataclass(frozen=True, eq=False)
class ChannelDrop:
    user_positions: np.ndarray
    paths: list = field(default_factory=list)  # per user: (directions (C, 3), gains (C,))

    @property
    def user_count(self) -> int:
        return len(self.paths)

    def path_records(self, user: int) -> list[PathRecord]:
        dirs, gains = self.paths[user]
        return [PathRecord(d, complex(g)) for d, g in zip(dirs, gains)]


def bs_position(config: ScenarioConfig) -> np.ndarray:
    return np.array([-config.cell_radius_m, 0.0, config.bs_height_m])


def drop_users(config: ScenarioConfig, seed=None, return_indoor: bool = False):
    """User positions, uniform over the disc; shape ``(user_count, 3)``.

    Outdoor users stand at ``outdoor_user_height_m``.  Indoor users (drawn
    with probability ``indoor_fraction``) are placed on a uniformly chosen
    floor ``1..max_floors`` at ``floor_height * (floor - 1) + 1.5`` m.  With
    ``return_indoor`` the boolean indoor mask is returned as well.
    """
    rng = np.random.default_rng(config.seed if seed is None else seed)
    u = config.user_count
    r = config.cell_radius_m * np.sqrt(rng.random(u))
    a = 2.0 * np.pi * rng.random(u)
    z = np.full(u, config.outdoor_user_height_m)
    indoor = rng.random(u) < config.indoor_fraction
    floors = rng.integers(1, config.max_floors + 1, u)
    z = np.where(indoor, config.floor_height_m * (floors - 1) + config.outdoor_user_height_m, z)
    pos = np.column_stack([r * np.cos(a), r * np.sin(a), z])
    return (pos, indoor) if return_indoor else pos


def azimuth_spread_deg(azimuths_deg) -> float:
    """Total azimuth range (max minus min) of a set of path azimuths."""
    a = np.asarray(azimuths_deg, dtype=float)
    return float(a.max() - a.min()) if a.size else 0.0


def generate_cluster_paths(user_position, config: ScenarioConfig, seed=None):
    """Cluster directions and gains for one user.

    Cluster azimuths are the BS-to-user bearing plus i.i.d. Gaussian offsets
    (``per_cluster_angle_sigma_deg``), redrawn until their total range is at
    most ``2 * azimuth_spread_cap_deg``.  Elevation is the geometric
    BS-to-user elevation.  Cluster powers decay as
    ``exp(-cluster_power_decay * index)`` and sum to one; phases are uniform.

    Returns
    -------
    directions : ndarray, shape (C, 3)
        Unit vectors in the world frame.
    gains : ndarray, shape (C,)
        Complex path gains.
    """
    if config.cluster_count < 1:
        raise InvalidArgumentError("cluster_count must be at least 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rel = np.asarray(user_position, dtype=float) - bs_position(config)
    bearing = np.degrees(np.arctan2(rel[1], rel[0]))
    elevation = np.arctan2(rel[2], np.hypot(rel[0], rel[1]))
    c = config.cluster_count
    cap = 2.0 * config.azimuth_spread_cap_deg
    # phases first, so the cap only changes the offsets of a paired draw
    phases = rng.random(c)
    for _ in range(MAX_RESAMPLE):
        offsets = rng.normal(0.0, config.per_cluster_angle_sigma_deg, c)
        if azimuth_spread_deg(offsets) <= cap:
            break
    else:
        offsets = np.clip(offsets, -config.azimuth_spread_cap_deg, config.azimuth_spread_cap_deg)
    az = np.radians(bearing + offsets)
    ce = np.cos(elevation)
    dirs = np.column_stack([ce * np.cos(az), ce * np.sin(az), np.full(c, np.sin(elevation))])
    power = np.exp(-config.cluster_power_decay * np.arange(c))
    power /= power.sum()
    gains = np.sqrt(power) * np.exp(2j * np.pi * phases)
    gains /= np.sqrt(np.sum(np.abs(gains) ** 2))
    return dirs, gains


def drop_streams(seed: int, drop_index: int, user_count: int):
    """Generators for one drop: user placement plus one path stream per user.

    Streams derive from ``(seed, drop_index)`` only, so a user's paths do not
    depend on how many draws earlier users consumed.
    """
    ss = np.random.SeedSequence([int(seed), int(drop_index)])
    users, paths = ss.spawn(2)
    return np.random.default_rng(users), [np.random.default_rng(c) for c in paths.spawn(user_count)]


def generate_drop(config: ScenarioConfig, drop_index: int = 0) -> ChannelDrop:
    user_rng, path_rngs = drop_streams(config.seed, drop_index, config.user_count)
    positions = drop_users(config, user_rng)
    paths = [generate_cluster_paths(p, config, r) for p, r in zip(positions, path_rngs)]
    return ChannelDrop(positions, paths)


def scenario_covariance(
    drop: ChannelDrop,
    geometry: ArrayGeometry,
    patterns: list[PatternGrid],
    efficiencies=None,
) -> np.ndarray:
    """Spatial covariance at the base station averaged over the drop's users.

    Each user's channel is ``h_u = sum_p g_p a(d_p)`` where the element
    response ``a_n(d)`` is the pattern value toward ``d`` (both
    polarizations) times the phase of the element position.  The averaged
    ``h_u h_u^H`` is scaled so its largest diagonal entry is one and then
    multiplied entry-wise by ``sqrt(e) sqrt(e)^T``.
    """
    if drop is None or drop.user_count == 0:
        raise InvalidArgumentError("drop contains no users")
    n = geometry.element_count
    if len(patterns) != n:
        raise InvalidArgumentError(f"{len(patterns)} patterns supplied for {n} elements")
    e = np.ones(n) if efficiencies is None else check_efficiencies(efficiencies)
    if e.size != n:
        raise InvalidArgumentError("efficiency vector does not match geometry")
    dirs = np.concatenate([d for d, _ in drop.paths]) @ WORLD_TO_LOCAL.T
    gains = np.concatenate([g for _, g in drop.paths])
    owner = np.repeat(np.arange(drop.user_count), [len(g) for _, g in drop.paths])
    # element responses, shape (paths, N, 2)
    resp = np.empty((dirs.shape[0], n, 2), dtype=complex)
    cache = {}
    for k, (pat, pos) in enumerate(zip(patterns, geometry.elements)):
        key = id(pat)
        if key not in cache:
            cache[key] = pat.sample(dirs)
        et, ep = cache[key]
        phase = np.exp(1j * K0 * (dirs @ (pos - pat.element_position)))
        resp[:, k, 0] = et * phase
        resp[:, k, 1] = ep * phase
    weighted = resp * gains[:, None, None]
    h = np.zeros((drop.user_count, n, 2), dtype=complex)
    np.add.at(h, owner, weighted)
    r = np.einsum("unp,ump->nm", h, h.conj()) / drop.user_count
    r = 0.5 * (r + r.conj().T)
    top = np.max(np.real(np.diag(r)))
    if top <= 0:
        raise InvalidArgumentError("array receives no power from this drop")
    root = np.sqrt(e)
    return (r / top) * np.outer(root, root)


@dataclass(frozen=True)
class ArrayVariant:
    name: str
    geometry: ArrayGeometry
    patterns: list
    efficiencies: tuple | None = None


def _pct(new: float, base: float) -> float:
    return float(100.0 * (new / base - 1.0))


def run_scenario(
    config: ScenarioConfig,
    variants: list[ArrayVariant],
    trials: int = 50,
    snr_db: float = 20.0,
    capacity_trials: int = 500,
) -> list[dict]:
    """Average diversity and capacity over ``trials`` seeded drops.

    Every variant sees the same drops.  The first variant is the baseline
    for the percent-increase columns.  Capacity seeds are
    ``config.seed * 1_000_003 + drop_index`` and are reported per row.
    """
    if len(variants) < 2:
        raise InvalidArgumentError("run_scenario compares at least two array variants")
    div = np.zeros((len(variants), trials))
    cap = np.zeros((len(variants), trials))
    seeds = [int(config.seed) * 1_000_003 + t for t in range(trials)]
    for t in range(trials):
        drop = generate_drop(config, t)
        for v, variant in enumerate(variants):
            r = scenario_covariance(drop, variant.geometry, variant.patterns, variant.efficiencies)
            div[v, t] = diversity(r)
            cap[v, t] = geometry_capacity(
                r, variant.geometry, snr_db, trials=capacity_trials, seed=seeds[t]
            ).mean_bits_per_s_per_hz
    base_div, base_cap = div[0].mean(), cap[0].mean()
    rows = []
    for v, variant in enumerate(variants):
        rows.append({
            "scenario": config.dimensionality,
            "variant": variant.name,
            "users": config.user_count,
            "drops": trials,
            "snr_db": snr_db,
            "diversity": float(div[v].mean()),
            "capacity": float(cap[v].mean()),
            "diversity_increase_pct": _pct(div[v].mean(), base_div),
            "capacity_increase_pct": _pct(cap[v].mean(), base_cap),
            "seed": int(config.seed),
            "capacity_seeds": f"{seeds[0]}..{seeds[-1]}",
        })
    return rows
