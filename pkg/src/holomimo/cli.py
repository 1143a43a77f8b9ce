"""Command-line batch runner.

Every subcommand takes an optional JSON ``--config`` file whose keys override
the built-in defaults; ``--seed`` and ``--trials`` override the file.  The
fully resolved configuration and seed are written at the top of every output
(``#`` comment lines for CSV, a ``meta`` object for JSON), so any output can
be re-run exactly.

Exit codes: 0 success, 2 configuration error, 3 input/output file error,
4 numeric error (including degenerate inputs such as a zero-power pattern).
"""

from __future__ import annotations

import argparse
import copy
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import jsonschema
import numpy as np

from . import __version__
from .channel3gpp import ArrayVariant, ScenarioConfig, run_scenario
from .clarke import DEFAULT_NODES, AngularSpectrum, QuadratureSpec, clarke_correlation
from .errors import (
    ConfigError,
    DegenerateInputError,
    HolomimoError,
    InputFileError,
    InvalidArgumentError,
    NumericError,
    OutputError,
)
from .geometry import build_linear_3d
from .io import (
    RESULT_COLUMNS,
    UMA_COLUMNS,
    format_records,
    parse_touchstone,
    write_text,
)
from .kronecker import cap_power_spectrum, covariance, embedded_efficiency, pattern_correlation
from .metrics import beamforming_gain, diversity, gain_limit_2d, geometry_capacity, to_db
from .patterns import load_pattern_grid, place_patterns, surrogate_patterns

EXIT_OK, EXIT_CONFIG, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3, 4

# -- configuration schemas ----------------------------------------------------

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_NONNEG = {"type": "number", "minimum": 0}
_COUNT = {"type": "integer", "minimum": 1}
_SEED = {"type": "integer", "minimum": 0}
_GRID = {"type": "array", "items": {"type": "integer", "minimum": 2}, "minItems": 2, "maxItems": 2}


def _list(item, min_items=1):
    return {"type": "array", "items": item, "minItems": min_items}


_VARIANT = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "n", "spacing"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "n": _COUNT,
        "spacing": _POS,
        "h": _NONNEG,
        "touchstone": {"type": "string"},
        "frequency_hz": _POS,
        "patterns": {
            "oneOf": [
                _list({"type": "string"}),
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["lower"],
                    "properties": {"lower": {"type": "string"}, "upper": {"type": "string"}},
                },
            ]
        },
    },
}

SCHEMAS = {
    "clarke": {
        "length": _POS,
        "spacings": _list(_POS),
        "heights": _list(_NONNEG),
        "spreads_deg": _list({"type": "number", "exclusiveMinimum": 0, "maximum": 180}),
        "nodes": {"type": "integer", "minimum": 2},
    },
    "kronecker": {
        "variants": _list(_VARIANT),
        "baseline": {"type": "string"},
        "spreads_deg": _list({"type": "number", "exclusiveMinimum": 0, "maximum": 180}),
        "snr_db": _list(_NUM),
        "xpd": _POS,
        "grid": _GRID,
    },
    "capacity": {
        "length": _POS,
        "counts": _list({"type": "integer", "minimum": 2}),
        "h": _NONNEG,
        "spread_deg": {"type": "number", "exclusiveMinimum": 0, "maximum": 180},
        "snr_db": _list(_NUM),
        "n_t": {"oneOf": [_COUNT, {"type": "null"}]},
        "nodes": {"type": "integer", "minimum": 2},
    },
    "gain": {
        "variants": _list(_VARIANT),
        "scan_deg": _list({"type": "number", "exclusiveMinimum": -90, "exclusiveMaximum": 90}),
        "aperture_width": _POS,
        "aperture_length": _POS,
        "grid": _GRID,
        "summary_only": {"type": "boolean"},
    },
    "uma": {
        "scenarios": _list({"enum": ["uma2d", "uma3d"]}),
        "scenario": {"type": "object"},
        "variants": _list(_VARIANT, 2),
        "snr_db": _NUM,
        "capacity_trials": _COUNT,
        "grid": _GRID,
    },
    "parse-touchstone": {
        "frequency_hz": _POS,
    },
}
_COMMON = {"seed": _SEED, "trials": _COUNT}


def _schema(command: str) -> dict:
    props = dict(_COMMON)
    props.update(SCHEMAS[command])
    return {"type": "object", "additionalProperties": False, "properties": props}


DEFAULTS = {
    "clarke": {
        "length": 5.0,
        "spacings": [5.0 / k for k in (5, 7, 10, 12, 15, 20, 25, 30, 40)],
        "heights": [0.0, 0.5],
        "spreads_deg": [90.0],
        "nodes": DEFAULT_NODES,
        "seed": 0,
        "trials": 1,
    },
    "kronecker": {
        "variants": [
            {"name": "2d", "n": 25, "spacing": 5.0 / 24, "h": 0.0},
            {"name": "3d", "n": 25, "spacing": 5.0 / 24, "h": 0.5},
        ],
        "baseline": "2d",
        "spreads_deg": [90.0, 60.0],
        "snr_db": [10.0, 20.0],
        "xpd": 1.0,
        "grid": [181, 360],
        "seed": 0,
        "trials": 2000,
    },
    "capacity": {
        "length": 2.0,
        "counts": list(range(3, 22)),
        "h": 0.0,
        "spread_deg": 90.0,
        "snr_db": [10.0, 20.0],
        "n_t": None,
        "nodes": DEFAULT_NODES,
        "seed": 0,
        "trials": 2000,
    },
    "gain": {
        "variants": [
            {"name": "2d", "n": 25, "spacing": 5.0 / 24, "h": 0.0},
            {"name": "3d", "n": 25, "spacing": 5.0 / 24, "h": 0.5},
        ],
        "scan_deg": [0.0, 35.0, 70.0],
        "aperture_width": 0.5,
        "grid": [181, 360],
        "summary_only": False,
        "seed": 0,
        "trials": 1,
    },
    "uma": {
        "scenarios": ["uma2d", "uma3d"],
        "scenario": {},
        "variants": [
            {"name": "2d", "n": 11, "spacing": 0.2, "h": 0.0},
            {"name": "3d", "n": 11, "spacing": 0.2, "h": 0.5},
        ],
        "snr_db": 20.0,
        "capacity_trials": 500,
        "grid": [91, 180],
        "seed": 0,
        "trials": 50,
    },
    "parse-touchstone": {"seed": 0, "trials": 1},
}


def _json_path(err: jsonschema.ValidationError) -> str:
    out = ""
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def resolve_config(command: str, doc: dict | None = None, seed=None, trials=None) -> dict:
    """Merge defaults, a config document and CLI overrides; validate the result.

    Raises
    ------
    ConfigError
        Schema violation (unknown key, wrong type, out-of-range value); the
        message carries the offending field path.
    """
    doc = {} if doc is None else doc
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object", "")
    validator = jsonschema.Draft202012Validator(_schema(command))
    errors = sorted(validator.iter_errors(doc), key=lambda e: [str(p) for p in e.absolute_path])
    if errors:
        err = errors[0]
        raise ConfigError(err.message, _json_path(err) or "<root>")
    cfg = copy.deepcopy(DEFAULTS[command])
    cfg.update(copy.deepcopy(doc))
    if seed is not None:
        cfg["seed"] = int(seed)
    if trials is not None:
        cfg["trials"] = int(trials)
    if command == "uma":
        ScenarioConfig.from_dict(cfg["scenario"], "scenario")
    return cfg


def load_config(path) -> dict:
    """Read a JSON config file; syntax errors are configuration errors."""
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", "<root>") from exc


# -- helpers -------------------------------------------------------------------


def _geometry(v: dict):
    return build_linear_3d(v["n"], v["spacing"], v.get("h", 0.0))


def _variant_patterns(v: dict, geometry, grid):
    spec = v.get("patterns")
    if spec is None:
        return surrogate_patterns(geometry, tuple(grid))
    if isinstance(spec, list):
        if len(spec) != geometry.element_count:
            raise ConfigError(f"{len(spec)} pattern files for {geometry.element_count} elements", "patterns")
        return [load_pattern_grid(p) for p in spec]
    lower = load_pattern_grid(spec["lower"])
    upper = load_pattern_grid(spec["upper"]) if "upper" in spec else None
    return surrogate_patterns(geometry, lower=lower, upper=upper)


def _variant_efficiency(v: dict, n: int):
    if "touchstone" not in v:
        return np.ones(n)
    s = parse_touchstone(v["touchstone"])
    if s.port_count != n:
        raise ConfigError(f"Touchstone file has {s.port_count} ports, variant has {n} elements", "touchstone")
    freq = v.get("frequency_hz", float(s.frequencies[0]))
    try:
        return embedded_efficiency(s, freq)
    except InvalidArgumentError as exc:
        raise ConfigError(str(exc), "frequency_hz") from exc


def _map(fn, items, jobs: int):
    """Map preserving input order, optionally on a thread pool."""
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _at_variant(index: int, fn):
    """Re-raise a ConfigError with the variant index prefixed to its path."""
    try:
        return fn()
    except ConfigError as exc:
        raise ConfigError(str(exc).split(": ", 1)[-1], f"variants[{index}].{exc.path}") from exc


def _pct(new, base):
    return float(100.0 * (new / base - 1.0))


# -- subcommands ---------------------------------------------------------------


def cmd_clarke(cfg: dict, jobs: int = 1):
    """Diversity of fixed-length rows versus spacing, height difference and spread."""
    quad = QuadratureSpec(node_count=cfg["nodes"])
    points = []
    for spread in cfg["spreads_deg"]:
        for h in cfg["heights"]:
            for s in cfg["spacings"]:
                k = cfg["length"] / s
                if abs(k - round(k)) > 1e-6:
                    raise ConfigError(f"spacing {s!r} does not divide length {cfg['length']!r}", "spacings")
                points.append((spread, h, s, int(round(k)) + 1))

    def run(pt):
        spread, h, s, n = pt
        r = clarke_correlation(build_linear_3d(n, s, h), AngularSpectrum.from_degrees(spread), quad)
        return {"spacing": s, "h": h, "spread_deg": spread, "n": n, "diversity": diversity(r), "seed": cfg["seed"]}

    return ["spacing", "h", "spread_deg", "n", "diversity", "seed"], _map(run, points, jobs)


def cmd_kronecker(cfg: dict, jobs: int = 1):
    """Diversity and capacity per variant, spread and SNR, with increases over the baseline."""
    names = [v["name"] for v in cfg["variants"]]
    if cfg["baseline"] not in names:
        raise ConfigError(f"baseline {cfg['baseline']!r} is not a variant name", "baseline")
    prepared = []
    for i, v in enumerate(cfg["variants"]):
        g = _geometry(v)
        pats = _at_variant(i, lambda: place_patterns(g, _variant_patterns(v, g, cfg["grid"])))
        e = _at_variant(i, lambda: _variant_efficiency(v, g.element_count))
        prepared.append((v["name"], g, pats, e))
    points = [(s, snr, p) for s in cfg["spreads_deg"] for snr in cfg["snr_db"] for p in prepared]

    def run(pt):
        spread, snr, (name, g, pats, e) = pt
        ref = pats[0]
        spec = cap_power_spectrum(ref.theta, ref.phi, np.radians(spread), cfg["xpd"])
        r = covariance(pattern_correlation(pats, spec), e)
        cap = geometry_capacity(r, g, snr, trials=cfg["trials"], seed=cfg["seed"])
        return {
            "variant": name, "spread_deg": spread, "snr_db": snr,
            "spacing": cfg["variants"][names.index(name)]["spacing"],
            "h": cfg["variants"][names.index(name)].get("h", 0.0),
            "diversity": diversity(r), "capacity": cap.mean_bits_per_s_per_hz,
            "ci95": cap.half_width_95, "seed": cfg["seed"],
        }

    rows = _map(run, points, jobs)
    base = {(r["spread_deg"], r["snr_db"]): r for r in rows if r["variant"] == cfg["baseline"]}
    for r in rows:
        b = base[(r["spread_deg"], r["snr_db"])]
        r["diversity_increase_pct"] = _pct(r["diversity"], b["diversity"])
        r["capacity_increase_pct"] = _pct(r["capacity"], b["capacity"])
    cols = ["variant", "spacing", "h", "spread_deg", "snr_db", "diversity", "capacity", "ci95",
            "diversity_increase_pct", "capacity_increase_pct", "seed"]
    return cols, rows


def cmd_capacity(cfg: dict, jobs: int = 1):
    """Capacity of a fixed-length row versus element count under the point-source model."""
    quad = QuadratureSpec(node_count=cfg["nodes"])
    spectrum = AngularSpectrum.from_degrees(cfg["spread_deg"])
    points = [(n, snr) for n in cfg["counts"] for snr in cfg["snr_db"]]

    def run(pt):
        n, snr = pt
        s = cfg["length"] / (n - 1)
        g = build_linear_3d(n, s, cfg["h"])
        r = clarke_correlation(g, spectrum, quad)
        cap = geometry_capacity(r, g, snr, n_t=cfg["n_t"], trials=cfg["trials"], seed=cfg["seed"])
        return {
            "spacing": s, "h": cfg["h"], "spread_deg": cfg["spread_deg"], "snr_db": snr,
            "diversity": diversity(r), "capacity": cap.mean_bits_per_s_per_hz,
            "ci95": cap.half_width_95, "seed": cfg["seed"], "n": n,
            "normalization": cap.normalization_mode.value,
        }

    return ["n"] + RESULT_COLUMNS + ["normalization"], _map(run, points, jobs)


def cmd_gain(cfg: dict, jobs: int = 1):
    """Beamforming gain per variant and scan angle, with the planar aperture limit."""
    prepared = []
    for i, v in enumerate(cfg["variants"]):
        g = _geometry(v)
        pats = _at_variant(i, lambda: _variant_patterns(v, g, cfg["grid"]))
        length = cfg.get("aperture_length", g.aperture_length())
        prepared.append((v["name"], g, pats, length * cfg["aperture_width"]))
    points = [(p, scan) for p in prepared for scan in cfg["scan_deg"]]

    def run(pt):
        (name, g, pats, area), scan = pt
        gp = beamforming_gain(g, pats, np.radians(scan))
        limit = gain_limit_2d(area, np.radians(scan))
        summary = {
            "variant": name, "scan_deg": scan, "angle_deg": scan,
            "gain_db": float(to_db(gp.scan_gain())), "limit_db": float(to_db(limit)),
            "peak_db": float(to_db(gp.peak())), "aperture_area": area,
        }
        if cfg["summary_only"]:
            return [summary]
        angles, values = gp.cut()
        out = []
        for a, val in zip(np.degrees(angles), values):
            inside = abs(a) < 90.0
            out.append({
                "variant": name, "scan_deg": scan, "angle_deg": float(np.round(a, 6)),
                "gain_db": float(to_db(max(val, 1e-300))),
                "limit_db": float(to_db(gain_limit_2d(area, np.radians(a)))) if inside else "",
                "peak_db": summary["peak_db"], "aperture_area": area,
            })
        return out

    rows = [r for chunk in _map(run, points, jobs) for r in chunk]
    return ["variant", "scan_deg", "angle_deg", "gain_db", "limit_db", "peak_db", "aperture_area"], rows


def cmd_uma(cfg: dict, jobs: int = 1):
    """Table of mean diversity and capacity per UMa scenario and array variant."""
    variants = []
    for i, v in enumerate(cfg["variants"]):
        g = _geometry(v)
        pats = _at_variant(i, lambda: _variant_patterns(v, g, cfg["grid"]))
        e = _at_variant(i, lambda: _variant_efficiency(v, g.element_count))
        variants.append(ArrayVariant(v["name"], g, pats, tuple(e)))

    def run(dim):
        sc = ScenarioConfig.from_dict({**cfg["scenario"], "dimensionality": dim, "seed": cfg["seed"]}, "scenario")
        return run_scenario(sc, variants, trials=cfg["trials"], snr_db=cfg["snr_db"],
                            capacity_trials=cfg["capacity_trials"])

    rows = [r for chunk in _map(run, cfg["scenarios"], jobs) for r in chunk]
    return UMA_COLUMNS, rows


def cmd_parse_touchstone(cfg: dict, path: str):
    """Validate a Touchstone file and report passivity and port efficiencies."""
    s = parse_touchstone(path)
    if "frequency_hz" in cfg:
        try:
            picks = [s.index_of(cfg["frequency_hz"])]
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc), "frequency_hz") from exc
    else:
        picks = range(s.frequencies.size)
    sv = s.max_singular_values()
    rows = []
    for k in picks:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            e = embedded_efficiency(s, s.frequencies[k])
        rows.append({
            "frequency_hz": float(s.frequencies[k]), "ports": s.port_count,
            "max_singular_value": float(sv[k]), "passive": bool(sv[k] <= 1.0 + 1e-6),
            "efficiencies": " ".join(repr(float(x)) for x in e),
        })
    return ["frequency_hz", "ports", "max_singular_value", "passive", "efficiencies"], rows


COMMANDS = {
    "clarke": cmd_clarke,
    "kronecker": cmd_kronecker,
    "capacity": cmd_capacity,
    "gain": cmd_gain,
    "uma": cmd_uma,
}


# -- entry point ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with parameters overriding the defaults")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--seed", type=int, help="random seed recorded in the output")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    common.add_argument("--trials", type=int, help="Monte-Carlo trials (drops for 'uma')")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for sweep points")

    parser = argparse.ArgumentParser(
        prog="holomimo",
        description="Diversity, capacity and gain of planar and height-staggered antenna rows.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("clarke", parents=[common], help="diversity sweep under the point-source (Clarke) model")
    sub.add_parser("kronecker", parents=[common], help="pattern/efficiency based diversity and capacity")
    sub.add_parser("capacity", parents=[common], help="capacity versus element count for a fixed length")
    sub.add_parser("gain", parents=[common], help="beamforming gain against the planar aperture limit")
    sub.add_parser("uma", parents=[common], help="urban-macro scenario comparison table")
    pt = sub.add_parser("parse-touchstone", parents=[common], help="validate a Touchstone .sNp file")
    pt.add_argument("path", help="Touchstone file")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is not None and args.seed < 0:
            raise ConfigError("seed must be non-negative", "seed")
        if args.trials is not None and args.trials < 1:
            raise ConfigError("trials must be positive", "trials")
        if args.jobs < 1:
            raise ConfigError("jobs must be positive", "jobs")
        doc = None
        if args.config:
            doc = load_config(args.config)
        cfg = resolve_config(args.command, doc, args.seed, args.trials)
        meta = {"command": args.command, "config": cfg, "seed": cfg["seed"], "version": __version__}
        if args.command == "parse-touchstone":
            meta["input"] = args.path
            columns, rows = cmd_parse_touchstone(cfg, args.path)
        else:
            columns, rows = COMMANDS[args.command](cfg, args.jobs)
        write_text(format_records(rows, columns, meta, args.format), args.out)
    except ConfigError as exc:
        print(f"holomimo: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, DegenerateInputError) as exc:
        print(f"holomimo: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputFileError, OutputError, OSError) as exc:
        print(f"holomimo: input/output error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidArgumentError as exc:
        print(f"holomimo: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HolomimoError as exc:
        print(f"holomimo: error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
