"""File interchange: Touchstone v1.1 S-parameters, matrices and result tables.

Touchstone support covers the v1.1 subset needed for measured array
S-parameters: ``S`` parameters in RI, MA or DB format with Hz/kHz/MHz/GHz
frequency units.  Files are read into :class:`~holomimo.kronecker.ScatteringMatrix`
(RI, Hz) and written back in a canonical layout that round-trips exactly.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    DataError,
    FormatError,
    InvalidArgumentError,
    OutputError,
    ParseError,
    UnsupportedVersionError,
)
from .kronecker import ScatteringMatrix

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
FORMATS = ("RI", "MA", "DB")
PAIRS_PER_LINE = 4
_EXT = re.compile(r"\.s(\d{1,2})p$", re.IGNORECASE)
_V2_KEYWORDS = re.compile(r"^\s*\[", re.ASCII)

RESULT_COLUMNS = ["spacing", "h", "spread_deg", "snr_db", "diversity", "capacity", "ci95", "seed"]
UMA_COLUMNS = [
    "scenario", "variant", "users", "drops", "snr_db", "diversity", "capacity",
    "diversity_increase_pct", "capacity_increase_pct", "seed", "capacity_seeds",
]


# -- Touchstone ---------------------------------------------------------------


@dataclass
class OptionLine:
    unit: str = "GHZ"
    parameter: str = "S"
    fmt: str = "MA"
    impedance: float = 50.0

    @property
    def scale(self) -> float:
        return FREQ_UNITS[self.unit]


@dataclass
class TouchstoneDocument:
    """Parsed contents of a Touchstone file before conversion."""

    options: OptionLine
    port_count: int
    comments: list = field(default_factory=list)
    frequencies: list = field(default_factory=list)  # Hz
    blocks: list = field(default_factory=list)  # N x N complex arrays

    def to_matrix(self) -> ScatteringMatrix:
        data = np.array(self.blocks, dtype=complex).reshape(-1, self.port_count, self.port_count)
        return ScatteringMatrix(np.array(self.frequencies, dtype=float), data, self.options.impedance)


def port_count_from_path(path) -> int:
    """Port count ``N`` from a ``.sNp`` file name (N in 1..99)."""
    m = _EXT.search(str(path))
    if not m or not 1 <= int(m.group(1)) <= 99:
        raise ParseError(f"cannot infer port count from file name {Path(path).name!r} (expected .sNp)", None, path)
    return int(m.group(1))


def _parse_option_line(text: str, lineno: int, source) -> OptionLine:
    opts = OptionLine()
    tokens = text[1:].split()
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in FREQ_UNITS:
            opts.unit = tok
        elif tok in FORMATS:
            opts.fmt = tok
        elif tok in ("S", "Y", "Z", "H", "G"):
            if tok != "S":
                raise FormatError(f"only S-parameters are supported, found {tok}", lineno, source)
            opts.parameter = tok
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise ParseError("option line: R without impedance", lineno, source)
            try:
                opts.impedance = float(tokens[i + 1])
            except ValueError as exc:
                raise ParseError(f"option line: bad impedance {tokens[i + 1]!r}", lineno, source) from exc
            if not opts.impedance > 0:
                raise DataError("reference impedance must be positive", lineno, source)
            i += 1
        else:
            raise ParseError(f"option line: unknown token {tokens[i]!r}", lineno, source)
        i += 1
    return opts


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    ang = np.radians(b)
    return mag * np.cos(ang) + 1j * mag * np.sin(ang)


def _block_matrix(values: np.ndarray, n: int, fmt: str) -> np.ndarray:
    pairs = values.reshape(-1, 2)
    flat = _to_complex(pairs[:, 0], pairs[:, 1], fmt)
    mat = flat.reshape(n, n)
    if n == 2:
        # two-port files list S11 S21 S12 S22, i.e. column-major order
        mat = mat.T.copy()
    return mat


def parse_touchstone_text(text: str, port_count: int, source=None) -> TouchstoneDocument:
    """Parse Touchstone v1.1 text for an ``port_count``-port network.

    Raises
    ------
    ParseError
        Missing or repeated option line, malformed option line, non-numeric
        token.
    FormatError
        Incomplete frequency block, blocks not starting on a new line,
        non-ascending frequencies, unsupported parameter type.
    DataError
        Non-finite values or non-positive frequencies.
    UnsupportedVersionError
        Touchstone 2.0 keyword lines (``[Version]`` etc.).
    """
    n = int(port_count)
    if not 1 <= n <= 99:
        raise InvalidArgumentError("port count must lie in 1..99")
    per_block = 1 + 2 * n * n
    options = None
    comments = []
    freqs, blocks = [], []
    pending: list[float] = []
    block_line = None
    last_line = 0
    in_noise = False

    def close_block():
        vals = np.array(pending[1:], dtype=float)
        f = pending[0] * options.scale
        if not f > 0 and not (f == 0 and not freqs):
            raise DataError(f"frequency must be positive, got {pending[0]!r}", block_line, source)
        if freqs and f <= freqs[-1]:
            raise FormatError(
                f"frequencies must be strictly ascending ({pending[0]!r} follows {freqs[-1] / options.scale!r})",
                block_line, source,
            )
        freqs.append(f)
        blocks.append(_block_matrix(vals, n, options.fmt))

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        body, bang, comment = raw.partition("!")
        if bang:
            comments.append(comment.strip())
        line = body.strip()
        if not line:
            continue
        if _V2_KEYWORDS.match(line):
            raise UnsupportedVersionError(
                f"Touchstone 2.0 keyword {line.split()[0]!r} is not supported (v1.1 only)", lineno, source
            )
        if line.startswith("#"):
            if options is not None:
                raise ParseError("option line appears more than once", lineno, source)
            if freqs or pending:
                raise ParseError("option line must precede the data", lineno, source)
            options = _parse_option_line(line, lineno, source)
            continue
        if options is None:
            raise ParseError("missing option line ('# <unit> S <fmt> R <Z0>') before data", lineno, source)
        if in_noise:
            continue
        tokens = line.split()
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            bad = next(t for t in tokens if not _is_number(t))
            raise ParseError(f"non-numeric token {bad!r}", lineno, source) from None
        if not all(np.isfinite(values)):
            raise DataError("non-finite value", lineno, source)
        if not pending:
            # two-port noise data starts at a frequency not above the last one
            if n == 2 and freqs and len(values) == 5 and values[0] * options.scale <= freqs[-1]:
                warnings.warn(
                    f"{source or 'touchstone'}: noise parameter section at line {lineno} ignored",
                    UserWarning,
                    stacklevel=2,
                )
                in_noise = True
                continue
            block_line = lineno
            if n <= 2 and len(values) != per_block:
                raise FormatError(
                    f"expected {per_block} values for a {n}-port frequency line, found {len(values)}",
                    lineno, source,
                )
        elif len(values) % 2:
            raise FormatError("continuation line must hold whole real/imaginary pairs", lineno, source)
        pending.extend(values)
        if len(pending) > per_block:
            raise FormatError(
                f"frequency block starting at line {block_line} has {len(pending)} values, expected {per_block}",
                lineno, source,
            )
        if len(pending) == per_block:
            close_block()
            pending = []
    if options is None:
        raise ParseError("missing option line", max(last_line, 1), source)
    if pending:
        raise FormatError(
            f"truncated frequency block: {len(pending)} of {per_block} values", last_line, source
        )
    if not freqs:
        raise FormatError("file contains no frequency data", max(last_line, 1), source)
    return TouchstoneDocument(options, n, comments, freqs, blocks)


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def parse_touchstone(path) -> ScatteringMatrix:
    """Read a ``.sNp`` file into a :class:`ScatteringMatrix` (RI, Hz)."""
    n = port_count_from_path(path)
    try:
        text = Path(path).read_text()
    except UnicodeDecodeError as exc:
        raise ParseError(f"file is not text: {exc}", None, path) from exc
    return parse_touchstone_text(text, n, source=str(path)).to_matrix()


def _fmt(x: float) -> str:
    return "%.17g" % x


def _pair(value: complex, fmt: str) -> tuple[str, str]:
    if fmt == "RI":
        return _fmt(value.real), _fmt(value.imag)
    mag = abs(value)
    ang = float(np.degrees(np.angle(value)))
    if fmt == "MA":
        return _fmt(mag), _fmt(ang)
    if mag == 0:
        raise OutputError("zero magnitude cannot be written in DB format")
    return _fmt(20.0 * np.log10(mag)), _fmt(ang)


def format_touchstone(s: ScatteringMatrix, fmt: str = "RI", unit: str = "Hz", comments=()) -> str:
    """Canonical Touchstone v1.1 text for ``s``.

    One- and two-port networks put each frequency on one line.  Larger
    networks start every matrix row on a new line and wrap after four pairs.
    """
    fmt = fmt.upper()
    if fmt not in FORMATS:
        raise InvalidArgumentError(f"format must be one of {FORMATS}")
    ukey = unit.upper()
    if ukey not in FREQ_UNITS:
        raise InvalidArgumentError("unit must be one of Hz, kHz, MHz, GHz")
    if s.frequencies.size == 0:
        raise OutputError("refusing to write a Touchstone file without frequencies")
    scale = FREQ_UNITS[ukey]
    n = s.port_count
    out = [f"! {c}" for c in comments]
    out.append(f"# {unit} S {fmt} R {_fmt(s.reference_impedance)}")
    for f, mat in zip(s.frequencies, s.data):
        freq = _fmt(f / scale)
        if n <= 2:
            order = mat.T.ravel() if n == 2 else mat.ravel()
            out.append(" ".join([freq] + [t for v in order for t in _pair(complex(v), fmt)]))
            continue
        for r in range(n):
            pairs = [" ".join(_pair(complex(v), fmt)) for v in mat[r]]
            for c in range(0, n, PAIRS_PER_LINE):
                chunk = "  ".join(pairs[c:c + PAIRS_PER_LINE])
                lead = freq if (r == 0 and c == 0) else " " * len(freq)
                out.append(f"{lead}  {chunk}")
    return "\n".join(out) + "\n"


def write_touchstone(s: ScatteringMatrix, path, fmt: str = "RI", unit: str = "Hz", comments=()) -> None:
    """Write ``s`` to ``path``; the ``.sNp`` extension must match the port count."""
    m = _EXT.search(str(path))
    if m and int(m.group(1)) != s.port_count:
        raise OutputError(f"{Path(path).name} implies {m.group(1)} ports, matrix has {s.port_count}")
    text = format_touchstone(s, fmt, unit, comments)
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


# -- matrices -----------------------------------------------------------------


def matrix_to_csv(mat) -> str:
    """Complex matrix as CSV: one row per matrix row, ``re,im`` pairs per entry."""
    m = np.atleast_2d(np.asarray(mat, dtype=complex))
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"{p}_{j}" for j in range(m.shape[1]) for p in ("re", "im")])
    for row in m:
        w.writerow([repr(float(x)) for v in row for x in (v.real, v.imag)])
    return buf.getvalue()


def matrix_from_csv(text: str, source=None) -> np.ndarray:
    rows = list(csv.reader(_stdio.StringIO(text)))
    if not rows:
        raise ParseError("empty matrix file", 1, source)
    body = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(rows[0]) or len(row) % 2:
            raise FormatError("ragged matrix row", lineno, source)
        try:
            vals = np.array([float(x) for x in row])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from exc
        body.append(vals[0::2] + 1j * vals[1::2])
    return np.array(body, dtype=complex)


def matrix_to_json(mat) -> str:
    m = np.atleast_2d(np.asarray(mat, dtype=complex))
    return json.dumps({"real": m.real.tolist(), "imag": m.imag.tolist()})


def matrix_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    return np.array(doc["real"], dtype=float) + 1j * np.array(doc["imag"], dtype=float)


# -- result records -------------------------------------------------------------


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, np.integer):
        return str(int(v))
    return v


def format_records(rows: list[dict], columns: list[str], meta: dict, fmt: str = "csv") -> str:
    """Serialize result rows with a metadata header.

    CSV output begins with ``# config: <json>`` and ``# seed: <n>`` comment
    lines; JSON output is ``{"meta": ..., "rows": [...]}``.  Row order is
    preserved.
    """
    if fmt == "json":
        clean = [{c: _json_value(r.get(c)) for c in columns} for r in rows]
        return json.dumps({"meta": meta, "rows": clean}, indent=2, sort_keys=False) + "\n"
    if fmt != "csv":
        raise InvalidArgumentError("output format must be 'csv' or 'json'")
    buf = _stdio.StringIO()
    for key, value in meta.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, np.generic):
        return v.item()
    return v


def parse_records(text: str) -> tuple[dict, list[dict]]:
    """Inverse of :func:`format_records` (values come back as strings for CSV)."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        return doc["meta"], doc["rows"]
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
        else:
            body.append(line)
    rows = list(csv.DictReader(body))
    return meta, rows


def write_text(text: str, path=None) -> None:
    """Write to ``path`` or standard output when ``path`` is None or '-'."""
    if path in (None, "-"):
        import sys

        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def load_json(path, error=ParseError) -> dict:
    try:
        text = Path(path).read_text()
    except FileNotFoundError as exc:
        raise error(f"file not found: {path}", None, path) from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise error(f"invalid JSON: {exc.msg}", exc.lineno, path) from exc
