"""Versioned CSV / key=value file handling.

Every CSV the kit writes starts with a schema comment line

    # eis-kit v<semver> <schema-name>

followed by a plain header row. Readers reject files whose major version
or schema name does not match. Floats are written with ``repr`` so files
round-trip to identical in-memory values and re-runs are byte-identical.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigurationError, SchemaError
from .regarima.series import SubjectSeries

_VERSION_RE = re.compile(r"^# eis-kit v(\d+)\.(\d+)\.(\d+) (\S+)\s*$")
_MAJOR = int(__version__.split(".")[0])


def format_value(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, schema: str, columns, rows) -> None:
    """Write a schema-tagged CSV with deterministic float formatting."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        fh.write(f"# eis-kit v{__version__} {schema}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def read_csv(path, schema: str):
    """Read a schema-tagged CSV; returns (columns, list of float-row tuples).

    Schema-name or major-version mismatch, ragged rows and non-numeric
    cells all raise :class:`SchemaError` with the offending location.
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}")
    if not lines:
        raise SchemaError(f"{path}: empty file")
    m = _VERSION_RE.match(lines[0])
    if not m:
        raise SchemaError(f"{path}: missing '# eis-kit v<semver> <schema>' header line")
    major, found_schema = int(m.group(1)), m.group(4)
    if found_schema != schema:
        raise SchemaError(f"{path}: expected schema {schema!r}, found {found_schema!r}")
    if major != _MAJOR:
        raise SchemaError(
            f"{path}: unsupported major version {major} (this build reads {_MAJOR})"
        )
    if len(lines) < 2:
        raise SchemaError(f"{path}: missing column header row")
    reader = csv.reader(lines[1:])
    columns = next(reader)
    rows = []
    for idx, raw in enumerate(reader, start=3):  # 1-based file line numbers
        if not raw:
            continue
        if len(raw) != len(columns):
            raise SchemaError(
                f"{path}: row {idx} has {len(raw)} fields, expected {len(columns)}"
            )
        try:
            rows.append(tuple(float(v) for v in raw))
        except ValueError:
            bad = next(i for i, v in enumerate(raw, start=1) if not _is_float(v))
            raise SchemaError(f"{path}: row {idx} column {bad}: not a number")
    return columns, rows


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def read_keyvalue(path) -> dict[str, str]:
    """Parse a plain ``key=value`` config file ('#' starts a comment)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}")
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}: line {lineno}: expected key=value")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigurationError(f"{path}: line {lineno}: empty key")
        out[key] = value.strip()
    return out


# ---------------------------------------------------------------------------
# Concrete file schemas
# ---------------------------------------------------------------------------

SWEEP_SCHEMA = "sweep"
SWEEP_COLUMNS = (
    "channel",
    "timestamp_s",
    "freq_hz",
    "zreal_ohm",
    "zimag_ohm",
    "zmod_ohm",
    "zphase_deg",
)

SERIES_SCHEMA = "subject-series"
SERIES_COLUMNS = (
    "timestamp_s",
    "zreal_ohm",
    "zimag_ohm",
    "zmod_ohm",
    "zphase_deg",
    "skin_temp_c",
    "rh_pct",
)

REFERENCE_SCHEMA = "reference-glucose"
REFERENCE_COLUMNS = ("time_s", "glucose_mg_dl")

DOSE_SCHEMA = "dose-response"
DOSE_COLUMNS = (
    "concentration_mg_dl",
    "ph",
    "replicate",
    "zmod_ohm",
    "zbaseline_ohm",
)


def write_measurements(path, measurements) -> None:
    rows = (
        (
            m.channel,
            m.timestamp,
            m.freq_hz,
            m.z.real,
            m.z.imag,
            m.zmod,
            m.zphase,
        )
        for m in measurements
    )
    write_csv(path, SWEEP_SCHEMA, SWEEP_COLUMNS, rows)


def write_subject_series(path, subject: SubjectSeries) -> None:
    rows = zip(
        subject.timestamps,
        subject.zreal,
        subject.zimag,
        subject.zmod,
        subject.zphase,
        subject.skin_temp,
        subject.rh,
    )
    write_csv(path, SERIES_SCHEMA, SERIES_COLUMNS, rows)


def write_reference(path, ref_points) -> None:
    write_csv(path, REFERENCE_SCHEMA, REFERENCE_COLUMNS, ref_points)


def read_reference(path) -> list[tuple[float, float]]:
    _, rows = read_csv(path, REFERENCE_SCHEMA)
    return [(t, g) for t, g in rows]


def read_subject_series(series_path, ref_path) -> SubjectSeries:
    """Load a subject from its series CSV plus reference CSV."""
    columns, rows = read_csv(series_path, SERIES_SCHEMA)
    if tuple(columns) != SERIES_COLUMNS:
        raise SchemaError(
            f"{series_path}: expected columns {','.join(SERIES_COLUMNS)}"
        )
    if not rows:
        raise SchemaError(f"{series_path}: no data rows")
    data = np.array(rows)
    refs = read_reference(ref_path)
    try:
        return SubjectSeries(
            timestamps=data[:, 0],
            zreal=data[:, 1],
            zimag=data[:, 2],
            zmod=data[:, 3],
            zphase=data[:, 4],
            skin_temp=data[:, 5],
            rh=data[:, 6],
            ref_points=tuple(refs),
        )
    except ValueError as exc:
        raise SchemaError(f"{series_path}: {exc}")


def read_series_tracks(path) -> dict[str, np.ndarray]:
    """Load a series CSV as named tracks, including derivative tracks,
    without requiring reference samples."""
    columns, rows = read_csv(path, SERIES_SCHEMA)
    if tuple(columns) != SERIES_COLUMNS:
        raise SchemaError(f"{path}: expected columns {','.join(SERIES_COLUMNS)}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    data = np.array(rows)
    tracks = {
        "timestamp_s": data[:, 0],
        "zreal": data[:, 1],
        "zimag": data[:, 2],
        "zmod": data[:, 3],
        "zphase": data[:, 4],
        "skin_temp": data[:, 5],
        "rh": data[:, 6],
    }
    for base in ("zreal", "zimag", "zmod", "zphase"):
        d = np.empty(data.shape[0])
        d[0] = 0.0
        d[1:] = np.diff(tracks[base])
        tracks["d" + base] = d
    return tracks


def read_dose_points(path):
    """Load dose-response points; impedances are converted to percent
    change against the per-row baseline."""
    from .dose import DoseResponsePoint, percent_delta_z

    columns, rows = read_csv(path, DOSE_SCHEMA)
    if tuple(columns) != DOSE_COLUMNS:
        raise SchemaError(f"{path}: expected columns {','.join(DOSE_COLUMNS)}")
    points = []
    for idx, (conc, ph, replicate, zmod, zbase) in enumerate(rows, start=3):
        try:
            points.append(
                DoseResponsePoint(
                    concentration=conc,
                    ph=ph,
                    delta_z_pct=percent_delta_z(zmod, zbase),
                    replicate=int(replicate),
                )
            )
        except ValueError as exc:
            raise SchemaError(f"{path}: row {idx}: {exc}")
    return points
