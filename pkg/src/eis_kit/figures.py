"""Plot-ready columnar exports for every figure-style artifact.

``export_figure_data`` turns in-memory results into flat schema-tagged
CSVs consumable by any external plotting tool; ``read_figure_data``
re-ingests them losslessly (floats are written with full round-trip
precision).
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .io import SWEEP_COLUMNS, SWEEP_SCHEMA, read_csv, write_csv, write_measurements

FIGURE_KINDS = (
    "sweep",
    "noise_spectrum",
    "cdr",
    "box",
    "acf",
    "prediction",
    "histogram",
)

_SCHEMAS = {
    "sweep": (SWEEP_SCHEMA, SWEEP_COLUMNS),
    "noise_spectrum": (
        "noise-spectrum",
        (
            "freq_hz",
            "psd_v2_per_hz",
            "term_thermal",
            "term_interface",
            "term_ktc",
            "term_flicker",
        ),
    ),
    "cdr": ("cdr", ("concentration_mg_dl", "ph", "mean_delta_z_pct", "sem_pct")),
    "box": (
        "box",
        (
            "concentration_mg_dl",
            "q1",
            "median",
            "q3",
            "iqr",
            "whisker_lo",
            "whisker_hi",
        ),
    ),
    "acf": ("acf", ("lag", "r", "band_lo", "band_hi")),
    "prediction": (
        "prediction",
        ("timestamp_s", "reference_mg_dl", "predicted_mg_dl", "residual_mg_dl"),
    ),
    "histogram": ("histogram", ("bin_left", "count")),
}


def export_figure_data(kind: str, data, path) -> None:
    """Write one figure artifact.

    Expected ``data`` per kind: ``sweep`` a measurement list;
    ``noise_spectrum`` (f_grid, NoiseTerms list); ``cdr`` rows of
    (concentration, ph, mean, sem); ``box`` rows of (concentration,
    BoxStats); ``acf`` an AcfResult; ``prediction`` a PredictionResult;
    ``histogram`` a Histogram.
    """
    if kind not in _SCHEMAS:
        raise ConfigurationError(
            f"unknown figure kind {kind!r} (known: {', '.join(FIGURE_KINDS)})"
        )
    schema, columns = _SCHEMAS[kind]

    if kind == "sweep":
        write_measurements(path, data)
        return
    if kind == "noise_spectrum":
        f_grid, terms = data
        rows = (
            (f, t.total, t.thermal, t.interface, t.ktc, t.flicker)
            for f, t in zip(f_grid, terms)
        )
    elif kind == "cdr":
        rows = data
    elif kind == "box":
        rows = (
            (c, b.q1, b.median, b.q3, b.iqr, b.whisker_lo, b.whisker_hi)
            for c, b in data
        )
    elif kind == "acf":
        rows = (
            (int(lag), r, -data.band, data.band)
            for lag, r in zip(data.lags, data.r)
        )
    elif kind == "prediction":
        rows = zip(data.timestamps, data.reference, data.fitted, data.residuals)
    else:  # histogram
        rows = zip(data.edges[:-1], data.counts)
    write_csv(path, schema, columns, rows)


def read_figure_data(kind: str, path) -> dict[str, np.ndarray]:
    """Re-ingest a figure artifact as named numpy columns."""
    if kind not in _SCHEMAS:
        raise ConfigurationError(
            f"unknown figure kind {kind!r} (known: {', '.join(FIGURE_KINDS)})"
        )
    schema, columns = _SCHEMAS[kind]
    found_columns, rows = read_csv(path, schema)
    if tuple(found_columns) != tuple(columns):
        from .errors import SchemaError

        raise SchemaError(f"{path}: expected columns {','.join(columns)}")
    data = np.array(rows) if rows else np.empty((0, len(columns)))
    return {name: data[:, i] for i, name in enumerate(columns)}
