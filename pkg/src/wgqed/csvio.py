"""Delimited-text serialization for every sampled quantity the package emits.

One schema per header.  Files are UTF-8 with LF line endings and 17
significant digits, so emit -> ingest round-trips exactly and re-runs are
byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np

from .device import Spectrum
from .errors import CsvParseError, CsvSchemaError
from .photonstats import DetuningCurve, G2Trace
from .tuning import TimeSeries


class PowerCurve:
    """Extinction versus optical power."""

    def __init__(self, powers_nw, extinctions):
        self.powers_nw = np.asarray(powers_nw, dtype=float)
        self.extinctions = np.asarray(extinctions, dtype=float)


SPECTRUM_WAVELENGTH_HEADER = "wavelength_nm,transmission"
SPECTRUM_DETUNING_HEADER = "detuning_ueV,transmission"
G2_HEADER = "delay_ns,g2"
TIMESERIES_HEADER = "time_ns,intensity"
POWER_HEADER = "power_nW,extinction"
BUNCHING_HEADER = "detuning_ueV,max_g2"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write(path: Path, header: str, *columns) -> Path:
    path = Path(path)
    lines = [header]
    for row in zip(*columns):
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def write_spectrum(path, spectrum: Spectrum) -> Path:
    header = (
        SPECTRUM_DETUNING_HEADER
        if spectrum.axis_name == "detuning_ueV"
        else SPECTRUM_WAVELENGTH_HEADER
    )
    return _write(Path(path), header, spectrum.axis, spectrum.values)


def write_g2(path, trace: G2Trace) -> Path:
    return _write(Path(path), G2_HEADER, trace.delays_ns, trace.values)


def write_timeseries(path, ts: TimeSeries) -> Path:
    return _write(Path(path), TIMESERIES_HEADER, ts.times_ns, ts.values)


def write_power_curve(path, curve: PowerCurve) -> Path:
    return _write(Path(path), POWER_HEADER, curve.powers_nw, curve.extinctions)


def write_detuning_curve(path, curve: DetuningCurve) -> Path:
    return _write(Path(path), BUNCHING_HEADER, curve.detunings_uev, curve.max_g2)


IngestResult = Union[Spectrum, G2Trace, TimeSeries, PowerCurve, DetuningCurve]


def ingest_csv(path) -> IngestResult:
    """Parse a CSV emitted by this package, auto-detecting its schema.

    Raises ``CsvSchemaError`` on an unknown header and ``CsvParseError``
    (naming the line) on malformed rows.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise CsvSchemaError(f"{path}: empty file")
    header = lines[0].strip()
    known = {
        SPECTRUM_WAVELENGTH_HEADER,
        SPECTRUM_DETUNING_HEADER,
        G2_HEADER,
        TIMESERIES_HEADER,
        POWER_HEADER,
        BUNCHING_HEADER,
    }
    if header not in known:
        raise CsvSchemaError(f"{path}: unknown header {header!r}")
    col_a, col_b = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 2:
            raise CsvParseError(f"{path}:{lineno}: expected 2 columns, got {len(cells)}")
        try:
            col_a.append(float(cells[0]))
            col_b.append(float(cells[1]))
        except ValueError as exc:
            raise CsvParseError(f"{path}:{lineno}: non-numeric cell ({exc})")
    a = np.asarray(col_a)
    b = np.asarray(col_b)
    if header == SPECTRUM_WAVELENGTH_HEADER:
        return Spectrum(axis=a, values=b, axis_name="wavelength_nm")
    if header == SPECTRUM_DETUNING_HEADER:
        return Spectrum(axis=a, values=b, axis_name="detuning_ueV")
    if header == G2_HEADER:
        return G2Trace(delays_ns=a, values=b)
    if header == TIMESERIES_HEADER:
        return TimeSeries(times_ns=a, values=b)
    if header == BUNCHING_HEADER:
        return DetuningCurve(detunings_uev=a, max_g2=b)
    return PowerCurve(powers_nw=a, extinctions=b)
