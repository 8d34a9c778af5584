import numpy as np
import pytest

from wgqed import csvio
from wgqed.device import Spectrum
from wgqed.errors import CsvParseError, CsvSchemaError
from wgqed.photonstats import DetuningCurve, G2Trace
from wgqed.tuning import TimeSeries


def test_spectrum_round_trip(tmp_path):
    spec = Spectrum(
        np.linspace(892.99, 893.01, 7),
        np.array([1.0, 0.9, 0.62, 0.6000000000000001, 0.62, 0.9, 1.0]),
        "wavelength_nm",
    )
    path = csvio.write_spectrum(tmp_path / "s.csv", spec)
    back = csvio.ingest_csv(path)
    assert isinstance(back, Spectrum)
    assert back.axis_name == "wavelength_nm"
    assert np.array_equal(back.axis, spec.axis)
    assert np.array_equal(back.values, spec.values)


def test_detuning_spectrum_schema(tmp_path):
    spec = Spectrum(np.linspace(-5, 5, 5), np.ones(5), "detuning_ueV")
    back = csvio.ingest_csv(csvio.write_spectrum(tmp_path / "d.csv", spec))
    assert isinstance(back, Spectrum)
    assert back.axis_name == "detuning_ueV"


def test_g2_header_detected(tmp_path):
    trace = G2Trace(np.linspace(-3, 3, 7), 1.0 + 0.1 * np.ones(7))
    back = csvio.ingest_csv(csvio.write_g2(tmp_path / "g.csv", trace))
    assert isinstance(back, G2Trace)
    assert np.array_equal(back.delays_ns, trace.delays_ns)


def test_timeseries_round_trip(tmp_path):
    ts = TimeSeries(np.arange(5.0), np.linspace(0, 1, 5))
    back = csvio.ingest_csv(csvio.write_timeseries(tmp_path / "t.csv", ts))
    assert isinstance(back, TimeSeries)
    assert np.array_equal(back.values, ts.values)


def test_power_curve_round_trip(tmp_path):
    curve = csvio.PowerCurve(np.linspace(0, 100, 6), np.linspace(0.4, 0.1, 6))
    back = csvio.ingest_csv(csvio.write_power_curve(tmp_path / "p.csv", curve))
    assert isinstance(back, csvio.PowerCurve)
    assert np.array_equal(back.powers_nw, curve.powers_nw)


def test_bunching_curve_round_trip(tmp_path):
    curve = DetuningCurve(np.linspace(-10, 10, 5), np.array([1.0, 1.1, 1.14, 1.1, 1.0]))
    back = csvio.ingest_csv(csvio.write_detuning_curve(tmp_path / "b.csv", curve))
    assert isinstance(back, DetuningCurve)
    assert np.array_equal(back.max_g2, curve.max_g2)


def test_full_precision_round_trip(tmp_path):
    # 17 significant digits survive the text round trip bit for bit
    values = np.array([1 / 3, np.pi, 0.6000000000000001, 1e-17, 123456.789012345])
    spec = Spectrum(np.arange(5.0), values, "detuning_ueV")
    back = csvio.ingest_csv(csvio.write_spectrum(tmp_path / "v.csv", spec))
    assert np.array_equal(back.values, values)


def test_unknown_header(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("frequency_ghz,counts\n1.0,2.0\n")
    with pytest.raises(CsvSchemaError):
        csvio.ingest_csv(path)


def test_truncated_row_names_line(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("delay_ns,g2\n-1.0,1.0\n0.0\n1.0,1.0\n")
    with pytest.raises(CsvParseError, match=":3:"):
        csvio.ingest_csv(path)


def test_non_numeric_cell_names_line(tmp_path):
    path = tmp_path / "x.csv"
    path.write_text("time_ns,intensity\n0.0,0.1\n1.0,oops\n")
    with pytest.raises(CsvParseError, match=":3:"):
        csvio.ingest_csv(path)


def test_lf_line_endings(tmp_path):
    spec = Spectrum(np.arange(3.0), np.ones(3), "detuning_ueV")
    path = csvio.write_spectrum(tmp_path / "lf.csv", spec)
    blob = path.read_bytes()
    assert b"\r" not in blob
    assert blob.endswith(b"\n")
