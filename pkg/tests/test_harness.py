import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from wgqed import cli, csvio
from wgqed.errors import ValidationError
from wgqed.scenarios import (
    paper_like_emitter,
    power_extinction_curve,
    run_scenario,
    scenario_names,
)

FAST_SCENARIOS = [
    "fig1c-fringes",
    "fig2b-rf-spectrum",
    "fig3b-transmission",
    "fig3d-model",
    "fig4a-g2",
    "power-sweep",
    "purcell5-extinction",
    "extinction-calibration",
]


@pytest.mark.parametrize("name", FAST_SCENARIOS)
def test_scenario_emits_valid_artifacts(name, tmp_path):
    manifest = run_scenario(name, tmp_path, seed=7, figures=False)
    assert manifest["scenario"] == name
    assert (tmp_path / "report.json").exists()
    for entry in manifest["files"]:
        path = tmp_path / entry["name"]
        blob = path.read_bytes()
        assert len(blob) == entry["bytes"]
        assert hashlib.sha256(blob).hexdigest() == entry["sha256"]
        if path.suffix == ".csv":
            csvio.ingest_csv(path)  # every emitted file obeys its own schema


def test_scenario_names_cover_registry():
    names = scenario_names()
    for required in ("fig3b-transmission", "fig4b-bunching", "fig2e-rf-switch"):
        assert required in names


def test_rf_switch_scenario(tmp_path):
    run_scenario("fig2e-rf-switch", tmp_path, figures=False)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["rise_10_90_ns"] == pytest.approx(80.0, abs=0.3)
    # swing >> linewidth, so the back-solved RC approaches 80/ln9 = 36.4 ns
    assert report["rc_ns"] == pytest.approx(36.4, abs=0.4)
    assert report["charge_state_on"] == "X-"


def test_fringe_scenario_spacing(tmp_path):
    run_scenario("fig1c-fringes", tmp_path, figures=False)
    spec = csvio.ingest_csv(tmp_path / "fringes.csv")
    values = spec.values
    maxima = [
        spec.axis[i]
        for i in range(1, values.size - 1)
        if values[i] > values[i - 1] and values[i] > values[i + 1] and values[i] > 0.99
    ]
    spacings = np.diff(maxima)
    assert np.all(np.abs(spacings - 0.5) < 0.02)  # ~0.5 nm free spectral range


def test_transmission_scenario_reports_dip(tmp_path):
    run_scenario("fig3b-transmission", tmp_path, seed=11, figures=False)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["achieved_dip"] == pytest.approx(0.40, abs=0.005)
    assert report["fano_converged"]
    assert report["fano_fwhm_uev"] == pytest.approx(3.7, rel=0.15)


def test_bunching_scenario(tmp_path):
    run_scenario("fig4b-bunching", tmp_path, figures=False)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["measured_g2_max"] == pytest.approx(1.14, abs=0.005)
    assert 0.7 * 3.7 <= report["curve_fwhm_ueV"] <= 1.3 * 3.7
    curve = csvio.ingest_csv(tmp_path / "bunching_vs_detuning.csv")
    assert curve.max_g2.max() <= 1.15
    assert curve.max_g2[0] < 1.03  # approaches unity far off resonance


def test_power_sweep_half_extinction_consistency(tmp_path):
    emitter = paper_like_emitter(0.64)
    psat = 8.5
    curve = power_extinction_curve(emitter, np.linspace(0, 200, 401), psat)
    assert np.all(np.diff(curve.extinctions) < 0)
    e0 = curve.extinctions[0]
    # closed-form inversion of the saturation rule for the half-depth power
    x = emitter.gamma_1d_uev / emitter.fwhm_uev
    s_half = x / (1.0 - np.sqrt(1.0 - e0 / 2.0)) - 1.0
    half = power_extinction_curve(emitter, np.array([s_half * psat]), psat)
    assert half.extinctions[0] == pytest.approx(e0 / 2.0, abs=1e-6)


def test_determinism_with_noise_and_figures(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_scenario("fig3b-transmission", a, seed=2024, figures=True)
    run_scenario("fig3b-transmission", b, seed=2024, figures=True)
    assert (a / "manifest.json").read_bytes() == (b / "manifest.json").read_bytes()


def test_seed_required_for_noise():
    with pytest.raises(ValidationError, match="seed"):
        run_scenario("fig2b-rf-spectrum", "/tmp/unused")


def test_unknown_config_key_names_field(tmp_path):
    with pytest.raises(ValidationError, match="not_a_key"):
        run_scenario("fig1c-fringes", tmp_path, overrides={"not_a_key": 1.0})


def test_unknown_scenario(tmp_path):
    with pytest.raises(ValidationError, match="scenario"):
        run_scenario("fig9z-nothing", tmp_path)


class TestCli:
    def test_run_scenario_and_fit_pipeline(self, tmp_path, capsys):
        out = tmp_path / "scenario"
        rc = cli.main(
            [
                "run-scenario",
                "--name",
                "fig3b-transmission",
                "--out",
                str(out),
                "--seed",
                "99",
                "--no-figures",
            ]
        )
        assert rc == 0
        manifest = json.loads(capsys.readouterr().out)
        assert manifest["seed"] == 99

        fit_out = tmp_path / "fit"
        rc = cli.main(
            [
                "fit",
                "--model",
                "fano",
                "--data",
                str(out / "transmission.csv"),
                "--out",
                str(fit_out),
                "--no-figures",
            ]
        )
        assert rc == 0
        report = json.loads((fit_out / "report.json").read_text())
        assert report["converged"]

    def test_g2_subcommand(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "beta": 0.75,
                    "gamma_total_ueV": 1.489,
                    "gamma_pd_ueV": 1.489,
                    "kind": "transmitted",
                    "delay_span_ns": 5.0,
                    "delay_points_half": 200,
                }
            )
        )
        out = tmp_path / "g2"
        rc = cli.main(["g2", "--config", str(cfg), "--out", str(out), "--no-figures"])
        assert rc == 0
        trace = csvio.ingest_csv(out / "g2.csv")
        assert trace.values.max() > 1.0

    def test_switch_trace_subcommand(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "beta": 0.62,
                    "gamma_total_ueV": 1.489,
                    "gamma_pd_ueV": 1.1055,
                    "low_bias_V": 10.0,
                    "high_bias_V": 7.0,
                    "rc_ns": 36.4,
                    "period_ns": 1500.0,
                }
            )
        )
        out = tmp_path / "switch"
        rc = cli.main(["switch-trace", "--config", str(cfg), "--out", str(out), "--no-figures"])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["rise_10_90_ns"] == pytest.approx(80.0, abs=1.0)

    def test_power_sweep_subcommand(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"beta": 0.64, "gamma_total_ueV": 1.489,
                                   "gamma_pd_ueV": 1.1054, "max_power_nW": 100.0}))
        out = tmp_path / "power"
        rc = cli.main(["power-sweep", "--config", str(cfg), "--out", str(out), "--no-figures"])
        assert rc == 0
        curve = csvio.ingest_csv(out / "power_sweep.csv")
        assert curve.extinctions[0] > curve.extinctions[-1]

    def test_simulate_spectrum_subcommand(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            json.dumps(
                {
                    "beta": 0.64,
                    "gamma_total_ueV": 1.489,
                    "gamma_pd_ueV": 1.1054,
                    "blinking_fraction": 0.09,
                    "sweep_span_nm": 0.03,
                    "sweep_points": 201,
                }
            )
        )
        out = tmp_path / "spec"
        rc = cli.main(["simulate-spectrum", "--config", str(cfg), "--out", str(out), "--no-figures"])
        assert rc == 0
        report = json.loads((out / "report.json").read_text())
        assert report["dip_depth"] == pytest.approx(0.40, abs=0.02)

    def test_error_record_on_failure(self, tmp_path, capsys):
        rc = cli.main(
            ["run-scenario", "--name", "fig2b-rf-spectrum", "--out", str(tmp_path)]
        )
        assert rc == 1
        record = json.loads(capsys.readouterr().err)
        assert record["error"] == "ValidationError"
        assert record["field"] == "seed"

    def test_figures_rendered_by_default(self, tmp_path):
        out = tmp_path / "figs"
        rc = cli.main(
            ["run-scenario", "--name", "fig1c-fringes", "--out", str(out), "--seed", "1"]
        )
        assert rc == 0
        assert (out / "fringes.svg").exists()
