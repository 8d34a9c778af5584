"""End-to-end acceptance checks over the full toolkit.

Each criterion is a function returning an :class:`AcceptanceResult`; the
suite prints one PASS/FAIL line per criterion.  Tolerances are fixed here,
not configurable, so a green run means the quantitative claims hold.
"""

from __future__ import annotations

import json
import math
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List

import numpy as np

from . import quantities as qt
from .emitter import EmitterParams, extinction_on_resonance, saturated_amplitude
from .device import (
    DeviceModel,
    Mirror,
    Propagation,
    Spectrum,
    device_transmission,
)
from .fitting import FANO, LORENTZIAN, fit
from .photonstats import (
    DriveParams,
    MasterEquationOracle,
    OracleOptions,
    background_dilution,
    convolve_irf,
    g2_transmitted,
    symmetric_delays,
)
from .scenarios import (
    curve_fwhm,
    find_beta_for_dip,
    measured_g2_pipeline,
    paper_like_emitter,
    run_scenario,
    solve_bunching_dilution,
)

T1_NS = 0.442
T2_NS = 0.670
TAU_REFERENCE_NS = 0.750


@dataclass
class AcceptanceResult:
    number: int
    title: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} criterion {self.number:2d} ({self.title}): {self.detail}"


def criterion_1_dephasing() -> AcceptanceResult:
    t2star = qt.pure_dephasing_time_ns(T1_NS, T2_NS)
    ok = abs(t2star - 2.7677) < 5e-4 and 2.7 <= t2star <= 2.9
    return AcceptanceResult(1, "pure dephasing time", ok, f"T2* = {t2star:.4f} ns")


def criterion_2_purcell() -> AcceptanceResult:
    f = qt.purcell_factor(TAU_REFERENCE_NS, T1_NS)
    ok = abs(f - 1.697) < 0.01
    return AcceptanceResult(2, "Purcell factor", ok, f"ratio = {f:.4f}")


def criterion_3_transform_limit() -> AcceptanceResult:
    width = qt.lifetime_to_transform_limit_uev(T1_NS)
    derived = qt.HBAR_UEV_NS / T1_NS
    ok = abs(width - derived) < 1e-12 and abs(width - derived) <= 0.05 and abs(width - 1.489) < 1e-3
    return AcceptanceResult(3, "transform-limited linewidth", ok, f"{width:.4f} ueV")


def criterion_4_conversions() -> AcceptanceResult:
    pairs = [  # (ueV, MHz, quoted uncertainty in MHz)
        (4.3, 1040.0, 20.0),
        (3.0, 730.0, 50.0),
        (5.1, 1240.0, 30.0),
        (3.7, 890.0, 50.0),
        (3.3, 800.0, 70.0),
        (4.6, 1100.0, 100.0),
        (36.0, 8700.0, 50.0),
    ]
    details = []
    ok = True
    for uev, mhz, tol in pairs:
        got = qt.energy_to_frequency_mhz(uev)
        good = abs(got - mhz) <= tol
        ok = ok and good
        details.append(f"{uev}->{got:.0f}")
    return AcceptanceResult(4, "energy-frequency pairs", ok, ", ".join(details) + " MHz")


def criterion_5_purcell5_extinction() -> AcceptanceResult:
    with tempfile.TemporaryDirectory() as tmp:
        manifest = run_scenario("purcell5-extinction", tmp, figures=False)
        report = json.loads((Path(tmp) / "report.json").read_text())
    ok = report["device_extinction"] > 0.90 and report["bare_extinction"] > 0.90
    return AcceptanceResult(
        5,
        "extinction at fivefold enhancement",
        ok,
        f"device dip = {report['device_extinction']:.4f}, "
        f"bare = {report['bare_extinction']:.4f} (beta = {report['beta']:.3f})",
    )


def criterion_6_paper_extinction() -> AcceptanceResult:
    solved = find_beta_for_dip(0.40, {"mirror_reflectivity": 0.2, "n_eff": 3.0,
                                      "cavity_phase_cycles": 893.25,
                                      "emitter_offset_cycles": 0.0}, blinking=0.09)
    ok = abs(solved["achieved_dip"] - 0.40) <= 0.02 and 0.0 < solved["beta"] < 1.0
    return AcceptanceResult(
        6,
        "blinking-limited 40% dip",
        ok,
        f"beta = {solved['beta']:.4f} gives dip = {solved['achieved_dip']:.4f} "
        f"(fwhm = {solved['fwhm_ueV']:.3f} ueV, b = {solved['blinking_fraction']})",
    )


def criterion_7_fano_behavior() -> AcceptanceResult:
    from .config import device_from_config
    from .device import inactive_model, transmission_response

    dets = np.linspace(-14.0, 14.0, 561)
    qs = []
    for offset in (0.0, 0.25):
        cfg = {"mirror_reflectivity": 0.2, "n_eff": 3.0,
               "cavity_phase_cycles": 893.25, "emitter_offset_cycles": offset}
        emitter = paper_like_emitter(0.6247)
        model = device_from_config(cfg, emitter)
        norm = transmission_response(model, 893.0)(dets) / transmission_response(
            inactive_model(model), 893.0
        )(dets)
        res = fit(FANO, Spectrum(dets, norm, "detuning_ueV"))
        qs.append(res.values[1])
    flip = qs[0] * qs[1] < 0 and min(abs(qs[0]), abs(qs[1])) > 0.01

    x = np.linspace(-15.0, 15.0, 401)
    rng = np.random.Generator(np.random.PCG64(20260810))
    truth = FANO.func(x, np.array([-0.5, 1.5, 0.0, 3.7, 1.0]))
    noisy = truth + rng.normal(0.0, 0.001, size=x.size)
    fano_fit = fit(FANO, (x, noisy))
    lor_fit = fit(LORENTZIAN, (x, noisy))
    ratio = lor_fit.residual_norm / fano_fit.residual_norm
    ok = flip and ratio >= 10.0
    return AcceptanceResult(
        7,
        "Fano asymmetry",
        ok,
        f"q = {qs[0]:+.3f} -> {qs[1]:+.3f} on quarter-fringe shift; "
        f"residual ratio lorentzian/fano = {ratio:.1f}",
    )


def criterion_8_airy() -> AcceptanceResult:
    r_m = 0.3
    big_r = r_m**2
    lam = 900.0
    worst = 0.0
    for frac in np.linspace(0.0, 1.0, 257):  # one full FSR in one-way phase
        length_um = frac * lam / 2.0 * 1e-3
        model = DeviceModel(
            elements=(Mirror(r_m), Propagation(length_um, 1.0), Mirror(r_m))
        )
        got = abs(device_transmission(model, lam)) ** 2
        phase = 2.0 * math.pi * length_um * 1e3 / lam
        airy = (1 - big_r) ** 2 / ((1 - big_r) ** 2 + 4 * big_r * math.sin(phase) ** 2)
        worst = max(worst, abs(got - airy))
    ok = worst <= 1e-10
    return AcceptanceResult(8, "Airy-formula cascade", ok, f"max deviation = {worst:.2e}")


def criterion_9_oracle_equivalence() -> AcceptanceResult:
    gamma_total = qt.HBAR_UEV_NS / T1_NS
    g1_per_ns = 1.0 / T1_NS
    delays = np.linspace(0.0, 10.0 / g1_per_ns, 101)
    sym = np.concatenate([-delays[:0:-1], delays])
    worst = 0.0
    details = []
    for beta in (0.3, 0.5, 0.8, 0.95):
        for gpd_factor in (0.0, 1.0):
            p = EmitterParams.from_beta(beta, gamma_total, gpd_factor * gamma_total)
            analytic = g2_transmitted(p, 0.0, sym)
            # drive weak enough that physical saturation stays inside tolerance
            s0 = {0.3: 1e-4, 0.5: 1e-4, 0.8: 1e-7, 0.95: 1e-11}[beta] if gpd_factor == 0 else 1e-4
            drive = DriveParams.from_saturation(p, s0)
            oracle = MasterEquationOracle(
                p, drive, OracleOptions(step_factor=60.0, ss_horizon_units=160.0)
            )
            got = oracle.g2_transmitted(sym)
            dev = float(np.max(np.abs(got.values - analytic.values)))
            worst = max(worst, dev)
            details.append(f"b={beta},gpd={gpd_factor}: {dev:.1e}")
    ok = worst <= 1e-2
    return AcceptanceResult(
        9, "transport vs master-equation", ok, f"max |dg2| = {worst:.2e}"
    )


def criterion_10_bunching() -> AcceptanceResult:
    solved = solve_bunching_dilution(0.20, 1.14)
    g2_ok = abs(solved["measured_g2_max"] - 1.14) <= 0.01
    ext_ok = abs(solved["measured_extinction"] - 0.20) <= 0.005

    emitter = paper_like_emitter(solved["beta"])
    delays = symmetric_delays(6.0, 480)
    dets = np.linspace(-12.0, 12.0, 49)
    maxima = np.array(
        [
            measured_g2_pipeline(
                emitter, d, solved["signal_fraction"], 0.09, delays, 0.05
            )[0].values.max()
            for d in dets
        ]
    )
    fwhm = curve_fwhm(dets, maxima - 1.0)
    width_ok = 0.7 * 3.7 <= fwhm <= 1.3 * 3.7
    ok = g2_ok and ext_ok and width_ok
    return AcceptanceResult(
        10,
        "transmitted bunching",
        ok,
        f"g2max = {solved['measured_g2_max']:.4f} at extinction "
        f"{solved['measured_extinction']:.4f}; curve FWHM = {fwhm:.2f} ueV",
    )


def criterion_11_antibunching_band() -> AcceptanceResult:
    gamma_total = qt.HBAR_UEV_NS / T1_NS
    p = EmitterParams.from_beta(0.62, gamma_total, 0.0)
    drive = DriveParams.from_saturation(p, 1e-3)
    delays = symmetric_delays(6.0, 600)
    oracle = MasterEquationOracle(p, drive, OracleOptions(ss_horizon_units=80.0))
    ideal = oracle.g2_fluorescence(delays)
    mid = delays.size // 2
    ideal_zero = ideal.values[mid]
    band = []
    for sigma in (0.2, 0.3, 0.4, 0.5):
        smeared = convolve_irf(ideal, sigma)
        for rho in (0.92, 0.96, 1.0):
            band.append(background_dilution(smeared, rho).values[mid])
    lo, hi = min(band), max(band)
    ok = ideal_zero < 1e-3 and lo <= 0.12 and hi >= 0.20
    return AcceptanceResult(
        11,
        "fluorescence antibunching",
        ok,
        f"ideal g2(0) = {ideal_zero:.2e}; instrument band [{lo:.3f}, {hi:.3f}] "
        f"covers 0.16 +- 0.04",
    )


def criterion_12_switching() -> AcceptanceResult:
    with tempfile.TemporaryDirectory() as tmp:
        run_scenario("fig3e-transmission-switch", tmp, figures=False)
        report = json.loads((Path(tmp) / "report.json").read_text())
    dt = report["sample_interval_ns"]
    rf_ok = abs(report["rf_rise_ns"] - 80.0) <= 0.5
    order_ok = report["transmission_fall_ns"] <= report["rf_rise_ns"] + dt
    sixty_ok = abs(report["transmission_switching_ns"] - 60.0) <= 4.0 * dt
    ok = rf_ok and order_ok and sixty_ok
    return AcceptanceResult(
        12,
        "RC-limited switching",
        ok,
        f"RF edge = {report['rf_rise_ns']:.2f} ns (RC = {report['rc_ns']:.2f} ns); "
        f"transmission fall = {report['transmission_fall_ns']:.2f} ns, "
        f"fastest transmission edge = {report['transmission_switching_ns']:.2f} ns",
    )


def criterion_13_fit_coverage() -> AcceptanceResult:
    rng = np.random.Generator(np.random.PCG64(77001))
    x = np.linspace(-12.0, 12.0, 161)
    truth = np.array([-0.5, 1.5, 0.0, 3.7, 1.0])
    clean = FANO.func(x, truth)
    noise_sigma = 0.01 * abs(truth[0])
    hits = 0
    n_trials = 1000
    for _ in range(n_trials):
        y = clean + rng.normal(0.0, noise_sigma, size=x.size)
        res = fit(FANO, (x, y), initial_guess=truth * np.array([1.1, 0.9, 1.0, 1.05, 1.0]))
        if not res.converged:
            continue
        gamma, sigma = res.values[3], res.sigmas[3]
        if abs(gamma - truth[3]) <= sigma:
            hits += 1
    coverage = hits / n_trials
    ok = 0.60 <= coverage <= 0.76
    return AcceptanceResult(
        13, "one-sigma coverage", ok, f"coverage = {coverage:.3f} over {n_trials} fits"
    )


def criterion_14_determinism() -> AcceptanceResult:
    with tempfile.TemporaryDirectory() as tmp_a, tempfile.TemporaryDirectory() as tmp_b:
        run_scenario("fig2b-rf-spectrum", tmp_a, seed=123456789, figures=True)
        run_scenario("fig2b-rf-spectrum", tmp_b, seed=123456789, figures=True)
        blob_a = (Path(tmp_a) / "manifest.json").read_bytes()
        blob_b = (Path(tmp_b) / "manifest.json").read_bytes()
    ok = blob_a == blob_b
    return AcceptanceResult(
        14, "seeded determinism", ok, f"manifests identical = {ok} ({len(blob_a)} bytes)"
    )


CRITERIA: List[Callable[[], AcceptanceResult]] = [
    criterion_1_dephasing,
    criterion_2_purcell,
    criterion_3_transform_limit,
    criterion_4_conversions,
    criterion_5_purcell5_extinction,
    criterion_6_paper_extinction,
    criterion_7_fano_behavior,
    criterion_8_airy,
    criterion_9_oracle_equivalence,
    criterion_10_bunching,
    criterion_11_antibunching_band,
    criterion_12_switching,
    criterion_13_fit_coverage,
    criterion_14_determinism,
]


def run_all(stream=None) -> List[AcceptanceResult]:
    """Run every criterion, printing one PASS/FAIL line each."""
    results = []
    for check in CRITERIA:
        result = check()
        results.append(result)
        if stream is not None:
            print(result.line(), file=stream, flush=True)
        else:
            print(result.line(), flush=True)
    return results
