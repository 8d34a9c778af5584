import numpy as np
import pytest

from wgqed.device import Spectrum
from wgqed.emitter import EmitterParams
from wgqed.errors import (
    AmbiguousEdgeError,
    BiasRangeError,
    DomainError,
    GridMismatchError,
)
from wgqed.tuning import (
    ChargePlateaus,
    StarkModel,
    SwitchDrive,
    TimeSeries,
    bias_to_detuning,
    bias_trace,
    charge_state,
    differential_spectrum,
    rise_time_10_90,
    switch_trace,
)

E0 = 1.239842e9 / 893.0
STARK = StarkModel(
    reference_bias_v=7.0,
    reference_energy_uev=E0,
    slope_uev_per_v=50.0,
    bias_range_v=(0.0, 12.0),
)
EMITTER = EmitterParams.from_beta(0.62, 1.489, gamma_pd_uev=1.1055)


class TestStark:
    def test_reference_point(self):
        assert bias_to_detuning(STARK, 7.0, E0) == 0.0

    def test_blueshift_direction(self):
        # +0.1 V blueshifts the transition 5 ueV, so the detuning drops 5 ueV
        d0 = bias_to_detuning(STARK, 7.0, E0)
        d1 = bias_to_detuning(STARK, 7.1, E0)
        assert d1 - d0 == pytest.approx(-5.0)

    def test_affine_exact(self):
        for v1, v2 in ((1.0, 9.5), (3.25, 3.5), (0.0, 12.0)):
            lhs = bias_to_detuning(STARK, v1, E0) - bias_to_detuning(STARK, v2, E0)
            assert lhs == -STARK.slope_uev_per_v * (v1 - v2)

    def test_full_range_span(self):
        # a 6 V plateau range at 50 ueV/V spans 300 ueV of tuning
        span = abs(
            bias_to_detuning(STARK, 11.0, E0) - bias_to_detuning(STARK, 5.0, E0)
        )
        assert span == pytest.approx(300.0)

    def test_out_of_range(self):
        with pytest.raises(BiasRangeError):
            bias_to_detuning(STARK, 12.5, E0)


class TestChargePlateaus:
    PLATEAUS = ChargePlateaus(plateaus=((5.5, 6.9, "X0"), (6.9, 8.5, "X-")))

    def test_lookup(self):
        assert charge_state(self.PLATEAUS, 6.5) == "X0"
        assert charge_state(self.PLATEAUS, 7.0) == "X-"

    def test_dark_outside(self):
        assert charge_state(self.PLATEAUS, 5.0) == "dark"
        assert charge_state(self.PLATEAUS, 9.0) == "dark"

    def test_boundary_belongs_to_lower_plateau(self):
        assert charge_state(self.PLATEAUS, 6.9) == "X0"

    def test_overlap_rejected(self):
        with pytest.raises(DomainError):
            ChargePlateaus(plateaus=((5.5, 7.0, "X0"), (6.9, 8.5, "X-")))


class TestBiasTrace:
    def test_voltage_rise_time_is_rc_ln9(self):
        drive = SwitchDrive(low_bias_v=0.0, high_bias_v=1.0, period_ns=400.0, rc_ns=10.0)
        grid = np.arange(0.0, 400.0, 0.05)
        trace = bias_trace(drive, grid)
        rise = rise_time_10_90(trace)
        assert rise == pytest.approx(10.0 * np.log(9.0), abs=0.05)

    def test_continuity_across_half_period(self):
        drive = SwitchDrive(low_bias_v=0.0, high_bias_v=1.0, period_ns=300.0, rc_ns=12.0)
        grid = np.arange(0.0, 600.0, 0.1)
        values = bias_trace(drive, grid).values
        assert np.max(np.abs(np.diff(values))) < 0.01

    def test_period_guard(self):
        with pytest.raises(DomainError):
            SwitchDrive(low_bias_v=0.0, high_bias_v=1.0, period_ns=50.0, rc_ns=10.0)


class TestSwitchTrace:
    def _drive(self, rc=10.0, period=1200.0, swing_v=0.2):
        return SwitchDrive(
            low_bias_v=7.0 + swing_v, high_bias_v=7.0, period_ns=period, rc_ns=rc
        )

    def test_fast_rc_approaches_square(self):
        drive = self._drive(rc=0.5, period=300.0)
        grid = np.arange(0.0, 300.0, 0.05)
        trace = switch_trace(drive, STARK, EMITTER, E0, grid)
        assert rise_time_10_90(trace) < 3.0

    def test_plateaus_match_static_response(self):
        rc = 8.0
        drive = self._drive(rc=rc, period=120.0 * rc, swing_v=0.3)
        grid = np.arange(0.0, 120.0 * rc, 0.25)
        trace = switch_trace(drive, STARK, EMITTER, E0, grid)
        half = 60.0 * rc
        # sampled just before each half-period ends, > 50 RC after the flip
        near_end_hi = trace.values[(grid > half - 2) & (grid < half)]
        static_hi = 1.0  # resonant plateau after normalization
        assert abs(near_end_hi[-1] - static_hi) < 1e-9
        near_end_lo = trace.values[grid > 120.0 * rc - 2]
        assert abs(near_end_lo[-1] - 0.0) < 1e-9

    def test_lorentzian_edge_is_rc_ln9_for_large_swing(self):
        # detuning swing >> linewidth: back-solving 80 ns gives RC ~ 36.4 ns
        drive = self._drive(rc=36.4, period=1500.0, swing_v=50 * EMITTER.fwhm_uev / 50.0)
        grid = np.arange(0.0, 1500.0, 0.1)
        trace = switch_trace(drive, STARK, EMITTER, E0, grid)
        assert rise_time_10_90(trace) == pytest.approx(80.0, abs=0.5)

    def test_transmission_edge_not_slower_than_rf(self):
        from wgqed.config import device_from_config
        from wgqed.device import transmission_response

        cfg = {"mirror_reflectivity": 0.2, "n_eff": 3.0,
               "cavity_phase_cycles": 892.8, "emitter_offset_cycles": 0.0}
        model = device_from_config(cfg, EMITTER)
        resp = transmission_response(model, 893.0)
        drive = self._drive(rc=38.0, period=1500.0, swing_v=3 * EMITTER.fwhm_uev / 50.0)
        grid = np.arange(0.0, 1500.0, 0.25)
        rf = switch_trace(drive, STARK, EMITTER, E0, grid)
        tr = switch_trace(drive, STARK, EMITTER, E0, grid, response=resp)
        assert rise_time_10_90(tr) <= rise_time_10_90(rf) + 0.25


class TestRiseTime:
    def test_step_function_within_one_sample(self):
        t = np.arange(0.0, 10.0, 0.5)
        v = np.where(t < 5.0, 0.0, 1.0)
        assert rise_time_10_90(TimeSeries(t, v)) <= 0.5

    def test_ideal_exponential(self):
        t = np.linspace(0.0, 120.0, 4801)
        v = 1.0 - np.exp(-t / 10.0)
        assert rise_time_10_90(TimeSeries(t, v)) == pytest.approx(21.97, abs=0.05)

    def test_falling_edge(self):
        t = np.linspace(0.0, 120.0, 4801)
        v = np.exp(-t / 10.0)
        assert rise_time_10_90(TimeSeries(t, v)) == pytest.approx(21.97, abs=0.05)

    def test_ambiguous_edge_reported(self):
        t = np.arange(6.0)
        v = np.array([0.0, 0.3, 0.05, 0.6, 1.0, 1.0])
        with pytest.raises(AmbiguousEdgeError):
            rise_time_10_90(TimeSeries(t, v))

    def test_flat_trace_rejected(self):
        with pytest.raises(DomainError):
            rise_time_10_90(TimeSeries(np.arange(4.0), np.ones(4)))


class TestDifferentialSpectrum:
    def test_identical_inputs_cancel(self):
        grid = np.linspace(-5, 5, 41)
        spec = Spectrum(grid, 1.0 + 0.1 * np.sin(grid), "detuning_ueV")
        diff = differential_spectrum(spec, spec)
        assert np.allclose(diff.values, 0.0)

    def test_background_removal_exact(self):
        grid = np.linspace(-5, 5, 41)
        background = 3.0 + 0.2 * grid
        signal = -0.4 / (1.0 + (2 * grid / 3.7) ** 2)
        on = Spectrum(grid, background + signal, "detuning_ueV")
        off = Spectrum(grid, background, "detuning_ueV")
        assert np.allclose(differential_spectrum(on, off).values, signal)

    def test_noisy_round_trip_recovers_depth(self):
        from wgqed.fitting import LORENTZIAN, fit

        rng = np.random.Generator(np.random.PCG64(555))
        grid = np.linspace(-15, 15, 301)
        depth = 0.40
        signal = -depth / (1.0 + (2 * grid / 3.7) ** 2)
        background = 1.0 + 0.02 * np.sin(0.8 * grid)
        noise = lambda: rng.normal(0.0, 1.0 / 200.0, size=grid.size)
        on = Spectrum(grid, background + signal + noise(), "detuning_ueV")
        off = Spectrum(grid, background + noise(), "detuning_ueV")
        diff = differential_spectrum(on, off)
        res = fit(LORENTZIAN, diff)
        assert res.converged
        assert abs(res.values[0]) == pytest.approx(depth, rel=0.01)

    def test_grid_mismatch(self):
        a = Spectrum(np.linspace(0, 1, 5), np.ones(5), "detuning_ueV")
        b = Spectrum(np.linspace(0, 2, 5), np.ones(5), "detuning_ueV")
        with pytest.raises(GridMismatchError):
            differential_spectrum(a, b)
