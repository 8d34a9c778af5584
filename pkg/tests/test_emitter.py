import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wgqed.emitter import (
    EmitterParams,
    extinction_on_resonance,
    linewidth_with_dephasing,
    saturated_amplitude,
    scattering_amplitudes,
)
from wgqed.errors import DomainError
from wgqed.fitting import LORENTZIAN, fit

GAMMA = 1.489


def test_ideal_full_extinction():
    p = EmitterParams.from_beta(1.0, GAMMA)
    t, r = scattering_amplitudes(p, 0.0)
    assert t == 0
    assert r == -1
    assert np.angle(r) == pytest.approx(np.pi)


def test_decoupled_emitter():
    p = EmitterParams(gamma_1d_uev=0.0, gamma_loss_uev=GAMMA)
    for d in (-3.0, 0.0, 7.5):
        t, r = scattering_amplitudes(p, d)
        assert t == 1
        assert r == 0


def test_amplitude_at_half_linewidth():
    # independent evaluation of the closed form at beta=0.8, D=G/2
    p = EmitterParams.from_beta(0.8, GAMMA)
    t, r = scattering_amplitudes(p, GAMMA / 2)
    assert t == pytest.approx(0.6 - 0.4j, rel=1e-12)
    assert abs(t) ** 2 == pytest.approx(0.52, rel=1e-12)


def test_reflection_identity_and_symmetry():
    p = EmitterParams.from_beta(0.7, GAMMA, gamma_pd_uev=0.4)
    dets = np.linspace(-20, 20, 81)
    t, r = scattering_amplitudes(p, dets)
    assert np.allclose(r, t - 1)
    assert np.allclose(np.abs(t), np.abs(t[::-1]))
    # dip is deepest at zero detuning
    assert np.argmin(np.abs(t)) == dets.size // 2


@given(
    beta=st.floats(min_value=0.0, max_value=1.0),
    gpd_frac=st.floats(min_value=0.0, max_value=3.0),
    det=st.floats(min_value=-50.0, max_value=50.0),
)
@settings(max_examples=200, deadline=None)
def test_energy_conservation(beta, gpd_frac, det):
    p = EmitterParams.from_beta(beta, GAMMA, gamma_pd_uev=gpd_frac * GAMMA)
    t, r = scattering_amplitudes(p, det)
    assert abs(t) ** 2 + abs(r) ** 2 <= 1.0 + 1e-12


def test_lossless_equality_everywhere():
    p = EmitterParams.from_beta(1.0, GAMMA)
    dets = np.linspace(-30, 30, 101)
    t, r = scattering_amplitudes(p, dets)
    assert np.allclose(np.abs(t) ** 2 + np.abs(r) ** 2, 1.0, atol=1e-12)


class TestExtinction:
    def test_full(self):
        assert extinction_on_resonance(EmitterParams.from_beta(1.0, GAMMA)) == pytest.approx(1.0)

    def test_none(self):
        p = EmitterParams(0.0, GAMMA, gamma_pd_uev=0.7)
        assert extinction_on_resonance(p) == 0.0

    def test_dephased_half_coupling(self):
        # beta = 0.5 and gpd = G/2 gives 1 - (1 - 0.25)^2
        p = EmitterParams.from_beta(0.5, GAMMA, gamma_pd_uev=GAMMA / 2)
        assert extinction_on_resonance(p) == pytest.approx(0.4375, rel=1e-12)

    def test_monotone_in_beta_and_dephasing(self):
        betas = np.linspace(0.05, 0.95, 10)
        exts = [extinction_on_resonance(EmitterParams.from_beta(b, GAMMA)) for b in betas]
        assert np.all(np.diff(exts) > 0)
        gpds = np.linspace(0.0, 3.0, 10)
        exts = [
            extinction_on_resonance(EmitterParams.from_beta(0.6, GAMMA, g)) for g in gpds
        ]
        assert np.all(np.diff(exts) < 0)


class TestSaturation:
    def test_weak_field_limit(self):
        p = EmitterParams.from_beta(0.8, GAMMA, gamma_pd_uev=0.3)
        for d in (0.0, 1.7, -4.0):
            t0, _ = scattering_amplitudes(p, d)
            assert saturated_amplitude(p, d, 0.0) == pytest.approx(t0, rel=1e-14)

    def test_strong_drive_transparency(self):
        p = EmitterParams.from_beta(0.9, GAMMA)
        assert saturated_amplitude(p, 0.0, 1e12) == pytest.approx(1.0, abs=1e-9)

    def test_unit_saturation_halves_scattering(self):
        p = EmitterParams.from_beta(0.8, GAMMA)
        t = saturated_amplitude(p, 0.0, 1.0)
        assert t == pytest.approx(0.6, rel=1e-12)
        assert 1 - abs(t) ** 2 == pytest.approx(0.64, rel=1e-12)

    def test_extinction_strictly_decreasing(self):
        p = EmitterParams.from_beta(0.7, GAMMA, gamma_pd_uev=0.2)
        s_values = np.linspace(0.0, 10.0, 30)
        exts = [1 - abs(saturated_amplitude(p, 0.0, s)) ** 2 for s in s_values]
        assert np.all(np.diff(exts) < 0)

    def test_rejects_negative(self):
        p = EmitterParams.from_beta(0.5, GAMMA)
        with pytest.raises(DomainError):
            saturated_amplitude(p, 0.0, -0.1)


class TestLinewidth:
    def test_transform_limit(self):
        assert linewidth_with_dephasing(EmitterParams.from_beta(0.5, GAMMA)) == GAMMA

    def test_measured_width(self):
        p = EmitterParams.from_beta(0.5, 1.489, gamma_pd_uev=1.1)
        assert linewidth_with_dephasing(p) == pytest.approx(3.689, abs=1e-3)

    def test_width_from_coherence_time(self):
        # gpd from T2* = 2.77 ns
        p = EmitterParams.from_beta(0.5, 1.489, gamma_pd_uev=0.23762)
        assert linewidth_with_dephasing(p) == pytest.approx(1.9644, abs=2e-3)

    def test_lorentzian_fit_recovers_width(self):
        p = EmitterParams.from_beta(0.62, GAMMA, gamma_pd_uev=1.1)
        dets = np.linspace(-20, 20, 401)
        t, _ = scattering_amplitudes(p, dets)
        res = fit(LORENTZIAN, (dets, np.abs(t) ** 2))
        assert res.converged
        assert res.values[2] == pytest.approx(p.fwhm_uev, rel=1e-6)


class TestParamValidation:
    def test_negative_rate(self):
        with pytest.raises(DomainError):
            EmitterParams(gamma_1d_uev=-0.1, gamma_loss_uev=1.0)

    def test_zero_total(self):
        with pytest.raises(DomainError):
            EmitterParams(gamma_1d_uev=0.0, gamma_loss_uev=0.0)

    def test_beta_consistency(self):
        p = EmitterParams.from_beta(0.3, 2.0, 0.1)
        assert p.beta == pytest.approx(0.3)
        assert p.gamma_total_uev == pytest.approx(2.0)
        assert p.fwhm_uev == pytest.approx(2.2)
