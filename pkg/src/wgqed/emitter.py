"""Two-level emitter scattering in a single-mode waveguide.

Weak-field coherent transmission and reflection amplitudes, on-resonance
extinction, dephasing-broadened linewidths and the saturation of the
coherent scattering channel.  Detunings are laser minus emitter energy,
in ueV.  All functions accept scalar or ndarray detunings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quantities import HC_UEV_NM


@dataclass(frozen=True)
class EmitterParams:
    """Rates and resonance of a waveguide-coupled two-level emitter.

    gamma_1d_uev    radiative decay into the guided mode (both directions)
    gamma_loss_uev  decay into all non-guided channels
    gamma_pd_uev    pure dephasing rate, hbar / T2*
    """

    gamma_1d_uev: float
    gamma_loss_uev: float = 0.0
    gamma_pd_uev: float = 0.0
    resonance_wavelength_nm: float = 893.0

    def __post_init__(self):
        if self.gamma_1d_uev < 0 or self.gamma_loss_uev < 0 or self.gamma_pd_uev < 0:
            raise DomainError("decay and dephasing rates must be non-negative")
        if self.gamma_1d_uev + self.gamma_loss_uev <= 0:
            raise DomainError("total decay rate must be positive")
        if self.resonance_wavelength_nm <= 0:
            raise DomainError("resonance wavelength must be positive")

    @property
    def gamma_total_uev(self) -> float:
        return self.gamma_1d_uev + self.gamma_loss_uev

    @property
    def beta(self) -> float:
        """Fraction of the decay going into the guided mode."""
        return self.gamma_1d_uev / self.gamma_total_uev

    @property
    def fwhm_uev(self) -> float:
        """Dephasing-broadened FWHM of the coherent response."""
        return self.gamma_total_uev + 2.0 * self.gamma_pd_uev

    @property
    def resonance_energy_uev(self) -> float:
        return HC_UEV_NM / self.resonance_wavelength_nm

    @classmethod
    def from_beta(
        cls,
        beta: float,
        gamma_total_uev: float,
        gamma_pd_uev: float = 0.0,
        resonance_wavelength_nm: float = 893.0,
    ) -> "EmitterParams":
        if not 0.0 <= beta <= 1.0:
            raise DomainError(f"beta must lie in [0, 1], got {beta}")
        if gamma_total_uev <= 0:
            raise DomainError("total decay rate must be positive")
        return cls(
            gamma_1d_uev=beta * gamma_total_uev,
            gamma_loss_uev=(1.0 - beta) * gamma_total_uev,
            gamma_pd_uev=gamma_pd_uev,
            resonance_wavelength_nm=resonance_wavelength_nm,
        )


def scattering_amplitudes(p: EmitterParams, detuning_uev):
    """Coherent transmission and reflection amplitudes (t, r).

    t(D) = 1 - (G1d/2) / (Gtot/2 + gpd - i*D), r(D) = t(D) - 1.
    The -i*D branch makes arg(t) wind upward through resonance.  Pure
    dephasing removes amplitude from the coherent channel; the photons it
    scatters incoherently count as extinction here.
    """
    d = np.asarray(detuning_uev, dtype=float)
    denom = 0.5 * p.gamma_total_uev + p.gamma_pd_uev - 1j * d
    t = 1.0 - (0.5 * p.gamma_1d_uev) / denom
    r = t - 1.0
    if np.ndim(detuning_uev) == 0:
        return complex(t), complex(r)
    return t, r


def extinction_on_resonance(p: EmitterParams) -> float:
    """Weak-field dip depth 1 - |t(0)|^2, in [0, 1]."""
    t, _ = scattering_amplitudes(p, 0.0)
    return 1.0 - abs(t) ** 2


def saturated_amplitude(p: EmitterParams, detuning_uev, s0: float):
    """Coherent transmission with the scattering term suppressed by 1/(1+s).

    ``s0`` is the on-resonance saturation parameter; off resonance
    s = s0 / (1 + (2*D/Geff)^2) with Geff = Gtot + 2*gpd.  Reduces to
    :func:`scattering_amplitudes` at s0 = 0 and to full transparency as
    s0 -> infinity.
    """
    if s0 < 0:
        raise DomainError(f"saturation parameter must be non-negative, got {s0}")
    d = np.asarray(detuning_uev, dtype=float)
    geff = p.fwhm_uev
    s = s0 / (1.0 + (2.0 * d / geff) ** 2)
    denom = 0.5 * p.gamma_total_uev + p.gamma_pd_uev - 1j * d
    t = 1.0 - (0.5 * p.gamma_1d_uev) / denom / (1.0 + s)
    if np.ndim(detuning_uev) == 0:
        return complex(t)
    return t


def linewidth_with_dephasing(p: EmitterParams) -> float:
    """FWHM (ueV) of the extinction dip: Gtot + 2*gpd."""
    return p.fwhm_uev
