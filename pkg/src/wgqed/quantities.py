"""Physical constants, unit conversions and lifetime/coherence relations.

Canonical internal units are micro-electronvolts (ueV) for energies and
rates, and nanoseconds (ns) for times.  Conversion to other units happens
only at I/O boundaries.  All functions are pure and thread-safe.
"""

from __future__ import annotations

import math

from .errors import DomainError, UnphysicalInputError

# CODATA constants, fixed so results are bit-reproducible.
PLANCK_UEV_PER_MHZ = 4.135667696e-3  # h in ueV / MHz
HBAR_UEV_NS = 0.6582119569  # hbar in ueV * ns
HC_EV_NM = 1239.842  # h*c in eV * nm
HC_UEV_NM = HC_EV_NM * 1e6  # h*c in ueV * nm
ELEMENTARY_CHARGE_C = 1.602176634e-19  # J per eV


def energy_to_frequency_mhz(energy_uev: float) -> float:
    """Convert a photon energy (ueV) to frequency (MHz)."""
    return energy_uev / PLANCK_UEV_PER_MHZ


def frequency_to_energy_uev(frequency_mhz: float) -> float:
    """Inverse of :func:`energy_to_frequency_mhz`."""
    return frequency_mhz * PLANCK_UEV_PER_MHZ


def lifetime_to_transform_limit_uev(t1_ns: float) -> float:
    """FWHM linewidth (ueV) of a lifetime-limited transition, hbar / T1."""
    if t1_ns <= 0:
        raise DomainError(f"lifetime must be positive, got {t1_ns} ns")
    return HBAR_UEV_NS / t1_ns


def pure_dephasing_time_ns(t1_ns: float, t2_ns: float) -> float:
    """Pure dephasing time T2* from 1/T2 = 1/(2*T1) + 1/T2*.

    Returns ``math.inf`` for a transform-limited emitter (T2 = 2*T1).
    """
    if t1_ns <= 0 or t2_ns <= 0:
        raise DomainError("lifetimes must be positive")
    if t2_ns > 2.0 * t1_ns:
        raise UnphysicalInputError(
            f"T2 = {t2_ns} ns exceeds the physical bound 2*T1 = {2 * t1_ns} ns"
        )
    if t2_ns == 2.0 * t1_ns:
        return math.inf
    return 1.0 / (1.0 / t2_ns - 1.0 / (2.0 * t1_ns))


def dephasing_rate_uev(t2_star_ns: float) -> float:
    """Pure dephasing rate (ueV) from the dephasing time, hbar / T2*."""
    if t2_star_ns <= 0:
        raise DomainError("dephasing time must be positive")
    if math.isinf(t2_star_ns):
        return 0.0
    return HBAR_UEV_NS / t2_star_ns


def purcell_factor(tau_reference_ns: float, tau_enhanced_ns: float) -> float:
    """Emission-rate enhancement as a lifetime ratio."""
    if tau_reference_ns <= 0 or tau_enhanced_ns <= 0:
        raise DomainError("lifetimes must be positive")
    return tau_reference_ns / tau_enhanced_ns


def photons_per_window(
    power_nw: float, wavelength_nm: float, window_ns: float, coupling: float
) -> float:
    """Mean photon number delivered into the device within a time window.

    ``coupling`` is the fraction of the optical power that reaches the
    waveguide mode.
    """
    if not 0.0 <= coupling <= 1.0:
        raise DomainError(f"coupling must lie in [0, 1], got {coupling}")
    if wavelength_nm <= 0:
        raise DomainError("wavelength must be positive")
    photon_energy_j = (HC_EV_NM / wavelength_nm) * ELEMENTARY_CHARGE_C
    return coupling * (power_nw * 1e-9) * (window_ns * 1e-9) / photon_energy_j


def wavelength_to_detuning_uev(wavelength_nm: float, resonance_nm: float):
    """Laser-emitter detuning for a laser at ``wavelength_nm``.

    Linearized about the emitter resonance; spectra here span far less
    than a nanometre.  Positive detuning = laser above the transition.
    """
    slope = HC_UEV_NM / resonance_nm**2  # ueV per nm
    return -slope * (wavelength_nm - resonance_nm)


def detuning_to_wavelength_nm(detuning_uev: float, resonance_nm: float):
    """Inverse of :func:`wavelength_to_detuning_uev`."""
    slope = HC_UEV_NM / resonance_nm**2
    return resonance_nm - detuning_uev / slope
