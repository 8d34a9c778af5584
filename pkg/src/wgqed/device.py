"""Transfer-matrix model of the full device.

A device is an ordered chain (left to right) of partial reflectors,
propagation sections and at most one embedded emitter.  Field vectors are
(forward, backward) amplitudes; each element matrix maps the fields on its
right side to the fields on its left side, so a chain cascades as the plain
matrix product in list order and the device transmission is 1/m11 of the
cascade.  For a symmetric scatterer with amplitudes (t, r) the element
matrix is [[1, -r_R], [r_L, t^2 - r_L*r_R]] / t; mirrors use the lossless
beam-splitter sign convention r_R = -r_L so their scattering matrix stays
unitary.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .emitter import EmitterParams, scattering_amplitudes
from .errors import (
    DataError,
    DomainError,
    GridMismatchError,
    ResonanceDivergenceError,
    SingularElementError,
)
from .quantities import wavelength_to_detuning_uev

_SINGULAR_TOL = 1e-300


@dataclass(frozen=True)
class Mirror:
    """Lossless partial reflector with amplitude reflectivity in [0, 1)."""

    reflectivity: float

    def __post_init__(self):
        if not 0.0 <= self.reflectivity < 1.0:
            raise DomainError(f"mirror reflectivity must lie in [0, 1), got {self.reflectivity}")


@dataclass(frozen=True)
class Propagation:
    """Dispersionless propagation section."""

    length_um: float
    effective_index: float = 1.0

    def __post_init__(self):
        if self.length_um < 0:
            raise DomainError("propagation length must be non-negative")
        if self.effective_index < 1.0:
            raise DomainError("effective index must be >= 1")


@dataclass(frozen=True)
class EmitterSite:
    """Embedded two-level emitter."""

    params: EmitterParams


Element = Union[Mirror, Propagation, EmitterSite]


@dataclass(frozen=True)
class BandEdgeModel:
    """Parametric slow-light model near a photonic band edge.

    Group index n_g = ng0 / sqrt(1 - lambda/lambda_be), capped at
    ``max_enhancement`` because the divergence is never reached in a
    fabricated device.
    """

    lambda_be_nm: float
    ng0: float = 1.0
    max_enhancement: float = 30.0

    def __post_init__(self):
        if self.lambda_be_nm <= 0 or self.ng0 <= 0 or self.max_enhancement <= 0:
            raise DomainError("band-edge parameters must be positive")


@dataclass(frozen=True)
class DeviceModel:
    """Ordered element chain with optional slow-light scaling and blinking."""

    elements: tuple
    band_edge: Optional[BandEdgeModel] = None
    blinking_fraction: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        n_emitters = sum(isinstance(e, EmitterSite) for e in self.elements)
        if n_emitters > 1:
            raise DomainError("a device holds at most one emitter site")
        if not 0.0 <= self.blinking_fraction <= 1.0:
            raise DomainError("blinking fraction must lie in [0, 1]")

    def emitter(self) -> Optional[EmitterParams]:
        for e in self.elements:
            if isinstance(e, EmitterSite):
                return e.params
        return None


@dataclass
class Spectrum:
    """Sampled intensity (or any real quantity) versus a spectral axis."""

    axis: np.ndarray
    values: np.ndarray
    axis_name: str = "wavelength_nm"

    def __post_init__(self):
        self.axis = np.asarray(self.axis, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.axis.shape != self.values.shape or self.axis.ndim != 1:
            raise GridMismatchError("axis and values must be 1-D arrays of equal length")


def _scatterer_matrix(t: complex, r_left: complex, r_right: complex) -> np.ndarray:
    if abs(t) < _SINGULAR_TOL:
        raise SingularElementError(
            "element transmission is exactly zero; offset the detuning by machine epsilon"
        )
    return np.array(
        [[1.0, -r_right], [r_left, t * t - r_left * r_right]], dtype=complex
    ) / t


def slow_light_scaling(band_edge: BandEdgeModel, wavelength_nm: float, base_gamma_1d_uev: float) -> float:
    """Guided decay rate scaled by the capped group index at this wavelength."""
    if wavelength_nm >= band_edge.lambda_be_nm:
        raise DomainError(
            f"wavelength {wavelength_nm} nm is at or beyond the band edge "
            f"{band_edge.lambda_be_nm} nm"
        )
    ng = band_edge.ng0 / np.sqrt(1.0 - wavelength_nm / band_edge.lambda_be_nm)
    return base_gamma_1d_uev * min(ng, band_edge.max_enhancement)


def element_matrix(
    element: Element,
    wavelength_nm: float,
    *,
    band_edge: Optional[BandEdgeModel] = None,
    emitter_detuning_uev: Optional[float] = None,
) -> np.ndarray:
    """2x2 transfer matrix of a single element at the given wavelength.

    ``emitter_detuning_uev`` overrides the wavelength-implied detuning of an
    emitter site (used when a bias shifts the transition instead of the
    laser).
    """
    if isinstance(element, Propagation):
        phase = 2.0 * np.pi * element.effective_index * element.length_um * 1e3 / wavelength_nm
        return np.array(
            [[np.exp(1j * phase), 0.0], [0.0, np.exp(-1j * phase)]], dtype=complex
        )
    if isinstance(element, Mirror):
        r = element.reflectivity
        if r == 0.0:
            return np.eye(2, dtype=complex)
        # symmetric lossless reflector: unitarity puts the pi/2 phase on the
        # transmitted amplitude, which yields sin^2(phi) cavity fringes
        tm = 1j * np.sqrt(1.0 - r * r)
        return _scatterer_matrix(tm, r, r)
    if isinstance(element, EmitterSite):
        p = element.params
        if band_edge is not None:
            p = replace(p, gamma_1d_uev=slow_light_scaling(band_edge, wavelength_nm, p.gamma_1d_uev))
        if emitter_detuning_uev is None:
            detuning = wavelength_to_detuning_uev(wavelength_nm, p.resonance_wavelength_nm)
        else:
            detuning = emitter_detuning_uev
        t, r = scattering_amplitudes(p, detuning)
        if abs(t) < _SINGULAR_TOL:
            raise SingularElementError(
                "emitter transmission vanishes at this detuning; "
                "offset the detuning by machine epsilon"
            )
        return _scatterer_matrix(t, r, r)
    raise DomainError(f"unknown element type: {type(element).__name__}")


def cascade(matrices) -> np.ndarray:
    """Ordered product of element matrices (left-to-right chain order)."""
    ms = list(matrices)
    if not ms:
        raise DomainError("cascade of an empty element list")
    out = np.eye(2, dtype=complex)
    for m in ms:
        out = out @ np.asarray(m, dtype=complex)
    return out


def device_transmission(
    model: DeviceModel,
    wavelength_nm: float,
    *,
    emitter_detuning_uev: Optional[float] = None,
) -> complex:
    """Complex transmission amplitude of the full chain, 1/m11."""
    if not model.elements:
        return 1.0 + 0.0j
    ms = [
        element_matrix(
            e,
            wavelength_nm,
            band_edge=model.band_edge,
            emitter_detuning_uev=emitter_detuning_uev,
        )
        for e in model.elements
    ]
    m = cascade(ms)
    m11 = m[0, 0]
    if abs(m11) < 1e-12:
        raise ResonanceDivergenceError(
            f"cascade is singular at {wavelength_nm} nm (|m11| = {abs(m11):.3e})"
        )
    return 1.0 / m11


def device_reflection(
    model: DeviceModel,
    wavelength_nm: float,
    *,
    emitter_detuning_uev: Optional[float] = None,
) -> complex:
    """Complex reflection amplitude, m21/m11."""
    ms = [
        element_matrix(
            e,
            wavelength_nm,
            band_edge=model.band_edge,
            emitter_detuning_uev=emitter_detuning_uev,
        )
        for e in model.elements
    ]
    m = cascade(ms)
    if abs(m[0, 0]) < 1e-12:
        raise ResonanceDivergenceError(f"cascade is singular at {wavelength_nm} nm")
    return m[1, 0] / m[0, 0]


def _check_monotone(grid: np.ndarray, name: str):
    diffs = np.diff(grid)
    if grid.size > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise DomainError(f"{name} grid must be strictly monotone")


def spectrum_sweep(model: DeviceModel, wavelengths_nm) -> Spectrum:
    """Power transmission |t|^2 over a monotone wavelength grid."""
    grid = np.asarray(wavelengths_nm, dtype=float)
    _check_monotone(grid, "wavelength")
    values = np.empty_like(grid)
    for i, wl in enumerate(grid):
        values[i] = abs(device_transmission(model, wl)) ** 2
    return Spectrum(axis=grid, values=values, axis_name="wavelength_nm")


def detuning_sweep(model: DeviceModel, laser_wavelength_nm: float, detunings_uev) -> Spectrum:
    """Power transmission versus emitter detuning at a fixed laser wavelength.

    The emitter is shifted (as by a bias) while the passive elements see the
    fixed laser wavelength.
    """
    grid = np.asarray(detunings_uev, dtype=float)
    _check_monotone(grid, "detuning")
    values = np.empty_like(grid)
    for i, d in enumerate(grid):
        values[i] = abs(
            device_transmission(model, laser_wavelength_nm, emitter_detuning_uev=d)
        ) ** 2
    return Spectrum(axis=grid, values=values, axis_name="detuning_ueV")


def apply_blinking(t_on: Spectrum, t_off: Spectrum, b: float) -> Spectrum:
    """Intensity-weighted mixture (1-b)*on + b*off of the two emitter states."""
    if not 0.0 <= b <= 1.0:
        raise DomainError(f"blinking fraction must lie in [0, 1], got {b}")
    if t_on.axis.shape != t_off.axis.shape or not np.array_equal(t_on.axis, t_off.axis):
        raise GridMismatchError("blinking mixture requires identical spectral grids")
    return Spectrum(
        axis=t_on.axis.copy(),
        values=(1.0 - b) * t_on.values + b * t_off.values,
        axis_name=t_on.axis_name,
    )


def normalize_spectrum(active: Spectrum, inactive: Spectrum) -> Spectrum:
    """Pointwise ratio active/inactive; removes the passive-device envelope."""
    if active.axis.shape != inactive.axis.shape or not np.array_equal(active.axis, inactive.axis):
        raise GridMismatchError("normalization requires identical spectral grids")
    if np.any(inactive.values <= 0):
        raise DataError("inactive-state transmission must be strictly positive")
    return Spectrum(
        axis=active.axis.copy(),
        values=active.values / inactive.values,
        axis_name=active.axis_name,
    )


def transmission_response(model: DeviceModel, laser_wavelength_nm: float):
    """Vectorized |t|^2 versus emitter detuning at a fixed laser wavelength.

    The passive sections are folded into two constant matrices around the
    emitter once, so sweeping the detuning costs a handful of array ops.
    Falls back to the generic per-point route for emitter-free devices.
    """
    elements = list(model.elements)
    split = next((i for i, e in enumerate(elements) if isinstance(e, EmitterSite)), None)
    if split is None:
        t0 = device_transmission(model, laser_wavelength_nm)

        def flat_response(detunings_uev):
            d = np.asarray(detunings_uev, dtype=float)
            return np.full_like(d, abs(t0) ** 2)

        return flat_response

    p = elements[split].params
    if model.band_edge is not None:
        p = replace(
            p,
            gamma_1d_uev=slow_light_scaling(
                model.band_edge, laser_wavelength_nm, p.gamma_1d_uev
            ),
        )
    left = cascade(
        [element_matrix(e, laser_wavelength_nm) for e in elements[:split]]
        or [np.eye(2, dtype=complex)]
    )
    right = cascade(
        [element_matrix(e, laser_wavelength_nm) for e in elements[split + 1:]]
        or [np.eye(2, dtype=complex)]
    )
    l00, l01 = left[0, 0], left[0, 1]
    r00, r10 = right[0, 0], right[1, 0]

    def response(detunings_uev):
        t, r = scattering_amplitudes(p, np.asarray(detunings_uev, dtype=float))
        t = np.asarray(t)
        r = np.asarray(r)
        m11 = (l00 * (r00 - r * r10) + l01 * (r * r00 + (t * t - r * r) * r10)) / t
        return np.abs(1.0 / m11) ** 2

    return response


def inactive_model(model: DeviceModel) -> DeviceModel:
    """The same device with the emitter optically dark (no guided coupling)."""
    elements = []
    for e in model.elements:
        if isinstance(e, EmitterSite):
            if e.params.gamma_loss_uev > 0:
                elements.append(EmitterSite(replace(e.params, gamma_1d_uev=0.0)))
            else:
                # no decay channel left at all: optically inert section
                elements.append(Propagation(length_um=0.0))
        else:
            elements.append(e)
    return DeviceModel(
        elements=tuple(elements),
        band_edge=model.band_edge,
        blinking_fraction=model.blinking_fraction,
    )
