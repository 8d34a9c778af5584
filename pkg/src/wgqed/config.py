"""Config-dict builders for emitters, devices and control models.

Configs are flat JSON objects with units spelled out in the key names
(``gamma_1d_ueV``, ``cavity_phase_cycles``) so a file diff always shows
which physical quantity moved.
"""

from __future__ import annotations

from typing import Optional

from .device import BandEdgeModel, DeviceModel, EmitterSite, Mirror, Propagation
from .emitter import EmitterParams
from .errors import ValidationError
from .tuning import ChargePlateaus, StarkModel


def _get_float(cfg: dict, key: str, default=None) -> Optional[float]:
    if key not in cfg:
        if default is None:
            raise ValidationError(key, "required key is missing")
        return default
    try:
        return float(cfg[key])
    except (TypeError, ValueError):
        raise ValidationError(key, f"expected a number, got {cfg[key]!r}")


def emitter_from_config(cfg: dict) -> EmitterParams:
    """Accepts either explicit rates or (beta, gamma_total_ueV)."""
    wavelength = _get_float(cfg, "resonance_wavelength_nm", 893.0)
    gamma_pd = _get_float(cfg, "gamma_pd_ueV", 0.0)
    if "beta" in cfg:
        beta = _get_float(cfg, "beta")
        total = _get_float(cfg, "gamma_total_ueV")
        try:
            return EmitterParams.from_beta(beta, total, gamma_pd, wavelength)
        except Exception as exc:
            raise ValidationError("beta", str(exc))
    gamma_1d = _get_float(cfg, "gamma_1d_ueV")
    gamma_loss = _get_float(cfg, "gamma_loss_ueV", 0.0)
    try:
        return EmitterParams(gamma_1d, gamma_loss, gamma_pd, wavelength)
    except Exception as exc:
        raise ValidationError("gamma_1d_ueV", str(exc))


def device_from_config(cfg: dict, emitter: Optional[EmitterParams]) -> DeviceModel:
    """Symmetric two-mirror cavity with an optional embedded emitter.

    ``cavity_phase_cycles`` is the one-way optical phase of the whole cavity
    at the emitter resonance wavelength, in cycles; its fractional part sets
    where the laser sits within a fringe and therefore the lineshape
    asymmetry.  ``emitter_offset_cycles`` shifts the emitter from the cavity
    centre (0.25 cycles advance one-way phase by pi/2).
    """
    r_m = _get_float(cfg, "mirror_reflectivity", 0.2)
    n_eff = _get_float(cfg, "n_eff", 3.0)
    cycles = _get_float(cfg, "cavity_phase_cycles", 893.25)
    offset = _get_float(cfg, "emitter_offset_cycles", 0.0)
    blinking = _get_float(cfg, "blinking_fraction", 0.0)
    wavelength = (
        emitter.resonance_wavelength_nm
        if emitter is not None
        else _get_float(cfg, "resonance_wavelength_nm", 893.0)
    )
    if cycles <= 0:
        raise ValidationError("cavity_phase_cycles", "must be positive")
    length_total_um = cycles * wavelength / n_eff * 1e-3
    if not 0.0 < r_m < 1.0 and r_m != 0.0:
        raise ValidationError("mirror_reflectivity", "must lie in [0, 1)")
    band_edge = None
    if "band_edge_nm" in cfg:
        band_edge = BandEdgeModel(
            lambda_be_nm=_get_float(cfg, "band_edge_nm"),
            ng0=_get_float(cfg, "band_edge_ng0", 1.0),
            max_enhancement=_get_float(cfg, "band_edge_cap", 30.0),
        )
    if emitter is None:
        elements = (Mirror(r_m), Propagation(length_total_um, n_eff), Mirror(r_m))
    else:
        l1 = (0.5 + offset / cycles) * length_total_um
        l1 = min(max(l1, 0.0), length_total_um)
        elements = (
            Mirror(r_m),
            Propagation(l1, n_eff),
            EmitterSite(emitter),
            Propagation(length_total_um - l1, n_eff),
            Mirror(r_m),
        )
    try:
        return DeviceModel(elements=elements, band_edge=band_edge, blinking_fraction=blinking)
    except Exception as exc:
        raise ValidationError("blinking_fraction", str(exc))


def stark_from_config(cfg: dict, reference_energy_uev: float) -> StarkModel:
    return StarkModel(
        reference_bias_v=_get_float(cfg, "stark_reference_bias_V", 7.0),
        reference_energy_uev=reference_energy_uev,
        slope_uev_per_v=_get_float(cfg, "stark_slope_ueV_per_V", 50.0),
        bias_range_v=(
            _get_float(cfg, "bias_min_V", 0.0),
            _get_float(cfg, "bias_max_V", 12.0),
        ),
    )


def plateaus_from_config(cfg: dict) -> ChargePlateaus:
    raw = cfg.get(
        "charge_plateaus",
        [[5.5, 6.9, "X0"], [6.9, 8.5, "X-"]],
    )
    try:
        plateaus = tuple((float(lo), float(hi), str(label)) for lo, hi, label in raw)
        return ChargePlateaus(plateaus=plateaus)
    except ValidationError:
        raise
    except Exception as exc:
        raise ValidationError("charge_plateaus", str(exc))
