"""Electrical control: Stark tuning, charge plateaus, RC-limited switching.

The bias axis is treated as an opaque linear control of the transition
energy; no diode current model.  Switching traces follow the exponential
RC response of the contact, with the optical intensity evaluated
instantaneously at the momentary detuning.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .device import Spectrum
from .emitter import EmitterParams
from .errors import (
    AmbiguousEdgeError,
    BiasRangeError,
    DomainError,
    GridMismatchError,
)


@dataclass(frozen=True)
class StarkModel:
    """Linear bias-to-energy map; positive slope blueshifts the transition."""

    reference_bias_v: float
    reference_energy_uev: float
    slope_uev_per_v: float
    bias_range_v: Tuple[float, float] = (-10.0, 10.0)

    def __post_init__(self):
        lo, hi = self.bias_range_v
        if not lo < hi:
            raise DomainError("bias range must satisfy V_min < V_max")

    def transition_energy_uev(self, bias_v: float) -> float:
        return self.reference_energy_uev + self.slope_uev_per_v * (
            bias_v - self.reference_bias_v
        )


def bias_to_detuning(m: StarkModel, bias_v: float, laser_energy_uev: float) -> float:
    """Laser minus (Stark-shifted) transition energy, in ueV."""
    lo, hi = m.bias_range_v
    if not lo <= bias_v <= hi:
        raise BiasRangeError(f"bias {bias_v} V outside calibrated range [{lo}, {hi}] V")
    return laser_energy_uev - m.transition_energy_uev(bias_v)


@dataclass(frozen=True)
class ChargePlateaus:
    """Ordered, non-overlapping bias intervals labelled by charge state.

    A bias exactly on a shared boundary belongs to the lower-bias plateau;
    biases outside every interval are 'dark' (optically inactive).
    """

    plateaus: Tuple[Tuple[float, float, str], ...]

    def __post_init__(self):
        prev_hi = None
        for lo, hi, _label in self.plateaus:
            if not lo < hi:
                raise DomainError(f"empty plateau interval [{lo}, {hi}]")
            if prev_hi is not None and lo < prev_hi:
                raise DomainError("plateau intervals must be ordered and non-overlapping")
            prev_hi = hi


def charge_state(p: ChargePlateaus, bias_v: float) -> str:
    """Charge-state label at a bias, or 'dark' outside all plateaus."""
    for i, (lo, hi, label) in enumerate(p.plateaus):
        at_lower_edge = bias_v == lo and (i == 0 or p.plateaus[i - 1][1] < lo)
        if lo < bias_v <= hi or at_lower_edge:
            return label
    return "dark"


@dataclass(frozen=True)
class SwitchDrive:
    """Square-wave bias drive with an RC-limited response."""

    low_bias_v: float
    high_bias_v: float
    period_ns: float
    rc_ns: float

    def __post_init__(self):
        if self.rc_ns <= 0:
            raise DomainError("RC constant must be positive")
        if self.period_ns <= 10.0 * self.rc_ns:
            raise DomainError("period must exceed 10*RC for clean plateaus")


@dataclass
class TimeSeries:
    """Sampled intensity (or voltage) versus time in ns."""

    times_ns: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times_ns = np.asarray(self.times_ns, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times_ns.shape != self.values.shape or self.times_ns.ndim != 1:
            raise GridMismatchError("times and values must be 1-D arrays of equal length")


def bias_trace(drive: SwitchDrive, t_grid_ns) -> TimeSeries:
    """Bias voltage under the square drive, exponential toward each target.

    The trace starts at the low bias with the first half-period driving
    toward the high bias.
    """
    times = np.asarray(t_grid_ns, dtype=float)
    if times.size and (times[0] < 0 or np.any(np.diff(times) <= 0)):
        raise DomainError("time grid must be non-negative and strictly increasing")
    half = drive.period_ns / 2.0
    values = np.empty_like(times)
    v_start = drive.low_bias_v
    seg = 0
    seg_t0 = 0.0
    idx = 0
    while idx < times.size:
        target = drive.high_bias_v if seg % 2 == 0 else drive.low_bias_v
        seg_end = seg_t0 + half
        in_seg = (times >= seg_t0) & (times < seg_end)
        tloc = times[in_seg] - seg_t0
        values[in_seg] = target + (v_start - target) * np.exp(-tloc / drive.rc_ns)
        idx += int(np.count_nonzero(in_seg))
        v_start = target + (v_start - target) * np.exp(-half / drive.rc_ns)
        seg_t0 = seg_end
        seg += 1
    return TimeSeries(times_ns=times, values=values)


def lorentzian_response(p: EmitterParams) -> Callable[[float], float]:
    """Normalized fluorescence response versus detuning, peak 1 at resonance."""

    def response(detuning_uev):
        return 1.0 / (1.0 + (2.0 * np.asarray(detuning_uev) / p.fwhm_uev) ** 2)

    return response


def switch_trace(
    drive: SwitchDrive,
    stark: StarkModel,
    p: EmitterParams,
    laser_energy_uev: float,
    t_grid_ns,
    response: Optional[Callable] = None,
) -> TimeSeries:
    """Optical intensity under the square bias drive, normalized to [0, 1].

    ``response`` maps detuning (ueV) to intensity; the default is the
    emitter's Lorentzian fluorescence response.  Transmission-style traces
    pass the device transmission instead.
    """
    if response is None:
        response = lorentzian_response(p)
    bias = bias_trace(drive, t_grid_ns)
    detunings = np.array(
        [bias_to_detuning(stark, v, laser_energy_uev) for v in bias.values]
    )
    intensity = np.asarray(response(detunings), dtype=float)
    lo, hi = intensity.min(), intensity.max()
    if hi - lo <= 0:
        raise DomainError("drive produces no intensity contrast")
    return TimeSeries(times_ns=bias.times_ns, values=(intensity - lo) / (hi - lo))


def _crossings(times: np.ndarray, values: np.ndarray, level: float) -> list:
    """Linearly interpolated crossing times of a threshold."""
    out = []
    for i in range(values.size - 1):
        a, b = values[i], values[i + 1]
        if (a - level) * (b - level) < 0:
            frac = (level - a) / (b - a)
            out.append(times[i] + frac * (times[i + 1] - times[i]))
        elif a == level and b != level:
            out.append(times[i])
    return out


def rise_time_10_90(trace: TimeSeries) -> float:
    """10%-90% duration of the first switching edge of a trace.

    Thresholds are placed at 10% and 90% of the plateau-to-plateau
    amplitude.  A non-monotone edge that recrosses a threshold before the
    edge completes raises ``AmbiguousEdgeError`` naming the first crossings.
    """
    v = trace.values
    t = trace.times_ns
    lo, hi = v.min(), v.max()
    amp = hi - lo
    if amp <= 0:
        raise DomainError("trace has no edge (zero amplitude)")
    rising = abs(v[0] - lo) <= abs(v[0] - hi)
    if rising:
        lvl10, lvl90 = lo + 0.1 * amp, lo + 0.9 * amp
    else:
        lvl10, lvl90 = hi - 0.1 * amp, hi - 0.9 * amp
    c10 = _crossings(t, v, lvl10)
    c90 = _crossings(t, v, lvl90)
    if not c10 or not c90:
        raise DomainError("trace does not cross both 10% and 90% thresholds")
    t90 = min(c90)
    before = [x for x in c10 if x <= t90]
    if not before:
        raise AmbiguousEdgeError(
            f"90% threshold crossed at {t90:.6g} ns before any 10% crossing "
            f"(first 10% at {c10[0]:.6g} ns)"
        )
    if len(before) > 1:
        raise AmbiguousEdgeError(
            f"10% threshold crossed {len(before)} times within one edge; "
            f"first crossings at {before[0]:.6g} and {before[1]:.6g} ns"
        )
    return t90 - before[0]


def differential_spectrum(on: Spectrum, off: Spectrum) -> Spectrum:
    """Pointwise on - off; cancels any background common to both."""
    if on.axis.shape != off.axis.shape or not np.array_equal(on.axis, off.axis):
        raise GridMismatchError("differential spectra require identical grids")
    return Spectrum(
        axis=on.axis.copy(),
        values=on.values - off.values,
        axis_name=on.axis_name,
    )
