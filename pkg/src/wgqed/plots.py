"""Static figure rendering for scenario artifacts.

Figures are SVG with a fixed hash salt and no embedded date so re-runs are
byte-identical (the determinism contract covers figures too).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .device import Spectrum  # noqa: E402
from .photonstats import DetuningCurve, G2Trace  # noqa: E402
from .tuning import TimeSeries  # noqa: E402

_AXIS_LABELS = {
    "wavelength_nm": "wavelength (nm)",
    "detuning_ueV": "detuning (µeV)",
}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    with plt.rc_context({"svg.hashsalt": "wgqed"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_spectrum(spectrum: Spectrum, path, fit_curve=None, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(spectrum.axis, spectrum.values, ".", ms=3, color="#2060a0", label="data")
    if fit_curve is not None:
        ax.plot(spectrum.axis, fit_curve, "-", lw=1.2, color="#c03020", label="fit")
        ax.legend(frameon=False, fontsize=8)
    ax.set_xlabel(_AXIS_LABELS.get(spectrum.axis_name, spectrum.axis_name))
    ax.set_ylabel("transmission")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_g2(trace: G2Trace, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(trace.delays_ns, trace.values, "-", lw=1.2, color="#2060a0")
    ax.axhline(1.0, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("delay (ns)")
    ax.set_ylabel("g$^{(2)}$($\\tau$)")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_timeseries(ts: TimeSeries, path, title: str = "", ylabel: str = "intensity") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(ts.times_ns, ts.values, "-", lw=1.0, color="#2060a0")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_power_curve(powers_nw, extinctions, path, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(powers_nw, extinctions, "o-", ms=3, lw=1.0, color="#2060a0")
    ax.set_xlabel("power (nW)")
    ax.set_ylabel("extinction")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)


def plot_detuning_curve(curve: DetuningCurve, path, guide=None, title: str = "") -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 3.4))
    ax.plot(curve.detunings_uev, curve.max_g2, "o", ms=3.5, color="#2060a0")
    if guide is not None:
        ax.plot(curve.detunings_uev, guide, "--", lw=1.0, color="0.5")
    ax.axhline(1.0, color="0.7", lw=0.8)
    ax.set_xlabel("detuning (µeV)")
    ax.set_ylabel("max g$^{(2)}$")
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    return _save(fig, path)
