"""Quantum-emitter-in-waveguide simulator and analysis toolkit.

Canonical units: ueV for energies and rates, ns for times, nm for
wavelengths, V for biases.
"""

__version__ = "0.1.0"

from .emitter import EmitterParams
from .device import DeviceModel, Mirror, Propagation, EmitterSite, Spectrum
from .photonstats import G2Trace, DriveParams
from .fitting import fit, FitResult

__all__ = [
    "EmitterParams",
    "DeviceModel",
    "Mirror",
    "Propagation",
    "EmitterSite",
    "Spectrum",
    "G2Trace",
    "DriveParams",
    "fit",
    "FitResult",
    "__version__",
]
