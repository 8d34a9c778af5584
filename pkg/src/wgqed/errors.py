"""Exception types shared across the package."""


class WgqedError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(WgqedError, ValueError):
    """An argument is outside the domain an operation is defined on."""


class UnphysicalInputError(DomainError):
    """Inputs that no physical system can produce (e.g. T2 > 2*T1)."""


class BiasRangeError(DomainError):
    """Bias voltage outside the calibrated range of a Stark model."""


class SingularElementError(WgqedError):
    """An optical element with exactly zero transmission cannot be cast to a
    transfer matrix; offset the detuning by machine epsilon instead."""


class ResonanceDivergenceError(WgqedError):
    """The cascaded transfer matrix is singular at this wavelength."""


class DivergentBunchingError(WgqedError):
    """Transmitted-field correlations diverge when the single-photon
    transmission vanishes (photon pairs dominate the residual signal)."""


class GridMismatchError(WgqedError):
    """Two sampled quantities do not share the same grid."""


class DataError(WgqedError):
    """Input data violates the contract of an operation."""


class CsvSchemaError(DataError):
    """CSV header does not match any known schema."""


class CsvParseError(DataError):
    """Malformed CSV content; the message names the offending line."""


class AmbiguousEdgeError(WgqedError):
    """A switching edge crosses a threshold more than once."""


class DegenerateFitError(WgqedError):
    """Normal matrix is singular; the model is degenerate on this data."""


class NoFeatureError(WgqedError):
    """No spectral feature found to seed an initial guess from."""


class ConvergenceError(WgqedError):
    """Numerical iteration failed to converge."""


class ValidationError(WgqedError):
    """A scenario or CLI configuration is invalid; names the field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
