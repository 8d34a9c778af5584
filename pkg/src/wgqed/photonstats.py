"""Second-order correlations of fluorescence and of transmitted light.

Two independent routes are provided.  ``g2_transmitted`` evaluates the
closed-form weak-drive two-photon transport solution for the field behind
the emitter (coherent drive plus forward dipole radiation), valid for any
dephasing and detuning.  ``MasterEquationOracle`` integrates the driven
two-level master equation step by step and evaluates the same correlators
through the quantum regression theorem; it is deliberately brute force so
it can serve as the ground truth for the analytic route.

Rates enter in ueV and are converted once to angular rates in 1/ns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .emitter import EmitterParams, scattering_amplitudes
from .errors import (
    ConvergenceError,
    DataError,
    DivergentBunchingError,
    DomainError,
    GridMismatchError,
)
from .quantities import HBAR_UEV_NS

_NEG_TOL = 1e-9


@dataclass
class G2Trace:
    """Normalized intensity correlation on a delay grid symmetric about 0."""

    delays_ns: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.delays_ns = np.asarray(self.delays_ns, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.delays_ns.shape != self.values.shape or self.delays_ns.ndim != 1:
            raise GridMismatchError("delays and values must be 1-D arrays of equal length")
        if not np.allclose(self.delays_ns, -self.delays_ns[::-1], atol=1e-12):
            raise DataError("delay grid must be symmetric about zero")
        if not np.all(np.isfinite(self.values)):
            raise DataError("correlation values must be finite")
        if np.any(self.values < -_NEG_TOL):
            raise DataError("correlation values must be non-negative")
        self.values = np.maximum(self.values, 0.0)


def symmetric_delays(max_delay_ns: float, n_half: int) -> np.ndarray:
    """Delay grid with 2*n_half + 1 points spanning [-max, +max]."""
    if max_delay_ns <= 0 or n_half < 1:
        raise DomainError("need a positive span and at least one point per side")
    return np.linspace(-max_delay_ns, max_delay_ns, 2 * n_half + 1)


@dataclass(frozen=True)
class DriveParams:
    """Classical coherent drive: Rabi energy and laser-emitter detuning."""

    rabi_uev: float
    detuning_uev: float = 0.0

    def __post_init__(self):
        if self.rabi_uev < 0:
            raise DomainError("Rabi frequency must be non-negative")

    @classmethod
    def from_saturation(
        cls, p: EmitterParams, s0: float, detuning_uev: float = 0.0
    ) -> "DriveParams":
        """Drive with on-resonance saturation parameter s0 = 2*W^2/Geff^2.

        This mapping is exact for zero pure dephasing; with dephasing it
        is the conventional linewidth-referenced definition.
        """
        if s0 < 0:
            raise DomainError("saturation parameter must be non-negative")
        return cls(rabi_uev=p.fwhm_uev * np.sqrt(s0 / 2.0), detuning_uev=detuning_uev)


def _rates_per_ns(p: EmitterParams):
    g1 = p.gamma_total_uev / HBAR_UEV_NS
    gpd = p.gamma_pd_uev / HBAR_UEV_NS
    return g1, 0.5 * g1 + gpd, p.gamma_1d_uev / HBAR_UEV_NS


def g2_transmitted(p: EmitterParams, detuning_uev: float, delays_ns) -> G2Trace:
    """Weak-coherent-drive g2 of the light transmitted past the emitter.

    Closed form obtained from the transmitted-field operator (drive plus
    forward dipole radiation) expanded to leading order in the drive; the
    master-equation oracle reproduces it in the weak-drive limit.
    """
    delays = np.asarray(delays_ns, dtype=float)
    g1, g2r, g1d = _rates_per_ns(p)
    d = detuning_uev / HBAR_UEV_NS

    phi = -(0.5 * g1d) / (g2r - 1j * d)
    t_amp = 1.0 + phi
    if abs(t_amp) ** 2 < 1e-12:
        raise DivergentBunchingError(
            "single-photon transmission vanishes at this detuning; photon "
            "pairs dominate and g2 diverges"
        )
    big_p = 2.0 * (g2r / g1) * abs(phi) ** 2
    total = 1.0 + 2.0 * phi.real + big_p
    w = big_p - phi * (2.0 * phi.real + big_p)
    lam = (g1 - g2r) + 1j * d
    b2 = 0.5 * g1d

    tau = np.abs(delays)
    if abs(lam) < 1e-9 * g1:
        bridge = tau * np.exp(-g1 * tau)
    else:
        bridge = (np.exp((lam - g1) * tau) - np.exp(-g1 * tau)) / lam
    transient = (
        2.0 * np.real(w * np.exp((1j * d - g2r) * tau))
        - 2.0 * np.real(b2 * w * bridge)
        + big_p * (1.0 - total) * np.exp(-g1 * tau)
    )
    values = 1.0 + transient / total**2
    return G2Trace(delays_ns=delays, values=np.maximum(values, 0.0))


@dataclass(frozen=True)
class OracleOptions:
    """Integration controls for the master-equation oracle.

    ``step_factor`` n gives a step of 1/(n * max(rates)); the default obeys
    step <= min(1/(20*Geff), 1/(20*W)).  ``ss_horizon_units`` forces the
    steady-state integration to run for that many multiples of 1/Gtot
    instead of using the relative-change criterion.
    """

    step_factor: float = 20.0
    ss_rel_tol: float = 1e-10
    ss_horizon_units: Optional[float] = None
    max_horizon_units: float = 2000.0


_SIGMA = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)


class MasterEquationOracle:
    """Brute-force driven two-level system with decay and pure dephasing.

    The state vector is (rho_gg, rho_eg, rho_ge, rho_ee).  Time stepping is
    classical fixed-step fourth-order (the one-step update is precomputed as
    the degree-4 polynomial of h*L, which is what the Runge-Kutta scheme
    reduces to for a linear generator).
    """

    def __init__(self, p: EmitterParams, drive: DriveParams, options: OracleOptions = OracleOptions()):
        self.emitter = p
        self.drive = drive
        self.options = options
        g1, g2r, g1d = _rates_per_ns(p)
        self._g1, self._g2r, self._g1d = g1, g2r, g1d
        self._delta = drive.detuning_uev / HBAR_UEV_NS
        self._omega = drive.rabi_uev / HBAR_UEV_NS
        om, dl = self._omega, self._delta
        self._liouvillian = np.array(
            [
                [0.0, -0.5j * om, 0.5j * om, g1],
                [-0.5j * om, 1j * dl - g2r, 0.0, 0.5j * om],
                [0.5j * om, 0.0, -1j * dl - g2r, -0.5j * om],
                [0.0, 0.5j * om, -0.5j * om, -g1],
            ],
            dtype=complex,
        )
        rate_scale = max(g1, 2.0 * g2r, self._omega)
        self._dt = 1.0 / (options.step_factor * rate_scale)
        self._ss = None

    def _step_matrix(self, h: float) -> np.ndarray:
        hl = h * self._liouvillian
        out = np.eye(4, dtype=complex)
        term = np.eye(4, dtype=complex)
        for k in (1.0, 2.0, 3.0, 4.0):
            term = term @ hl / k
            out = out + term
        return out

    def steady_state(self) -> np.ndarray:
        """Density matrix reached from the ground state, as a 4-vector."""
        if self._ss is not None:
            return self._ss
        opts = self.options
        dt = self._dt
        m = self._step_matrix(dt)
        v = np.array([1.0, 0.0, 0.0, 0.0], dtype=complex)
        if opts.ss_horizon_units is not None:
            n = int(np.ceil(opts.ss_horizon_units / (self._g1 * dt)))
            for _ in range(n):
                v = m @ v
            self._ss = v
            return v
        # chunked relative-change criterion: one chunk spans ~1/Gtot
        chunk = max(1, int(round(1.0 / (self._g1 * dt))))
        max_chunks = int(np.ceil(opts.max_horizon_units))
        for _ in range(max_chunks):
            v_prev = v
            for _ in range(chunk):
                v = m @ v
            if np.max(np.abs(v - v_prev)) < opts.ss_rel_tol * max(np.max(np.abs(v)), 1e-300):
                self._ss = v
                return v
        raise ConvergenceError(
            "steady state not reached; reduce the drive or decrease the "
            "integration step (larger step_factor)"
        )

    def _transmitted_field_op(self) -> np.ndarray:
        if self._g1d <= 0:
            raise DomainError("transmitted-field operator needs gamma_1d > 0")
        alpha = self._omega / np.sqrt(2.0 * self._g1d)
        return alpha * np.eye(2, dtype=complex) - 1j * np.sqrt(0.5 * self._g1d) * _SIGMA

    def steady_transmission(self) -> complex:
        """Coherent amplitude <E>/alpha in steady state (saturation included)."""
        v = self.steady_state()
        alpha = self._omega / np.sqrt(2.0 * self._g1d)
        sigma_expect = v[1]  # rho_eg
        return 1.0 + (-1j * np.sqrt(0.5 * self._g1d)) * sigma_expect / alpha

    def _regression(self, field_op: np.ndarray, delays: np.ndarray) -> np.ndarray:
        """g2 on tau >= 0 via collapse, re-evolution and the intensity trace."""
        v = self.steady_state()
        rho = np.array([[v[0], v[2]], [v[1], v[3]]], dtype=complex)
        n_op = field_op.conj().T @ field_op
        mean_intensity = np.trace(n_op @ rho).real
        if mean_intensity <= 0:
            raise DivergentBunchingError("steady-state intensity vanishes")
        chi = field_op @ rho @ field_op.conj().T
        chi_tr = np.trace(chi).real
        if chi_tr <= 0:
            return np.ones_like(delays)
        chi = chi / chi_tr
        vv = np.array([chi[0, 0], chi[1, 0], chi[0, 1], chi[1, 1]], dtype=complex)
        out = np.empty_like(delays)
        t_prev = 0.0
        for i, tau in enumerate(delays):
            if tau > t_prev:
                n_steps = max(1, int(np.ceil((tau - t_prev) / self._dt)))
                mi = self._step_matrix((tau - t_prev) / n_steps)
                for _ in range(n_steps):
                    vv = mi @ vv
                t_prev = tau
            rr = np.array([[vv[0], vv[2]], [vv[1], vv[3]]], dtype=complex)
            out[i] = np.trace(n_op @ rr).real / mean_intensity
        return out

    def _symmetric_trace(self, field_op: np.ndarray, delays_ns) -> G2Trace:
        delays = np.asarray(delays_ns, dtype=float)
        pos = np.unique(np.abs(delays))
        g_pos = self._regression(field_op, pos)
        lookup = dict(zip(pos.tolist(), g_pos.tolist()))
        values = np.array([lookup[abs(t)] for t in delays])
        return G2Trace(delays_ns=delays, values=np.maximum(values, 0.0))

    def g2_transmitted(self, delays_ns) -> G2Trace:
        if self._g1d <= 0:
            delays = np.asarray(delays_ns, dtype=float)
            return G2Trace(delays_ns=delays, values=np.ones_like(delays))
        return self._symmetric_trace(self._transmitted_field_op(), delays_ns)

    def g2_fluorescence(self, delays_ns) -> G2Trace:
        return self._symmetric_trace(_SIGMA.copy(), delays_ns)


def g2_oracle(
    p: EmitterParams,
    drive: DriveParams,
    delays_ns,
    options: OracleOptions = OracleOptions(),
) -> G2Trace:
    """Transmitted-field g2 from the brute-force master-equation route."""
    return MasterEquationOracle(p, drive, options).g2_transmitted(delays_ns)


def g2_fluorescence(
    p: EmitterParams,
    drive: DriveParams,
    delays_ns,
    options: OracleOptions = OracleOptions(),
) -> G2Trace:
    """g2 of the emitter's scattered field alone (0 at zero delay ideally)."""
    return MasterEquationOracle(p, drive, options).g2_fluorescence(delays_ns)


@dataclass(frozen=True)
class MixtureComponent:
    """One slowly-switching source state: occupancy, intensity, correlation."""

    weight: float
    intensity: float
    trace: G2Trace


def mix_g2(components: Sequence[MixtureComponent], delays_ns=None) -> G2Trace:
    """Correlation of a source that switches between states slowly.

    Valid when every delay on the grid is far shorter than the dwell time
    of the switching process, so both photons of a pair come from the same
    state: g2 = sum(p_i I_i^2 g_i) / (sum(p_i I_i))^2.
    """
    if not components:
        raise DomainError("mixture needs at least one component")
    wsum = sum(c.weight for c in components)
    if abs(wsum - 1.0) > 1e-9:
        raise DomainError(f"mixture weights must sum to 1, got {wsum}")
    if any(c.weight < 0 or c.intensity < 0 for c in components):
        raise DomainError("weights and intensities must be non-negative")
    grid = components[0].trace.delays_ns
    for c in components[1:]:
        if not np.array_equal(c.trace.delays_ns, grid):
            raise GridMismatchError("mixture components must share a delay grid")
    if delays_ns is not None and not np.array_equal(np.asarray(delays_ns, dtype=float), grid):
        raise GridMismatchError("requested delay grid differs from the components'")
    num = sum(c.weight * c.intensity**2 * c.trace.values for c in components)
    mean = sum(c.weight * c.intensity for c in components)
    if mean <= 0:
        raise DomainError("mixture has zero mean intensity")
    return G2Trace(delays_ns=grid.copy(), values=num / mean**2)


def background_dilution(trace: G2Trace, rho: float) -> G2Trace:
    """Correlation after adding an uncorrelated (Poissonian) background.

    ``rho`` is the signal fraction of the detected intensity:
    g2_meas = 1 + rho^2 * (g2 - 1).
    """
    if not 0.0 <= rho <= 1.0:
        raise DomainError(f"signal fraction must lie in [0, 1], got {rho}")
    return G2Trace(
        delays_ns=trace.delays_ns.copy(),
        values=1.0 + rho**2 * (trace.values - 1.0),
    )


def convolve_irf(trace: G2Trace, sigma_ns: float) -> G2Trace:
    """Smear a correlation trace with a normalized Gaussian timing kernel.

    The grid must be uniform.  Edges are padded with the boundary values,
    so a constant trace (and the tau -> inf tail) is preserved exactly.
    """
    if sigma_ns < 0:
        raise DomainError("IRF width must be non-negative")
    if sigma_ns == 0:
        return G2Trace(delays_ns=trace.delays_ns.copy(), values=trace.values.copy())
    steps = np.diff(trace.delays_ns)
    if steps.size == 0:
        return G2Trace(delays_ns=trace.delays_ns.copy(), values=trace.values.copy())
    dt = steps[0]
    if not np.allclose(steps, dt, rtol=1e-9, atol=1e-12):
        raise GridMismatchError("IRF convolution requires a uniform delay grid")
    half = int(np.ceil(5.0 * sigma_ns / dt))
    x = np.arange(-half, half + 1) * dt
    kernel = np.exp(-0.5 * (x / sigma_ns) ** 2)
    kernel /= kernel.sum()
    padded = np.concatenate(
        [np.full(half, trace.values[0]), trace.values, np.full(half, trace.values[-1])]
    )
    smoothed = np.convolve(padded, kernel, mode="valid")
    return G2Trace(delays_ns=trace.delays_ns.copy(), values=smoothed)


@dataclass
class DetuningCurve:
    """Peak correlation value versus laser-emitter detuning."""

    detunings_uev: np.ndarray
    max_g2: np.ndarray

    def __post_init__(self):
        self.detunings_uev = np.asarray(self.detunings_uev, dtype=float)
        self.max_g2 = np.asarray(self.max_g2, dtype=float)
        if self.detunings_uev.shape != self.max_g2.shape:
            raise GridMismatchError("detunings and values must have equal length")


def bunching_vs_detuning(
    p: EmitterParams,
    detunings_uev,
    delays_ns,
    process: Optional[Callable[[G2Trace, float], G2Trace]] = None,
) -> DetuningCurve:
    """Maximum of the transmitted-field g2 trace at each detuning.

    ``process`` may apply mixing, background dilution and IRF smearing to
    each raw trace before the maximum is taken; it receives the trace and
    the detuning.
    """
    detunings = np.asarray(detunings_uev, dtype=float)
    maxima = np.empty_like(detunings)
    for i, d in enumerate(detunings):
        trace = g2_transmitted(p, d, delays_ns)
        if process is not None:
            trace = process(trace, d)
        maxima[i] = trace.values.max()
    return DetuningCurve(detunings_uev=detunings, max_g2=maxima)
