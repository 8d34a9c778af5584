"""Lineshape models and damped least-squares parameter extraction.

Models are plain functions of (x, theta); the fitter is Gauss-Newton with
adaptive Marquardt damping, analytic Jacobians and linearized (Gaussian)
one-sigma uncertainties from the residual-scaled inverse normal matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .device import Spectrum
from .errors import DegenerateFitError, DomainError, NoFeatureError

MAX_ITERATIONS = 500
STEP_TOL = 1e-9  # relative parameter step
COST_TOL = 1e-12  # relative residual decrease


@dataclass(frozen=True)
class LorentzianParams:
    amplitude: float
    center_uev: float
    fwhm_uev: float
    offset: float

    def __post_init__(self):
        if self.fwhm_uev <= 0:
            raise DomainError("FWHM must be positive")


@dataclass(frozen=True)
class FanoParams:
    amplitude: float
    q: float
    center_uev: float
    fwhm_uev: float
    offset: float

    def __post_init__(self):
        if self.fwhm_uev <= 0:
            raise DomainError("FWHM must be positive")
        if not np.isfinite(self.q):
            raise DomainError("asymmetry parameter must be finite")


def lorentzian(e, p: LorentzianParams):
    """C + A*(G/2)^2 / ((E-E0)^2 + (G/2)^2); half maximum exactly G apart."""
    return _lorentzian(np.asarray(e, dtype=float), _theta_of(p))


def fano(e, p: FanoParams):
    """C + A*(q+eps)^2/(1+eps^2) with eps = 2(E-E0)/G.

    The profile vanishes (relative to the offset) at eps = -q; for
    |q| -> inf with A*q^2 held fixed it converges to a Lorentzian.
    """
    return _fano(np.asarray(e, dtype=float), _theta_of(p))


def _theta_of(p) -> np.ndarray:
    if isinstance(p, LorentzianParams):
        return np.array([p.amplitude, p.center_uev, p.fwhm_uev, p.offset])
    if isinstance(p, FanoParams):
        return np.array([p.amplitude, p.q, p.center_uev, p.fwhm_uev, p.offset])
    raise DomainError(f"unsupported parameter type {type(p).__name__}")


def _lorentzian(x, theta):
    a, e0, g, c = theta
    h2 = (0.5 * g) ** 2
    return c + a * h2 / ((x - e0) ** 2 + h2)


def _lorentzian_jac(x, theta):
    a, e0, g, c = theta
    h = 0.5 * g
    d2 = (x - e0) ** 2 + h * h
    j = np.empty((x.size, 4))
    j[:, 0] = h * h / d2
    j[:, 1] = a * h * h * 2.0 * (x - e0) / d2**2
    j[:, 2] = a * h * (x - e0) ** 2 / d2**2
    j[:, 3] = 1.0
    return j


def _fano(x, theta):
    a, q, e0, g, c = theta
    eps = 2.0 * (x - e0) / g
    return c + a * (q + eps) ** 2 / (1.0 + eps**2)


def _fano_jac(x, theta):
    a, q, e0, g, c = theta
    eps = 2.0 * (x - e0) / g
    one = 1.0 + eps**2
    qe = q + eps
    dfde = 2.0 * a * qe * (1.0 - q * eps) / one**2
    j = np.empty((x.size, 5))
    j[:, 0] = qe**2 / one
    j[:, 1] = 2.0 * a * qe / one
    j[:, 2] = dfde * (-2.0 / g)
    j[:, 3] = dfde * (-eps / g)
    j[:, 4] = 1.0
    return j


@dataclass(frozen=True)
class Model:
    name: str
    param_names: tuple
    func: Callable[[np.ndarray, np.ndarray], np.ndarray]
    jac: Callable[[np.ndarray, np.ndarray], np.ndarray]
    make_params: Callable[[np.ndarray], object]

    @property
    def n_params(self) -> int:
        return len(self.param_names)


LORENTZIAN = Model(
    name="lorentzian",
    param_names=("amplitude", "center_uev", "fwhm_uev", "offset"),
    func=_lorentzian,
    jac=_lorentzian_jac,
    make_params=lambda th: LorentzianParams(*th),
)

FANO = Model(
    name="fano",
    param_names=("amplitude", "q", "center_uev", "fwhm_uev", "offset"),
    func=_fano,
    jac=_fano_jac,
    make_params=lambda th: FanoParams(*th),
)

_MODELS = {"lorentzian": LORENTZIAN, "fano": FANO}


def get_model(name: str) -> Model:
    try:
        return _MODELS[name]
    except KeyError:
        raise DomainError(f"unknown model '{name}'; choose from {sorted(_MODELS)}")


def finite_difference_jacobian(model: Model, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Central differences, for validating the analytic Jacobians."""
    j = np.empty((x.size, theta.size))
    for k in range(theta.size):
        h = 1e-6 * max(abs(theta[k]), 1e-3)
        tp, tm = theta.copy(), theta.copy()
        tp[k] += h
        tm[k] -= h
        j[:, k] = (model.func(x, tp) - model.func(x, tm)) / (2.0 * h)
    return j


@dataclass
class FitResult:
    """Converged parameters with linearized one-sigma uncertainties."""

    model: str
    values: np.ndarray
    sigmas: np.ndarray
    residual_norm: float
    converged: bool
    iterations: int
    param_names: tuple

    @property
    def params(self):
        return get_model(self.model).make_params(self.values)

    def as_dict(self) -> dict:
        out = {"model": self.model, "converged": self.converged,
               "iterations": self.iterations, "residual_norm": self.residual_norm}
        for name, v, s in zip(self.param_names, self.values, self.sigmas):
            out[name] = v
            out[f"{name}_sigma"] = s
        return out

    def report(self) -> str:
        lines = [f"model = {self.model}",
                 f"converged = {self.converged}",
                 f"iterations = {self.iterations}",
                 f"residual_norm = {self.residual_norm:.6e}"]
        for name, v, s in zip(self.param_names, self.values, self.sigmas):
            lines.append(f"{name} = {v:.9g} +- {s:.3g}")
        return "\n".join(lines)


def _as_xy(data: Union[Spectrum, tuple]):
    if isinstance(data, Spectrum):
        return data.axis, data.values
    x, y = data
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def auto_initial_guess(model: Model, data) -> np.ndarray:
    """Seed parameters from the deepest feature of the data.

    Offset from the edge medians, center from the extremum of |y - offset|,
    width from the half-extremum crossing distance, sign of q (for the
    asymmetric model) from which flank overshoots the offset more.
    """
    x, y = _as_xy(data)
    if x.size == 0:
        raise NoFeatureError("empty data")
    n_edge = max(1, x.size // 10)
    offset = float(np.median(np.concatenate([y[:n_edge], y[-n_edge:]])))
    dev = y - offset
    span = np.max(np.abs(dev))
    if span <= 1e-12 * max(1.0, abs(offset)):
        raise NoFeatureError("data has no spectral feature above numerical noise")
    i0 = int(np.argmax(np.abs(dev)))
    center = float(x[i0])
    amp = float(dev[i0])
    half = abs(amp) / 2.0
    left = i0
    while left > 0 and abs(dev[left]) > half:
        left -= 1
    right = i0
    while right < x.size - 1 and abs(dev[right]) > half:
        right += 1
    width = float(abs(x[right] - x[left]))
    if width <= 0:
        width = float(abs(x[-1] - x[0])) / 10.0
    if model.name == "lorentzian":
        return np.array([amp, center, width, offset])
    if model.name == "fano":
        left_over = np.max(np.sign(-amp) * dev[:i0], initial=0.0)
        right_over = np.max(np.sign(-amp) * dev[i0 + 1:], initial=0.0)
        q_sign = 1.0 if right_over >= left_over else -1.0
        # map dip depth to the q=0 profile: dip of A*q^2 ... use |amp| with sign
        return np.array([amp, q_sign * 0.5, center, width, offset])
    raise DomainError(f"no auto guess for model '{model.name}'")


def fit(
    model: Union[Model, str],
    data,
    initial_guess: Optional[np.ndarray] = None,
    max_iterations: int = MAX_ITERATIONS,
) -> FitResult:
    """Damped least squares on a lineshape model.

    Accepts a ``Spectrum`` or an (x, y) pair.  Steps that do not reduce the
    cost are rejected and the damping raised, so the residual norm never
    increases across accepted steps.  Raises ``DegenerateFitError`` when the
    normal matrix is singular; a result that hit the iteration cap is
    returned with ``converged=False``.
    """
    if isinstance(model, str):
        model = get_model(model)
    x, y = _as_xy(data)
    if x.size < 2 * model.n_params:
        raise DomainError(
            f"need at least {2 * model.n_params} points to fit "
            f"{model.n_params} parameters, got {x.size}"
        )
    if initial_guess is None:
        theta = auto_initial_guess(model, (x, y))
    else:
        theta = np.asarray(initial_guess, dtype=float).copy()
        if theta.size != model.n_params or not np.all(np.isfinite(theta)):
            raise DomainError("initial guess must be finite and match the model")

    def cost_of(th):
        r = model.func(x, th) - y
        return r, float(r @ r)

    r, cost = cost_of(theta)
    mu = 1e-3
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        j = model.jac(x, theta)
        a = j.T @ j
        g = j.T @ r
        diag = np.diag(a).copy()
        if not np.all(np.isfinite(a)) or np.any(diag <= 0):
            raise DegenerateFitError("normal matrix is singular or non-finite")
        accepted = False
        for _ in range(60):
            try:
                step = np.linalg.solve(a + mu * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                raise DegenerateFitError("normal matrix is singular")
            trial = theta + step
            r_t, cost_t = cost_of(trial)
            if np.isfinite(cost_t) and cost_t <= cost:
                rel_step = np.linalg.norm(step) / max(np.linalg.norm(theta), 1e-300)
                rel_decrease = (cost - cost_t) / max(cost, 1e-300)
                theta, r, cost = trial, r_t, cost_t
                mu = max(mu / 3.0, 1e-12)
                accepted = True
                if rel_step < STEP_TOL or rel_decrease < COST_TOL:
                    converged = True
                break
            mu *= 2.0
        if converged or not accepted:
            break

    j = model.jac(x, theta)
    a = j.T @ j
    dof = max(x.size - model.n_params, 1)
    s2 = cost / dof
    try:
        cov = s2 * np.linalg.inv(a)
    except np.linalg.LinAlgError:
        raise DegenerateFitError("normal matrix is singular at the solution")
    sigmas = np.sqrt(np.maximum(np.diag(cov), 0.0))
    return FitResult(
        model=model.name,
        values=theta,
        sigmas=sigmas,
        residual_norm=float(np.sqrt(cost)),
        converged=converged,
        iterations=iterations,
        param_names=model.param_names,
    )
