"""Weighted least-squares fits of circuit parameters to measured spectra.

Model variants: N = 1..4 independent Josephson harmonics, or a junction in
series with a stray inductance whose four effective harmonics are fixed
functions of (E_J, E_L).  The objective is the uncertainty-weighted sum of
squared residuals, minimized by multi-start Nelder-Mead with a fixed
jitter seed, so fits are deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .joint import build_joint_system
from .params import SCHEMA_VERSION, DeviceParams, ParameterError, TransmonParams
from .transmon import effective_harmonics_from_series_inductance, transmon_eigensystem

VARIANTS = ("n1", "n2", "n3", "n4", "series-l")
_PENALTY = 1e12
DEFAULT_FIT_NG = 0.25


@dataclass(frozen=True)
class MeasuredTransitions:
    """Consecutive transmon transitions plus conditional resonator lines.

    transitions[i] is omega_{i, i+1} in GHz; resonator[j] is the resonator
    frequency conditioned on transmon state j.  All with 1-sigma
    uncertainties in GHz.
    """

    transitions: tuple[float, ...]
    transition_sigmas: tuple[float, ...]
    resonator: tuple[float, float]
    resonator_sigmas: tuple[float, float]

    def __post_init__(self):
        if len(self.transitions) != len(self.transition_sigmas):
            raise ParameterError("transition/sigma length mismatch")
        sigmas = tuple(self.transition_sigmas) + tuple(self.resonator_sigmas)
        if any(s <= 0 for s in sigmas):
            raise ParameterError("uncertainties must be positive")

    @property
    def values(self) -> np.ndarray:
        return np.array(list(self.transitions) + list(self.resonator))

    @property
    def sigmas(self) -> np.ndarray:
        return np.array(list(self.transition_sigmas) + list(self.resonator_sigmas))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "transitions_ghz": list(self.transitions),
            "transition_sigmas_ghz": list(self.transition_sigmas),
            "resonator_ghz": list(self.resonator),
            "resonator_sigmas_ghz": list(self.resonator_sigmas),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MeasuredTransitions":
        return cls(
            transitions=tuple(d["transitions_ghz"]),
            transition_sigmas=tuple(d["transition_sigmas_ghz"]),
            resonator=tuple(d["resonator_ghz"]),
            resonator_sigmas=tuple(d["resonator_sigmas_ghz"]),
        )


@dataclass(frozen=True)
class FitResult:
    variant: str
    parameters: dict
    residuals: np.ndarray   # model - data at the fitted point, GHz
    objective: float
    start_objectives: tuple = field(repr=False, default=())

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "variant": self.variant,
            "parameters": self.parameters,
            "residuals_ghz": list(map(float, self.residuals)),
            "objective": self.objective,
        }


def model_transitions(e_c: float, e_j, omega_r: float, g: float,
                      n_transitions: int, n_g: float = DEFAULT_FIT_NG,
                      charge_cutoff: int = 40, joint_levels: int = 10,
                      resonator_cutoff: int = 4) -> np.ndarray:
    """Predicted observables for one parameter set.

    Returns [omega_{01} .. omega_{n-1,n}, omega_{r,0}, omega_{r,1}]:
    transmon transitions are dressed energy differences at zero resonator
    occupation, conditional resonator frequencies come from the same joint
    diagonalization.
    """
    device = DeviceParams(
        transmon=TransmonParams(e_c=e_c, e_j=tuple(e_j), n_g=n_g,
                                charge_cutoff=charge_cutoff,
                                kept_levels=max(joint_levels,
                                                n_transitions + 2)),
        omega_r=omega_r, g=g, resonator_cutoff=resonator_cutoff)
    system = build_joint_system(device)
    ladder = np.array([system.dressed_energy(i, 0)
                       for i in range(n_transitions + 1)])
    transitions = np.diff(ladder)
    omega_r0 = system.dressed_energy(0, 1) - system.dressed_energy(0, 0)
    omega_r1 = system.dressed_energy(1, 1) - system.dressed_energy(1, 0)
    return np.concatenate([transitions, [omega_r0, omega_r1]])


def _unpack(theta, variant):
    """Map an optimizer vector to (e_c, e_j, omega_r, g), or None if invalid."""
    if variant == "series-l":
        e_c, e_j, e_l, omega_r, g = theta
        if e_c <= 0 or e_j <= 0 or e_l <= 0 or omega_r <= 0:
            return None
        if e_j / e_l >= 0.999:
            return None
        harmonics = effective_harmonics_from_series_inductance(e_j, e_l)
        return e_c, tuple(harmonics), omega_r, g
    n = int(variant[1])
    e_c = theta[0]
    e_j = tuple(theta[1: 1 + n])
    omega_r, g = theta[1 + n], theta[2 + n]
    if e_c <= 0 or e_j[0] <= 0 or omega_r <= 0:
        return None
    return e_c, e_j, omega_r, g


def _objective(theta, variant, data: MeasuredTransitions):
    unpacked = _unpack(theta, variant)
    if unpacked is None:
        return _PENALTY
    e_c, e_j, omega_r, g = unpacked
    try:
        model = model_transitions(e_c, e_j, omega_r, g,
                                  n_transitions=len(data.transitions))
    except (ParameterError, np.linalg.LinAlgError):
        return _PENALTY
    r = (model - data.values) / data.sigmas
    return float(r @ r)


def _seed_vector(data: MeasuredTransitions, variant) -> np.ndarray:
    """Initial guess from omega_01, the anharmonicity, and the resonator."""
    w01 = data.transitions[0]
    alpha = data.transitions[1] - data.transitions[0] if len(data.transitions) > 1 else -0.15
    e_c0 = max(-alpha, 0.02)
    e_j0 = (w01 + e_c0) ** 2 / (8.0 * e_c0)
    omega_r0 = data.resonator[0]
    g0 = 0.05
    if variant == "series-l":
        # A stiff inductance reproduces the bare junction at leading order.
        return np.array([e_c0, e_j0, 20.0 * e_j0, omega_r0, g0])
    n = int(variant[1])
    higher = [-0.01 * e_j0, 6e-4 * e_j0, -1.6e-4 * e_j0][: n - 1]
    return np.array([e_c0, e_j0, *higher, omega_r0, g0])


def _fit(data: MeasuredTransitions, variant: str, n_starts: int = 8,
         jitter: float = 0.05, seed: int = 20240917,
         maxiter: int = 4000) -> FitResult:
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}")
    n_params = 5 if variant == "series-l" else 3 + int(variant[1])
    if len(data.values) < n_params:
        raise ParameterError("fewer data than free parameters")
    seed_vec = _seed_vector(data, variant)
    rng = np.random.default_rng(seed)
    starts = [seed_vec]
    for _ in range(n_starts - 1):
        starts.append(seed_vec * (1.0 + jitter * rng.uniform(-1, 1, len(seed_vec))))

    best = None
    start_objectives = []
    for theta0 in starts:
        res = minimize(_objective, theta0, args=(variant, data),
                       method="Nelder-Mead",
                       options={"maxiter": maxiter, "xatol": 1e-10,
                                "fatol": 1e-14, "adaptive": True})
        start_objectives.append(float(res.fun))
        if best is None or res.fun < best.fun:
            best = res
    if best is None or best.fun >= _PENALTY:
        raise RuntimeError(
            f"no start improved the objective (values: {start_objectives})")

    e_c, e_j, omega_r, g = _unpack(best.x, variant)
    model = model_transitions(e_c, e_j, omega_r, g,
                              n_transitions=len(data.transitions))
    parameters = {
        "e_c_ghz": float(e_c),
        "e_j_ghz": [float(e) for e in e_j],
        "omega_r_ghz": float(omega_r),
        "g_ghz": float(g),
        "n_g": DEFAULT_FIT_NG,
    }
    if variant == "series-l":
        parameters["e_j_junction_ghz"] = float(best.x[1])
        parameters["e_l_ghz"] = float(best.x[2])
    return FitResult(
        variant=variant,
        parameters=parameters,
        residuals=model - data.values,
        objective=float(best.fun),
        start_objectives=tuple(start_objectives),
    )


def fit_parameters(data: MeasuredTransitions, variant: str = "n4",
                   **kwargs) -> FitResult:
    """Fit an N-harmonic model (variant 'n1' .. 'n4')."""
    if variant == "series-l":
        raise ParameterError("use fit_series_inductance for the series-L model")
    return _fit(data, variant, **kwargs)


def fit_series_inductance(data: MeasuredTransitions, **kwargs) -> FitResult:
    """Fit the junction-plus-stray-inductance model."""
    return _fit(data, "series-l", **kwargs)


def load_measurements(path) -> MeasuredTransitions:
    with open(path) as fh:
        return MeasuredTransitions.from_dict(json.load(fh))
