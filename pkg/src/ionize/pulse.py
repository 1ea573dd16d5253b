"""Drive waveform: tanh-box envelope times a sinusoidal carrier."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SCHEMA_VERSION, ParameterError


@dataclass(frozen=True)
class DrivePulse:
    """Flat-top pulse with tanh edges.

    eps_d: peak amplitude eps_d/2pi, GHz.
    omega_d: carrier frequency omega_d/2pi, GHz.
    t_f: total duration, ns.
    t_ramp: edge rise time (floor level to 95%), ns.
    c1: dimensionless edge floor constant.
    """

    eps_d: float
    omega_d: float
    t_f: float
    t_ramp: float
    c1: float = 0.01

    def __post_init__(self):
        if self.eps_d < 0:
            raise ParameterError("eps_d must be nonnegative")
        if not 0 < self.t_ramp <= self.t_f / 2:
            raise ParameterError("t_ramp must lie in (0, t_f/2]")
        if not 0 < self.c1 < 0.5:
            raise ParameterError("c1 must lie in (0, 0.5)")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "eps_d_ghz": self.eps_d,
            "omega_d_ghz": self.omega_d,
            "t_f_ns": self.t_f,
            "t_ramp_ns": self.t_ramp,
            "c1": self.c1,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DrivePulse":
        return cls(
            eps_d=d["eps_d_ghz"],
            omega_d=d["omega_d_ghz"],
            t_f=d["t_f_ns"],
            t_ramp=d["t_ramp_ns"],
            c1=d.get("c1", 0.01),
        )


def _edge_constants(pulse: DrivePulse):
    c0 = np.arctanh(2.0 * pulse.c1 - 1.0)
    k = (np.arctanh(2.0 * 0.95 - 1.0) - c0) / pulse.t_ramp
    return c0, k


def envelope(t, pulse: DrivePulse):
    """Normalized tanh-box envelope, clamped to [0, 1].

    lambda(t) = { [tanh(k t + c0) - tanh(k (t - t_f) - c0)]/2 - c1 } / (1 - c1)
    with c0 = atanh(2 c1 - 1) and k set so the edge rises from the c1 floor
    to 95% over t_ramp.  Vanishes at t = 0 and t = t_f, plateau value 1.
    """
    c0, k = _edge_constants(pulse)
    t = np.asarray(t, dtype=float)
    raw = 0.5 * (np.tanh(k * t + c0) - np.tanh(k * (t - pulse.t_f) - c0))
    lam = (raw - pulse.c1) / (1.0 - pulse.c1)
    return np.clip(lam, 0.0, 1.0)[()]


def envelope_printed_formula(t, pulse: DrivePulse):
    """Literal transcription of the published envelope formula.

    Kept as a compatibility mode for side-by-side comparison: it uses
    arctan in the constants and a -c0/2 offset, which leaves the envelope
    unnormalized at the boundaries.  Not used by the propagators.
    """
    c0 = np.arctan(2.0 * pulse.c1 - 1.0)
    k = (np.arctan(2.0 * 0.95 - 1.0) - c0) / pulse.t_ramp
    t = np.asarray(t, dtype=float)
    raw = 0.5 * np.tanh(k * t + c0) - 0.5 * np.tanh(k * (t - pulse.t_f))
    return ((raw - 0.5 * c0 - pulse.c1) / (1.0 - pulse.c1))[()]


def drive_value(t, pulse: DrivePulse):
    """eps_d(t) sin(omega_d t) in GHz: envelope times carrier."""
    t = np.asarray(t, dtype=float)
    return (pulse.eps_d * envelope(t, pulse)
            * np.sin(2.0 * np.pi * pulse.omega_d * t))[()]
