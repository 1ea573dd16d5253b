"""Parameter records and their JSON serialization.

Conventions used throughout the package: frequencies are ordinary
frequencies in GHz (omega / 2 pi), times are in ns.  The factor of 2 pi is
applied once, inside time propagation.  JSON keys carry explicit unit
suffixes and every document records ``schema_version``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

SCHEMA_VERSION = 1

# Reference fitted device set (four Josephson harmonics).  Quoted coupling
# values round to 60 MHz at the precision kept here.  The fitted set is
# the default; both appear in tests.
FITTED_E_C = 0.1496
FITTED_E_J = (14.0286, -0.1425, 0.0084, -0.0023)
FITTED_OMEGA_R = 6.4043
FITTED_G = 0.060


class ParameterError(ValueError):
    """Raised when a parameter record violates its invariants."""


@dataclass(frozen=True)
class TransmonParams:
    """Charge-basis transmon with up to four Josephson harmonics.

    e_c: charging energy E_C/2pi in GHz.
    e_j: 1..4 harmonic energies E_Jm/2pi in GHz, sign-carrying.
    n_g: dimensionless offset charge.
    charge_cutoff: charge basis spans n = -N_c .. N_c.
    kept_levels: eigenstates retained after diagonalization.
    """

    e_c: float
    e_j: tuple[float, ...]
    n_g: float = 0.0
    charge_cutoff: int = 40
    kept_levels: int = 30

    def __post_init__(self):
        object.__setattr__(self, "e_j", tuple(float(e) for e in self.e_j))
        if self.e_c <= 0:
            raise ParameterError("e_c must be positive")
        if not 1 <= len(self.e_j) <= 4:
            raise ParameterError("e_j must hold 1 to 4 harmonic energies")
        if self.e_j[0] <= 0:
            raise ParameterError("fundamental Josephson energy must be positive")
        if self.charge_cutoff < 1:
            raise ParameterError("charge_cutoff must be a positive integer")
        if not 1 <= self.kept_levels <= 2 * self.charge_cutoff + 1:
            raise ParameterError("kept_levels must not exceed the basis size")
        if len(self.e_j) > 2 * self.charge_cutoff:
            raise ParameterError(
                "charge_cutoff too small for harmonic order "
                f"{len(self.e_j)} (need m <= 2*N_c)"
            )

    @property
    def dim(self) -> int:
        return 2 * self.charge_cutoff + 1

    def with_ng(self, n_g: float) -> "TransmonParams":
        return replace(self, n_g=float(n_g))

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "e_c_ghz": self.e_c,
            "e_j_ghz": list(self.e_j),
            "n_g": self.n_g,
            "charge_cutoff": self.charge_cutoff,
            "kept_levels": self.kept_levels,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TransmonParams":
        return cls(
            e_c=d["e_c_ghz"],
            e_j=tuple(d["e_j_ghz"]),
            n_g=d.get("n_g", 0.0),
            charge_cutoff=d.get("charge_cutoff", 40),
            kept_levels=d.get("kept_levels", 30),
        )


@dataclass(frozen=True)
class DeviceParams:
    """Transmon dispersively coupled to a readout resonator."""

    transmon: TransmonParams
    omega_r: float
    g: float
    resonator_cutoff: int = 6

    def __post_init__(self):
        if self.omega_r <= 0:
            raise ParameterError("omega_r must be positive")
        if self.resonator_cutoff < 2:
            raise ParameterError("resonator_cutoff must be at least 2")

    @property
    def dim(self) -> int:
        return self.transmon.kept_levels * self.resonator_cutoff

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "transmon": self.transmon.to_dict(),
            "omega_r_ghz": self.omega_r,
            "g_ghz": self.g,
            "resonator_cutoff": self.resonator_cutoff,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviceParams":
        return cls(
            transmon=TransmonParams.from_dict(d["transmon"]),
            omega_r=d["omega_r_ghz"],
            g=d["g_ghz"],
            resonator_cutoff=d.get("resonator_cutoff", 6),
        )


def fitted_transmon(n_g: float = 0.0, charge_cutoff: int = 40,
                    kept_levels: int = 30) -> TransmonParams:
    """Reference fitted four-harmonic transmon parameters."""
    return TransmonParams(
        e_c=FITTED_E_C,
        e_j=FITTED_E_J,
        n_g=n_g,
        charge_cutoff=charge_cutoff,
        kept_levels=kept_levels,
    )


def fitted_device(n_g: float = 0.0, kept_levels: int = 20,
                  resonator_cutoff: int = 6) -> DeviceParams:
    """Reference fitted transmon-resonator device."""
    return DeviceParams(
        transmon=fitted_transmon(n_g=n_g, kept_levels=kept_levels),
        omega_r=FITTED_OMEGA_R,
        g=FITTED_G,
        resonator_cutoff=resonator_cutoff,
    )


def dumps(record) -> str:
    return json.dumps(record.to_dict(), indent=2, sort_keys=True)


def loads(text: str, cls):
    return cls.from_dict(json.loads(text))
