"""Driven-transmon ionization toolkit.

Static circuit models, drive pulses, time-domain propagation, Floquet
branch tracking, ionization-threshold extraction, a classical rotor
companion model, spectrum fitting, and a sweep CLI.
"""

__version__ = "1.0.0"

from .params import (  # noqa: F401
    DeviceParams,
    ParameterError,
    TransmonParams,
    fitted_device,
    fitted_transmon,
)
from .pulse import DrivePulse  # noqa: F401
