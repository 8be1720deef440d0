"""Numerical verification toolkit for semilinear wave equations with space-dependent damping.

Solves u_tt - Lap u + a(x) u_t + |u|^{p-1} u = 0 for radial data, builds the
weighted energies used in its decay analysis, and classifies the predicted
decay rates.
"""

from .errors import (
    BlowupError,
    CaseIRangeError,
    ConfigError,
    ConstructionFailure,
    DampwaveError,
    DivergenceWarning,
    DomainError,
    ParseError,
    PoleError,
    ProfileUnsupported,
    SupportError,
    ValidationError,
    WindowError,
)
from .model import CompactBump, ExteriorBall, InitialData, ModelParams, PolyDecay, RadialGrid, WholeSpace, Zero

__version__ = "0.1.0"
