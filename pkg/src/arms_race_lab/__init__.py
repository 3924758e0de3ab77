"""Numerical engine for an attacker-defender security contest with AI-amplified attacks."""

__version__ = "0.1.0"

from .contest import (  # noqa: E402
    AmplificationFamily,
    AmplificationSpec,
    ErosionFamily,
    ErosionSpec,
    ModelParams,
    breach_probability,
)
from .equilibrium import solve_equilibrium  # noqa: E402
from .multisurface import SurfaceConfig  # noqa: E402
from .ratio import r0_multi, r0_single, r_general  # noqa: E402

__all__ = [
    "__version__",
    "AmplificationFamily",
    "AmplificationSpec",
    "ErosionFamily",
    "ErosionSpec",
    "ModelParams",
    "SurfaceConfig",
    "breach_probability",
    "r0_multi",
    "r0_single",
    "r_general",
    "solve_equilibrium",
]
