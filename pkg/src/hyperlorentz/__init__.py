"""Numerical verification of sharp Poincare and Poincare-Sobolev inequalities
in higher-order Lorentz-Sobolev spaces on hyperbolic space H^n."""

__version__ = "0.1.0"

from .constants import (  # noqa: E402
    ExponentSet,
    conjugate,
    lorentz_sobolev_constant_lq,
    poincare_constant,
    sobolev_constant,
    sobolev_exponent,
)
from .errors import DomainError, HyperLorentzError, NumericalError, PreconditionError, UnsupportedError  # noqa: E402
from .geometry import SpaceParams, ball_volume, inverse_volume, log_sinh_F, phi, phi_limit, unit_ball_volume  # noqa: E402
from .kernels import apply_T, majorant_v  # noqa: E402
from .profiles import Profile, PowerSum, lorentz_integral, lorentz_quasinorm, maximal, step_profile  # noqa: E402
from .radial import RadialFunction, bump, nabla_m_norm, plateau, rearrange  # noqa: E402
from .sharpness import choose_a, fR_lorentz_identity, make_fR, run_sharpness, sharpness_ratio  # noqa: E402
from .verifier import REGISTRY, InequalityReport, SweepSpec, sweep  # noqa: E402

__all__ = [
    "__version__",
    "ExponentSet",
    "conjugate",
    "lorentz_sobolev_constant_lq",
    "poincare_constant",
    "sobolev_constant",
    "sobolev_exponent",
    "DomainError",
    "HyperLorentzError",
    "NumericalError",
    "PreconditionError",
    "UnsupportedError",
    "SpaceParams",
    "ball_volume",
    "inverse_volume",
    "log_sinh_F",
    "phi",
    "phi_limit",
    "unit_ball_volume",
    "apply_T",
    "majorant_v",
    "Profile",
    "PowerSum",
    "lorentz_integral",
    "lorentz_quasinorm",
    "maximal",
    "step_profile",
    "RadialFunction",
    "bump",
    "nabla_m_norm",
    "plateau",
    "rearrange",
    "choose_a",
    "fR_lorentz_identity",
    "make_fR",
    "run_sharpness",
    "sharpness_ratio",
    "REGISTRY",
    "InequalityReport",
    "SweepSpec",
    "sweep",
]
