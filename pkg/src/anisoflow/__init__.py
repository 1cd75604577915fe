"""Anisotropic curvature flow for graphs over convex plane domains, with
prescribed contact angle or prescribed boundary data, plus translating-profile
speed extraction and numerical certificates for the associated a-priori
estimates."""

from .anisotropy import (
    AnisotropySpec,
    BoundsReport,
    GammaConstants,
    MobilitySpec,
    check_curvature_condition,
    coefficient_matrix,
    estimate_constants,
    eval_F,
    gamma_constants,
    grad_F,
    hess_F,
    largest_admissible_tau,
)
from .errors import AssumptionError, BlowUpError, ConfigError, InvalidAnisotropyError

__version__ = "0.1.0"
