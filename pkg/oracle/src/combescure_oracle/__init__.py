"""Exact symbolic cross-checks for the combescure package's algebra."""

from .checks import (
    CheckFailed,
    degenerate_x2,
    system_poly,
    truncated_fallback_residual,
    verify_determinant_factorization,
    verify_family_i,
    verify_family_ii,
    verify_proportionality_system,
    verify_resultant,
)

__version__ = "0.1.0"

__all__ = [
    "CheckFailed",
    "degenerate_x2",
    "system_poly",
    "truncated_fallback_residual",
    "verify_determinant_factorization",
    "verify_family_i",
    "verify_family_ii",
    "verify_proportionality_system",
    "verify_resultant",
]
