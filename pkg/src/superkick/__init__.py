"""Transverse kick of a Gaussian wave packet scattered on a Bessel twisted beam.

A Bessel beam with winding number m collides head-on with a Gaussian packet
displaced by an impact parameter b.  The package evaluates the expectation
value of the final transverse momentum, which approaches the semiclassical
"superkick" m/b for a sharply focused packet and is suppressed once the
packet waist becomes comparable to b.
"""

from .amplitudes import i_squared_exact, j_closed_form, j_integral
from .estimators import ExactIntensityTransformer, TransverseKickEstimator
from .exceptions import ConvergenceError, DomainError, ParaxialityWarning, RegionError, SingularWeightError
from .kinematics import (
    BesselBeam,
    GaussianPacket,
    MomentumPoint,
    crescent_bounds,
    kallen,
    phi_star,
    two_body_solutions,
)
from .observables import (
    KickResult,
    average_transverse_momentum,
    denom_closed_form,
    heatmap_i_squared,
    num_closed_form,
    scan_kick_vs_b,
    superkick_limit,
)
from .specfun import bessel_i_complex, bessel_j

__version__ = "0.1.0"

__all__ = [
    "BesselBeam",
    "GaussianPacket",
    "MomentumPoint",
    "KickResult",
    "TransverseKickEstimator",
    "ExactIntensityTransformer",
    "average_transverse_momentum",
    "scan_kick_vs_b",
    "heatmap_i_squared",
    "superkick_limit",
    "denom_closed_form",
    "num_closed_form",
    "i_squared_exact",
    "j_integral",
    "j_closed_form",
    "kallen",
    "two_body_solutions",
    "crescent_bounds",
    "phi_star",
    "bessel_j",
    "bessel_i_complex",
    "DomainError",
    "RegionError",
    "SingularWeightError",
    "ConvergenceError",
    "ParaxialityWarning",
]
