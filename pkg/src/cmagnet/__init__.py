"""Normal magnetic curves of the contact magnetic field on the flat C-manifold."""

__version__ = "0.1.0"

from .manifold_core import (IdentityReport, StructureDims, eta, fundamental_two_form,
                            metric, phi_apply, verify_structure, xi)
from .trajectory import (MagneticCurveParams, SampledCurve, SlantProfile, closed_form,
                         integrate, lorentz_rhs, params_from_initial_conditions)
from .frenet import (Classification, CurveCase, FrenetApparatus, Tolerances,
                     charge_candidates_for_helix, classify, derivatives_numeric,
                     frenet_apparatus, predicted_curvatures, slant_profile_estimate,
                     verify_frame_identities)

__all__ = [
    "StructureDims", "IdentityReport", "phi_apply", "eta", "metric", "xi",
    "fundamental_two_form", "verify_structure",
    "SlantProfile", "MagneticCurveParams", "SampledCurve", "lorentz_rhs", "integrate",
    "closed_form", "params_from_initial_conditions",
    "Tolerances", "CurveCase", "FrenetApparatus", "Classification", "derivatives_numeric",
    "frenet_apparatus", "slant_profile_estimate", "predicted_curvatures",
    "verify_frame_identities", "classify", "charge_candidates_for_helix",
]
