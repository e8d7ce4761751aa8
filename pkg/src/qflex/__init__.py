"""Flexes and hyperflexes of smooth plane quartics, with the two-parameter
Kuribayashi family as the worked application."""
from .errors import QFlexError
from .flexlab import FlexRecord, classify_flexes, contact_order, hessian
from .kuribayashi import FamilyParams, build_curve, predicted_classification, verify_family_instance
from .polycore import DEFAULT_TOL, TriPoly, Tolerances, UniPoly
from .projgroup import OrbitSignature, ProjGroup, ProjMap, close_group
from .rootsolve import ProjPoint, roots_with_multiplicity

__all__ = [
    "DEFAULT_TOL",
    "FamilyParams",
    "FlexRecord",
    "OrbitSignature",
    "ProjGroup",
    "ProjMap",
    "ProjPoint",
    "QFlexError",
    "Tolerances",
    "TriPoly",
    "UniPoly",
    "build_curve",
    "classify_flexes",
    "close_group",
    "contact_order",
    "hessian",
    "predicted_classification",
    "roots_with_multiplicity",
    "verify_family_instance",
]
