"""Continued fractions, BCZ maps and Farey/Gauss interval maps for Hecke triangle groups G_q."""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import EPS, FieldElement, HeckeField, Mat2, Vec2, field, lam, lambda_float, minimal_poly
from .bcz import TrianglePoint, bcz_batch, bcz_map, bcz_orbit, first_return_oracle, partition_index, roof
from .cfrac import CfStep, Itinerary, cf_itinerary, cf_itinerary_mp, cf_step
from .errors import BoundsExhausted, ClassificationError, ConsistencyError, DomainError, FixedPointError
from .hecke import HeckeContext, enumerate_lambda_q, identity_suite, make_context, sector_of
from .intervalmaps import (
    farey,
    farey_derivative,
    farey_ext_step,
    gauss,
    gauss_density,
    gauss_ext_step,
    gauss_mass,
    geodesic_code,
    in_R,
    inverse_branch,
)
from .suspension import PairedPoint, SuspensionCoord, in_S, phi, phi_inverse, polygon_contains, side_map_V_to_H

__all__ = [
    "__version__",
    "EPS",
    "FieldElement",
    "HeckeField",
    "Mat2",
    "Vec2",
    "field",
    "lam",
    "lambda_float",
    "minimal_poly",
    "TrianglePoint",
    "bcz_batch",
    "bcz_map",
    "bcz_orbit",
    "first_return_oracle",
    "partition_index",
    "roof",
    "CfStep",
    "Itinerary",
    "cf_itinerary",
    "cf_itinerary_mp",
    "cf_step",
    "BoundsExhausted",
    "ClassificationError",
    "ConsistencyError",
    "DomainError",
    "FixedPointError",
    "HeckeContext",
    "enumerate_lambda_q",
    "identity_suite",
    "make_context",
    "sector_of",
    "farey",
    "farey_derivative",
    "farey_ext_step",
    "gauss",
    "gauss_density",
    "gauss_ext_step",
    "gauss_mass",
    "geodesic_code",
    "in_R",
    "inverse_branch",
    "PairedPoint",
    "SuspensionCoord",
    "in_S",
    "phi",
    "phi_inverse",
    "polygon_contains",
    "side_map_V_to_H",
]
