"""Numerical seminorms, maximal functions and interpolation-inequality checks
for BMO and Sobolev seminorms on convex domains."""

from .field import ScalarField, builtin_corpus, corpus_field
from .geometry import ConvexDomain, ball_intersection_measure, contains, diameter, kappa, parse_domain
from .quadrature import NodeSet, QuadResult, QuadratureError, adaptive_integral_1d, domain_nodes
from .seminorms import (
    BallRegion,
    ExponentError,
    Exponents,
    SeminormValue,
    ball_average_deviation,
    bmo_seminorm,
    gagliardo_p_power,
    lp_gradient_norm_q,
    maximal_function,
    oscillation_pair_average,
    sharp_maximal,
)

__version__ = "0.1.0"

__all__ = [
    "BallRegion", "ConvexDomain", "ExponentError", "Exponents", "NodeSet", "QuadResult",
    "QuadratureError", "ScalarField", "SeminormValue", "adaptive_integral_1d",
    "ball_average_deviation", "ball_intersection_measure", "bmo_seminorm", "builtin_corpus",
    "contains", "corpus_field", "diameter", "domain_nodes", "gagliardo_p_power", "kappa",
    "lp_gradient_norm_q", "maximal_function", "oscillation_pair_average", "parse_domain",
    "sharp_maximal",
]
