"""Hadamard finite-part integrals and corrected Stieltjes-transform expansions."""

from .contour import Contour, QuadResult, adaptive_quad, enclosed_poles, integrate_contour, quad_power_weight, real_quad
from .errors import (
    ContourHitsSingularity,
    DegenerateBranch,
    ExpansionInvalid,
    FinpartError,
    GammaPole,
    InvalidContour,
    NotDivergent,
    PoleOnContour,
    QuadratureFailure,
    TailDivergent,
    UnknownFunction,
)
from .finite_part import (
    Divergence,
    FpiProblem,
    FpiResult,
    fpi_contour,
    fpi_contour_branch,
    fpi_contour_pole,
    fpi_epsilon_limit,
    fpi_limit,
    fpi_limit_at_infinity,
    fpi_limit_branch,
    fpi_limit_pole,
    fpi_monomial_closed,
)
from .functions import AnalyticFunction, BranchSpec, cauchy_taylor, make_builtin, user_function
from .reference import (
    SeriesExpansion,
    SeriesTerm,
    canonical_branch_integral,
    canonical_infinity,
    digamma,
    e1_expansion,
    fpi_exp_branch_infinite,
    fpi_exp_pole_infinite,
    gamma_digamma,
    igamma_expansion,
)
from .stieltjes import (
    ExpansionResult,
    StieltjesProblem,
    expand_origin,
    expand_origin_branch,
    expand_origin_pole,
    max_modulus,
    naive_vs_corrected,
    pole_exclusion_audit,
    remainder_bounds,
    stieltjes_direct,
)

__version__ = "0.1.0"
