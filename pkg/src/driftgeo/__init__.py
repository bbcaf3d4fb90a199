"""Numerical checks for weighted manifolds with boundary.

Chart-based finite differences for the drift Laplacian, weighted Reilly
identity verification, Heintze-Karcher / Minkowski / eigenvalue-bound
audits, almost-Schur inequalities on closed manifolds and embedded
hypersurfaces, and a scenario CLI.
"""

from .audits import (
    AuditReport,
    Hypothesis,
    audit_eigen_bounds,
    audit_heintze_karcher,
    audit_minkowski,
    schur_constant,
)
from .boundary import BoundaryGeometry, boundary_geometry, hypothesis_constants
from .calculus import bakry_emery, hat_ric, ricci, scalar_curvature
from .catalog import CATALOG, make
from .chart import (
    ChartManifold,
    Face,
    MetricField,
    ParamDomain,
    ScalarField,
    TensorField,
    build_chart_manifold,
)
from .errors import DriftgeoError, ParseError
from .expr import Expression
from .expr import parse as parse_expression
from .hypersurface import (
    HYPERSURFACES,
    EmbeddedHypersurface,
    audit_almost_schur,
    elementary_symmetric,
    embed_and_curvatures,
    make_hypersurface,
    newton_transforms,
)
from .integrate import (
    convergence_order,
    integrate_boundary,
    integrate_weighted_volume,
    quadrature_weights,
)
from .reilly import (
    CorollaryGap,
    ReillyBreakdown,
    corollary_gap,
    reilly_term_breakdown,
)
from .spectral import (
    EigResult,
    eigen_boundary_weighted,
    eigen_closed,
    eigen_steklov,
    eigen_wentzell,
    solve_dirichlet_unit,
    solve_neumann_const,
)

__version__ = "0.1.0"

__all__ = [
    "AuditReport",
    "BoundaryGeometry",
    "CATALOG",
    "ChartManifold",
    "CorollaryGap",
    "DriftgeoError",
    "EigResult",
    "EmbeddedHypersurface",
    "Expression",
    "Face",
    "HYPERSURFACES",
    "Hypothesis",
    "MetricField",
    "ParamDomain",
    "ParseError",
    "ReillyBreakdown",
    "ScalarField",
    "TensorField",
    "audit_almost_schur",
    "audit_eigen_bounds",
    "audit_heintze_karcher",
    "audit_minkowski",
    "bakry_emery",
    "boundary_geometry",
    "build_chart_manifold",
    "convergence_order",
    "corollary_gap",
    "eigen_boundary_weighted",
    "eigen_closed",
    "eigen_steklov",
    "eigen_wentzell",
    "elementary_symmetric",
    "embed_and_curvatures",
    "hat_ric",
    "hypothesis_constants",
    "integrate_boundary",
    "integrate_weighted_volume",
    "make",
    "make_hypersurface",
    "newton_transforms",
    "parse_expression",
    "quadrature_weights",
    "reilly_term_breakdown",
    "ricci",
    "scalar_curvature",
    "schur_constant",
    "solve_dirichlet_unit",
    "solve_neumann_const",
    "__version__",
]
