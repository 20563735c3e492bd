"""Chart-based numerical analysis of foliations and rational maps."""

from .deform import DeformationReport, track_deformation
from .local import chart_form, kupka_test, ngk_test
from .maps import (
    IndeterminacySet,
    critical_point_search,
    fiber_points,
    generic_pair_check,
    genericity_check,
    indeterminacy_locus,
)
from .singular import (
    ChartField,
    SingularPointRecord,
    SolverConfig,
    chart_field,
    classify_hyperbolic,
    isolated_zero_at_origin,
    solve_singularities,
)

__all__ = [
    "ChartField",
    "DeformationReport",
    "IndeterminacySet",
    "SingularPointRecord",
    "SolverConfig",
    "chart_field",
    "chart_form",
    "classify_hyperbolic",
    "critical_point_search",
    "fiber_points",
    "generic_pair_check",
    "genericity_check",
    "indeterminacy_locus",
    "isolated_zero_at_origin",
    "kupka_test",
    "ngk_test",
    "solve_singularities",
    "track_deformation",
]
