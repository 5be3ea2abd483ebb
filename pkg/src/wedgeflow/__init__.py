"""Numerical solvers and structural certificates for minimal surfaces with
thin obstacles: constrained harmonic and minimal-graph solvers on regular
grids, exact planar minimizers, barrier certificates, and blow-up /
monotonicity / closeness-improvement diagnostics."""

from .analysis import (
    BlowupReport,
    ExperimentParams,
    ImprovementReport,
    MonotonicityProfile,
    blowup_sequence,
    improvement_report,
    monotonicity_profile,
    trace_length_in_ball,
    vertical_rescale,
)
from .barriers import (
    BETA_CAP_FACTOR,
    BarrierReport,
    DichotomyResult,
    barrier_certificate,
    barrier_phi,
    certify_dichotomy,
    dichotomy,
    verify_supersolution,
)
from .data import FAMILIES, make_field, u_three_halves, wedge_profile
from .errors import ConfigError, GridError, RangeError, SolverError, TheoremViolation
from .flatland import (
    DeltaLimitReport,
    PlanarConfig,
    PlanarSet,
    cone_check,
    degiorgi_perimeter,
    delta_limit,
    point_in_region,
    random_config,
    sample_boundary,
    taut_minimizer,
)
from .geometry import (
    ClosenessReport,
    Wedge,
    boundary_defect,
    closeness,
    fit_wedge,
    sharp_wedge,
    unit_direction,
    wedge_contains,
    wedge_signed_distance,
)
from .grid import (
    Field,
    GridSpec,
    area_energy,
    area_energy_gradient,
    discrete_laplacian,
    dump_field_csv,
    load_field_csv,
    mean_curvature,
    quasilinear_form,
    subgraph_perimeter_in_ball,
)
from .minimal_graph import (
    GraphProblem,
    GraphSolveInfo,
    ViscosityReport,
    kkt_residual,
    solve_min_graph,
    viscosity_check,
    wedge_instance,
)
from .signorini import (
    ComplementarityReport,
    ExponentFit,
    SignoriniProblem,
    SolveInfo,
    brute_force_signorini,
    complementarity_report,
    contact_set,
    dirichlet_energy,
    exponent_fit,
    free_boundary,
    solve_signorini,
)

__version__ = "0.1.0"

__all__ = [
    "BETA_CAP_FACTOR",
    "BarrierReport",
    "BlowupReport",
    "ClosenessReport",
    "ComplementarityReport",
    "ConfigError",
    "DeltaLimitReport",
    "DichotomyResult",
    "ExperimentParams",
    "ExponentFit",
    "FAMILIES",
    "Field",
    "GraphProblem",
    "GraphSolveInfo",
    "GridError",
    "GridSpec",
    "ImprovementReport",
    "MonotonicityProfile",
    "PlanarConfig",
    "PlanarSet",
    "RangeError",
    "SignoriniProblem",
    "SolveInfo",
    "SolverError",
    "TheoremViolation",
    "ViscosityReport",
    "Wedge",
    "area_energy",
    "area_energy_gradient",
    "barrier_certificate",
    "barrier_phi",
    "blowup_sequence",
    "boundary_defect",
    "brute_force_signorini",
    "certify_dichotomy",
    "closeness",
    "complementarity_report",
    "cone_check",
    "contact_set",
    "degiorgi_perimeter",
    "delta_limit",
    "dichotomy",
    "dirichlet_energy",
    "discrete_laplacian",
    "dump_field_csv",
    "exponent_fit",
    "fit_wedge",
    "free_boundary",
    "improvement_report",
    "kkt_residual",
    "load_field_csv",
    "make_field",
    "mean_curvature",
    "monotonicity_profile",
    "point_in_region",
    "quasilinear_form",
    "random_config",
    "sample_boundary",
    "sharp_wedge",
    "solve_min_graph",
    "solve_signorini",
    "subgraph_perimeter_in_ball",
    "taut_minimizer",
    "trace_length_in_ball",
    "u_three_halves",
    "unit_direction",
    "vertical_rescale",
    "verify_supersolution",
    "viscosity_check",
    "wedge_contains",
    "wedge_instance",
    "wedge_profile",
    "wedge_signed_distance",
]
