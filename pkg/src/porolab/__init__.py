"""Power-series diffusion toolkit.

Classifies and approximates solutions of the degenerate elliptic problem
-sum_m div(a_m A(x) grad u^m) = lambda f on intervals and rectangles: radius
and boundary-sum diagnostics for the coefficient series, certified
existence/nonexistence thresholds, the constructive scheme u_n = Q_n^{-1}(v),
and flat-zone detection.
"""

from .errors import (
    BoundaryViolation,
    ConfigError,
    DegenerateWeight,
    DomainError,
    EllipticityError,
    InvalidSequence,
    InvalidWeight,
    NoConvergence,
    PorolabError,
)
from .params import Tolerances
from .series import (
    CoefficientSequence,
    KStatus,
    SeriesProfile,
    boundary_sum,
    custom,
    geometric,
    harmonic,
    log_kind,
    make_sequence,
    power_law,
    profile,
    q_derivative,
    q_full,
    q_partial,
    q_partial_inverse,
    radius_of_convergence,
)
from .elliptic import (
    CoefficientField,
    EllipticProblem,
    Grid,
    GridFunction,
    SparseOperator,
    assemble_operator,
    build_grid,
    constant_field,
    h1_seminorm,
    measure_above,
    ramp_field,
    read_gridfunction_csv,
    solve_linear,
    sup_norm,
    write_gridfunction_csv,
)
from .spectral import EigenPair, principal_eigenpair, rayleigh_quotient
from .analysis import (
    DiagnosisReport,
    SweepResult,
    classify,
    diagnose,
    lambda_sweep,
    report_to_dict,
    report_to_json,
)
from .pipeline import (
    ApproximationRun,
    DecayTable,
    FlatZoneResult,
    approximate_solution,
    auxiliary_solution,
    converge,
    default_test_set,
    flat_zone,
    history_csv,
    tail_decay_check,
    weak_residual,
)
from .config import ExperimentConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "PorolabError",
    "InvalidSequence",
    "NoConvergence",
    "DomainError",
    "ConfigError",
    "EllipticityError",
    "InvalidWeight",
    "DegenerateWeight",
    "BoundaryViolation",
    "Tolerances",
    "CoefficientSequence",
    "SeriesProfile",
    "KStatus",
    "harmonic",
    "log_kind",
    "geometric",
    "power_law",
    "custom",
    "make_sequence",
    "radius_of_convergence",
    "boundary_sum",
    "profile",
    "q_partial",
    "q_partial_inverse",
    "q_full",
    "q_derivative",
    "Grid",
    "CoefficientField",
    "GridFunction",
    "EllipticProblem",
    "SparseOperator",
    "build_grid",
    "constant_field",
    "ramp_field",
    "assemble_operator",
    "solve_linear",
    "sup_norm",
    "h1_seminorm",
    "measure_above",
    "write_gridfunction_csv",
    "read_gridfunction_csv",
    "EigenPair",
    "principal_eigenpair",
    "rayleigh_quotient",
    "DiagnosisReport",
    "SweepResult",
    "diagnose",
    "classify",
    "lambda_sweep",
    "report_to_dict",
    "report_to_json",
    "ApproximationRun",
    "FlatZoneResult",
    "DecayTable",
    "auxiliary_solution",
    "approximate_solution",
    "converge",
    "weak_residual",
    "default_test_set",
    "flat_zone",
    "tail_decay_check",
    "history_csv",
    "ExperimentConfig",
    "load_config",
]
