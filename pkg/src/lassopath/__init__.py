"""Exact and approximate Lasso regularization paths."""

from .adversarial import (
    expected_pattern_sequence,
    extend_instance,
    gen_pathological,
    pathological_path,
    worst_case_segments,
)
from .approx import (
    ApproxOptions,
    compute_approx_path,
    evaluate_path,
    sampled_exact_path,
    segment_bound,
    theta,
)
from .cd import CdOptions, cd_solve, cd_solve_grid, soft_threshold
from .exceptions import (
    DegenerateColumn,
    DimensionError,
    InfeasibleDual,
    InvalidEpsilon,
    InvalidInstance,
    InvalidPath,
    InvalidSequence,
    LassoPathError,
    MaxKinksExceeded,
    MaxSweepsExceeded,
    OutOfRange,
    ParseError,
    PrecisionExhausted,
    SimultaneousEventsWarning,
    SingularError,
    TruncatedPath,
)
from .homotopy import (
    HomotopyOptions,
    PathEvent,
    compute_exact_path,
    interpolate,
    next_event,
    path_direction,
)
from .io import emit_plot_data, ingest, read_instance, read_path, write_instance, write_path
from .linalg import GramSystem, build_gram, gram_solve
from .model import (
    Certificate,
    Kink,
    OptimalityReport,
    ProblemInstance,
    RegularizationPath,
    check_exact_optimality,
    check_opt_condition,
    correlations,
    dual_from_primal,
    dual_objective,
    duality_gap,
    gap_bound_factor,
    objective,
    sign_pattern,
)
from .verify import (
    VerificationReport,
    check_structural_bounds,
    count_segments,
    grid_oracle,
    verify_path,
)

__version__ = "0.1.0"
