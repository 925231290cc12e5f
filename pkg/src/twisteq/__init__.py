"""Mellin-transform machinery for the twisted equation (X+m)f = g on L²(R⁺, dr/r).

The package represents half-line functions on a uniform grid in x = -log r,
computes vertical-line Mellin transforms by FFT, evaluates the obstruction
functional D(g) = M(g, -m), solves the twisted equation by spectral division
and by the semigroup resolvent, and verifies the norm estimates the two
constructions must satisfy.
"""

from .cocycle import (
    CartanReduction,
    CocycleData,
    CommonSolutionReport,
    cartan_reduce,
    common_solution,
    reconstruct_g1,
    verify_cocycle,
)
from .errors import (
    BinRoundingWarning,
    ConfigError,
    DegenerateBump,
    GridMismatch,
    IncompatibleCocycle,
    InvalidGrid,
    MissingParams,
    NonFiniteSample,
    NotAdmissible,
    ObstructionNonzero,
    PoleOnLine,
    TruncationWarning,
    TwisteqError,
    ZeroEigenvalue,
    ZeroTwist,
)
from .families import (
    FAMILY,
    GammaTerm,
    family_member,
    flow_rhs,
    gaussian_log,
    make_terms,
    min_power,
    sample_terms,
    scale_terms,
    x_image,
)
from .grid import (
    DECAY_TOL,
    HalfLineFunction,
    LogGrid,
    base_norm,
    decay_admissible,
    default_grid,
    inner,
    lin_comb,
    make_log_grid,
    sample,
    weighted_norm,
)
from .mellin import (
    MellinLine,
    Strip,
    StripCheck,
    derivative_rule_defect,
    line_admissible,
    line_energy,
    log_derivative,
    mellin_inverse_line,
    mellin_line,
    parseval_defect,
    strip_admissible,
)
from .reps import (
    ModelRepParams,
    apply_X,
    apply_u1,
    apply_u2,
    flow_action,
    fractional_weight,
    fractional_weight_u2,
    nearest_bin_shift,
    regularity_norm,
    sobolev_norm,
)
from .solver import (
    EstimateRow,
    SolveReport,
    WeightedNormEntry,
    estimate_sweep,
    obstruction,
    project_obstruction,
    residual,
    solve_mellin,
    solve_semigroup,
    solve_spectral_line,
)

__version__ = "0.1.0"
