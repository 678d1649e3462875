"""Spectral inequalities and null-control for finite Hermite expansions.

Core objects: the graded Hermite basis of E_N, sensor-set geometry and
coverings, Gram matrices over sensor sets, the sharp spectral constant
lambda_min(G_S), closed-form theoretical lower bounds, and HUM null-control
for the Hermite semigroup restricted to E_N.
"""

from .errors import (
    ConfigError,
    InputError,
    NonControllableError,
    NonObservableError,
    QuadratureError,
    ResolutionError,
    VerificationError,
)
from .rng import SplitMix64
from .basis import (
    BasisIndexSet,
    HermiteVector,
    basis_vector,
    derivative_multi,
    derivative_operator,
    eval_phi,
    eval_phi_table,
    eval_Phi,
    multi_indices,
)
from .geometry import (
    BallDensitySpec,
    CoveringFamily,
    CubeDensitySpec,
    Region,
    SensorSet,
    besicovitch_covering,
    density_check,
    example_finite_measure_set,
    lattice_covering,
    scaled_set,
)
from .bounds import (
    BoundParams,
    BoundValue,
    bernstein_CB_log,
    cobs_bound_log,
    concentration_radius,
    delta_choice,
    lambda_to_degree,
    thm_balls_bound,
    thm_cubes_bound,
    thm_general_bound,
    unit_ball_volume,
)
from .gram import (
    DEFAULT_RULE,
    GramMatrix,
    QuadratureRule,
    gram_fullspace_weighted,
    gram_over_set,
    norm2_over_set,
    scaling_identity_check,
)
from .spectral import (
    CellClassification,
    CellContext,
    SpectralReport,
    classify_cells,
    counterexample_growth,
    derivative_columns,
    estimate_Mk,
    good_cell_Mk_bound_log,
    jacobi_eigh,
    mass_intersection_check,
    spectral_constant,
    spectral_report,
)
from .control import (
    ControlProblem,
    ControlResult,
    hum_control,
    observability_constant_num,
    observability_gramian,
    observability_gramian_quadrature,
    semigroup_apply,
    worst_case_initial_state,
)

__version__ = "0.1.0"
