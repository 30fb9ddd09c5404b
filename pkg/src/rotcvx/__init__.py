"""Linear optimization and feasibility over rotation and orthogonal matrices."""
from .diagonal import (
    PlanarRotation,
    PolyhedralSet,
    chan_li_rotations,
    construct_with_diagonal,
    decide_diag_feasibility,
    majorizes,
    torus_majorant_diagonal,
)
from .errors import (
    DimensionMismatch,
    Infeasible,
    NonFinite,
    NotFound,
    NotInParityPolytope,
    NotInterior,
    NumericalFailure,
    RotcvxError,
)
from .linalg import (
    DEFAULT_TOL,
    ToleranceConfig,
    membership,
    op_norm,
    orth_trace_max,
    project_op_ball,
    random_rotation,
    special_trace,
    svd,
    torus_matrix,
    trace_norm,
)
from .oneconstraint import (
    TwoDImage,
    golden_minimize,
    image_boundary_polygon,
    round_certificate,
    solve_one_constraint,
    support_point,
    weak_separation,
)
from .parity import pp_contains, pp_maximize, pp_random_point, pp_separate
from .sut import (
    RankOneConstraint,
    construct_x_rho,
    diag_bounds,
    feasibility_low_rank,
    fiber_enumerate,
    project_sut,
    reduce_low_rank,
    sut_opt_orth,
    sut_opt_special,
)

__version__ = "0.1.0"
