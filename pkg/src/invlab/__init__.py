"""Dense inverse computation and the accuracy of solving A x = b with it."""

from .core import (
    EPS,
    LuFactors,
    Matrix,
    QrFactors,
    SvdFactors,
    Vector,
    cond2,
    identity,
    lu_gepp,
    matmul,
    matvec,
    norm2,
    qr_explicit_q,
    qr_householder,
    qr_r,
    solve_lu,
    solve_lu_transposed,
    solve_qr,
    svd_jacobi,
)
from .errors import (
    DimensionMismatchError,
    FormatError,
    InvlabError,
    NonConvergenceError,
    SingularMatrixError,
)
from .inversion import (
    InverseMethod,
    InverseResult,
    default_newton_seed,
    invert,
    invert_cols_gepp,
    invert_getri_style,
    invert_rows_gepp,
    newton_left,
    newton_right,
    strassen_invert,
)
from .matgen import (
    RhsMode,
    RhsPair,
    TestProblem,
    bad_inverse,
    build_problem,
    geometric_spectrum,
    make_rhs,
    random_orthogonal,
)
from .matio import (
    format_float,
    load_matrix,
    load_vector,
    matrix_to_text,
    save_matrix,
    save_vector,
)
from .metrics import (
    BoundComparison,
    ProjectionSpectrum,
    ResidualReport,
    SolveReport,
    backward_error,
    bound_comparison,
    forward_error,
    gamma_projection_spectrum,
    residuals,
    solve_report,
)
from .rng import Rng, child_seed

__all__ = [
    "EPS",
    "BoundComparison",
    "DimensionMismatchError",
    "FormatError",
    "InverseMethod",
    "InverseResult",
    "InvlabError",
    "LuFactors",
    "Matrix",
    "NonConvergenceError",
    "ProjectionSpectrum",
    "QrFactors",
    "ResidualReport",
    "RhsMode",
    "RhsPair",
    "Rng",
    "SingularMatrixError",
    "SolveReport",
    "SvdFactors",
    "TestProblem",
    "Vector",
    "backward_error",
    "bad_inverse",
    "bound_comparison",
    "build_problem",
    "child_seed",
    "cond2",
    "default_newton_seed",
    "format_float",
    "forward_error",
    "gamma_projection_spectrum",
    "geometric_spectrum",
    "identity",
    "invert",
    "invert_cols_gepp",
    "invert_getri_style",
    "invert_rows_gepp",
    "load_matrix",
    "load_vector",
    "lu_gepp",
    "make_rhs",
    "matmul",
    "matrix_to_text",
    "matvec",
    "newton_left",
    "newton_right",
    "norm2",
    "qr_explicit_q",
    "qr_householder",
    "qr_r",
    "random_orthogonal",
    "residuals",
    "save_matrix",
    "save_vector",
    "solve_lu",
    "solve_lu_transposed",
    "solve_qr",
    "solve_report",
    "strassen_invert",
    "svd_jacobi",
]
