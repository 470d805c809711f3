"""Point spectra of semi-infinite Jacobi matrices via a characteristic
function built from a renormalized multi-product series.

The core object is a descriptor of the matrix entries (diagonal and
weights as callables over indices); everything else - evaluation with
certified truncation error, zero localization, eigenvectors, Green
function entries, bilateral difference equations, and the worked
example families with their closed forms - layers on top of it.
"""

from .errors import (
    AccumulationPoint,
    BadParams,
    BoundViolated,
    CharspecError,
    ConvergenceError,
    Diverges,
    DomainError,
    HypothesisFailed,
    InvalidZ0,
    LostTrack,
    NearSpectrum,
    NoConvergenceCertificate,
    NoTailBound,
    PochhammerZero,
    PoleAt,
    PoleOfGamma,
    QuadratureFailure,
    SingularAtZ,
    TolUnreachable,
    WindowTouchesAccumulation,
)
from .ffun import f_bilateral, f_finite, f_finite_products, f_tail
from .jacobi import (
    GeneralJacobiDescriptor,
    JacobiDescriptor,
    charfn,
    charfn_regularized,
    check_convergence,
    custom_rational,
    descriptor_from_json,
    descriptor_to_json,
    det_truncation_identity,
    gamma,
    harmonic,
    linear_diag,
    qgeom,
    window_evaluator,
    zero_diag_harm,
    zero_diag_q,
)
from .spectral import (
    BilateralDescriptor,
    bessel_bilateral,
    bilateral_solutions,
    eigen_norm_sq,
    eigenvector,
    find_real_zeros,
    green_entry,
    green_finite,
    green_summation_check,
    jmatrix_entry,
    xi_sum,
    zero_eigen_test,
)
from .truncation import (
    charpoly,
    lambda_tracking,
    orthopoly,
    truncated_spectrum,
)
from .examples import (
    CDeformed,
    ParametricCurve,
    build_example,
    closed_form_charfn,
    coulomb_derivative,
    curve_table_csv,
    identities_42,
    lambda_curve,
    prop45_bound_check,
)

__version__ = "0.1.0"
