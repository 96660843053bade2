"""Elliptic Green kernels, dynamical r-matrices and their degenerations.

The package is organized bottom-up:

    theta         -- odd theta function, modular fallback, error types
    kernels       -- Green kernels on the annulus and the cylinder,
                     contour quadrature, convolution identities
    series        -- truncated Laurent series, dual bases, projections
    rmatrix       -- the two-site dynamical r-matrix and its identities
    degenerations -- rational/trigonometric limits and their r-matrices
    averaging     -- principal-value lattice sums reconstructing the
                     elliptic kernels from degenerate ones
    verify        -- randomized identity suites with reports
    cli           -- command line front end (`elliptic-rmatrix`)
"""

from .averaging import (
    AveragingConfig,
    average_rmatrix_c,
    average_rmatrix_elliptic,
    vp_ctg_sum,
    vp_glambda_sum,
    vp_rational_to_trig,
)
from .degenerations import (
    OrderingViolationError,
    build_degenerate_r,
    degenerate_kernel,
    limit_error,
)
from .kernels import (
    convolution_residual,
    fay_residual,
    fourier_G,
    fourier_G_lambda,
    fourier_gamma,
    g0,
    g_lambda,
)
from .rmatrix import build_r, cdybe_residual, cybe_residual, dlambda_r, rll_residual
from .series import (
    DualBasisTable,
    LaurentSeries,
    WindowError,
    expand_dual_basis,
    gram_matrix,
    green_kernel_series,
    project,
    residue_pair,
)
from .theta import (
    BandViolationError,
    DomainError,
    EllipticParams,
    InvalidModulusError,
    PoleProximityError,
    StripViolationError,
    TruncationOverflowError,
    ZoneViolationError,
    lattice_distance,
    theta,
    theta_derivs,
    theta_small_imtau,
    theta_taylor,
)
from .verify import SUITE_NAMES, VerificationReport, run_suite

__all__ = [
    "AveragingConfig",
    "BandViolationError",
    "DomainError",
    "DualBasisTable",
    "EllipticParams",
    "InvalidModulusError",
    "LaurentSeries",
    "OrderingViolationError",
    "PoleProximityError",
    "SUITE_NAMES",
    "StripViolationError",
    "TruncationOverflowError",
    "VerificationReport",
    "WindowError",
    "ZoneViolationError",
    "average_rmatrix_c",
    "average_rmatrix_elliptic",
    "build_degenerate_r",
    "build_r",
    "cdybe_residual",
    "convolution_residual",
    "cybe_residual",
    "degenerate_kernel",
    "dlambda_r",
    "expand_dual_basis",
    "fay_residual",
    "fourier_G",
    "fourier_G_lambda",
    "fourier_gamma",
    "g0",
    "g_lambda",
    "gram_matrix",
    "green_kernel_series",
    "lattice_distance",
    "limit_error",
    "project",
    "residue_pair",
    "rll_residual",
    "run_suite",
    "theta",
    "theta_derivs",
    "theta_small_imtau",
    "theta_taylor",
    "vp_ctg_sum",
    "vp_glambda_sum",
    "vp_rational_to_trig",
]

__version__ = "0.1.0"
