import numpy as np
import pytest

from elliptic_rmatrix.kernels import (
    CONVOLUTION_IDENTITIES,
    CYL_IDENTITIES,
    K0_IDENTITIES,
    convolution_residual,
    dlambda_g_lambda,
    fay_residual,
    fourier_G,
    fourier_G_lambda,
    fourier_dlambda_G_lambda,
    fourier_dtau_G_lambda,
    fourier_gamma,
    g0,
    g_lambda,
    heat_residual_dynamical,
    heat_residual_gamma,
    shift_residuals,
)
from elliptic_rmatrix.theta import (
    BandViolationError,
    EllipticParams,
    PoleProximityError,
    StripViolationError,
    theta,
    theta_derivs,
)

P = EllipticParams(0.2 + 0.9j)


def test_g0_is_log_derivative_of_theta():
    w = 0.27 - 0.14j
    vals = theta_derivs(w, P, 1)
    assert abs(g0(w, P) - vals[1] / vals[0]) < 1e-13


def test_g_lambda_from_theta_quotient():
    w, lam = 0.31 + 0.22j, 0.17 - 0.08j
    expected = theta(w + lam, P) / (theta(w, P) * theta(lam, P))
    assert abs(g_lambda(w, lam, P) - expected) < 1e-13


def test_g_lambda_parity_is_exact():
    w, lam = 0.23 - 0.11j, 0.14 + 0.06j
    assert g_lambda(w, -lam, P) == -g_lambda(-w, lam, P)


def test_g0_periodicity_and_quasi_periodicity():
    w = 0.19 + 0.23j
    assert abs(g0(w + 1.0, P) - g0(w, P)) < 1e-12
    # adding tau shifts the logarithmic derivative by -2*pi*i
    assert abs(g0(w + P.tau, P) - (g0(w, P) - 2j * np.pi)) < 1e-11


def test_dlambda_g_lambda_matches_finite_difference():
    w, lam = 0.26 - 0.17j, 0.21 + 0.05j
    h = 1e-6
    fd = (g_lambda(w, lam + h, P) - g_lambda(w, lam - h, P)) / (2 * h)
    assert abs(dlambda_g_lambda(w, lam, P) - fd) < 1e-7


def test_g0_pole_proximity_raises():
    with pytest.raises(PoleProximityError):
        g0(1e-9, P)
    with pytest.raises(PoleProximityError):
        g_lambda(0.3, 1e-9, P)


@pytest.mark.parametrize(
    "u,z,lam",
    [
        (0.31 - 0.12j, 0.18 + 0.21j, 0.22 + 0.07j),
        (0.05 + 0.33j, -0.27 + 0.1j, -0.13 - 0.19j),
        (0.41, 0.17, 0.29),
    ],
)
def test_fay_identity(u, z, lam):
    assert fay_residual(u, z, lam, P) < 1e-11


# --- Fourier-side kernels on the cylinder ---------------------------------


def lam_in_band(frac=-0.4):
    return frac * P.tau.imag * 1j + 0.1


def test_fourier_G_equals_g0_inside_strip():
    # the plain Fourier kernel agrees with the annulus kernel pointwise in
    # the common strip -Im tau < Im w < 0
    for w in (0.3 - 0.2j, -0.17 - 0.55j, 0.05 - 0.71j):
        assert abs(fourier_G(w, P) - g0(w, P)) < 1e-11


def test_fourier_G_lambda_both_signs_match_g_lambda():
    # both Fourier branches reproduce the same meromorphic kernel, each on
    # its own strip of convergence
    lam = lam_in_band()
    w_low = 0.22 - 0.35j  # lower strip for "+"
    w_up = 0.22 + 0.35j  # upper strip for "-"
    assert abs(fourier_G_lambda(w_low, lam, P, "+") - g_lambda(w_low, lam, P)) < 1e-11
    assert abs(fourier_G_lambda(w_up, lam, P, "-") - g_lambda(w_up, lam, P)) < 1e-11


def test_fourier_strip_violations():
    lam = lam_in_band()
    with pytest.raises(StripViolationError):
        fourier_G_lambda(0.3 + 0.2j, lam, P, "+")
    with pytest.raises(StripViolationError):
        fourier_G_lambda(0.3 - 0.2j, lam, P, "-")
    with pytest.raises(StripViolationError):
        fourier_G(0.3 + 0.1j, P)


def test_fourier_band_violation():
    with pytest.raises(BandViolationError):
        fourier_G_lambda(0.3 - 0.2j, 0.3 + 0.1j, P, "+")  # Im lam > 0
    with pytest.raises(BandViolationError):
        fourier_G_lambda(0.3 - 0.2j, 0.1 - 1.5 * P.tau.imag * 1j, P, "+")


def test_fourier_dlambda_matches_finite_difference():
    lam = lam_in_band()
    w = 0.27 - 0.4j
    h = 1e-6
    fd = (
        fourier_G_lambda(w, lam + h, P, "+") - fourier_G_lambda(w, lam - h, P, "+")
    ) / (2 * h)
    assert abs(fourier_dlambda_G_lambda(w, lam, P) - fd) < 1e-6


def test_fourier_gamma_in_strip():
    # gamma converges on the symmetric double strip |Im w| < Im tau
    assert np.isfinite(fourier_gamma(0.3 - 0.45j, P))
    assert np.isfinite(fourier_gamma(0.3 + 0.45j, P))
    with pytest.raises(StripViolationError):
        fourier_gamma(0.3 + 1.0j, P)


def test_dtau_G_lambda_matches_finite_difference():
    lam = lam_in_band()
    w = 0.21 - 0.38j
    h = 1e-6
    p_up = EllipticParams(P.tau + h)
    p_dn = EllipticParams(P.tau - h)
    fd = (
        fourier_G_lambda(w, lam, p_up, "+") - fourier_G_lambda(w, lam, p_dn, "+")
    ) / (2 * h)
    assert abs(fourier_dtau_G_lambda(w, lam, P, "+") - fd) < 1e-5


# --- convolution catalog ---------------------------------------------------


def _sample_points(identity):
    """Pick (u, v, lam) satisfying the contour-ordering policy per identity."""
    lam = lam_in_band()
    if identity in ("k0-pp", "k0-gg"):
        return 0.3 - 0.1j, 0.12 + 0.05j, lam  # |u| > |v|
    if identity == "k0-mm":
        return 0.12 + 0.05j, 0.3 - 0.1j, lam  # |u| < |v|
    if identity in ("k0-pm", "k0-ggt"):
        return 0.25 - 0.1j, 0.2 + 0.11j, lam
    if identity == "k0-mp":
        return 0.16 + 0.02j, 0.05 - 0.06j, lam  # both tiny: stay inside cell
    iu, iv = -0.55, -0.25
    if identity in ("cyl-pp", "cyl-gg-pp"):
        return 0.3 + iu * 1j, 0.1 + iv * 1j, lam  # Im u < Im v
    if identity == "cyl-mm":
        return 0.3 + iv * 1j, 0.1 + iu * 1j, lam
    if identity in ("cyl-pm", "cyl-gg-pm"):
        return 0.3 - 0.3j, 0.1 - 0.5j, lam
    if identity == "cyl-mp":
        return 0.3 - 0.6j, 0.1 - 0.25j, lam
    raise AssertionError(identity)


@pytest.mark.parametrize("identity", CONVOLUTION_IDENTITIES)
def test_convolution_identity(identity):
    u, v, lam = _sample_points(identity)
    assert convolution_residual(identity, u, v, P, lam=lam) < 1e-9


def test_convolution_rejects_bad_ordering():
    lam = lam_in_band()
    with pytest.raises(Exception):
        # k0-pp needs |u| > |v|
        convolution_residual("k0-pp", 0.1, 0.3, P, lam=lam)


def test_convolution_unknown_identity():
    with pytest.raises(ValueError):
        convolution_residual("k0-xx", 0.3, 0.1, P, lam=lam_in_band())


def test_identity_catalog_shape():
    assert len(K0_IDENTITIES) == 6
    assert len(CYL_IDENTITIES) == 6
    assert set(K0_IDENTITIES).isdisjoint(CYL_IDENTITIES)


# --- shift and heat identities ---------------------------------------------


@pytest.mark.parametrize("w", [0.3 + 0.2j, 0.1 + 0.6j, -0.2 + 0.44j])
def test_shift_identities(w):
    lam = lam_in_band()
    res_lam, res_g = shift_residuals(w, lam, P)
    assert res_lam < 1e-10
    assert res_g < 1e-10


def test_shift_requires_upper_strip():
    with pytest.raises(StripViolationError):
        shift_residuals(0.3 - 0.2j, lam_in_band(), P)


@pytest.mark.parametrize("sign", ["+", "-"])
def test_heat_identity_dynamical(sign):
    lam = lam_in_band()
    w = 0.3 - 0.4j if sign == "+" else 0.3 + 0.4j
    assert heat_residual_dynamical(w, lam, P, sign=sign) < 1e-9


def test_heat_identity_gamma():
    assert heat_residual_gamma(0.25 - 0.35j, P) < 1e-10
