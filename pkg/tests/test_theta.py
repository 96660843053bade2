import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elliptic_rmatrix.theta import (
    EllipticParams,
    InvalidModulusError,
    TruncationOverflowError,
    lattice_distance,
    theta,
    theta_block,
    theta_derivs,
    theta_small_imtau,
    theta_taylor,
)


def theta_product(u, tau, terms=40):
    """Independent oracle: the q-product form of the odd theta function.

    With q = e^{i pi tau},

        theta(u) = sin(pi u)/pi * prod_{n>=1} (1 - 2 q^{2n} cos(2 pi u) + q^{4n})
                                              / (1 - q^{2n})^2,

    normalized so that theta'(0) = 1.
    """
    q2 = np.exp(2j * np.pi * tau)
    value = np.sin(np.pi * u) / np.pi
    for n in range(1, terms + 1):
        qn = q2**n
        value *= (1.0 - 2.0 * qn * np.cos(2.0 * np.pi * u) + qn * qn) / (1.0 - qn) ** 2
    return value


@pytest.mark.parametrize("tau", [0.9j, 0.35 + 0.7j, -0.2 + 1.3j, 2.0j])
@pytest.mark.parametrize("u", [0.31, 0.2 - 0.4j, -0.45 + 0.27j, 0.05 + 0.05j])
def test_theta_matches_product_formula(tau, u):
    p = EllipticParams(tau)
    assert abs(theta(u, p) - theta_product(u, tau)) < 1e-13


def test_theta_zero_and_unit_slope_are_exact():
    for tau in (0.8j, 0.3 + 1.1j):
        p = EllipticParams(tau)
        assert theta(0.0, p) == 0.0
        val, d1 = theta_derivs(0.0, p, 1)
        assert val == 0.0
        assert d1 == 1.0


@given(
    ur=st.floats(-0.5, 0.5),
    ui=st.floats(-0.5, 0.5),
    taur=st.floats(-0.4, 0.4),
    taui=st.floats(0.35, 1.8),
)
@settings(max_examples=60, deadline=None)
def test_quasi_periodicity_everywhere(ur, ui, taur, taui):
    tau = complex(taur, taui)
    u = complex(ur, ui)
    p = EllipticParams(tau)
    th = theta(u, p)
    scale = max(1.0, abs(th))
    assert abs(theta(u + 1.0, p) + th) / scale < 1e-11
    factor = np.exp(-2j * np.pi * u - 1j * np.pi * tau)
    assert abs(theta(u + tau, p) + factor * th) / scale < 1e-11


def test_zeros_exactly_on_lattice():
    p = EllipticParams(0.3 + 0.9j)
    for m, n in [(1, 0), (0, 1), (-2, 1), (3, -2)]:
        u = m + n * p.tau
        # the reduction to the fundamental cell makes lattice zeros exact
        assert theta(u, p) == 0.0
    assert lattice_distance(2.0 + 3.0 * p.tau, p.tau) == 0.0


def test_derivatives_against_finite_differences():
    p = EllipticParams(0.35 + 0.8j)
    u = 0.23 - 0.31j
    h = 1e-5
    vals = theta_derivs(u, p, 2)
    fd1 = (theta(u + h, p) - theta(u - h, p)) / (2 * h)
    fd2 = (theta(u + h, p) - 2 * vals[0] + theta(u - h, p)) / h**2
    assert abs(vals[1] - fd1) < 1e-9
    assert abs(vals[2] - fd2) < 1e-5


def test_taylor_matches_pointwise_derivatives():
    p = EllipticParams(-0.15 + 1.2j)
    u = 0.4 + 0.1j
    direct = theta_derivs(u, p, 3)
    taylor = theta_taylor(u, p, 3)
    fact = 1
    for k in range(4):
        if k > 1:
            fact *= k
        assert abs(direct[k] - fact * taylor[k]) < 1e-12 * max(1.0, abs(direct[k]))


def test_small_imtau_routes_through_modular_transform():
    # At tau = 0.04i the direct sine series still converges (just), so the
    # two routes are genuinely independent here; the modular route must
    # agree to near machine precision relative to the value size.
    tau = 0.04j
    p = EllipticParams(tau)
    for u in (0.21, 0.37 + 0.01j, -0.11 + 0.02j):
        direct = theta(u, p)
        small = theta_small_imtau(u, p)
        assert abs(direct - small) / max(1.0, abs(direct)) < 1e-8


def test_small_imtau_rejects_large_imtau():
    p = EllipticParams(0.9j)
    with pytest.raises(Exception):
        theta_small_imtau(0.3, p)


def test_taylor_auto_modular_below_threshold():
    # theta_taylor must remain accurate where the direct series overflows
    # its term budget; cross-check against the product oracle at the
    # modular image.
    tau = 0.02j
    p = EllipticParams(tau)
    u = 0.3
    got = theta_taylor(u, p, 0)[0]
    ref = tau * np.exp(-1j * np.pi * u**2 / tau) * theta_product(u / tau, -1.0 / tau)
    assert abs(got - ref) / max(1.0, abs(ref)) < 1e-10


def test_truncation_overflow_is_reported():
    p = EllipticParams(0.01j, max_terms=8)
    with pytest.raises(TruncationOverflowError):
        theta(0.3, p)


def test_invalid_modulus_rejected():
    with pytest.raises(InvalidModulusError):
        EllipticParams(0.5)  # real tau, no upper half-plane
    with pytest.raises(InvalidModulusError):
        EllipticParams(0.3 - 0.7j)


def test_theta_block_consistent_with_derivs():
    p = EllipticParams(0.25 + 0.95j)
    w = 0.17 - 0.22j
    blk = theta_block(w, p, 3)
    der = theta_derivs(w, p, 3)
    for a, b in zip(blk, der):
        assert abs(a - b) < 1e-12 * max(1.0, abs(b))
