import numpy as np
import pytest

from elliptic_rmatrix.degenerations import (
    KERNEL_IDS,
    R_KINDS,
    OrderingViolationError,
    build_degenerate_r,
    check_zone,
    degenerate_kernel,
    limit_error,
    phi,
    psi_cth,
    psi_mu,
    psi_tilde,
    psi_trig,
)
from elliptic_rmatrix.rmatrix import cybe_residual, weight_zero_defect
from elliptic_rmatrix.theta import (
    DomainError,
    EllipticParams,
    PoleProximityError,
    StripViolationError,
    ZoneViolationError,
)


# --- kernel closed forms -----------------------------------------------------


def test_phi_is_reciprocal_with_strip_tags():
    assert phi(0.3 - 0.2j, "+") == 1.0 / (0.3 - 0.2j)
    assert phi(0.3 + 0.2j, "-") == 1.0 / (0.3 + 0.2j)
    with pytest.raises(StripViolationError):
        phi(0.3 + 0.2j, "+")
    with pytest.raises(StripViolationError):
        phi(0.3 - 0.2j, "-")


def test_psi_trig_cotangent_and_real_arguments_allowed():
    w = 0.37
    assert abs(psi_trig(w) - np.pi / np.tan(np.pi * w)) == 0.0
    with pytest.raises(PoleProximityError):
        psi_trig(1.0 + 1e-9)


def test_psi_tilde_matches_geometric_series():
    # '+' boundary value: pi*i + 2*pi*i sum_{n>=1} e^{-2*pi*i*n*w}, Im w < 0
    w = 0.23 - 0.31j
    series = 1j * np.pi
    for n in range(1, 200):
        series += 2j * np.pi * np.exp(-2j * np.pi * n * w)
    assert abs(psi_tilde(w, "+") - series) < 1e-12
    with pytest.raises(StripViolationError):
        psi_tilde(w, "-")


def test_psi_cth_value_and_strip():
    eta = 1.3
    w = 0.4 - 0.3j
    assert abs(psi_cth(w, eta) - np.pi * eta / np.tanh(np.pi * eta * w)) == 0.0
    with pytest.raises(StripViolationError):
        psi_cth(0.4 + 0.3j, eta)
    with pytest.raises(StripViolationError):
        psi_cth(0.4 - 0.9j, eta)  # below -1/eta


def test_psi_mu_geometric_series_oracle():
    # expanding 1/(1 - e^{-2 pi eta w}) for Re(eta w) > 0 gives
    # 2*pi*eta sum_{k>=0} e^{-2*pi*eta*(mu+k)*w}
    mu, eta = 0.4, 1.1
    w = 0.6 - 0.2j
    total = 0.0
    for k in range(400):
        total += 2.0 * np.pi * eta * np.exp(-2.0 * np.pi * eta * (mu + k) * w)
    assert abs(psi_mu(w, "+", mu, eta) - total) < 1e-12


def test_psi_mu_half_reduces_to_hyperbolic():
    # at mu = 1/2, eta = 1: 2*pi*e^{-pi w}/(1 - e^{-2 pi w}) = pi/sinh(pi w)
    w = 0.45 - 0.3j
    assert abs(psi_mu(w, "+", 0.5, 1.0) - np.pi / np.sinh(np.pi * w)) < 1e-13


def test_psi_mu_mirror_identity():
    # Psi^+_{1-mu}(w) = -Psi^-_mu(-w): the two strip branches are images
    # of each other under (mu, w) -> (1 - mu, -w)
    mu, eta = 0.35, 0.9
    w = 0.27 - 0.4j
    lhs = psi_mu(w, "+", 1.0 - mu, eta)
    rhs = -psi_mu(-w, "-", mu, eta)
    assert abs(lhs - rhs) < 1e-13


def test_psi_mu_strips_and_zone():
    with pytest.raises(StripViolationError):
        psi_mu(0.3 + 0.2j, "+", 0.4, 1.0)
    with pytest.raises(StripViolationError):
        psi_mu(0.3 - 0.2j, "-", 0.4, 1.0)
    with pytest.raises(ZoneViolationError):
        psi_mu(0.3 - 0.2j, "+", 1.2, 1.0)
    with pytest.raises(ZoneViolationError):
        psi_mu(0.3 - 0.2j, "+", -0.1, 1.0)


def test_check_zone_offset_formula():
    # complex eta tilts the zone: offset = Re(mu) - Im(eta) Im(mu) / Re(eta)
    eta = 1.0 + 0.5j
    mu = 0.3 + 0.4j
    assert abs(check_zone(mu, eta) - (0.3 - 0.5 * 0.4 / 1.0)) < 1e-15
    with pytest.raises(DomainError):
        check_zone(0.5, -1.0)  # Re(eta) <= 0
    with pytest.raises(ZoneViolationError):
        check_zone(0.5 + 1.2j, eta)


def test_degenerate_kernel_dispatch_covers_catalog():
    vals = {
        "phi+": degenerate_kernel("phi+", 0.3 - 0.2j),
        "phi-": degenerate_kernel("phi-", 0.3 + 0.2j),
        "psi_trig": degenerate_kernel("psi_trig", 0.37),
        "psi_tilde+": degenerate_kernel("psi_tilde+", 0.3 - 0.2j),
        "psi_tilde-": degenerate_kernel("psi_tilde-", 0.3 + 0.2j),
        "psi_cth": degenerate_kernel("psi_cth", 0.3 - 0.2j, eta=1.0),
        "psi_mu+": degenerate_kernel("psi_mu+", 0.3 - 0.2j, mu=0.4, eta=1.0),
        "psi_mu-": degenerate_kernel("psi_mu-", 0.3 + 0.2j, mu=0.4, eta=1.0),
    }
    assert set(vals) == set(KERNEL_IDS)
    assert all(np.isfinite(v) for v in vals.values())
    with pytest.raises(DomainError):
        degenerate_kernel("nope", 0.3)


# --- degenerate r-matrices ---------------------------------------------------


def test_rational_builder_entries():
    u, v = 0.5 - 0.1j, 0.1 + 0.05j
    w = u - v
    r = build_degenerate_r("a_k0", u, v)
    assert r[0, 0] == 0.5 / w
    assert r[1, 1] == -0.5 / w
    assert r[1, 2] == 1.0 / w
    assert r[2, 1] == 1.0 / w
    assert weight_zero_defect(r) == 0.0


def test_trig_builder_entries():
    u, v = 0.5 - 0.1j, 0.1 + 0.05j
    w = u - v
    r = build_degenerate_r("b_k0", u, v)
    cot = np.pi / np.tan(np.pi * w)
    assert abs(r[0, 0] - 0.5 * cot) < 1e-15
    assert abs(r[1, 2] - (cot - 1j * np.pi)) < 1e-15
    assert abs(r[2, 1] - (cot + 1j * np.pi)) < 1e-15


def test_c_builder_entries_use_both_strips():
    mu, eta = 0.3, 1.0
    u, v = 0.2 - 0.3j, 0.1 + 0.1j  # Im(u - v) < 0
    w = u - v
    r = build_degenerate_r("c_cyl", u, v, mu=mu, eta=eta)
    assert abs(r[0, 0] - 0.5 * psi_cth(w, eta)) < 1e-15
    assert abs(r[1, 2] + psi_mu(v - u, "-", mu, eta)) < 1e-15
    assert abs(r[2, 1] - psi_mu(w, "+", mu, eta)) < 1e-15


def test_annulus_kinds_enforce_modulus_ordering():
    with pytest.raises(OrderingViolationError):
        build_degenerate_r("a_k0", 0.1, 0.3)
    with pytest.raises(OrderingViolationError):
        build_degenerate_r("b_k0", 0.1, 0.3)


def test_cylinder_kinds_enforce_height_ordering():
    with pytest.raises(StripViolationError):
        build_degenerate_r("a_cyl", 0.3 + 0.2j, 0.1)  # Im(u - v) > 0
    with pytest.raises(DomainError):
        build_degenerate_r("c_cyl", 0.3 - 0.2j, 0.1)  # mu missing


@pytest.mark.parametrize("kind", R_KINDS)
def test_cybe_for_every_degenerate_kind(kind):
    if kind in ("a_k0", "b_k0"):
        # strictly decreasing moduli
        pts = (0.52 - 0.1j, 0.23 + 0.11j, 0.08 - 0.04j)
        kwargs = {}
    elif kind == "c_cyl":
        # strictly increasing heights inside the eta-strip
        pts = (0.3 - 0.35j, 0.1 - 0.15j, -0.2 + 0.05j)
        kwargs = {"mu": 0.3, "eta": 1.0}
    else:
        pts = (0.3 - 0.55j, 0.1 - 0.15j, -0.2 + 0.25j)
        kwargs = {}
    assert cybe_residual(kind, *pts, **kwargs) < 1e-10


def test_cybe_rejects_unknown_kind():
    with pytest.raises(DomainError):
        cybe_residual("zzz", 0.3, 0.2, 0.1)


# --- limit ladders -----------------------------------------------------------


def test_case_a_ladder_quadratic_rate():
    p = EllipticParams(0.9j)
    lam = 0.3 - 0.2j
    w = 0.3 - 0.2j
    scales = [10.0, 20.0, 40.0, 80.0]
    errs = [limit_error("a", om, w, p=p, lam=lam)["g0"] for om in scales]
    assert all(np.diff(errs) < 0)  # monotone decrease
    slope = np.polyfit(np.log(scales), np.log(errs), 1)[0]
    assert abs(slope - (-2.0)) < 0.4


def test_case_b_ladder_exponential_rate():
    lam = 0.3 - 0.2j
    w = 0.3 - 0.2j
    errs = [limit_error("b", t, w, lam=lam)["g_lambda"] for t in (1.5, 2.0, 2.5, 3.0)]
    assert all(np.diff(errs) < 0)
    # consecutive T steps of 0.5 shrink the error by e^{-2*pi*0.5}
    for k in range(len(errs) - 1):
        ratio = errs[k + 1] / errs[k]
        assert abs(np.log(ratio) - (-np.pi)) < 0.1 * np.pi


def test_case_c_ladder_monotone_through_modular_route():
    # scale = 40 puts Im tau = 1/(eta*om) = 0.025 below the small-Im-tau
    # threshold, so this ladder exercises the modular-transform path
    mu, eta = 0.3, 1.0
    lam = -0.4j
    w = 0.3 - 0.2j
    errs = []
    for om in (10.0, 20.0, 40.0):
        d = limit_error("c", om, w, mu=mu, eta=eta, lam=lam)
        errs.append(max(d["g0"], d["g_mu"]))
    assert errs[0] > errs[1] > errs[2]
    # the drift is the exact O(1/omega) linear term: halving rate ~ -1
    slope = np.polyfit(np.log([10.0, 20.0, 40.0]), np.log(errs), 1)[0]
    assert abs(slope - (-1.0)) < 0.3


def test_limit_error_validates_arguments():
    with pytest.raises(DomainError):
        limit_error("a", 10.0, 0.3)  # p, lam missing
    with pytest.raises(DomainError):
        limit_error("c", 10.0, 0.3 - 0.2j, mu=0.3, eta=1.0)  # lam missing
    with pytest.raises(DomainError):
        limit_error("q", 10.0, 0.3)
