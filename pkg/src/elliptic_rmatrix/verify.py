"""Randomized verification suites for every identity in the package.

Each suite draws domain-valid random configurations from a seeded
generator, evaluates one identity residual per sample, and aggregates
them into a VerificationReport.  Sampling stays strictly inside
validated sub-domains (annuli, strips and the lambda band all keep a
margin), so a failure means the identity broke, not that a sample
grazed a pole.

Reports are deterministic: the sample plan is drawn up front from the
seed, residual evaluation is pure, and aggregation (max / mean / sorted
failures) does not depend on evaluation order.  Setting the environment
variable ELLIPTIC_RMATRIX_THREADS > 1 evaluates samples in a thread
pool without changing the report.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import averaging, degenerations, kernels, rmatrix, series
from .theta import EllipticParams, lattice_distance, theta, theta_derivs

DEFAULT_SAMPLES = 25
DEFAULT_SEED = 0
DEFAULT_TOL = 1e-8

_POINT_MARGIN = 0.05  # min lattice distance for sampled arguments


@dataclass
class VerificationReport:
    suite: str
    header: str
    samples: int
    seed: int
    tolerance: float
    max_residual: float
    mean_residual: float
    failures: list = field(default_factory=list)
    passed: bool = False


# ---------------------------------------------------------------------------
# Samplers.  All draw from validated sub-domains with margins.
# ---------------------------------------------------------------------------


def _sample_tau(rng):
    return complex(rng.uniform(-0.3, 0.3), rng.uniform(0.6, 1.4))


def _sample_lambda(rng, tau):
    """Band -Im tau < Im lambda < 0 with a 0.1*Im tau margin on both edges."""
    return complex(rng.uniform(-0.4, 0.4), -rng.uniform(0.1, 0.9) * tau.imag)


def _sample_cell_point(rng, p, margin=_POINT_MARGIN):
    """A point of the fundamental cell away from the theta zero lattice."""
    for _ in range(100):
        u = complex(rng.uniform(-0.45, 0.45), rng.uniform(-0.45, 0.45) * min(1.0, p.tau.imag))
        if lattice_distance(u, p.tau) >= margin and abs(u) >= margin:
            return u
    raise RuntimeError("could not place a sample point away from the lattice")


def _sample_annulus_pair(rng, identity):
    """Moduli-ordered (u, v) matching the contour policy of one annulus id."""
    if identity == "k0-mp":
        outer, inner = rng.uniform(0.16, 0.20), rng.uniform(0.05, 0.08)
    else:
        outer, inner = rng.uniform(0.25, 0.33), rng.uniform(0.08, 0.13)
    pu, pv = np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=2))
    if identity == "k0-mm":
        return inner * pu, outer * pv
    return outer * pu, inner * pv


def _sample_strip_pair(rng, p, identity):
    """(u, v) with imaginary parts in thirds of the strip per identity."""
    im_tau = p.tau.imag
    low = rng.uniform(-0.68, -0.58) * im_tau
    high = rng.uniform(-0.42, -0.32) * im_tau
    ru, rv = rng.uniform(-0.45, 0.45, size=2)
    if identity in ("cyl-pp", "cyl-gg-pp"):
        iu, iv = low, high
    elif identity == "cyl-mm":
        iu, iv = high, low
    else:  # pm / mp / gg-pm: mid-strip pair, separated heights
        iu, iv = rng.uniform(-0.40, -0.34) * im_tau, rng.uniform(-0.66, -0.60) * im_tau
    return complex(ru, iu), complex(rv, iv)


def _sample_ordered_moduli(rng, count, lo=0.05, hi=0.45):
    """Strictly decreasing moduli with random phases, pairwise separated."""
    for _ in range(100):
        radii = np.sort(rng.uniform(lo, hi, size=count))[::-1]
        if np.min(-np.diff(radii)) < 0.04:
            continue
        pts = radii * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, size=count))
        diffs = [abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :]]
        if min(diffs) >= _POINT_MARGIN:
            return [complex(z) for z in pts]
    raise RuntimeError("could not draw ordered moduli")


def _sample_ordered_heights(rng, count, height, spread=0.45):
    """Strictly increasing imaginary parts inside (-height, 0)."""
    for _ in range(100):
        ims = np.sort(rng.uniform(-0.9, -0.1, size=count)) * height
        if np.min(np.diff(ims)) < 0.08 * height:
            continue
        res = rng.uniform(-spread, spread, size=count)
        if np.min(np.abs(np.diff(res))) < 0.02:
            continue
        return [complex(r, i) for r, i in zip(res, ims)]
    raise RuntimeError("could not draw ordered heights")


# ---------------------------------------------------------------------------
# Suite runners: sample(rng, nodes) -> inputs dict; evaluate(inputs) -> float
# ---------------------------------------------------------------------------


def _quasi_periodicity_sample(rng, nodes):
    tau = _sample_tau(rng)
    p = EllipticParams(tau)
    return {"u": _sample_cell_point(rng, p), "tau": tau}


def _quasi_periodicity_eval(x):
    p = EllipticParams(x["tau"])
    u, tau = x["u"], x["tau"]
    th = theta(u, p)
    scale = max(1.0, abs(th))
    r1 = abs(theta(u + 1.0, p) + th) / scale
    r2 = abs(theta(u + tau, p) + np.exp(-2j * np.pi * u - 1j * np.pi * tau) * th) / scale
    r0 = abs(theta(0.0, p))
    r0p = abs(theta_derivs(0.0, p, 1)[1] - 1.0)
    return max(r1, r2, r0, r0p)


def _fay_sample(rng, nodes):
    tau = _sample_tau(rng)
    p = EllipticParams(tau)
    lam = _sample_lambda(rng, tau)
    for _ in range(100):
        u = _sample_cell_point(rng, p)
        z = _sample_cell_point(rng, p)
        if lattice_distance(u - z, tau) >= _POINT_MARGIN:
            return {"u": u, "z": z, "lambda": lam, "tau": tau}
    raise RuntimeError("could not sample a Fay configuration")


def _fay_eval(x):
    p = EllipticParams(x["tau"])
    return kernels.fay_residual(x["u"], x["z"], x["lambda"], p)


DUALITY_ORDER = 12


def _duality_sample(rng, nodes):
    tau = _sample_tau(rng)
    lam = _sample_lambda(rng, tau)
    # sprinkle in the lambda = 0 variant (theta'/theta basis)
    if rng.uniform() < 0.2:
        lam = None
    return {"lambda": lam, "tau": tau}


def _duality_eval(x):
    p = EllipticParams(x["tau"])
    table = series.expand_dual_basis(p, DUALITY_ORDER, x["lambda"])
    gram = series.gram_matrix(table)
    return float(np.max(np.abs(gram - np.eye(gram.shape[0]))))


PROJECTION_ORDER = 6


def _projections_sample(rng, nodes):
    tau = _sample_tau(rng)
    lam = _sample_lambda(rng, tau)
    lo = int(rng.integers(-PROJECTION_ORDER + 2, 0))
    hi = int(rng.integers(1, PROJECTION_ORDER - 2))
    coeffs = rng.normal(size=hi - lo + 1) + 1j * rng.normal(size=hi - lo + 1)
    return {"lambda": lam, "tau": tau, "min_deg": lo, "coeffs": coeffs}


def _projections_eval(x):
    p = EllipticParams(x["tau"])
    s = series.LaurentSeries(x["min_deg"], np.asarray(x["coeffs"], dtype=complex), True)
    worst = 0.0
    for lam in (x["lambda"], None):
        table = series.expand_dual_basis(p, PROJECTION_ORDER, lam)
        plus = series.project(table, s, "+")
        minus = series.project(table, s, "-")
        recon = plus + minus
        for d in range(x["min_deg"], x["min_deg"] + len(x["coeffs"])):
            worst = max(worst, abs(recon.coefficient(d) - s.coefficient(d)))
        again = series.project(table, plus, "+")
        for d in range(0, plus.max_deg + 1):
            worst = max(worst, abs(again.coefficient(d) - plus.coefficient(d)))
        cross = series.project(table, minus, "+")
        worst = max(worst, float(np.max(np.abs(cross.coeffs))))
        cross2 = series.project(table, plus, "-")
        worst = max(worst, float(np.max(np.abs(cross2.coeffs))))
    return worst


def _convolution_sampler(family):
    ids = kernels.K0_IDENTITIES if family == "k0" else kernels.CYL_IDENTITIES

    def sample(rng, nodes):
        tau = _sample_tau(rng)
        p = EllipticParams(tau)
        identity = ids[int(rng.integers(len(ids)))]
        lam = _sample_lambda(rng, tau)
        if family == "k0":
            u, v = _sample_annulus_pair(rng, identity)
        else:
            u, v = _sample_strip_pair(rng, p, identity)
        return {"identity": identity, "u": u, "v": v, "lambda": lam, "tau": tau,
                "nodes": nodes}

    return sample


def _convolution_eval(x):
    p = EllipticParams(x["tau"])
    return kernels.convolution_residual(
        x["identity"], x["u"], x["v"], p, x["lambda"], x["nodes"]
    )


def _shift_sample(rng, nodes):
    tau = _sample_tau(rng)
    lam = _sample_lambda(rng, tau)
    w = complex(rng.uniform(-0.45, 0.45), rng.uniform(0.15, 0.85) * tau.imag)
    return {"w": w, "lambda": lam, "tau": tau}


def _shift_eval(x):
    p = EllipticParams(x["tau"])
    r1, r2 = kernels.shift_residuals(x["w"], x["lambda"], p)
    return max(r1, r2)


def _heat_sample(rng, nodes):
    tau = _sample_tau(rng)
    lam = _sample_lambda(rng, tau)
    w = complex(rng.uniform(-0.45, 0.45), -rng.uniform(0.15, 0.85) * tau.imag)
    return {"w": w, "lambda": lam, "tau": tau}


def _heat_eval(x):
    p = EllipticParams(x["tau"])
    r_plus = kernels.heat_residual_dynamical(x["w"], x["lambda"], p, "+")
    r_minus = kernels.heat_residual_dynamical(-x["w"], x["lambda"], p, "-")
    r_gamma = kernels.heat_residual_gamma(x["w"], p)
    return max(r_plus, r_minus, r_gamma)


def _hhl_sample(rng, nodes):
    tau = _sample_tau(rng)
    p = EllipticParams(tau)
    lam = _sample_lambda(rng, tau)
    for _ in range(100):
        u = _sample_cell_point(rng, p)
        v = _sample_cell_point(rng, p)
        if lattice_distance(u - v, tau) >= _POINT_MARGIN:
            return {"u": u, "v": v, "lambda": lam, "tau": tau}
    raise RuntimeError("could not sample an hhl configuration")


def _hhl_eval(x):
    p = EllipticParams(x["tau"])
    r = rmatrix.build_r(x["u"], x["v"], x["lambda"], p)
    return max(rmatrix.weight_zero_defect(r), rmatrix.hh_commutator_defect(r))


def _cdybe_sample(rng, nodes):
    tau = _sample_tau(rng)
    p = EllipticParams(tau)
    # keep |Im lambda| below Im tau / 2 on top of the usual band margin
    lam = complex(rng.uniform(-0.4, 0.4), -rng.uniform(0.1, 0.45) * tau.imag)
    for _ in range(100):
        pts = [_sample_cell_point(rng, p) for _ in range(3)]
        diffs = [pts[0] - pts[1], pts[0] - pts[2], pts[1] - pts[2]]
        if all(lattice_distance(d, tau) >= _POINT_MARGIN for d in diffs):
            return {"u1": pts[0], "u2": pts[1], "u3": pts[2], "lambda": lam, "tau": tau}
    raise RuntimeError("could not sample a cdybe configuration")


def _cdybe_eval(x):
    p = EllipticParams(x["tau"])
    return rmatrix.cdybe_residual(x["u1"], x["u2"], x["u3"], x["lambda"], p)


RLL_SIGNS = (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))


def _rll_sample(rng, nodes):
    """Alternate the two evaluation domains: moduli-ordered points (the
    annulus picture) and height-ordered points (the cylinder picture).
    The relation itself is the same; at central charge zero the two
    families of L-slices differ only in where their test points live."""
    tau = _sample_tau(rng)
    signs = RLL_SIGNS[int(rng.integers(4))]
    lam = _sample_lambda(rng, tau)
    if rng.uniform() < 0.5:
        u, v, w = _sample_ordered_moduli(rng, 3)
    else:
        u, v, w = _sample_ordered_heights(rng, 3, tau.imag)
    return {"u": u, "v": v, "w": w, "lambda": lam, "signs": signs, "tau": tau}


def _rll_eval(x):
    p = EllipticParams(x["tau"])
    return rmatrix.rll_residual(x["u"], x["v"], x["w"], x["lambda"], x["signs"], p)


def _cybe_sampler(case):
    def sample(rng, nodes):
        if case == "c":
            kind = "c_cyl"
        else:
            kind = f"{case}_k0" if rng.uniform() < 0.5 else f"{case}_cyl"
        mu = eta = None
        if kind.endswith("k0"):
            u1, u2, u3 = _sample_ordered_moduli(rng, 3)
        else:
            eta = rng.uniform(0.6, 1.6)
            height = 1.0 / eta if case == "c" else 1.0
            u1, u2, u3 = _sample_ordered_heights(rng, 3, height)
            if case == "c":
                mu = rng.uniform(0.1, 0.9)
        return {"kind": kind, "u1": u1, "u2": u2, "u3": u3, "mu": mu, "eta": eta}

    return sample


def _cybe_eval(x):
    return rmatrix.cybe_residual(x["kind"], x["u1"], x["u2"], x["u3"], x["mu"], x["eta"])


GREEN_SERIES_ORDER = 8


def _green_series_sample(rng, nodes):
    tau = _sample_tau(rng)
    p = EllipticParams(tau)
    lam = _sample_lambda(rng, tau)
    if rng.uniform() < 0.2:
        lam = None
    for _ in range(100):
        u = _sample_cell_point(rng, p)
        if 0.15 <= abs(u) <= 0.45:
            return {"u": u, "lambda": lam, "tau": tau, "nodes": nodes}
    raise RuntimeError("could not sample a green-series point")


def _green_series_eval(x):
    p = EllipticParams(x["tau"])
    return series.green_series_check(x["u"], x["lambda"], p, GREEN_SERIES_ORDER, x["nodes"])


@dataclass(frozen=True)
class Suite:
    name: str
    header: str
    sample: callable
    evaluate: callable


SUITES = {
    s.name: s
    for s in (
        Suite(
            "quasi-periodicity",
            "theta(u+1) = -theta(u);  theta(u+tau) = -e^{-2 pi i u - pi i tau} theta(u);  "
            "theta(0) = 0, theta'(0) = 1",
            _quasi_periodicity_sample,
            _quasi_periodicity_eval,
        ),
        Suite(
            "fay",
            "g_lam(u-z) g_lam(z) = g_lam(u) [g0(u-z) + g0(z)] - d_lam g_lam(u)",
            _fay_sample,
            _fay_eval,
        ),
        Suite(
            "duality",
            "<eps^n, eps_m> = delta_{n,m} for the dual Laurent bases of the "
            "annulus kernels, |n|, |m| <= 12",
            _duality_sample,
            _duality_eval,
        ),
        Suite(
            "projections",
            "P+ + P- = id;  P+- idempotent;  P+ P- = P- P+ = 0 on truncated series",
            _projections_sample,
            _projections_eval,
        ),
        Suite(
            "convolution-k0",
            "contour-pairing products of annulus kernels: "
            "<g(u-z) g(z-v)> = {g(u-v), 0, -g(u-v)} by contour ordering",
            _convolution_sampler("k0"),
            _convolution_eval,
        ),
        Suite(
            "convolution-cyl",
            "segment-pairing products of cylinder kernels with the d_lam G and "
            "gamma correction terms",
            _convolution_sampler("cyl"),
            _convolution_eval,
        ),
        Suite(
            "shift",
            "G_lam^+(w - tau) = e^{2 pi i lam} G_lam^-(w);  G(w - tau) = 2 pi i - G(-w)",
            _shift_sample,
            _shift_eval,
        ),
        Suite(
            "heat",
            "(1/2 pi i) d_u d_lam G_lam = d_tau G_lam;  (1/4 pi i) d_u gamma = d_tau G",
            _heat_sample,
            _heat_eval,
        ),
        Suite(
            "hhl",
            "r-matrix weight-zero sparsity and commutation with H x 1 + 1 x H",
            _hhl_sample,
            _hhl_eval,
        ),
        Suite(
            "cdybe",
            "[r12,r13] + [r12,r23] + [r13,r23] = H_1 d_lam r23 - H_2 d_lam r13 "
            "+ H_3 d_lam r12",
            _cdybe_sample,
            _cdybe_eval,
        ),
        Suite(
            "rll",
            "[L1, L2] = [L1 + L2, r12] + H_1 d_lam L2 - H_2 d_lam L1 + H_3 d_lam r12 "
            "at central charge zero, all four sign pairs",
            _rll_sample,
            _rll_eval,
        ),
        Suite(
            "cybe-a",
            "[r12,r13] + [r12,r23] + [r13,r23] = 0 for the rational (1/w) matrices",
            _cybe_sampler("a"),
            _cybe_eval,
        ),
        Suite(
            "cybe-b",
            "[r12,r13] + [r12,r23] + [r13,r23] = 0 for the trigonometric "
            "(pi cot pi w) matrices",
            _cybe_sampler("b"),
            _cybe_eval,
        ),
        Suite(
            "cybe-c",
            "[r12,r13] + [r12,r23] + [r13,r23] = 0 for the mu-twisted cylinder "
            "(coth / twisted exponential) matrices",
            _cybe_sampler("c"),
            _cybe_eval,
        ),
        Suite(
            "green-series",
            "z-Taylor coefficients of g_lam(u-z) from contour extraction match "
            "the normalized-derivative basis from theta Taylor quotients",
            _green_series_sample,
            _green_series_eval,
        ),
    )
}

SUITE_NAMES = tuple(SUITES)


def thread_count():
    """Worker count from ELLIPTIC_RMATRIX_THREADS (default 1, sequential)."""
    raw = os.environ.get("ELLIPTIC_RMATRIX_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise ValueError(f"ELLIPTIC_RMATRIX_THREADS must be an integer, got {raw!r}")
    return max(1, count)


def run_suite(name, samples=DEFAULT_SAMPLES, seed=DEFAULT_SEED, tol=DEFAULT_TOL,
              nodes=kernels.DEFAULT_QUAD_NODES):
    """Run one suite and aggregate its residuals into a report.

    The sample plan is drawn sequentially from the seed before any
    evaluation, so the report does not depend on the worker count.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    suite = SUITES[name]
    rng = np.random.default_rng(seed)
    plan = [suite.sample(rng, nodes) for _ in range(samples)]
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            residuals = list(pool.map(suite.evaluate, plan))
    else:
        residuals = [suite.evaluate(x) for x in plan]
    residuals = [float(r) for r in residuals]
    failures = [
        (inputs, r) for inputs, r in zip(plan, residuals) if not r < tol
    ]
    max_res = max(residuals) if residuals else 0.0
    mean_res = float(np.mean(residuals)) if residuals else 0.0
    return VerificationReport(
        suite=name,
        header=suite.header,
        samples=samples,
        seed=seed,
        tolerance=tol,
        max_residual=max_res,
        mean_residual=mean_res,
        failures=failures,
        passed=(max_res < tol) and not failures,
    )
