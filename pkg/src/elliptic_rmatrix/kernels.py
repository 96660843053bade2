"""Green kernels of the elliptic current algebra and their identities.

Two families of kernels are built from the odd theta function:

* annulus kernels, evaluated on circles around the origin,

      g0(w)       = theta'(w) / theta(w),
      g_lambda(w) = theta(w + lambda) / (theta(w) * theta(lambda)),

  with a simple pole of residue 1 at every lattice point w in Z + tau*Z
  (g_lambda additionally has zeros/poles shifted by lambda);

* cylinder kernels, given by Fourier series on horizontal strips,

      G_lambda^+/-(w) = +/- 2*pi*i * sum_n e^{-2*pi*i*n*w} / (1 - e^{+/-2*pi*i*(n*tau - lambda)}),
      G(w)            = pi*i + 2*pi*i * sum_{n!=0} e^{-2*pi*i*n*w} / (1 - e^{2*pi*i*n*tau}),
      gamma(w)        = -2*pi^2 + 8*pi^2 * sum_{n!=0} e^{-2*pi*i*n*w+2*pi*i*n*tau}
                                           / (1 - e^{2*pi*i*n*tau})^2.

  Inside its strip of convergence each of G_lambda^+/- and G agrees
  pointwise with the corresponding annulus kernel; the two Fourier
  series differ only as distributions (their coefficient difference
  telescopes to a delta function).

The module also provides the trapezoidal contour pairings
((1/2*pi*i) times a circle or period-segment integral, both spectrally
accurate for the periodic analytic integrands used here) and a catalog
of convolution identities `convolution_residual` that the verification
suites sample.
"""

from __future__ import annotations

import numpy as np

from .theta import (
    BandViolationError,
    DomainError,
    EllipticParams,
    PoleProximityError,
    StripViolationError,
    TruncationOverflowError,
    lattice_distance,
    theta_block,
)

POLE_MARGIN = 1e-6
DEFAULT_QUAD_NODES = 128
MIN_QUAD_NODES = 32
MAX_FOURIER_TERMS = 1_000_000


def _check_pole_distance(w, p: EllipticParams, margin: float, what: str) -> None:
    dist = np.min(lattice_distance(w, p.tau))
    if dist < margin:
        raise PoleProximityError(
            f"{what} lies within {margin:g} of a lattice point "
            f"(distance {dist:.3e}); the kernel has a pole there"
        )


def g0(w, p: EllipticParams, margin: float = POLE_MARGIN):
    """theta'(w)/theta(w), the lambda-independent Green kernel.

    The argument is reduced to the fundamental cell first, using
    g0(w + 1) = g0(w) and g0(w + tau) = g0(w) - 2*pi*i, so the kernel
    stays finite for arguments many cells away from the origin where
    theta itself would overflow.
    """
    w_arr = np.asarray(w, dtype=complex)
    _check_pole_distance(w_arr, p, margin, "argument of g0")
    n_cells = np.rint(w_arr.imag / p.tau.imag)
    w0 = w_arr - n_cells * p.tau
    w0 = w0 - np.rint(w0.real)
    block = theta_block(w0, p, 1)
    values = block[1] / block[0] - 2j * np.pi * n_cells
    return complex(values) if w_arr.ndim == 0 else values


def _check_lambda(lam: complex, p: EllipticParams, margin: float) -> None:
    if lattice_distance(lam, p.tau) < margin:
        raise PoleProximityError(
            f"lambda = {lam!r} lies within {margin:g} of a lattice point, "
            "where theta(lambda) vanishes"
        )


def g_lambda(w, lam, p: EllipticParams, margin: float = POLE_MARGIN):
    """theta(w + lambda) / (theta(w) * theta(lambda)).

    Reduction: the kernel is 1-periodic and satisfies
    g_lambda(w + tau) = e^{-2*pi*i*lambda} g_lambda(w), which is applied
    before evaluating theta so that distant arguments stay in range.
    """
    lam = complex(lam)
    _check_lambda(lam, p, margin)
    w_arr = np.asarray(w, dtype=complex)
    _check_pole_distance(w_arr, p, margin, "argument of g_lambda")
    n_cells = np.rint(w_arr.imag / p.tau.imag)
    w0 = w_arr - n_cells * p.tau
    w0 = w0 - np.rint(w0.real)
    theta_lam = theta_block(lam, p, 0)[0]
    num = theta_block(w0 + lam, p, 0)[0]
    den = theta_block(w0, p, 0)[0]
    values = np.exp(-2j * np.pi * n_cells * lam) * num / (den * theta_lam)
    return complex(values) if w_arr.ndim == 0 else values


def dlambda_g_lambda(w, lam, p: EllipticParams, margin: float = POLE_MARGIN):
    """Derivative of g_lambda(w) in the dynamical parameter lambda.

    Closed form from the quotient rule,

        d/dlambda g_lambda(w)
            = [theta'(w+lambda)*theta(lambda) - theta(w+lambda)*theta'(lambda)]
              / (theta(w) * theta(lambda)^2),

    combined with the same cell reduction as g_lambda (the reduction
    factor e^{-2*pi*i*n*lambda} now also gets differentiated).
    """
    lam = complex(lam)
    _check_lambda(lam, p, margin)
    w_arr = np.asarray(w, dtype=complex)
    _check_pole_distance(w_arr, p, margin, "argument of dlambda_g_lambda")
    n_cells = np.rint(w_arr.imag / p.tau.imag)
    w0 = w_arr - n_cells * p.tau
    w0 = w0 - np.rint(w0.real)
    tl, tl1 = theta_block(lam, p, 1)
    num, num1 = theta_block(w0 + lam, p, 1)
    den = theta_block(w0, p, 0)[0]
    base = num / (den * tl)
    dbase = (num1 * tl - num * tl1) / (den * tl**2)
    phase = np.exp(-2j * np.pi * n_cells * lam)
    values = phase * (dbase - 2j * np.pi * n_cells * base)
    return complex(values) if w_arr.ndim == 0 else values


def fay_residual(u, z, lam, p: EllipticParams) -> float:
    """Defect of the three-term (degenerate Fay) addition identity.

    |g_lambda(u-z) g_lambda(z) - g_lambda(u) [g0(u-z) + g0(z)]
        + d/dlambda g_lambda(u)|

    which vanishes identically in (u, z, lambda).
    """
    lhs = g_lambda(u - z, lam, p) * g_lambda(z, lam, p)
    rhs = g_lambda(u, lam, p) * (g0(u - z, p) + g0(z, p)) - dlambda_g_lambda(u, lam, p)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Fourier kernels on the cylinder
# ---------------------------------------------------------------------------


def _frac_sum(a: np.ndarray, b: np.ndarray, power: int) -> np.ndarray:
    """Stable sum over n of e^{a_n} * x_n / (1 - x_n)^power with x_n = e^{b_n}.

    For power = 0 the summand is e^{a_n} / (1 - x_n).  Terms with
    Re(b_n) > 0 (|x_n| > 1) are rewritten through 1/x_n so that no
    intermediate exponential overflows:

        1/(1-x)       = -x^{-1}/(1-x^{-1}),
        x/(1-x)^2     =  x^{-1}/(1-x^{-1})^2.

    a and b have shape (n_terms,) + point_shape; the n-axis is summed.
    """
    small = b.real <= 0.0
    out = np.zeros_like(a)
    with np.errstate(over="ignore", invalid="ignore"):
        if power == 0:
            np.copyto(out, np.exp(a) / (1.0 - np.exp(b)), where=small)
            np.copyto(out, -np.exp(a - b) / (1.0 - np.exp(-b)), where=~small)
        elif power == 2:
            np.copyto(out, np.exp(a + b) / (1.0 - np.exp(b)) ** 2, where=small)
            np.copyto(out, np.exp(a - b) / (1.0 - np.exp(-b)) ** 2, where=~small)
        else:
            raise ValueError(f"unsupported power {power}")
    return out.sum(axis=0)


def _strip_margin(w_arr: np.ndarray, p: EllipticParams, sign: str, what: str) -> float:
    """Distance of Im(w) from the strip boundary for G_lambda^{sign}."""
    im = w_arr.imag
    if sign == "+":
        lo, hi = -p.tau.imag, 0.0
    else:
        lo, hi = 0.0, p.tau.imag
    margin = float(np.min(np.minimum(im - lo, hi - im)))
    if margin <= 0.0:
        raise StripViolationError(
            f"{what} requires {lo:g} < Im w < {hi:g}; "
            f"got Im w in [{im.min():g}, {im.max():g}]"
        )
    return margin


def _check_band(lam: complex, p: EllipticParams) -> None:
    if not (-p.tau.imag < lam.imag < 0.0):
        raise BandViolationError(
            f"dynamical parameter must satisfy -Im tau < Im lambda < 0; "
            f"got Im lambda = {lam.imag:g} with Im tau = {p.tau.imag:g}"
        )


def _fourier_terms(margin: float, p: EllipticParams, offset: float = 0.0) -> int:
    """Truncation order from the geometric tail bound e^{-2 pi N margin}."""
    n_terms = int(np.ceil((np.log(1.0 / p.series_tol) + offset) / (2.0 * np.pi * margin))) + 8
    if n_terms > MAX_FOURIER_TERMS:
        raise TruncationOverflowError(
            f"Fourier series needs {n_terms} terms for strip margin {margin:.3e}; "
            "the evaluation point is too close to the strip boundary"
        )
    return n_terms


def fourier_G_lambda(w, lam, p: EllipticParams, sign: str, truncation: int | None = None):
    """Cylinder kernel G_lambda^{+/-}(w) from its Fourier series.

    sign "+" converges on the lower strip -Im tau < Im w < 0, sign "-"
    on the upper strip 0 < Im w < Im tau; lambda must lie in the band
    -Im tau < Im lambda < 0.  Within its strip the value agrees with
    g_lambda(w).
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    lam = complex(lam)
    _check_band(lam, p)
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    margin = _strip_margin(w_arr, p, sign, f"G_lambda^{sign}")
    if truncation is None:
        truncation = _fourier_terms(margin, p, offset=2.0 * np.pi * abs(lam.imag))
    sigma = 1.0 if sign == "+" else -1.0
    n = np.arange(-truncation, truncation + 1)
    shape_pad = (...,) + (None,) * w_arr.ndim
    a = (-2j * np.pi * n)[shape_pad] * w_arr[None]
    b = np.broadcast_to(
        (sigma * 2j * np.pi * (n * p.tau - lam))[shape_pad], a.shape
    ).copy()
    values = sigma * 2j * np.pi * _frac_sum(a, b, 0)
    return complex(values[0]) if np.asarray(w).ndim == 0 else values


def fourier_dlambda_G_lambda(w, lam, p: EllipticParams, truncation: int | None = None):
    """lambda-derivative of the cylinder kernels (same for both signs).

    Term-wise differentiation gives

        d/dlambda G_lambda^{+/-}(w)
            = 4*pi^2 sum_n e^{-2*pi*i*n*w} x_n / (1 - x_n)^2,
        x_n = e^{2*pi*i*(n*tau - lambda)},

    which converges on the full double strip |Im w| < Im tau.
    """
    lam = complex(lam)
    _check_band(lam, p)
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    margin = float(p.tau.imag - np.max(np.abs(w_arr.imag)))
    if margin <= 0.0:
        raise StripViolationError(
            f"d/dlambda G_lambda requires |Im w| < Im tau = {p.tau.imag:g}"
        )
    if truncation is None:
        truncation = _fourier_terms(margin, p, offset=2.0 * np.pi * abs(lam.imag))
    n = np.arange(-truncation, truncation + 1)
    shape_pad = (...,) + (None,) * w_arr.ndim
    a = (-2j * np.pi * n)[shape_pad] * w_arr[None]
    b = np.broadcast_to((2j * np.pi * (n * p.tau - lam))[shape_pad], a.shape).copy()
    values = 4.0 * np.pi**2 * _frac_sum(a, b, 2)
    return complex(values[0]) if np.asarray(w).ndim == 0 else values


def fourier_G(w, p: EllipticParams, truncation: int | None = None):
    """Cylinder kernel G(w) (the lambda-independent half-current kernel).

    Converges on the lower strip -Im tau < Im w < 0, where it agrees
    with g0(w).
    """
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    margin = _strip_margin(w_arr, p, "+", "G")
    if truncation is None:
        truncation = _fourier_terms(margin, p)
    n = np.concatenate([np.arange(-truncation, 0), np.arange(1, truncation + 1)])
    shape_pad = (...,) + (None,) * w_arr.ndim
    a = (-2j * np.pi * n)[shape_pad] * w_arr[None]
    b = np.broadcast_to((2j * np.pi * n * p.tau)[shape_pad], a.shape).copy()
    values = 1j * np.pi + 2j * np.pi * _frac_sum(a, b, 0)
    return complex(values[0]) if np.asarray(w).ndim == 0 else values


def fourier_gamma(w, p: EllipticParams, truncation: int | None = None):
    """The distribution gamma(w) correcting the G * G convolution.

    gamma(w) = -2*pi^2 + 8*pi^2 sum_{n != 0} e^{-2*pi*i*n*w} x_n/(1-x_n)^2
    with x_n = e^{2*pi*i*n*tau}; converges for |Im w| < Im tau.
    """
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    margin = float(p.tau.imag - np.max(np.abs(w_arr.imag)))
    if margin <= 0.0:
        raise StripViolationError(
            f"gamma requires |Im w| < Im tau = {p.tau.imag:g}, "
            f"got max |Im w| = {np.max(np.abs(w_arr.imag)):g}"
        )
    if truncation is None:
        truncation = _fourier_terms(margin, p)
    n = np.concatenate([np.arange(-truncation, 0), np.arange(1, truncation + 1)])
    shape_pad = (...,) + (None,) * w_arr.ndim
    a = (-2j * np.pi * n)[shape_pad] * w_arr[None]
    b = np.broadcast_to((2j * np.pi * n * p.tau)[shape_pad], a.shape).copy()
    values = -2.0 * np.pi**2 + 8.0 * np.pi**2 * _frac_sum(a, b, 2)
    return complex(values[0]) if np.asarray(w).ndim == 0 else values


def fourier_dtau_G_lambda(w, lam, p: EllipticParams, sign: str, truncation: int | None = None):
    """Term-wise tau-derivative of G_lambda^{+/-}.

    d/dtau (1/(1 - x_n)) = sigma*2*pi*i*n * x_n/(1-x_n)^2 for
    x_n = e^{sigma*2*pi*i*(n*tau-lambda)}, so

        d/dtau G_lambda^{sigma}(w)
            = -4*pi^2 * sigma^2 * sum_n n e^{-2*pi*i*n*w} x_n/(1-x_n)^2.
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    lam = complex(lam)
    _check_band(lam, p)
    w_arr = np.atleast_1d(np.asarray(w, dtype=complex))
    margin = _strip_margin(w_arr, p, sign, f"d/dtau G_lambda^{sign}")
    if truncation is None:
        truncation = _fourier_terms(margin, p, offset=2.0 * np.pi * abs(lam.imag))
    sigma = 1.0 if sign == "+" else -1.0
    n = np.arange(-truncation, truncation + 1)
    shape_pad = (...,) + (None,) * w_arr.ndim
    a = (-2j * np.pi * n)[shape_pad] * w_arr[None]
    a = a + np.log(np.where(n == 0, 1.0, np.abs(n)).astype(complex))[shape_pad]
    signs = np.sign(n)[shape_pad]
    b = np.broadcast_to(
        (sigma * 2j * np.pi * (n * p.tau - lam))[shape_pad], a.shape
    ).copy()
    small = b.real <= 0.0
    terms = np.zeros_like(b)
    with np.errstate(over="ignore", invalid="ignore"):
        np.copyto(terms, np.exp(a + b) / (1.0 - np.exp(b)) ** 2, where=small)
        np.copyto(terms, np.exp(a - b) / (1.0 - np.exp(-b)) ** 2, where=~small)
    values = -4.0 * np.pi**2 * (signs * terms).sum(axis=0)
    return complex(values[0]) if np.asarray(w).ndim == 0 else values


# ---------------------------------------------------------------------------
# Contour pairings
# ---------------------------------------------------------------------------


def _check_nodes(nodes: int) -> None:
    if nodes < MIN_QUAD_NODES:
        raise DomainError(f"need at least {MIN_QUAD_NODES} quadrature nodes, got {nodes}")


def circle_pairing(f, radius: float, nodes: int = DEFAULT_QUAD_NODES) -> complex:
    """(1/2*pi*i) * integral of f over the circle |z| = radius.

    Trapezoidal rule in the angle, which is exact for 1/z at any node
    count and spectrally accurate for integrands analytic in an annulus
    around the contour.  f must accept a complex ndarray.
    """
    _check_nodes(nodes)
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius!r}")
    phases = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    z = radius * phases
    return complex(radius * np.mean(np.asarray(f(z)) * phases))


def segment_pairing(f, height: float, nodes: int = DEFAULT_QUAD_NODES, x0: float = -0.5) -> complex:
    """(1/2*pi*i) * integral of f over one period segment at Im z = height.

    The integrand must be 1-periodic; the trapezoidal rule then
    integrates each Fourier mode exactly up to the node count.
    """
    _check_nodes(nodes)
    z = x0 + np.arange(nodes) / nodes + 1j * height
    return complex(np.mean(np.asarray(f(z))) / (2j * np.pi))


# ---------------------------------------------------------------------------
# Convolution identity catalog
# ---------------------------------------------------------------------------

K0_IDENTITIES = ("k0-pp", "k0-pm", "k0-mm", "k0-mp", "k0-gg", "k0-ggt")
CYL_IDENTITIES = ("cyl-pp", "cyl-pm", "cyl-mp", "cyl-mm", "cyl-gg-pp", "cyl-gg-pm")
CONVOLUTION_IDENTITIES = K0_IDENTITIES + CYL_IDENTITIES


def _safe_radius_bound(p: EllipticParams) -> float:
    """Largest circle radius keeping all lattice translates outside."""
    tau = p.tau
    return min(1.0, abs(tau), abs(1.0 - tau), abs(1.0 + tau))


def _k0_radius(identity: str, u: complex, v: complex, p: EllipticParams) -> float:
    """Contour radius encoding the ordering of each annulus identity."""
    au, av = abs(u), abs(v)
    outer_limit = _safe_radius_bound(p) - max(au, av)
    if identity in ("k0-pp", "k0-gg"):
        if not au > av > 0.0:
            raise DomainError(f"{identity} requires |u| > |v| > 0, got |u|={au:g}, |v|={av:g}")
        return float(np.sqrt(au * av))
    if identity == "k0-mm":
        if not av > au > 0.0:
            raise DomainError(f"{identity} requires |v| > |u| > 0, got |u|={au:g}, |v|={av:g}")
        return float(np.sqrt(au * av))
    if identity in ("k0-pm", "k0-ggt"):
        if min(au, av) <= 0.0:
            raise DomainError(f"{identity} requires u, v != 0")
        return 0.5 * min(au, av)
    # k0-mp: the contour surrounds both points but no lattice translate,
    # i.e. max(|u|, |v|) < r < Lmin - max(|u|, |v|) with Lmin the shortest
    # nonzero lattice vector.
    if outer_limit <= max(au, av):
        raise DomainError(
            f"{identity} needs room for a circle outside max(|u|, |v|) = "
            f"{max(au, av):g} but inside the nearest lattice translate "
            f"(at distance >= {outer_limit:g} from the origin)"
        )
    return 0.5 * (max(au, av) + outer_limit)


def _cyl_height(identity: str, u: complex, v: complex, p: EllipticParams) -> float:
    """Segment height encoding the strip ordering of each cylinder identity."""
    im_tau = p.tau.imag
    iu, iv = u.imag, v.imag
    windows = {
        "cyl-pp": (iu, iv),
        "cyl-pm": (max(iu, iv), min(iu, iv) + im_tau),
        "cyl-mp": (max(iu, iv) - im_tau, min(iu, iv)),
        "cyl-mm": (iv, iu),
        "cyl-gg-pp": (iu, iv),
        "cyl-gg-pm": (max(iu, iv), min(iu, iv) + im_tau),
    }
    lo, hi = windows[identity]
    if not lo < hi:
        raise DomainError(
            f"{identity} requires an intermediate height between {lo:g} and {hi:g}; "
            "reorder Im u, Im v"
        )
    return 0.5 * (lo + hi)


def convolution_residual(
    identity: str,
    u: complex,
    v: complex,
    p: EllipticParams,
    lam: complex | None = None,
    nodes: int = DEFAULT_QUAD_NODES,
) -> float:
    """|quadrature(LHS) - closed form(RHS)| for one convolution identity.

    Annulus family (contour pairing in z over a circle chosen from the
    moduli of u and v; one shared kernel g_lambda(u-z), the +/- labels
    live in the contour ordering):

        k0-pp : <g(u-z) g(z-v)>, |v| < r < |u|      -> g(u-v)
        k0-pm : same kernel,      r < min(|u|,|v|)  -> 0
        k0-mm : same kernel, |u| < r < |v|          -> -g(u-v)
        k0-mp : same kernel,      r > max(|u|,|v|)  -> 0
        k0-gg : g0 in place of g, |v| < r < |u|     -> g0(u-v)
        k0-ggt: <g0(u-z) g0(v-z)>, r < min          -> 0

    Cylinder family (segment pairing at a height separating the strips;
    D abbreviates (1/2*pi*i) d/dlambda G_lambda^+(u-v)):

        cyl-pp   : <G+(u-z) G+(z-v)> -> G+(u-v) - D
        cyl-pm   : <G+(u-z) G-(z-v)> -> -D
        cyl-mp   : <G-(u-z) G+(z-v)> -> -D
        cyl-mm   : <G-(u-z) G-(z-v)> -> -G-(u-v) - D
        cyl-gg-pp: <G(u-z) G(z-v)>   -> G(u-v) - gamma(u-v)/(4*pi*i)
        cyl-gg-pm: <G(u-z) G(v-z)>   -> gamma(u-v)/(4*pi*i)
    """
    if identity not in CONVOLUTION_IDENTITIES:
        raise DomainError(
            f"unknown convolution identity {identity!r}; "
            f"choose from {', '.join(CONVOLUTION_IDENTITIES)}"
        )
    u = complex(u)
    v = complex(v)
    needs_lambda = identity in ("k0-pp", "k0-pm", "k0-mm", "k0-mp") or identity.startswith(
        "cyl-"
    ) and "gg" not in identity
    if needs_lambda and lam is None:
        raise DomainError(f"{identity} needs the dynamical parameter lambda")

    if identity in K0_IDENTITIES:
        radius = _k0_radius(identity, u, v, p)
        if identity in ("k0-gg", "k0-ggt"):
            ker_u = lambda z: g0(u - z, p)
            ker_v = (lambda z: g0(v - z, p)) if identity == "k0-ggt" else (lambda z: g0(z - v, p))
            rhs = g0(u - v, p) if identity == "k0-gg" else 0.0
        else:
            ker_u = lambda z: g_lambda(u - z, lam, p)
            ker_v = lambda z: g_lambda(z - v, lam, p)
            rhs = {
                "k0-pp": lambda: g_lambda(u - v, lam, p),
                "k0-pm": lambda: 0.0,
                "k0-mm": lambda: -g_lambda(u - v, lam, p),
                "k0-mp": lambda: 0.0,
            }[identity]()
        lhs = circle_pairing(lambda z: ker_u(z) * ker_v(z), radius, nodes)
        return abs(lhs - rhs)

    height = _cyl_height(identity, u, v, p)
    if identity in ("cyl-gg-pp", "cyl-gg-pm"):
        if identity == "cyl-gg-pp":
            f = lambda z: fourier_G(u - z, p) * fourier_G(z - v, p)
            rhs = fourier_G(u - v, p) - fourier_gamma(u - v, p) / (4j * np.pi)
        else:
            f = lambda z: fourier_G(u - z, p) * fourier_G(v - z, p)
            rhs = fourier_gamma(u - v, p) / (4j * np.pi)
        lhs = segment_pairing(f, height, nodes)
        return abs(lhs - rhs)

    first, second = identity[len("cyl-") :]
    sign_map = {"p": "+", "m": "-"}
    s1, s2 = sign_map[first], sign_map[second]
    f = lambda z: fourier_G_lambda(u - z, lam, p, s1) * fourier_G_lambda(z - v, lam, p, s2)
    correction = fourier_dlambda_G_lambda(u - v, lam, p) / (2j * np.pi)
    if identity == "cyl-pp":
        rhs = fourier_G_lambda(u - v, lam, p, "+") - correction
    elif identity == "cyl-mm":
        rhs = -fourier_G_lambda(u - v, lam, p, "-") - correction
    else:
        rhs = -correction
    lhs = segment_pairing(f, height, nodes)
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# Shift and heat identities
# ---------------------------------------------------------------------------


def shift_residuals(w, lam, p: EllipticParams) -> tuple[float, float]:
    """Defects of the tau-shift identities, for 0 < Im w < Im tau:

        G_lambda^+(w - tau) = e^{2*pi*i*lambda} G_lambda^-(w),
        G(w - tau)          = 2*pi*i - G(-w).
    """
    w = complex(w)
    if not (0.0 < w.imag < p.tau.imag):
        raise StripViolationError("shift identities need 0 < Im w < Im tau")
    res_lam = abs(
        fourier_G_lambda(w - p.tau, lam, p, "+")
        - np.exp(2j * np.pi * complex(lam)) * fourier_G_lambda(w, lam, p, "-")
    )
    res_g = abs(fourier_G(w - p.tau, p) - (2j * np.pi - fourier_G(-w, p)))
    return res_lam, res_g


def heat_residual_dynamical(w, lam, p: EllipticParams, sign: str = "+") -> float:
    """Defect of (1/2*pi*i) d_u d_lambda G_lambda = d_tau G_lambda.

    The left side is evaluated from closed theta expressions
    (quotient-rule second derivative of g_lambda), the right side from
    the term-wise tau-derivative of the Fourier series, so the check
    crosses two independent evaluation routes.
    """
    w = complex(w)
    lam = complex(lam)
    num, num1, num2 = theta_block(w + lam, p, 2)
    tl, tl1 = theta_block(lam, p, 1)
    den, den1 = theta_block(w, p, 1)
    # N(w) = theta'(w+lam)theta(lam) - theta(w+lam)theta'(lam); then
    # d_u d_lam g = (N'(w) theta(w) - N(w) theta'(w)) / (theta(w)^2 theta(lam)^2)
    n_val = num1 * tl - num * tl1
    n_der = num2 * tl - num1 * tl1
    lhs = (n_der * den - n_val * den1) / (den**2 * tl**2) / (2j * np.pi)
    rhs = fourier_dtau_G_lambda(w, lam, p, sign)
    return abs(lhs - rhs)


def heat_residual_gamma(w, p: EllipticParams) -> float:
    """Defect of (1/4*pi*i) d_u gamma = d_tau G.

    d_u gamma comes from the term-wise derivative of the gamma series.
    d_tau G uses the heat equation of theta: with the normalization
    theta'(0) = 1 the tau-derivative is
    d_tau theta = (theta'' - theta'''(0) theta)/(4*pi*i), and in the
    logarithmic derivative the theta'''(0) terms cancel, leaving

        d_tau (theta'/theta) = (theta''' - (theta'/theta) theta'') / (4*pi*i*theta).

    The two sides come from a Fourier lattice sum and from theta Taylor
    data respectively, so the check crosses independent routes.
    """
    w = complex(w)
    margin = p.tau.imag - abs(w.imag)
    if margin <= 0.0:
        raise StripViolationError("heat identity needs |Im w| < Im tau")
    truncation = _fourier_terms(margin, p)
    n = np.concatenate([np.arange(-truncation, 0), np.arange(1, truncation + 1)])
    a = -2j * np.pi * n * w + np.log(np.abs(n).astype(complex))
    b = 2j * np.pi * n * p.tau
    small = b.real <= 0.0
    terms = np.zeros_like(b)
    with np.errstate(over="ignore", invalid="ignore"):
        np.copyto(terms, np.exp(a + b) / (1.0 - np.exp(b)) ** 2, where=small)
        np.copyto(terms, np.exp(a - b) / (1.0 - np.exp(-b)) ** 2, where=~small)
    dgamma = -16j * np.pi**3 * (np.sign(n) * terms).sum()
    lhs = dgamma / (4j * np.pi)
    th, th1, th2, th3 = theta_block(w, p, 3)
    rhs = (th3 - (th1 / th) * th2) / (4j * np.pi * th)
    return abs(lhs - rhs)
