"""Rational and trigonometric degenerations of the elliptic kernels.

When one or both periods of the torus are sent to infinity the annulus
and cylinder kernels collapse to elementary closed forms:

    case (a)  both periods large:      g-kernels -> 1/w            (rational)
    case (b)  tau -> i*infinity:       g-kernels -> pi*cot(pi*w)   (trigonometric)
    case (c)  real period large,
              tau = i/(eta*omega):     g-kernels -> pi*eta*coth(pi*eta*w)
                                       and the mu-twisted family
                                       2*pi*eta*e^{-2*pi*eta*mu*w}/(1-e^{-2*pi*eta*w})

The +/- variants of each kernel share one closed form and differ only
by the admissible domain -- ordering of moduli for the annulus family,
horizontal strips for the cylinder family.  Boundary values (the i0
prescriptions) are represented by rejecting the boundary, never by
evaluating on it.

The mu-twisted family is single-valued in mu only inside an
analyticity zone: mu and mu + 1 give the same kernel, but the strip of
zones is bounded by the lines Re(mu) = Im(eta)Im(mu)/Re(eta) + n where
the defining integrals hit a pole.  check_zone() rejects mu outside
the open fundamental zone (margin 1e-3); other regularizations on the
boundary do not satisfy the Yang-Baxter equation, so no default is
guessed.

limit_error() measures how fast scaled elliptic kernels approach these
limits: case (a) is O(1/omega^2), case (b) is O(e^{-2*pi*T}), and case
(c) carries an exact linear drift -2*pi*eta*w/omega (plus exponentially
small terms), hence O(1/omega).
"""

import numpy as np

from .kernels import POLE_MARGIN, fourier_G_lambda, g0, g_lambda
from .rmatrix import EF, FE, HH
from .theta import (
    DomainError,
    EllipticParams,
    PoleProximityError,
    StripViolationError,
    ZoneViolationError,
    theta_taylor,
)

KERNEL_IDS = (
    "phi+",
    "phi-",
    "psi_trig",
    "psi_tilde+",
    "psi_tilde-",
    "psi_cth",
    "psi_mu+",
    "psi_mu-",
)
R_KINDS = ("a_k0", "a_cyl", "b_k0", "b_cyl", "c_cyl")
ZONE_MARGIN = 1e-3


class OrderingViolationError(DomainError):
    """Raised when annulus-family arguments are not modulus-ordered."""


def _require_strip(w, lo, hi, what):
    im = complex(w).imag
    if not lo < im < hi:
        raise StripViolationError(
            f"{what} requires {lo:g} < Im w < {hi:g}, got Im w = {im:g}"
        )


def _require_eta(eta):
    if eta is None:
        raise DomainError("this kernel needs the parameter eta")
    eta = complex(eta)
    if eta.real <= 0:
        raise DomainError(f"eta must have positive real part, got {eta!r}")
    return eta


def check_zone(mu, eta, margin=ZONE_MARGIN):
    """Validate that mu lies strictly inside the fundamental zone.

    The zone is Im(eta)Im(mu)/Re(eta) < Re(mu) < same + 1; its boundary
    translates (offset = integer) are poles of the defining integrals.
    Returns the offset Re(mu) - Im(eta)Im(mu)/Re(eta), which must land
    in (margin, 1 - margin).
    """
    eta = _require_eta(eta)
    mu = complex(mu)
    offset = mu.real - eta.imag * mu.imag / eta.real
    if not margin < offset < 1.0 - margin:
        raise ZoneViolationError(
            f"mu = {mu!r} has zone offset {offset:.6g}, "
            f"outside ({margin:g}, {1 - margin:g})"
        )
    return offset


def _check_integer_distance(w, what):
    w = complex(w)
    if abs(w - round(w.real)) < POLE_MARGIN:
        raise PoleProximityError(f"{what}: w = {w!r} is within {POLE_MARGIN:g} of a pole")


def phi(w, sign):
    """Rational kernel 1/w; '+' lives below the real axis, '-' above."""
    w = complex(w)
    if sign == "+":
        _require_strip(w, -np.inf, 0.0, "phi+")
    elif sign == "-":
        _require_strip(w, 0.0, np.inf, "phi-")
    else:
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    if abs(w) < POLE_MARGIN:
        raise PoleProximityError(f"phi: w = {w!r} too close to the pole at 0")
    return 1.0 / w


def psi_trig(w):
    """Trigonometric kernel pi*cot(pi*w) without a strip tag.

    This is the annulus-family closed form: the +/- there is encoded in
    the ordering of |u|, |v|, not in the sign of Im w, so real w is fine.
    """
    w = complex(w)
    _check_integer_distance(w, "psi_trig")
    return np.pi / np.tan(np.pi * w)


def psi_tilde(w, sign):
    """Cylinder trigonometric kernel: pi*cot(pi*w) with a strip tag.

    '+' is the boundary value from Im w < 0 (the geometric series
    pi*i + 2*pi*i*sum_{n>0} e^{-2*pi*i*n*w}), '-' from Im w > 0.
    """
    w = complex(w)
    if sign == "+":
        _require_strip(w, -np.inf, 0.0, "psi_tilde+")
    elif sign == "-":
        _require_strip(w, 0.0, np.inf, "psi_tilde-")
    else:
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    _check_integer_distance(w, "psi_tilde")
    return np.pi / np.tan(np.pi * w)


def psi_cth(w, eta):
    """pi*eta*coth(pi*eta*w) on the strip -Re(1/eta) < Im w < 0."""
    eta = _require_eta(eta)
    w = complex(w)
    width = (1.0 / eta).real
    _require_strip(w, -width, 0.0, "psi_cth")
    if abs(w) < POLE_MARGIN or abs(w + 1j / eta) < POLE_MARGIN:
        raise PoleProximityError(f"psi_cth: w = {w!r} too close to a pole")
    return np.pi * eta / np.tanh(np.pi * eta * w)


def psi_mu(w, sign, mu, eta):
    """mu-twisted cylinder kernel 2*pi*eta*e^{-2*pi*eta*mu*w}/(1-e^{-2*pi*eta*w}).

    Both signs share this closed form; '+' is defined on the strip
    -Re(1/eta) < Im w < 0 and '-' on its mirror 0 < Im w < Re(1/eta).
    mu must lie inside the fundamental zone (see check_zone); at
    mu = 1/2, eta = 1 the kernel reduces to pi/sinh(pi*w).
    """
    eta = _require_eta(eta)
    check_zone(mu, eta)
    w = complex(w)
    mu = complex(mu)
    width = (1.0 / eta).real
    if sign == "+":
        _require_strip(w, -width, 0.0, "psi_mu+")
    elif sign == "-":
        _require_strip(w, 0.0, width, "psi_mu-")
    else:
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    if abs(w) < POLE_MARGIN or abs(w + 1j / eta) < POLE_MARGIN or abs(w - 1j / eta) < POLE_MARGIN:
        raise PoleProximityError(f"psi_mu: w = {w!r} too close to a pole")
    x = np.exp(-2.0 * np.pi * eta * w)
    return 2.0 * np.pi * eta * np.exp(-2.0 * np.pi * eta * mu * w) / (1.0 - x)


def degenerate_kernel(kernel_id, w, mu=None, eta=None):
    """Evaluate one of the degenerate kernels by id, with full validation."""
    if kernel_id == "phi+":
        return phi(w, "+")
    if kernel_id == "phi-":
        return phi(w, "-")
    if kernel_id == "psi_trig":
        return psi_trig(w)
    if kernel_id == "psi_tilde+":
        return psi_tilde(w, "+")
    if kernel_id == "psi_tilde-":
        return psi_tilde(w, "-")
    if kernel_id == "psi_cth":
        return psi_cth(w, eta)
    if kernel_id == "psi_mu+":
        if mu is None:
            raise DomainError("psi_mu needs the parameter mu")
        return psi_mu(w, "+", mu, eta)
    if kernel_id == "psi_mu-":
        if mu is None:
            raise DomainError("psi_mu needs the parameter mu")
        return psi_mu(w, "-", mu, eta)
    raise DomainError(f"unknown kernel id {kernel_id!r}; choose from {KERNEL_IDS}")


def build_degenerate_r(kind, u, v, mu=None, eta=None):
    """The degenerate 4x4 r-matrices.

    kinds "a_k0"/"b_k0" are the annulus regularizations (valid for
    |u| > |v|); "a_cyl"/"b_cyl"/"c_cyl" are the cylinder ones (valid
    for Im(u - v) < 0, and within the eta-strip for "c_cyl").  Entries:

        a:  diag (1,-1,-1,1)/(2w),  both off-diagonal entries 1/w
        b:  diag (1,-1,-1,1)*pi*cot(pi*w)/2,
            entry(2,3) = -pi*i + pi*cot(pi*w),
            entry(3,2) = +pi*i + pi*cot(pi*w)
        c:  diag (1,-1,-1,1)*Psi(w)/2 with Psi = pi*eta*coth(pi*eta*w),
            entry(2,3) = -PsiMu^-(v - u), entry(3,2) = PsiMu^+(u - v).

    The a/b matrices are the same closed forms for both families; only
    the admissible sampling domain differs, which is exactly how the
    two regularizations of the underlying distributions differ.
    """
    u, v = complex(u), complex(v)
    w = u - v
    if kind in ("a_k0", "b_k0"):
        if not abs(u) > abs(v):
            raise OrderingViolationError(
                f"kind {kind!r} requires |u| > |v|, got |u| = {abs(u):.6g}, |v| = {abs(v):.6g}"
            )
        if kind == "a_k0":
            if abs(w) < POLE_MARGIN:
                raise PoleProximityError(f"u - v = {w!r} too close to 0")
            base = 1.0 / w
            return 0.5 * base * HH + base * (EF + FE)
        base = psi_trig(w)
        return 0.5 * base * HH + (base - 1j * np.pi) * EF + (base + 1j * np.pi) * FE
    if kind == "a_cyl":
        base = phi(w, "+")
        return 0.5 * base * HH + base * (EF + FE)
    if kind == "b_cyl":
        base = psi_tilde(w, "+")
        return 0.5 * base * HH + (base - 1j * np.pi) * EF + (base + 1j * np.pi) * FE
    if kind == "c_cyl":
        if mu is None:
            raise DomainError("kind 'c_cyl' needs the parameter mu")
        diag = psi_cth(w, eta)
        upper = -psi_mu(v - u, "-", mu, eta)
        lower = psi_mu(w, "+", mu, eta)
        return 0.5 * diag * HH + upper * EF + lower * FE
    raise DomainError(f"unknown kind {kind!r}; choose from {R_KINDS}")


def _theta_ratio(w, p):
    """theta'(w)/theta(w) through the order-1 Taylor data.

    Unlike kernels.g0 this routes through theta_taylor, which switches
    to the modular transform when Im tau is small -- exactly the regime
    the case (c) ladder lives in.
    """
    t = theta_taylor(w, p, 1)
    return t[1] / t[0]


def limit_error(case, scale, w, p=None, lam=None, mu=None, eta=None):
    """Distance between a scaled elliptic kernel and its degenerate limit.

    Returns a dict of named absolute errors at the sample point w:

      case "a" (scale = omega, fixed p, lam):
          g0:        |(1/om) g0(w/om) - 1/w|
          g_lambda:  |(1/om) g_lambda(w/om, lam/om) - (1/lam + 1/w)|
      case "b" (scale = T, tau = i*T; lam fixed):
          g0:        |g0(w; iT) - pi*cot(pi*w)|
          g_lambda:  |g_lambda(w, lam; iT) - (pi*cot(pi*lam) + pi*cot(pi*w))|
      case "c" (scale = omega, tau = i/(eta*om); mu in zone, lam in band):
          g0:        |(1/om) theta'/theta(w/om) - pi*eta*coth(pi*eta*w)|
          g_mu:      |(1/om) G+_{mu + lam/om}(w/om) - PsiMu+(w)|
    """
    if case == "a":
        if p is None or lam is None:
            raise DomainError("case 'a' needs p and lam")
        om = float(scale)
        w = complex(w)
        lam = complex(lam)
        err_g = abs(g0(w / om, p) / om - 1.0 / w)
        err_l = abs(g_lambda(w / om, lam / om, p) / om - (1.0 / lam + 1.0 / w))
        return {"g0": err_g, "g_lambda": err_l}
    if case == "b":
        if lam is None:
            raise DomainError("case 'b' needs lam")
        t_im = float(scale)
        pb = EllipticParams(1j * t_im)
        w = complex(w)
        lam = complex(lam)
        err_g = abs(g0(w, pb) - np.pi / np.tan(np.pi * w))
        err_l = abs(
            g_lambda(w, lam, pb)
            - (np.pi / np.tan(np.pi * lam) + np.pi / np.tan(np.pi * w))
        )
        return {"g0": err_g, "g_lambda": err_l}
    if case == "c":
        eta = _require_eta(eta)
        if mu is None or lam is None:
            raise DomainError("case 'c' needs mu and lam")
        om = float(scale)
        w = complex(w)
        pc = EllipticParams(1j / (eta * om))
        err_g = abs(_theta_ratio(w / om, pc) / om - psi_cth(w, eta))
        lam_total = complex(mu) + complex(lam) / om
        val = fourier_G_lambda(w / om, lam_total, pc, "+") / om
        err_m = abs(val - psi_mu(w, "+", mu, eta))
        return {"g0": err_g, "g_mu": err_m}
    raise DomainError(f"unknown case {case!r}; choose 'a', 'b' or 'c'")
