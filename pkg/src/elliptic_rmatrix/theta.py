"""Odd Jacobi theta function, normalized so that theta'(0) = 1.

The function implemented here is the unique odd entire function with

    theta(u + 1)   = -theta(u),
    theta(u + tau) = -exp(-2*pi*i*u - pi*i*tau) * theta(u),
    theta'(0)      = 1,

for a modulus tau in the upper half plane.  Its zeros are exactly the
lattice points Z + tau*Z, all simple.  Numerically it is evaluated from
the sine series

    S(u) = sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1)*pi*u),   q = e^{i*pi*tau},

as theta(u) = S(u) / S'(0); the normalization makes theta'(0) = 1 exact.
Arguments are first reduced to the fundamental cell using the
quasi-periodicity, which keeps the sine series well conditioned.

For very small Im(tau) the series needs many terms and loses digits to
cancellation.  `theta_small_imtau` provides the standard remedy: the
modular transformation

    theta(u | tau) = tau * exp(-i*pi*u^2 / tau) * theta(u/tau | -1/tau)

maps a modulus near the real axis to one with large imaginary part.  The
identity is easy to check: the right-hand side is odd, entire, has
derivative 1 at zero, and satisfies both quasi-periodicity relations of
the left-hand side, so it equals theta(u|tau) by uniqueness.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

# Below this value of Im(tau) the helpers in other modules switch from the
# direct sine series to the modular transformation.
SMALL_IMTAU_THRESHOLD = 0.05


class DomainError(ValueError):
    """An argument lies outside the validity domain of a formula."""


class InvalidModulusError(DomainError):
    """The lattice modulus tau does not lie in the upper half plane."""


class PoleProximityError(DomainError):
    """An evaluation point is too close to a pole or a lattice zero."""


class StripViolationError(DomainError):
    """A cylinder kernel was evaluated outside its strip of convergence."""


class BandViolationError(DomainError):
    """A dynamical parameter lies outside the required horizontal band."""


class ZoneViolationError(DomainError):
    """A weight mu lies outside the convergence zone of the mu-kernels."""


class TruncationOverflowError(RuntimeError):
    """A series cannot reach the requested tolerance within max_terms."""


@dataclass(frozen=True)
class EllipticParams:
    """Modulus and truncation policy for all theta evaluations.

    tau        : lattice modulus, Im(tau) > 0.
    series_tol : target size of the first neglected theta-series term.
    max_terms  : hard cap on the number of sine-series terms.
    """

    tau: complex
    series_tol: float = 1e-15
    max_terms: int = 64

    def __post_init__(self) -> None:
        tau = complex(self.tau)
        if not np.isfinite(tau.real) or not np.isfinite(tau.imag):
            raise InvalidModulusError(f"tau must be finite, got {tau!r}")
        if tau.imag <= 0.0:
            raise InvalidModulusError(
                f"tau must have positive imaginary part, got Im tau = {tau.imag!r}"
            )
        if not (0.0 < self.series_tol < 1.0):
            raise DomainError(f"series_tol must lie in (0, 1), got {self.series_tol!r}")
        if self.max_terms < 1:
            raise DomainError(f"max_terms must be positive, got {self.max_terms!r}")
        object.__setattr__(self, "tau", tau)

    @property
    def nome(self) -> complex:
        """The nome q = exp(i*pi*tau), |q| < 1."""
        return complex(np.exp(1j * np.pi * self.tau))

    def truncation_index(self) -> int:
        """Smallest N with |q|^{(N+1/2)^2} < series_tol.

        The sine series is summed for n = 0..N.  Raises
        TruncationOverflowError when that many terms would exceed
        max_terms, which happens once Im(tau) gets too small for the
        direct series (use the modular route instead).
        """
        log_abs_q = -np.pi * self.tau.imag  # log|q| < 0
        n_star = np.sqrt(np.log(self.series_tol) / log_abs_q) - 0.5
        index = max(int(np.ceil(n_star)), 1)
        if index + 1 > self.max_terms:
            raise TruncationOverflowError(
                f"theta series needs {index + 1} terms for tolerance "
                f"{self.series_tol:g} at Im tau = {self.tau.imag:g}, "
                f"but max_terms = {self.max_terms}; use the modular "
                "transformation for small Im tau"
            )
        return index


def lattice_distance(w, tau: complex):
    """Distance from w to the nearest point of the lattice Z + tau*Z.

    Works on scalars and arrays.  Solves w = x + y*tau for real (x, y)
    and checks the 3x3 block of lattice points around (round x, round y);
    the nearest lattice point to any w lies in that block for the
    moduli considered here (|Re tau| bounded by Im tau scale).
    """
    w = np.asarray(w, dtype=complex)
    tau = complex(tau)
    y = w.imag / tau.imag
    x = w.real - y * tau.real
    best = np.full(w.shape, np.inf)
    for dn in (-1, 0, 1):
        for dm in (-1, 0, 1):
            n = np.rint(y) + dn
            m = np.rint(x) + dm
            best = np.minimum(best, np.abs(w - m - n * tau))
    return best if best.shape else float(best)


def _reduce(u: np.ndarray, tau: complex):
    """Split u = u0 + m + n*tau with u0 in the fundamental cell.

    Returns (u0, m, n) with m, n real arrays of integers and
    |Im u0| <= Im(tau)/2 (up to rounding), |Re u0| <= 1/2.
    """
    n = np.rint(u.imag / tau.imag)
    u1 = u - n * tau
    m = np.rint(u1.real)
    return u1 - m, m, n


def _sin_derivs(u0: np.ndarray, p: EllipticParams, order: int) -> np.ndarray:
    """Derivatives 0..order of the normalized sine series at reduced points.

    Returns an array of shape (order+1,) + u0.shape.  The d-th derivative
    of sin(k u) is k^d sin(k u + d*pi/2), so all orders come from the
    same phase array.
    """
    index = p.truncation_index()
    n = np.arange(index + 1)
    freq = (2 * n + 1) * np.pi
    # q^{(n+1/2)^2} computed as exp(i*pi*tau*(n+1/2)^2); never through a
    # principal-branch power of q, which would be wrong for |Re tau| > 1.
    weight = (-1.0) ** n * np.exp(1j * np.pi * p.tau * (n + 0.5) ** 2)
    norm = np.sum(weight * freq)  # S'(0)
    phase = np.multiply.outer(freq, u0)
    shape_pad = (...,) + (None,) * u0.ndim
    out = np.empty((order + 1,) + u0.shape, dtype=complex)
    for d in range(order + 1):
        terms = (weight * freq**d)[shape_pad] * np.sin(phase + d * np.pi / 2.0)
        out[d] = terms.sum(axis=0) / norm
    return out


def _direct_block(u: np.ndarray, p: EllipticParams, order: int) -> np.ndarray:
    """theta and derivatives 0..order via reduction plus the sine series.

    With u = u0 + m + n*tau the quasi-periodicity gives

        theta(u) = F(u) * theta(u0),
        F(u) = (-1)^{m+n} exp(-i*pi*n^2*tau - 2*pi*i*n*u0),

    and F' = (-2*pi*i*n) F, so derivatives follow by the Leibniz rule.
    """
    u0, m, n = _reduce(u, p.tau)
    base = _sin_derivs(u0, p, order)
    sign = 1.0 - 2.0 * ((m + n) % 2.0)
    with np.errstate(over="ignore"):
        prefactor = sign * np.exp(-1j * np.pi * n**2 * p.tau - 2j * np.pi * n * u0)
    rate = -2j * np.pi * n
    out = np.empty_like(base)
    for d in range(order + 1):
        acc = np.zeros_like(u0)
        for j in range(d + 1):
            acc = acc + comb(d, j) * rate**j * base[d - j]
        out[d] = prefactor * acc
    return out


def theta(u, p: EllipticParams):
    """theta(u) for scalar or array u, via the direct sine series.

    Raises TruncationOverflowError when Im(tau) is too small for the
    series to reach series_tol within max_terms; in that regime use
    theta_small_imtau.
    """
    u_arr = np.asarray(u, dtype=complex)
    values = _direct_block(np.atleast_1d(u_arr), p, 0)[0]
    return complex(values[0]) if u_arr.ndim == 0 else values.reshape(u_arr.shape)


def theta_derivs(u, p: EllipticParams, order: int = 1) -> np.ndarray:
    """Stack [theta(u), theta'(u), ..., theta^{(order)}(u)].

    Returns shape (order+1,) for scalar u, else (order+1,) + u.shape.
    """
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    u_arr = np.asarray(u, dtype=complex)
    block = _direct_block(np.atleast_1d(u_arr), p, order)
    if u_arr.ndim == 0:
        return block[:, 0]
    return block.reshape((order + 1,) + u_arr.shape)


def theta_small_imtau(u, p: EllipticParams):
    """theta(u | tau) through the modular transformation to -1/tau.

    Intended for moduli close to the real axis, 0 < Im(tau) < 0.05,
    where the direct series is ill conditioned; outside that range the
    direct series is the right tool and this function refuses to run.
    Works on scalars and arrays.
    """
    tau = p.tau
    if not (0.0 < tau.imag < SMALL_IMTAU_THRESHOLD):
        raise DomainError(
            f"theta_small_imtau expects 0 < Im tau < {SMALL_IMTAU_THRESHOLD}, "
            f"got Im tau = {tau.imag:g}; call theta directly instead"
        )
    p_dual = EllipticParams(-1.0 / tau, p.series_tol, p.max_terms)
    u_arr = np.asarray(u, dtype=complex)
    values = tau * np.exp(-1j * np.pi * u_arr**2 / tau) * theta(u_arr / tau, p_dual)
    return complex(values) if u_arr.ndim == 0 else values


def _exp_series(linear: complex, quadratic: complex, order: int) -> np.ndarray:
    """Taylor coefficients of exp(linear*h + quadratic*h^2) to given order."""
    coeffs = np.zeros(order + 1, dtype=complex)
    coeffs[0] = 1.0
    for j in range(1, order + 1):
        acc = linear * coeffs[j - 1]
        if j >= 2:
            acc += 2.0 * quadratic * coeffs[j - 2]
        coeffs[j] = acc / j
    return coeffs


def theta_taylor(u, p: EllipticParams, order: int) -> np.ndarray:
    """Taylor coefficients of theta around a point: theta^{(j)}(u) / j!.

    Scalar u only; returns an array of length order+1.  For
    Im(tau) below the modular threshold the coefficients are produced
    through the -1/tau transformation: the Gaussian prefactor
    exp(-i*pi*(u+h)^2/tau) contributes an explicit exponential series in
    h, and the inner theta contributes its own coefficients scaled by
    (1/tau)^j.
    """
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    u = complex(u)
    tau = p.tau
    if tau.imag >= SMALL_IMTAU_THRESHOLD:
        derivs = theta_derivs(u, p, order)
        return derivs / np.array([factorial(j) for j in range(order + 1)])
    p_dual = EllipticParams(-1.0 / tau, p.series_tol, p.max_terms)
    inner = theta_derivs(u / tau, p_dual, order)
    inner /= np.array([factorial(j) for j in range(order + 1)])
    inner *= (1.0 / tau) ** np.arange(order + 1)
    gauss = _exp_series(-2j * np.pi * u / tau, -1j * np.pi / tau, order)
    coeffs = np.convolve(gauss, inner)[: order + 1]
    return tau * np.exp(-1j * np.pi * u**2 / tau) * coeffs


def theta_block(u, p: EllipticParams, order: int) -> np.ndarray:
    """Derivative stack that auto-routes on the size of Im(tau).

    Same output as theta_derivs, but for Im(tau) below the modular
    threshold each point is evaluated through theta_taylor so that the
    kernels built on top of theta stay accurate for squashed moduli.
    """
    if p.tau.imag >= SMALL_IMTAU_THRESHOLD:
        return theta_derivs(u, p, order)
    u_arr = np.atleast_1d(np.asarray(u, dtype=complex))
    facs = np.array([factorial(j) for j in range(order + 1)])
    flat = u_arr.ravel()
    block = np.empty((order + 1, flat.size), dtype=complex)
    for k, point in enumerate(flat):
        block[:, k] = theta_taylor(point, p, order) * facs
    u_ndim = np.asarray(u, dtype=complex).ndim
    if u_ndim == 0:
        return block[:, 0]
    return block.reshape((order + 1,) + u_arr.shape)
