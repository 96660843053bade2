"""Truncated Laurent series, the residue pairing, dual bases, projections.

Functions on a punctured disc are represented by finitely many Laurent
coefficients together with an honest bookkeeping of what is known:

* every coefficient below `min_deg` is exactly zero (finite pole order),
* coefficients `min_deg .. max_deg` are stored,
* above `max_deg` the coefficients are unknown -- unless the series is
  marked `exact` (a Laurent polynomial), in which case they are known
  zeros.

Arithmetic propagates these windows: for a product, the first unknown
coefficient of either factor contaminates everything it can reach, so
the certified top is min over factors of (factor.min_deg +
other.unknown_start) - 1.  The residue pairing

    <f, g> = coefficient of u^{-1} in f*g = (1/2*pi*i) * closed contour integral of f*g

is certified only when degree -1 lies inside the product window;
otherwise a WindowError is raised rather than returning a number that
silently depends on unknown coefficients.

On top of this sit the dual bases of the function space on the
punctured disc: for a dynamical parameter lambda off the lattice

    eps_n    = (-u)^n,                            eps^n    = (1/n!) g_lambda^{(n)},
    eps_{-n-1} = ((-1)^n/n!) g_{-lambda}^{(n)},   eps^{-n-1} = u^n,        (n >= 0),

with g0 = theta'/theta replacing both g_lambda and g_{-lambda} when
lambda = 0.  These satisfy <eps^n, eps_m> = delta_{nm}, and the
projections P^+ (span of eps_n, n >= 0) and P^- (principal part) built
from them are idempotent, orthogonal, and sum to the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .kernels import POLE_MARGIN, circle_pairing, g_lambda, g0
from .theta import (
    DomainError,
    EllipticParams,
    PoleProximityError,
    lattice_distance,
    theta_taylor,
)


class WindowError(ValueError):
    """A requested coefficient lies above the certified window."""


@dataclass(frozen=True)
class LaurentSeries:
    """Laurent coefficients c[j] of u^{min_deg + j}.

    exact=True marks a Laurent polynomial: coefficients above max_deg
    are known zeros instead of unknowns.
    """

    min_deg: int
    coeffs: np.ndarray
    exact: bool = False

    def __post_init__(self) -> None:
        arr = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("coeffs must be a non-empty 1-d array")
        object.__setattr__(self, "coeffs", arr)

    @property
    def max_deg(self) -> int:
        return self.min_deg + self.coeffs.size - 1

    @property
    def unknown_start(self) -> float:
        """Degree of the first unknown coefficient (inf for polynomials)."""
        return float("inf") if self.exact else self.max_deg + 1

    @classmethod
    def monomial(cls, degree: int, coeff: complex = 1.0) -> "LaurentSeries":
        return cls(degree, np.array([coeff], dtype=complex), exact=True)

    def coefficient(self, degree: int) -> complex:
        """Coefficient of u^degree; exactly 0 outside an exact window."""
        if degree < self.min_deg:
            return 0.0
        if degree > self.max_deg:
            if self.exact:
                return 0.0
            raise WindowError(
                f"coefficient of u^{degree} is above the certified window "
                f"[{self.min_deg}, {self.max_deg}]"
            )
        return complex(self.coeffs[degree - self.min_deg])

    def scale(self, factor: complex) -> "LaurentSeries":
        return LaurentSeries(self.min_deg, factor * self.coeffs, self.exact)

    def __add__(self, other: "LaurentSeries") -> "LaurentSeries":
        lo = min(self.min_deg, other.min_deg)
        both_exact = self.exact and other.exact
        if both_exact:
            hi = max(self.max_deg, other.max_deg)
        else:
            hi = int(min(self.unknown_start, other.unknown_start)) - 1
        if hi < lo:
            raise WindowError("sum has an empty certified window")
        out = np.zeros(hi - lo + 1, dtype=complex)
        for s in (self, other):
            a = max(s.min_deg, lo)
            b = min(s.max_deg, hi)
            if b >= a:
                out[a - lo : b - lo + 1] += s.coeffs[a - s.min_deg : b - s.min_deg + 1]
        return LaurentSeries(lo, out, both_exact)

    def __sub__(self, other: "LaurentSeries") -> "LaurentSeries":
        return self + other.scale(-1.0)

    def __mul__(self, other: "LaurentSeries") -> "LaurentSeries":
        lo = self.min_deg + other.min_deg
        full = np.convolve(self.coeffs, other.coeffs)
        if self.exact and other.exact:
            return LaurentSeries(lo, full, exact=True)
        hi = int(min(self.min_deg + other.unknown_start, other.min_deg + self.unknown_start)) - 1
        return LaurentSeries(lo, full[: hi - lo + 1])

    def differentiate(self) -> "LaurentSeries":
        degrees = self.min_deg + np.arange(self.coeffs.size)
        return LaurentSeries(self.min_deg - 1, degrees * self.coeffs, self.exact)

    def reflect(self) -> "LaurentSeries":
        """The series of u -> f(-u): flip the sign of every odd coefficient."""
        degrees = self.min_deg + np.arange(self.coeffs.size)
        return LaurentSeries(self.min_deg, (-1.0) ** degrees * self.coeffs, self.exact)

    def truncate(self, max_deg: int) -> "LaurentSeries":
        """Forget coefficients above max_deg (the result is non-exact)."""
        if max_deg < self.min_deg:
            raise WindowError("cannot truncate below the leading degree")
        keep = min(max_deg, self.max_deg) - self.min_deg + 1
        return LaurentSeries(self.min_deg, self.coeffs[:keep].copy())


def residue_pair(a: LaurentSeries, b: LaurentSeries) -> complex:
    """<a, b>: the u^{-1} coefficient of a*b, certified or refused.

    Returns exactly 0 when degree -1 lies below the product window (all
    contributing coefficients are known zeros); raises WindowError when
    it lies above the certified top (the value would depend on unknown
    coefficients).
    """
    lo = a.min_deg + b.min_deg
    hi = min(a.min_deg + b.unknown_start, b.min_deg + a.unknown_start) - 1
    if -1 < lo:
        return 0.0
    if -1 > hi:
        raise WindowError(
            f"residue pairing not certified: u^-1 lies above the certified "
            f"product window [{lo}, {hi:g}]; extend the series"
        )
    total = 0.0 + 0.0j
    for j, c in enumerate(a.coeffs):
        d = -1 - (a.min_deg + j)
        if b.min_deg <= d <= b.max_deg:
            total += c * b.coeffs[d - b.min_deg]
    return complex(total)


def max_coeff_difference(a: LaurentSeries, b: LaurentSeries) -> float:
    """Largest |coefficient difference| over the common certified window."""
    lo = min(a.min_deg, b.min_deg)
    hi = int(min(a.unknown_start, b.unknown_start)) - 1
    if hi < lo:
        raise WindowError("series have no common certified window")
    return max(abs(a.coefficient(d) - b.coefficient(d)) for d in range(lo, hi + 1))


def _series_div(num: np.ndarray, den: np.ndarray, length: int) -> np.ndarray:
    """Taylor coefficients of num/den to the given length (den[0] != 0)."""
    out = np.zeros(length, dtype=complex)
    for k in range(length):
        acc = num[k] if k < num.size else 0.0
        jmax = min(k, den.size - 1)
        if jmax >= 1:
            acc = acc - np.dot(den[1 : jmax + 1], out[k - 1 :: -1][:jmax])
        out[k] = acc / den[0]
    return out


def green_kernel_series(p: EllipticParams, lam: complex | None, length: int) -> LaurentSeries:
    """Laurent expansion of g_lambda (or g0 for lam=None) around u = 0.

    Both kernels have the form (1/u) * analytic, so the expansion is a
    power-series quotient of theta Taylor data:

        g_lambda = [theta(u+lambda)/theta(lambda)] / [theta(u)/u] / u,
        g0       = theta'(u) / [theta(u)/u] / u.

    Returns a series with window [-1, length - 2].
    """
    theta0 = theta_taylor(0.0, p, length + 1)
    # theta is odd, so its even Taylor coefficients at 0 vanish identically;
    # pin them to exact zeros (the sine sums leave ~1e-16 dust there) so the
    # division below propagates the parity exactly: for g0 every even-degree
    # coefficient of the quotient then comes out as a literal 0.0.
    theta0 = theta0.copy()
    theta0[0::2] = 0.0
    den = theta0[1:]  # theta(u)/u, unit constant term
    if lam is None:
        num = theta0[1:] * np.arange(1, length + 2)  # theta'(u) Taylor
    else:
        lam = complex(lam)
        if lattice_distance(lam, p.tau) < POLE_MARGIN:
            raise PoleProximityError(
                f"lambda = {lam!r} is within {POLE_MARGIN:g} of a lattice point"
            )
        num = theta_taylor(lam, p, length)
        num = num / num[0]  # divide by theta(lambda)
    return LaurentSeries(-1, _series_div(num, den, length))


@dataclass(frozen=True)
class DualBasisTable:
    """Dual bases eps^n / eps_n as truncated Laurent series.

    order : largest derivative index; stored indices run -order-1 .. order.
    lam   : dynamical parameter, or None for the lambda = 0 table.
    upper : eps^n -- pairing functionals (first pairing slot).
    lower : eps_n -- expansion vectors (second slot).
    """

    order: int
    lam: complex | None
    params: EllipticParams
    upper: dict
    lower: dict

    @property
    def indices(self) -> range:
        return range(-self.order - 1, self.order + 1)


def _normalized_derivative(base: LaurentSeries, n: int) -> LaurentSeries:
    """f^{(n)}/n! for a series with window starting at the simple pole.

    Written out degree by degree instead of chaining differentiate():

        coefficient at -1-n:  (-1)^n * c_{-1}
        coefficients -n..-1:  exactly zero (the falling factorial crosses 0)
        coefficient at d>=0:  binom(d+n, n) * c_{d+n}

    The binomials are computed as exact integers.  This matters for the
    dual pairings: a pairing <eps^n, eps_{-k-1}> reduces to two terms that
    share the integer binom(n+k, n), and giving both slots the *same*
    float for it lets the pair cancel exactly instead of to
    binomial * roundoff, which at order 12 would be ~1e-8.
    """
    if base.min_deg != -1:
        raise WindowError(f"expected a window starting at degree -1, got {base.min_deg}")
    if n == 0:
        return base
    top = base.max_deg - n
    out = np.zeros(base.coeffs.size, dtype=complex)
    out[0] = (-1.0) ** n * base.coeffs[0]
    binoms = np.array([comb(d + n, n) for d in range(top + 1)], dtype=float)
    out[n + 1 :] = binoms * base.coeffs[n + 1 :]
    return LaurentSeries(-1 - n, out, base.exact)


def expand_dual_basis(
    p: EllipticParams, order: int, lam: complex | None = None, extra_degrees: int = 2
) -> DualBasisTable:
    """Build the dual basis table up to the given derivative order.

    The kernel expansions are carried to degree 2*order + extra_degrees
    so that every pairing among stored basis elements stays inside
    certified windows.
    """
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    depth = 2 * order + extra_degrees
    base_plus = green_kernel_series(p, lam, depth + 2)
    # The reflected kernel satisfies g_{-lambda}(u) = -g_lambda(-u) exactly
    # (theta is odd), so its expansion is the parity image of the same
    # coefficient array.  Using that identity -- rather than running the
    # series division a second time at -lambda -- keeps the sign relation
    # between the two families exact in floating point, which is what makes
    # the large binomial cancellations in the high-order dual pairings cancel
    # to machine zero instead of to (binomial) * (coefficient rounding).
    base_minus = base_plus if lam is None else base_plus.reflect().scale(-1.0)
    upper: dict = {}
    lower: dict = {}
    for n in range(order + 1):
        upper[n] = _normalized_derivative(base_plus, n)
        lower[-n - 1] = _normalized_derivative(base_minus, n).scale((-1.0) ** n)
        upper[-n - 1] = LaurentSeries.monomial(n)
        lower[n] = LaurentSeries.monomial(n, (-1.0) ** n)
    return DualBasisTable(order, None if lam is None else complex(lam), p, upper, lower)


def gram_matrix(table: DualBasisTable) -> np.ndarray:
    """Matrix <eps^n, eps_m> over the stored indices; the identity if dual."""
    idx = list(table.indices)
    gram = np.empty((len(idx), len(idx)), dtype=complex)
    for i, n in enumerate(idx):
        for j, m in enumerate(idx):
            gram[i, j] = residue_pair(table.upper[n], table.lower[m])
    return gram


def project(table: DualBasisTable, series: LaurentSeries, sign: str) -> LaurentSeries:
    """P^+ or P^- of a Laurent series in the dual-basis expansion.

    P^+[s] = sum_{n >= 0} <eps^n, s> eps_n reconstructs the regular part,
    P^-[s] = sum_{n < 0}  <eps^n, s> eps_n the principal part.  Indices
    are included as far as the residue pairings are certified; the
    certified window of the result reflects how far that reaches.
    """
    if sign not in ("+", "-"):
        raise DomainError(f"sign must be '+' or '-', got {sign!r}")
    if sign == "+":
        values = []
        for n in range(table.order + 1):
            try:
                values.append(residue_pair(table.upper[n], series))
            except WindowError:
                break
        if not values:
            raise WindowError("no regular-part coefficient is certified")
        signs = (-1.0) ** np.arange(len(values))  # eps_n = (-u)^n
        return LaurentSeries(0, signs * np.asarray(values))
    result = None
    for k in range(table.order + 1):
        try:
            coeff = residue_pair(table.upper[-k - 1], series)
        except WindowError:
            break
        term = table.lower[-k - 1].scale(coeff)
        result = term if result is None else result + term
    if result is None:
        raise WindowError("no principal-part coefficient is certified")
    return result


def green_series_check(
    u: complex,
    lam: complex | None,
    p: EllipticParams,
    order: int,
    nodes: int = 128,
    radius: float | None = None,
) -> float:
    """Two independent routes to the z-expansion of g_lambda(u - z).

    Expanding the kernel around z = 0 gives coefficients
    (-1)^n g_lambda^{(n)}(u) / n!.  Route one extracts them by contour
    integration of g_lambda(u - z) z^{-n-1} over a small circle; route
    two computes the derivatives from Taylor quotients of theta data at
    the point u.  Returns the largest difference over n = 0..order, each
    scaled by max(1, |coefficient|): the coefficients themselves grow
    like dist(u, lattice)^{-n-1}, so an absolute metric would just
    measure how close u sits to a pole.
    """
    u = complex(u)
    dist = lattice_distance(u, p.tau)
    if dist < 10 * POLE_MARGIN:
        raise PoleProximityError(f"u = {u!r} is too close to a lattice point")
    if radius is None:
        radius = 0.5 * dist
    length = order + 2
    den = theta_taylor(u, p, length)
    if lam is None:
        num = theta_taylor(u, p, length + 1)
        num = num[1:] * np.arange(1, length + 2)  # theta'(u + h) Taylor in h
        kernel = lambda z: g0(u - z, p)
    else:
        lam = complex(lam)
        theta_lam = theta_taylor(lam, p, 0)[0]
        num = theta_taylor(u + lam, p, length) / theta_lam
        kernel = lambda z: g_lambda(u - z, lam, p)
    taylor = _series_div(num, den, order + 1)
    worst = 0.0
    for n in range(order + 1):
        contour = circle_pairing(lambda z: kernel(z) / z ** (n + 1), radius, nodes)
        diff = abs(contour - (-1.0) ** n * taylor[n])
        worst = max(worst, diff / max(1.0, abs(contour)))
    return worst
