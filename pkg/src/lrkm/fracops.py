"""Gamma function and Caputo derivatives of polynomials.

The closed form used for monomials is

    D^a xi**k = Gamma(k + 1) / Gamma(k + 1 - a) * xi**(k - a),   k >= ceil(a)

and zero for smaller k. Integer orders go through plain factorial ratios.
:func:`rl_quadrature_oracle` evaluates the Riemann-Liouville integral by
Gauss-Jacobi quadrature in double precision; it shares no code with the
closed form and exists to check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import numpy as np
from scipy.special import roots_jacobi

from lrkm._precision import REAL, from_fraction
from lrkm.errors import DomainError
from lrkm.polybasis import Polynomial, diff_poly

_HALF_LOG_2PI = REAL("0.918938533204672741780329736405617639861")
_STIRLING = tuple(
    from_fraction(b / (2 * k * (2 * k - 1)))
    for k, b in enumerate(
        (
            Fraction(1, 6),
            Fraction(-1, 30),
            Fraction(1, 42),
            Fraction(-1, 30),
            Fraction(5, 66),
            Fraction(-691, 2730),
            Fraction(7, 6),
            Fraction(-3617, 510),
        ),
        start=1,
    )
)
# Stirling tail at y >= 20 is below 1e-21, beneath extended-precision eps.
_STIRLING_MIN = 20


def gamma(x) -> np.floating:
    """Gamma function for positive real arguments in the working precision.

    Integers up to 170 are returned as exact factorials. Other arguments are
    shifted up to at least 20 with the recurrence and finished with the
    Stirling series.
    """
    xr = REAL(x)
    if not np.isfinite(xr) or xr <= 0:
        raise DomainError(f"gamma is only defined here for finite x > 0, got {x!r}")
    if xr == np.floor(xr) and xr <= 171:
        return REAL(math.factorial(int(xr) - 1))
    shift = max(0, math.ceil(_STIRLING_MIN - float(xr)))
    y = xr + shift
    prod = REAL(1)
    for i in range(shift):
        prod *= xr + i
    series = REAL(0)
    yinv2 = 1 / (y * y)
    for c in reversed(_STIRLING):
        series = series * yinv2 + c
    series /= y
    lg = (y - REAL(0.5)) * np.log(y) - y + _HALF_LOG_2PI + series
    return np.exp(lg) / prod


@dataclass(frozen=True)
class FracOrder:
    """Order of a Caputo derivative, restricted to (0, 2]."""

    value: np.floating

    def __post_init__(self):
        v = REAL(self.value)
        if not np.isfinite(v) or not 0 < v <= 2:
            raise DomainError(f"fractional order must lie in (0, 2], got {self.value!r}")
        object.__setattr__(self, "value", v)

    @property
    def ceil(self) -> int:
        return int(np.ceil(self.value))

    @property
    def is_integer(self) -> bool:
        return self.value == self.ceil


OrderLike = Union[FracOrder, float, int, str]


def as_order(alpha: OrderLike) -> FracOrder:
    return alpha if isinstance(alpha, FracOrder) else FracOrder(alpha)


@dataclass(frozen=True)
class FracSeries:
    """Finite sum of ``coeff * xi**exponent`` terms with non-negative exponents.

    Construction normalizes: equal exponents are merged, zero coefficients
    dropped and terms sorted by increasing exponent.
    """

    terms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for c, p in self.terms:
            c, p = REAL(c), REAL(p)
            if not (np.isfinite(c) and np.isfinite(p)) or p < 0:
                raise DomainError(f"invalid term ({c}, {p})")
            merged[p] = merged.get(p, REAL(0)) + c
        terms = tuple((c, p) for p, c in sorted(merged.items()) if c != 0)
        object.__setattr__(self, "terms", terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "FracSeries") -> "FracSeries":
        return FracSeries(self.terms + other.terms)

    def __mul__(self, scalar) -> "FracSeries":
        s = REAL(scalar)
        return FracSeries(tuple((c * s, p) for c, p in self.terms))

    __rmul__ = __mul__

    def __call__(self, xi):
        return eval_frac_series(self, xi)


def eval_frac_series(s: FracSeries, xi):
    """Evaluate at xi in [0, 1] (scalar or array), with 0**0 == 1."""
    x = np.asarray(xi, dtype=REAL)
    if np.any((x < 0) | (x > 1)) or not np.all(np.isfinite(x)):
        raise DomainError(f"fractional series is evaluated on [0, 1] only, got {xi!r}")
    acc = np.zeros_like(x)
    for c, p in s.terms:
        acc = acc + c * np.power(x, p)
    return acc[()] if acc.ndim == 0 else acc


def caputo_monomial(k: int, alpha: OrderLike) -> FracSeries:
    a = as_order(alpha)
    n = a.ceil
    if k < n:
        return FracSeries()
    if a.is_integer:
        return FracSeries(((REAL(math.perm(k, n)), REAL(k - n)),))
    coeff = REAL(math.factorial(k)) / gamma(REAL(k + 1) - a.value)
    return FracSeries(((coeff, REAL(k) - a.value),))


def caputo_poly(p: Polynomial, alpha: OrderLike) -> FracSeries:
    """Caputo derivative of a polynomial, applied termwise."""
    a = as_order(alpha)
    terms = []
    for k, c in enumerate(p.coeffs):
        if c != 0:
            terms.extend((c * d, e) for d, e in caputo_monomial(k, a))
    return FracSeries(tuple(terms))


def rl_quadrature_oracle(
    f: Callable[[float], float], order: float, xi: float, nodes: int = 40
) -> float:
    """Riemann-Liouville integral of ``f`` of the given order at ``xi``.

    Gauss-Jacobi quadrature with weight ``(xi - s)**(order - 1)`` absorbs the
    endpoint singularity; it is exact for polynomial ``f`` of degree below
    ``2 * nodes``. Runs in double precision regardless of the working dtype.
    """
    if not order > 0:
        raise DomainError(f"integration order must be positive, got {order!r}")
    if not 0 < xi <= 1:
        raise DomainError(f"xi must lie in (0, 1], got {xi!r}")
    order, xi = float(order), float(xi)
    t, w = roots_jacobi(nodes, order - 1.0, 0.0)
    s = 0.5 * xi * (1.0 + t)
    vals = np.array([float(f(si)) for si in s])
    return (0.5 * xi) ** order * float(np.dot(w, vals)) / math.gamma(order)


def caputo_quadrature(p: Polynomial, alpha: float, xi: float) -> float:
    """Caputo derivative of ``p`` at ``xi`` via the quadrature oracle.

    Fractional orders integrate the ceil(alpha)-th classical derivative with
    order ``ceil(alpha) - alpha``; integer orders differentiate classically.
    """
    n = math.ceil(alpha)
    d = p
    for _ in range(n):
        d = diff_poly(d)
    coeffs = [float(c) for c in d.coeffs]

    def f(s):
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * s + c
        return acc

    if alpha == n:
        return f(float(xi))
    return rl_quadrature_oracle(f, n - alpha, xi)
