"""Polynomials on [0, 1], shifted Legendre polynomials and the zero-boundary basis.

Polynomials are stored as dense ascending monomial coefficients in the working
precision (see :mod:`lrkm._precision`). The L2 inner product on [0, 1] is
evaluated exactly from the binary coefficients with integer arithmetic and
rounded once, so it contributes no error of its own.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence

import numpy as np

from lrkm._precision import REAL, from_fraction
from lrkm.errors import DegenerateBasisError, DegreeCapError, DomainError

DEGREE_CAP = 64


class Polynomial:
    """Real polynomial ``sum(coeffs[i] * xi**i)`` with trailing zeros trimmed.

    Instances are immutable; arithmetic returns new objects. The zero
    polynomial has no coefficients and degree -1.
    """

    __slots__ = ("_c", "_ints")

    def __init__(self, coeffs: Sequence = ()):
        c = np.array(coeffs, dtype=REAL).ravel()
        if not np.all(np.isfinite(c)):
            raise DomainError("polynomial coefficients must be finite")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:0]
        if c.size - 1 > DEGREE_CAP:
            raise DegreeCapError(f"degree {c.size - 1} exceeds cap {DEGREE_CAP}")
        c.flags.writeable = False
        self._c = c
        self._ints = None

    @classmethod
    def from_roots(cls, roots, scale=1) -> "Polynomial":
        c = np.array([REAL(scale)], dtype=REAL)
        for r in roots:
            c = np.convolve(c, np.array([-REAL(r), REAL(1)], dtype=REAL))
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    def __call__(self, xi):
        return eval_poly(self, xi)

    def deriv(self) -> "Polynomial":
        return diff_poly(self)

    def _pad(self, other: "Polynomial"):
        n = max(self._c.size, other._c.size)
        a = np.zeros(n, dtype=REAL)
        b = np.zeros(n, dtype=REAL)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        return a, b

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        a, b = self._pad(other)
        return Polynomial(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        a, b = self._pad(other)
        return Polynomial(a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Polynomial(-self._c)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero() or other.is_zero():
                return Polynomial()
            return Polynomial(np.convolve(self._c, other._c))
        return Polynomial(self._c * REAL(other))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return Polynomial(self._c / REAL(scalar))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def __hash__(self):
        return hash(tuple(self._c.tolist()))

    def __repr__(self):
        return f"Polynomial({[float(c) for c in self._c]})"

    def _scaled_ints(self):
        # coeffs[i] == ints[i] / den with den a power of two
        if self._ints is None:
            ratios = [c.as_integer_ratio() for c in self._c]
            den = max((d for _, d in ratios), default=1)
            self._ints = ([n * (den // d) for n, d in ratios], den)
        return self._ints


class BasisSet(NamedTuple):
    """Zero-boundary basis ``phi_2, ..., phi_m`` of the space with parameter m."""

    members: tuple
    m: int


class GramSchmidtResult(NamedTuple):
    orthonormal: tuple
    coeffs: np.ndarray
    kept: tuple
    dropped: tuple


def eval_poly(p: Polynomial, xi):
    """Horner evaluation at a scalar or array of points."""
    x = np.asarray(xi, dtype=REAL)
    acc = np.zeros_like(x)
    for c in p.coeffs[::-1]:
        acc = acc * x + c
    return acc[()] if acc.ndim == 0 else acc


def diff_poly(p: Polynomial) -> Polynomial:
    c = p.coeffs
    if c.size <= 1:
        return Polynomial()
    return Polynomial(c[1:] * np.arange(1, c.size, dtype=REAL))


@lru_cache(maxsize=None)
def shifted_legendre(n: int) -> Polynomial:
    """Shifted Legendre polynomial P_n on [0, 1] via the three-term recurrence.

    All coefficients are integers. The recurrence reproduces them exactly for
    n <= 26 in extended precision and n <= 21 in double.
    """
    if n < 0:
        raise DomainError("shifted Legendre index must be non-negative")
    if n > DEGREE_CAP:
        raise DegreeCapError(f"degree {n} exceeds cap {DEGREE_CAP}")
    if n == 0:
        return Polynomial([1])
    prev = np.zeros(n + 1, dtype=REAL)
    cur = np.zeros(n + 1, dtype=REAL)
    prev[0] = 1
    cur[:2] = (-1, 2)
    for k in range(1, n):
        # (k+1) P_{k+1} = (2k+1)(2 xi - 1) P_k - k P_{k-1}
        nxt = np.zeros(n + 1, dtype=REAL)
        nxt[1:] += 2 * cur[:-1]
        nxt -= cur
        nxt = ((2 * k + 1) * nxt - k * prev) / (k + 1)
        prev, cur = cur, nxt
    return Polynomial(cur)


@lru_cache(maxsize=None)
def _lcm_upto(n: int) -> int:
    return math.lcm(*range(1, n + 1))


def inner(p: Polynomial, q: Polynomial):
    """L2 inner product on [0, 1] with unit weight, exact from coefficients."""
    if p.is_zero() or q.is_zero():
        return REAL(0)
    a, da = p._scaled_ints()
    b, db = q._scaled_ints()
    lcm = _lcm_upto(len(a) + len(b) - 1)
    total = 0
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                total += ai * bj * (lcm // (i + j + 1))
    return from_fraction(Fraction(total, lcm * da * db))


def norm(p: Polynomial):
    return np.sqrt(inner(p, p))


def phi_basis(m: int) -> BasisSet:
    """Boundary-adapted basis: P_j - P_0 for even j, P_j - P_1 for odd j."""
    if m < 2:
        raise DomainError(f"phi_basis needs m >= 2, got {m}")
    members = tuple(
        shifted_legendre(j) - shifted_legendre(j % 2) for j in range(2, m + 1)
    )
    return BasisSet(members, m)


def gram_schmidt(
    vs: Sequence[Polynomial], drop_tol: float = 1e-12, max_rank: Optional[int] = None
) -> GramSchmidtResult:
    """Modified Gram-Schmidt with one reorthogonalization pass under :func:`inner`.

    A vector whose norm after projection is below ``drop_tol`` times its
    original norm is treated as dependent and dropped; earlier vectors always
    win. When the inputs are known to span at most ``max_rank`` dimensions,
    everything after the first ``max_rank`` survivors is dropped as well.
    ``coeffs`` is lower triangular with
    ``orthonormal[j] == sum(coeffs[j, k] * vs[kept[k]])``.

    Raises
    ------
    DegenerateBasisError
        If no vector survives.
    """
    if not drop_tol > 0:
        raise DomainError("drop_tol must be positive")
    n = len(vs)
    basis, rows, kept, dropped = [], [], [], []
    for i, v in enumerate(vs):
        if max_rank is not None and len(basis) >= max_rank:
            dropped.append(i)
            continue
        pre = norm(v)
        if pre == 0:
            dropped.append(i)
            continue
        w = v
        coef = np.zeros(n, dtype=REAL)
        coef[i] = 1
        for _ in range(2):
            for q, row in zip(basis, rows):
                r = inner(w, q)
                w = w - r * q
                coef = coef - r * row
        nrm = norm(w)
        if nrm <= drop_tol * pre:
            dropped.append(i)
            continue
        basis.append(w / nrm)
        rows.append(coef / nrm)
        kept.append(i)
    if not basis:
        raise DegenerateBasisError(f"all {n} vectors were dropped by Gram-Schmidt")
    coeffs = np.array([row[kept] for row in rows], dtype=REAL)
    return GramSchmidtResult(tuple(basis), coeffs, tuple(kept), tuple(dropped))
