"""Polynomial reproducing kernels on [0, 1].

A kernel is carried by an orthonormal polynomial basis ``h``; its value is
``R(x, xi) = sum_j h_j(x) h_j(xi)``. :func:`kernel_0w` spans the polynomials of
degree <= m vanishing at 0 and 1. :func:`kernel_threepoint` additionally
forces a zero at an interior point theta by removing the direction of the
section at theta, and :func:`threepoint_formula` evaluates the same kernel from
the closed form so the two can be compared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from lrkm._precision import REAL
from lrkm.errors import DegenerateKernelError, DomainError
from lrkm.polybasis import Polynomial, eval_poly, gram_schmidt, inner, phi_basis

#: |R_theta(theta)| below this is reported as a degenerate interior point.
THETA_DEGENERACY_TOL = 1e-14


def _check_unit(name, v):
    arr = np.asarray(v, dtype=REAL)
    if np.any((arr < 0) | (arr > 1)) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class KernelBasis:
    h: tuple
    m: int
    theta: Optional[float] = None
    _matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        width = max((p.coeffs.size for p in self.h), default=0)
        mat = np.zeros((len(self.h), width), dtype=REAL)
        for i, p in enumerate(self.h):
            mat[i, : p.coeffs.size] = p.coeffs
        mat.flags.writeable = False
        object.__setattr__(self, "_matrix", mat)

    @property
    def dim(self) -> int:
        return len(self.h)

    def values(self, x) -> np.ndarray:
        """Basis values ``h_j(x)``; shape ``(dim,)`` or ``(dim, len(x))``."""
        xr = np.asarray(x, dtype=REAL)
        acc = np.zeros((self.dim,) + xr.shape, dtype=REAL)
        for col in range(self._matrix.shape[1] - 1, -1, -1):
            c = self._matrix[:, col].reshape((self.dim,) + (1,) * xr.ndim)
            acc = acc * xr + c
        return acc

    def combine(self, weights) -> Polynomial:
        """The polynomial ``sum_j weights[j] * h_j``."""
        w = np.asarray(weights, dtype=REAL)
        return Polynomial(w @ self._matrix)


@lru_cache(maxsize=64)
def kernel_0w(m: int) -> KernelBasis:
    """Kernel of the degree-<=m polynomials vanishing at 0 and 1."""
    gs = gram_schmidt(phi_basis(m).members)
    return KernelBasis(gs.orthonormal, m)


def kernel_eval(kb: KernelBasis, x, xi):
    _check_unit("x", x)
    _check_unit("xi", xi)
    return np.tensordot(kb.values(x), kb.values(xi), axes=(0, 0))[()]


def kernel_section(kb: KernelBasis, x) -> Polynomial:
    """The polynomial ``xi -> R(x, xi)``."""
    _check_unit("x", x)
    return kb.combine(kb.values(x))


def theta_correction(kb0: KernelBasis, p: Polynomial, theta) -> Polynomial:
    """Remove the value at theta: ``p - p(theta) * R_theta / R_theta(theta)``."""
    r_theta = kernel_section(kb0, theta)
    r_tt = eval_poly(r_theta, theta)
    if abs(r_tt) < THETA_DEGENERACY_TOL:
        raise DegenerateKernelError(
            f"R_theta(theta) = {float(r_tt):.3e} at theta = {theta!r}"
        )
    return p - (eval_poly(p, theta) / r_tt) * r_theta


@lru_cache(maxsize=256)
def kernel_threepoint(m: int, theta) -> KernelBasis:
    """Kernel of the degree-<=m polynomials vanishing at 0, theta and 1.

    In the coordinates of the orthonormal zero-boundary basis, the section
    ``R_theta`` is the vector ``r = h(theta)`` and a member vanishes at theta
    iff its coordinates are orthogonal to ``r``. A Householder reflector
    mapping ``r`` onto the first axis supplies ``m - 2`` orthonormal columns
    spanning that complement.
    """
    if m < 3:
        raise DomainError(f"three-point kernel needs m >= 3, got {m}")
    t = REAL(theta)
    if not 0 < t < 1:
        raise DomainError(f"theta must satisfy 0 < theta < 1, got {theta!r}")
    kb0 = kernel_0w(m)
    r = kb0.values(t)
    r_tt = r @ r
    if r_tt < THETA_DEGENERACY_TOL:
        raise DegenerateKernelError(
            f"R_theta(theta) = {float(r_tt):.3e} at theta = {theta!r}"
        )
    v = r.copy()
    v[0] += np.copysign(np.sqrt(r_tt), r[0])
    reflector = np.eye(r.size, dtype=REAL) - (2 / (v @ v)) * np.outer(v, v)
    members = tuple(kb0.combine(reflector[:, j]) for j in range(1, r.size))
    return KernelBasis(members, m, t)


def threepoint_formula(kb0: KernelBasis, theta, x, xi):
    """``R(x, xi) - R(x, theta) R(theta, xi) / R(theta, theta)`` from a 0W kernel."""
    r_tt = kernel_eval(kb0, theta, theta)
    left = kernel_eval(kb0, x, theta)
    right = kernel_eval(kb0, theta, xi)
    return kernel_eval(kb0, x, xi) - np.multiply.outer(left, right)[()] / r_tt


def verify_reproducing(kb: KernelBasis, p: Polynomial, x) -> float:
    """Absolute defect ``|<p, R(., x)> - p(x)|``."""
    return float(abs(inner(p, kernel_section(kb, x)) - eval_poly(p, x)))
