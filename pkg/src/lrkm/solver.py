"""Kernel collocation solver for fractional three-point boundary value problems.

The problem is

    a2(xi) D^alpha z + a1(xi) D^beta z + a0(xi) z = g(xi, z, z'),
    z(0) = gamma0,  z(theta) = gamma1,  z(1) = gamma2,

with Caputo derivatives, 1 < alpha <= 2 and 0 < beta <= 1. After subtracting
the quadratic interpolant of the boundary data, the unknown lives in the
polynomials of degree <= m vanishing at 0, theta and 1. The operator is
applied to the kernel in its first argument at each node, the resulting
functions are orthonormalized, and each iteration is a single projection with
the right-hand side frozen at the previous iterate.
"""

from __future__ import annotations

import dataclasses
import logging
import numbers
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from lrkm._precision import REAL
from lrkm.errors import (
    DegenerateBasisError,
    DomainError,
    NonFiniteError,
    SpecError,
)
from lrkm.exprlang import EvalError, Expr, evaluate, free_vars
from lrkm.fracops import FracOrder, caputo_poly
from lrkm.polybasis import Polynomial, gram_schmidt
from lrkm.rkhs import KernelBasis, kernel_threepoint

logger = logging.getLogger(__name__)

_EXPR_TYPES = tuple(t for t in Expr.__args__)


def _coefficient(value, name: str) -> Callable:
    if isinstance(value, _EXPR_TYPES):
        extra = free_vars(value) - {"xi"}
        if extra:
            raise SpecError(
                f"coefficient may only depend on xi, found {sorted(extra)}", key=name
            )
        return lambda xi, _e=value: evaluate(_e, xi)
    if isinstance(value, (numbers.Real, np.floating, str)):
        c = REAL(value)
        return lambda xi, _c=c: _c
    if callable(value):
        return value
    raise SpecError(f"unsupported coefficient {value!r}", key=name)


def _rhs(value, name: str) -> Callable:
    if isinstance(value, _EXPR_TYPES):
        return lambda xi, z, zp, _e=value: evaluate(_e, xi, z, zp)
    if isinstance(value, (numbers.Real, np.floating, str)):
        c = REAL(value)
        return lambda xi, z, zp, _c=c: _c
    if callable(value):
        return value
    raise SpecError(f"unsupported right-hand side {value!r}", key=name)


@dataclass(frozen=True, kw_only=True)
class ProblemSpec:
    """A three-point problem. Coefficients may be callables, numbers or parsed
    expressions; ``g`` is called as ``g(xi, z, zp)``."""

    alpha: float
    beta: float
    theta: float
    a2: Callable = 1
    a1: Callable = 0
    a0: Callable = 0
    g: Callable = 0
    gamma0: float = 0
    gamma1: float = 0
    gamma2: float = 0
    exact: Optional[Polynomial] = None

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        try:
            alpha, beta, theta = REAL(self.alpha), REAL(self.beta), REAL(self.theta)
        except (TypeError, ValueError) as exc:
            raise SpecError(f"alpha, beta and theta must be numbers ({exc})") from None
        if not 1 < alpha <= 2:
            raise SpecError(f"alpha must satisfy 1 < alpha <= 2, got {self.alpha}", key="alpha")
        if not 0 < beta <= 1:
            raise SpecError(f"beta must satisfy 0 < beta <= 1, got {self.beta}", key="beta")
        if not 0 < theta < 1:
            raise SpecError(f"theta must satisfy 0 < theta < 1, got {self.theta}", key="theta")
        set_("alpha", alpha)
        set_("beta", beta)
        set_("theta", theta)
        for k in ("gamma0", "gamma1", "gamma2"):
            v = REAL(getattr(self, k))
            if not np.isfinite(v):
                raise SpecError("boundary value must be finite", key=k)
            set_(k, v)
        for k in ("a0", "a1", "a2"):
            set_(k, _coefficient(getattr(self, k), k))
        set_("g", _rhs(self.g, "g"))

    @property
    def boundary_values(self):
        return (self.gamma0, self.gamma1, self.gamma2)


def _default_grid():
    return tuple(REAL(i) / 10 for i in range(11))


@dataclass(frozen=True, kw_only=True)
class SolverConfig:
    m: int
    n: int
    node_offset: float = 0.3
    gs_drop_tol: float = 1e-12
    stop_tol: Optional[float] = None
    grid: tuple = field(default_factory=_default_grid)

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 3:
            raise SpecError(f"m must be an integer >= 3, got {self.m}", key="m")
        if int(self.n) != self.n or self.n < 1:
            raise SpecError(f"n must be an integer >= 1, got {self.n}", key="n")
        off = REAL(self.node_offset)
        if not 0 < off < 1:
            raise SpecError(
                f"node_offset must lie in (0, 1), got {self.node_offset}", key="node_offset"
            )
        if not float(self.gs_drop_tol) > 0:
            raise SpecError("gs_tol must be positive", key="gs_tol")
        if self.stop_tol is not None and not float(self.stop_tol) > 0:
            raise SpecError("stop_tol must be positive", key="stop_tol")
        grid = tuple(REAL(x) for x in self.grid)
        if not grid or any(not 0 <= x <= 1 for x in grid):
            raise SpecError("grid points must lie in [0, 1]", key="grid")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "node_offset", off)
        object.__setattr__(self, "grid", grid)

    @property
    def nodes(self) -> tuple:
        """Collocation nodes ``(j + node_offset) / m`` for ``j = 0 .. m-2``."""
        return tuple((REAL(j) + self.node_offset) / self.m for j in range(self.m - 1))


@dataclass(frozen=True)
class CollocationSystem:
    kb: KernelBasis
    psi: tuple
    psibar: tuple
    beta_coeffs: np.ndarray
    kept: tuple
    nodes: tuple
    dropped: tuple = ()
    _psibar_matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        width = max(p.coeffs.size for p in self.psibar)
        mat = np.zeros((len(self.psibar), width), dtype=REAL)
        for i, p in enumerate(self.psibar):
            mat[i, : p.coeffs.size] = p.coeffs
        object.__setattr__(self, "_psibar_matrix", mat)


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve; the approximation is ``solution + shift``."""

    solution: Polynomial
    shift: Polynomial
    iterates_delta: tuple
    iterations: int
    grid: tuple
    errors: Optional[tuple]
    config: SolverConfig
    nodes: tuple
    kept: tuple
    dropped: tuple
    stopped_early: bool = False
    exact: Optional[Polynomial] = None

    @property
    def total(self) -> Polynomial:
        return self.solution + self.shift

    def approx(self, x):
        return self.solution(x) + self.shift(x)

    @property
    def max_error(self) -> Optional[float]:
        return None if self.errors is None else float(max(self.errors))


class ErrorRow(NamedTuple):
    x: float
    exact: float
    approx: float
    abs_error: float


def boundary_interpolant(theta, gamma0, gamma1, gamma2) -> Polynomial:
    """The quadratic through ``(0, gamma0)``, ``(theta, gamma1)``, ``(1, gamma2)``."""
    t = REAL(theta)
    if not 0 < t < 1:
        raise DomainError(f"theta must satisfy 0 < theta < 1, got {theta!r}")
    q = Polynomial()
    if gamma0:
        q = q + Polynomial.from_roots((t, 1), REAL(gamma0) / t)
    if gamma1:
        q = q + Polynomial.from_roots((0, 1), REAL(gamma1) / (t * (t - 1)))
    if gamma2:
        q = q + Polynomial.from_roots((0, t), REAL(gamma2) / (1 - t))
    return q


def homogenize(spec: ProblemSpec):
    """Shift the unknown by the boundary interpolant ``q``.

    Returns ``(spec0, q)`` where ``spec0`` has zero boundary values and
    right-hand side ``g(xi, w + q, wp + q') - (L q)(xi)``; if ``w`` solves
    ``spec0`` then ``w + q`` solves ``spec``.
    """
    q = boundary_interpolant(spec.theta, *spec.boundary_values)
    if q.is_zero():
        return spec, q
    dq = q.deriv()
    da = caputo_poly(q, spec.alpha)
    db = caputo_poly(q, spec.beta)
    g, a0, a1, a2 = spec.g, spec.a0, spec.a1, spec.a2

    def g0(xi, w, wp):
        lq = a2(xi) * da(xi) + a1(xi) * db(xi) + a0(xi) * q(xi)
        return g(xi, w + q(xi), wp + dq(xi)) - lq

    exact = None if spec.exact is None else spec.exact - q
    spec0 = dataclasses.replace(
        spec, gamma0=0, gamma1=0, gamma2=0, g=g0, exact=exact
    )
    return spec0, q


def _finite_coeff(fn, x, name):
    v = REAL(fn(x))
    if not np.isfinite(v):
        raise NonFiniteError(f"{name}({float(x)!r}) is not finite", node=float(x))
    return v


def build_system(spec0: ProblemSpec, cfg: SolverConfig) -> CollocationSystem:
    """Apply the operator to kernel sections at the nodes and orthonormalize.

    ``psi_j = sum_i (L h_i)(xi_j) h_i`` where ``h`` is the three-point kernel
    basis; the fractional derivatives act on each ``h_i`` in closed form.
    """
    if any(v != 0 for v in spec0.boundary_values):
        raise DomainError("build_system expects zero boundary values; homogenize first")
    kb = kernel_threepoint(cfg.m, spec0.theta)
    nodes = cfg.nodes
    for x in nodes:
        if abs(x - spec0.theta) < 1e-14:
            logger.warning("collocation node %.17g coincides with theta", float(x))

    a2v = np.array([_finite_coeff(spec0.a2, x, "a2") for x in nodes], dtype=REAL)
    if not np.any(a2v):
        raise SpecError("a2 vanishes at every collocation node", key="a2")
    a1v = np.array([_finite_coeff(spec0.a1, x, "a1") for x in nodes], dtype=REAL)
    a0v = np.array([_finite_coeff(spec0.a0, x, "a0") for x in nodes], dtype=REAL)

    x = np.array(nodes, dtype=REAL)
    dalpha = np.array([caputo_poly(h, spec0.alpha)(x) for h in kb.h], dtype=REAL)
    dbeta = np.array([caputo_poly(h, spec0.beta)(x) for h in kb.h], dtype=REAL)
    # lmat[j, i] = (L h_i)(xi_j)
    lmat = (a2v * dalpha + a1v * dbeta + a0v * kb.values(x)).T
    psi = tuple(kb.combine(row) for row in lmat)
    try:
        gs = gram_schmidt(psi, cfg.gs_drop_tol, max_rank=kb.dim)
    except DegenerateBasisError:
        raise DegenerateBasisError(
            "the operator annihilates every kernel section at nodes "
            f"{[float(v) for v in nodes]}"
        ) from None
    if len(gs.dropped) > 1:
        logger.warning(
            "psi rank loss beyond the expected redundancy: dropped %s", list(gs.dropped)
        )
    return CollocationSystem(
        kb, psi, gs.orthonormal, gs.coeffs, gs.kept, nodes, gs.dropped
    )


def linear_solve(sys: CollocationSystem, rhs_values) -> Polynomial:
    """``sum_j (sum_k beta_jk rhs[kept[k]]) psibar_j`` over the surviving indices."""
    rhs = np.asarray(rhs_values, dtype=REAL)
    if rhs.shape != (len(sys.nodes),):
        raise DomainError(f"expected {len(sys.nodes)} right-hand side values")
    weights = sys.beta_coeffs @ rhs[list(sys.kept)]
    return Polynomial(weights @ sys._psibar_matrix)


def iterate(
    spec0: ProblemSpec,
    cfg: SolverConfig,
    system: Optional[CollocationSystem] = None,
    start: Optional[Polynomial] = None,
) -> SolveReport:
    """Lagged iteration from ``start`` (zero by default) for ``cfg.n`` steps.

    Each step evaluates ``g`` at the surviving nodes with the previous iterate
    and its analytic derivative, then performs one :func:`linear_solve`.
    """
    sys = system if system is not None else build_system(spec0, cfg)
    grid = np.array(cfg.grid, dtype=REAL)
    z = start if start is not None else Polynomial()
    prev = z(grid)
    deltas = []
    stopped = False
    it = 0
    for it in range(1, cfg.n + 1):
        dz = z.deriv()
        rhs = np.zeros(len(sys.nodes), dtype=REAL)
        for k in sys.kept:
            x = sys.nodes[k]
            try:
                val = REAL(spec0.g(x, z(x), dz(x)))
            except EvalError as exc:
                raise NonFiniteError(
                    f"g failed at node {float(x)!r}, iteration {it}: {exc}",
                    node=float(x), iteration=it,
                ) from None
            if not np.isfinite(val):
                raise NonFiniteError(
                    f"g is not finite at node {float(x)!r}, iteration {it}",
                    node=float(x), iteration=it,
                )
            rhs[k] = val
        z = linear_solve(sys, rhs)
        cur = z(grid)
        deltas.append(REAL(np.max(np.abs(cur - prev))))
        prev = cur
        if cfg.stop_tol is not None and deltas[-1] <= cfg.stop_tol:
            stopped = it < cfg.n
            break
    errors = None
    if spec0.exact is not None:
        errors = tuple(np.abs(prev - spec0.exact(grid)))
    return SolveReport(
        solution=z,
        shift=Polynomial(),
        iterates_delta=tuple(deltas),
        iterations=it,
        grid=tuple(grid),
        errors=errors,
        config=cfg,
        nodes=sys.nodes,
        kept=sys.kept,
        dropped=sys.dropped,
        stopped_early=stopped,
        exact=spec0.exact,
    )


def solve(spec: ProblemSpec, cfg: SolverConfig) -> SolveReport:
    """Homogenize, build the collocation system and iterate."""
    spec0, q = homogenize(spec)
    report = iterate(spec0, cfg)
    errors = None
    if spec.exact is not None:
        grid = np.array(report.grid, dtype=REAL)
        approx = report.solution(grid) + q(grid)
        errors = tuple(np.abs(approx - spec.exact(grid)))
    return dataclasses.replace(report, shift=q, errors=errors, exact=spec.exact)


def manufacture(
    exact: Polynomial,
    theta,
    alpha,
    beta,
    a0=0,
    a1=0,
    a2=1,
    nonlinear=0,
) -> ProblemSpec:
    """Problem whose solution is ``exact``.

    The forcing is ``f = L exact - nonlinear(xi, exact, exact')`` and the
    right-hand side ``g = f + nonlinear``. Boundary values are read off
    ``exact``, so it need not vanish at the constraint points.
    """
    if not isinstance(exact, Polynomial):
        raise SpecError("exact solution must be a Polynomial", key="exact_coeffs")
    fa, fb = FracOrder(alpha), FracOrder(beta)
    c0, c1, c2 = (_coefficient(v, k) for v, k in ((a0, "a0"), (a1, "a1"), (a2, "a2")))
    nl = _rhs(nonlinear, "nonlinear")
    da = caputo_poly(exact, fa)
    db = caputo_poly(exact, fb)
    dexact = exact.deriv()

    def forcing(xi):
        u = exact(xi)
        return c2(xi) * da(xi) + c1(xi) * db(xi) + c0(xi) * u - nl(xi, u, dexact(xi))

    def g(xi, z, zp):
        return forcing(xi) + nl(xi, z, zp)

    t = REAL(theta)
    return ProblemSpec(
        alpha=fa.value,
        beta=fb.value,
        theta=t,
        a0=c0,
        a1=c1,
        a2=c2,
        g=g,
        gamma0=exact(REAL(0)),
        gamma1=exact(t),
        gamma2=exact(REAL(1)),
        exact=exact,
    )


def error_grid(report: SolveReport, exact: Optional[Polynomial] = None, grid=None):
    """Rows ``(x, exact, approx, abs_error)`` with ``approx = solution + shift``."""
    exact = exact if exact is not None else report.exact
    if exact is None:
        raise DomainError("error_grid needs an exact solution")
    xs = np.array(report.grid if grid is None else grid, dtype=REAL)
    approx = report.approx(xs)
    ex = exact(xs)
    return [
        ErrorRow(x, e, a, abs(a - e)) for x, e, a in zip(xs, ex, approx)
    ]
