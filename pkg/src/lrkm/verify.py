"""Self-test suites run by ``lrkm verify``.

Each suite is a list of named checks. A check returns ``(passed, detail)``;
exceptions count as failures. Sizes and tolerances are the documented
invariant settings of the corresponding modules.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from lrkm import fracops
from lrkm._precision import REAL
from lrkm.polybasis import Polynomial, diff_poly, inner, shifted_legendre
from lrkm.problems import TABLE_PAIRS, cubic_through, example_quadratic, example_cubic
from lrkm.rkhs import (
    kernel_0w,
    kernel_eval,
    kernel_threepoint,
    theta_correction,
    threepoint_formula,
    verify_reproducing,
)
from lrkm.solver import SolverConfig, homogenize, iterate, manufacture, solve

KERNEL_SIZES = range(3, 9)
KERNEL_THETAS = ("0.3", "0.5", "0.6")
ORACLE_ORDERS = (0.25, 0.5, 0.75, 1.25, 1.5, 1.75)
ORACLE_POINTS = (0.2, 0.5, 0.9)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _worst(values) -> float:
    return max((float(v) for v in values), default=0.0)


# ----------------------------------------------------------------- fracops


def check_gamma_accuracy():
    xs = np.linspace(0.1, 30.0, 300)
    err = _worst(
        abs(float(fracops.gamma(x)) / math.gamma(x) - 1.0) for x in xs
    )
    return err <= 1e-13, f"max relative error {err:.2e} on [0.1, 30]"


def check_caputo_oracle():
    worst, cases = 0.0, 0
    for alpha in ORACLE_ORDERS:
        for k in range(math.ceil(alpha), 11):
            p = Polynomial([0] * k + [1])
            series = fracops.caputo_poly(p, alpha)
            for xi in ORACLE_POINTS:
                closed = float(series(xi))
                oracle = fracops.caputo_quadrature(p, alpha, xi)
                worst = max(worst, abs(closed - oracle))
                cases += 1
    return worst <= 1e-7, f"{cases} cases, max abs difference {worst:.2e}"


def check_integer_orders():
    worst = 0.0
    xs = [REAL(i) / 10 for i in range(1, 10)]
    for alpha in (1, 2):
        for k in range(13):
            p = Polynomial([0] * k + [1])
            classical = p
            for _ in range(alpha):
                classical = diff_poly(classical)
            series = fracops.caputo_monomial(k, alpha)
            for x in xs:
                ref = classical(x)
                got = series(x) if len(series) else REAL(0)
                scale = max(abs(float(ref)), 1e-300)
                worst = max(worst, abs(float(got - ref)) / scale if ref else abs(float(got)))
    return worst <= 1e-13, f"max relative error {worst:.2e}"


def check_linearity():
    rng = np.random.default_rng(7)
    worst = 0.0
    for alpha in ORACLE_ORDERS + (2.0,):
        p = Polynomial(rng.uniform(-1, 1, 8))
        q = Polynomial(rng.uniform(-1, 1, 6))
        a, b = REAL(rng.uniform(-2, 2)), REAL(rng.uniform(-2, 2))
        lhs = fracops.caputo_poly(p * a + q * b, alpha)
        rhs = fracops.caputo_poly(p, alpha) * a + fracops.caputo_poly(q, alpha) * b
        ldict = {float(e): c for c, e in lhs}
        rdict = {float(e): c for c, e in rhs}
        for e in set(ldict) | set(rdict):
            l, r = ldict.get(e, REAL(0)), rdict.get(e, REAL(0))
            scale = max(abs(float(l)), abs(float(r)), 1e-300)
            worst = max(worst, abs(float(l - r)) / scale)
    return worst <= 1e-14, f"max relative coefficient difference {worst:.2e}"


def check_annihilation():
    bad = []
    for alpha in ORACLE_ORDERS + (1.0, 2.0):
        for deg in range(math.ceil(alpha)):
            p = Polynomial([1.5] * (deg + 1))
            if len(fracops.caputo_poly(p, alpha)):
                bad.append((alpha, deg))
    return not bad, "exact" if not bad else f"non-empty series for {bad}"


# ------------------------------------------------------------------ kernel


def _kernels():
    for m in KERNEL_SIZES:
        yield f"0W m={m}", kernel_0w(m), ()
        for t in KERNEL_THETAS:
            kb = kernel_threepoint(m, REAL(t))
            yield f"3pt m={m} theta={t}", kb, (kb.theta,)


def check_orthonormality():
    worst, where = 0.0, ""
    for label, kb, _ in _kernels():
        g = np.array([[inner(a, b) for b in kb.h] for a in kb.h], dtype=REAL)
        err = float(np.max(np.abs(g - np.eye(kb.dim))))
        if err > worst:
            worst, where = err, label
    return worst <= 1e-12, f"max |G - I| {worst:.2e} ({where})"


def check_symmetry():
    rng = np.random.default_rng(11)
    pairs = rng.uniform(0, 1, (50, 2))
    worst = 0.0
    for _, kb, _ in _kernels():
        for x, xi in pairs:
            worst = max(worst, abs(float(kernel_eval(kb, x, xi) - kernel_eval(kb, xi, x))))
    return worst <= 1e-12, f"max asymmetry {worst:.2e}"


def check_annihilation_points():
    xi = np.linspace(0, 1, 21)
    worst = 0.0
    for _, kb, extra in _kernels():
        for x in (0, 1) + extra:
            worst = max(worst, float(np.max(np.abs(kernel_eval(kb, x, xi)))))
    return worst <= 1e-11, f"max |R| at constraint points {worst:.2e}"


def check_reproducing():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _, kb, _ in _kernels():
        p = kb.combine(rng.uniform(-1, 1, kb.dim))
        for x in rng.uniform(0, 1, 10):
            worst = max(worst, verify_reproducing(kb, p, REAL(x)))
    return worst <= 1e-10, f"max reproducing defect {worst:.2e}"


def check_formula_agreement():
    grid = np.linspace(0, 1, 21).astype(REAL)
    worst = 0.0
    for m in KERNEL_SIZES:
        kb0 = kernel_0w(m)
        for t in KERNEL_THETAS:
            theta = REAL(t)
            basis = kernel_eval(kernel_threepoint(m, theta), grid, grid)
            formula = threepoint_formula(kb0, theta, grid, grid)
            worst = max(worst, float(np.max(np.abs(basis - formula))))
    return worst <= 1e-10, f"max basis/formula difference {worst:.2e}"


def check_idempotence():
    rng = np.random.default_rng(3)
    grid = np.linspace(0, 1, 21).astype(REAL)
    worst = 0.0
    for m in KERNEL_SIZES:
        kb0 = kernel_0w(m)
        for t in KERNEL_THETAS:
            theta = REAL(t)
            p = kb0.combine(rng.uniform(-1, 1, kb0.dim))
            once = theta_correction(kb0, p, theta)
            twice = theta_correction(kb0, once, theta)
            worst = max(worst, float(np.max(np.abs(twice(grid) - once(grid)))))
    return worst <= 1e-12, f"max change on the grid {worst:.2e}"


# ------------------------------------------------------------------ solver


def _cfg(m, n, **kw):
    return SolverConfig(m=m, n=n, **kw)


def _interior(report):
    return [e for x, e in zip(report.grid, report.errors) if 0 < x < 1]


def check_example_quadratic():
    r = solve(example_quadratic(), _cfg(5, 9))
    worst = _worst(_interior(r))
    ends = _worst(e for x, e in zip(r.grid, r.errors) if x in (0, REAL("0.5"), 1))
    return worst <= 1e-10 and ends <= 1e-12, f"max error {worst:.2e}, rows 0/theta/1 {ends:.2e}"


def check_example_cubic():
    r = solve(example_cubic(), _cfg(5, 9))
    worst = _worst(_interior(r))
    return worst <= 1e-8, f"max error {worst:.2e}"


def _direction(make, m, lo, hi, theta):
    fails = []
    for alpha, beta in TABLE_PAIRS:
        spec = make(alpha, beta)
        few = solve(spec, _cfg(m, lo))
        many = solve(spec, _cfg(m, hi))
        for x, a, b in zip(few.grid, few.errors, many.errors):
            if 0 < x < 1 and x != theta and not b < a:
                fails.append((alpha, float(x)))
    return fails


def check_direction():
    fails = _direction(example_quadratic, 3, 3, 5, REAL("0.5"))
    fails += _direction(example_cubic, 3, 8, 10, REAL("0.6"))
    return not fails, "errors shrink with n" if not fails else f"no improvement at {fails}"


def check_boundary_exactness():
    worst = 0.0
    for spec in (example_quadratic(), example_cubic()):
        spec0, _ = homogenize(spec)
        cfg = _cfg(5, 1)
        z = None
        for _ in range(5):
            r = iterate(spec0, cfg, start=z)
            z = r.solution
            worst = max(worst, _worst(abs(z(x)) for x in (0, spec.theta, 1)))
    return worst <= 1e-11, f"max |z| at 0/theta/1 {worst:.2e}"


def check_fixed_point():
    worst = 0.0
    for spec in (example_quadratic(), example_cubic()):
        spec0, _ = homogenize(spec)
        r = iterate(spec0, _cfg(5, 1), start=spec0.exact)
        worst = max(worst, _worst(r.errors))
    return worst <= 1e-10, f"one step from exact moves {worst:.2e}"


def dense_oracle(exact: Polynomial, theta, a0, a1, a2, m: int, nodes) -> Polynomial:
    """Least-squares monomial collocation for ``a2 z'' + a1 z' + a0 z = f``.

    The unknown has degree ``m``; rows are the operator at ``nodes`` plus the
    three boundary conditions. Runs in double precision.
    """
    dz = diff_poly(exact)
    f = lambda x: a2(x) * float(diff_poly(dz)(x)) + a1(x) * float(dz(x)) + a0(x) * float(exact(x))  # noqa: E731
    rows, rhs = [], []
    for x in map(float, nodes):
        row = []
        for k in range(m + 1):
            d2 = k * (k - 1) * x ** (k - 2) if k >= 2 else 0.0
            d1 = k * x ** (k - 1) if k >= 1 else 0.0
            row.append(a2(x) * d2 + a1(x) * d1 + a0(x) * x**k)
        rows.append(row)
        rhs.append(f(x))
    for x in (0.0, float(theta), 1.0):
        rows.append([x**k for k in range(m + 1)])
        rhs.append(float(exact(x)))
    coeffs, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
    return Polynomial(coeffs)


def check_integer_order_oracle():
    worst = 0.0
    a0, a1, a2 = (lambda x: x), (lambda x: x + 1), (lambda x: 1.0)
    for t in ("0.5", "0.6"):
        theta = REAL(t)
        exact = cubic_through(theta) * 2 + Polynomial([1, -1])
        for m in (4, 5):
            cfg = _cfg(m, 1)
            spec = manufacture(exact, theta, 2, 1, a0=a0, a1=a1, a2=a2)
            r = solve(spec, cfg)
            oracle = dense_oracle(exact, theta, a0, a1, a2, m, cfg.nodes)
            grid = np.array(r.grid, dtype=REAL)
            diff = np.abs(r.approx(grid) - oracle(grid))
            worst = max(worst, float(np.max(diff)))
    return worst <= 1e-9, f"max solver/oracle difference {worst:.2e}"


def check_node_offset():
    worst = 0.0
    for make in (example_quadratic, example_cubic):
        a = solve(make(), _cfg(5, 9))
        b = solve(make(), _cfg(5, 9, node_offset="0.4"))
        grid = np.array(a.grid, dtype=REAL)
        worst = max(worst, float(np.max(np.abs(a.approx(grid) - b.approx(grid)))))
    return worst <= 1e-8, f"max difference between offsets {worst:.2e}"


def check_legendre_table():
    worst = 0.0
    for i in range(16):
        for j in range(16):
            want = REAL(1) / (2 * i + 1) if i == j else REAL(0)
            worst = max(worst, abs(float(inner(shifted_legendre(i), shifted_legendre(j)) - want)))
    return worst <= 1e-13, f"max deviation {worst:.2e}"


SUITES: dict[str, list[tuple[str, Callable]]] = {
    "fracops": [
        ("gamma accuracy", check_gamma_accuracy),
        ("caputo oracle agreement", check_caputo_oracle),
        ("integer order consistency", check_integer_orders),
        ("linearity", check_linearity),
        ("annihilation", check_annihilation),
    ],
    "kernel": [
        ("legendre orthogonality", check_legendre_table),
        ("orthonormality", check_orthonormality),
        ("symmetry", check_symmetry),
        ("boundary annihilation", check_annihilation_points),
        ("reproducing property", check_reproducing),
        ("formula agreement", check_formula_agreement),
        ("projection idempotence", check_idempotence),
    ],
    "solver": [
        ("quadratic example accuracy", check_example_quadratic),
        ("cubic example accuracy", check_example_cubic),
        ("iteration direction", check_direction),
        ("boundary exactness", check_boundary_exactness),
        ("fixed-point consistency", check_fixed_point),
        ("integer-order oracle", check_integer_order_oracle),
        ("node-offset robustness", check_node_offset),
    ],
}


def run_suite(name: str) -> Iterator[CheckResult]:
    """Run one suite (or ``"all"``), yielding results as they complete."""
    names = list(SUITES) if name == "all" else [name]
    for suite in names:
        for label, fn in SUITES[suite]:
            try:
                passed, detail = fn()
            except Exception as exc:  # a crashing check is a failing check
                passed, detail = False, f"{type(exc).__name__}: {exc}"
            yield CheckResult(f"{suite}: {label}", bool(passed), detail)


@contextlib.contextmanager
def inject_fault(kind: str):
    """Deliberately break a component; used as a negative control."""
    if kind != "gamma":
        raise ValueError(f"unknown fault {kind!r}")
    original = fracops.gamma

    def corrupted(x):
        return original(x) * REAL("1.000001")

    fracops.gamma = corrupted
    try:
        yield
    finally:
        fracops.gamma = original
