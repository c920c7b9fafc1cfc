"""Command-line front end.

::

    lrkm solve SPEC [--m M] [--n N] [--node-offset X] [--grid A:B:H]
                    [--format table|csv|json] [--out PATH] [--timing]
    lrkm sweep SPEC --alpha-list 2,1.9 --beta-list 1,0.9 [--m M] [--n N]
                    [--format table|csv|json] [--out PATH]
    lrkm verify [--suite fracops|kernel|solver|all]

Exit codes: 0 success, 1 a verify check failed, 2 invalid input (the message
names the offending key and line), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from lrkm import __version__
from lrkm._precision import PRECISION
from lrkm.errors import DomainError, NumericalError, SpecError
from lrkm.exprlang import EvalError, ParseError
from lrkm.solver import SolveReport, solve
from lrkm.specfile import SpecFile, build, load_specfile
from lrkm.verify import inject_fault, run_suite

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

CSV_HEADER = "x,exact,approx,abs_error"


def num(v) -> str:
    """Shortest decimal that round-trips the value as a double."""
    return repr(float(v))


def _plain(v) -> str:
    v = float(v)
    if v != 0 and abs(v) < 1e-4:
        return np.format_float_scientific(v, unique=True)
    return np.format_float_positional(v, unique=True, trim="-")


def _sci(v) -> str:
    return f"{float(v):.2E}"


# ------------------------------------------------------------- formatting


def _rows(report: SolveReport):
    """``(x, exact | None, approx, abs_error | None)`` per grid point."""
    xs = np.array(report.grid)
    approx = report.approx(xs)
    if report.exact is None:
        return [(x, None, a, None) for x, a in zip(xs, approx)]
    exact = report.exact(xs)
    return [(x, e, a, abs(a - e)) for x, e, a in zip(xs, exact, approx)]


def _table(header, body) -> str:
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    fmt = lambda r: " | ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip()  # noqa: E731
    lines = [fmt(header), "-+-".join("-" * w for w in widths)]
    lines += [fmt(r) for r in body]
    return "\n".join(lines) + "\n"


def format_table(report: SolveReport) -> str:
    rows = _rows(report)
    if report.exact is None:
        return _table(["x", "Approximate Sol."], [[_plain(x), _plain(a)] for x, _, a, _ in rows])
    return _table(
        ["x", "Exact Sol.", "Approximate Sol.", "Absolute Error"],
        [[_plain(x), _plain(e), _plain(a), _sci(d)] for x, e, a, d in rows],
    )


def format_csv(report: SolveReport) -> str:
    lines = [CSV_HEADER]
    for x, e, a, d in _rows(report):
        lines.append(",".join((num(x), "" if e is None else num(e), num(a), "" if d is None else num(d))))
    return "\n".join(lines) + "\n"


def run_report(report: SolveReport, sf: SpecFile, wall_time: Optional[float]) -> dict:
    """The JSON document for one solve (see the README for the field list)."""
    rows = _rows(report)
    return {
        "artifact": "lrkm",
        "version": __version__,
        "precision": PRECISION,
        "input": {"source": sf.source, "config": sf.echo()},
        "result": {
            "iterations": report.iterations,
            "stopped_early": report.stopped_early,
            "iterates_delta": [float(d) for d in report.iterates_delta],
            "nodes": [float(x) for x in report.nodes],
            "kept": list(report.kept),
            "dropped": list(report.dropped),
            "coeffs": [float(c) for c in report.total.coeffs],
            "rows": [
                {
                    "x": float(x),
                    "exact": None if e is None else float(e),
                    "approx": float(a),
                    "abs_error": None if d is None else float(d),
                }
                for x, e, a, d in rows
            ],
            "max_abs_error": report.max_error,
        },
        "wall_time_s": wall_time,
    }


def format_json(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# --------------------------------------------------------------- commands


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _apply_overrides(sf: SpecFile, args) -> SpecFile:
    for key, attr in (("m", "m"), ("n", "n"), ("node_offset", "node_offset"), ("grid", "grid")):
        value = getattr(args, attr, None)
        if value is not None:
            sf = sf.override("solver", key, value)
    return sf


def cmd_solve(args) -> int:
    sf = _apply_overrides(load_specfile(args.spec), args)
    spec, cfg = build(sf)
    start = time.perf_counter()
    report = solve(spec, cfg)
    elapsed = time.perf_counter() - start if args.timing else None
    if args.format == "csv":
        text = format_csv(report)
    elif args.format == "json":
        text = format_json(run_report(report, sf, elapsed))
    else:
        text = format_table(report)
    _emit(text, args.out)
    return EXIT_OK


def _split(text: str, name: str):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise SpecError("empty list", key=name)
    return items


def _sweep_cell(sf: SpecFile, alpha: str, beta: str):
    try:
        cell = sf.override("problem", "alpha", alpha).override("problem", "beta", beta)
        spec, cfg = build(cell)
        return solve(spec, cfg), None
    except (SpecError, ParseError, DomainError, NumericalError, EvalError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def cmd_sweep(args) -> int:
    alphas = _split(args.alpha_list, "alpha-list")
    betas = _split(args.beta_list, "beta-list")
    if len(alphas) != len(betas):
        raise SpecError(
            f"{len(alphas)} alphas but {len(betas)} betas; lists pair up elementwise",
            key="beta-list",
        )
    sf = _apply_overrides(load_specfile(args.spec), args)
    build(sf)  # surface spec errors once, before fanning out
    pairs = list(zip(alphas, betas))
    with ThreadPoolExecutor() as pool:
        cells = list(pool.map(lambda p: _sweep_cell(sf, *p), pairs))

    ok = [r for r, err in cells if r is not None]
    grid = ok[0].grid if ok else ()
    has_exact = bool(ok) and ok[0].exact is not None
    labels = [f"alpha={a} beta={b}" for a, b in pairs]

    def column(report):
        # error column when the solution is known, otherwise approximations
        rows = _rows(report)
        return [d if has_exact else a for _, _, a, d in rows]

    columns = [None if r is None else column(r) for r, _ in cells]
    failures = [(lab, err) for lab, (_, err) in zip(labels, cells) if err]

    if args.format == "json":
        doc = {
            "artifact": "lrkm",
            "version": __version__,
            "precision": PRECISION,
            "input": {"source": sf.source, "config": sf.echo()},
            "quantity": "abs_error" if has_exact else "approx",
            "grid": [float(x) for x in grid],
            "cells": [
                {
                    "alpha": a,
                    "beta": b,
                    "values": None if col is None else [float(v) for v in col],
                    "error": err,
                }
                for (a, b), col, (_, err) in zip(pairs, columns, cells)
            ],
        }
        text = format_json(doc)
    elif args.format == "csv":
        lines = [",".join(["x"] + labels)]
        for i, x in enumerate(grid):
            lines.append(",".join([num(x)] + ["FAILED" if c is None else num(c[i]) for c in columns]))
        lines += [f"# {lab}: {err}" for lab, err in failures]
        text = "\n".join(lines) + "\n"
    else:
        cellfmt = _sci if has_exact else _plain
        body = [
            [_plain(x)] + ["FAILED" if c is None else cellfmt(c[i]) for c in columns]
            for i, x in enumerate(grid)
        ]
        text = _table(["x"] + labels, body) if grid else ""
        text += "".join(f"FAILED {lab}: {err}\n" for lab, err in failures)
    _emit(text, args.out)
    return EXIT_NUMERIC if failures else EXIT_OK


def cmd_verify(args) -> int:
    failed = []
    fault = inject_fault(args.inject_fault) if args.inject_fault else contextlib.nullcontext()
    with fault:
        for res in run_suite(args.suite):
            print(f"{'PASS' if res.passed else 'FAIL'}  {res.name}: {res.detail}", flush=True)
            if not res.passed:
                failed.append(res.name)
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}")
        return EXIT_VERIFY
    print("all checks passed")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lrkm",
        description="Kernel collocation solver for fractional three-point boundary value problems.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("spec", help="problem specification file")
        sp.add_argument("--m", type=int, help="polynomial degree of the trial space")
        sp.add_argument("--n", type=int, help="number of iterations")
        sp.add_argument("--format", choices=("table", "csv", "json"), default="table")
        sp.add_argument("--out", help="write output here instead of stdout")

    s = sub.add_parser("solve", help="solve one problem")
    common(s)
    s.add_argument("--node-offset", dest="node_offset", help="nodes are (j + offset) / m")
    s.add_argument("--grid", help="evaluation grid start:stop:step")
    s.add_argument("--timing", action="store_true", help="record wall time in json output")
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="solve for several (alpha, beta) pairs")
    common(w)
    w.add_argument("--alpha-list", required=True, help="comma-separated alphas")
    w.add_argument("--beta-list", required=True, help="comma-separated betas, paired with alphas")
    w.set_defaults(func=cmd_sweep)

    v = sub.add_parser("verify", help="run the built-in self-test suites")
    v.add_argument("--suite", choices=("fracops", "kernel", "solver", "all"), default="all")
    v.add_argument("--inject-fault", choices=("gamma",), help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ParseError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, EvalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
