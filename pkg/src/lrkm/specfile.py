"""Problem-specification files.

A spec file has a ``[problem]`` and a ``[solver]`` section of ``key = value``
lines. Blank lines and lines starting with ``#`` are ignored. Unknown keys,
unknown sections and repeated keys are errors; every error names the key and
line number.

[problem]
    alpha, beta, theta        numbers (required)
    a0, a1, a2                expressions in ``xi`` (required)
    mode                      ``explicit`` (default) or ``manufactured``
    gamma0, gamma1, gamma2    boundary values at 0, theta, 1 (default 0)
    g                         explicit mode: right-hand side in xi, z, zp
    exact_coeffs              ascending monomial coefficients, comma separated;
                              required in manufactured mode, optional in
                              explicit mode (enables the error columns)
    nonlinear                 manufactured mode: expression in xi, z, zp
                              (default 0); the equation is L z = f + nonlinear

[solver]
    m, n                      integers (required)
    node_offset               default 0.3
    gs_tol                    Gram-Schmidt drop tolerance, default 1e-12
    stop_tol                  optional early-exit tolerance
    grid                      ``start:stop:step``, default ``0:1:0.1``
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from lrkm._precision import REAL, from_fraction
from lrkm.errors import SpecError
from lrkm.exprlang import ParseError, parse
from lrkm.polybasis import Polynomial
from lrkm.solver import ProblemSpec, SolverConfig, manufacture

PROBLEM_KEYS = (
    "alpha", "beta", "theta", "gamma0", "gamma1", "gamma2",
    "a0", "a1", "a2", "mode", "g", "exact_coeffs", "nonlinear",
)
SOLVER_KEYS = ("m", "n", "node_offset", "gs_tol", "stop_tol", "grid")
SECTIONS = {"problem": PROBLEM_KEYS, "solver": SOLVER_KEYS}

DEFAULTS = {
    "problem": {"gamma0": "0", "gamma1": "0", "gamma2": "0", "mode": "explicit"},
    "solver": {"node_offset": "0.3", "gs_tol": "1e-12", "grid": "0:1:0.1"},
}
REQUIRED = {
    "problem": ("alpha", "beta", "theta", "a0", "a1", "a2"),
    "solver": ("m", "n"),
}


@dataclass
class SpecFile:
    """Raw key/value strings per section, with the line each came from."""

    values: dict = field(default_factory=lambda: {"problem": {}, "solver": {}})
    lines: dict = field(default_factory=dict)
    source: str = "<spec>"

    def get(self, section, key, default=None):
        return self.values[section].get(key, DEFAULTS[section].get(key, default))

    def line_of(self, key):
        return self.lines.get(key)

    def override(self, section, key, value) -> "SpecFile":
        if key not in SECTIONS[section]:
            raise SpecError(f"unknown {section} key", key=key)
        values = {s: dict(v) for s, v in self.values.items()}
        values[section][key] = str(value)
        lines = dict(self.lines)
        lines.pop(key, None)
        return SpecFile(values, lines, self.source)

    def echo(self) -> dict:
        """Effective configuration, defaults included, as strings."""
        out = {}
        for section in SECTIONS:
            merged = dict(DEFAULTS[section])
            if section == "problem" and self.get("problem", "mode") == "manufactured":
                # boundary values come from the exact solution there
                for k in ("gamma0", "gamma1", "gamma2"):
                    merged.pop(k)
            merged.update(self.values[section])
            out[section] = {k: merged[k] for k in SECTIONS[section] if k in merged}
        return out


def parse_specfile(text: str, source: str = "<spec>") -> SpecFile:
    sf = SpecFile(source=source)
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in SECTIONS:
                raise SpecError(f"unknown section [{section}]", line=lineno)
            continue
        if "=" not in line:
            raise SpecError("expected 'key = value'", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if section is None:
            raise SpecError("key outside of a section", key=key, line=lineno)
        if key not in SECTIONS[section]:
            raise SpecError(f"unknown key in [{section}]", key=key, line=lineno)
        if key in sf.values[section]:
            raise SpecError("duplicate key", key=key, line=lineno)
        if not value:
            raise SpecError("empty value", key=key, line=lineno)
        sf.values[section][key] = value
        sf.lines[key] = lineno
    return sf


def load_specfile(path) -> SpecFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from None
    return parse_specfile(text, str(path))


def render_specfile(echo: dict) -> str:
    """Spec-file text for an :meth:`SpecFile.echo` mapping."""
    parts = []
    for section in SECTIONS:
        parts.append(f"[{section}]")
        parts.extend(f"{k} = {v}" for k, v in echo.get(section, {}).items())
        parts.append("")
    return "\n".join(parts)


def _number(sf, section, key, kind=REAL):
    text = sf.get(section, key)
    try:
        if kind is int:
            return int(text)
        float(text)
        return REAL(text)
    except (TypeError, ValueError):
        raise SpecError(f"not a valid number: {text!r}", key=key, line=sf.line_of(key)) from None


def _expr(sf, key, default=None):
    text = sf.get("problem", key, default)
    try:
        return parse(text)
    except ParseError as exc:
        raise SpecError(str(exc), key=key, line=sf.line_of(key)) from None


def parse_grid(text: str):
    """Points ``start, start + step, ..., <= stop``, each rounded once."""
    try:
        start, stop, step = (Fraction(part.strip()) for part in text.split(":"))
    except ValueError:
        raise SpecError(f"grid must be start:stop:step, got {text!r}", key="grid") from None
    if not step > 0 or stop < start:
        raise SpecError(f"grid needs step > 0 and stop >= start, got {text!r}", key="grid")
    count = int((stop - start) / step) + 1
    return tuple(from_fraction(start + i * step) for i in range(count))


def build(sf: SpecFile):
    """Validated ``(ProblemSpec, SolverConfig)`` from a parsed spec file."""
    for section, keys in REQUIRED.items():
        for key in keys:
            if sf.get(section, key) is None:
                raise SpecError(f"missing required key in [{section}]", key=key)
    try:
        return _build_problem(sf), _build_config(sf)
    except SpecError as exc:
        if exc.line is None and exc.key is not None and sf.line_of(exc.key) is not None:
            raise SpecError(
                exc.detail, key=exc.key, line=sf.line_of(exc.key)
            ) from None
        raise


def _build_config(sf: SpecFile) -> SolverConfig:
    stop = sf.get("solver", "stop_tol")
    return SolverConfig(
        m=_number(sf, "solver", "m", int),
        n=_number(sf, "solver", "n", int),
        node_offset=_number(sf, "solver", "node_offset"),
        gs_drop_tol=float(_number(sf, "solver", "gs_tol")),
        stop_tol=None if stop is None else float(_number(sf, "solver", "stop_tol")),
        grid=parse_grid(sf.get("solver", "grid")),
    )


def _exact(sf) -> Optional[Polynomial]:
    text = sf.get("problem", "exact_coeffs")
    if text is None:
        return None
    try:
        [float(c) for c in text.split(",")]
        return Polynomial([REAL(c.strip()) for c in text.split(",")])
    except ValueError:
        raise SpecError(
            f"exact_coeffs must be comma-separated numbers, got {text!r}",
            key="exact_coeffs", line=sf.line_of("exact_coeffs"),
        ) from None


def _build_problem(sf: SpecFile) -> ProblemSpec:
    mode = sf.get("problem", "mode")
    alpha = _number(sf, "problem", "alpha")
    beta = _number(sf, "problem", "beta")
    theta = _number(sf, "problem", "theta")
    coeffs = {k: _expr(sf, k) for k in ("a0", "a1", "a2")}
    gammas = {k: _number(sf, "problem", k) for k in ("gamma0", "gamma1", "gamma2")}
    exact = _exact(sf)
    if mode == "explicit":
        if "nonlinear" in sf.values["problem"]:
            raise SpecError("only allowed in manufactured mode", key="nonlinear",
                            line=sf.line_of("nonlinear"))
        if sf.get("problem", "g") is None:
            raise SpecError("explicit mode needs a right-hand side", key="g")
        return ProblemSpec(
            alpha=alpha, beta=beta, theta=theta, g=_expr(sf, "g"),
            exact=exact, **coeffs, **gammas,
        )
    if mode != "manufactured":
        raise SpecError(f"mode must be explicit or manufactured, got {mode!r}",
                        key="mode", line=sf.line_of("mode"))
    if "g" in sf.values["problem"]:
        raise SpecError("not allowed in manufactured mode", key="g", line=sf.line_of("g"))
    if exact is None:
        raise SpecError("manufactured mode needs an exact solution", key="exact_coeffs")
    # range checks before touching theta
    ProblemSpec(alpha=alpha, beta=beta, theta=theta)
    spec = manufacture(
        exact, theta, alpha, beta, nonlinear=_expr(sf, "nonlinear", "0"), **coeffs
    )
    for key, value in zip(gammas, spec.boundary_values):
        if key in sf.values["problem"] and abs(gammas[key] - value) > 1e-12:
            raise SpecError(
                f"boundary value {float(gammas[key])!r} disagrees with exact solution "
                f"value {float(value)!r}", key=key, line=sf.line_of(key),
            )
    return spec
