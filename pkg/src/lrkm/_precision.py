"""Working precision for every numeric array in the package.

The dtype is chosen once, at import, from the ``LRKM_PRECISION`` environment
variable:

``extended`` (default)
    ``numpy.longdouble``. On x86-64 Linux this is the 80-bit x87 format with a
    64-bit mantissa (machine epsilon ~1.1e-19). On platforms where
    ``long double`` is plain binary64 it silently degrades to ``double``.
``double``
    ``numpy.float64``.

Reported values (csv/json) are always converted to Python floats.
"""

from __future__ import annotations

import os
from fractions import Fraction

import numpy as np

_DTYPES = {"extended": np.longdouble, "double": np.float64}

PRECISION: str = os.environ.get("LRKM_PRECISION", "extended").strip().lower()
if PRECISION not in _DTYPES:
    raise ImportError(
        f"LRKM_PRECISION must be one of {sorted(_DTYPES)}, got {PRECISION!r}"
    )

REAL = _DTYPES[PRECISION]
EPS = float(np.finfo(REAL).eps)


def real(x) -> np.floating:
    """Convert a number (or numeric string) to the working precision."""
    if isinstance(x, Fraction):
        return from_fraction(x)
    return REAL(x)


def to_fraction(x) -> Fraction:
    """Exact rational value of a binary floating-point number."""
    num, den = REAL(x).as_integer_ratio()
    return Fraction(num, den)


def from_fraction(q: Fraction) -> np.floating:
    """Round a rational to the working precision (double-double intermediate)."""
    hi = float(q)
    lo = float(q - Fraction(hi))
    return REAL(hi) + REAL(lo)


def as_real_array(values) -> np.ndarray:
    return np.asarray(values, dtype=REAL)
