"""Reproducing-kernel collocation for nonlinear fractional three-point
boundary value problems on [0, 1].

The working precision is fixed at import by ``LRKM_PRECISION`` (see
:mod:`lrkm._precision`).
"""

__version__ = "0.1.0"
