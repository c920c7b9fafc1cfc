"""The two worked problems, built by :func:`lrkm.solver.manufacture`.

Both have cubic exact solutions vanishing at 0, theta and 1; they are named
after their nonlinearity::

    quadratic:  D^a z + (xi + 1) D^b z + xi z - z**2 = f,              theta = 1/2
    cubic:      xi^2 D^a z + (xi^2 - 1) D^b z + xi^3 z - z z' - z**3 = f, theta = 3/5
"""

from lrkm._precision import REAL
from lrkm.polybasis import Polynomial
from lrkm.solver import ProblemSpec, manufacture

#: (alpha, beta) columns of the comparison tables.
TABLE_PAIRS = (("2", "1"), ("1.9", "0.9"), ("1.8", "0.8"), ("1.7", "0.7"), ("1.6", "0.6"))


def cubic_through(theta) -> Polynomial:
    """``xi (xi - theta) (xi - 1)``."""
    return Polynomial.from_roots((0, REAL(theta), 1))


def example_quadratic(alpha="1.75", beta="0.75") -> ProblemSpec:
    theta = REAL("0.5")
    return manufacture(
        cubic_through(theta),
        theta,
        alpha,
        beta,
        a0=lambda xi: xi,
        a1=lambda xi: xi + 1,
        a2=1,
        nonlinear=lambda xi, z, zp: z * z,
    )


def example_cubic(alpha="1.75", beta="0.75") -> ProblemSpec:
    theta = REAL("0.6")
    return manufacture(
        cubic_through(theta),
        theta,
        alpha,
        beta,
        a0=lambda xi: xi**3,
        a1=lambda xi: xi**2 - 1,
        a2=lambda xi: xi**2,
        nonlinear=lambda xi, z, zp: z * zp + z**3,
    )
