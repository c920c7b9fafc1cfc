"""Exception hierarchy.

Everything raised on purpose by the package derives from :class:`LrkmError`.
The CLI maps :class:`SpecError` (and expression parse errors) to exit code 2
and :class:`NumericalError` subclasses to exit code 3.
"""


class LrkmError(Exception):
    """Base class for package errors."""


class DomainError(LrkmError, ValueError):
    """An argument lies outside the domain of an operation."""


class DegreeCapError(DomainError):
    """A polynomial would exceed the configured degree cap."""


class NumericalError(LrkmError):
    """A computation could not produce a meaningful result."""


class DegenerateBasisError(NumericalError):
    """Gram-Schmidt dropped every input vector."""


class DegenerateKernelError(NumericalError):
    """The interior point makes the three-point kernel correction singular."""


class NonFiniteError(NumericalError):
    """A right-hand side evaluation produced a non-finite value."""

    def __init__(self, message, *, node=None, iteration=None):
        super().__init__(message)
        self.node = node
        self.iteration = iteration


class SpecError(LrkmError):
    """Invalid problem-specification file or problem parameters."""

    def __init__(self, message, *, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.detail = message
        self.key = key
        self.line = line
