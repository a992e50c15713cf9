"""Exception types shared across the package.

The CLI maps these onto its exit codes: InputError (and subclasses) exit
with 2, CapExceededError with 3.
"""


class InputError(ValueError):
    """A caller-supplied value violates a documented precondition."""


class UndefinedMetricError(InputError):
    """A metric denominator is zero, so the ratio is undefined."""


class CapExceededError(RuntimeError):
    """A brute-force oracle was asked to enumerate beyond its cost cap."""
