"""Shared exception types.

Contract violations (bad arguments, malformed files) raise plain ValueError;
these classes mark failures of the numerics themselves, which the CLI maps to
a distinct exit code.
"""


class NumericalError(RuntimeError):
    """A linear-algebra or simulation step failed beyond recovery."""


class RankDeficiencyError(NumericalError):
    """A regression design lost rank under the strict rank policy.

    Carries the offending near-null direction so the caller can see which
    feature combination is degenerate.
    """

    def __init__(self, message, null_direction=None):
        super().__init__(message)
        self.null_direction = null_direction
