"""Exception types shared across the package.

Input-validation failures derive from PotentialError (a ValueError);
numerical and algorithmic failures derive from ComputationError
(a RuntimeError). The CLI maps the former to exit code 1 and the
latter to exit code 2.
"""

from __future__ import annotations


class PotentialError(ValueError):
    """Invalid single-site potential data."""


class NonMonotoneBreakpoints(PotentialError):
    """Breakpoints are not strictly increasing."""


class SupportOutOfRange(PotentialError):
    """Endpoints differ from -1/2 and 1/2."""


class NonFiniteValue(PotentialError):
    """A breakpoint or piece value is NaN or infinite."""


class ComputationError(RuntimeError):
    """Numerical or algorithmic failure during a computation."""


class KTooSmall(ComputationError):
    """|k| below the exclusion radius around the k = 0 pole."""


class NonRealK(ComputationError):
    """Operation requires a real spectral parameter k."""


class NonPositiveK(ComputationError):
    """Operation requires k > 0."""


class OutOfClosedFormRange(ComputationError):
    """Energy outside the validity range of a closed-form expression."""


class ZeroReflection(ComputationError):
    """b(k) = 0: the conjugated transfer matrices are rotations and
    the norm-gain construction degenerates."""


class Overflow(ComputationError):
    """Integer result would exceed 64-bit width; reported, not wrapped."""


class NumericOverflow(ComputationError):
    """Matrix product overflowed (renormalization disabled)."""


class SpecMismatch(ComputationError):
    """Computed matrices deviate from the form the construction assumes."""


class WitnessNotFound(ComputationError):
    """No norm-growth witness word within the length budget.

    Attributes
    ----------
    reason : str
        Machine-readable cause, one of "rotation-compact" (reflection
        coefficient vanishes, the conjugated group consists of rotations,
        so no witness can exist) or "max-length" (budget exhausted).
    rotation_compact : bool
        True when reason == "rotation-compact".
    """

    def __init__(self, message: str, reason: str = "max-length"):
        super().__init__(message)
        self.reason = reason

    @property
    def rotation_compact(self) -> bool:
        return self.reason == "rotation-compact"
