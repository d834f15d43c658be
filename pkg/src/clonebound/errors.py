"""Exception taxonomy shared by every module in the package."""

from __future__ import annotations


class CloneboundError(ValueError):
    """Base class for all domain errors raised by this package."""


class NonFinite(CloneboundError):
    """Input contains NaN or Inf entries."""


class DimMismatch(CloneboundError):
    """Operand dimensions are inconsistent with each other or with a DimSpec."""


class DimTooLarge(CloneboundError):
    """Dense-matrix dimension exceeds the supported cap."""


class DimTooSmall(CloneboundError):
    """Operation needs a larger Hilbert space than the input provides."""


class NotHermitian(CloneboundError):
    """Matrix is not Hermitian within tolerance."""


class NotPSD(CloneboundError):
    """Matrix has an eigenvalue below the negative tolerance."""


class NotUnitary(CloneboundError):
    """Matrix is not unitary within tolerance."""


class NotDensity(CloneboundError):
    """Matrix fails the density-matrix invariants (trace one)."""


class NotProjector(CloneboundError):
    """Matrix is not an orthogonal projector within tolerance."""


class InvalidPOVM(CloneboundError):
    """Element list fails the POVM invariants, or probabilities expose that."""


class EnvTooSmall(CloneboundError):
    """Environment dimension is below the state's rank."""


class TargetOutOfRange(CloneboundError):
    """Requested overlap is outside the attainable [0, sqrt(F)] range."""


class BadRank(CloneboundError):
    """Requested rank outside [1, d]."""


class OutOfRange(CloneboundError):
    """Scalar argument outside its documented domain."""


class IndistinguishablePair(CloneboundError):
    """Relative error is undefined (0/0) because the two inputs coincide."""


class DegeneratePair(CloneboundError):
    """Lower bound is undefined at f = 1 (coinciding inputs)."""


class BudgetZero(CloneboundError):
    """Optimizer budget (restarts or iterations) is not positive."""


class SoundnessViolation(CloneboundError):
    """A computed relative error fell below the proven lower bound.

    The bound is a theorem, so this can only happen through an implementation
    or numerical fault; it is raised loudly instead of being reported as data.
    """
