"""Exception hierarchy shared by every module.

The CLI maps each family to its own exit code, so callers should raise the
most specific class available.
"""

from __future__ import annotations


class FinflowError(Exception):
    """Base class for all library errors."""


class ValidationError(FinflowError):
    """Input did not satisfy a precondition."""


class InvalidDescriptor(ValidationError):
    pass


class KindMismatch(ValidationError):
    pass


class BoundTooLarge(ValidationError):
    pass


class MembershipError(ValidationError):
    pass


class InvalidEmbedding(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class DegreeMismatch(ValidationError):
    pass


class NotASubgroup(ValidationError):
    pass


class NotABasis(ValidationError):
    pass


class InvalidFamily(ValidationError):
    pass


class MalformedH(ValidationError):
    pass


class NotNaturallyOrdered(ValidationError):
    pass


class PreconditionFailed(ValidationError):
    pass


class ResourceCap(FinflowError):
    """A search exceeded its node or time budget; no verdict was reached."""


class InternalCheckFailed(FinflowError):
    """Two independent computations that must agree did not.

    Never expected in a correct build; subclasses name the check.
    """


class CriteriaDisagree(InternalCheckFailed):
    pass


class EquivalenceViolated(InternalCheckFailed):
    pass


class CorrespondenceFailed(InternalCheckFailed):
    pass


class NoSuchAtom(InternalCheckFailed):
    pass
