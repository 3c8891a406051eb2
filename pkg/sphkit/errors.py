"""Exception hierarchy for the toolkit.

Every failure a caller can act on derives from ``ToolkitError``, which is a
``ValueError`` so that callers treating bad input generically keep working.
"""
from typing import Any, Dict, Optional


class ToolkitError(ValueError):
    """Base error carrying a machine-readable ``details`` mapping."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.details: Dict[str, Any] = dict(details or {})


# liecore
class DimensionMismatch(ToolkitError):
    pass


class NotInSubspace(ToolkitError):
    pass


class InvalidStructure(ToolkitError):
    """Structure constants, form or involution violate an axiom."""


class NonSemisimpleAction(ToolkitError):
    """ad(a) is not diagonalizable over the rationals."""


# sphstruct
class NoGenericElement(ToolkitError):
    pass


class AdaptedParabolicUnverified(ToolkitError):
    pass


class DecompositionFailure(ToolkitError):
    pass


class MonoidElementNotOnAH(ToolkitError):
    pass


# degen
class NotInInteriorCone(ToolkitError):
    pass


class EmptyIndexSet(ToolkitError):
    pass


# cones
class ChartMismatch(ToolkitError):
    pass


# envalg
class CapExceeded(ToolkitError):
    pass


class MaxWeightNotZero(ToolkitError):
    pass


class DegenerateForm(ToolkitError):
    pass


class NotInSubalgebra(ToolkitError):
    pass


# cterm
class ClusterAmbiguity(ToolkitError):
    pass


class GapViolated(ToolkitError):
    pass


class QuadratureFailure(ToolkitError):
    pass


class TailBoundUnreachable(ToolkitError):
    pass


class DirectionDependence(ToolkitError):
    pass


class NonUnitaryCharacter(ToolkitError):
    pass


class NoDecay(ToolkitError):
    pass


class OrderOverflow(ToolkitError):
    pass


class IllConditioned(ToolkitError):
    pass


# rapidfit
class LimitMismatch(ToolkitError):
    pass


class FactorizationFailure(ToolkitError):
    pass


# pipeline
class UnknownExample(ToolkitError):
    pass


class ConfigError(ToolkitError):
    pass


class StageError(ToolkitError):
    """A toolkit error raised inside a pipeline stage, tagged with the stage."""

    def __init__(self, stage: str, cause: ToolkitError):
        super().__init__(f"[{stage}] {cause}", {"stage": stage, **cause.details})
        self.stage = stage
        self.cause = cause
