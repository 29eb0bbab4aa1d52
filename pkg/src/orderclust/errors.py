"""Exception types raised across the package."""


class OrderClustError(ValueError):
    """Base class for validation errors."""


class CycleDetected(OrderClustError):
    def __init__(self, element: int):
        super().__init__(f"edge list contains a cycle through element {element}")
        self.element = element


class PartitionNotCovering(OrderClustError):
    pass


class ComparableBlocks(OrderClustError):
    pass


class EmptyBlock(OrderClustError):
    pass


class OverlappingBlocks(OrderClustError):
    pass


class TooFewElements(OrderClustError):
    pass


class DimensionMismatch(OrderClustError):
    pass


class NonMonotoneHeights(OrderClustError):
    pass


class InvalidMergeSequence(OrderClustError):
    pass


class NotComplete(OrderClustError):
    pass


class NonPositiveEpsilon(OrderClustError):
    pass


class InvalidT(OrderClustError):
    pass


class InvalidParams(OrderClustError):
    pass


class SizeMismatch(OrderClustError):
    pass


class LengthMismatch(OrderClustError):
    pass


class SearchBudgetExceeded(RuntimeError):
    """Raised by the exhaustive optimiser when the state budget runs out."""

    def __init__(self, limit: int):
        super().__init__(f"exhaustive search exceeded its budget of {limit} states")
        self.limit = limit
