"""Exception types raised across the package."""


class LooseCoreError(Exception):
    """Base class for every error raised by loosecore."""


class InvalidParams(LooseCoreError, ValueError):
    pass


class ProbabilityOverflow(LooseCoreError, ValueError):
    pass


class DomainError(LooseCoreError, ValueError):
    pass


class VertexOutOfRange(LooseCoreError, IndexError):
    pass


class EdgeOutOfRange(LooseCoreError, IndexError):
    pass


class NodeOutOfRange(LooseCoreError, IndexError):
    pass


class EmptyEdgeSet(LooseCoreError, ValueError):
    pass


class MismatchedInput(LooseCoreError, ValueError):
    pass


class TruncatedNeighborhood(LooseCoreError, ValueError):
    pass


class NoConvergence(LooseCoreError, RuntimeError):
    pass


class SupportMismatch(LooseCoreError, ValueError):
    pass


class InstanceTooLarge(LooseCoreError, ValueError):
    pass
