"""Exception hierarchy shared by every module."""


class StreamPropError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGraph(StreamPropError, ValueError):
    pass


class SelfLoop(InvalidGraph):
    def __init__(self, u: int):
        super().__init__(f"self-loop at vertex {u}")
        self.u = u


class VertexOutOfRange(InvalidGraph, IndexError):
    def __init__(self, u: int, n: int):
        super().__init__(f"vertex {u} out of range for n={n}")
        self.u = u
        self.n = n


class EmptyGraph(StreamPropError):
    pass


class NoEdges(StreamPropError):
    pass


class DiscTooLarge(StreamPropError):
    pass


class PatternTooLarge(StreamPropError):
    pass


class ColorRepeatedWithinDisc(StreamPropError, ValueError):
    pass


class NotDecomposable(StreamPropError):
    pass


class PaletteTooLarge(StreamPropError, ValueError):
    pass


class StateSpaceTooLarge(StreamPropError):
    pass


class TooManyEdges(StreamPropError):
    pass


class InsufficientTrials(StreamPropError, ValueError):
    pass


class InvalidParameter(StreamPropError, ValueError):
    pass


class InvalidConfig(StreamPropError, ValueError):
    pass
