"""Exception types raised across mlncraft.

Every error derives from :class:`MLNError` so the CLI can map data
problems to a single exit code.
"""


class MLNError(Exception):
    """Base class for all data and validation errors."""


class DuplicateLayerName(MLNError):
    pass


class DanglingEndpoint(MLNError):
    pass


class SelfLoop(MLNError):
    pass


class UnknownVertex(MLNError):
    pass


class UnknownLayer(MLNError):
    pass


class NoCouplingBetweenLayers(MLNError):
    pass


class MissingVertexAssignment(MLNError):
    pass


class KExceedsVertexCount(MLNError):
    pass


class HeterogeneousNetwork(MLNError):
    pass


class ComplementTooLarge(MLNError):
    pass


class VertexUniverseMismatch(MLNError):
    pass


class UnweightedCBG(MLNError):
    pass


class InstanceTooLarge(MLNError):
    pass


class UncoupledConsecutiveLayers(MLNError):
    pass


class IllegalRepeat(MLNError):
    pass


class ExpressionError(MLNError):
    """A layer expression string does not follow the grammar."""


class ParseError(MLNError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
