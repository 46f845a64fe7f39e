"""Exception hierarchy shared by the engine modules."""


class BCCRError(Exception):
    """Base class for all engine errors."""


class StructureError(BCCRError):
    """Tensor shapes or alphabets do not line up."""


class SizeCapError(StructureError):
    """A dense tensor or codebook would exceed the desk-scale cap."""


class DistributionError(BCCRError):
    """A probability factor is negative or not normalized."""


class VariableError(BCCRError, ValueError):
    """Unknown, overlapping or disallowed variable identifiers."""


class ParseError(BCCRError):
    """Malformed input file; ``path`` names the offending location."""

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
