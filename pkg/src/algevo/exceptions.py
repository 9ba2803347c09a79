"""Exception hierarchy shared by the library and the command line."""


class AlgevoError(Exception):
    """Base class for errors raised by this package."""


class ResourceLimitError(AlgevoError):
    """A requested computation exceeds the configured budget."""


class UnsupportedBlockError(AlgevoError, ValueError):
    """A block is longer than anything the CTM table can score."""


class DataFormatError(AlgevoError, ValueError):
    """An input file does not follow its declared format."""


class PoolExhaustedError(AlgevoError):
    """Every candidate of a no-replacement pool has already been drawn."""
