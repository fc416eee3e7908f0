"""Exception hierarchy shared across the package."""


class ThtbError(Exception):
    """Base class for all package errors."""


class DatasetFormatError(ThtbError):
    """Malformed dataset line, empty required field, or card misalignment."""


class ConfigError(ThtbError):
    """Invalid or incomplete configuration."""


class BackendError(ThtbError):
    """Model backend unreachable, malformed payload, or unparseable output."""


class PipelineError(ThtbError):
    """A selection stage could not run (missing scores, bad population)."""
