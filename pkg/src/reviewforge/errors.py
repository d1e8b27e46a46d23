"""Exception hierarchy shared across the package."""


class ForgeError(Exception):
    """Base class for all errors raised by this package."""


class CorpusError(ForgeError):
    """Malformed, mis-ordered, or duplicate corpus data."""


class BackendUnavailableError(ForgeError):
    """Remote backend could not be reached after bounded retries."""


class BackendProtocolError(ForgeError):
    """Backend answered, but the response violates the wire contract."""


class SamplerError(ForgeError):
    """Source sampling cannot proceed (e.g. empty review pool)."""


class CheckpointError(ForgeError):
    """Checkpoint file is unusable for resuming the requested run."""


class EvalError(ForgeError):
    """Evaluation inputs are inconsistent (missing items, empty files)."""
