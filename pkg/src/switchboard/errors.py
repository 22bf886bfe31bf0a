"""Exception hierarchy shared across switchboard modules."""


class SwitchboardError(Exception):
    """Base class for all switchboard errors."""


class ParseError(SwitchboardError):
    """Adapter config file is not valid JSON / not the expected shape."""


class ValidationError(SwitchboardError):
    """Adapter config parsed but violates a registry invariant."""


class EmptyQuery(SwitchboardError):
    """Query is empty after trimming."""


class ShapeMismatch(SwitchboardError):
    """Matrix operands have incompatible shapes."""


class BackendError(SwitchboardError):
    """Base class for backend failures. Carries the model_id for trace logs."""

    def __init__(self, message: str, model_id: str = ""):
        super().__init__(message)
        self.model_id = model_id


class Timeout(BackendError):
    """Backend call exceeded its deadline."""


class BackendUnavailable(BackendError):
    """Connection refused or server-side (5xx) failure."""


class ProtocolError(BackendError):
    """Response body does not match the chat-completions schema."""


class NotTerminal(SwitchboardError):
    """Turn state has not reached a terminal (reply or error) state."""


class EmptySamples(SwitchboardError):
    """Latency statistics requested over zero samples."""
