"""Exception hierarchy shared by the library and the CLI."""


class InvalidArgumentError(ValueError):
    """Bad numeric input to a pure operation (non-finite value, negative dt, ...)."""


class OutOfWindowError(InvalidArgumentError):
    """State time lies outside the current step window [0, T]."""


class NotAtStepEndError(InvalidArgumentError):
    """Impact requested for a state that is not at t = T."""


class ConfigError(ValueError):
    """Scenario configuration is malformed. ``field`` names the offending key."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class InvariantError(RuntimeError):
    """A physical or numerical invariant was violated."""
