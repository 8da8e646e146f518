class ParameterError(ValueError):
    """A precondition on construction or verification parameters failed."""


class SizeCapError(ParameterError):
    """The requested object exceeds the configured size cap."""
