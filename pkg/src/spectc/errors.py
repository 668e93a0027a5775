"""Domain errors shared by the library and the command-line tool."""


class ConfigError(ValueError):
    """A configuration value is malformed or inconsistent (CLI exit code 2)."""


class InfeasibleInputError(ValueError):
    """The request cannot be satisfied for this input, e.g. an empty
    observation set or more samples than entries (CLI exit code 3)."""
