"""Error taxonomy shared by all modules and the command line front end."""


class RmclassError(Exception):
    """Base class for all rmclass errors."""

    exit_code = 1


class InvalidInputError(RmclassError):
    """Arguments violate a documented precondition."""

    exit_code = 2


class DependencyMissingError(RmclassError):
    """A required earlier computation (classification file, table) is absent."""

    exit_code = 3


class ResourceRefusedError(RmclassError):
    """Pre-flight estimate exceeds the configured memory or size budget."""

    exit_code = 4


class InternalConsistencyError(RmclassError):
    """An invariant that must hold by construction failed; indicates a bug."""

    exit_code = 5
