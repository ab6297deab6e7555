"""Exception hierarchy.

The three top-level classes map onto the CLI exit codes: schema problems
exit with 1, unmet preconditions with 2 and broken internal invariants
with 3.
"""


class ClusterTreeError(Exception):
    """Base class for all errors raised by :mod:`clustertree`."""


class SchemaError(ClusterTreeError, ValueError):
    """Input document does not conform to the expected JSON schema."""


class PreconditionError(ClusterTreeError, ValueError):
    """Input is well formed but violates an operation's precondition."""


class InvariantError(ClusterTreeError, AssertionError):
    """An internal invariant failed. Never expected in correct use."""


class InvalidAnchorError(PreconditionError):
    pass


class EmptyComplexError(PreconditionError):
    pass


class DisconnectedSupportError(PreconditionError):
    pass


class NotInClassError(PreconditionError):
    """The density does not belong to the required function class."""


class GeometryMissingError(PreconditionError):
    pass


class EnumerationCapError(PreconditionError):
    pass


class NoSplitError(PreconditionError):
    pass


class TruthUnavailableError(PreconditionError):
    pass
