"""Error taxonomy shared by all modules.

The CLI maps these onto exit codes: precondition-style failures exit 2,
resource exhaustion exits 3, anything else is a bug.
"""


class SkewlabError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SkewlabError):
    """Argument outside the operation's domain."""


class PreconditionError(InvalidInputError):
    """A stated precondition of an operation is violated."""


class RangeError(InvalidInputError):
    """Parameter outside the range where the guarantee applies."""


class PrecisionError(SkewlabError):
    """Working precision exhausted; carries the last reliable index if any."""

    def __init__(self, msg, last_reliable=None):
        super().__init__(msg)
        self.last_reliable = last_reliable


class ResourceError(SkewlabError):
    """Computation would exceed the configured resource budget."""


class IntegrityError(SkewlabError):
    """An internal certificate failed; indicates a construction bug."""


class ConstructionError(SkewlabError):
    """An inductive construction cannot proceed (e.g. empty stage window)."""


class StateError(SkewlabError):
    """Operation called before the object reached the required state."""


class IncompleteError(SkewlabError):
    """Result cannot be certified with the data available so far."""
