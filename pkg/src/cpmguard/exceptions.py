"""Exception hierarchy.  Every error raised on purpose by this package derives
from :class:`CpmGuardError`, so callers (and the CLI) can catch one class."""


class CpmGuardError(Exception):
    """Base class for all package errors."""


class EmptyTranscript(CpmGuardError, ValueError):
    pass


class EmptyCorpus(CpmGuardError, ValueError):
    pass


class MissingLabels(CpmGuardError, ValueError):
    pass


class EmptyResponses(CpmGuardError, ValueError):
    pass


class OutOfRange(CpmGuardError, ValueError):
    pass


class BadCount(CpmGuardError, ValueError):
    pass


class UnlabeledScenario(CpmGuardError, ValueError):
    pass


class DuplicateScenarioId(CpmGuardError, ValueError):
    pass


class UnknownConversation(CpmGuardError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class ParseError(CpmGuardError, ValueError):
    """Malformed input file.  ``line`` is 1-based, or None when not line-oriented."""

    def __init__(self, reason, line=None, path=None):
        self.reason = reason
        self.line = line
        self.path = path
        where = f"{path or '<input>'}"
        if line is not None:
            where += f":{line}"
        super().__init__(f"{where}: {reason}")


class InvariantViolation(CpmGuardError, ValueError):
    """A value parsed fine but breaks a domain invariant."""

    def __init__(self, field, reason, scenario_id=None):
        self.field = field
        self.reason = reason
        self.scenario_id = scenario_id
        prefix = f"scenario {scenario_id!r}: " if scenario_id is not None else ""
        super().__init__(f"{prefix}{field}: {reason}")
