class GuardError(ValueError):
    """An exhaustive enumeration would exceed its configured size limit."""


class InstanceParseError(ValueError):
    """Malformed instance file; carries the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class InvariantError(RuntimeError):
    """An internal invariant of the optimiser state was broken."""
