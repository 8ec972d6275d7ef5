"""Exception types shared across the package."""


class TypoguardError(Exception):
    """Base class for all errors raised by this package."""


class InvalidName(TypoguardError):
    """A package name is empty, too long, or uses characters outside the legal alphabet."""


class ParseError(TypoguardError):
    """A snapshot file line could not be parsed.

    Carries the 1-based line number of the offending line.
    """

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class DuplicateName(TypoguardError):
    """The same package name occurs twice in a snapshot file."""

    def __init__(self, name: str, line_number: int | None = None):
        where = f" (line {line_number})" if line_number is not None else ""
        super().__init__(f"duplicate package name {name!r}{where}")
        self.name = name
        self.line_number = line_number


class NetworkError(TypoguardError):
    """A registry request failed after exhausting retries."""


class RateLimited(NetworkError):
    """The registry kept answering 429 after backing off the configured number of times."""


class MalformedResponse(TypoguardError):
    """The registry answered with a body that does not match the expected schema."""


class ResolutionError(TypoguardError):
    """An install request was malformed (e.g. empty list of requested packages)."""


class BoundsError(TypoguardError):
    """A sweep threshold falls outside the analysis window."""
