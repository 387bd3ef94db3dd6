"""Source locations, diagnostics, and the error hierarchy shared by all stages."""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Loc:
    """A 1-based (line, column) position in a source unit."""

    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass
class SourceUnit:
    """A source file held in memory.

    `line_index` holds the offset of the start of every line, in strictly
    increasing order, so offsets can be mapped back to (line, col) pairs.
    """

    path: str
    text: str
    line_index: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.line_index:
            self.line_index = [0]
            for i, ch in enumerate(self.text):
                if ch == "\n":
                    self.line_index.append(i + 1)

    def loc(self, offset: int) -> Loc:
        """Map a character offset into this unit to a (line, col) location."""
        i = bisect.bisect_right(self.line_index, offset) - 1
        return Loc(i + 1, offset - self.line_index[i] + 1)


@dataclass(frozen=True)
class Diagnostic:
    """A user-facing message tied to a source position."""

    path: str
    loc: Loc
    severity: str  # "error" or "warning"
    message: str

    def __str__(self) -> str:
        return f"{self.path}:{self.loc.line}:{self.loc.col}: {self.severity}: {self.message}"


class TimeboundError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str, loc: Loc | None = None, path: str | None = None):
        super().__init__(message)
        self.message = message
        self.loc = loc
        self.path = path

    def diagnostic(self, path: str | None = None) -> Diagnostic:
        return Diagnostic(
            path=self.path or path or "<input>",
            loc=self.loc or Loc(1, 1),
            severity="error",
            message=self.message,
        )

    def __str__(self) -> str:
        if self.loc is not None:
            prefix = f"{self.path}:{self.loc}" if self.path else str(self.loc)
            return f"{prefix}: {self.message}"
        return self.message


class LexError(TimeboundError):
    """Illegal character or unterminated comment in the source text."""


class PreprocessError(TimeboundError):
    """Malformed or unbalanced conditional-inclusion directives."""


class ParseError(TimeboundError):
    """Token stream does not match the grammar.

    `expected` lists the token descriptions that would have been accepted.
    """

    def __init__(self, message: str, loc: Loc | None = None, expected: tuple[str, ...] = ()):
        super().__init__(message, loc)
        self.expected = expected


class RecursionCycleError(TimeboundError):
    """The call graph contains a cycle; recursion is not supported."""

    def __init__(self, cycle: list[str], loc: Loc | None = None):
        super().__init__("recursive call cycle: " + " -> ".join(cycle + cycle[:1]), loc)
        self.cycle = cycle


class AnnotationSyntaxError(TimeboundError):
    """A `//@` comment does not match any of the four annotation forms."""


class BindError(TimeboundError):
    """Annotations cannot be attached to the program they were written in."""


class NameClashError(TimeboundError):
    """A timer name collides with an identifier used by the program."""


class CompileError(TimeboundError):
    """Semantic error found while lowering an AST for verification."""


class UnknownFunctionError(TimeboundError):
    """A duration was requested for a function absent from the duration map."""


class TimerOverflowError(TimeboundError):
    """A timer exceeded the configured width; the timing model is broken."""


class VerifyError(TimeboundError):
    """The verifier could not produce a verdict for the given input."""
