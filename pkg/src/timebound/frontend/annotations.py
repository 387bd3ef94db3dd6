"""The four timing-annotation kinds carried by `//@` comments.

`raw` preserves the annotation text exactly as written (after the `//@`
prefix), so the instrumenter can echo consumed annotations back into the
output as plain comments. Keyword matching is case-insensitive because both
`WCET-FUNCTION` and `WCET-function` spellings occur in practice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

from timebound.diagnostics import Loc

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, typing only
    from timebound.frontend.nodes import Expr

_NOLOC = Loc(0, 0)


@dataclass(frozen=True)
class DefineTimer:
    name: str
    raw: str = field(default="", compare=False)
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class ResetTimer:
    name: str
    raw: str = field(default="", compare=False)
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class AssertTimer:
    expr: "Expr"
    raw: str = field(default="", compare=False)
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class WcetFunction:
    # An integer literal or the name of a compile-time constant; validated
    # and resolved to a concrete duration when annotations are bound.
    duration: "Expr"
    raw: str = field(default="", compare=False)
    loc: Loc = field(default=_NOLOC, compare=False)


Annotation = Union[DefineTimer, ResetTimer, AssertTimer, WcetFunction]
