"""Verdicts, counterexamples, and their text/JSON renderings.

The JSON rendering is a pure function of the verification result except for
wall-clock time, which is not reproducible between runs; `runtime_ms` is
therefore fixed to 0 in machine-readable output (the measured value stays on
the Verdict object and appears in human-readable reports). This keeps
repeated runs byte-identical, which the test suite checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


@dataclass(frozen=True)
class Bounds:
    """Exploration limits: all positive."""

    unwind: int = 128
    nondet_width: int = 256
    max_paths: int = 1_000_000

    def __post_init__(self) -> None:
        if self.unwind <= 0 or self.nondet_width <= 0 or self.max_paths <= 0:
            raise ValueError("all bounds must be positive")


class VerdictKind(Enum):
    SUCCESSFUL = "successful"
    FAILED = "failed"
    BOUND_EXCEEDED = "bound_exceeded"
    RUNTIME_FAULT = "runtime_fault"


@dataclass(frozen=True)
class ViolatedProperty:
    file: str
    line: int
    function: str
    expr: str


@dataclass(frozen=True)
class TraceState:
    """One state of a counterexample: the situation after `event`."""

    index: int
    line: int
    event: str
    timers: dict[str, int]


@dataclass(frozen=True)
class Counterexample:
    states: tuple[TraceState, ...]
    violated: ViolatedProperty
    nondet_choices: tuple[int, ...]


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    file: str
    paths_explored: int
    runtime_ms: float = 0.0
    counterexample: Optional[Counterexample] = None
    bound_resource: Optional[str] = None    # "unwind" | "max_paths" | "nondet_width"
    bound_line: Optional[int] = None
    fault_message: Optional[str] = None
    fault_line: Optional[int] = None
    fault_function: Optional[str] = None

    @property
    def successful(self) -> bool:
        return self.kind is VerdictKind.SUCCESSFUL

    @property
    def failed(self) -> bool:
        return self.kind is VerdictKind.FAILED

    def violated_property(self) -> Optional[ViolatedProperty]:
        if self.counterexample is not None:
            return self.counterexample.violated
        if self.kind is VerdictKind.BOUND_EXCEEDED and self.bound_resource == "unwind":
            return ViolatedProperty(
                self.file, self.bound_line or 0, self.fault_function or "",
                f"unwinding assertion (bound exceeded)",
            )
        if self.kind is VerdictKind.RUNTIME_FAULT:
            return ViolatedProperty(
                self.file, self.fault_line or 0, self.fault_function or "",
                self.fault_message or "runtime fault",
            )
        return None

    def to_json_dict(self) -> dict:
        """Fixed-schema machine-readable form; see docs/verdict.schema.json."""
        violated = self.violated_property()
        cex = self.counterexample
        return {
            "verdict": self.kind.value,
            "violated_property": None
            if violated is None
            else {"file": violated.file, "line": violated.line, "expr": violated.expr},
            "nondet_choices": list(cex.nondet_choices) if cex is not None else [],
            "timer_trace": [
                {
                    "state": s.index,
                    "line": s.line,
                    "event": s.event,
                    "timers": dict(s.timers),
                }
                for s in (cex.states if cex is not None else ())
            ],
            "paths_explored": self.paths_explored,
            "runtime_ms": 0,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2)


def format_counterexample(cex: Counterexample) -> str:
    """Human-readable counterexample: violated property, then the timer trace."""
    lines = [
        "Counterexample:",
        "",
        "Violated property:",
        f"  file {cex.violated.file} line {cex.violated.line} function {cex.violated.function}",
        "  assertion",
        f"  {cex.violated.expr}",
        "",
    ]
    if cex.nondet_choices:
        lines.append("nondet choices: " + ", ".join(str(v) for v in cex.nondet_choices))
        lines.append("")
    lines.append("Timer trace:")
    event_width = max((len(s.event) for s in cex.states), default=0)
    for s in cex.states:
        timers = "  ".join(f"{name}={value}" for name, value in s.timers.items())
        lines.append(
            f"  state {s.index:3d}  line {s.line:4d}  {s.event:<{event_width}}  {timers}".rstrip()
        )
    return "\n".join(lines)
