"""Timers, durations, timed events, and execution-path algebra.

A program with timing constraints is viewed as emitting a sequence of timed
events: function calls that advance every timer by the function's worst-case
duration, timer resets, and assertion checks. Resets and checks take zero
time. The duration of an execution path is the sum of its events' durations,
so with no resets every timer's final value equals the path duration.

Timer arithmetic is exact integer arithmetic; exceeding the configured timer
width raises instead of wrapping, since a silent wraparound could mask a
timing violation. For 64-bit timers the internal cap is the signed 64-bit
maximum, which matches the compiled execution kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Union

from timebound.diagnostics import TimerOverflowError, UnknownFunctionError

INT64_MAX = (1 << 63) - 1


def timer_limit(width: int) -> int:
    """Largest representable timer value for a 32- or 64-bit timer."""
    if width == 32:
        return (1 << 32) - 1
    if width == 64:
        return INT64_MAX
    raise ValueError(f"unsupported timer width {width}")


@dataclass(frozen=True)
class TimerId:
    name: str
    index: int


class DurationMap:
    """Worst-case duration per function name, in abstract time units."""

    def __init__(self, durations: dict[str, int] | None = None):
        self._durations = dict(durations or {})
        for name, d in self._durations.items():
            if d < 0:
                raise ValueError(f"negative duration for {name!r}")

    def duration_of(self, function: str) -> int:
        try:
            return self._durations[function]
        except KeyError:
            raise UnknownFunctionError(f"no duration recorded for function {function!r}") from None

    def __contains__(self, function: str) -> bool:
        return function in self._durations

    def as_dict(self) -> dict[str, int]:
        return dict(self._durations)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DurationMap) and self._durations == other._durations

    def __repr__(self) -> str:
        return f"DurationMap({self._durations!r})"


@dataclass(frozen=True)
class Call:
    """One completed call of `function`, advancing all timers by `duration`."""

    function: str
    duration: int


@dataclass(frozen=True)
class Reset:
    timer: str


@dataclass(frozen=True)
class AssertCheck:
    expr: str
    outcome: bool = True


TimedEvent = Union[Call, Reset, AssertCheck]


def make_call(function: str, durations: DurationMap) -> Call:
    """A Call event whose duration is taken from the duration map."""
    return Call(function, durations.duration_of(function))


@dataclass(frozen=True)
class ExecutionPath:
    """A finite event sequence observed between state indices n and n+len."""

    events: tuple[TimedEvent, ...]
    start_index: int = 0

    @property
    def end_index(self) -> int:
        return self.start_index + len(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def concat(self, other: "ExecutionPath") -> "ExecutionPath":
        return ExecutionPath(self.events + other.events, self.start_index)


def event_duration(event: TimedEvent, durations: DurationMap) -> int:
    """Duration contributed by one event: D(f) for calls, 0 otherwise."""
    if isinstance(event, Call):
        return durations.duration_of(event.function)
    return 0


def path_duration(path: ExecutionPath | Iterable[TimedEvent], durations: DurationMap) -> int:
    """Total time elapsed along a path: the sum of its events' durations."""
    events = path.events if isinstance(path, ExecutionPath) else path
    return sum(event_duration(e, durations) for e in events)


@dataclass(frozen=True)
class TimerValuation:
    """Current value of every timer, bounded by the configured width."""

    values: tuple[int, ...]
    names: tuple[str, ...]
    width: int = 64

    @classmethod
    def zeros(cls, names: Iterable[str], width: int = 64) -> "TimerValuation":
        names = tuple(names)
        return cls((0,) * len(names), names, width)

    def value(self, name: str) -> int:
        return self.values[self.names.index(name)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.names, self.values))


def apply_event(valuation: TimerValuation, event: TimedEvent) -> TimerValuation:
    """Advance a valuation by one event.

    Calls advance every timer together by the call's duration; a reset zeroes
    exactly one timer; assertion checks change nothing. Exceeding the timer
    width raises TimerOverflowError.
    """
    if isinstance(event, Call):
        if event.duration < 0:
            raise ValueError("call duration must be nonnegative")
        limit = timer_limit(valuation.width)
        bumped = []
        for name, v in zip(valuation.names, valuation.values):
            nv = v + event.duration
            if nv > limit:
                raise TimerOverflowError(
                    f"timer {name!r} exceeds {valuation.width}-bit width after +{event.duration}"
                )
            bumped.append(nv)
        return TimerValuation(tuple(bumped), valuation.names, valuation.width)
    if isinstance(event, Reset):
        if event.timer not in valuation.names:
            raise UnknownFunctionError(f"reset of unknown timer {event.timer!r}")
        values = tuple(
            0 if name == event.timer else v for name, v in zip(valuation.names, valuation.values)
        )
        return TimerValuation(values, valuation.names, valuation.width)
    return valuation
