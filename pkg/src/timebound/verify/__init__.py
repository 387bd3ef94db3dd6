"""Bounded exhaustive verification of instrumented programs."""

from timebound.verify.engine import (
    BoundExceededError,
    active_kernel,
    available_kernels,
    build_counterexample,
    compile_for_verification,
    explore,
    min_path_value,
    prepare_source,
    recover_timers,
    replay,
    verify_source,
)
from timebound.verify.program import CompiledProgram, compile_program
from timebound.verify.result import (
    Bounds,
    Counterexample,
    TraceState,
    Verdict,
    VerdictKind,
    ViolatedProperty,
    format_counterexample,
)
from timebound.verify.stepper import InterpreterState, initial_state, step

__all__ = [
    "BoundExceededError",
    "Bounds",
    "CompiledProgram",
    "Counterexample",
    "InterpreterState",
    "TraceState",
    "Verdict",
    "VerdictKind",
    "ViolatedProperty",
    "active_kernel",
    "available_kernels",
    "build_counterexample",
    "compile_for_verification",
    "compile_program",
    "explore",
    "format_counterexample",
    "initial_state",
    "min_path_value",
    "prepare_source",
    "recover_timers",
    "replay",
    "step",
    "verify_source",
]
