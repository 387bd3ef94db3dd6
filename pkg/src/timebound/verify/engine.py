"""Bounded exhaustive path exploration and counterexample construction.

The explorer enumerates nondeterministic choice vectors in lexicographic
order by repeated execution: run a path, then backtrack to the deepest
choice that can still be incremented. A verdict is FAILED as soon as any
path reaches a false assertion (the first hit is therefore the
lexicographically least violating choice vector), SUCCESSFUL only when
every path terminated inside all bounds with every assertion true, and
BOUND_EXCEEDED when a loop outran the unwind bound or the path budget ran
out - a pruned exploration is never reported as success. Division by zero,
out-of-bounds indexing, arithmetic overflow, and timer overflow surface as
a distinct RUNTIME_FAULT verdict.

Path execution goes through one of two interchangeable kernels: the
compiled extension `_pathcore` when it was built, else the pure-Python
`pathvm`. Both implement identical semantics; `TIMEBOUND_PURE=1` forces
the fallback. Counterexample traces are always rebuilt by replaying the
violating choice vector on the pure kernel in trace mode, folding the raw
timer writes back into timed events (calls, resets, assertion checks)
through the model's `apply_event`, and cross-checking the result against
the kernel's final timer values.
"""

from __future__ import annotations

import os
import re
import time
from bisect import bisect_right
from dataclasses import dataclass

from timebound.diagnostics import VerifyError
from timebound.frontend import nodes as n
from timebound.frontend.binder import AnnotatedProgram, bind_annotations
from timebound.frontend.parser import parse
from timebound.frontend.lexer import tokenize
from timebound.frontend.preprocess import preprocess
from timebound.diagnostics import SourceUnit
from timebound.instrument import instrument
from timebound.model import AssertCheck, Call, Reset, TimerValuation, apply_event
from timebound.verify import ops, pathvm
from timebound.verify.program import CompiledProgram, compile_program
from timebound.verify.result import (
    Bounds,
    Counterexample,
    TraceState,
    Verdict,
    VerdictKind,
    ViolatedProperty,
)

try:
    from timebound.verify import _pathcore

    _HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on the build environment
    _pathcore = None
    _HAVE_COMPILED = False


class BoundExceededError(VerifyError):
    def __init__(self, resource: str, line: int | None = None):
        super().__init__(f"bound exceeded: {resource}")
        self.resource = resource
        self.line = line


def available_kernels() -> tuple[str, ...]:
    return ("compiled", "pure") if _HAVE_COMPILED else ("pure",)


def active_kernel() -> str:
    """Kernel used by default: compiled when built, unless TIMEBOUND_PURE=1."""
    if _HAVE_COMPILED and os.environ.get("TIMEBOUND_PURE", "0") in ("", "0"):
        return "compiled"
    return "pure"


def _make_runner(prog: CompiledProgram, bounds: Bounds, kernel: str | None):
    kernel = kernel or active_kernel()
    if kernel == "compiled":
        if not _HAVE_COMPILED:
            raise VerifyError("compiled kernel requested but not built")
        runner = _pathcore.Runner(
            prog.code,
            prog.insn_lines,
            prog.func_entry,
            prog.func_nargs,
            prog.func_nlocals,
            prog.global_init,
            prog.timer_slots,
            prog.timer_max,
            prog.total_locals,
        )

        def run(choices: list[int]) -> pathvm.RunResult:
            status, stop_pc, aux, out_choices, out_domains, finals, insns = runner.run(
                choices, bounds.unwind, bounds.nondet_width
            )
            return pathvm.RunResult(status, stop_pc, aux, out_choices, out_domains, finals, insns)

        return run
    if kernel != "pure":
        raise VerifyError(f"unknown kernel {kernel!r}")

    def run(choices: list[int]) -> pathvm.RunResult:
        return pathvm.run_path(prog, choices, bounds.unwind, bounds.nondet_width)

    return run


@dataclass
class _DriveOutcome:
    paths: int
    violation: pathvm.RunResult | None = None
    fault: pathvm.RunResult | None = None
    unwind_hit: pathvm.RunResult | None = None
    nondet_wide: pathvm.RunResult | None = None
    budget_exhausted: bool = False
    min_value: int | None = None
    complete_paths: int = 0


def _drive(
    prog: CompiledProgram,
    bounds: Bounds,
    kernel: str | None,
    minimize_slot: int = -1,
) -> _DriveOutcome:
    """Enumerate all paths; first violation wins unless minimizing."""
    run = _make_runner(prog, bounds, kernel)
    out = _DriveOutcome(paths=0)
    prefix: list[int] = []
    while True:
        if out.paths >= bounds.max_paths:
            out.budget_exhausted = True
            return out
        res = run(prefix)
        out.paths += 1
        st = res.status
        if st == ops.ST_VIOLATION:
            if minimize_slot < 0:
                out.violation = res
                return out
            # In minimization mode violating paths are excluded, not fatal.
        elif st == ops.ST_HALT:
            out.complete_paths += 1
            if minimize_slot >= 0:
                value = int(res.final_globals[minimize_slot])
                if out.min_value is None or value < out.min_value:
                    out.min_value = value
        elif st == ops.ST_ASSUME:
            pass
        elif st == ops.ST_UNWIND:
            if out.unwind_hit is None:
                out.unwind_hit = res
        elif st == ops.ST_NONDET_WIDE:
            out.nondet_wide = res
            return out
        else:
            out.fault = res
            return out
        # Lexicographic backtracking: bump the deepest incrementable choice.
        choices, domains = res.choices, res.domains
        i = len(choices) - 1
        while i >= 0 and choices[i] >= domains[i]:
            i -= 1
        if i < 0:
            return out
        prefix = list(choices[:i]) + [choices[i] + 1]


def explore(
    program: CompiledProgram | n.Ast,
    bounds: Bounds = Bounds(),
    kernel: str | None = None,
) -> Verdict:
    """Verdict for every execution within bounds; deterministic for a given input."""
    prog = program if isinstance(program, CompiledProgram) else compile_for_verification(program)
    started = time.perf_counter()
    out = _drive(prog, bounds, kernel)
    runtime_ms = (time.perf_counter() - started) * 1000.0

    if out.violation is not None:
        cex = build_counterexample(prog, list(out.violation.choices), bounds)
        return Verdict(
            kind=VerdictKind.FAILED,
            file=prog.path,
            paths_explored=out.paths,
            runtime_ms=runtime_ms,
            counterexample=cex,
        )
    if out.fault is not None:
        res = out.fault
        return Verdict(
            kind=VerdictKind.RUNTIME_FAULT,
            file=prog.path,
            paths_explored=out.paths,
            runtime_ms=runtime_ms,
            fault_message=ops.FAULT_MESSAGES.get(res.status, "runtime fault"),
            fault_line=prog.line_of(res.stop_pc),
            fault_function=function_at(prog, res.stop_pc),
        )
    if out.nondet_wide is not None:
        res = out.nondet_wide
        return Verdict(
            kind=VerdictKind.BOUND_EXCEEDED,
            file=prog.path,
            paths_explored=out.paths,
            runtime_ms=runtime_ms,
            bound_resource="nondet_width",
            bound_line=prog.line_of(res.stop_pc),
            fault_function=function_at(prog, res.stop_pc),
        )
    if out.budget_exhausted:
        return Verdict(
            kind=VerdictKind.BOUND_EXCEEDED,
            file=prog.path,
            paths_explored=out.paths,
            runtime_ms=runtime_ms,
            bound_resource="max_paths",
        )
    if out.unwind_hit is not None:
        res = out.unwind_hit
        return Verdict(
            kind=VerdictKind.BOUND_EXCEEDED,
            file=prog.path,
            paths_explored=out.paths,
            runtime_ms=runtime_ms,
            bound_resource="unwind",
            bound_line=prog.line_of(res.stop_pc),
            fault_function=function_at(prog, res.stop_pc),
        )
    return Verdict(
        kind=VerdictKind.SUCCESSFUL,
        file=prog.path,
        paths_explored=out.paths,
        runtime_ms=runtime_ms,
    )


def min_path_value(
    program: CompiledProgram | n.Ast,
    timer: str,
    bounds: Bounds = Bounds(),
    kernel: str | None = None,
) -> int:
    """Minimum final value of `timer` over all complete paths within bounds.

    Paths pruned by assume() or ending in a failed assertion do not count as
    complete. Raises BoundExceededError when any bound was hit (the true
    minimum might then live in the pruned region) and VerifyError on faults
    or when no path runs to completion.
    """
    prog = program if isinstance(program, CompiledProgram) else compile_for_verification(program)
    if timer not in prog.timer_names:
        raise VerifyError(f"unknown timer {timer!r}")
    slot = prog.timer_slot(timer)
    out = _drive(prog, bounds, kernel, minimize_slot=slot)
    if out.fault is not None:
        raise VerifyError(
            ops.FAULT_MESSAGES.get(out.fault.status, "runtime fault")
            + f" at line {prog.line_of(out.fault.stop_pc)}"
        )
    if out.budget_exhausted:
        raise BoundExceededError("max_paths")
    if out.nondet_wide is not None:
        raise BoundExceededError("nondet_width", prog.line_of(out.nondet_wide.stop_pc))
    if out.unwind_hit is not None:
        raise BoundExceededError("unwind", prog.line_of(out.unwind_hit.stop_pc))
    if out.min_value is None:
        raise VerifyError("no execution path runs to completion")
    return out.min_value


def function_at(prog: CompiledProgram, pc: int) -> str:
    entries = prog.func_entry
    if len(entries) == 0 or pc < int(entries[0]):
        return "<startup>"
    i = bisect_right([int(x) for x in entries], pc) - 1
    return prog.func_names[i]


# -- counterexample construction --


def replay(
    prog: CompiledProgram, choices: list[int], bounds: Bounds = Bounds()
) -> pathvm.RunResult:
    """Deterministically re-execute one path with the given choices, traced."""
    return pathvm.run_path(prog, choices, bounds.unwind, bounds.nondet_width, trace=True)


def fold_trace(prog: CompiledProgram, events: list[tuple]):
    """Fold raw kernel trace records into timed events and trace states.

    Consecutive timer increments right after a call are that call's
    instrumented prologue; they become a single Call event applied through
    the model, and the valuation is cross-checked against the kernel's timer
    values at every assertion.
    """
    width = 32 if prog.timer_max == (1 << 32) - 1 else 64
    valuation = TimerValuation.zeros(prog.timer_names, width)
    slot_to_name = {int(s): name for s, name in zip(prog.timer_slots, prog.timer_names)}
    timed_events: list = []
    states = [TraceState(0, 0, "<initial>", valuation.as_dict())]
    i = 0
    while i < len(events):
        ev = events[i]
        if ev[0] == "call":
            _, fidx, line = ev
            i += 1
            deltas = []
            while i < len(events) and events[i][0] == "tinc":
                deltas.append(events[i][2])
                i += 1
            if deltas and (len(deltas) != len(prog.timer_names) or len(set(deltas)) != 1):
                raise VerifyError("internal error: malformed timer prologue in trace")
            duration = deltas[0] if deltas else 0
            event = Call(prog.func_names[fidx], duration)
            valuation = apply_event(valuation, event)
            timed_events.append(event)
            states.append(
                TraceState(
                    len(states), line, f"call {event.function} [+{duration}]", valuation.as_dict()
                )
            )
        elif ev[0] == "reset":
            _, slot, line = ev
            event = Reset(slot_to_name[slot])
            valuation = apply_event(valuation, event)
            timed_events.append(event)
            states.append(TraceState(len(states), line, f"reset {event.timer}", valuation.as_dict()))
            i += 1
        elif ev[0] == "assert":
            _, aid, outcome, timers, line = ev
            site = prog.asserts[aid]
            event = AssertCheck(site.expr, outcome)
            valuation = apply_event(valuation, event)
            timed_events.append(event)
            if tuple(valuation.values) != tuple(timers):
                raise VerifyError("internal error: timer trace diverged from kernel state")
            word = "true" if outcome else "false"
            states.append(
                TraceState(
                    len(states), line, f"assert ({site.expr}) -> {word}", valuation.as_dict()
                )
            )
            i += 1
        elif ev[0] == "tinc":
            raise VerifyError("internal error: timer increment outside a call prologue")
        else:
            i += 1
    return timed_events, states


def build_counterexample(
    prog: CompiledProgram, choices: list[int], bounds: Bounds
) -> Counterexample:
    res = replay(prog, choices, bounds)
    if res.status != ops.ST_VIOLATION:
        raise VerifyError(
            "internal error: replaying the violating choices did not reproduce the violation"
        )
    _, states = fold_trace(prog, res.trace or [])
    site = prog.asserts[res.aux]
    violated = ViolatedProperty(prog.path, site.line, site.function, site.expr)
    return Counterexample(tuple(states), violated, tuple(res.choices))


# -- source-level drivers --


_DEFINE_ECHO = re.compile(r"^\s*DEFINE-TIMER\s+([A-Za-z_][A-Za-z0-9_]*)\s*;?\s*$", re.IGNORECASE)


def recover_timers(ast: n.Ast) -> tuple[str, ...]:
    """Timer names from `// DEFINE-TIMER x;` echoes in an instrumented unit."""
    scalars = {d.name for d in ast.globals if not d.is_array}
    timers: list[str] = []
    for item in ast.items:
        if isinstance(item, n.CommentStmt):
            m = _DEFINE_ECHO.match(item.text)
            if m and m.group(1) in scalars and m.group(1) not in timers:
                timers.append(m.group(1))
    return tuple(timers)


def compile_for_verification(
    source: n.Ast | AnnotatedProgram, timer_width: int = 64
) -> CompiledProgram:
    """Compile an AST or bound program, instrumenting it first if needed.

    Plain ASTs are assumed to be already instrumented (or untimed); their
    timer names are recovered from the annotation echo comments.
    """
    if isinstance(source, AnnotatedProgram):
        ast = instrument(source)
        return compile_program(ast, source.timers, timer_width)
    return compile_program(source, recover_timers(source), timer_width)


def verify_source(
    text: str,
    path: str = "<input>",
    defines: frozenset[str] | set[str] = frozenset(),
    bounds: Bounds = Bounds(),
    timer_width: int = 64,
    kernel: str | None = None,
) -> Verdict:
    """Full pipeline: preprocess, parse, bind+instrument if annotated, explore."""
    prog = prepare_source(text, path, defines, timer_width)
    return explore(prog, bounds, kernel)


def prepare_source(
    text: str,
    path: str = "<input>",
    defines: frozenset[str] | set[str] = frozenset(),
    timer_width: int = 64,
) -> CompiledProgram:
    processed = preprocess(text, defines, path)
    src = SourceUnit(path, processed)
    ast = parse(tokenize(src, keep_comments=True), path)
    has_annotations = any(isinstance(i, n.AnnotationStmt) for i in ast.items) or any(
        _has_stmt_annotations(f) for f in ast.functions
    )
    if has_annotations:
        return compile_for_verification(bind_annotations(ast), timer_width)
    return compile_for_verification(ast, timer_width)


def _has_stmt_annotations(func: n.FunctionDef) -> bool:
    def visit(stmt: n.Stmt) -> bool:
        if isinstance(stmt, n.AnnotationStmt):
            return True
        if isinstance(stmt, n.Block):
            return any(visit(s) for s in stmt.stmts)
        if isinstance(stmt, n.If):
            return visit(stmt.then) or (stmt.orelse is not None and visit(stmt.orelse))
        if isinstance(stmt, (n.While, n.For)):
            return visit(stmt.body)
        return False

    return visit(func.body)
