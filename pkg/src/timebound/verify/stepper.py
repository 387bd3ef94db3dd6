"""Statement-level single stepping over a compiled program.

Stepping re-executes the committed choice prefix on the pure kernel and
pauses one statement further each time; that keeps states cheap, immutable
values. A deterministic statement yields exactly one successor; reaching a
fresh `nondet_int` yields one successor per value in its domain (each with
the statement completed under that choice); terminal states yield none.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from timebound.diagnostics import VerifyError
from timebound.model import ExecutionPath
from timebound.verify import ops, pathvm
from timebound.verify.engine import fold_trace, function_at
from timebound.verify.program import CompiledProgram
from timebound.verify.result import Bounds


@dataclass(frozen=True)
class InterpreterState:
    """A paused (or terminal) execution: program counter, stores, and path."""

    program: CompiledProgram = field(repr=False)
    bounds: Bounds
    choices: tuple[int, ...]
    stmts_done: int
    line: int
    function: str
    vars: dict[str, object]          # globals plus current frame's locals
    call_stack: tuple[str, ...]
    path: ExecutionPath
    status: int                      # ops.ST_PAUSED while runnable

    @property
    def terminal(self) -> bool:
        return self.status != ops.ST_PAUSED

    @property
    def timers(self) -> dict[str, int]:
        return {t: self.vars[t] for t in self.program.timer_names if t in self.vars}


def initial_state(prog: CompiledProgram, bounds: Bounds = Bounds()) -> InterpreterState:
    return _materialize(prog, bounds, (), 0)


def step(state: InterpreterState) -> list[InterpreterState]:
    """Successor states after executing one more statement."""
    if state.terminal:
        return []
    return _advance(state.program, state.bounds, list(state.choices), state.stmts_done + 1)


def _advance(
    prog: CompiledProgram, bounds: Bounds, choices: list[int], target: int
) -> list[InterpreterState]:
    res = _run(prog, bounds, choices, target)
    if res.status == ops.ST_NEED_CHOICE:
        successors: list[InterpreterState] = []
        for value in range(res.pause_lo, res.pause_hi + 1):
            successors.extend(_advance(prog, bounds, choices + [value], target))
        return successors
    return [_materialize(prog, bounds, tuple(choices), target, res)]


def _run(prog: CompiledProgram, bounds: Bounds, choices: list[int], target: int):
    return pathvm.run_path(
        prog,
        choices,
        bounds.unwind,
        bounds.nondet_width,
        trace=True,
        stmt_limit=target,
        pause_nondet=True,
    )


def _materialize(
    prog: CompiledProgram,
    bounds: Bounds,
    choices: tuple[int, ...],
    stmts: int,
    res=None,
) -> InterpreterState:
    if res is None:
        res = _run(prog, bounds, list(choices), stmts)
        if res.status == ops.ST_NEED_CHOICE:
            raise VerifyError("internal error: committed choices did not cover the prefix")
    events, _ = fold_trace(prog, res.trace or [])
    path = ExecutionPath(tuple(events))
    if res.status == ops.ST_PAUSED and res.vm_state is not None:
        vm = res.vm_state
        g = vm["globals"]
        vars: dict[str, object] = {}
        for name, (base, size) in prog.global_layout.items():
            vars[name] = g[base] if size is None else list(g[base:base + size])
        frames = vm["frames"]
        call_stack = tuple(prog.func_names[f] for f, _ in frames)
        if frames:
            fidx, fb = frames[-1]
            layout = prog.local_layouts[fidx]
            loc = vm["locals"]
            for name, (kind, base, size) in layout.items():
                if kind in ("lscalar", "aparam"):
                    vars[name] = loc[fb + base]
                elif kind == "larray":
                    vars[name] = list(loc[fb + base:fb + base + size])
        pc = vm["pc"]
        return InterpreterState(
            prog, bounds, choices, stmts, prog.line_of(pc), function_at(prog, pc),
            vars, call_stack, path, ops.ST_PAUSED,
        )
    g = list(res.final_globals)
    vars = {}
    for name, (base, size) in prog.global_layout.items():
        vars[name] = g[base] if size is None else list(g[base:base + size])
    return InterpreterState(
        prog, bounds, choices, stmts, prog.line_of(res.stop_pc),
        function_at(prog, res.stop_pc), vars, (), path, res.status,
    )
