"""Pure-Python execution kernel: runs one path to completion.

Given a choice list, every `nondet_int` consumes the next provided value;
once the list is exhausted each further site takes its smallest value and
reports the domain it saw, which is exactly what the lexicographic
backtracking driver needs. Semantics are 64-bit signed integers with
C-style truncating division; overflow is a fault, never a wraparound.

The compiled kernel in `_pathcore` implements these semantics
instruction-for-instruction; this module is the always-available fallback
and the only kernel that can record the timed-event trace used to build
counterexamples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from timebound.verify import ops
from timebound.verify.program import CompiledProgram

_INT64_MIN = ops.INT64_MIN
_INT64_MAX = ops.INT64_MAX


@dataclass
class RunResult:
    status: int
    stop_pc: int
    aux: int                      # assert site / loop site, status-dependent
    choices: list[int]
    domains: list[int]            # per choice: the domain's upper bound
    final_globals: list[int]
    insns: int
    trace: list[tuple] | None = None
    pause_lo: int = 0             # pending nondet domain when ST_NEED_CHOICE
    pause_hi: int = 0
    vm_state: dict | None = None  # snapshot when paused


@dataclass
class _Cache:
    code: list[int]
    lines: list[int]
    func_entry: list[int]
    func_nargs: list[int]
    func_nlocals: list[int]
    global_init: list[int]
    timer_list: list[int]  # timer slots in definition order
    n_funcs: int


def _cache(prog: CompiledProgram) -> _Cache:
    if prog._pure_cache is None:
        prog._pure_cache = _Cache(
            code=[int(x) for x in prog.code],
            lines=[int(x) for x in prog.insn_lines],
            func_entry=[int(x) for x in prog.func_entry],
            func_nargs=[int(x) for x in prog.func_nargs],
            func_nlocals=[int(x) for x in prog.func_nlocals],
            global_init=[int(x) for x in prog.global_init],
            timer_list=[int(x) for x in prog.timer_slots],
            n_funcs=len(prog.func_names),
        )
    return prog._pure_cache


def run_path(
    prog: CompiledProgram,
    choices_in: list[int],
    unwind: int,
    nondet_width: int,
    trace: bool = False,
    max_choices: int = ops.MAX_CHOICES,
    stmt_limit: int = -1,
    pause_nondet: bool = False,
) -> RunResult:
    """Execute one path; see module docstring for the choice protocol.

    With `stmt_limit >= 0` the run pauses (ST_PAUSED) before executing
    statement number `stmt_limit + 1`; with `pause_nondet` it pauses
    (ST_NEED_CHOICE) at the first nondet site beyond the supplied choices.
    Both pause modes capture a restorable snapshot in `vm_state`. Only this
    kernel supports pausing; the compiled kernel runs paths to completion.
    """
    c = _cache(prog)
    code = c.code
    lines = c.lines
    timer_list = c.timer_list
    timer_max = prog.timer_max

    g = list(c.global_init)
    locals_stack = [0] * (prog.total_locals + 1)
    max_frames = c.n_funcs + 2
    frame_ret = [0] * max_frames
    frame_base = [0] * max_frames
    frame_func = [0] * max_frames
    fp = 0
    lb = 0  # locals top

    stack = [0] * ops.VALUE_STACK_SIZE
    sp = 0

    choices: list[int] = []
    domains: list[int] = []
    ci = 0
    n_in = len(choices_in)

    events: list[tuple] | None = [] if trace else None

    pc = 0
    insns = 0
    stmts = 0

    def done(status: int, stop_pc: int, aux: int = -1, lo: int = 0, hi: int = 0) -> RunResult:
        result = RunResult(status, stop_pc, aux, choices, domains, g, insns, events, lo, hi)
        if status in (ops.ST_PAUSED, ops.ST_NEED_CHOICE):
            result.vm_state = {
                "pc": stop_pc,
                "stmts": stmts,
                "globals": list(g),
                "locals": list(locals_stack),
                "frames": [(frame_func[i], frame_base[i]) for i in range(fp)],
            }
        return result

    while True:
        base = 3 * pc
        op = code[base]
        a = code[base + 1]
        b = code[base + 2]
        insns += 1

        if op == ops.PUSH:
            stack[sp] = a
            sp += 1
            if sp >= ops.VALUE_STACK_SIZE:
                return done(ops.ST_LIMIT, pc)
        elif op == ops.LOADG:
            stack[sp] = g[a]
            sp += 1
            if sp >= ops.VALUE_STACK_SIZE:
                return done(ops.ST_LIMIT, pc)
        elif op == ops.STOREG:
            sp -= 1
            g[a] = stack[sp]
        elif op == ops.LOADL:
            fb = frame_base[fp - 1]
            stack[sp] = locals_stack[fb + a]
            sp += 1
            if sp >= ops.VALUE_STACK_SIZE:
                return done(ops.ST_LIMIT, pc)
        elif op == ops.STOREL:
            fb = frame_base[fp - 1]
            sp -= 1
            locals_stack[fb + a] = stack[sp]
        elif op == ops.ADD:
            sp -= 1
            v = stack[sp - 1] + stack[sp]
            if v < _INT64_MIN or v > _INT64_MAX:
                return done(ops.ST_FAULT_OVERFLOW, pc)
            stack[sp - 1] = v
        elif op == ops.SUB:
            sp -= 1
            v = stack[sp - 1] - stack[sp]
            if v < _INT64_MIN or v > _INT64_MAX:
                return done(ops.ST_FAULT_OVERFLOW, pc)
            stack[sp - 1] = v
        elif op == ops.MUL:
            sp -= 1
            v = stack[sp - 1] * stack[sp]
            if v < _INT64_MIN or v > _INT64_MAX:
                return done(ops.ST_FAULT_OVERFLOW, pc)
            stack[sp - 1] = v
        elif op == ops.DIV or op == ops.MOD:
            sp -= 1
            d = stack[sp]
            x = stack[sp - 1]
            if d == 0:
                return done(ops.ST_FAULT_DIV0, pc)
            if x == _INT64_MIN and d == -1:
                return done(ops.ST_FAULT_OVERFLOW, pc)
            q = -(-x // d) if (x < 0) != (d < 0) else x // d
            stack[sp - 1] = q if op == ops.DIV else x - q * d
        elif op == ops.NEG:
            v = -stack[sp - 1]
            if v > _INT64_MAX:
                return done(ops.ST_FAULT_OVERFLOW, pc)
            stack[sp - 1] = v
        elif op == ops.NOT:
            stack[sp - 1] = 1 if stack[sp - 1] == 0 else 0
        elif op == ops.LT:
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] < stack[sp] else 0
        elif op == ops.LE:
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] <= stack[sp] else 0
        elif op == ops.GT:
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] > stack[sp] else 0
        elif op == ops.GE:
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] >= stack[sp] else 0
        elif op == ops.EQ:
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] == stack[sp] else 0
        elif op == ops.NE:
            sp -= 1
            stack[sp - 1] = 1 if stack[sp - 1] != stack[sp] else 0
        elif op == ops.JMP:
            pc = a
            continue
        elif op == ops.JZ:
            sp -= 1
            if stack[sp] == 0:
                pc = a
                continue
        elif op == ops.JNZ:
            sp -= 1
            if stack[sp] != 0:
                pc = a
                continue
        elif op == ops.CALL:
            if fp >= len(frame_ret):
                return done(ops.ST_LIMIT, pc)
            nlocals = c.func_nlocals[a]
            newbase = lb
            locals_stack[newbase:newbase + nlocals] = [0] * nlocals
            nargs = b
            for i in range(nargs):
                locals_stack[newbase + i] = stack[sp - nargs + i]
            sp -= nargs
            frame_ret[fp] = pc + 1
            frame_base[fp] = newbase
            frame_func[fp] = a
            fp += 1
            lb = newbase + nlocals
            if events is not None:
                events.append(("call", a, lines[pc]))
            pc = c.func_entry[a]
            continue
        elif op == ops.RET or op == ops.RETV:
            fp -= 1
            lb = frame_base[fp]
            pc = frame_ret[fp]
            # RETV keeps its value on the stack; RET leaves nothing.
            continue
        elif op == ops.NONDET:
            sp -= 2
            lo = stack[sp]
            hi = stack[sp + 1]
            if hi < lo:
                return done(ops.ST_FAULT_DOMAIN, pc)
            if hi - lo + 1 > nondet_width:
                return done(ops.ST_NONDET_WIDE, pc)
            if len(choices) >= max_choices:
                return done(ops.ST_LIMIT, pc)
            if ci < n_in:
                v = choices_in[ci]
                if v < lo or v > hi:
                    return done(ops.ST_FAULT_CHOICE, pc)
            else:
                if pause_nondet:
                    return done(ops.ST_NEED_CHOICE, pc, lo=lo, hi=hi)
                v = lo
            ci += 1
            choices.append(v)
            domains.append(hi)
            stack[sp] = v
            sp += 1
        elif op == ops.ASSERT:
            sp -= 1
            outcome = stack[sp] != 0
            if events is not None:
                timers = tuple(g[t] for t in timer_list)
                events.append(("assert", a, outcome, timers, lines[pc]))
            if not outcome:
                return done(ops.ST_VIOLATION, pc, a)
        elif op == ops.ASSUME:
            sp -= 1
            if stack[sp] == 0:
                return done(ops.ST_ASSUME, pc)
        elif op == ops.TINC:
            sp -= 1
            v = g[a] + stack[sp]
            if v > timer_max or v < 0:
                return done(ops.ST_FAULT_TIMER, pc)
            g[a] = v
            if events is not None:
                events.append(("tinc", a, stack[sp], lines[pc]))
        elif op == ops.TRESET:
            g[a] = 0
            if events is not None:
                events.append(("reset", a, lines[pc]))
        elif op == ops.UNWIND:
            fb = frame_base[fp - 1]
            locals_stack[fb + a] += 1
            if locals_stack[fb + a] > unwind:
                return done(ops.ST_UNWIND, pc, b)
        elif op == ops.LOADGA:
            idx = stack[sp - 1]
            if idx < 0 or idx >= b:
                return done(ops.ST_FAULT_OOB, pc)
            stack[sp - 1] = g[a + idx]
        elif op == ops.STOREGA:
            sp -= 2
            idx = stack[sp]
            if idx < 0 or idx >= b:
                return done(ops.ST_FAULT_OOB, pc)
            g[a + idx] = stack[sp + 1]
        elif op == ops.LOADLA:
            fb = frame_base[fp - 1]
            idx = stack[sp - 1]
            if idx < 0 or idx >= b:
                return done(ops.ST_FAULT_OOB, pc)
            stack[sp - 1] = locals_stack[fb + a + idx]
        elif op == ops.STORELA:
            fb = frame_base[fp - 1]
            sp -= 2
            idx = stack[sp]
            if idx < 0 or idx >= b:
                return done(ops.ST_FAULT_OOB, pc)
            locals_stack[fb + a + idx] = stack[sp + 1]
        elif op == ops.LOADPA:
            fb = frame_base[fp - 1]
            handle = locals_stack[fb + a]
            abase = handle >> 32
            asize = handle & 0xFFFFFFFF
            idx = stack[sp - 1]
            if idx < 0 or idx >= asize:
                return done(ops.ST_FAULT_OOB, pc)
            stack[sp - 1] = g[abase + idx]
        elif op == ops.STOREPA:
            fb = frame_base[fp - 1]
            handle = locals_stack[fb + a]
            abase = handle >> 32
            asize = handle & 0xFFFFFFFF
            sp -= 2
            idx = stack[sp]
            if idx < 0 or idx >= asize:
                return done(ops.ST_FAULT_OOB, pc)
            g[abase + idx] = stack[sp + 1]
        elif op == ops.MKARG:
            stack[sp] = (a << 32) | b
            sp += 1
            if sp >= ops.VALUE_STACK_SIZE:
                return done(ops.ST_LIMIT, pc)
        elif op == ops.STMT:
            if stmts == stmt_limit:
                return done(ops.ST_PAUSED, pc)
            stmts += 1
        elif op == ops.POP:
            sp -= 1
        elif op == ops.HALT:
            return done(ops.ST_HALT, pc)
        else:
            raise AssertionError(f"unknown opcode {op}")
        pc += 1
