"""Lowering from the instrumented AST to the flat bytecode the kernels run.

The verified object is the instrumented tree (what the emitter writes), so
timer manipulation arrives here as ordinary statements. The compiler gives
it dedicated opcodes anyway: the leading `timer += d;` run of a function
body becomes width-checked TINC instructions and records the function's
duration, and `timer = 0;` becomes TRESET. That keeps every timer write
recognizable, which the counterexample builder relies on to reconstruct the
path's timed events. Any other write to a timer is rejected.

Every loop gets a hidden iteration counter (reset at loop entry, bumped by
UNWIND on every iteration) so exceeding the unwind bound is detected at
runtime instead of being silently truncated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from timebound.diagnostics import CompileError, Loc
from timebound.frontend import nodes as n
from timebound.frontend.binder import fold_const
from timebound.model import timer_limit
from timebound.verify import ops


@dataclass(frozen=True)
class AssertSite:
    line: int
    function: str
    expr: str


@dataclass(frozen=True)
class LoopSite:
    line: int
    function: str


@dataclass(frozen=True)
class NondetSite:
    line: int
    function: str


@dataclass
class CompiledProgram:
    path: str
    code: np.ndarray            # int64, shape (3 * n_insns,)
    insn_lines: np.ndarray      # int64, shape (n_insns,)
    func_names: list[str]
    func_entry: np.ndarray      # int64 per function
    func_nargs: np.ndarray
    func_nlocals: np.ndarray
    n_globals: int
    global_init: np.ndarray     # int64 initial values
    timer_slots: np.ndarray     # int64 global slots, timer-definition order
    timer_names: list[str]
    timer_max: int
    asserts: list[AssertSite]
    loops: list[LoopSite]
    nondets: list[NondetSite]
    durations: dict[str, int]   # per defined function, from the prologues
    global_layout: dict[str, tuple[int, int | None]]   # name -> (base, size)
    local_layouts: list[dict[str, tuple[str, int, int]]]  # per function
    total_locals: int = 0
    _pure_cache: object = field(default=None, repr=False, compare=False)

    @property
    def n_insns(self) -> int:
        return len(self.insn_lines)

    def line_of(self, pc: int) -> int:
        if 0 <= pc < self.n_insns:
            return int(self.insn_lines[pc])
        return 0

    def timer_slot(self, name: str) -> int:
        return int(self.timer_slots[self.timer_names.index(name)])


def compile_program(
    ast: n.Ast,
    timers: tuple[str, ...] = (),
    timer_width: int = 64,
    path: str | None = None,
) -> CompiledProgram:
    """Lower a closed, instrumented AST for execution."""
    return _Compiler(ast, tuple(timers), timer_width, path or ast.path).run()


@dataclass
class _Var:
    kind: str  # gscalar, garray, lscalar, larray, aparam
    base: int
    size: int = 0


class _Compiler:
    def __init__(self, ast: n.Ast, timers: tuple[str, ...], timer_width: int, path: str):
        self.ast = ast
        self.timers = timers
        self.timer_width = timer_width
        self.path = path
        self.code: list[tuple[int, int, int]] = []
        self.lines: list[int] = []
        self.globals: dict[str, _Var] = {}
        self.global_init: list[int] = []
        self.funcs: dict[str, int] = {}
        self.func_defs: list[n.FunctionDef] = []
        self.extern_names: set[str] = set()
        self.asserts: list[AssertSite] = []
        self.loops: list[LoopSite] = []
        self.nondets: list[NondetSite] = []
        self.durations: dict[str, int] = {}
        self.local_layouts: list[dict[str, tuple[str, int, int]]] = []
        # per-function compile state
        self.locals: dict[str, _Var] = {}
        self.nlocals = 0
        self.current: n.FunctionDef | None = None
        self.scratch_slot = -1

    # -- emission helpers --

    def emit(self, op: int, a: int = 0, b: int = 0, loc: Loc | None = None) -> int:
        self.code.append((op, a, b))
        self.lines.append(loc.line if loc is not None else 0)
        return len(self.code) - 1

    def patch(self, at: int, target: int) -> None:
        op, _, b = self.code[at]
        self.code[at] = (op, target, b)

    def here(self) -> int:
        return len(self.code)

    def fail(self, message: str, loc: Loc | None) -> CompileError:
        return CompileError(message, loc, self.path)

    # -- driver --

    def run(self) -> CompiledProgram:
        for item in self.ast.items:
            if isinstance(item, n.VarDecl):
                self.declare_global(item)
            elif isinstance(item, n.FunctionDef):
                if item.is_extern:
                    self.extern_names.add(item.name)
                else:
                    if item.name in self.funcs:
                        raise self.fail(f"duplicate function {item.name!r}", item.loc)
                    self.funcs[item.name] = len(self.func_defs)
                    self.func_defs.append(item)
            elif isinstance(item, n.AnnotationStmt):
                raise self.fail(
                    "unbound annotation in program to verify; run the instrumenter first",
                    item.loc,
                )
        main = self.ast.main
        if main is None:
            raise self.fail("program has no main function", None)
        if main.params:
            raise self.fail("main must take no parameters", main.loc)

        timer_slots = []
        for t in self.timers:
            var = self.globals.get(t)
            if var is None or var.kind != "gscalar":
                raise self.fail(f"timer {t!r} is not declared as a global scalar", None)
            timer_slots.append(var.base)
        self.timer_slot_of = {t: s for t, s in zip(self.timers, timer_slots)}

        entry = [(ops.CALL, self.funcs[main.name], 0), (ops.HALT, 0, 0)]
        for op, a, b in entry:
            self.emit(op, a, b, main.loc)

        func_entry = []
        func_nargs = []
        func_nlocals = []
        for func in self.func_defs:
            func_entry.append(self.here())
            nargs, nlocals = self.compile_function(func)
            func_nargs.append(nargs)
            func_nlocals.append(nlocals)

        return CompiledProgram(
            path=self.path,
            code=np.asarray([x for insn in self.code for x in insn], dtype=np.int64),
            insn_lines=np.asarray(self.lines, dtype=np.int64),
            func_names=[f.name for f in self.func_defs],
            func_entry=np.asarray(func_entry, dtype=np.int64),
            func_nargs=np.asarray(func_nargs, dtype=np.int64),
            func_nlocals=np.asarray(func_nlocals, dtype=np.int64),
            n_globals=len(self.global_init),
            global_init=np.asarray(self.global_init, dtype=np.int64),
            timer_slots=np.asarray(timer_slots, dtype=np.int64),
            timer_names=list(self.timers),
            timer_max=timer_limit(self.timer_width),
            asserts=self.asserts,
            loops=self.loops,
            nondets=self.nondets,
            durations=self.durations,
            global_layout={name: (v.base, v.size if v.kind == "garray" else None) for name, v in self.globals.items()},
            local_layouts=self.local_layouts,
            total_locals=int(sum(func_nlocals)) or 1,
        )

    def declare_global(self, decl: n.VarDecl) -> None:
        if decl.name in self.globals:
            raise self.fail(f"duplicate global {decl.name!r}", decl.loc)
        base = len(self.global_init)
        if decl.is_array:
            self.globals[decl.name] = _Var("garray", base, decl.size)
            self.global_init.extend([0] * decl.size)
        else:
            value = 0
            if decl.init is not None:
                folded = fold_const(decl.init)
                if folded is None:
                    raise self.fail(
                        f"global {decl.name!r} must have a constant initializer", decl.loc
                    )
                value = folded
            self.globals[decl.name] = _Var("gscalar", base, 0)
            self.global_init.append(value)

    # -- function compilation --

    def compile_function(self, func: n.FunctionDef) -> tuple[int, int]:
        self.current = func
        self.locals = {}
        self.nlocals = 0
        self.scratch_slot = -1
        for p in func.params:
            if p.name in self.locals:
                raise self.fail(f"duplicate parameter {p.name!r}", func.loc)
            if p.is_array:
                self.locals[p.name] = _Var("aparam", self.alloc_local(), p.size or 0)
            else:
                self.locals[p.name] = _Var("lscalar", self.alloc_local(), 0)

        stmts = list(func.body.stmts)
        idx = self.compile_prologue(func, stmts)
        for stmt in stmts[idx:]:
            self.compile_stmt(stmt)
        if func.ret_type == "void":
            self.emit(ops.RET, loc=func.loc)
        else:
            self.emit(ops.PUSH, 0, loc=func.loc)
            self.emit(ops.RETV, loc=func.loc)

        layout = {}
        for name, var in self.locals.items():
            layout[name] = (var.kind, var.base, var.size)
        self.local_layouts.append(layout)
        return len(func.params), self.nlocals

    def compile_prologue(self, func: n.FunctionDef, stmts: list[n.Stmt]) -> int:
        """Compile the leading `timer += d;` run; returns the resume index."""
        increments: list[tuple[n.Assign, int]] = []
        idx = 0
        consts = self._consts()
        while idx < len(stmts):
            stmt = stmts[idx]
            if isinstance(stmt, n.CommentStmt):
                idx += 1
                continue
            if (
                isinstance(stmt, n.Assign)
                and stmt.op == "+="
                and isinstance(stmt.target, n.Name)
                and stmt.target.name in self.timer_slot_of
            ):
                value = fold_const(stmt.value, consts)
                if value is None or value < 0:
                    raise self.fail(
                        "timer increments must be nonnegative compile-time constants",
                        stmt.loc,
                    )
                increments.append((stmt, value))
                idx += 1
                continue
            break
        if not increments:
            self.durations[func.name] = 0
            return 0
        names = [inc.target.name for inc, _ in increments]
        values = [v for _, v in increments]
        if names != list(self.timers) or len(set(values)) != 1:
            raise self.fail(
                "timer increments must cover every timer once, in definition order, "
                "with one shared duration",
                increments[0][0].loc,
            )
        self.durations[func.name] = values[0]
        for inc, _ in increments:
            self.compile_value(inc.value)
            self.emit(ops.TINC, self.timer_slot_of[inc.target.name], loc=inc.loc)
        return idx

    def _consts(self) -> dict[str, int]:
        # Globals with constant initializers; mutation tracking already ran
        # during binding, and the compiler only folds timer increments, whose
        # operands the instrumenter restricted to constants.
        return {
            name: self.global_init[var.base]
            for name, var in self.globals.items()
            if var.kind == "gscalar" and name not in self.timer_slot_of
        }

    def alloc_local(self) -> int:
        slot = self.nlocals
        self.nlocals += 1
        return slot

    def scratch(self) -> int:
        if self.scratch_slot < 0:
            self.scratch_slot = self.alloc_local()
        return self.scratch_slot

    def lookup(self, name: str, loc: Loc) -> _Var:
        var = self.locals.get(name)
        if var is None:
            var = self.globals.get(name)
        if var is None:
            raise self.fail(f"undeclared identifier {name!r}", loc)
        return var

    # -- statements --

    def compile_stmt(self, stmt: n.Stmt) -> None:
        if isinstance(stmt, n.CommentStmt):
            return
        if not isinstance(stmt, n.Block):
            self.emit(ops.STMT, loc=getattr(stmt, "loc", None))
        if isinstance(stmt, n.VarDecl):
            self.compile_local_decl(stmt)
        elif isinstance(stmt, n.Assign):
            self.compile_assign(stmt)
        elif isinstance(stmt, n.Block):
            for s in stmt.stmts:
                self.compile_stmt(s)
        elif isinstance(stmt, n.If):
            self.compile_if(stmt)
        elif isinstance(stmt, n.While):
            self.compile_while(stmt)
        elif isinstance(stmt, n.For):
            self.compile_for(stmt)
        elif isinstance(stmt, n.ExprStmt):
            pushed = self.compile_call(stmt.expr, want_value=False)
            if pushed:
                self.emit(ops.POP, loc=stmt.loc)
        elif isinstance(stmt, n.Return):
            self.compile_return(stmt)
        elif isinstance(stmt, n.AssertStmt):
            self.compile_value(stmt.cond)
            site = len(self.asserts)
            from timebound.emit import emit_expr

            self.asserts.append(AssertSite(stmt.loc.line, self.current.name, emit_expr(stmt.cond)))
            self.emit(ops.ASSERT, site, loc=stmt.loc)
        elif isinstance(stmt, n.AssumeStmt):
            self.compile_value(stmt.cond)
            self.emit(ops.ASSUME, loc=stmt.loc)
        elif isinstance(stmt, n.AnnotationStmt):
            raise self.fail("unbound annotation in program to verify", stmt.loc)
        else:
            raise self.fail(f"unsupported statement {type(stmt).__name__}", getattr(stmt, "loc", None))

    def compile_local_decl(self, decl: n.VarDecl) -> None:
        if decl.name in self.locals:
            raise self.fail(
                f"redeclaration of {decl.name!r} (one declaration per name and function)",
                decl.loc,
            )
        if decl.is_array:
            base = self.nlocals
            self.nlocals += decl.size
            self.locals[decl.name] = _Var("larray", base, decl.size)
        else:
            slot = self.alloc_local()
            self.locals[decl.name] = _Var("lscalar", slot, 0)
            if decl.init is not None:
                self.compile_value(decl.init)
                self.emit(ops.STOREL, slot, loc=decl.loc)

    def compile_assign(self, stmt: n.Assign) -> None:
        if isinstance(stmt.target, n.Name):
            name = stmt.target.name
            if name in getattr(self, "timer_slot_of", {}):
                self.compile_timer_write(stmt)
                return
            var = self.lookup(name, stmt.loc)
            if var.kind not in ("gscalar", "lscalar"):
                raise self.fail(f"cannot assign to array {name!r}", stmt.loc)
            store = ops.STOREG if var.kind == "gscalar" else ops.STOREL
            if stmt.op == "=":
                self.compile_value(stmt.value)
            else:
                load = ops.LOADG if var.kind == "gscalar" else ops.LOADL
                self.emit(load, var.base, loc=stmt.loc)
                self.compile_value(stmt.value)
                self.emit(ops.ADD if stmt.op == "+=" else ops.SUB, loc=stmt.loc)
            self.emit(store, var.base, loc=stmt.loc)
            return
        # array element target
        target = stmt.target
        var = self.lookup(target.array, stmt.loc)
        if var.kind not in ("garray", "larray", "aparam"):
            raise self.fail(f"{target.array!r} is not an array", stmt.loc)
        if stmt.op == "=":
            self.compile_value(target.index)
            self.compile_value(stmt.value)
            self.emit_store_elem(var, stmt.loc)
        else:
            tmp = self.scratch()
            self.compile_value(target.index)
            self.emit(ops.STOREL, tmp, loc=stmt.loc)
            self.emit(ops.LOADL, tmp, loc=stmt.loc)
            self.emit(ops.LOADL, tmp, loc=stmt.loc)
            self.emit_load_elem(var, stmt.loc)
            self.compile_value(stmt.value)
            self.emit(ops.ADD if stmt.op == "+=" else ops.SUB, loc=stmt.loc)
            self.emit_store_elem(var, stmt.loc)

    def compile_timer_write(self, stmt: n.Assign) -> None:
        name = stmt.target.name
        if stmt.op == "=" and isinstance(stmt.value, n.IntLit) and stmt.value.value == 0:
            self.emit(ops.TRESET, self.timer_slot_of[name], loc=stmt.loc)
            return
        raise self.fail(
            f"timer {name!r} may only be reset to zero here; increments belong to "
            "the instrumented function prologue",
            stmt.loc,
        )

    def emit_load_elem(self, var: _Var, loc: Loc) -> None:
        if var.kind == "garray":
            self.emit(ops.LOADGA, var.base, var.size, loc=loc)
        elif var.kind == "larray":
            self.emit(ops.LOADLA, var.base, var.size, loc=loc)
        else:
            self.emit(ops.LOADPA, var.base, loc=loc)

    def emit_store_elem(self, var: _Var, loc: Loc) -> None:
        if var.kind == "garray":
            self.emit(ops.STOREGA, var.base, var.size, loc=loc)
        elif var.kind == "larray":
            self.emit(ops.STORELA, var.base, var.size, loc=loc)
        else:
            self.emit(ops.STOREPA, var.base, loc=loc)

    def compile_if(self, stmt: n.If) -> None:
        self.compile_value(stmt.cond)
        jz = self.emit(ops.JZ, 0, loc=stmt.loc)
        self.compile_stmt(stmt.then)
        if stmt.orelse is None:
            self.patch(jz, self.here())
        else:
            jmp = self.emit(ops.JMP, 0, loc=stmt.loc)
            self.patch(jz, self.here())
            self.compile_stmt(stmt.orelse)
            self.patch(jmp, self.here())

    def new_loop(self, loc: Loc) -> tuple[int, int]:
        counter = self.alloc_local()
        site = len(self.loops)
        self.loops.append(LoopSite(loc.line, self.current.name))
        self.emit(ops.PUSH, 0, loc=loc)
        self.emit(ops.STOREL, counter, loc=loc)
        return counter, site

    def compile_while(self, stmt: n.While) -> None:
        counter, site = self.new_loop(stmt.loc)
        head = self.here()
        self.compile_value(stmt.cond)
        jz = self.emit(ops.JZ, 0, loc=stmt.loc)
        self.emit(ops.UNWIND, counter, site, loc=stmt.loc)
        self.compile_stmt(stmt.body)
        self.emit(ops.JMP, head, loc=stmt.loc)
        self.patch(jz, self.here())

    def compile_for(self, stmt: n.For) -> None:
        if stmt.init is not None:
            self.compile_stmt(stmt.init)
        counter, site = self.new_loop(stmt.loc)
        head = self.here()
        jz = -1
        if stmt.cond is not None:
            self.compile_value(stmt.cond)
            jz = self.emit(ops.JZ, 0, loc=stmt.loc)
        self.emit(ops.UNWIND, counter, site, loc=stmt.loc)
        self.compile_stmt(stmt.body)
        if stmt.step is not None:
            self.compile_stmt(stmt.step)
        self.emit(ops.JMP, head, loc=stmt.loc)
        if jz >= 0:
            self.patch(jz, self.here())

    def compile_return(self, stmt: n.Return) -> None:
        assert self.current is not None
        if self.current.ret_type == "void":
            if stmt.value is not None:
                raise self.fail("void function cannot return a value", stmt.loc)
            self.emit(ops.RET, loc=stmt.loc)
        else:
            if stmt.value is None:
                raise self.fail("non-void function must return a value", stmt.loc)
            self.compile_value(stmt.value)
            self.emit(ops.RETV, loc=stmt.loc)

    # -- expressions --

    def compile_value(self, expr: n.Expr) -> None:
        if isinstance(expr, n.IntLit):
            if not (ops.INT64_MIN <= expr.value <= ops.INT64_MAX):
                raise self.fail("integer literal outside 64-bit range", expr.loc)
            self.emit(ops.PUSH, expr.value, loc=expr.loc)
        elif isinstance(expr, n.Name):
            var = self.lookup(expr.name, expr.loc)
            if var.kind == "gscalar":
                self.emit(ops.LOADG, var.base, loc=expr.loc)
            elif var.kind == "lscalar":
                self.emit(ops.LOADL, var.base, loc=expr.loc)
            elif var.kind == "aparam":
                self.emit(ops.LOADL, var.base, loc=expr.loc)
            else:
                raise self.fail(f"array {expr.name!r} used where a value is required", expr.loc)
        elif isinstance(expr, n.Index):
            var = self.lookup(expr.array, expr.loc)
            if var.kind not in ("garray", "larray", "aparam"):
                raise self.fail(f"{expr.array!r} is not an array", expr.loc)
            self.compile_value(expr.index)
            self.emit_load_elem(var, expr.loc)
        elif isinstance(expr, n.Unary):
            self.compile_value(expr.operand)
            self.emit(ops.NEG if expr.op == "-" else ops.NOT, loc=expr.loc)
        elif isinstance(expr, n.Binary):
            self.compile_binary(expr)
        elif isinstance(expr, n.CallExpr):
            pushed = self.compile_call(expr, want_value=True)
            assert pushed
        elif isinstance(expr, n.StrLit):
            raise self.fail("string literals may only be passed to extern functions", expr.loc)
        else:
            raise self.fail(f"unsupported expression {type(expr).__name__}", expr.loc)

    _BINOPS = {
        "+": ops.ADD, "-": ops.SUB, "*": ops.MUL, "/": ops.DIV, "%": ops.MOD,
        "<": ops.LT, "<=": ops.LE, ">": ops.GT, ">=": ops.GE, "==": ops.EQ, "!=": ops.NE,
    }

    def compile_binary(self, expr: n.Binary) -> None:
        if expr.op == "&&":
            self.compile_value(expr.left)
            jz1 = self.emit(ops.JZ, 0, loc=expr.loc)
            self.compile_value(expr.right)
            jz2 = self.emit(ops.JZ, 0, loc=expr.loc)
            self.emit(ops.PUSH, 1, loc=expr.loc)
            jend = self.emit(ops.JMP, 0, loc=expr.loc)
            self.patch(jz1, self.here())
            self.patch(jz2, self.here())
            self.emit(ops.PUSH, 0, loc=expr.loc)
            self.patch(jend, self.here())
            return
        if expr.op == "||":
            self.compile_value(expr.left)
            jnz1 = self.emit(ops.JNZ, 0, loc=expr.loc)
            self.compile_value(expr.right)
            jnz2 = self.emit(ops.JNZ, 0, loc=expr.loc)
            self.emit(ops.PUSH, 0, loc=expr.loc)
            jend = self.emit(ops.JMP, 0, loc=expr.loc)
            self.patch(jnz1, self.here())
            self.patch(jnz2, self.here())
            self.emit(ops.PUSH, 1, loc=expr.loc)
            self.patch(jend, self.here())
            return
        self.compile_value(expr.left)
        self.compile_value(expr.right)
        self.emit(self._BINOPS[expr.op], loc=expr.loc)

    def compile_call(self, call: n.CallExpr, want_value: bool) -> bool:
        """Compile a call; returns True when a value is left on the stack."""
        if call.name == "nondet_int":
            if len(call.args) != 2:
                raise self.fail("nondet_int takes exactly (lo, hi)", call.loc)
            self.compile_value(call.args[0])
            self.compile_value(call.args[1])
            site = len(self.nondets)
            self.nondets.append(NondetSite(call.loc.line, self.current.name))
            self.emit(ops.NONDET, site, loc=call.loc)
            return True
        if call.name in self.funcs:
            func = self.func_defs[self.funcs[call.name]]
            if len(call.args) != len(func.params):
                raise self.fail(
                    f"{call.name!r} expects {len(func.params)} argument(s), got {len(call.args)}",
                    call.loc,
                )
            for arg, param in zip(call.args, func.params):
                if param.is_array:
                    self.compile_array_arg(arg, call)
                else:
                    self.compile_value(arg)
            self.emit(ops.CALL, self.funcs[call.name], len(call.args), loc=call.loc)
            if func.ret_type == "void":
                if want_value:
                    raise self.fail(f"void value of {call.name!r} used", call.loc)
                return False
            return True
        if call.name in self.extern_names:
            # Extern stubs are no-ops: arguments are evaluated for their side
            # effects only, arrays and string literals are skipped outright.
            for arg in call.args:
                if isinstance(arg, n.StrLit):
                    continue
                if isinstance(arg, n.Name):
                    var = self.locals.get(arg.name) or self.globals.get(arg.name)
                    if var is not None and var.kind in ("garray", "larray", "aparam"):
                        continue
                self.compile_value(arg)
                self.emit(ops.POP, loc=call.loc)
            self.emit(ops.PUSH, 0, loc=call.loc)
            if not want_value:
                return True
            return True
        raise self.fail(f"call to undefined function {call.name!r}", call.loc)

    def compile_array_arg(self, arg: n.Expr, call: n.CallExpr) -> None:
        if not isinstance(arg, n.Name):
            raise self.fail("array arguments must be array names", call.loc)
        var = self.locals.get(arg.name) or self.globals.get(arg.name)
        if var is None:
            raise self.fail(f"undeclared identifier {arg.name!r}", arg.loc)
        if var.kind == "garray":
            self.emit(ops.MKARG, var.base, var.size, loc=arg.loc)
        elif var.kind == "aparam":
            self.emit(ops.LOADL, var.base, loc=arg.loc)
        elif var.kind == "larray":
            raise self.fail(
                "local arrays cannot be passed to defined functions (globals only)", arg.loc
            )
        else:
            raise self.fail(f"{arg.name!r} is not an array", arg.loc)
