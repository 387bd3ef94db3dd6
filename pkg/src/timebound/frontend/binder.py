"""Attach parsed annotations to the program they describe.

Binding rules:

* `DEFINE-TIMER` is only legal at top level; timers are collected in
  definition order.
* `WCET-FUNCTION` binds to the textually next function *definition* (extern
  declarations are skipped); two annotations landing on one function, or an
  annotation with no following definition, are errors.
* `RESET-TIMER` / `ASSERT-TIMER` bind to the statement position where they
  were written, in any function body, and may only name already-defined
  timers.
* Symbolic names inside ASSERT-TIMER expressions and WCET durations must
  resolve to compile-time integer constants: globals with a constant
  initializer that the program never reassigns.

Functions with no WCET annotation get duration 0 and a warning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from timebound.diagnostics import BindError, Diagnostic, Loc
from timebound.frontend.annotations import (
    Annotation,
    AssertTimer,
    DefineTimer,
    ResetTimer,
    WcetFunction,
)
from timebound.frontend import nodes as n


@dataclass(frozen=True)
class AnnotatedProgram:
    """An AST plus its bound timing annotations.

    The annotation markers stay embedded in `ast` (the instrumenter consumes
    them); `timers`, `wcet`, and `stmt_annotations` summarize the binding.
    """

    ast: n.Ast
    timers: tuple[str, ...]
    wcet: dict[str, int]  # every defined function, 0 when unannotated
    stmt_annotations: tuple[tuple[str, Annotation], ...]  # (function name, annotation)
    wcet_exprs: dict[str, n.Expr] = field(default_factory=dict, compare=False)
    warnings: tuple[Diagnostic, ...] = field(default=(), compare=False)

    @property
    def has_annotations(self) -> bool:
        return bool(self.timers) or bool(self.wcet_exprs) or bool(self.stmt_annotations)


def constant_globals(ast: n.Ast) -> dict[str, int]:
    """Globals with a constant initializer that are never reassigned.

    These act as the compile-time integer constants that annotation
    expressions may reference.
    """
    mutated: set[str] = set()

    def scan(stmt: n.Stmt) -> None:
        if isinstance(stmt, n.Assign):
            name = stmt.target.name if isinstance(stmt.target, n.Name) else stmt.target.array
            mutated.add(name)
        elif isinstance(stmt, n.Block):
            for s in stmt.stmts:
                scan(s)
        elif isinstance(stmt, n.If):
            scan(stmt.then)
            if stmt.orelse is not None:
                scan(stmt.orelse)
        elif isinstance(stmt, n.While):
            scan(stmt.body)
        elif isinstance(stmt, n.For):
            if stmt.init is not None:
                scan(stmt.init)
            if stmt.step is not None:
                scan(stmt.step)
            scan(stmt.body)

    for f in ast.functions:
        scan(f.body)

    consts: dict[str, int] = {}
    for decl in ast.globals:
        if decl.is_array or decl.init is None or decl.name in mutated:
            continue
        value = fold_const(decl.init, consts)
        if value is not None:
            consts[decl.name] = value
    return consts


def fold_const(expr: n.Expr, env: dict[str, int] | None = None) -> int | None:
    """Evaluate a constant expression, or None when it is not constant."""
    if isinstance(expr, n.IntLit):
        return expr.value
    if isinstance(expr, n.Name) and env is not None:
        return env.get(expr.name)
    if isinstance(expr, n.Unary) and expr.op == "-":
        v = fold_const(expr.operand, env)
        return None if v is None else -v
    if isinstance(expr, n.Binary) and expr.op in ("+", "-", "*"):
        a = fold_const(expr.left, env)
        b = fold_const(expr.right, env)
        if a is None or b is None:
            return None
        return a + b if expr.op == "+" else a - b if expr.op == "-" else a * b
    return None


def bind_annotations(ast: n.Ast, anns: list[Annotation] | None = None) -> AnnotatedProgram:
    """Bind the annotations embedded in `ast` (in source order).

    `anns`, when given, is cross-checked against the embedded markers.
    Raises BindError on any violation of the binding rules.
    """
    consts = constant_globals(ast)
    timers: list[str] = []
    wcet_exprs: dict[str, n.Expr] = {}
    wcet: dict[str, int] = {}
    stmt_annotations: list[tuple[str, Annotation]] = []
    warnings: list[Diagnostic] = []
    collected: list[Annotation] = []

    pending_wcet: list[WcetFunction] = []
    for item in ast.items:
        if isinstance(item, n.AnnotationStmt):
            ann = item.annotation
            collected.append(ann)
            if isinstance(ann, DefineTimer):
                if ann.name in timers:
                    raise BindError(f"timer {ann.name!r} defined twice", ann.loc, ast.path)
                timers.append(ann.name)
            elif isinstance(ann, WcetFunction):
                pending_wcet.append(ann)
            else:
                raise BindError(
                    "RESET-TIMER/ASSERT-TIMER must appear inside a function body",
                    ann.loc,
                    ast.path,
                )
        elif isinstance(item, n.FunctionDef) and not item.is_extern:
            if len(pending_wcet) > 1:
                raise BindError(
                    f"multiple WCET-FUNCTION annotations target function {item.name!r}",
                    pending_wcet[1].loc,
                    ast.path,
                )
            if pending_wcet:
                ann = pending_wcet.pop()
                wcet_exprs[item.name] = ann.duration
                wcet[item.name] = _resolve_duration(ann, consts, ast.path)
            else:
                wcet[item.name] = 0
                warnings.append(
                    Diagnostic(
                        ast.path,
                        item.loc,
                        "warning",
                        f"function {item.name!r} has no WCET-FUNCTION annotation; assuming duration 0",
                    )
                )
            collected.extend(
                _bind_body(item, timers, consts, stmt_annotations, ast.path)
            )
    if pending_wcet:
        raise BindError(
            "WCET-FUNCTION annotation is not followed by a function definition",
            pending_wcet[0].loc,
            ast.path,
        )
    if anns is not None and list(anns) != collected:
        raise BindError("annotation list does not match the annotations embedded in the AST", None, ast.path)
    return AnnotatedProgram(
        ast=ast,
        timers=tuple(timers),
        wcet=wcet,
        stmt_annotations=tuple(stmt_annotations),
        wcet_exprs=wcet_exprs,
        warnings=tuple(warnings),
    )


def _resolve_duration(ann: WcetFunction, consts: dict[str, int], path: str) -> int:
    value = fold_const(ann.duration, consts)
    if value is None:
        name = ann.duration.name if isinstance(ann.duration, n.Name) else "<expr>"
        raise BindError(
            f"WCET duration {name!r} does not resolve to a compile-time integer constant",
            ann.loc,
            path,
        )
    if value < 0:
        raise BindError("WCET duration must be nonnegative", ann.loc, path)
    return value


def _bind_body(
    func: n.FunctionDef,
    timers: list[str],
    consts: dict[str, int],
    out: list[tuple[str, Annotation]],
    path: str,
) -> list[Annotation]:
    collected: list[Annotation] = []

    def visit(stmt: n.Stmt) -> None:
        if isinstance(stmt, n.AnnotationStmt):
            ann = stmt.annotation
            collected.append(ann)
            if isinstance(ann, ResetTimer):
                if ann.name not in timers:
                    raise BindError(
                        f"timer {ann.name!r} is not defined at this point", ann.loc, path
                    )
                out.append((func.name, ann))
            elif isinstance(ann, AssertTimer):
                _check_assert_names(ann, timers, consts, path)
                out.append((func.name, ann))
            elif isinstance(ann, DefineTimer):
                raise BindError("DEFINE-TIMER must appear at top level", ann.loc, path)
            else:
                raise BindError(
                    "WCET-FUNCTION must appear before a function definition", ann.loc, path
                )
        elif isinstance(stmt, n.Block):
            for s in stmt.stmts:
                visit(s)
        elif isinstance(stmt, n.If):
            visit(stmt.then)
            if stmt.orelse is not None:
                visit(stmt.orelse)
        elif isinstance(stmt, n.While):
            visit(stmt.body)
        elif isinstance(stmt, n.For):
            visit(stmt.body)

    visit(func.body)
    return collected


def _check_assert_names(ann: AssertTimer, timers: list[str], consts: dict[str, int], path: str) -> None:
    def visit(e: n.Expr) -> None:
        if isinstance(e, n.Name):
            if e.name not in timers and e.name not in consts:
                raise BindError(
                    f"{e.name!r} is neither a defined timer nor a compile-time constant",
                    e.loc,
                    path,
                )
        elif isinstance(e, n.Binary):
            visit(e.left)
            visit(e.right)
        elif isinstance(e, n.Unary):
            visit(e.operand)

    visit(ann.expr)
