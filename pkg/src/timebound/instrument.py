"""Translate an annotated program into plain code with explicit timers.

For every defined timer a global `unsigned int` is declared; every function
carrying a worst-case duration gets one `timer += duration;` statement per
timer prepended to its body (in timer-definition order); reset annotations
become `timer = 0;` and assertion annotations become `assert (expr);`.
Each consumed annotation is echoed back as a plain `//` comment right above
the code it produced, so the translated file still documents its origin and
later stages can recover the timer names from the echoes.

Instrumenting a program that carries no annotations returns it unchanged,
which makes a second instrumentation pass a no-op rather than a
double-counting bug.
"""

from __future__ import annotations

from timebound.diagnostics import NameClashError
from timebound.frontend import nodes as n
from timebound.frontend.annotations import AssertTimer, DefineTimer, ResetTimer, WcetFunction
from timebound.frontend.binder import AnnotatedProgram


def instrument(program: AnnotatedProgram) -> n.Ast:
    """Produce the untimed AST with explicit timer manipulation."""
    if not program.has_annotations:
        return program.ast
    clash = set(program.timers) & program_identifiers(program.ast)
    if clash:
        name = sorted(clash)[0]
        raise NameClashError(
            f"timer name {name!r} collides with a program identifier", path=program.ast.path
        )
    items: list[n.TopItem] = []
    for item in program.ast.items:
        if isinstance(item, n.AnnotationStmt):
            ann = item.annotation
            echo = n.CommentStmt(" " + ann.raw, loc=item.loc)
            if isinstance(ann, DefineTimer):
                items.append(echo)
                items.append(n.VarDecl("unsigned int", ann.name, loc=item.loc))
            elif isinstance(ann, WcetFunction):
                items.append(echo)
            else:  # unreachable after binding, kept for safety
                items.append(echo)
        elif isinstance(item, n.FunctionDef) and not item.is_extern:
            items.append(_instrument_function(item, program))
        else:
            items.append(item)
    return n.Ast(tuple(items), path=program.ast.path)


def _instrument_function(func: n.FunctionDef, program: AnnotatedProgram) -> n.FunctionDef:
    body = _rewrite_stmt(func.body, program)
    assert isinstance(body, n.Block)
    if func.name in program.wcet_exprs:
        duration = program.wcet_exprs[func.name]
        prologue = tuple(
            n.Assign(n.Name(t, loc=func.loc), "+=", duration, loc=func.loc)
            for t in program.timers
        )
        body = n.Block(prologue + body.stmts, loc=body.loc)
    return n.FunctionDef(func.ret_type, func.name, func.params, body, loc=func.loc)


def _rewrite_stmt(stmt: n.Stmt, program: AnnotatedProgram) -> n.Stmt:
    if isinstance(stmt, n.AnnotationStmt):
        replaced = _replace_annotation(stmt, program)
        if len(replaced) == 1:
            return replaced[0]
        return n.Block(tuple(replaced), loc=stmt.loc)
    if isinstance(stmt, n.Block):
        out: list[n.Stmt] = []
        for s in stmt.stmts:
            if isinstance(s, n.AnnotationStmt):
                out.extend(_replace_annotation(s, program))
            else:
                out.append(_rewrite_stmt(s, program))
        return n.Block(tuple(out), loc=stmt.loc)
    if isinstance(stmt, n.If):
        orelse = _rewrite_stmt(stmt.orelse, program) if stmt.orelse is not None else None
        return n.If(stmt.cond, _rewrite_stmt(stmt.then, program), orelse, loc=stmt.loc)
    if isinstance(stmt, n.While):
        return n.While(stmt.cond, _rewrite_stmt(stmt.body, program), loc=stmt.loc)
    if isinstance(stmt, n.For):
        return n.For(stmt.init, stmt.cond, stmt.step, _rewrite_stmt(stmt.body, program), loc=stmt.loc)
    return stmt


def _replace_annotation(stmt: n.AnnotationStmt, program: AnnotatedProgram) -> list[n.Stmt]:
    ann = stmt.annotation
    echo = n.CommentStmt(" " + ann.raw, loc=stmt.loc)
    if isinstance(ann, ResetTimer):
        return [echo, n.Assign(n.Name(ann.name, loc=stmt.loc), "=", n.IntLit(0, loc=stmt.loc), loc=stmt.loc)]
    if isinstance(ann, AssertTimer):
        return [echo, n.AssertStmt(ann.expr, loc=stmt.loc)]
    return [echo]


def program_identifiers(ast: n.Ast) -> set[str]:
    """Every identifier declared or referenced by the program."""
    names: set[str] = set()
    for item in ast.items:
        if isinstance(item, n.VarDecl):
            names.add(item.name)
            if item.init is not None:
                _expr_names(item.init, names)
        elif isinstance(item, n.FunctionDef):
            names.add(item.name)
            for p in item.params:
                names.add(p.name)
            if item.body is not None:
                _stmt_names(item.body, names)
    return names


def _stmt_names(stmt: n.Stmt, names: set[str]) -> None:
    if isinstance(stmt, n.VarDecl):
        names.add(stmt.name)
        if stmt.init is not None:
            _expr_names(stmt.init, names)
    elif isinstance(stmt, n.Assign):
        if isinstance(stmt.target, n.Name):
            names.add(stmt.target.name)
        else:
            names.add(stmt.target.array)
            _expr_names(stmt.target.index, names)
        _expr_names(stmt.value, names)
    elif isinstance(stmt, n.Block):
        for s in stmt.stmts:
            _stmt_names(s, names)
    elif isinstance(stmt, n.If):
        _expr_names(stmt.cond, names)
        _stmt_names(stmt.then, names)
        if stmt.orelse is not None:
            _stmt_names(stmt.orelse, names)
    elif isinstance(stmt, n.While):
        _expr_names(stmt.cond, names)
        _stmt_names(stmt.body, names)
    elif isinstance(stmt, n.For):
        if stmt.init is not None:
            _stmt_names(stmt.init, names)
        if stmt.cond is not None:
            _expr_names(stmt.cond, names)
        if stmt.step is not None:
            _stmt_names(stmt.step, names)
        _stmt_names(stmt.body, names)
    elif isinstance(stmt, n.ExprStmt):
        _expr_names(stmt.expr, names)
    elif isinstance(stmt, (n.AssertStmt, n.AssumeStmt)):
        _expr_names(stmt.cond, names)
    elif isinstance(stmt, n.Return):
        if stmt.value is not None:
            _expr_names(stmt.value, names)


def _expr_names(expr: n.Expr, names: set[str]) -> None:
    if isinstance(expr, n.Name):
        names.add(expr.name)
    elif isinstance(expr, n.Unary):
        _expr_names(expr.operand, names)
    elif isinstance(expr, n.Binary):
        _expr_names(expr.left, names)
        _expr_names(expr.right, names)
    elif isinstance(expr, n.Index):
        names.add(expr.array)
        _expr_names(expr.index, names)
    elif isinstance(expr, n.CallExpr):
        names.add(expr.name)
        for a in expr.args:
            _expr_names(a, names)
