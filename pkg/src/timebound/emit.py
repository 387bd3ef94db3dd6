"""Deterministic C emitter: one statement per line, 2-space indent.

The output is self-contained ANSI C so it can be handed to an external
bounded model checker or an ordinary compiler: `#include <assert.h>` is
added when asserts are present, and the verification intrinsics get
prototypes (`nondet_int` for range-bounded nondeterministic values and
`__VERIFIER_assume` for path pruning). The parser skips those prototypes
when reading the file back, so emit/parse round-trips are stable.
"""

from __future__ import annotations

from timebound.frontend import nodes as n

_PREC = {
    "||": 3,
    "&&": 4,
    "==": 5,
    "!=": 5,
    "<": 6,
    "<=": 6,
    ">": 6,
    ">=": 6,
    "+": 7,
    "-": 7,
    "*": 8,
    "/": 8,
    "%": 8,
}
_UNARY_PREC = 9


def emit_expr(expr: n.Expr, min_prec: int = 0) -> str:
    """Render an expression with minimal parentheses."""
    if isinstance(expr, n.IntLit):
        return str(expr.value)
    if isinstance(expr, n.StrLit):
        return expr.text
    if isinstance(expr, n.Name):
        return expr.name
    if isinstance(expr, n.Index):
        return f"{expr.array}[{emit_expr(expr.index)}]"
    if isinstance(expr, n.CallExpr):
        return f"{expr.name}({', '.join(emit_expr(a) for a in expr.args)})"
    if isinstance(expr, n.Unary):
        inner = emit_expr(expr.operand, _UNARY_PREC)
        sep = " " if inner and inner[0] == expr.op else ""
        text = f"{expr.op}{sep}{inner}"
        return f"({text})" if _UNARY_PREC < min_prec else text
    if isinstance(expr, n.Binary):
        prec = _PREC[expr.op]
        text = f"{emit_expr(expr.left, prec)} {expr.op} {emit_expr(expr.right, prec + 1)}"
        return f"({text})" if prec < min_prec else text
    raise TypeError(f"cannot emit {expr!r}")


def emit_c(ast: n.Ast) -> str:
    """Render a translation unit as compilable C text."""
    lines: list[str] = []
    if _uses_assert(ast):
        lines.append("#include <assert.h>")
    if _uses_call(ast, "nondet_int"):
        lines.append("int nondet_int(int lo, int hi);")
    if _uses_assume(ast):
        lines.append("void __VERIFIER_assume(int cond);")
    if lines:
        lines.append("")
    for item in ast.items:
        if isinstance(item, n.FunctionDef):
            _emit_function(item, lines)
            lines.append("")
        else:
            _emit_stmt(item, 0, lines)
    text = "\n".join(lines)
    return text.rstrip("\n") + "\n" if text.strip() else ""


def _emit_function(func: n.FunctionDef, lines: list[str]) -> None:
    if not func.params:
        params = "void"
    else:
        parts = []
        for p in func.params:
            if p.size is None:
                parts.append(f"{p.ctype} {p.name}")
            elif p.size == 0:
                parts.append(f"{p.ctype} {p.name}[]")
            else:
                parts.append(f"{p.ctype} {p.name}[{p.size}]")
        params = ", ".join(parts)
    head = f"{func.ret_type} {func.name}({params})"
    if func.is_extern:
        lines.append(f"extern {head};")
        return
    lines.append(head + " {")
    for stmt in func.body.stmts:
        _emit_stmt(stmt, 1, lines)
    lines.append("}")


def _emit_stmt(stmt: n.Stmt, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    if isinstance(stmt, n.VarDecl):
        lines.append(pad + _decl_text(stmt) + ";")
    elif isinstance(stmt, n.Assign):
        lines.append(pad + _assign_text(stmt) + ";")
    elif isinstance(stmt, n.ExprStmt):
        lines.append(pad + emit_expr(stmt.expr) + ";")
    elif isinstance(stmt, n.Return):
        if stmt.value is None:
            lines.append(pad + "return;")
        else:
            lines.append(pad + f"return {emit_expr(stmt.value)};")
    elif isinstance(stmt, n.AssertStmt):
        lines.append(pad + f"assert ({emit_expr(stmt.cond)});")
    elif isinstance(stmt, n.AssumeStmt):
        lines.append(pad + f"__VERIFIER_assume({emit_expr(stmt.cond)});")
    elif isinstance(stmt, n.CommentStmt):
        lines.append(pad + "//" + stmt.text)
    elif isinstance(stmt, n.AnnotationStmt):
        lines.append(pad + "//@ " + stmt.annotation.raw)
    elif isinstance(stmt, n.Block):
        lines.append(pad + "{")
        for s in stmt.stmts:
            _emit_stmt(s, depth + 1, lines)
        lines.append(pad + "}")
    elif isinstance(stmt, n.If):
        lines.append(pad + f"if ({emit_expr(stmt.cond)})" + (" {" if isinstance(stmt.then, n.Block) else ""))
        _emit_body(stmt.then, depth, lines)
        if stmt.orelse is not None:
            lines.append(pad + "else" + (" {" if isinstance(stmt.orelse, n.Block) else ""))
            _emit_body(stmt.orelse, depth, lines)
    elif isinstance(stmt, n.While):
        lines.append(pad + f"while ({emit_expr(stmt.cond)})" + (" {" if isinstance(stmt.body, n.Block) else ""))
        _emit_body(stmt.body, depth, lines)
    elif isinstance(stmt, n.For):
        init = "" if stmt.init is None else _clause_text(stmt.init)
        cond = "" if stmt.cond is None else " " + emit_expr(stmt.cond)
        step = "" if stmt.step is None else " " + _assign_text(stmt.step)
        lines.append(pad + f"for ({init};{cond};{step})" + (" {" if isinstance(stmt.body, n.Block) else ""))
        _emit_body(stmt.body, depth, lines)
    else:
        raise TypeError(f"cannot emit {stmt!r}")


def _emit_body(body: n.Stmt, depth: int, lines: list[str]) -> None:
    if isinstance(body, n.Block):
        for s in body.stmts:
            _emit_stmt(s, depth + 1, lines)
        lines.append("  " * depth + "}")
    else:
        _emit_stmt(body, depth + 1, lines)


def _decl_text(decl: n.VarDecl) -> str:
    text = f"{decl.ctype} {decl.name}"
    if decl.size is not None:
        text += f"[{decl.size}]"
    if decl.init is not None:
        text += f" = {emit_expr(decl.init)}"
    return text


def _assign_text(stmt: n.Assign) -> str:
    target = stmt.target.name if isinstance(stmt.target, n.Name) else (
        f"{stmt.target.array}[{emit_expr(stmt.target.index)}]"
    )
    return f"{target} {stmt.op} {emit_expr(stmt.value)}"


def _clause_text(clause: n.VarDecl | n.Assign) -> str:
    return _decl_text(clause) if isinstance(clause, n.VarDecl) else _assign_text(clause)


def _uses_assert(ast: n.Ast) -> bool:
    return _any_stmt(ast, lambda s: isinstance(s, n.AssertStmt))


def _uses_assume(ast: n.Ast) -> bool:
    return _any_stmt(ast, lambda s: isinstance(s, n.AssumeStmt))


def _uses_call(ast: n.Ast, name: str) -> bool:
    found = False

    def check_expr(e: n.Expr) -> None:
        nonlocal found
        if isinstance(e, n.CallExpr):
            if e.name == name:
                found = True
            for a in e.args:
                check_expr(a)
        elif isinstance(e, n.Binary):
            check_expr(e.left)
            check_expr(e.right)
        elif isinstance(e, n.Unary):
            check_expr(e.operand)
        elif isinstance(e, n.Index):
            check_expr(e.index)

    def visit(s: n.Stmt) -> bool:
        for e in _stmt_exprs(s):
            check_expr(e)
        return found

    _any_stmt(ast, visit)
    return found


def _any_stmt(ast: n.Ast, pred) -> bool:
    hit = False

    def walk(s: n.Stmt) -> None:
        nonlocal hit
        if hit:
            return
        if pred(s):
            hit = True
            return
        if isinstance(s, n.Block):
            for sub in s.stmts:
                walk(sub)
        elif isinstance(s, n.If):
            walk(s.then)
            if s.orelse is not None:
                walk(s.orelse)
        elif isinstance(s, n.While):
            walk(s.body)
        elif isinstance(s, n.For):
            if s.init is not None:
                walk(s.init)
            if s.step is not None:
                walk(s.step)
            walk(s.body)

    for item in ast.items:
        if hit:
            break
        if isinstance(item, n.FunctionDef) and item.body is not None:
            walk(item.body)
        elif isinstance(item, n.VarDecl):
            walk(item)
    return hit


def _stmt_exprs(stmt: n.Stmt) -> list[n.Expr]:
    if isinstance(stmt, n.VarDecl):
        return [stmt.init] if stmt.init is not None else []
    if isinstance(stmt, n.Assign):
        out = [stmt.value]
        if isinstance(stmt.target, n.Index):
            out.append(stmt.target.index)
        return out
    if isinstance(stmt, n.ExprStmt):
        return [stmt.expr]
    if isinstance(stmt, (n.AssertStmt, n.AssumeStmt)):
        return [stmt.cond]
    if isinstance(stmt, n.Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, n.If):
        return [stmt.cond]
    if isinstance(stmt, n.While):
        return [stmt.cond]
    if isinstance(stmt, n.For):
        return [stmt.cond] if stmt.cond is not None else []
    return []
