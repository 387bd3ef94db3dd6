"""Recursive-descent parser for the MiniC subset and its annotations.

The grammar covers: declarations of `void`/`int`/`unsigned int`/`char`
scalars and fixed-size one-dimensional arrays, `if`/`else`, `for`, `while`,
assignment (`=`, `+=`, `-=`, and `++`/`--` statement sugar), function calls,
`return`, `assert(expr)`, and the verification-only `assume(expr)` whose
failing paths the explorer silently abandons. Pointers, structs, and
recursion are out; a recursive call graph is rejected outright.

Parsing is deterministic: the same token list always yields the same tree.
Postfix `x++;`/`x--;` normalize to `x += 1;`/`x -= 1;` so emitted code
round-trips structurally.
"""

from __future__ import annotations

import re

from timebound.diagnostics import (
    AnnotationSyntaxError,
    Loc,
    ParseError,
    RecursionCycleError,
    SourceUnit,
)
from timebound.frontend.annotations import (
    Annotation,
    AssertTimer,
    DefineTimer,
    ResetTimer,
    WcetFunction,
)
from timebound.frontend.lexer import Token, TokenKind, tokenize
from timebound.frontend import nodes as n

INTRINSICS = frozenset({"nondet_int", "__VERIFIER_assume"})

_ASSERT_TIMER_OPS = frozenset({"+", "-", "*", "<", "<=", ">", ">=", "==", "!=", "&&", "||", "!"})


def parse(tokens: list[Token], path: str = "<input>") -> n.Ast:
    """Parse a full translation unit.

    Raises ParseError / AnnotationSyntaxError with a location on malformed
    input, and RecursionCycleError when the call graph has a cycle.
    """
    ast = _Parser(tokens, path).parse_unit()
    _check_unit(ast)
    return ast


class _Parser:
    def __init__(self, tokens: list[Token], path: str):
        self.tokens = tokens
        self.pos = 0
        self.path = path

    # -- token plumbing --

    def peek(self, k: int = 0) -> Token:
        i = min(self.pos + k, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def error(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.peek()
        what = " or ".join(expected)
        err = ParseError(f"expected {what}, found {tok}", tok.loc, expected)
        err.path = self.path
        return err

    def expect_punct(self, text: str) -> Token:
        if not self.peek().is_punct(text):
            raise self.error((repr(text),))
        return self.advance()

    def expect_ident(self) -> Token:
        if self.peek().kind is not TokenKind.IDENT:
            raise self.error(("identifier",))
        return self.advance()

    def at_type(self) -> bool:
        tok = self.peek()
        return tok.kind is TokenKind.KEYWORD and tok.lexeme in ("void", "int", "unsigned", "char")

    # -- top level --

    def parse_unit(self) -> n.Ast:
        items: list[n.TopItem] = []
        while True:
            tok = self.peek()
            if tok.kind is TokenKind.EOF:
                break
            if tok.kind is TokenKind.COMMENT:
                self.advance()
                items.append(n.CommentStmt(tok.lexeme[2:], loc=tok.loc))
            elif tok.kind is TokenKind.ANNOTATION:
                self.advance()
                items.append(n.AnnotationStmt(parse_annotation(tok), loc=tok.loc))
            elif tok.is_keyword("extern") or self.at_type():
                item = self.parse_toplevel_decl()
                if item is not None:
                    items.append(item)
            else:
                raise self.error(("declaration", "function definition"))
        return n.Ast(tuple(items), path=self.path)

    def parse_type(self) -> str:
        tok = self.peek()
        if not self.at_type():
            raise self.error(("type name",))
        self.advance()
        if tok.lexeme == "unsigned":
            if self.peek().is_keyword("int"):
                self.advance()
            return "unsigned int"
        return tok.lexeme

    def parse_toplevel_decl(self) -> n.TopItem | None:
        is_extern = False
        if self.peek().is_keyword("extern"):
            self.advance()
            is_extern = True
        loc = self.peek().loc
        ctype = self.parse_type()
        name_tok = self.expect_ident()
        if self.peek().is_punct("("):
            func = self.parse_function(ctype, name_tok, is_extern, loc)
            if func.is_extern and func.name in INTRINSICS:
                return None  # intrinsic prototypes are builtin, not AST items
            return func
        if is_extern:
            raise ParseError("extern is only supported for function declarations", loc)
        return self.finish_var_decl(ctype, name_tok, loc)

    def parse_function(self, ret_type: str, name_tok: Token, is_extern: bool, loc: Loc) -> n.FunctionDef:
        self.expect_punct("(")
        params: list[n.Param] = []
        if self.peek().is_keyword("void") and self.peek(1).is_punct(")"):
            self.advance()
        elif not self.peek().is_punct(")"):
            while True:
                ptype = self.parse_type()
                if ptype == "void":
                    raise ParseError("parameters cannot have void type", self.peek().loc)
                pname = self.expect_ident().lexeme
                size = None
                if self.peek().is_punct("["):
                    self.advance()
                    size = 0
                    if self.peek().kind is TokenKind.INT:
                        size = int(self.advance().lexeme)
                    self.expect_punct("]")
                params.append(n.Param(ptype, pname, size))
                if self.peek().is_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct(")")
        if is_extern or self.peek().is_punct(";"):
            self.expect_punct(";")
            return n.FunctionDef(ret_type, name_tok.lexeme, tuple(params), None, is_extern=True, loc=loc)
        body = self.parse_block()
        return n.FunctionDef(ret_type, name_tok.lexeme, tuple(params), body, loc=loc)

    def finish_var_decl(self, ctype: str, name_tok: Token, loc: Loc) -> n.VarDecl:
        if ctype == "void":
            raise ParseError("variables cannot have void type", loc)
        size = None
        if self.peek().is_punct("["):
            self.advance()
            size_tok = self.peek()
            if size_tok.kind is not TokenKind.INT:
                raise self.error(("array size (integer literal)",))
            self.advance()
            size = int(size_tok.lexeme)
            if size <= 0:
                raise ParseError("array size must be positive", size_tok.loc)
            self.expect_punct("]")
        init = None
        if self.peek().is_punct("="):
            if size is not None:
                raise ParseError("array initializers are not supported", self.peek().loc)
            self.advance()
            init = self.parse_expr()
        self.expect_punct(";")
        return n.VarDecl(ctype, name_tok.lexeme, size, init, loc=loc)

    # -- statements --

    def parse_block(self) -> n.Block:
        loc = self.expect_punct("{").loc
        stmts: list[n.Stmt] = []
        while not self.peek().is_punct("}"):
            if self.peek().kind is TokenKind.EOF:
                raise self.error(("'}'",))
            stmts.append(self.parse_stmt())
        self.expect_punct("}")
        return n.Block(tuple(stmts), loc=loc)

    def parse_stmt(self) -> n.Stmt:
        tok = self.peek()
        if tok.kind is TokenKind.COMMENT:
            self.advance()
            return n.CommentStmt(tok.lexeme[2:], loc=tok.loc)
        if tok.kind is TokenKind.ANNOTATION:
            self.advance()
            return n.AnnotationStmt(parse_annotation(tok), loc=tok.loc)
        if tok.is_punct("{"):
            return self.parse_block()
        if tok.is_keyword("if"):
            return self.parse_if()
        if tok.is_keyword("while"):
            return self.parse_while()
        if tok.is_keyword("for"):
            return self.parse_for()
        if tok.is_keyword("return"):
            self.advance()
            value = None
            if not self.peek().is_punct(";"):
                value = self.parse_expr()
            self.expect_punct(";")
            return n.Return(value, loc=tok.loc)
        if tok.is_keyword("assert"):
            self.advance()
            self.expect_punct("(")
            cond = self.parse_expr()
            self.expect_punct(")")
            self.expect_punct(";")
            return n.AssertStmt(cond, loc=tok.loc)
        if tok.is_keyword("assume"):
            self.advance()
            self.expect_punct("(")
            cond = self.parse_expr()
            self.expect_punct(")")
            self.expect_punct(";")
            return n.AssumeStmt(cond, loc=tok.loc)
        if self.at_type():
            loc = tok.loc
            ctype = self.parse_type()
            name_tok = self.expect_ident()
            return self.finish_var_decl(ctype, name_tok, loc)
        if tok.kind is TokenKind.IDENT:
            stmt = self.parse_assign_or_call()
            self.expect_punct(";")
            return stmt
        raise self.error(("statement",))

    def parse_if(self) -> n.If:
        loc = self.advance().loc
        self.expect_punct("(")
        cond = self.parse_expr()
        self.expect_punct(")")
        then = self.parse_stmt()
        orelse = None
        if self.peek().is_keyword("else"):
            self.advance()
            orelse = self.parse_stmt()
        return n.If(cond, then, orelse, loc=loc)

    def parse_while(self) -> n.While:
        loc = self.advance().loc
        self.expect_punct("(")
        cond = self.parse_expr()
        self.expect_punct(")")
        body = self.parse_stmt()
        return n.While(cond, body, loc=loc)

    def parse_for(self) -> n.For:
        loc = self.advance().loc
        self.expect_punct("(")
        init: n.VarDecl | n.Assign | None = None
        if not self.peek().is_punct(";"):
            if self.at_type():
                dloc = self.peek().loc
                ctype = self.parse_type()
                name_tok = self.expect_ident()
                init = self.finish_var_decl(ctype, name_tok, dloc)  # consumes ';'
            else:
                clause = self.parse_assign_or_call()
                if not isinstance(clause, n.Assign):
                    raise ParseError("for-initializer must be an assignment", clause.loc)
                init = clause
                self.expect_punct(";")
        else:
            self.advance()
        cond = None
        if not self.peek().is_punct(";"):
            cond = self.parse_expr()
        self.expect_punct(";")
        step = None
        if not self.peek().is_punct(")"):
            clause = self.parse_assign_or_call()
            if not isinstance(clause, n.Assign):
                raise ParseError("for-step must be an assignment", clause.loc)
            step = clause
        self.expect_punct(")")
        body = self.parse_stmt()
        return n.For(init, cond, step, body, loc=loc)

    def parse_assign_or_call(self) -> n.Stmt:
        """Statement starting with an identifier, up to but not including ';'."""
        name_tok = self.expect_ident()
        loc = name_tok.loc
        if self.peek().is_punct("("):
            call = self.finish_call(name_tok)
            if call.name == "__VERIFIER_assume":
                if len(call.args) != 1:
                    raise ParseError("__VERIFIER_assume takes exactly one argument", loc)
                return n.AssumeStmt(call.args[0], loc=loc)
            return n.ExprStmt(call, loc=loc)
        target: n.Name | n.Index
        if self.peek().is_punct("["):
            self.advance()
            index = self.parse_expr()
            self.expect_punct("]")
            target = n.Index(name_tok.lexeme, index, loc=loc)
        else:
            target = n.Name(name_tok.lexeme, loc=loc)
        tok = self.peek()
        if tok.is_punct("++") or tok.is_punct("--"):
            self.advance()
            op = "+=" if tok.lexeme == "++" else "-="
            return n.Assign(target, op, n.IntLit(1, loc=tok.loc), loc=loc)
        if tok.is_punct("=") or tok.is_punct("+=") or tok.is_punct("-="):
            self.advance()
            value = self.parse_expr()
            return n.Assign(target, tok.lexeme, value, loc=loc)
        raise self.error(("'='", "'+='", "'-='", "'++'", "'--'", "'('"))

    # -- expressions (precedence climbing) --

    def parse_expr(self) -> n.Expr:
        return self.parse_or()

    def _parse_left_assoc(self, ops: tuple[str, ...], sub) -> n.Expr:
        left = sub()
        while self.peek().kind is TokenKind.PUNCT and self.peek().lexeme in ops:
            op_tok = self.advance()
            right = sub()
            left = n.Binary(op_tok.lexeme, left, right, loc=op_tok.loc)
        return left

    def parse_or(self) -> n.Expr:
        return self._parse_left_assoc(("||",), self.parse_and)

    def parse_and(self) -> n.Expr:
        return self._parse_left_assoc(("&&",), self.parse_equality)

    def parse_equality(self) -> n.Expr:
        return self._parse_left_assoc(("==", "!="), self.parse_relational)

    def parse_relational(self) -> n.Expr:
        return self._parse_left_assoc(("<", "<=", ">", ">="), self.parse_additive)

    def parse_additive(self) -> n.Expr:
        return self._parse_left_assoc(("+", "-"), self.parse_multiplicative)

    def parse_multiplicative(self) -> n.Expr:
        return self._parse_left_assoc(("*", "/", "%"), self.parse_unary)

    def parse_unary(self) -> n.Expr:
        tok = self.peek()
        if tok.is_punct("-") or tok.is_punct("!"):
            self.advance()
            return n.Unary(tok.lexeme, self.parse_unary(), loc=tok.loc)
        if tok.is_punct("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_primary()

    def parse_primary(self) -> n.Expr:
        tok = self.peek()
        if tok.kind is TokenKind.INT:
            self.advance()
            return n.IntLit(int(tok.lexeme), loc=tok.loc)
        if tok.kind is TokenKind.STRING:
            self.advance()
            return n.StrLit(tok.lexeme, loc=tok.loc)
        if tok.is_punct("("):
            self.advance()
            inner = self.parse_expr()
            self.expect_punct(")")
            return inner
        if tok.kind is TokenKind.IDENT:
            self.advance()
            if self.peek().is_punct("("):
                return self.finish_call(tok)
            if self.peek().is_punct("["):
                self.advance()
                index = self.parse_expr()
                self.expect_punct("]")
                return n.Index(tok.lexeme, index, loc=tok.loc)
            return n.Name(tok.lexeme, loc=tok.loc)
        raise self.error(("expression",))

    def finish_call(self, name_tok: Token) -> n.CallExpr:
        self.expect_punct("(")
        args: list[n.Expr] = []
        if not self.peek().is_punct(")"):
            while True:
                args.append(self.parse_expr())
                if self.peek().is_punct(","):
                    self.advance()
                    continue
                break
        self.expect_punct(")")
        return n.CallExpr(name_tok.lexeme, tuple(args), loc=name_tok.loc)


# -- annotation parsing --


def parse_annotation(tok: Token) -> Annotation:
    """Parse one `//@` comment token into an Annotation.

    Keywords match case-insensitively and a trailing `;` is optional.
    A `RESET-TIMER name=0` suffix is tolerated and ignored.
    """
    if tok.kind is not TokenKind.ANNOTATION:
        raise AnnotationSyntaxError("not an annotation comment", tok.loc)
    raw = tok.lexeme[3:].strip()
    body = raw[:-1].rstrip() if raw.endswith(";") else raw
    loc = tok.loc
    m = re.match(r"([A-Za-z][A-Za-z_-]*)\s*(.*)$", body)
    head = m.group(1) if m else body
    keyword = head.upper()
    rest = (m.group(2) if m else "").strip()
    if keyword == "DEFINE-TIMER":
        name = _annotation_ident(rest, loc)
        return DefineTimer(name, raw=raw, loc=loc)
    if keyword == "RESET-TIMER":
        name_part = rest.split("=", 1)[0].strip()
        if "=" in rest:
            suffix = rest.split("=", 1)[1].strip()
            if suffix != "0":
                raise AnnotationSyntaxError(f"RESET-TIMER only resets to zero, not {suffix!r}", loc)
        name = _annotation_ident(name_part, loc)
        return ResetTimer(name, raw=raw, loc=loc)
    if keyword == "ASSERT-TIMER":
        if not (rest.startswith("(") and rest.endswith(")")):
            raise AnnotationSyntaxError("ASSERT-TIMER expects a parenthesized expression", loc)
        expr = _annotation_expr(rest, loc, tok)
        _check_assert_timer_ops(expr)
        return AssertTimer(expr, raw=raw, loc=loc)
    if keyword == "WCET-FUNCTION":
        if not (rest.startswith("[") and rest.endswith("]")):
            raise AnnotationSyntaxError("WCET-FUNCTION expects a bracketed duration", loc)
        inner = rest[1:-1].strip()
        duration = _annotation_duration(inner, loc)
        return WcetFunction(duration, raw=raw, loc=loc)
    raise AnnotationSyntaxError(f"unknown annotation keyword {head!r}", loc)


def _annotation_ident(text: str, loc: Loc) -> str:
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", text):
        raise AnnotationSyntaxError(f"expected a timer name, found {text!r}", loc)
    return text


def _annotation_expr(text: str, loc: Loc, tok: Token) -> n.Expr:
    col_offset = tok.lexeme.index(text[0], 3)
    sub = SourceUnit("<annotation>", text)
    try:
        sub_tokens = tokenize(sub)
        rebased = [
            Token(t.kind, t.lexeme, Loc(loc.line, loc.col + col_offset + t.loc.col - 1))
            for t in sub_tokens
        ]
        parser = _Parser(rebased, "<annotation>")
        expr = parser.parse_expr()
        if parser.peek().kind is not TokenKind.EOF:
            raise AnnotationSyntaxError("trailing text after assertion expression", parser.peek().loc)
        return expr
    except (ParseError, AnnotationSyntaxError) as e:
        raise AnnotationSyntaxError(f"malformed ASSERT-TIMER expression: {e.message}", e.loc or loc)


def _check_assert_timer_ops(expr: n.Expr) -> None:
    if isinstance(expr, n.Binary):
        if expr.op not in _ASSERT_TIMER_OPS:
            raise AnnotationSyntaxError(f"operator {expr.op!r} not allowed in ASSERT-TIMER", expr.loc)
        _check_assert_timer_ops(expr.left)
        _check_assert_timer_ops(expr.right)
    elif isinstance(expr, n.Unary):
        if expr.op not in _ASSERT_TIMER_OPS:
            raise AnnotationSyntaxError(f"operator {expr.op!r} not allowed in ASSERT-TIMER", expr.loc)
        _check_assert_timer_ops(expr.operand)
    elif isinstance(expr, (n.IntLit, n.Name)):
        pass
    else:
        raise AnnotationSyntaxError(
            "ASSERT-TIMER expressions may use only timers, integer constants, "
            "and arithmetic/comparison/logical operators",
            expr.loc,
        )


def _annotation_duration(text: str, loc: Loc) -> n.Expr:
    if re.fullmatch(r"[0-9]+", text):
        return n.IntLit(int(text), loc=loc)
    if re.fullmatch(r"-\s*[0-9]+", text):
        raise AnnotationSyntaxError("WCET duration must be nonnegative", loc)
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", text):
        return n.Name(text, loc=loc)
    raise AnnotationSyntaxError(
        f"WCET duration must be an integer or constant name, found {text!r}", loc
    )


# -- whole-unit checks --


def _check_unit(ast: n.Ast) -> None:
    seen: dict[str, n.FunctionDef] = {}
    for f in ast.items:
        if isinstance(f, n.FunctionDef) and not f.is_extern:
            if f.name in seen:
                raise ParseError(f"duplicate function definition {f.name!r}", f.loc)
            seen[f.name] = f
    extern_names = {f.name for f in ast.externs}
    calls: dict[str, set[str]] = {name: set() for name in seen}
    for f in ast.functions:
        targets = calls[f.name]
        for callee, loc in _called_names(f.body):
            if callee in seen:
                targets.add(callee)
            elif callee not in extern_names and callee not in INTRINSICS:
                raise ParseError(f"call to undefined function {callee!r}", loc)
    _check_acyclic(calls, seen)


def _called_names(stmt: n.Stmt) -> list[tuple[str, Loc]]:
    found: list[tuple[str, Loc]] = []

    def walk_expr(e: n.Expr) -> None:
        if isinstance(e, n.CallExpr):
            found.append((e.name, e.loc))
            for a in e.args:
                walk_expr(a)
        elif isinstance(e, n.Binary):
            walk_expr(e.left)
            walk_expr(e.right)
        elif isinstance(e, n.Unary):
            walk_expr(e.operand)
        elif isinstance(e, n.Index):
            walk_expr(e.index)

    def walk_stmt(s: n.Stmt) -> None:
        if isinstance(s, n.Block):
            for sub in s.stmts:
                walk_stmt(sub)
        elif isinstance(s, n.If):
            walk_expr(s.cond)
            walk_stmt(s.then)
            if s.orelse is not None:
                walk_stmt(s.orelse)
        elif isinstance(s, n.While):
            walk_expr(s.cond)
            walk_stmt(s.body)
        elif isinstance(s, n.For):
            if s.init is not None:
                walk_stmt(s.init)
            if s.cond is not None:
                walk_expr(s.cond)
            if s.step is not None:
                walk_stmt(s.step)
            walk_stmt(s.body)
        elif isinstance(s, n.Assign):
            if isinstance(s.target, n.Index):
                walk_expr(s.target.index)
            walk_expr(s.value)
        elif isinstance(s, n.VarDecl):
            if s.init is not None:
                walk_expr(s.init)
        elif isinstance(s, n.ExprStmt):
            walk_expr(s.expr)
        elif isinstance(s, (n.AssertStmt, n.AssumeStmt)):
            walk_expr(s.cond)
        elif isinstance(s, n.Return):
            if s.value is not None:
                walk_expr(s.value)

    walk_stmt(stmt)
    return found


def _check_acyclic(calls: dict[str, set[str]], defs: dict[str, n.FunctionDef]) -> None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {name: WHITE for name in calls}
    stack: list[str] = []

    def visit(name: str) -> None:
        color[name] = GRAY
        stack.append(name)
        for callee in sorted(calls[name]):
            if color[callee] == GRAY:
                cycle = stack[stack.index(callee):]
                raise RecursionCycleError(cycle, defs[callee].loc)
            if color[callee] == WHITE:
                visit(callee)
        stack.pop()
        color[name] = BLACK

    for name in sorted(calls):
        if color[name] == WHITE:
            visit(name)
