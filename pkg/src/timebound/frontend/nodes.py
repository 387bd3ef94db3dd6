"""AST node types for the MiniC subset.

Locations never participate in equality, so two parses of the same program
compare equal structurally even when whitespace differs. Annotation markers
(`AnnotationStmt`, and `DefineTimer`/`WcetFunction` items at top level) stay
embedded in the tree in source order until the binder and instrumenter
consume them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from timebound.diagnostics import Loc
from timebound.frontend.annotations import Annotation

_NOLOC = Loc(0, 0)


# --- expressions ---


@dataclass(frozen=True)
class IntLit:
    value: int
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class StrLit:
    text: str  # raw lexeme, quotes included
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class Name:
    name: str
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / % < <= > >= == != && ||
    left: "Expr"
    right: "Expr"
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class Index:
    array: str
    index: "Expr"
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class CallExpr:
    name: str
    args: tuple["Expr", ...]
    loc: Loc = field(default=_NOLOC, compare=False)


Expr = Union[IntLit, StrLit, Name, Unary, Binary, Index, CallExpr]


# --- statements ---


@dataclass(frozen=True)
class VarDecl:
    ctype: str  # "int", "unsigned int", "char" ("void" only as return type)
    name: str
    size: Optional[int] = None  # array element count, None for scalars
    init: Optional[Expr] = None
    loc: Loc = field(default=_NOLOC, compare=False)

    @property
    def is_array(self) -> bool:
        return self.size is not None


@dataclass(frozen=True)
class Assign:
    target: Union[Name, Index]
    op: str  # "=", "+=", "-="
    value: Expr
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    orelse: Optional["Stmt"] = None
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: "Stmt"
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class For:
    init: Optional[Union[VarDecl, Assign]]
    cond: Optional[Expr]
    step: Optional[Assign]
    body: "Stmt"
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class ExprStmt:
    expr: CallExpr
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class AssertStmt:
    cond: Expr
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class AssumeStmt:
    cond: Expr
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class CommentStmt:
    text: str  # text after "//", verbatim
    loc: Loc = field(default=_NOLOC, compare=False)


@dataclass(frozen=True)
class AnnotationStmt:
    annotation: Annotation
    loc: Loc = field(default=_NOLOC, compare=False)


Stmt = Union[
    VarDecl,
    Assign,
    Block,
    If,
    While,
    For,
    ExprStmt,
    Return,
    AssertStmt,
    AssumeStmt,
    CommentStmt,
    AnnotationStmt,
]


# --- top level ---


@dataclass(frozen=True)
class Param:
    ctype: str
    name: str
    size: Optional[int] = None  # None: scalar; 0: unsized array; n>0: sized array

    @property
    def is_array(self) -> bool:
        return self.size is not None


@dataclass(frozen=True)
class FunctionDef:
    ret_type: str
    name: str
    params: tuple[Param, ...]
    body: Optional[Block]  # None for extern declarations
    is_extern: bool = False
    loc: Loc = field(default=_NOLOC, compare=False)


TopItem = Union[FunctionDef, VarDecl, CommentStmt, AnnotationStmt]


@dataclass(frozen=True)
class Ast:
    """A parsed translation unit, items in source order."""

    items: tuple[TopItem, ...]
    path: str = field(default="<input>", compare=False)

    @property
    def functions(self) -> tuple[FunctionDef, ...]:
        return tuple(i for i in self.items if isinstance(i, FunctionDef) and not i.is_extern)

    @property
    def externs(self) -> tuple[FunctionDef, ...]:
        return tuple(i for i in self.items if isinstance(i, FunctionDef) and i.is_extern)

    @property
    def globals(self) -> tuple[VarDecl, ...]:
        return tuple(i for i in self.items if isinstance(i, VarDecl))

    @property
    def main(self) -> Optional[FunctionDef]:
        for f in self.functions:
            if f.name == "main":
                return f
        return None

    def function(self, name: str) -> Optional[FunctionDef]:
        for i in self.items:
            if isinstance(i, FunctionDef) and i.name == name:
                return i
        return None


def body_statements(stmt: Stmt) -> tuple[Stmt, ...]:
    """Statements of a block, or the single statement itself."""
    return stmt.stmts if isinstance(stmt, Block) else (stmt,)
