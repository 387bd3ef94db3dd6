"""Tokenizer for the MiniC subset plus `//@` annotation comments.

Annotation comments are ordinary line comments whose text starts with the
exact prefix `//@`; they are always kept as tokens. Plain line comments can
be kept or skipped via a flag (instrumented output echoes consumed
annotations as plain comments, and later stages recover timer names from
those echoes). Block comments are always skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from timebound.diagnostics import LexError, Loc, SourceUnit

KEYWORDS = frozenset(
    {
        "void",
        "int",
        "unsigned",
        "char",
        "if",
        "else",
        "for",
        "while",
        "return",
        "assert",
        "assume",
        "extern",
    }
)

PUNCTUATION = (
    "++", "--", "+=", "-=", "&&", "||",
    "<=", ">=", "==", "!=",
    "(", ")", "{", "}", "[", "]", ";", ",",
    "<", ">", "=", "+", "-", "*", "/", "%", "!",
)


class TokenKind(Enum):
    IDENT = "identifier"
    INT = "integer-literal"
    STRING = "string-literal"
    KEYWORD = "keyword"
    PUNCT = "punctuation"
    ANNOTATION = "annotation-comment"
    COMMENT = "plain-comment"
    EOF = "end-of-input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    loc: Loc = field(compare=False)

    def is_punct(self, text: str) -> bool:
        return self.kind is TokenKind.PUNCT and self.lexeme == text

    def is_keyword(self, text: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.lexeme == text

    def __str__(self) -> str:
        if self.kind is TokenKind.EOF:
            return "end of input"
        return repr(self.lexeme)


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\n]+)
    | (?P<block>/\*.*?\*/)
    | (?P<badblock>/\*)
    | (?P<line>//[^\n]*)
    | (?P<int>[0-9]+)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    | (?P<string>"(?:[^"\\\n]|\\.)*")
    | (?P<punct>%s)
    """
    % "|".join(re.escape(p) for p in PUNCTUATION),
    re.VERBOSE | re.DOTALL,
)


def tokenize(src: SourceUnit, keep_comments: bool = True) -> list[Token]:
    """Tokenize `src`, ending with a single EOF token.

    Raises LexError on illegal characters and unterminated block comments.
    """
    tokens: list[Token] = []
    pos = 0
    text = src.text
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise LexError(f"illegal character {text[pos]!r}", src.loc(pos), src.path)
        loc = src.loc(pos)
        lexeme = m.group(0)
        group = m.lastgroup
        if group == "badblock":
            raise LexError("unterminated block comment", loc, src.path)
        if group == "ws" or group == "block":
            pass
        elif group == "line":
            if lexeme.startswith("//@"):
                tokens.append(Token(TokenKind.ANNOTATION, lexeme, loc))
            elif keep_comments:
                tokens.append(Token(TokenKind.COMMENT, lexeme, loc))
        elif group == "int":
            tokens.append(Token(TokenKind.INT, lexeme, loc))
        elif group == "ident":
            kind = TokenKind.KEYWORD if lexeme in KEYWORDS else TokenKind.IDENT
            tokens.append(Token(kind, lexeme, loc))
        elif group == "string":
            tokens.append(Token(TokenKind.STRING, lexeme, loc))
        else:
            tokens.append(Token(TokenKind.PUNCT, lexeme, loc))
        pos = m.end()
    tokens.append(Token(TokenKind.EOF, "", src.loc(n)))
    return tokens
