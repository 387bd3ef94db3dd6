"""Conditional inclusion: `#if FLAG` / `#else` / `#endif` with CLI-supplied flags.

No macro expansion. Inactive lines and the directive lines themselves are
blanked rather than removed so every surviving token keeps its original
line number. `#ifdef`/`#ifndef` are accepted as synonyms for `#if FLAG`
and its negation.
"""

from __future__ import annotations

import re

from timebound.diagnostics import Loc, PreprocessError

_DIRECTIVE_RE = re.compile(r"^\s*#\s*(\w+)\s*(.*?)\s*$")


def preprocess(text: str, defines: frozenset[str] | set[str] = frozenset(), path: str = "<input>") -> str:
    """Resolve conditional-inclusion directives against `defines`.

    Returns text of identical line count with inactive regions blanked.
    """
    defines = frozenset(defines)
    out: list[str] = []
    # Stack of (taken_branch_active, else_seen, directive_line).
    stack: list[list] = []
    for lineno, line in enumerate(text.splitlines(keepends=True), start=1):
        stripped = line.rstrip("\n").rstrip("\r")
        m = _DIRECTIVE_RE.match(stripped) if stripped.lstrip().startswith("#") else None
        active = all(frame[0] for frame in stack)
        if m is None:
            out.append(line if active else _blank(line))
            continue
        name, arg = m.group(1), m.group(2)
        if name in ("if", "ifdef", "ifndef"):
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", arg or ""):
                raise PreprocessError(f"#{name} expects a flag name", Loc(lineno, 1), path)
            cond = arg in defines
            if name == "ifndef":
                cond = not cond
            stack.append([cond, False, lineno])
        elif name == "else":
            if not stack or stack[-1][1]:
                raise PreprocessError("#else without matching #if", Loc(lineno, 1), path)
            stack[-1][0] = not stack[-1][0]
            stack[-1][1] = True
        elif name == "endif":
            if not stack:
                raise PreprocessError("#endif without matching #if", Loc(lineno, 1), path)
            stack.pop()
        else:
            raise PreprocessError(f"unsupported preprocessor directive #{name}", Loc(lineno, 1), path)
        out.append(_blank(line))
    if stack:
        raise PreprocessError("unterminated #if", Loc(stack[-1][2], 1), path)
    return "".join(out)


def _blank(line: str) -> str:
    body = line.rstrip("\n").rstrip("\r")
    tail = line[len(body):]
    return tail
