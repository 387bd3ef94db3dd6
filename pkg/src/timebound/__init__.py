"""timebound: timing-constraint checking for a C subset.

Programs annotated with `//@` timing comments (timer definitions, resets,
timing assertions, and per-function worst-case durations) are translated
into plain C that manipulates explicit timer variables, and verified by an
exhaustive bounded exploration of every execution path.
"""

__version__ = "0.1.0"
