"""Bridge-crossing puzzle as an annotated MiniC program.

Four people cross a narrow bridge at night with one lamp; at most two cross
at a time (at the slower person's speed) and someone must carry the lamp
back. The generated program keeps each person's side and the lamp side as
state, picks the crossing pair and the returner nondeterministically
(invalid picks are pruned with assume), and accumulates elapsed time in the
timer `__timing__` by calling a per-person crossing function whose
worst-case duration is that person's crossing time: the pair's cost is the
slower member's function, which is the max since crossing times are sorted.

For four people every run is exactly three pair-crossings with two returns
in between, so the loop is statically bounded and the explorer enumerates
every legal schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

_COMPARISONS = ("<", "<=", ">", ">=")


@dataclass(frozen=True)
class BridgeSpec:
    crossing_times: tuple[int, int, int, int]
    deadline: int
    comparison: str = "<"

    def __post_init__(self) -> None:
        t = self.crossing_times
        if len(t) != 4 or any(x <= 0 for x in t):
            raise ValueError("crossing_times must be 4 positive integers")
        if list(t) != sorted(t):
            raise ValueError("crossing_times must be sorted ascending")
        if self.comparison not in _COMPARISONS:
            raise ValueError(f"comparison must be one of {_COMPARISONS}")


def gen_bridge(spec: BridgeSpec, strategy: str = "free") -> str:
    """Annotated source for the puzzle.

    `strategy="fastest_ferries"` restricts schedules to the obvious one
    where the fastest person accompanies every crossing and always returns
    with the lamp.
    """
    if strategy not in ("free", "fastest_ferries"):
        raise ValueError(f"unknown strategy {strategy!r}")
    t = spec.crossing_times
    lines: list[str] = []
    out = lines.append
    out("//@ DEFINE-TIMER __timing__;")
    out("")
    out("int side[4];")
    out("int lamp;")
    out("")
    for i in range(4):
        out(f"//@ WCET-FUNCTION [{t[i]}]")
        out(f"void cross_p{i + 1}(void) {{")
        out("}")
        out("")
    out("int main(void) {")
    out("  int a;")
    out("  int b;")
    out("  int r;")
    out("  //@ RESET-TIMER __timing__;")
    out("  while (side[0] + side[1] + side[2] + side[3] < 4) {")
    out("    a = nondet_int(0, 3);")
    out("    b = nondet_int(0, 3);")
    out("    assume(a < b);")
    if strategy == "fastest_ferries":
        out("    assume(a == 0);")
    out("    assume(side[a] == 0);")
    out("    assume(side[b] == 0);")
    out("    assume(lamp == 0);")
    out("    side[a] = 1;")
    out("    side[b] = 1;")
    out("    lamp = 1;")
    for i in range(1, 4):
        out(f"    if (b == {i}) {{ cross_p{i + 1}(); }}")
    out("    if (side[0] + side[1] + side[2] + side[3] < 4) {")
    out("      r = nondet_int(0, 3);")
    out("      assume(side[r] == 1);")
    if strategy == "fastest_ferries":
        out("      assume(r == 0);")
    out("      side[r] = 0;")
    out("      lamp = 0;")
    for i in range(4):
        out(f"      if (r == {i}) {{ cross_p{i + 1}(); }}")
    out("    }")
    out("  }")
    out(f"  //@ ASSERT-TIMER (__timing__ {spec.comparison} {spec.deadline});")
    out("  return 0;")
    out("}")
    return "\n".join(lines) + "\n"


def gen_bridge_unconstrained(times: tuple[int, int, int, int], strategy: str = "free") -> str:
    """Variant whose final assertion always holds, for minimum-time queries."""
    return gen_bridge(BridgeSpec(times, 0, ">="), strategy)
