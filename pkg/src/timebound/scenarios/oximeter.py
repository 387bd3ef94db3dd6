"""Pulse-oximeter data-acquisition loop as an annotated MiniC program.

The device reads 3 packets of 25 five-byte frames per second over a
9600 bps serial link (375 bytes), checks the status byte (index 1) and the
checksum byte (index 4) of every frame, stores the heart-rate and SpO2
bytes from the first three frames of each packet, then averages, reads
back, displays, and logs both values. The deadline asserts that one full
acquisition round stays under a second of accumulated worst-case time.

Checksum errors are injected by the generated `checkSum` body. Two error
models are supported:

* ``deterministic-count`` (default): the earliest `floor(rate * 75)` frames
  fail; the program stays deterministic and verification explores a single
  path.
* ``nondet-placement``: each frame's failure is a nondeterministic choice,
  constrained so every path carries exactly `floor(rate * 75)` failures.
  Exhaustive over C(75, k) placements, so only practical for tiny counts.

The per-error cost model is a reconstruction: a failing frame pays the
error display plus, when `retry_on_checksum_error` is on (the default), a
re-read of its five bytes. The matrix report names the active model so the
reconstruction stays visible. Status errors are never injected; the status
branch exists but does not fire.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

# Worst-case execution times, microseconds.
WCET_TABLE: dict[str, int] = {
    "receiveSensorData": 1000,
    "checkStatus": 700,
    "printStatusError": 10000,
    "checkSum": 2000,
    "printCheckSumError": 10000,
    "storeHRMSB": 200,
    "storeHRLSB": 200,
    "storeSpO2": 200,
    "averageHR": 800,
    "averageSpO2": 800,
    "getHR": 200,
    "getSpO2": 200,
    "printHR": 5000,
    "printSpO2": 5000,
    "insertLog": 500,
}

ERROR_MODELS = ("deterministic-count", "nondet-placement")


@dataclass(frozen=True)
class OximeterSpec:
    packets: int = 3
    frames_per_packet: int = 25
    bytes_per_frame: int = 5
    wcet: dict[str, int] = field(default_factory=lambda: dict(WCET_TABLE))
    deadline: int = 1_000_000
    error_rate: Fraction = Fraction(0)
    error_model: str = "deterministic-count"
    retry_on_checksum_error: bool = True

    def __post_init__(self) -> None:
        if self.packets * self.frames_per_packet * self.bytes_per_frame != 375:
            raise ValueError("one second of data is 3 packets x 25 frames x 5 bytes = 375 bytes")
        if not (0 <= self.error_rate <= 1):
            raise ValueError("error_rate must be within [0, 1]")
        if self.error_model not in ERROR_MODELS:
            raise ValueError(f"error_model must be one of {ERROR_MODELS}")
        if self.deadline <= 0:
            raise ValueError("deadline must be positive")
        missing = set(WCET_TABLE) - set(self.wcet)
        if missing:
            raise ValueError(f"wcet table is missing {sorted(missing)}")

    @property
    def total_frames(self) -> int:
        return self.packets * self.frames_per_packet

    @property
    def error_count(self) -> int:
        """Flagged frames: floor(rate * frames), earliest-first when counted."""
        return int(self.error_rate * self.total_frames)


def gen_oximeter(spec: OximeterSpec) -> str:
    """Annotated source for one acquisition round with injected errors."""
    w = spec.wcet
    nerr = spec.error_count
    lines: list[str] = []
    out = lines.append
    out("//@ DEFINE-TIMER TIMER;")
    out("")
    out("int LINE1 = 1;")
    out("int LINE2 = 2;")
    out(f"int Byte[{spec.bytes_per_frame}];")
    out("int HR;")
    out("int SpO2;")
    out("int frame;")
    if spec.error_model == "nondet-placement":
        out("int errors;")
    out("")
    out(f"//@ WCET-FUNCTION [{w['receiveSensorData']}]")
    out("int receiveSensorData(void) {")
    out("  return 1;")
    out("}")
    out("")
    out(f"//@ WCET-FUNCTION [{w['checkStatus']}]")
    out("int checkStatus(int b) {")
    out("  return 0;")
    out("}")
    out("")
    out(f"//@ WCET-FUNCTION [{w['printStatusError']}]")
    out("void printStatusError(int line) {")
    out("}")
    out("")
    out(f"//@ WCET-FUNCTION [{w['checkSum']}]")
    out(f"int checkSum(int b[{spec.bytes_per_frame}]) {{")
    out("  int e;")
    if spec.error_model == "deterministic-count":
        out("  e = 0;")
        if nerr > 0:
            out(f"  if (frame < {nerr}) {{")
            out("    e = 1;")
            out("  }")
    else:
        out("  e = nondet_int(0, 1);")
        out(f"  assume(errors + e <= {nerr});")
        out(f"  assume(errors + e + ({spec.total_frames - 1} - frame) >= {nerr});")
        out("  errors = errors + e;")
    out("  return e;")
    out("}")
    out("")
    out(f"//@ WCET-FUNCTION [{w['printCheckSumError']}]")
    out("void printCheckSumError(int line) {")
    out("}")
    out("")
    for name, params in (
        ("storeHRMSB", "int b, int k"),
        ("storeHRLSB", "int b, int k"),
        ("storeSpO2", "int b, int k"),
    ):
        out(f"//@ WCET-FUNCTION [{w[name]}]")
        out(f"void {name}({params}) {{")
        out("}")
        out("")
    for name in ("averageHR", "averageSpO2"):
        out(f"//@ WCET-FUNCTION [{w[name]}]")
        out(f"void {name}(void) {{")
        out("}")
        out("")
    for name in ("getHR", "getSpO2"):
        out(f"//@ WCET-FUNCTION [{w[name]}]")
        out(f"int {name}(void) {{")
        out("  return 0;")
        out("}")
        out("")
    for name, params in (("printHR", "int line, int valueHR"), ("printSpO2", "int line, int valueSpO2")):
        out(f"//@ WCET-FUNCTION [{w[name]}]")
        out(f"void {name}({params}) {{")
        out("}")
        out("")
    out(f"//@ WCET-FUNCTION [{w['insertLog']}]")
    out("void insertLog(int value) {")
    out("}")
    out("")
    out("int main(void) {")
    out("  int i;")
    out("  int j;")
    out("  int k;")
    if spec.retry_on_checksum_error:
        out("  int m;")
    out("  //@ RESET-TIMER TIMER;")
    out(f"  for (k = 0; k < {spec.packets}; k++) {{")
    out(f"    for (j = 0; j < {spec.frames_per_packet}; j++) {{")
    out(f"      for (i = 0; i < {spec.bytes_per_frame}; i++) {{")
    out("        Byte[i] = receiveSensorData();")
    out("        if ((i == 1) && (checkStatus(Byte[i]))) {")
    out("          printStatusError(LINE1);")
    out("        }")
    out(f"        if ((i == {spec.bytes_per_frame - 1}) && (checkSum(Byte))) {{")
    out("          printCheckSumError(LINE2);")
    if spec.retry_on_checksum_error:
        out(f"          for (m = 0; m < {spec.bytes_per_frame}; m++) {{")
        out("            Byte[m] = receiveSensorData();")
        out("          }")
    out("        }")
    out("        if (i == 3) {")
    out("          if (j == 0) { storeHRMSB(Byte[i], k); }")
    out("          if (j == 1) { storeHRLSB(Byte[i], k); }")
    out("          if (j == 2) { storeSpO2(Byte[i], k); }")
    out("        }")
    out("      }")
    out("      frame = frame + 1;")
    out("    }")
    out("  }")
    out("  averageHR();")
    out("  averageSpO2();")
    out("  HR = getHR();")
    out("  SpO2 = getSpO2();")
    out("  printHR(LINE1, HR);")
    out("  printSpO2(LINE2, SpO2);")
    out("  insertLog(HR);")
    out("  insertLog(SpO2);")
    out(f"  //@ ASSERT-TIMER (TIMER < {spec.deadline});")
    out("  return 0;")
    out("}")
    return "\n".join(lines) + "\n"
