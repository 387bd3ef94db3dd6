"""Opcodes and status codes shared by the bytecode compiler and both kernels.

Instructions are fixed-width triples (op, a, b) stored in a flat int64
array; a parallel array maps each instruction to its source line. The pure
Python kernel and the compiled kernel implement identical semantics over
this encoding, so either can drive the explorer.
"""

HALT = 0
PUSH = 1
POP = 2
LOADG = 3      # a = global slot
STOREG = 4
LOADL = 5      # a = frame-relative local slot
STOREL = 6
LOADGA = 7     # a = global base, b = size; pops index
STOREGA = 8    # pops value, then index
LOADLA = 9     # a = frame-relative base, b = size
STORELA = 10
LOADPA = 11    # a = local slot holding an array handle; pops index
STOREPA = 12
MKARG = 13     # a = global base, b = size; pushes array handle
ADD = 14
SUB = 15
MUL = 16
DIV = 17
MOD = 18
NEG = 19
NOT = 20
LT = 21
LE = 22
GT = 23
GE = 24
EQ = 25
NE = 26
JMP = 27       # a = target instruction index
JZ = 28
JNZ = 29
CALL = 30      # a = function index, b = argument count
RET = 31       # void return, leaves nothing on the stack
RETV = 32      # returns with the top of stack as the call's value
NONDET = 33    # a = nondet site id; pops hi, then lo; pushes chosen value
ASSERT = 34    # a = assert site id; pops condition
ASSUME = 35    # pops condition; zero abandons the path
TINC = 36      # a = timer global slot; pops increment; width-checked
TRESET = 37    # a = timer global slot
UNWIND = 38    # a = counter local slot, b = loop site id
STMT = 39      # no-op marker at each source-statement start (stepping)

OP_NAMES = {
    v: k
    for k, v in list(globals().items())
    if isinstance(v, int) and k.isupper() and not k.startswith("ST_")
}

# Path termination statuses reported by the kernels.
ST_HALT = 0            # main returned; path complete
ST_VIOLATION = 1       # an assert evaluated to zero (aux = assert site)
ST_ASSUME = 2          # an assume evaluated to zero; path abandoned
ST_UNWIND = 3          # loop exceeded the unwind bound (aux = loop site)
ST_NONDET_WIDE = 4     # nondet domain larger than the configured width
ST_FAULT_DIV0 = 5      # division or modulo by zero
ST_FAULT_OOB = 6       # array index out of bounds
ST_FAULT_OVERFLOW = 7  # 64-bit signed arithmetic overflow
ST_FAULT_TIMER = 8     # timer exceeded the configured timer width
ST_FAULT_DOMAIN = 9    # nondet range with hi < lo
ST_FAULT_CHOICE = 10   # replayed choice outside its site's domain
ST_LIMIT = 11          # internal stack or choice-buffer limit exceeded
ST_PAUSED = 12         # pure kernel only: statement limit reached
ST_NEED_CHOICE = 13    # pure kernel only: fresh nondet hit in pause mode

FAULT_MESSAGES = {
    ST_FAULT_DIV0: "division by zero",
    ST_FAULT_OOB: "array index out of bounds",
    ST_FAULT_OVERFLOW: "arithmetic overflow beyond 64-bit range",
    ST_FAULT_TIMER: "timer overflow beyond configured width",
    ST_FAULT_DOMAIN: "nondet_int range is empty (hi < lo)",
    ST_FAULT_CHOICE: "replayed choice outside the nondet domain",
    ST_LIMIT: "internal evaluation limit exceeded",
}

VALUE_STACK_SIZE = 4096
MAX_CHOICES = 65536
INT64_MIN = -(1 << 63)
INT64_MAX = (1 << 63) - 1
