# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution kernel: one path per call, int64 semantics.

Instruction-for-instruction equivalent to `pathvm.run_path` (the pure
Python kernel); the explorer can use either interchangeably. This kernel
only runs paths to completion - tracing and pausing stay in the pure
kernel, where counterexamples are rebuilt.
"""

import numpy as np

cimport numpy as cnp
from libc.string cimport memset

cdef extern from *:
    """
    static inline int tb_add_ovf(long long a, long long b, long long *r) {
        return __builtin_add_overflow(a, b, r);
    }
    static inline int tb_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    static inline int tb_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    """
    int tb_add_ovf(long long a, long long b, long long *r) nogil
    int tb_sub_ovf(long long a, long long b, long long *r) nogil
    int tb_mul_ovf(long long a, long long b, long long *r) nogil

# Opcodes; must match timebound.verify.ops.
cdef enum:
    OP_HALT = 0
    OP_PUSH = 1
    OP_POP = 2
    OP_LOADG = 3
    OP_STOREG = 4
    OP_LOADL = 5
    OP_STOREL = 6
    OP_LOADGA = 7
    OP_STOREGA = 8
    OP_LOADLA = 9
    OP_STORELA = 10
    OP_LOADPA = 11
    OP_STOREPA = 12
    OP_MKARG = 13
    OP_ADD = 14
    OP_SUB = 15
    OP_MUL = 16
    OP_DIV = 17
    OP_MOD = 18
    OP_NEG = 19
    OP_NOT = 20
    OP_LT = 21
    OP_LE = 22
    OP_GT = 23
    OP_GE = 24
    OP_EQ = 25
    OP_NE = 26
    OP_JMP = 27
    OP_JZ = 28
    OP_JNZ = 29
    OP_CALL = 30
    OP_RET = 31
    OP_RETV = 32
    OP_NONDET = 33
    OP_ASSERT = 34
    OP_ASSUME = 35
    OP_TINC = 36
    OP_TRESET = 37
    OP_UNWIND = 38
    OP_STMT = 39

cdef enum:
    ST_HALT = 0
    ST_VIOLATION = 1
    ST_ASSUME = 2
    ST_UNWIND = 3
    ST_NONDET_WIDE = 4
    ST_FAULT_DIV0 = 5
    ST_FAULT_OOB = 6
    ST_FAULT_OVERFLOW = 7
    ST_FAULT_TIMER = 8
    ST_FAULT_DOMAIN = 9
    ST_FAULT_CHOICE = 10
    ST_LIMIT = 11

DEF VALUE_STACK_SIZE = 4096
DEF MAX_CHOICES = 65536

cdef long long INT64_MIN = <long long>(-9223372036854775807LL - 1)
cdef long long HANDLE_MASK = <long long>0xFFFFFFFF


cdef class Runner:
    """Reusable workspace bound to one compiled program."""

    cdef cnp.int64_t[::1] code
    cdef cnp.int64_t[::1] func_entry
    cdef cnp.int64_t[::1] func_nlocals
    cdef cnp.int64_t[::1] global_init
    cdef long long timer_max
    cdef int n_globals, n_funcs, total_locals

    cdef cnp.int64_t[::1] g
    cdef cnp.int64_t[::1] locals_stack
    cdef cnp.int64_t[::1] stack
    cdef cnp.int64_t[::1] frame_ret
    cdef cnp.int64_t[::1] frame_base
    cdef cnp.int64_t[::1] choices_buf
    cdef cnp.int64_t[::1] domains_buf
    cdef cnp.int64_t[::1] choices_in_buf

    def __init__(self, code, insn_lines, func_entry, func_nargs, func_nlocals,
                 global_init, timer_slots, timer_max, total_locals):
        self.code = np.ascontiguousarray(code, dtype=np.int64)
        self.func_entry = np.ascontiguousarray(func_entry, dtype=np.int64)
        self.func_nlocals = np.ascontiguousarray(func_nlocals, dtype=np.int64)
        self.global_init = np.ascontiguousarray(global_init, dtype=np.int64)
        self.timer_max = timer_max
        self.n_globals = len(global_init)
        self.n_funcs = len(func_entry)
        self.total_locals = total_locals

        self.g = np.zeros(max(self.n_globals, 1), dtype=np.int64)
        self.locals_stack = np.zeros(total_locals + 1, dtype=np.int64)
        self.stack = np.zeros(VALUE_STACK_SIZE, dtype=np.int64)
        self.frame_ret = np.zeros(self.n_funcs + 2, dtype=np.int64)
        self.frame_base = np.zeros(self.n_funcs + 2, dtype=np.int64)
        self.choices_buf = np.zeros(MAX_CHOICES, dtype=np.int64)
        self.domains_buf = np.zeros(MAX_CHOICES, dtype=np.int64)
        self.choices_in_buf = np.zeros(MAX_CHOICES, dtype=np.int64)

    def run(self, choices, long long unwind, long long nondet_width):
        """Execute one path; returns (status, stop_pc, aux, choices, domains, finals, insns)."""
        cdef Py_ssize_t n_in = len(choices)
        cdef Py_ssize_t i
        if n_in > MAX_CHOICES:
            raise ValueError("too many input choices")
        for i in range(n_in):
            self.choices_in_buf[i] = choices[i]

        cdef cnp.int64_t[::1] code = self.code
        cdef cnp.int64_t[::1] g = self.g
        cdef cnp.int64_t[::1] locals_stack = self.locals_stack
        cdef cnp.int64_t[::1] stack = self.stack
        cdef cnp.int64_t[::1] frame_ret = self.frame_ret
        cdef cnp.int64_t[::1] frame_base = self.frame_base
        cdef cnp.int64_t[::1] choices_out = self.choices_buf
        cdef cnp.int64_t[::1] domains_out = self.domains_buf
        cdef cnp.int64_t[::1] choices_in = self.choices_in_buf
        cdef long long timer_max = self.timer_max

        for i in range(self.n_globals):
            g[i] = self.global_init[i]

        cdef long long pc = 0, insns = 0
        cdef int sp = 0, fp = 0
        cdef long long lb = 0
        cdef Py_ssize_t nch = 0, ci = 0
        cdef int max_frames = self.n_funcs + 2

        cdef long long op, a, b, v, x, d, lo, hi, idx, handle, abase, asize
        cdef long long base, nlocals, newbase, nargs
        cdef int status = -1
        cdef long long stop_pc = 0, aux = -1

        with nogil:
            while True:
                base = 3 * pc
                op = code[base]
                a = code[base + 1]
                b = code[base + 2]
                insns += 1

                if op == OP_PUSH:
                    stack[sp] = a
                    sp += 1
                    if sp >= VALUE_STACK_SIZE:
                        status = ST_LIMIT; stop_pc = pc; break
                elif op == OP_LOADG:
                    stack[sp] = g[a]
                    sp += 1
                    if sp >= VALUE_STACK_SIZE:
                        status = ST_LIMIT; stop_pc = pc; break
                elif op == OP_STOREG:
                    sp -= 1
                    g[a] = stack[sp]
                elif op == OP_LOADL:
                    stack[sp] = locals_stack[frame_base[fp - 1] + a]
                    sp += 1
                    if sp >= VALUE_STACK_SIZE:
                        status = ST_LIMIT; stop_pc = pc; break
                elif op == OP_STOREL:
                    sp -= 1
                    locals_stack[frame_base[fp - 1] + a] = stack[sp]
                elif op == OP_ADD:
                    sp -= 1
                    if tb_add_ovf(stack[sp - 1], stack[sp], &v):
                        status = ST_FAULT_OVERFLOW; stop_pc = pc; break
                    stack[sp - 1] = v
                elif op == OP_SUB:
                    sp -= 1
                    if tb_sub_ovf(stack[sp - 1], stack[sp], &v):
                        status = ST_FAULT_OVERFLOW; stop_pc = pc; break
                    stack[sp - 1] = v
                elif op == OP_MUL:
                    sp -= 1
                    if tb_mul_ovf(stack[sp - 1], stack[sp], &v):
                        status = ST_FAULT_OVERFLOW; stop_pc = pc; break
                    stack[sp - 1] = v
                elif op == OP_DIV or op == OP_MOD:
                    sp -= 1
                    d = stack[sp]
                    x = stack[sp - 1]
                    if d == 0:
                        status = ST_FAULT_DIV0; stop_pc = pc; break
                    if x == INT64_MIN and d == -1:
                        status = ST_FAULT_OVERFLOW; stop_pc = pc; break
                    if op == OP_DIV:
                        stack[sp - 1] = x / d
                    else:
                        stack[sp - 1] = x % d
                elif op == OP_NEG:
                    if stack[sp - 1] == INT64_MIN:
                        status = ST_FAULT_OVERFLOW; stop_pc = pc; break
                    stack[sp - 1] = -stack[sp - 1]
                elif op == OP_NOT:
                    stack[sp - 1] = 1 if stack[sp - 1] == 0 else 0
                elif op == OP_LT:
                    sp -= 1
                    stack[sp - 1] = 1 if stack[sp - 1] < stack[sp] else 0
                elif op == OP_LE:
                    sp -= 1
                    stack[sp - 1] = 1 if stack[sp - 1] <= stack[sp] else 0
                elif op == OP_GT:
                    sp -= 1
                    stack[sp - 1] = 1 if stack[sp - 1] > stack[sp] else 0
                elif op == OP_GE:
                    sp -= 1
                    stack[sp - 1] = 1 if stack[sp - 1] >= stack[sp] else 0
                elif op == OP_EQ:
                    sp -= 1
                    stack[sp - 1] = 1 if stack[sp - 1] == stack[sp] else 0
                elif op == OP_NE:
                    sp -= 1
                    stack[sp - 1] = 1 if stack[sp - 1] != stack[sp] else 0
                elif op == OP_JMP:
                    pc = a
                    continue
                elif op == OP_JZ:
                    sp -= 1
                    if stack[sp] == 0:
                        pc = a
                        continue
                elif op == OP_JNZ:
                    sp -= 1
                    if stack[sp] != 0:
                        pc = a
                        continue
                elif op == OP_CALL:
                    if fp >= max_frames:
                        status = ST_LIMIT; stop_pc = pc; break
                    nlocals = self.func_nlocals[a]
                    newbase = lb
                    for i in range(nlocals):
                        locals_stack[newbase + i] = 0
                    nargs = b
                    for i in range(nargs):
                        locals_stack[newbase + i] = stack[sp - nargs + i]
                    sp -= <int>nargs
                    frame_ret[fp] = pc + 1
                    frame_base[fp] = newbase
                    fp += 1
                    lb = newbase + nlocals
                    pc = self.func_entry[a]
                    continue
                elif op == OP_RET or op == OP_RETV:
                    fp -= 1
                    lb = frame_base[fp]
                    pc = frame_ret[fp]
                    continue
                elif op == OP_NONDET:
                    sp -= 2
                    lo = stack[sp]
                    hi = stack[sp + 1]
                    if hi < lo:
                        status = ST_FAULT_DOMAIN; stop_pc = pc; break
                    if hi - lo + 1 > nondet_width:
                        status = ST_NONDET_WIDE; stop_pc = pc; break
                    if nch >= MAX_CHOICES:
                        status = ST_LIMIT; stop_pc = pc; break
                    if ci < n_in:
                        v = choices_in[ci]
                        if v < lo or v > hi:
                            status = ST_FAULT_CHOICE; stop_pc = pc; break
                    else:
                        v = lo
                    ci += 1
                    choices_out[nch] = v
                    domains_out[nch] = hi
                    nch += 1
                    stack[sp] = v
                    sp += 1
                elif op == OP_ASSERT:
                    sp -= 1
                    if stack[sp] == 0:
                        status = ST_VIOLATION; stop_pc = pc; aux = a; break
                elif op == OP_ASSUME:
                    sp -= 1
                    if stack[sp] == 0:
                        status = ST_ASSUME; stop_pc = pc; break
                elif op == OP_TINC:
                    sp -= 1
                    if tb_add_ovf(g[a], stack[sp], &v):
                        status = ST_FAULT_TIMER; stop_pc = pc; break
                    if v > timer_max or v < 0:
                        status = ST_FAULT_TIMER; stop_pc = pc; break
                    g[a] = v
                elif op == OP_TRESET:
                    g[a] = 0
                elif op == OP_UNWIND:
                    locals_stack[frame_base[fp - 1] + a] += 1
                    if locals_stack[frame_base[fp - 1] + a] > unwind:
                        status = ST_UNWIND; stop_pc = pc; aux = b; break
                elif op == OP_LOADGA:
                    idx = stack[sp - 1]
                    if idx < 0 or idx >= b:
                        status = ST_FAULT_OOB; stop_pc = pc; break
                    stack[sp - 1] = g[a + idx]
                elif op == OP_STOREGA:
                    sp -= 2
                    idx = stack[sp]
                    if idx < 0 or idx >= b:
                        status = ST_FAULT_OOB; stop_pc = pc; break
                    g[a + idx] = stack[sp + 1]
                elif op == OP_LOADLA:
                    idx = stack[sp - 1]
                    if idx < 0 or idx >= b:
                        status = ST_FAULT_OOB; stop_pc = pc; break
                    stack[sp - 1] = locals_stack[frame_base[fp - 1] + a + idx]
                elif op == OP_STORELA:
                    sp -= 2
                    idx = stack[sp]
                    if idx < 0 or idx >= b:
                        status = ST_FAULT_OOB; stop_pc = pc; break
                    locals_stack[frame_base[fp - 1] + a + idx] = stack[sp + 1]
                elif op == OP_LOADPA:
                    handle = locals_stack[frame_base[fp - 1] + a]
                    abase = handle >> 32
                    asize = handle & HANDLE_MASK
                    idx = stack[sp - 1]
                    if idx < 0 or idx >= asize:
                        status = ST_FAULT_OOB; stop_pc = pc; break
                    stack[sp - 1] = g[abase + idx]
                elif op == OP_STOREPA:
                    handle = locals_stack[frame_base[fp - 1] + a]
                    abase = handle >> 32
                    asize = handle & HANDLE_MASK
                    sp -= 2
                    idx = stack[sp]
                    if idx < 0 or idx >= asize:
                        status = ST_FAULT_OOB; stop_pc = pc; break
                    g[abase + idx] = stack[sp + 1]
                elif op == OP_MKARG:
                    stack[sp] = (a << 32) | b
                    sp += 1
                    if sp >= VALUE_STACK_SIZE:
                        status = ST_LIMIT; stop_pc = pc; break
                elif op == OP_STMT:
                    pass
                elif op == OP_POP:
                    sp -= 1
                elif op == OP_HALT:
                    status = ST_HALT; stop_pc = pc; break
                else:
                    status = ST_LIMIT; stop_pc = pc; break
                pc += 1

        out_choices = [choices_out[i] for i in range(nch)]
        out_domains = [domains_out[i] for i in range(nch)]
        finals = [g[i] for i in range(self.n_globals)]
        return (status, int(stop_pc), int(aux), out_choices, out_domains, finals, int(insns))
