# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled evaluation of encoded formulas over batches of world tables."""

import numpy as np
from libc.stdlib cimport malloc, free

cdef enum:
    OP_VAR = 0
    OP_FUN = 1
    OP_PRED = 10
    OP_EQ = 11
    OP_NOT = 12
    OP_AND = 13
    OP_OR = 14
    OP_IMP = 15
    OP_IFF = 16
    OP_ALL = 17
    OP_EX = 18
    OP_TOP = 19


cdef struct Ctx:
    const int* op
    const int* a0
    const int* a1
    const int* a2
    const int* argv
    const unsigned char* ptab
    const int* ftab
    int* env
    int n


cdef int eval_term(Ctx* c, int node) nogil:
    if c.op[node] == OP_VAR:
        return c.env[c.a0[node]]
    cdef int idx = 0
    cdef int i
    cdef int start = c.a1[node]
    for i in range(c.a2[node]):
        idx = idx * c.n + eval_term(c, c.argv[start + i])
    return c.ftab[c.a0[node] + idx]


cdef bint eval_form(Ctx* c, int node) nogil:
    cdef int k = c.op[node]
    cdef int i, idx, start, slot, saved, e
    cdef bint r
    if k == OP_PRED:
        idx = 0
        start = c.a1[node]
        for i in range(c.a2[node]):
            idx = idx * c.n + eval_term(c, c.argv[start + i])
        return c.ptab[c.a0[node] + idx] != 0
    elif k == OP_EQ:
        return eval_term(c, c.a0[node]) == eval_term(c, c.a1[node])
    elif k == OP_NOT:
        return not eval_form(c, c.a0[node])
    elif k == OP_AND:
        return eval_form(c, c.a0[node]) and eval_form(c, c.a1[node])
    elif k == OP_OR:
        return eval_form(c, c.a0[node]) or eval_form(c, c.a1[node])
    elif k == OP_IMP:
        return (not eval_form(c, c.a0[node])) or eval_form(c, c.a1[node])
    elif k == OP_IFF:
        return eval_form(c, c.a0[node]) == eval_form(c, c.a1[node])
    elif k == OP_ALL or k == OP_EX:
        slot = c.a0[node]
        saved = c.env[slot]
        r = (k == OP_ALL)
        for e in range(c.n):
            c.env[slot] = e
            if eval_form(c, c.a1[node]) != (k == OP_ALL):
                r = not r
                break
        c.env[slot] = saved
        return r
    elif k == OP_TOP:
        return True
    return False


def truth_table(const int[::1] op, const int[::1] a0, const int[::1] a1, const int[::1] a2,
                const int[::1] argv, int root, int nslots, int nfree, int n,
                const unsigned char[:, ::1] ptabs, const int[:, ::1] ftabs):
    """uint8 array [rows, n**nfree]: truth of the program in each world table
    under each assignment to the free slots (first slot most significant)."""
    cdef Py_ssize_t rows = ptabs.shape[0]
    cdef Py_ssize_t total = 1
    cdef int j
    for j in range(nfree):
        total *= n
    out = np.zeros((rows, total), dtype=np.uint8)
    cdef unsigned char[:, ::1] o = out
    if rows == 0:
        return out
    cdef Ctx c
    cdef int* env = <int*> malloc((nslots + 1) * sizeof(int))
    if env == NULL:
        raise MemoryError()
    cdef Py_ssize_t w, a, rest
    c.op = &op[0]
    c.a0 = &a0[0]
    c.a1 = &a1[0]
    c.a2 = &a2[0]
    c.argv = &argv[0]
    c.env = env
    c.n = n
    try:
        with nogil:
            for w in range(rows):
                c.ptab = &ptabs[w, 0]
                c.ftab = &ftabs[w, 0]
                for a in range(total):
                    rest = a
                    for j in range(nfree - 1, -1, -1):
                        env[j] = <int> (rest % n)
                        rest = rest // n
                    o[w, a] = eval_form(&c, root)
    finally:
        free(env)
    return out
