"""Flat integer encoding of formulas and single-world interpretation tables.

The evaluation kernels (`_kernels.pyx` and its fallback `_kernels_py.py`)
read only the arrays produced here.  A world table over domain size n is a
pair of rows: predicate bits (uint8) and function values (int32), each
symbol occupying n**arity consecutive cells indexed by the argument tuple in
big-endian base n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .syntax import (
    BinOp, Bottom, Eq, Exists, Forall, Formula, Iff, Implies, And, Or, Not, Pred, Top,
    Var, free_variables,
)

OP_VAR, OP_FUN = 0, 1
OP_PRED, OP_EQ, OP_NOT, OP_AND, OP_OR, OP_IMP, OP_IFF, OP_ALL, OP_EX, OP_TOP, OP_BOT = range(10, 21)

_BINOPS = {And: OP_AND, Or: OP_OR, Implies: OP_IMP, Iff: OP_IFF}


class Layout:
    """Cell offsets for a fixed symbol set and domain size."""

    def __init__(self, predicates: dict[str, int], functions: dict[str, int], n: int):
        self.n = n
        self.predicates = dict(sorted(predicates.items()))
        self.functions = dict(sorted(functions.items()))
        self.poff: dict[str, int] = {}
        self.foff: dict[str, int] = {}
        off = 0
        for name, arity in self.predicates.items():
            self.poff[name] = off
            off += n ** arity
        self.pwidth = max(off, 1)
        off = 0
        for name, arity in self.functions.items():
            self.foff[name] = off
            off += n ** arity
        self.fwidth = max(off, 1)

    def pcells(self, name: str) -> range:
        return range(self.poff[name], self.poff[name] + self.n ** self.predicates[name])

    def fcells(self, name: str) -> range:
        return range(self.foff[name], self.foff[name] + self.n ** self.functions[name])


@dataclass
class Program:
    op: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    argv: np.ndarray
    root: int
    nslots: int
    free: tuple[str, ...]


def compile_formula(f: Formula, layout: Layout, free: tuple[str, ...] | None = None) -> Program:
    """Encode f; free variables get slots 0..k-1 in the order of `free`."""
    if free is None:
        free = free_variables(f)
    op: list[int] = []
    a0: list[int] = []
    a1: list[int] = []
    a2: list[int] = []
    argv: list[int] = []
    nslots = [len(free)]

    def emit(o, x=0, y=0, z=0) -> int:
        op.append(o)
        a0.append(x)
        a1.append(y)
        a2.append(z)
        return len(op) - 1

    def term(t, env) -> int:
        if isinstance(t, Var):
            if t.name not in env:
                raise KeyError(f"unassigned variable {t.name!r}")
            return emit(OP_VAR, env[t.name])
        kids = [term(a, env) for a in t.args]
        start = len(argv)
        argv.extend(kids)
        return emit(OP_FUN, layout.foff[t.name], start, len(kids))

    def form(g, env) -> int:
        if isinstance(g, Pred):
            kids = [term(a, env) for a in g.args]
            start = len(argv)
            argv.extend(kids)
            return emit(OP_PRED, layout.poff[g.name], start, len(kids))
        if isinstance(g, Eq):
            return emit(OP_EQ, term(g.left, env), term(g.right, env))
        if isinstance(g, Not):
            return emit(OP_NOT, form(g.body, env))
        if isinstance(g, BinOp):
            return emit(_BINOPS[type(g)], form(g.left, env), form(g.right, env))
        if isinstance(g, (Forall, Exists)):
            slot = nslots[0]
            nslots[0] += 1
            body = form(g.body, {**env, g.var: slot})
            return emit(OP_ALL if isinstance(g, Forall) else OP_EX, slot, body)
        if isinstance(g, Top):
            return emit(OP_TOP)
        if isinstance(g, Bottom):
            return emit(OP_BOT)
        raise TypeError(f"not a formula: {g!r}")

    root = form(f, {v: i for i, v in enumerate(free)})
    if not argv:
        argv.append(0)
    as32 = lambda xs: np.ascontiguousarray(xs, dtype=np.int32)
    return Program(as32(op), as32(a0), as32(a1), as32(a2), as32(argv), root, nslots[0], tuple(free))


def mixed_radix(count: int, radices: list[int]) -> np.ndarray:
    """All digit vectors for `radices` in lexicographic order (last digit fastest)."""
    out = np.zeros((count, len(radices)), dtype=np.int32)
    idx = np.arange(count, dtype=np.int64)
    for j in range(len(radices) - 1, -1, -1):
        r = radices[j]
        out[:, j] = idx % r
        idx //= r
    return out
