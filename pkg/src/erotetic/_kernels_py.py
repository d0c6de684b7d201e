"""Pure-Python twin of `_kernels.truth_table`; same signature and output.

The program arrays are turned into nested closures once per call, then run
against each world table.
"""

from __future__ import annotations

import numpy as np

from ._program import (
    OP_ALL, OP_AND, OP_EQ, OP_EX, OP_IFF, OP_IMP, OP_NOT, OP_OR, OP_PRED, OP_TOP, OP_VAR,
)


def _build(op, a0, a1, a2, argv, n):
    def term(node):
        k = op[node]
        if k == OP_VAR:
            s = a0[node]
            return lambda env, pt, ft: env[s]
        off = a0[node]
        kids = [term(argv[a1[node] + i]) for i in range(a2[node])]
        if not kids:
            return lambda env, pt, ft: ft[off]
        if len(kids) == 1:
            (g,) = kids
            return lambda env, pt, ft: ft[off + g(env, pt, ft)]

        def app(env, pt, ft):
            idx = 0
            for g in kids:
                idx = idx * n + g(env, pt, ft)
            return ft[off + idx]

        return app

    def form(node):
        k = op[node]
        if k == OP_PRED:
            off = a0[node]
            kids = [term(argv[a1[node] + i]) for i in range(a2[node])]
            if not kids:
                return lambda env, pt, ft: pt[off] != 0
            if len(kids) == 1:
                (g,) = kids
                return lambda env, pt, ft: pt[off + g(env, pt, ft)] != 0

            def pred(env, pt, ft):
                idx = 0
                for g in kids:
                    idx = idx * n + g(env, pt, ft)
                return pt[off + idx] != 0

            return pred
        if k == OP_EQ:
            l, r = term(a0[node]), term(a1[node])
            return lambda env, pt, ft: l(env, pt, ft) == r(env, pt, ft)
        if k == OP_NOT:
            b = form(a0[node])
            return lambda env, pt, ft: not b(env, pt, ft)
        if k in (OP_AND, OP_OR, OP_IMP, OP_IFF):
            l, r = form(a0[node]), form(a1[node])
            if k == OP_AND:
                return lambda env, pt, ft: l(env, pt, ft) and r(env, pt, ft)
            if k == OP_OR:
                return lambda env, pt, ft: l(env, pt, ft) or r(env, pt, ft)
            if k == OP_IMP:
                return lambda env, pt, ft: (not l(env, pt, ft)) or r(env, pt, ft)
            return lambda env, pt, ft: l(env, pt, ft) == r(env, pt, ft)
        if k in (OP_ALL, OP_EX):
            slot = a0[node]
            body = form(a1[node])
            want = k == OP_ALL

            def quant(env, pt, ft):
                saved = env[slot]
                result = want
                for e in range(n):
                    env[slot] = e
                    if bool(body(env, pt, ft)) != want:
                        result = not want
                        break
                env[slot] = saved
                return result

            return quant
        if k == OP_TOP:
            return lambda env, pt, ft: True
        return lambda env, pt, ft: False

    return form


def truth_table(op, a0, a1, a2, argv, root, nslots, nfree, n, ptabs, ftabs):
    rows = ptabs.shape[0]
    total = n ** nfree
    out = np.zeros((rows, total), dtype=np.uint8)
    if rows == 0:
        return out
    fn = _build(op.tolist(), a0.tolist(), a1.tolist(), a2.tolist(), argv.tolist(), n)(root)
    env = [0] * (nslots + 1)
    assignments = []
    for a in range(total):
        digits = []
        rest = a
        for _ in range(nfree):
            digits.append(rest % n)
            rest //= n
        assignments.append(digits[::-1])
    plist = ptabs.tolist()
    flist = ftabs.tolist()
    for w in range(rows):
        pt, ft = plist[w], flist[w]
        row = out[w]
        for a, digits in enumerate(assignments):
            env[:nfree] = digits
            row[a] = 1 if fn(env, pt, ft) else 0
    return out
