"""Compare the compiled and pure-Python evaluation kernels.

    python3 benchmarks/bench_kernels.py [--domain 3] [--repeat 5]

Each formula is evaluated in every world table of a small signature (all
interpretations of the world-dependent symbols for one rigid choice), which
is the inner loop of the countermodel search.
"""

import argparse
import math
import time

import numpy as np

from erotetic import kernels
from erotetic._program import Layout, compile_formula, mixed_radix
from erotetic.semantics import _rigid_radices, _tables, _world_radices
from erotetic.syntax import Signature, parse_formula

SIG = Signature.build({"P": 1, "R": 2}, rigid={"a": 0, "b": 0}, nonrigid={"d": 0})
FORMULAS = [
    "P(x)",
    "forall x. (P(x) -> x = a)",
    "exists x. exists y. (R(x, y) & ~x = y)",
    "forall x. exists y. (R(x, y) <-> P(d))",
    "forall x. forall y. forall z. (R(x, y) & R(y, z) -> R(x, z))",
]


def setup(n):
    layout = Layout(dict(SIG.predicates), {k: f.arity for k, f in SIG.functions.items()}, n)
    wr, rr = _world_radices(SIG, n), _rigid_radices(SIG, n)
    rows = mixed_radix(math.prod(wr), wr)
    rigid = mixed_radix(math.prod(rr), rr)[-1]
    ptabs, ftabs = _tables(SIG, layout, rigid, rows)
    return layout, ptabs, ftabs


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--domain", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    layout, ptabs, ftabs = setup(args.domain)
    backends = sorted(kernels.BACKENDS)
    print(f"domain {args.domain}, {len(ptabs)} world tables, backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("compiled kernel not built; only the fallback is timed")
    print(f"{'formula':62} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for text in FORMULAS:
        prog = compile_formula(parse_formula(text, SIG), layout)
        results, times = {}, {}
        for b in backends:
            results[b] = kernels.truth_table(prog, args.domain, ptabs, ftabs, backend=b)
            times[b] = best_of(lambda: kernels.truth_table(prog, args.domain, ptabs, ftabs, backend=b),
                               args.repeat)
        ref = results["python"]
        assert all(np.array_equal(ref, r) for r in results.values()), text
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else ""
        print(f"{text:62} " + " ".join(f"{times[b] * 1e3:8.2f}ms" for b in backends) + "  " + speed)


if __name__ == "__main__":
    main()
