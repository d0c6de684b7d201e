import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from erotetic.syntax import (
    And, Bottom, Eq, Exists, Forall, Func, Iff, Implies, Not, Or, Pred, Signature, Top, Var,
    parse_formula,
)

sys.path.insert(0, str(Path(__file__).parent))

# one unary predicate, two rigid constants and one non-rigid constant
MONADIC = Signature.build({"P": 1}, rigid={"a": 0, "b": 0}, nonrigid={"d": 0})
PROP = Signature.build({"p": 0, "q": 0})
PARTY = Signature.build({"I": 1, "P": 1, "L": 1, "F": 1, "R": 0},
                        rigid={"j": 0, "c": 0, "s": 0}, nonrigid={"m": 1, "d": 0})


def parse(text, sig=PARTY, internal=False):
    return parse_formula(text, sig, internal=internal)


@pytest.fixture
def party():
    return PARTY


@pytest.fixture
def monadic():
    return MONADIC


# ---------------------------------------------------------------------------
# random formulas over MONADIC plus a binary predicate R and unary function g

RICH = Signature.build({"P": 1, "R": 2, "p": 0}, rigid={"a": 0, "b": 0, "g": 1},
                       nonrigid={"d": 0, "h": 1})
VARS = ("x", "y", "z")


def terms(sig=RICH, depth=1):
    leaves = [st.sampled_from(VARS).map(Var)]
    consts = sorted(n for n, f in sig.functions.items() if f.arity == 0)
    if consts:
        leaves.append(st.sampled_from(consts).map(lambda n: Func(n, ())))
    base = st.one_of(leaves)
    unary = sorted(n for n, f in sig.functions.items() if f.arity == 1)
    if depth == 0 or not unary:
        return base
    return st.one_of(base, st.tuples(st.sampled_from(unary), terms(sig, depth - 1))
                     .map(lambda p: Func(p[0], (p[1],))))


def atoms(sig=RICH):
    choices = [st.just(Top()), st.just(Bottom()),
               st.tuples(terms(sig), terms(sig)).map(lambda p: Eq(*p))]
    for name, arity in sorted(sig.predicates.items()):
        choices.append(st.tuples(*[terms(sig)] * arity).map(lambda args, n=name: Pred(n, tuple(args))))
    return st.one_of(choices)


def formulas(sig=RICH, max_leaves=6):
    def extend(children):
        return st.one_of(
            children.map(Not),
            st.tuples(st.sampled_from([And, Or, Implies, Iff]), children, children)
            .map(lambda p: p[0](p[1], p[2])),
            st.tuples(st.sampled_from([Forall, Exists]), st.sampled_from(VARS), children)
            .map(lambda p: p[0](p[1], p[2])),
        )
    return st.recursive(atoms(sig), extend, max_leaves=max_leaves)


def random_structure(sig, worlds, n, rng):
    """Uniformly random structure (test data, independent of the enumerator)."""
    import itertools

    from erotetic.semantics import ModalStructure

    dom = [f"e{i}" for i in range(n)]
    rigid = {name: [[list(args), rng.choice(dom)] for args in itertools.product(dom, repeat=f.arity)]
             for name, f in sorted(sig.functions.items()) if f.rigid}
    interp = {}
    for w in range(worlds):
        preds = {name: [list(t) for t in itertools.product(dom, repeat=a) if rng.random() < 0.5]
                 for name, a in sorted(sig.predicates.items())}
        funcs = {name: [[list(args), rng.choice(dom)] for args in itertools.product(dom, repeat=f.arity)]
                 for name, f in sorted(sig.functions.items()) if not f.rigid}
        interp[f"w{w + 1}"] = {"predicates": preds, "functions": funcs}
    return ModalStructure.from_json({"worlds": list(interp), "domain": dom, "interpretation": interp,
                                     "rigid_functions": rigid}, sig)


def brute_partition(m, qs):
    """[?qs]_M straight from the definition: pairs agreeing under every assignment."""
    import itertools

    from erotetic.semantics import evaluate
    from erotetic.syntax import free_variables

    def agree(w, v):
        for q in qs:
            fv = free_variables(q.body)
            for vals in itertools.product(m.domain, repeat=len(fv)):
                g = dict(zip(fv, vals))
                if evaluate(m, w, g, q.body) != evaluate(m, v, g, q.body):
                    return False
        return True

    return {(w, v) for w in m.worlds for v in m.worlds if agree(w, v)}


def random_formula(sig, rng, size, variables=VARS):
    """Seeded random formula of AST size at most `size` (no truth constants)."""
    consts = sorted(n for n, f in sig.functions.items() if f.arity == 0)
    pool = [Var(x) for x in variables] + [Func(c, ()) for c in consts]
    preds = sorted(sig.predicates.items())

    def atom():
        if pool and rng.random() < 0.2:
            return Eq(rng.choice(pool), rng.choice(pool))
        name, arity = rng.choice(preds)
        return Pred(name, tuple(rng.choice(pool) for _ in range(arity)))

    def build(k):
        if k <= 1 or rng.random() < 0.2:
            return atom()
        kind = rng.choice(["not", "bin", "bin", "quant"])
        if kind == "not":
            return Not(build(k - 1))
        if kind == "quant" and variables:
            return rng.choice([Forall, Exists])(rng.choice(variables), build(k - 1))
        a = rng.randint(1, max(1, k - 2))
        return rng.choice([And, Or, Implies, Iff])(build(a), build(max(1, k - 1 - a)))

    return build(size)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
