"""Sequent-level proving: clausify, saturate, and fall back to finite models."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .. import kernels
from .._program import compile_formula
from ..syntax import (
    BinOp, Eq, Exists, Forall, Formula, Func, Not, Pred, Quant, Signature, Var, conj, free_variables, substitute,
    subterms, symbols,
)
from .clauses import Clausifier, Skolemizer, nnf
from .resolution import DEFAULT_BUDGET, Proof, saturate, equality_axioms


class ProverError(ValueError):
    pass


@dataclass(frozen=True)
class FOSequent:
    """premises ⊨ conclusion over `sig` (primed symbols allowed)."""

    premises: tuple[Formula, ...]
    conclusion: Formula
    sig: Signature | None = None

    def __post_init__(self):
        object.__setattr__(self, "premises", tuple(self.premises))
        for f in self.premises + (self.conclusion,):
            if free_variables(f):
                raise ProverError(f"sequent formula {f} is not closed")

    def formulas(self) -> tuple[Formula, ...]:
        return self.premises + (self.conclusion,)

    def signature(self) -> Signature:
        """The declared signature, or one read off the formulas (functions non-rigid)."""
        if self.sig is not None:
            return self.sig
        preds: dict[str, int] = {}
        funcs: dict[str, int] = {}
        for f in self.formulas():
            p, fn = symbols(f)
            preds.update(p)
            funcs.update(fn)
        return Signature(preds, {n: (a, False) for n, a in funcs.items()})


@dataclass(frozen=True)
class Proved:
    proof: Proof
    generated: int

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotProved:
    generated: int
    saturated: bool = False

    def __bool__(self):
        return False


@dataclass(frozen=True)
class CounterexampleFound:
    """A single-world structure satisfying the premises and falsifying the conclusion."""

    structure: object
    generated: int = 0

    def __bool__(self):
        return False


def sequent_clauses(s: FOSequent, prefix: str = "__sk") -> list[tuple[tuple, str]]:
    """Tagged clauses for premises ∪ {¬conclusion}, plus equality axioms."""
    cl = Clausifier(prefix, "__d")
    out = []
    for i, f in enumerate(s.premises):
        out += [(c, f"premise{i}") for c in cl.clausify(f)]
    out += [(c, "negated_conclusion") for c in cl.clausify(Not(s.conclusion))]
    out += [(c, "equality") for c in equality_axioms(c for c, _ in out)]
    return out


def prove(s: FOSequent, budget: int = DEFAULT_BUDGET, countermodel_domain: int = 0,
          max_weight: int | None = None):
    """Proved, NotProved, or (when `countermodel_domain` > 0 and the search
    fails) CounterexampleFound from a finite single-world model search."""
    if budget <= 0:
        raise ProverError("budget must be positive")
    sat = saturate(sequent_clauses(s), budget, max_weight=max_weight, usable_tags=("equality",))
    if sat.proof is not None:
        return Proved(sat.proof, sat.generated)
    if countermodel_domain > 0:
        m = finite_counterexample(s, countermodel_domain)
        if m is not None:
            return CounterexampleFound(m, sat.generated)
    return NotProved(sat.generated, sat.saturated)


def finite_counterexample(s: FOSequent, max_domain: int, cap: int = 1 << 18):
    """First classical structure (domain size ascending, tables lexicographic)
    satisfying premises ∧ ¬conclusion, or None."""
    from ..semantics import EnumerationLimitError, enumerate_classical, signature_of

    target = conj(list(s.premises) + [Not(s.conclusion)])
    sig = signature_of([target], s.signature().merge(_formula_signature(target)))
    try:
        for n, layout, ptabs, ftabs, decode in enumerate_classical(sig, max_domain, cap):
            vals = kernels.truth_table(compile_formula(target, layout), n, ptabs, ftabs)[:, 0]
            hits = np.flatnonzero(vals)
            if hits.size:
                return decode(int(hits[0]))
    except EnumerationLimitError:
        return None
    return None


def _formula_signature(f: Formula) -> Signature:
    p, fn = symbols(f)
    return Signature(p, {n: (a, False) for n, a in fn.items()})


# ---------------------------------------------------------------------------
# Herbrand grounding


def term_depth(t) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(term_depth(a) for a in t.args)


def closure(base: Iterable, functions: dict[str, int], depth: int) -> list:
    """`base` closed under `functions` up to `depth` further nesting levels;
    deterministic order (by level, then function name, then argument order)."""
    seen = dict.fromkeys(base)
    frontier = list(seen)
    for _ in range(depth):
        everything = list(seen)
        new = []
        for name, arity in sorted(functions.items()):
            if arity == 0:
                continue
            for args in itertools.product(everything, repeat=arity):
                if not any(a in frontier for a in args):
                    continue
                t = Func(name, tuple(args))
                if t not in seen:
                    seen[t] = None
                    new.append(t)
        frontier = new
        if not new:
            break
    return list(seen)


def ground_terms(f: Formula) -> list:
    """Ground terms occurring in f (all subterms), in first-occurrence order."""
    out: dict = {}

    def term(t):
        for u in subterms(t):
            if not free_variables(Eq(u, u)):
                out.setdefault(u, None)

    def go(g):
        if isinstance(g, Pred):
            for a in g.args:
                term(a)
        elif isinstance(g, Eq):
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, BinOp):
            go(g.left)
            go(g.right)
        elif isinstance(g, Quant):
            go(g.body)

    go(f)
    return list(out)


def expand_universals(f: Formula, universe: Sequence) -> Formula:
    """Replace every ∀ of a Skolemized NNF formula by the conjunction of its
    instances over `universe`."""
    if isinstance(f, Forall):
        if not universe:
            raise ProverError("empty grounding pool with quantifiers present")
        return conj([expand_universals(substitute(f.body, {f.var: t}), universe) for t in universe])
    if isinstance(f, Exists):
        raise ProverError("existential left after Skolemization")
    if isinstance(f, BinOp):
        return type(f)(expand_universals(f.left, universe), expand_universals(f.right, universe))
    if isinstance(f, Not):
        return Not(expand_universals(f.body, universe))
    return f


def ground_universe(formulas: Sequence[Formula], pool: Iterable, functions: dict[str, int],
                    depth: int) -> list:
    base = list(pool)
    for f in formulas:
        base += ground_terms(f)
    return closure(base, functions, depth)


def herbrand_ground(s: FOSequent, constants: Iterable, depth: int = 0,
                    skolem_prefix: str = "__sk") -> FOSequent:
    """A quantifier-free sequent whose validity implies that of `s`.

    Strong quantifiers (∃ in premises, ∀ in the conclusion) are Skolemized;
    weak ones are instantiated over the pool, closed under the sequent's
    function symbols (Skolem functions included) up to `depth` nesting levels,
    together with the ground terms already present.
    """
    sk = Skolemizer(skolem_prefix)
    prem = [sk.skolemize(nnf(f, True, keep_ground_iff=True)) for f in s.premises]
    neg = sk.skolemize(nnf(s.conclusion, False, keep_ground_iff=True))
    funcs: dict[str, int] = {}
    for f in prem + [neg]:
        funcs.update(symbols(f)[1])
    pool = list(constants)
    if not pool and not any(_quantified(f) for f in prem + [neg]):
        return FOSequent(tuple(prem), nnf(Not(neg), True, keep_ground_iff=True), s.sig)
    universe = ground_universe(prem + [neg], pool, funcs, depth)
    if not universe:
        raise ProverError("empty grounding pool with quantifiers present")
    gprem = tuple(expand_universals(f, universe) for f in prem)
    gneg = expand_universals(neg, universe)
    concl = nnf(Not(gneg), True, keep_ground_iff=True)
    return FOSequent(gprem, concl, s.sig)


def _quantified(f: Formula) -> bool:
    if isinstance(f, Quant):
        return True
    if isinstance(f, BinOp):
        return _quantified(f.left) or _quantified(f.right)
    if isinstance(f, Not):
        return _quantified(f.body)
    return False


def prove_grounded(s: FOSequent, pool: Iterable, functions: dict[str, int], depth: int = 1,
                   budget: int = DEFAULT_BUDGET):
    """Refute a Herbrand instance set of premises ∪ {¬conclusion}.

    Sound (every ground instance follows from the quantified formulas) but
    complete only when the universe happens to contain the needed witnesses.
    Identity is handled by ground transitivity and congruence instances.
    """
    from .interpolation import identity_instances

    sk = Skolemizer("__sk")
    forms = [sk.skolemize(nnf(f)) for f in s.premises]
    forms.append(sk.skolemize(nnf(Not(s.conclusion))))
    funcs = {n: a for n, a in functions.items() if a > 0}
    funcs.update({n: a for n, a in sk.introduced.items() if a > 0})
    universe = ground_universe(forms, pool, funcs, depth) or [Func("__c_any", ())]
    cl = Clausifier("__sk", "__d")
    clauses = [c for f in forms for c in cl.clausify_matrix(expand_universals(f, universe))]
    tagged = [(c, "input") for c in clauses] + [(c, "equality") for c in identity_instances(clauses)]
    sat = saturate(tagged, budget, orient=True, usable_tags=("equality",))
    if sat.proof is not None:
        return Proved(sat.proof, sat.generated)
    return NotProved(sat.generated, False)
