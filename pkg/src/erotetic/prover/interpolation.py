"""Craig interpolants from ground resolution refutations.

`ground_interpolate` attaches partial interpolants to a refutation of
left ∪ right clauses (McMillan's system: a left leaf contributes its literals
over atoms that also occur on the right, a right leaf contributes ⊤, and a
resolution step joins with ∨ when the pivot atom is left-local and with ∧
otherwise).

`interpolate` does the whole job for quantified formulas: both sides are
Skolemized with side-specific symbol names, instantiated over a common
ground universe, equipped with the ground identity instances they need,
refuted, and the ground interpolant is lifted: every term whose head symbol
belongs to one side only is replaced by a variable, existentially bound for
left-local heads and universally for right-local ones, smaller terms taking
the outer quantifiers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..syntax import (
    BOT, TOP, And, Bottom, Eq, Exists, Forall, Formula, Func, Or, Top, Var, fresh_name, map_terms,
    symbol_names, all_variables,
)
from .clauses import EQ, Clausifier, Skolemizer, decode_literal, is_ground, nnf, normalize, term_str
from .resolution import DEFAULT_BUDGET, Proof, saturate
from .sequent import closure, expand_universals, ground_terms

LEFT, RIGHT = "left", "right"


class InterpolationError(RuntimeError):
    pass


class UntaggedClauseError(InterpolationError):
    pass


def _and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Bottom) or isinstance(b, Bottom):
        return BOT
    if isinstance(a, Top):
        return b
    if isinstance(b, Top) or a == b:
        return a
    return And(a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Top) or isinstance(b, Top):
        return TOP
    if isinstance(a, Bottom):
        return b
    if isinstance(b, Bottom) or a == b:
        return a
    return Or(a, b)


def ground_interpolate(p: Proof) -> Formula:
    """Interpolant of a ground refutation whose input steps are tagged
    "left" or "right"."""
    if not p.steps or p.root.clause != ():
        raise InterpolationError("not a refutation")
    steps = p.used_steps()
    right_atoms = set()
    for st in steps:
        if st.rule == "input":
            if st.tag not in (LEFT, RIGHT):
                raise UntaggedClauseError(f"input clause {st.id} has tag {st.tag!r}")
            if any(not is_ground(a) for _, a in st.clause):
                raise InterpolationError("ground_interpolate needs a ground refutation")
            if st.tag == RIGHT:
                right_atoms.update(a for _, a in st.clause)
    part: dict[int, Formula] = {}
    by_id = {st.id: st for st in steps}
    for st in steps:
        if st.rule == "input":
            if st.tag == RIGHT:
                part[st.id] = TOP
            else:
                acc: Formula = BOT
                for lit in st.clause:
                    if lit[1] in right_atoms:
                        acc = _or(acc, decode_literal(lit))
                part[st.id] = acc
        elif st.rule == "resolve":
            p1, p2 = st.parents
            pivot = by_id[p1].clause[st.lits[0]][1]
            if pivot in right_atoms:
                part[st.id] = _and(part[p1], part[p2])
            else:
                part[st.id] = _or(part[p1], part[p2])
        else:
            part[st.id] = part[st.parents[0]]
    return part[p.root.id]


# ---------------------------------------------------------------------------
# Lifting local terms


def _local_terms(f: Formula, local: set[str]) -> list:
    out: dict = {}
    for t in ground_terms(f):
        if isinstance(t, Func) and t.name in local:
            out.setdefault(t, None)
    return sorted(out, key=lambda t: (_tsize(t), pretty_term(t)))


def _tsize(t) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(_tsize(a) for a in t.args)


def pretty_term(t) -> str:
    if isinstance(t, Var) or not t.args:
        return t.name
    return t.name + "(" + ",".join(pretty_term(a) for a in t.args) + ")"


def _replace_term(f: Formula, old, new) -> Formula:
    def go(t):
        if t == old:
            return new
        if isinstance(t, Func):
            return Func(t.name, tuple(go(a) for a in t.args))
        return t

    return map_terms(f, go)


def lift(f: Formula, left_local: set[str], right_local: set[str], prefix: str = "z") -> Formula:
    """Quantify away ground terms headed by one-sided symbols."""
    terms = _local_terms(f, left_local | right_local)
    if not terms:
        return f
    used = set(all_variables(f))
    names = []
    for _ in terms:
        n = fresh_name(prefix, used)
        used.add(n)
        names.append(n)
    g = f
    for t, n in sorted(zip(terms, names), key=lambda p: -_tsize(p[0])):
        g = _replace_term(g, t, Var(n))
    for t, n in reversed(list(zip(terms, names))):
        g = Exists(n, g) if t.name in left_local else Forall(n, g)
    return g


# ---------------------------------------------------------------------------
# Side-aware grounding


def _vocab(fs: Iterable[Formula]) -> set[str]:
    out = set()
    for f in fs:
        out |= symbol_names(f)
    return out


def _term_subterms(t, out: dict):
    if isinstance(t, tuple):
        out.setdefault(t, None)
        for a in t[1:]:
            _term_subterms(a, out)


def _clause_symbols(c) -> set[str]:
    out = set()

    def term(t):
        out.add(t[0])
        for a in t[1:]:
            term(a)

    for _, a in c:
        if a[0] != EQ:
            out.add(a[0])
        for x in a[1:]:
            term(x)
    return out


def identity_instances(clauses: Sequence[tuple]) -> list[tuple]:
    """Ground transitivity and congruence instances over the terms and atoms
    of `clauses`.  Identity atoms are taken up to orientation, so symmetry
    and reflexivity are implicit in `normalize(..., orient=True)`."""
    terms: dict = {}
    atoms: dict = {}
    has_eq = False
    for c in clauses:
        for _, a in c:
            if a[0] == EQ:
                has_eq = True
            else:
                atoms.setdefault(a, None)
            for x in a[1:]:
                _term_subterms(x, terms)
    if not has_eq:
        return []
    tl = sorted(terms, key=term_str)
    out = []
    for a, b, c in itertools.combinations(tl, 3):
        for x, y, z in ((a, b, c), (b, a, c), (a, c, b)):
            # x = y, y = z  =>  x = z, for each choice of middle term
            out.append([(False, (EQ, x, y)), (False, (EQ, y, z)), (True, (EQ, x, z))])
    by_head: dict = {}
    for t in tl:
        if len(t) > 1:
            by_head.setdefault((t[0], len(t)), []).append(t)
    for group in by_head.values():
        for s, t in itertools.combinations(group, 2):
            lits = [(False, (EQ, x, y)) for x, y in zip(s[1:], t[1:])]
            out.append(lits + [(True, (EQ, s, t))])
    by_pred: dict = {}
    for a in sorted(atoms, key=term_str):
        if len(a) > 1:
            by_pred.setdefault((a[0], len(a)), []).append(a)
    for group in by_pred.values():
        for s, t in itertools.permutations(group, 2):
            lits = [(False, (EQ, x, y)) for x, y in zip(s[1:], t[1:])]
            out.append(lits + [(False, s), (True, t)])
    result = []
    for lits in out:
        n = normalize(lits, orient=True)
        if n is not None:
            result.append(n)
    return result


@dataclass
class InterpolationResult:
    interpolant: Formula
    ground_interpolant: Formula
    proof: Proof
    universe: list
    left_local: set[str]
    right_local: set[str]
    shared: set[str]
    clause_counts: tuple[int, int]


def interpolate(left: Sequence[Formula], right: Sequence[Formula], pool: Iterable,
                rigid_functions: dict[str, int], depth: int = 1,
                budget: int = DEFAULT_BUDGET) -> InterpolationResult | None:
    """Interpolant ϑ with left ⊨ ϑ and ϑ ∧ right unsatisfiable, or None when
    the ground refutation is not found within `budget`.

    Raises InterpolationError if the symbol condition fails (a bug).
    """
    left, right = list(left), list(right)
    va, vb = _vocab(left), _vocab(right)
    ska, skb = Skolemizer("__skL"), Skolemizer("__skR")
    ln = [ska.skolemize(nnf(f, True, keep_ground_iff=True)) for f in left]
    rn = [skb.skolemize(nnf(f, True, keep_ground_iff=True)) for f in right]
    va |= set(ska.introduced)
    vb |= set(skb.introduced)
    funcs = {n: a for n, a in rigid_functions.items() if a > 0}
    funcs.update({n: a for n, a in ska.introduced.items() if a > 0})
    funcs.update({n: a for n, a in skb.introduced.items() if a > 0})
    base = list(pool)
    # rigid material offered by the pool is available to both sides
    offered = set(rigid_functions)
    for t in base:
        offered |= symbol_names(Eq(t, t))
    va |= offered
    vb |= offered
    for f in ln + rn:
        base += ground_terms(f)
    universe = closure(base, funcs, depth)
    if not universe:
        universe = [Func("__c_any", ())]
        va.add("__c_any")
        vb.add("__c_any")
    gl = [expand_universals(f, universe) for f in ln]
    gr = [expand_universals(f, universe) for f in rn]
    cla, clb = Clausifier("__skL", "__dL"), Clausifier("__skR", "__dR")
    lc = [c for f in gl for c in cla.clausify_matrix(f)]
    rc = [c for f in gr for c in clb.clausify_matrix(f)]
    tagged = [(c, LEFT) for c in lc] + [(c, RIGHT) for c in rc]
    for inst in identity_instances(lc + rc):
        syms = _clause_symbols(inst)
        tagged.append((inst, RIGHT if syms <= vb else LEFT))
    sat = saturate(tagged, budget, orient=True)
    if sat.proof is None:
        return None
    ground = ground_interpolate(sat.proof)
    shared = va & vb
    left_local = va - vb
    right_local = vb - va
    lifted = lift(ground, left_local, right_local)
    bad = symbol_names(lifted) - shared
    if bad:
        raise InterpolationError(f"interpolant mentions non-shared symbols {sorted(bad)}")
    return InterpolationResult(lifted, ground, sat.proof, universe, left_local, right_local,
                               shared, (len(lc), len(rc)))
