"""Developments: formulas built from rigid instances and rigid identities.

A development of a set of formulas Φ is generated by

    ψ ::= φσ | s = t | ¬ψ | ψ ∧ ψ | ψ ∨ ψ | ψ → ψ | ψ ↔ ψ | ∀x ψ | ∃x ψ

where φ ∈ Φ, σ maps the free variables of φ to rigid terms and s, t are
rigid.  Rigid terms are built from variables and rigid function symbols, so
instances may mention variables that an enclosing quantifier binds.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .semantics import Bounds, Countermodel, find_countermodel
from .syntax import (
    And, BinOp, Bottom, Eq, Exists, Forall, Formula, Func, Iff, Implies, Not, Or, Pred, Quant,
    Question, Signature, Top, TOP, Var, alpha_key, forall_all, free_variables, fresh_name,
    is_rigid_term, match_rigid_instance, pretty, size, substitute,
)


@dataclass(frozen=True)
class DevelopmentVariant:
    """Restrictions on the development grammar.

    allow_existential=False keeps only answers built from leaves and negated
    leaves with ∧, ∨ and ∀: no ∃ node, every ¬ sits directly on a leaf, an
    implication's antecedent and both sides of a biconditional are leaves or
    negated leaves.
    """

    allow_varvar_identity: bool = True
    allow_existential: bool = True
    allow_equality: bool = True

    @property
    def name(self) -> str:
        for k, v in VARIANTS.items():
            if v == self:
                return k
        parts = [k for k, flag in (("no-varvar-identity", not self.allow_varvar_identity),
                                   ("no-existential", not self.allow_existential),
                                   ("no-equality", not self.allow_equality)) if flag]
        return "+".join(parts)

    @classmethod
    def from_name(cls, name: str) -> "DevelopmentVariant":
        flags = dict(allow_varvar_identity=True, allow_existential=True, allow_equality=True)
        for part in name.split("+"):
            part = part.strip()
            if part in ("", "default"):
                continue
            key = {"no-varvar-identity": "allow_varvar_identity",
                   "no-existential": "allow_existential",
                   "no-equality": "allow_equality"}.get(part)
            if key is None:
                raise ValueError(f"unknown development variant {part!r}")
            flags[key] = False
        return cls(**flags)

    def restricts(self, other: "DevelopmentVariant") -> bool:
        """True if every development under self is one under other."""
        return ((other.allow_varvar_identity or not self.allow_varvar_identity)
                and (other.allow_existential or not self.allow_existential)
                and (other.allow_equality or not self.allow_equality))


VARIANTS = {
    "default": DevelopmentVariant(),
    "no-varvar-identity": DevelopmentVariant(allow_varvar_identity=False),
    "no-existential": DevelopmentVariant(allow_existential=False),
    "no-equality": DevelopmentVariant(allow_equality=False),
}


# ---------------------------------------------------------------------------
# Derivation trees


@dataclass(frozen=True)
class InstanceLeaf:
    formula: Formula
    pattern: Formula
    sigma: tuple[tuple[str, object], ...]

    def replay(self) -> Formula:
        return substitute(self.pattern, dict(self.sigma))


@dataclass(frozen=True)
class IdentityLeaf:
    formula: Eq

    def replay(self) -> Formula:
        return self.formula


@dataclass(frozen=True)
class Node:
    """Connective or quantifier applied to subtrees; `var` set for quantifiers."""

    kind: type
    children: tuple
    var: str | None = None

    def replay(self) -> Formula:
        kids = [c.replay() for c in self.children]
        if self.kind is Not:
            return Not(kids[0])
        if issubclass(self.kind, Quant):
            return self.kind(self.var, kids[0])
        return self.kind(kids[0], kids[1])


Tree = InstanceLeaf | IdentityLeaf | Node


def is_leaf(t: Tree) -> bool:
    return isinstance(t, (InstanceLeaf, IdentityLeaf))


def _literal_like(t: Tree) -> bool:
    return is_leaf(t) or (isinstance(t, Node) and t.kind is Not and is_leaf(t.children[0]))


def tree_leaves(t: Tree) -> Iterator[Tree]:
    if is_leaf(t):
        yield t
    else:
        for c in t.children:
            yield from tree_leaves(c)


def tree_str(t: Tree, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(t, InstanceLeaf):
        sig = ", ".join(f"{v} := {pretty_term(x)}" for v, x in t.sigma)
        return f"{pad}instance {pretty(t.formula)} of {pretty(t.pattern)} [{sig}]"
    if isinstance(t, IdentityLeaf):
        return f"{pad}identity {pretty(t.formula)}"
    head = t.kind.__name__.lower() + (f" {t.var}" if t.var else "")
    return "\n".join([pad + head] + [tree_str(c, indent + 1) for c in t.children])


def pretty_term(t) -> str:
    if isinstance(t, Var) or not t.args:
        return t.name
    return t.name + "(" + ", ".join(pretty_term(a) for a in t.args) + ")"


def tree_to_json(t: Tree) -> dict:
    if isinstance(t, InstanceLeaf):
        return {"leaf": "instance", "formula": pretty(t.formula), "pattern": pretty(t.pattern),
                "substitution": {v: pretty_term(x) for v, x in t.sigma}}
    if isinstance(t, IdentityLeaf):
        return {"leaf": "identity", "formula": pretty(t.formula)}
    out = {"node": t.kind.__name__.lower(), "children": [tree_to_json(c) for c in t.children]}
    if t.var:
        out["var"] = t.var
    return out


# ---------------------------------------------------------------------------
# Checking


def _identity_ok(f: Eq, sig: Signature, v: DevelopmentVariant) -> bool:
    if not v.allow_equality:
        return False
    if not (is_rigid_term(f.left, sig) and is_rigid_term(f.right, sig)):
        return False
    if not v.allow_varvar_identity and isinstance(f.left, Var) and isinstance(f.right, Var):
        return False
    return True


def leaf_for(f: Formula, phis: Sequence[Formula], sig: Signature,
             v: DevelopmentVariant) -> Tree | None:
    """A leaf deriving f: an instance of some φ (tried in order), else an identity."""
    for phi in phis:
        sigma = match_rigid_instance(f, phi, sig)
        if sigma is not None:
            return InstanceLeaf(f, phi, tuple(sigma.items()))
    if isinstance(f, Eq) and _identity_ok(f, sig, v):
        return IdentityLeaf(f)
    return None


def check_development(psi: Formula, phis: Sequence[Formula], sig: Signature,
                      v: DevelopmentVariant = DevelopmentVariant()) -> Tree | None:
    """A derivation tree of psi from rigid instances of `phis`, or None.

    Each subformula is first tried as a leaf and then decomposed; a
    per-call memo keeps the search linear in the size of psi.
    """
    phis = list(phis)
    memo: dict[Formula, Tree | None] = {}
    leaf_memo: dict[Formula, Tree | None] = {}

    def leaf(f: Formula) -> Tree | None:
        if f not in leaf_memo:
            leaf_memo[f] = leaf_for(f, phis, sig, v)
        return leaf_memo[f]

    def literal(f: Formula) -> Tree | None:
        t = leaf(f)
        if t is None and isinstance(f, Not):
            inner = leaf(f.body)
            if inner is not None:
                t = Node(Not, (inner,))
        return t

    def go(f: Formula) -> Tree | None:
        if f in memo:
            return memo[f]
        t = leaf(f)
        if t is None:
            t = compose(f)
        memo[f] = t
        return t

    def compose(f: Formula) -> Tree | None:
        if isinstance(f, (Top, Bottom, Pred, Eq)):
            return None
        if isinstance(f, Not):
            kid = go(f.body) if v.allow_existential else leaf(f.body)
            return None if kid is None else Node(Not, (kid,))
        if isinstance(f, Exists) and not v.allow_existential:
            return None
        if isinstance(f, Quant):
            kid = go(f.body)
            return None if kid is None else Node(type(f), (kid,), f.var)
        if isinstance(f, BinOp):
            strict = not v.allow_existential
            if strict and isinstance(f, Implies):
                left = literal(f.left)
                right = go(f.right)
            elif strict and isinstance(f, Iff):
                left, right = literal(f.left), literal(f.right)
            else:
                left, right = go(f.left), go(f.right)
            if left is None or right is None:
                return None
            return Node(type(f), (left, right))
        return None

    return go(psi)


def replays_to(tree: Tree, psi: Formula) -> bool:
    return alpha_key(tree.replay()) == alpha_key(psi)


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class AnswerClassification:
    """Tautology / contradiction flags are None when the prover budget ran out."""

    is_tautology: bool | None
    is_contradiction: bool | None
    is_atomic: bool
    existential_free: bool


def existential_free(tree: Tree) -> bool:
    if is_leaf(tree):
        return True
    if tree.kind is Exists:
        return False
    if tree.kind is Not:
        return is_leaf(tree.children[0])
    if tree.kind is Implies:
        return _literal_like(tree.children[0]) and existential_free(tree.children[1])
    if tree.kind is Iff:
        return all(_literal_like(c) for c in tree.children)
    return all(existential_free(c) for c in tree.children)


def classify_answer(psi: Formula, tree: Tree, sig: Signature, budget: int = 2000) -> AnswerClassification:
    from .prover import CounterexampleFound, FOSequent, Proved, prove

    closed = forall_all(free_variables(psi), psi)

    def valid(f: Formula) -> bool | None:
        r = prove(FOSequent((), f), budget, countermodel_domain=2)
        if isinstance(r, Proved):
            return True
        if isinstance(r, CounterexampleFound):
            return False
        return None

    taut = valid(closed)
    contra = False if taut else valid(forall_all(free_variables(psi), Not(psi)))
    return AnswerClassification(taut, contra, _literal_like(tree), existential_free(tree))


# ---------------------------------------------------------------------------
# Developments are entailed: a test property


@dataclass(frozen=True)
class Theorem1Verdict:
    passed: bool
    countermodel: Countermodel | None = None


def theorem1_property(phi: Formula, psi: Formula, sig: Signature,
                      bounds: Bounds = Bounds()) -> Theorem1Verdict:
    """A development ψ of φ must make ?φ entail ?ψ; search for a refutation."""
    cm = find_countermodel([Question(phi)], TOP, Question(psi), bounds, sig)
    return Theorem1Verdict(cm is None, cm)


# ---------------------------------------------------------------------------
# Enumeration


def rigid_ground_terms(sig: Signature, depth: int = 1) -> list:
    """Rigid ground terms with at most `depth` levels of function application
    above the rigid constants, in a fixed order."""
    consts = [Func(n, ()) for n in sig.rigid_constants()]
    out = dict.fromkeys(consts)
    frontier = list(consts)
    funcs = sorted((n, f.arity) for n, f in sig.functions.items() if f.rigid and f.arity > 0)
    for _ in range(depth):
        pool = list(out)
        new = []
        for name, arity in funcs:
            for args in itertools.product(pool, repeat=arity):
                if any(a in frontier for a in args):
                    t = Func(name, args)
                    if t not in out:
                        out[t] = None
                        new.append(t)
        frontier = new
    return list(out)


class _Enumerator:
    def __init__(self, phis, sig, variant, term_depth):
        self.phis = list(phis)
        self.sig = sig
        self.v = variant
        self.ground = rigid_ground_terms(sig, term_depth)
        top: dict[str, None] = {}
        for p in self.phis:
            for x in free_variables(p):
                top.setdefault(x, None)
        self.top = tuple(top)
        self.memo: dict = {}

    def pool(self, scope: tuple[str, ...]) -> list:
        return self.ground + [Var(x) for x in scope]

    def leaves(self, scope: tuple[str, ...]) -> list[tuple[Formula, int]]:
        key = ("leaves", scope)
        if key in self.memo:
            return self.memo[key]
        terms = self.pool(scope)
        out = []
        for phi in self.phis:
            fv = free_variables(phi)
            for combo in itertools.product(terms, repeat=len(fv)):
                out.append(substitute(phi, dict(zip(fv, combo))))
        for s in terms:
            for t in terms:
                f = Eq(s, t)
                if _identity_ok(f, self.sig, self.v):
                    out.append(f)
        res = [(f, size(f)) for f in out]
        self.memo[key] = res
        return res

    def binders(self, scope: tuple[str, ...]) -> list[tuple[str, tuple[str, ...]]]:
        opts = []
        for x in self.top:
            if x in scope:
                opts.append((x, scope))
        used = set(scope) | set(self.top)
        base = self.top[0] if self.top else "x"
        fresh = fresh_name(base, used)
        opts.append((fresh, tuple(sorted(scope + (fresh,)))))
        return opts

    def gen(self, n: int, scope: tuple[str, ...], leaf_only: bool = False) -> list[Formula]:
        """Developments of AST size exactly n over `scope`, deduplicated up to
        alpha-equivalence, sorted by printed form."""
        key = (n, scope, leaf_only)
        if key in self.memo:
            return self.memo[key]
        cands: list[Formula] = [f for f, s in self.leaves(scope) if s == n]
        if not leaf_only and n > 1:
            strict = not self.v.allow_existential
            for body in self.gen(n - 1, scope, leaf_only=strict):
                cands.append(Not(body))
            for a in range(1, n - 1):
                b = n - 1 - a
                for op in (And, Or, Implies, Iff):
                    if strict and op is Implies:
                        lefts = self.literals(a, scope)
                        rights = self.gen(b, scope)
                    elif strict and op is Iff:
                        lefts, rights = self.literals(a, scope), self.literals(b, scope)
                    else:
                        lefts, rights = self.gen(a, scope), self.gen(b, scope)
                    for l in lefts:
                        for r in rights:
                            cands.append(op(l, r))
            quants = (Forall,) if strict else (Forall, Exists)
            for var, inner in self.binders(scope):
                for body in self.gen(n - 1, inner):
                    for q in quants:
                        cands.append(q(var, body))
        seen = {}
        for f in sorted(cands, key=pretty):
            seen.setdefault(alpha_key(f), f)
        res = list(seen.values())
        self.memo[key] = res
        return res

    def literals(self, n: int, scope) -> list[Formula]:
        out = list(self.gen(n, scope, leaf_only=True))
        if n > 1:
            out += [Not(f) for f in self.gen(n - 1, scope, leaf_only=True)]
        return out


def enumerate_developments(phis: Sequence[Formula], sig: Signature, max_size: int,
                           v: DevelopmentVariant = DevelopmentVariant(),
                           term_depth: int = 1) -> Iterator[Formula]:
    """Developments of `phis` up to AST size `max_size`: size ascending,
    printed form ascending within a size, one representative per alpha class.

    Terms are the rigid ground terms to `term_depth` plus the variables in
    scope; at the top level the free variables of `phis` are in scope.
    """
    if max_size < 1:
        raise ValueError("max_size must be positive")
    en = _Enumerator(phis, sig, v, term_depth)
    emitted = set()
    for n in range(1, max_size + 1):
        for f in en.gen(n, tuple(sorted(en.top))):
            k = alpha_key(f)
            if k not in emitted:
                emitted.add(k)
                yield f


def random_development(phis: Sequence[Formula], sig: Signature, max_size: int, rng: random.Random,
                       v: DevelopmentVariant = DevelopmentVariant(), term_depth: int = 1,
                       closed: bool = False) -> Formula:
    """A random development of AST size at most `max_size` (test-data generator)."""
    ground = rigid_ground_terms(sig, term_depth)
    phis = list(phis)
    counter = itertools.count()
    top = [] if closed else list(dict.fromkeys(x for p in phis for x in free_variables(p)))

    def leaf(scope: list[str]) -> Formula:
        terms = ground + [Var(x) for x in scope]
        if not terms:
            terms = [Var("x")] if not closed else []
        can_eq = v.allow_equality and terms
        fitting = [p for p in phis if size(p) <= max_size and (terms or not free_variables(p))]
        if fitting and (not can_eq or rng.random() < 0.8):
            phi = rng.choice(fitting)
            return substitute(phi, {x: rng.choice(terms) for x in free_variables(phi)})
        for _ in range(20):
            s, t = rng.choice(terms), rng.choice(terms)
            if _identity_ok(Eq(s, t), sig, v):
                return Eq(s, t)
        phi = rng.choice(fitting or phis)
        return substitute(phi, {x: rng.choice(terms) for x in free_variables(phi)})

    def build(budget: int, scope: list[str], leaf_only: bool = False) -> Formula:
        if budget <= 1 or leaf_only or rng.random() < 0.25:
            return leaf(scope)
        strict = not v.allow_existential
        choice = rng.choice(["not", "and", "or", "implies", "iff", "forall", "exists"])
        if choice == "not":
            return Not(build(budget - 1, scope, leaf_only=strict))
        if choice in ("forall", "exists"):
            if choice == "exists" and strict:
                choice = "forall"
            var = f"v{next(counter)}"
            body = build(budget - 1, scope + [var])
            return (Forall if choice == "forall" else Exists)(var, body)
        a = rng.randint(1, max(1, budget - 2))
        b = max(1, budget - 1 - a)
        if strict and choice in ("implies", "iff"):
            l = build(a, scope, leaf_only=True)
            r = build(b, scope, leaf_only=(choice == "iff"))
        else:
            l, r = build(a, scope), build(b, scope)
        return {"and": And, "or": Or, "implies": Implies, "iff": Iff}[choice](l, r)

    for _ in range(100):
        f = build(max_size, top)
        if size(f) <= max_size:
            return f
    return leaf(top)
