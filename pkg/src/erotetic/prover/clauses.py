"""Negation normal form, Skolemization, CNF and the internal clause encoding.

Internal terms are plain Python values so that hashing and unification stay
cheap: a variable is an int, an application is a tuple ``(name, *args)``.
Atoms use the same shape with the predicate name at the head; identity atoms
are ``("=", s, t)``.  A literal is ``(positive, atom)`` and a clause is a
tuple of literals in canonical order (see `normalize`).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from ..syntax import (
    BOT, TOP, And, BinOp, Bottom, Eq, Exists, Forall, Formula, Func, Iff, Implies, Not, Or,
    Pred, Quant, Top, Var, free_variables, substitute, term_variables,
)

EQ = "="

Term = object  # int | tuple
Literal = tuple  # (bool, atom)
Clause = tuple


# ---------------------------------------------------------------------------
# Formula-level transformations


def _has_quantifier(f: Formula) -> bool:
    if isinstance(f, Quant):
        return True
    if isinstance(f, Not):
        return _has_quantifier(f.body)
    if isinstance(f, BinOp):
        return _has_quantifier(f.left) or _has_quantifier(f.right)
    return False


def _mk_and(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Bottom) or isinstance(b, Bottom):
        return BOT
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    return And(a, b)


def _mk_or(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Top) or isinstance(b, Top):
        return TOP
    if isinstance(a, Bottom):
        return b
    if isinstance(b, Bottom):
        return a
    return Or(a, b)


def nnf(f: Formula, positive: bool = True, keep_ground_iff: bool = False) -> Formula:
    """Negation normal form with ⊤/⊥ folded away (unless the whole result is
    ⊤ or ⊥).  Implications disappear.  Biconditionals are expanded, except
    quantifier-free ones when `keep_ground_iff` is set."""
    if isinstance(f, (Pred, Eq)):
        return f if positive else Not(f)
    if isinstance(f, Top):
        return TOP if positive else BOT
    if isinstance(f, Bottom):
        return BOT if positive else TOP
    if isinstance(f, Not):
        return nnf(f.body, not positive, keep_ground_iff)
    if isinstance(f, And) or isinstance(f, Or):
        l = nnf(f.left, positive, keep_ground_iff)
        r = nnf(f.right, positive, keep_ground_iff)
        conj = isinstance(f, And) == positive
        return _mk_and(l, r) if conj else _mk_or(l, r)
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), positive, keep_ground_iff)
    if isinstance(f, Iff):
        if keep_ground_iff and not _has_quantifier(f):
            l = nnf(f.left, True, True)
            r = nnf(f.right, positive, True)
            if isinstance(l, (Top, Bottom)) or isinstance(r, (Top, Bottom)):
                return nnf(And(Implies(f.left, f.right), Implies(f.right, f.left)), positive, True)
            return Iff(l, r)
        if positive:
            return nnf(And(Implies(f.left, f.right), Implies(f.right, f.left)), True, keep_ground_iff)
        return nnf(And(Or(f.left, f.right), Or(Not(f.left), Not(f.right))), True, keep_ground_iff)
    if isinstance(f, Quant):
        body = nnf(f.body, positive, keep_ground_iff)
        if isinstance(body, (Top, Bottom)):
            return body
        universal = isinstance(f, Forall) == positive
        return Forall(f.var, body) if universal else Exists(f.var, body)
    raise TypeError(f"not a formula: {f!r}")


class Skolemizer:
    """Replaces existential quantifiers of an NNF formula by Skolem terms.

    Bound variables are renamed apart to ``_v0, _v1, ...`` so that the
    result's remaining universal variables are globally distinct.  Symbol
    names are drawn from `prefix` with a running counter, so repeated use of
    one instance never reuses a name.
    """

    def __init__(self, prefix: str = "__sk"):
        self.prefix = prefix
        self.count = 0
        self.vcount = 0
        self.introduced: dict[str, int] = {}

    def fresh_var(self) -> str:
        name = f"_v{self.vcount}"
        self.vcount += 1
        return name

    def skolemize(self, f: Formula) -> Formula:
        return self._go(f, {}, ())

    def _go(self, f: Formula, env: dict, universals: tuple) -> Formula:
        if isinstance(f, (Pred, Eq, Top, Bottom)):
            return substitute(f, env) if env else f
        if isinstance(f, Not):
            return Not(self._go(f.body, env, universals))
        if isinstance(f, BinOp):
            return type(f)(self._go(f.left, env, universals), self._go(f.right, env, universals))
        if isinstance(f, Forall):
            v = self.fresh_var()
            return Forall(v, self._go(f.body, {**env, f.var: Var(v)}, universals + (v,)))
        if isinstance(f, Exists):
            used: set[str] = set()
            for x in set(free_variables(f)) - {f.var}:
                used |= set(term_variables(env[x]))
            args = tuple(Var(v) for v in universals if v in used)
            name = f"{self.prefix}{self.count}"
            self.count += 1
            self.introduced[name] = len(args)
            return self._go(f.body, {**env, f.var: Func(name, args)}, universals)
        raise TypeError(f"not a formula: {f!r}")


def strip_universals(f: Formula) -> Formula:
    """Drop the (already renamed-apart) universal quantifiers of a Skolemized NNF."""
    if isinstance(f, Forall):
        return strip_universals(f.body)
    if isinstance(f, BinOp):
        return type(f)(strip_universals(f.left), strip_universals(f.right))
    if isinstance(f, Not):
        return Not(strip_universals(f.body))
    return f


# ---------------------------------------------------------------------------
# Internal encoding


def encode_term(t, varmap: dict[str, int]) -> Term:
    if isinstance(t, Var):
        if t.name not in varmap:
            varmap[t.name] = len(varmap)
        return varmap[t.name]
    return (t.name,) + tuple(encode_term(a, varmap) for a in t.args)


def encode_atom(f: Formula, varmap: dict[str, int]) -> tuple:
    if isinstance(f, Pred):
        return (f.name,) + tuple(encode_term(a, varmap) for a in f.args)
    if isinstance(f, Eq):
        return (EQ, encode_term(f.left, varmap), encode_term(f.right, varmap))
    raise TypeError(f"not an atom: {f!r}")


def decode_term(t: Term, varnames: Sequence[str] | None = None):
    if isinstance(t, int):
        return Var(varnames[t] if varnames else f"X{t}")
    return Func(t[0], tuple(decode_term(a, varnames) for a in t[1:]))


def decode_atom(a: tuple, varnames: Sequence[str] | None = None) -> Formula:
    if a[0] == EQ:
        return Eq(decode_term(a[1], varnames), decode_term(a[2], varnames))
    return Pred(a[0], tuple(decode_term(x, varnames) for x in a[1:]))


def decode_literal(lit: Literal, varnames=None) -> Formula:
    atom = decode_atom(lit[1], varnames)
    return atom if lit[0] else Not(atom)


def term_str(t: Term) -> str:
    if isinstance(t, int):
        return f"?{t}"
    head = t[0]
    if len(t) == 1:
        return head
    return head + "(" + ",".join(term_str(a) for a in t[1:]) + ")"


def literal_str(lit: Literal) -> str:
    a = lit[1]
    body = f"{term_str(a[1])} = {term_str(a[2])}" if a[0] == EQ else term_str(a)
    return body if lit[0] else "~" + body


def clause_str(c: Clause) -> str:
    return " | ".join(literal_str(l) for l in c) if c else "[]"


def term_vars(t: Term, out: list) -> list:
    if isinstance(t, int):
        if t not in out:
            out.append(t)
    else:
        for a in t[1:]:
            term_vars(a, out)
    return out


def clause_vars(c: Iterable[Literal]) -> list[int]:
    out: list[int] = []
    for _, a in c:
        term_vars(a, out)
    return out


def is_ground(t: Term) -> bool:
    if isinstance(t, int):
        return False
    return all(is_ground(a) for a in t[1:])


def term_size(t: Term) -> int:
    if isinstance(t, int):
        return 1
    return 1 + sum(term_size(a) for a in t[1:])


def clause_weight(c: Clause) -> int:
    return sum(term_size(a) for _, a in c)


def rename(t: Term, mapping: dict[int, int]) -> Term:
    if isinstance(t, int):
        return mapping[t]
    return (t[0],) + tuple(rename(a, mapping) for a in t[1:])


def shift(t: Term, off: int) -> Term:
    if isinstance(t, int):
        return t + off
    if len(t) == 1:
        return t
    return (t[0],) + tuple(shift(a, off) for a in t[1:])


def _shape(t: Term) -> str:
    if isinstance(t, int):
        return "?"
    if len(t) == 1:
        return t[0]
    return t[0] + "(" + ",".join(_shape(a) for a in t[1:]) + ")"


def _orient(atom: tuple) -> tuple:
    if atom[0] == EQ and term_str(atom[2]) < term_str(atom[1]):
        return (EQ, atom[2], atom[1])
    return atom


def normalize(lits: Iterable[Literal], orient: bool = False) -> Clause | None:
    """Canonical clause: literals ordered, variables renumbered 0.. by first
    occurrence, duplicates merged.  Returns None for tautologies.

    With `orient`, ground identity atoms are ordered so that s = t and t = s
    coincide, t = t literals are decided (tautology / dropped).
    """
    lits = list(lits)
    if orient:
        out = []
        for sign, atom in lits:
            if atom[0] == EQ and is_ground(atom):
                if atom[1] == atom[2]:
                    if sign:
                        return None
                    continue
                atom = _orient(atom)
            out.append((sign, atom))
        lits = out
    lits.sort(key=lambda l: (_shape(l[1]), not l[0]))
    mapping: dict[int, int] = {}
    for v in clause_vars(lits):
        mapping[v] = len(mapping)
    renamed = {(s, rename(a, mapping)) for s, a in lits}
    pos = {a for s, a in renamed if s}
    if any((not s) and a in pos for s, a in renamed):
        return None
    ordered = sorted(renamed, key=lambda l: (_shape(l[1]), not l[0], term_str(l[1])))
    # a second renumbering pass keeps the numbering stable after the sort
    mapping = {}
    for v in clause_vars(ordered):
        mapping[v] = len(mapping)
    return tuple((s, rename(a, mapping)) for s, a in ordered)


# ---------------------------------------------------------------------------
# CNF


class Clausifier:
    """Turns closed formulas into clause sets.

    Distribution is used while the product of two disjuncts' clause counts
    stays under `limit`; beyond that the larger disjunct is named by a fresh
    definition predicate (one-directional, enough for satisfiability).
    """

    def __init__(self, skolem_prefix: str = "__sk", def_prefix: str = "__d", limit: int = 64):
        self.skolems = Skolemizer(skolem_prefix)
        self.def_prefix = def_prefix
        self.dcount = 0
        self.limit = limit
        self.definitions: dict[str, int] = {}

    def clausify(self, f: Formula) -> list[Clause]:
        if free_variables(f):
            raise ValueError("clausify expects a closed formula")
        g = nnf(f)
        g = strip_universals(self.skolems.skolemize(g))
        return self.clausify_matrix(g)

    def clausify_matrix(self, g: Formula) -> list[Clause]:
        """Clauses of a quantifier-free matrix (free variables read universally)."""
        g = nnf(g)
        if isinstance(g, Top):
            return []
        if isinstance(g, Bottom):
            return [()]
        self._extra: list[list[tuple[bool, Formula]]] = []
        raw = self._cnf(g)
        raw = raw + self._extra
        out = []
        seen = set()
        for c in raw:
            varmap: dict[str, int] = {}
            lits = [(s, encode_atom(a, varmap)) for s, a in c]
            n = normalize(lits)
            if n is not None and n not in seen:
                seen.add(n)
                out.append(n)
        return out

    def _cnf(self, g: Formula) -> list[list[tuple[bool, Formula]]]:
        if isinstance(g, Not):
            return [[(False, g.body)]]
        if isinstance(g, (Pred, Eq)):
            return [[(True, g)]]
        if isinstance(g, And):
            return self._cnf(g.left) + self._cnf(g.right)
        if isinstance(g, Or):
            a, b = self._cnf(g.left), self._cnf(g.right)
            if len(a) * len(b) > self.limit:
                if len(a) >= len(b):
                    a = self._define(g.left, a)
                else:
                    b = self._define(g.right, b)
            return [x + y for x in a for y in b]
        raise TypeError(f"unexpected node in NNF matrix: {g!r}")

    def _define(self, sub: Formula, clauses):
        fv = free_variables(sub)
        name = f"{self.def_prefix}{self.dcount}"
        self.dcount += 1
        self.definitions[name] = len(fv)
        atom = Pred(name, tuple(Var(v) for v in fv))
        self._extra.extend([[(False, atom)] + c for c in clauses])
        return [[(True, atom)]]
