"""Given-clause binary resolution with factoring, proof objects and replay."""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .clauses import (
    EQ, Clause, clause_vars, clause_weight, is_ground, normalize, shift,
)

DEFAULT_BUDGET = 50_000


# ---------------------------------------------------------------------------
# Unification


def _walk(t, s):
    while isinstance(t, int) and t in s:
        t = s[t]
    return t


def _occurs(v: int, t, s) -> bool:
    t = _walk(t, s)
    if isinstance(t, int):
        return t == v
    return any(_occurs(v, a, s) for a in t[1:])


def unify(a, b, s: dict | None = None) -> dict | None:
    """Most general unifier extending `s` (triangular form), or None."""
    s = {} if s is None else dict(s)
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x, y = _walk(x, s), _walk(y, s)
        if x == y:
            continue
        if isinstance(x, int):
            if _occurs(x, y, s):
                return None
            s[x] = y
        elif isinstance(y, int):
            if _occurs(y, x, s):
                return None
            s[y] = x
        else:
            if x[0] != y[0] or len(x) != len(y):
                return None
            stack.extend(zip(x[1:], y[1:]))
    return s


def apply(t, s: Mapping):
    if isinstance(t, int):
        u = _walk(t, s)
        return u if isinstance(u, int) else apply(u, s)
    if len(t) == 1:
        return t
    return (t[0],) + tuple(apply(a, s) for a in t[1:])


def resolved(s: Mapping) -> dict:
    """Idempotent form of a triangular substitution, keys sorted."""
    return {v: apply(v, s) for v in sorted(s)}


def _match(p, t, s: dict) -> bool:
    if isinstance(p, int):
        if p in s:
            return s[p] == t
        s[p] = t
        return True
    if isinstance(t, int) or p[0] != t[0] or len(p) != len(t):
        return False
    return all(_match(x, y, s) for x, y in zip(p[1:], t[1:]))


def subsumes(c: Clause, d: Clause) -> bool:
    """True iff some substitution maps every literal of c into d."""
    if len(c) > len(d):
        return False

    def go(i: int, s: dict) -> bool:
        if i == len(c):
            return True
        sign, atom = c[i]
        for sd, ad in d:
            if sd != sign or ad[0] != atom[0]:
                continue
            s2 = dict(s)
            if _match(atom, ad, s2) and go(i + 1, s2):
                return True
        return False

    return go(0, {})


# ---------------------------------------------------------------------------
# Proof objects


@dataclass(frozen=True)
class Step:
    """One derivation step.

    rule is "input", "resolve" or "factor".  For "resolve", parents are
    (p1, p2) and lits (i1, i2); the second parent's variables are shifted by
    the variable count of the first before unification.  For "factor",
    parents is (p,) and lits (i, j).  `unifier` is idempotent.
    """

    id: int
    rule: str
    clause: Clause
    parents: tuple[int, ...] = ()
    lits: tuple[int, ...] = ()
    unifier: tuple = ()
    tag: str = ""


@dataclass(frozen=True)
class Proof:
    steps: tuple[Step, ...]
    inputs: frozenset = frozenset()
    # derived clauses were normalized with ground equations oriented
    oriented: bool = False

    @property
    def root(self) -> Step:
        return self.steps[-1]

    def used_steps(self) -> list[Step]:
        """Steps reachable from the root, in derivation order."""
        by_id = {s.id: s for s in self.steps}
        keep = set()
        stack = [self.root.id]
        while stack:
            i = stack.pop()
            if i in keep:
                continue
            keep.add(i)
            stack.extend(by_id[i].parents)
        return [s for s in self.steps if s.id in keep]

    def to_text(self) -> str:
        head = "# oriented\n" if self.oriented else ""
        return head + "".join(step_line(s) + "\n" for s in self.steps)


def _replay(step: Step, by_id: Mapping[int, Step], orient: bool) -> Clause | None:
    s = dict(step.unifier)
    if step.rule == "resolve":
        c1, c2 = by_id[step.parents[0]].clause, by_id[step.parents[1]].clause
        i1, i2 = step.lits
        off = len(clause_vars(c1))
        c2 = tuple((sg, shift(a, off)) for sg, a in c2)
        if not (0 <= i1 < len(c1) and 0 <= i2 < len(c2)):
            return None
        (s1, a1), (s2, a2) = c1[i1], c2[i2]
        if s1 == s2 or apply(a1, s) != apply(a2, s):
            return None
        rest = [l for k, l in enumerate(c1) if k != i1] + [l for k, l in enumerate(c2) if k != i2]
        return normalize([(sg, apply(a, s)) for sg, a in rest], orient)
    if step.rule == "factor":
        (c,) = (by_id[step.parents[0]].clause,)
        i, j = step.lits
        if not (0 <= i < len(c) and 0 <= j < len(c)) or i == j:
            return None
        if c[i][0] != c[j][0] or apply(c[i][1], s) != apply(c[j][1], s):
            return None
        return normalize([(sg, apply(a, s)) for k, (sg, a) in enumerate(c) if k != j], orient)
    return None


def check_proof(p: Proof, orient: bool | None = None) -> bool:
    """Re-validate every step independently; the root must be the empty clause."""
    if not p.steps or p.root.clause != ():
        return False
    if orient is None:
        orient = p.oriented
    by_id: dict[int, Step] = {}
    for st in p.steps:
        if st.id in by_id or any(q not in by_id for q in st.parents):
            return False
        if st.rule == "input":
            if p.inputs and st.clause not in p.inputs:
                return False
        elif _replay(st, by_id, orient) != st.clause:
            return False
        by_id[st.id] = st
    return True


# ---------------------------------------------------------------------------
# Line-oriented text format


_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


def _q(name: str) -> str:
    if _NAME_RE.match(name) and name != "=":
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def _t(t) -> str:
    if isinstance(t, int):
        return f"?{t}"
    if len(t) == 1:
        return _q(t[0])
    return _q(t[0]) + "(" + ",".join(_t(a) for a in t[1:]) + ")"


def _clause_text(c: Clause) -> str:
    if not c:
        return "[]"
    return " | ".join(("" if s else "~") + _t(a) for s, a in c)


def step_line(s: Step) -> str:
    unifier = "{" + ",".join(f"?{v}:={_t(t)}" for v, t in s.unifier) + "}"
    parents = ",".join(map(str, s.parents)) or "-"
    lits = ",".join(map(str, s.lits)) or "-"
    return f"{s.id}\t{s.rule}\t{parents}\t{lits}\t{unifier}\t{s.tag or '-'}\t{_clause_text(s.clause)}"


class _TermReader:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def peek(self) -> str:
        return self.text[self.i] if self.i < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise ValueError(f"expected {ch!r} at {self.i} in {self.text!r}")
        self.i += 1

    def skip_ws(self):
        while self.peek() == " ":
            self.i += 1

    def name(self) -> str:
        if self.peek() == "'":
            self.i += 1
            out = []
            while True:
                ch = self.peek()
                if ch == "":
                    raise ValueError("unterminated quoted name")
                self.i += 1
                if ch == "\\":
                    out.append(self.peek())
                    self.i += 1
                elif ch == "'":
                    return "".join(out)
                else:
                    out.append(ch)
        m = re.compile(r"[A-Za-z0-9_]+").match(self.text, self.i)
        if not m:
            raise ValueError(f"name expected at {self.i} in {self.text!r}")
        self.i = m.end()
        return m.group()

    def term(self):
        if self.peek() == "?":
            self.i += 1
            m = re.compile(r"\d+").match(self.text, self.i)
            if not m:
                raise ValueError("variable number expected")
            self.i = m.end()
            return int(m.group())
        head = self.name()
        if self.peek() != "(":
            return (head,)
        self.i += 1
        args = [self.term()]
        while self.peek() == ",":
            self.i += 1
            args.append(self.term())
        self.expect(")")
        return (head,) + tuple(args)

    def clause(self) -> Clause:
        if self.text[self.i:] == "[]":
            return ()
        lits = []
        while True:
            self.skip_ws()
            sign = True
            if self.peek() == "~":
                sign = False
                self.i += 1
            lits.append((sign, self.term()))
            self.skip_ws()
            if self.peek() != "|":
                break
            self.i += 1
        if self.i != len(self.text):
            raise ValueError(f"trailing text in clause {self.text!r}")
        return tuple(lits)


def parse_proof(text: str, inputs: Iterable[Clause] = ()) -> Proof:
    steps = []
    oriented = False
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            oriented = oriented or line[1:].strip() == "oriented"
            continue
        sid, rule, parents, lits, unifier, tag, clause = line.split("\t")
        body = unifier[1:-1]
        pairs = []
        if body:
            r = _TermReader(body)
            while True:
                v = r.term()
                r.expect(":")
                r.expect("=")
                pairs.append((v, r.term()))
                if r.peek() != ",":
                    break
                r.i += 1
        steps.append(Step(
            int(sid), rule, _TermReader(clause).clause(),
            tuple(int(x) for x in parents.split(",")) if parents != "-" else (),
            tuple(int(x) for x in lits.split(",")) if lits != "-" else (),
            tuple(pairs), "" if tag == "-" else tag,
        ))
    return Proof(tuple(steps), frozenset(inputs), oriented)


# ---------------------------------------------------------------------------
# Saturation


@dataclass
class Saturation:
    """Result of running the given-clause loop on a clause set."""

    proof: Proof | None
    generated: int
    saturated: bool


def equality_axioms(clauses: Iterable[Clause]) -> list[Clause]:
    """Reflexivity, symmetry, transitivity and congruence for the function and
    predicate symbols occurring in `clauses`; empty if no identity occurs."""
    funcs: dict[str, int] = {}
    preds: dict[str, int] = {}
    has_eq = False

    def scan(t):
        if isinstance(t, int):
            return
        if len(t) > 1 or t[0] not in funcs:
            funcs[t[0]] = len(t) - 1
        for a in t[1:]:
            scan(a)

    for c in clauses:
        for _, a in c:
            if a[0] == EQ:
                has_eq = True
            else:
                preds[a[0]] = len(a) - 1
            for x in a[1:]:
                scan(x)
    if not has_eq:
        return []
    out = [
        ((True, (EQ, 0, 0)),),
        ((False, (EQ, 0, 1)), (True, (EQ, 1, 0))),
        ((False, (EQ, 0, 1)), (False, (EQ, 1, 2)), (True, (EQ, 0, 2))),
    ]
    for name, arity in sorted(funcs.items()):
        for i in range(arity):
            xs = list(range(2, arity + 2))
            ys = list(xs)
            xs[i], ys[i] = 0, 1
            out.append(((False, (EQ, 0, 1)), (True, (EQ, (name, *xs), (name, *ys)))))
    for name, arity in sorted(preds.items()):
        for i in range(arity):
            xs = list(range(2, arity + 2))
            ys = list(xs)
            xs[i], ys[i] = 0, 1
            out.append(((False, (EQ, 0, 1)), (False, (name, *xs)), (True, (name, *ys))))
    return [c for c in (normalize(c) for c in out) if c is not None]


def saturate(inputs: Sequence[tuple[Clause, str]], budget: int = DEFAULT_BUDGET,
             orient: bool = False, max_weight: int | None = None,
             usable_tags: Iterable[str] = (), pick_ratio: int = 4) -> Saturation:
    """Run the given-clause loop on tagged input clauses.

    Lightest clause first, ties broken by creation order, except that every
    `pick_ratio`-th selection takes the oldest waiting clause (0 disables).  `budget` bounds
    the number of generated (resolvent or factor) clauses.  Forward
    subsumption against the active set is checked when a clause is selected.

    Inputs whose tag is in `usable_tags` are never selected as given clauses,
    so they are never resolved with each other (set of support).  That keeps
    completeness as long as those clauses are satisfiable on their own, as
    the equality axioms are.
    """
    usable_tags = frozenset(usable_tags)
    if budget <= 0:
        raise ValueError("budget must be positive")
    steps: list[Step] = []
    known: dict[Clause, int] = {}
    heap: list = []
    fifo: list[int] = []
    done: set[int] = set()
    input_set = set()

    ground = all(is_ground(a) for c, _ in inputs for _, a in c)
    index: dict[tuple, list] = {}

    def add(clause: Clause, queue: bool = True, **kw) -> Step:
        st = Step(len(steps), clause=clause, **kw)
        steps.append(st)
        known[clause] = st.id
        if queue:
            key = (len(clause), clause_weight(clause)) if ground else (clause_weight(clause), len(clause))
            heapq.heappush(heap, key + (st.id,))
            fifo.append(st.id)
        return st

    def finish(st: Step) -> Proof:
        keep = Proof(tuple(steps), frozenset(input_set)).used_steps()
        renum = {s.id: k for k, s in enumerate(keep)}
        out = tuple(Step(renum[s.id], s.rule, s.clause, tuple(renum[p] for p in s.parents),
                         s.lits, s.unifier, s.tag) for s in keep)
        return Proof(out, frozenset(input_set), orient)

    active: list[Step] = []
    for clause, tag in inputs:
        c = normalize(clause, orient)
        if c is None or c in known:
            continue
        input_set.add(c)
        usable = tag in usable_tags
        st = add(c, queue=not usable, rule="input", tag=tag)
        if c == ():
            return Saturation(finish(st), 0, False)
        if usable:
            active.append(st)
            for j, lit in enumerate(c):
                index.setdefault(lit, []).append((st, j))
    generated = 0
    selections = 0
    oldest = 0
    while True:
        selections += 1
        sid = None
        if pick_ratio and selections % pick_ratio == 0:
            while oldest < len(fifo) and fifo[oldest] in done:
                oldest += 1
            if oldest < len(fifo):
                sid = fifo[oldest]
        while sid is None and heap:
            top = heapq.heappop(heap)[-1]
            if top not in done:
                sid = top
        if sid is None:
            break
        done.add(sid)
        given = steps[sid]
        g = given.clause
        if any(subsumes(a.clause, g) for a in active):
            continue
        active.append(given)
        gvars = len(clause_vars(g))
        new: list[tuple] = []
        # factors
        for i in range(len(g)):
            for j in range(i + 1, len(g)):
                if g[i][0] == g[j][0] and g[i][1][0] == g[j][1][0]:
                    s = unify(g[i][1], g[j][1])
                    if s is not None and s:
                        rest = [(sg, apply(a, s)) for k, (sg, a) in enumerate(g) if k != j]
                        new.append((normalize(rest, orient), dict(rule="factor", parents=(given.id,),
                                                                  lits=(i, j), unifier=tuple(resolved(s).items()))))
        if ground:
            for j, lit in enumerate(g):
                index.setdefault(lit, []).append((given, j))
            for i, (s1, a1) in enumerate(g):
                for other, j in index.get((not s1, a1), ()):
                    o = other.clause
                    rest = [l for k, l in enumerate(g) if k != i] + [l for k, l in enumerate(o) if k != j]
                    new.append((normalize(rest, orient), dict(rule="resolve", parents=(given.id, other.id),
                                                              lits=(i, j))))
        # resolvents with every active clause, the given clause included
        for other in ([] if ground else active):
            o = other.clause
            o_shift = tuple((sg, shift(a, gvars)) for sg, a in o)
            for i, (s1, a1) in enumerate(g):
                for j, (s2, a2) in enumerate(o_shift):
                    if s1 == s2 or a1[0] != a2[0] or len(a1) != len(a2):
                        continue
                    s = unify(a1, a2)
                    if s is None:
                        continue
                    rest = [l for k, l in enumerate(g) if k != i] + [l for k, l in enumerate(o_shift) if k != j]
                    new.append((normalize([(sg, apply(a, s)) for sg, a in rest], orient),
                                dict(rule="resolve", parents=(given.id, other.id), lits=(i, j),
                                     unifier=tuple(resolved(s).items()))))
        for clause, info in new:
            generated += 1
            if clause is None or clause in known:
                if generated >= budget:
                    return Saturation(None, generated, False)
                continue
            if max_weight is not None and clause_weight(clause) > max_weight:
                if generated >= budget:
                    return Saturation(None, generated, False)
                continue
            st = add(clause, **info)
            if clause == ():
                return Saturation(finish(st), generated, False)
            if generated >= budget:
                return Saturation(None, generated, False)
    return Saturation(None, generated, max_weight is None)
