"""Finite constant-domain modal structures and the partitions questions induce.

Two evaluation routes exist.  `evaluate` is a direct recursive reading of
the satisfaction clauses over a `ModalStructure`; it is the reference.  The
partition, enumeration and countermodel functions instead encode worlds as
integer tables and run the batch kernel from `kernels`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from . import kernels
from ._program import Layout, compile_formula, mixed_radix
from .syntax import (
    And, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or, Pred, Question, Signature, Top,
    Var, free_variables, prime_name, symbols,
)

DEFAULT_ENUMERATION_CAP = 2_000_000


class StructureError(ValueError):
    pass


class EnumerationLimitError(RuntimeError):
    """The requested enumeration exceeds the configured cap."""


class EvaluationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Structures


@dataclass(frozen=True)
class WorldInterp:
    predicates: Mapping[str, frozenset]
    functions: Mapping[str, Mapping[tuple, str]]


@dataclass(frozen=True, eq=False)
class ModalStructure:
    """(W, D, I) with a constant domain; rigid functions agree across worlds."""

    sig: Signature
    worlds: tuple[str, ...]
    domain: tuple[str, ...]
    interp: Mapping[str, WorldInterp]

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "domain", tuple(self.domain))
        self.validate()

    def validate(self) -> None:
        if not self.worlds:
            raise StructureError("a structure needs at least one world")
        if not self.domain:
            raise StructureError("the domain must be nonempty")
        if len(set(self.worlds)) != len(self.worlds) or len(set(self.domain)) != len(self.domain):
            raise StructureError("duplicate world or entity identifiers")
        dom = set(self.domain)
        for w in self.worlds:
            wi = self.interp.get(w)
            if wi is None:
                raise StructureError(f"world {w!r} has no interpretation")
            for name, arity in self.sig.predicates.items():
                for tup in wi.predicates.get(name, frozenset()):
                    if len(tup) != arity or not set(tup) <= dom:
                        raise StructureError(f"bad tuple {tup!r} for predicate {name!r}")
            for name, spec in self.sig.functions.items():
                table = wi.functions.get(name)
                if table is None:
                    raise StructureError(f"function {name!r} uninterpreted at world {w!r}")
                if len(table) != len(self.domain) ** spec.arity:
                    raise StructureError(f"function {name!r} is not total at world {w!r}")
                for args, val in table.items():
                    if len(args) != spec.arity or not set(args) <= dom or val not in dom:
                        raise StructureError(f"bad entry {args!r}->{val!r} for {name!r}")
        for name, spec in self.sig.functions.items():
            if spec.rigid:
                first = dict(self.interp[self.worlds[0]].functions[name])
                if any(dict(self.interp[w].functions[name]) != first for w in self.worlds[1:]):
                    raise StructureError(f"rigid function {name!r} differs across worlds")

    # -- JSON -------------------------------------------------------------

    @classmethod
    def from_json(cls, data, sig: Signature) -> "ModalStructure":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            worlds = [str(w) for w in data["worlds"]]
            domain = [str(e) for e in data["domain"]]
            rigid_src = data.get("rigid_functions", {})
            interp = {}
            rigid_tables = {}
            for name, entries in rigid_src.items():
                spec = sig.functions.get(name)
                if spec is None or not spec.rigid:
                    raise StructureError(f"{name!r} listed under rigid_functions is not rigid")
                rigid_tables[name] = {tuple(str(a) for a in args): str(val) for args, val in entries}
            for w in worlds:
                wd = data.get("interpretation", {}).get(w, {})
                preds = {}
                for name in sig.predicates:
                    tuples = wd.get("predicates", {}).get(name, [])
                    preds[name] = frozenset(tuple(str(a) for a in t) for t in tuples)
                funcs = {}
                for name, spec in sig.functions.items():
                    given = wd.get("functions", {}).get(name)
                    if given is not None:
                        table = {tuple(str(a) for a in args): str(val) for args, val in given}
                        if spec.rigid and name in rigid_tables and table != rigid_tables[name]:
                            raise StructureError(f"rigid function {name!r} redefined at world {w!r}")
                        funcs[name] = table
                    elif name in rigid_tables:
                        funcs[name] = rigid_tables[name]
                    else:
                        raise StructureError(f"function {name!r} uninterpreted at world {w!r}")
                unknown = set(wd.get("predicates", {})) - set(sig.predicates)
                unknown |= set(wd.get("functions", {})) - set(sig.functions)
                if unknown:
                    raise StructureError(f"undeclared symbols in model: {sorted(unknown)}")
                interp[w] = WorldInterp(preds, funcs)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, StructureError):
                raise
            raise StructureError(f"malformed model file: {exc}") from exc
        return cls(sig, tuple(worlds), tuple(domain), interp)

    @classmethod
    def load(cls, path: str | Path, sig: Signature) -> "ModalStructure":
        return cls.from_json(Path(path).read_text(), sig)

    def to_json(self) -> dict:
        rigid = {n for n, f in self.sig.functions.items() if f.rigid}
        w0 = self.interp[self.worlds[0]]
        out = {
            "worlds": list(self.worlds),
            "domain": list(self.domain),
            "interpretation": {},
            "rigid_functions": {n: [[list(a), v] for a, v in sorted(w0.functions[n].items())]
                                for n in sorted(rigid)},
        }
        for w in self.worlds:
            wi = self.interp[w]
            out["interpretation"][w] = {
                "predicates": {n: [list(t) for t in sorted(wi.predicates.get(n, ()))]
                               for n in sorted(self.sig.predicates)},
                "functions": {n: [[list(a), v] for a, v in sorted(wi.functions[n].items())]
                              for n in sorted(self.sig.functions) if n not in rigid},
            }
        return out

    def restrict_worlds(self, worlds: Sequence[str]) -> "ModalStructure":
        worlds = tuple(dict.fromkeys(worlds))
        return ModalStructure(self.sig, worlds, self.domain, {w: self.interp[w] for w in worlds})


@dataclass(frozen=True)
class Bounds:
    max_worlds: int = 2
    max_domain: int = 3

    def __post_init__(self):
        if self.max_worlds < 1 or self.max_domain < 1:
            raise ValueError("bounds must be positive")


# ---------------------------------------------------------------------------
# Reference evaluation


def _term_value(m: ModalStructure, wi: WorldInterp, g: Mapping[str, str], t) -> str:
    if isinstance(t, Var):
        try:
            return g[t.name]
        except KeyError:
            raise EvaluationError(f"unassigned variable {t.name!r}") from None
    table = wi.functions.get(t.name)
    if table is None:
        raise EvaluationError(f"function {t.name!r} not interpreted")
    return table[tuple(_term_value(m, wi, g, a) for a in t.args)]


def evaluate(m: ModalStructure, w: str, g: Mapping[str, str], f: Formula) -> bool:
    """M, w, g |= f, by the satisfaction clauses; quantifiers range over m.domain."""
    wi = m.interp[w]

    def go(h: Formula, g: Mapping[str, str]) -> bool:
        if isinstance(h, Pred):
            ext = wi.predicates.get(h.name)
            if ext is None:
                raise EvaluationError(f"predicate {h.name!r} not interpreted")
            return tuple(_term_value(m, wi, g, a) for a in h.args) in ext
        if isinstance(h, Eq):
            return _term_value(m, wi, g, h.left) == _term_value(m, wi, g, h.right)
        if isinstance(h, Not):
            return not go(h.body, g)
        if isinstance(h, And):
            return go(h.left, g) and go(h.right, g)
        if isinstance(h, Or):
            return go(h.left, g) or go(h.right, g)
        if isinstance(h, Implies):
            return (not go(h.left, g)) or go(h.right, g)
        if isinstance(h, Iff):
            return go(h.left, g) == go(h.right, g)
        if isinstance(h, Forall):
            return all(go(h.body, {**g, h.var: e}) for e in m.domain)
        if isinstance(h, Exists):
            return any(go(h.body, {**g, h.var: e}) for e in m.domain)
        return isinstance(h, Top)

    return go(f, g)


def holds_globally(m: ModalStructure, chi: Formula) -> bool:
    if free_variables(chi):
        raise EvaluationError("the context formula must be closed")
    return all(evaluate(m, w, {}, chi) for w in m.worlds)


# ---------------------------------------------------------------------------
# Partitions


@dataclass(frozen=True)
class Partition:
    """Canonical equivalence relation: sorted tuple of sorted blocks."""

    blocks: tuple[tuple[str, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[str]]) -> "Partition":
        canon = sorted(tuple(sorted(b)) for b in blocks)
        seen: set[str] = set()
        for b in canon:
            if not b:
                raise ValueError("empty block")
            if seen & set(b):
                raise ValueError("blocks overlap")
            seen |= set(b)
        return cls(tuple(canon))

    @classmethod
    def from_keys(cls, keys: Mapping[str, object]) -> "Partition":
        groups: dict[object, list[str]] = {}
        for w, k in keys.items():
            groups.setdefault(k, []).append(w)
        return cls.from_blocks(groups.values())

    @property
    def worlds(self) -> frozenset[str]:
        return frozenset(w for b in self.blocks for w in b)

    def block_of(self, w: str) -> tuple[str, ...]:
        for b in self.blocks:
            if w in b:
                return b
        raise KeyError(w)

    def related(self, w: str, v: str) -> bool:
        return v in self.block_of(w)

    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset((a, b) for blk in self.blocks for a in blk for b in blk)

    def meet(self, other: "Partition") -> "Partition":
        if self.worlds != other.worlds:
            raise ValueError("partitions of different world sets")
        index = {w: i for i, b in enumerate(other.blocks) for w in b}
        return Partition.from_keys({w: (i, index[w]) for i, b in enumerate(self.blocks) for w in b})

    def __str__(self):
        return " | ".join("{" + ", ".join(b) + "}" for b in self.blocks)


def refines(a: Partition, b: Partition) -> bool:
    """True iff every block of a lies inside a block of b."""
    if a.worlds != b.worlds:
        raise ValueError("partitions of different world sets")
    index = {w: i for i, blk in enumerate(b.blocks) for w in blk}
    return all(len({index[w] for w in blk}) == 1 for blk in a.blocks)


def trivial_partition(worlds: Iterable[str]) -> Partition:
    return Partition.from_blocks([list(worlds)])


# ---------------------------------------------------------------------------
# Table encoding


def _formula_symbols(formulas: Iterable[Formula]) -> tuple[dict[str, int], dict[str, int]]:
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    for f in formulas:
        p, fn = symbols(f)
        preds.update(p)
        funcs.update(fn)
    return preds, funcs


def encode_worlds(m: ModalStructure, layout: Layout,
                  worlds: Sequence[str] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """World tables for the symbols of `layout`; entities numbered by domain order."""
    worlds = m.worlds if worlds is None else worlds
    n = len(m.domain)
    ent = {e: i for i, e in enumerate(m.domain)}
    ptabs = np.zeros((len(worlds), layout.pwidth), dtype=np.uint8)
    ftabs = np.zeros((len(worlds), layout.fwidth), dtype=np.int32)
    for row, w in enumerate(worlds):
        wi = m.interp[w]
        for name, arity in layout.predicates.items():
            ext = wi.predicates.get(name)
            if ext is None:
                raise EvaluationError(f"predicate {name!r} not interpreted")
            for tup in ext:
                idx = 0
                for a in tup:
                    idx = idx * n + ent[a]
                ptabs[row, layout.poff[name] + idx] = 1
        for name, arity in layout.functions.items():
            table = wi.functions.get(name)
            if table is None:
                raise EvaluationError(f"function {name!r} not interpreted")
            for args, val in table.items():
                idx = 0
                for a in args:
                    idx = idx * n + ent[a]
                ftabs[row, layout.foff[name] + idx] = ent[val]
    return ptabs, ftabs


def question_keys(m: ModalStructure, qs: Sequence[Question],
                  worlds: Sequence[str] | None = None) -> dict[str, bytes]:
    """Per world, the concatenated truth tables of the question bodies."""
    worlds = m.worlds if worlds is None else worlds
    preds, funcs = _formula_symbols(q.body for q in qs)
    layout = Layout(preds, funcs, len(m.domain))
    ptabs, ftabs = encode_worlds(m, layout, worlds)
    parts = [kernels.truth_table(compile_formula(q.body, layout), layout.n, ptabs, ftabs)
             for q in qs]
    if not parts:
        return {w: b"" for w in worlds}
    table = np.concatenate(parts, axis=1)
    return {w: table[i].tobytes() for i, w in enumerate(worlds)}


def question_partition(m: ModalStructure, q: Question) -> Partition:
    """Worlds share a block iff the body has the same truth value at both under
    every assignment to its free variables."""
    return Partition.from_keys(question_keys(m, [q]))


def questions_partition(m: ModalStructure, qs: Iterable[Question]) -> Partition:
    """The meet of the member partitions; the empty set gives one block."""
    qs = list(qs)
    if not qs:
        return trivial_partition(m.worlds)
    return Partition.from_keys(question_keys(m, qs))


# ---------------------------------------------------------------------------
# Enumeration


def _world_radices(sig: Signature, n: int) -> list[int]:
    """Per-world free choices: predicate cells (2 each), non-rigid function cells (n each)."""
    radices = []
    for name, arity in sorted(sig.predicates.items()):
        radices += [2] * (n ** arity)
    for name, spec in sorted(sig.functions.items()):
        if not spec.rigid:
            radices += [n] * (n ** spec.arity)
    return radices


def _rigid_radices(sig: Signature, n: int) -> list[int]:
    radices = []
    for name, spec in sorted(sig.functions.items()):
        if spec.rigid:
            radices += [n] * (n ** spec.arity)
    return radices


def count_world_interps(sig: Signature, n: int) -> int:
    return math.prod(_world_radices(sig, n))


def count_rigid_interps(sig: Signature, n: int) -> int:
    return math.prod(_rigid_radices(sig, n))


def count_structures(sig: Signature, bounds: Bounds) -> int:
    total = 0
    for n in range(1, bounds.max_domain + 1):
        per_world = count_world_interps(sig, n)
        rigid = count_rigid_interps(sig, n)
        total += rigid * sum(per_world ** k for k in range(1, bounds.max_worlds + 1))
    return total


def _tables(sig: Signature, layout: Layout, rigid_digits: np.ndarray,
            world_digits: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """World tables for every row of world_digits combined with one rigid choice."""
    rows = world_digits.shape[0]
    n = layout.n
    ptabs = np.zeros((rows, layout.pwidth), dtype=np.uint8)
    ftabs = np.zeros((rows, layout.fwidth), dtype=np.int32)
    col = 0
    for name, arity in sorted(sig.predicates.items()):
        if name in layout.poff:
            cells = n ** arity
            ptabs[:, layout.poff[name]:layout.poff[name] + cells] = world_digits[:, col:col + cells]
        col += n ** arity
    rcol = 0
    for name, spec in sorted(sig.functions.items()):
        cells = n ** spec.arity
        if spec.rigid:
            if name in layout.foff:
                ftabs[:, layout.foff[name]:layout.foff[name] + cells] = rigid_digits[rcol:rcol + cells]
            rcol += cells
        else:
            if name in layout.foff:
                ftabs[:, layout.foff[name]:layout.foff[name] + cells] = world_digits[:, col:col + cells]
            col += cells
    return ptabs, ftabs


def _decode_world(sig: Signature, n: int, domain: tuple[str, ...], rigid_digits, world_digits) -> WorldInterp:
    preds = {}
    funcs = {}
    col = 0
    for name, arity in sorted(sig.predicates.items()):
        tuples = list(itertools.product(domain, repeat=arity))
        preds[name] = frozenset(t for i, t in enumerate(tuples) if world_digits[col + i])
        col += len(tuples)
    rcol = 0
    for name, spec in sorted(sig.functions.items()):
        tuples = list(itertools.product(domain, repeat=spec.arity))
        if spec.rigid:
            funcs[name] = {t: domain[int(rigid_digits[rcol + i])] for i, t in enumerate(tuples)}
            rcol += len(tuples)
        else:
            funcs[name] = {t: domain[int(world_digits[col + i])] for i, t in enumerate(tuples)}
            col += len(tuples)
    return WorldInterp(preds, funcs)


def _entities(n: int) -> tuple[str, ...]:
    return tuple(f"e{i + 1}" for i in range(n))


def _worlds(k: int) -> tuple[str, ...]:
    return tuple(f"w{i + 1}" for i in range(k))


def enumerate_structures(sig: Signature, bounds: Bounds,
                         cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[ModalStructure]:
    """Every structure with at most max_worlds worlds over at most max_domain
    entities, in a fixed order: domain size, then world count, then rigid
    choice, then world interpretations lexicographically."""
    total = count_structures(sig, bounds)
    if total > cap:
        raise EnumerationLimitError(f"{total} structures exceed the cap of {cap}")
    for n in range(1, bounds.max_domain + 1):
        domain = _entities(n)
        wr = _world_radices(sig, n)
        rr = _rigid_radices(sig, n)
        world_rows = mixed_radix(math.prod(wr), wr)
        rigid_rows = mixed_radix(math.prod(rr), rr)
        for k in range(1, bounds.max_worlds + 1):
            worlds = _worlds(k)
            for r in rigid_rows:
                decoded = [_decode_world(sig, n, domain, r, row) for row in world_rows]
                for combo in itertools.product(range(len(world_rows)), repeat=k):
                    yield ModalStructure(sig, worlds, domain,
                                         {w: decoded[i] for w, i in zip(worlds, combo)})


# ---------------------------------------------------------------------------
# Countermodels


@dataclass(frozen=True)
class Countermodel:
    structure: ModalStructure
    pair: tuple[str, str]


def signature_of(formulas: Iterable[Formula], sig: Signature) -> Signature:
    names: set[str] = set()
    for f in formulas:
        p, fn = symbols(f)
        names |= set(p) | set(fn)
    missing = names - sig.symbols()
    if missing:
        raise EvaluationError(f"symbols not in signature: {sorted(missing)}")
    return sig.restrict(names)


def find_countermodel(qs: Sequence[Question], chi: Formula, q: Question, bounds: Bounds,
                      sig: Signature, cap: int = DEFAULT_ENUMERATION_CAP) -> Countermodel | None:
    """A structure satisfying chi everywhere with two worlds related by the
    questions qs but not by q, or None if there is none within bounds.

    None means "unknown at these bounds", not entailment.  Only two-world
    structures are searched: restricting any countermodel to its witnessing
    pair of worlds is again a countermodel.
    """
    if free_variables(chi):
        raise EvaluationError("the context formula must be closed")
    if bounds.max_worlds < 2:
        return None
    qs = list(qs)
    sub = signature_of([chi, q.body] + [x.body for x in qs], sig)
    for n in range(1, bounds.max_domain + 1):
        wr = _world_radices(sub, n)
        rr = _rigid_radices(sub, n)
        nworld, nrigid = math.prod(wr), math.prod(rr)
        if nworld * nrigid > cap:
            raise EnumerationLimitError(f"{nworld * nrigid} world tables at domain size {n} exceed the cap of {cap}")
        layout = Layout(dict(sub.predicates), {k: f.arity for k, f in sub.functions.items()}, n)
        world_rows = mixed_radix(nworld, wr)
        chi_prog = compile_formula(chi, layout)
        q_progs = [compile_formula(x.body, layout) for x in qs]
        target = compile_formula(q.body, layout)
        for r in mixed_radix(nrigid, rr):
            ptabs, ftabs = _tables(sub, layout, r, world_rows)
            ok = kernels.truth_table(chi_prog, n, ptabs, ftabs)[:, 0]
            if q_progs:
                keys = np.concatenate([kernels.truth_table(p, n, ptabs, ftabs) for p in q_progs], axis=1)
            else:
                keys = np.zeros((len(world_rows), 0), dtype=np.uint8)
            vals = kernels.truth_table(target, n, ptabs, ftabs)
            seen: dict[bytes, int] = {}
            for i in np.flatnonzero(ok):
                key = keys[i].tobytes()
                j = seen.get(key)
                if j is None:
                    seen[key] = i
                elif not np.array_equal(vals[i], vals[j]):
                    domain = _entities(n)
                    interp = {"w1": _decode_world(sub, n, domain, r, world_rows[j]),
                              "w2": _decode_world(sub, n, domain, r, world_rows[i])}
                    return Countermodel(ModalStructure(sub, ("w1", "w2"), domain, interp), ("w1", "w2"))
    return None


def is_countermodel(m: ModalStructure, pair: tuple[str, str], qs: Sequence[Question],
                    chi: Formula, q: Question) -> bool:
    """Check a claimed countermodel with the reference evaluator."""
    w, v = pair
    if not holds_globally(m, chi):
        return False

    def agree(f: Formula) -> bool:
        fv = free_variables(f)
        for vals in itertools.product(m.domain, repeat=len(fv)):
            g = dict(zip(fv, vals))
            if evaluate(m, w, g, f) != evaluate(m, v, g, f):
                return False
        return True

    return all(agree(x.body) for x in qs) and not agree(q.body)


# ---------------------------------------------------------------------------
# Two-world correspondence


def two_world_correspondence(m: ModalStructure, w: str, v: str) -> ModalStructure:
    """Single-world structure over the doubled signature: unprimed symbols read
    at w, primed copies at v, rigid functions shared."""
    if w not in m.interp or v not in m.interp:
        raise KeyError("world not in structure")
    wi, vi = m.interp[w], m.interp[v]
    preds = {}
    funcs = {}
    for name in m.sig.predicates:
        preds[name] = wi.predicates.get(name, frozenset())
        preds[prime_name(name)] = vi.predicates.get(name, frozenset())
    for name, spec in m.sig.functions.items():
        funcs[name] = wi.functions[name]
        if not spec.rigid:
            funcs[prime_name(name)] = vi.functions[name]
    world = f"{w}|{v}"
    return ModalStructure(m.sig.doubled(), (world,), m.domain, {world: WorldInterp(preds, funcs)})


def satisfies(m: ModalStructure, f: Formula) -> bool:
    """Classical truth of a closed formula in a single-world structure."""
    if len(m.worlds) != 1:
        raise ValueError("expected a single-world structure")
    return evaluate(m, m.worlds[0], {}, f)


def enumerate_classical(sig: Signature, max_domain: int,
                        cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[tuple[int, Layout, np.ndarray, np.ndarray, callable]]:
    """Batches of single-world tables over `sig` for each domain size, with a
    decoder from row index to ModalStructure.  All functions vary freely, so
    rigidity is irrelevant here."""
    flat = Signature(sig.predicates, {k: (f.arity, False) for k, f in sig.functions.items()})
    for n in range(1, max_domain + 1):
        wr = _world_radices(flat, n)
        count = math.prod(wr)
        if count > cap:
            raise EnumerationLimitError(f"{count} classical structures at size {n} exceed the cap")
        layout = Layout(dict(flat.predicates), {k: f.arity for k, f in flat.functions.items()}, n)
        rows = mixed_radix(count, wr)
        ptabs, ftabs = _tables(flat, layout, np.zeros(0, dtype=np.int32), rows)
        domain = _entities(n)

        def decode(i, rows=rows, n=n, domain=domain):
            wi = _decode_world(flat, n, domain, np.zeros(0, dtype=np.int32), rows[i])
            return ModalStructure(sig, ("w1",), domain, {"w1": wi})

        yield n, layout, ptabs, ftabs, decode
