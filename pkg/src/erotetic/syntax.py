"""First-order formulas with equality and rigid function symbols.

Formulas and terms are immutable dataclasses.  A term is a `Var` or a
`Func` application (constants are arity-0 applications).  Predicates are
never rigid; each function symbol carries a rigidity flag in the
`Signature`.

Priming (appending an apostrophe to every predicate and non-rigid function
symbol) builds the doubled vocabulary used to reduce question entailment to
ordinary entailment; see `prime` and `sharp`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Union

PRIME = "'"
RESERVED_PREFIX = "__"
KEYWORDS = frozenset({"forall", "exists", "true", "false"})
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class FormulaSyntaxError(ValueError):
    """Raised for lexical, grammatical and arity errors; carries the offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col = line, col
        super().__init__(f"{message} (line {line}, column {col})" if text else message)


class SignatureError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Signature


@dataclass(frozen=True)
class FunctionSymbol:
    arity: int
    rigid: bool


@dataclass(frozen=True)
class Signature:
    predicates: Mapping[str, int] = field(default_factory=dict)
    functions: Mapping[str, FunctionSymbol] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "predicates", dict(self.predicates))
        funcs = {}
        for name, spec in dict(self.functions).items():
            if not isinstance(spec, FunctionSymbol):
                arity, rigid = spec
                spec = FunctionSymbol(int(arity), bool(rigid))
            funcs[name] = spec
        object.__setattr__(self, "functions", funcs)
        clash = set(self.predicates) & set(funcs)
        if clash:
            raise SignatureError(f"names used both as predicate and function: {sorted(clash)}")
        for name, arity in list(self.predicates.items()) + [(n, f.arity) for n, f in funcs.items()]:
            if arity < 0:
                raise SignatureError(f"negative arity for {name!r}")

    def __hash__(self):
        return hash((tuple(sorted(self.predicates.items())), tuple(sorted(self.functions.items()))))

    # -- construction -----------------------------------------------------

    @classmethod
    def build(cls, predicates: Mapping[str, int] | None = None,
              rigid: Iterable[str] | Mapping[str, int] = (),
              nonrigid: Iterable[str] | Mapping[str, int] = ()) -> "Signature":
        """Shorthand: `rigid`/`nonrigid` are constant names or name->arity maps."""
        funcs = {}
        for names, flag in ((rigid, True), (nonrigid, False)):
            items = names.items() if isinstance(names, Mapping) else ((n, 0) for n in names)
            for n, a in items:
                funcs[n] = FunctionSymbol(a, flag)
        return cls(dict(predicates or {}), funcs)

    @classmethod
    def from_json(cls, data: Union[str, Mapping]) -> "Signature":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            preds = {str(k): int(v) for k, v in data.get("predicates", {}).items()}
            funcs = {str(k): FunctionSymbol(int(v["arity"]), bool(v.get("rigid", False)))
                     for k, v in data.get("functions", {}).items()}
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise SignatureError(f"malformed signature: {exc}") from exc
        sig = cls(preds, funcs)
        sig.validate_user()
        return sig

    @classmethod
    def load(cls, path: str | Path) -> "Signature":
        return cls.from_json(Path(path).read_text())

    def to_json(self) -> dict:
        return {
            "predicates": dict(sorted(self.predicates.items())),
            "functions": {n: {"arity": f.arity, "rigid": f.rigid}
                          for n, f in sorted(self.functions.items())},
        }

    def validate_user(self) -> None:
        for name in list(self.predicates) + list(self.functions):
            if not _IDENT_RE.match(name) or name in KEYWORDS:
                raise SignatureError(f"invalid symbol name {name!r}")
            if name.startswith(RESERVED_PREFIX):
                raise SignatureError(f"symbol {name!r} uses the reserved '__' prefix")

    # -- queries ----------------------------------------------------------

    def is_predicate(self, name: str) -> bool:
        return name in self.predicates

    def is_function(self, name: str) -> bool:
        return name in self.functions

    def is_rigid(self, name: str) -> bool:
        return self.functions[name].rigid

    def rigid_constants(self) -> list[str]:
        return sorted(n for n, f in self.functions.items() if f.rigid and f.arity == 0)

    def symbols(self) -> set[str]:
        return set(self.predicates) | set(self.functions)

    # -- extension --------------------------------------------------------

    def with_predicate(self, name: str, arity: int) -> "Signature":
        return Signature({**self.predicates, name: arity}, self.functions)

    def with_function(self, name: str, arity: int, rigid: bool) -> "Signature":
        return Signature(self.predicates, {**self.functions, name: FunctionSymbol(arity, rigid)})

    def merge(self, other: "Signature") -> "Signature":
        return Signature({**self.predicates, **other.predicates},
                         {**self.functions, **other.functions})

    def restrict(self, names: Iterable[str]) -> "Signature":
        names = set(names)
        return Signature({n: a for n, a in self.predicates.items() if n in names},
                         {n: f for n, f in self.functions.items() if n in names})

    def doubled(self) -> "Signature":
        """Originals plus a primed copy of every predicate and non-rigid function."""
        preds = dict(self.predicates)
        funcs = dict(self.functions)
        for n, a in self.predicates.items():
            if not n.endswith(PRIME):
                preds[n + PRIME] = a
        for n, f in self.functions.items():
            if not f.rigid and not n.endswith(PRIME):
                funcs[n + PRIME] = FunctionSymbol(f.arity, False)
        return Signature(preds, funcs)


# ---------------------------------------------------------------------------
# Terms and formulas


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple = ()

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Term = Union[Var, Func]


def const(name: str) -> Func:
    return Func(name, ())


class Formula:
    __slots__ = ()

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, repr=False)
class Pred(Formula):
    name: str
    args: tuple = ()

    def __repr__(self):
        return f"Pred({self})"


@dataclass(frozen=True, repr=False)
class Eq(Formula):
    left: Term
    right: Term

    def __repr__(self):
        return f"Eq({self})"


@dataclass(frozen=True, repr=False)
class Not(Formula):
    body: Formula

    def __repr__(self):
        return f"Not({self.body!r})"


@dataclass(frozen=True, repr=False)
class BinOp(Formula):
    left: Formula
    right: Formula
    symbol = "?"

    def __repr__(self):
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class And(BinOp):
    symbol = "&"


@dataclass(frozen=True, repr=False)
class Or(BinOp):
    symbol = "|"


@dataclass(frozen=True, repr=False)
class Implies(BinOp):
    symbol = "->"


@dataclass(frozen=True, repr=False)
class Iff(BinOp):
    symbol = "<->"


@dataclass(frozen=True, repr=False)
class Quant(Formula):
    var: str
    body: Formula
    keyword = "?"

    def __repr__(self):
        return f"{type(self).__name__}({self.var!r}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Forall(Quant):
    keyword = "forall"


@dataclass(frozen=True, repr=False)
class Exists(Quant):
    keyword = "exists"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "TOP"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "BOT"


TOP = Top()
BOT = Bottom()


@dataclass(frozen=True)
class Question:
    body: Formula

    def __str__(self):
        return f"?{pretty(self.body)}"


def conj(formulas: Iterable[Formula]) -> Formula:
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return TOP if out is None else out


def disj(formulas: Iterable[Formula]) -> Formula:
    out = None
    for f in formulas:
        out = f if out is None else Or(out, f)
    return BOT if out is None else out


def forall_all(variables: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = Forall(v, body)
    return body


def exists_all(variables: Iterable[str], body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = Exists(v, body)
    return body


# ---------------------------------------------------------------------------
# Traversals


def term_variables(t: Term, out: dict | None = None) -> dict:
    """Ordered (insertion-order dict) variables of a term."""
    if out is None:
        out = {}
    if isinstance(t, Var):
        out.setdefault(t.name, None)
    else:
        for a in t.args:
            term_variables(a, out)
    return out


def _free(f: Formula, bound: frozenset, out: dict) -> None:
    if isinstance(f, Pred):
        for a in f.args:
            for v in term_variables(a):
                if v not in bound:
                    out.setdefault(v, None)
    elif isinstance(f, Eq):
        for t in (f.left, f.right):
            for v in term_variables(t):
                if v not in bound:
                    out.setdefault(v, None)
    elif isinstance(f, Not):
        _free(f.body, bound, out)
    elif isinstance(f, BinOp):
        _free(f.left, bound, out)
        _free(f.right, bound, out)
    elif isinstance(f, Quant):
        _free(f.body, bound | {f.var}, out)


def free_variables(f: Formula) -> tuple[str, ...]:
    """Free variables in order of first occurrence, left to right."""
    out: dict = {}
    _free(f, frozenset(), out)
    return tuple(out)


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


def all_variables(f: Formula) -> set[str]:
    """Every variable name occurring in f, free or bound."""
    out: set[str] = set()
    for node in walk(f):
        if isinstance(node, Quant):
            out.add(node.var)
        for t in atom_terms(node):
            out.update(term_variables(t))
    return out


def walk(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from walk(f.body)
    elif isinstance(f, BinOp):
        yield from walk(f.left)
        yield from walk(f.right)
    elif isinstance(f, Quant):
        yield from walk(f.body)


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, Pred):
        return f.args
    if isinstance(f, Eq):
        return (f.left, f.right)
    return ()


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, Func):
        for a in t.args:
            yield from subterms(a)


def symbols(f: Formula) -> tuple[dict[str, int], dict[str, int]]:
    """(predicate name -> arity, function name -> arity) occurring in f."""
    preds: dict[str, int] = {}
    funcs: dict[str, int] = {}
    for node in walk(f):
        if isinstance(node, Pred):
            preds[node.name] = len(node.args)
        for t in atom_terms(node):
            for s in subterms(t):
                if isinstance(s, Func):
                    funcs[s.name] = len(s.args)
    return preds, funcs


def symbol_names(f: Formula) -> set[str]:
    p, fn = symbols(f)
    return set(p) | set(fn)


def has_equality(f: Formula) -> bool:
    return any(isinstance(n, Eq) for n in walk(f))


def size(f: Formula) -> int:
    """Number of formula nodes; atoms, identities, TOP and BOT count one."""
    if isinstance(f, Not):
        return 1 + size(f.body)
    if isinstance(f, BinOp):
        return 1 + size(f.left) + size(f.right)
    if isinstance(f, Quant):
        return 1 + size(f.body)
    return 1


def map_terms(f: Formula, fn) -> Formula:
    """Rebuild f with fn applied to every top-level atom argument (no binder care)."""
    if isinstance(f, Pred):
        return Pred(f.name, tuple(fn(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(fn(f.left), fn(f.right))
    if isinstance(f, Not):
        return Not(map_terms(f.body, fn))
    if isinstance(f, BinOp):
        return type(f)(map_terms(f.left, fn), map_terms(f.right, fn))
    if isinstance(f, Quant):
        return type(f)(f.var, map_terms(f.body, fn))
    return f


# ---------------------------------------------------------------------------
# Substitution


def fresh_name(base: str, used: Iterable[str]) -> str:
    """Base name (trailing digits stripped) plus the least unused numeric suffix."""
    used = set(used)
    stem = base.rstrip("0123456789") or base
    k = 0
    while f"{stem}{k}" in used:
        k += 1
    return f"{stem}{k}"


def substitute_term(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    if not t.args:
        return t
    return Func(t.name, tuple(substitute_term(a, sigma) for a in t.args))


def substitute(f: Formula, sigma: Mapping[str, Term], avoid: Iterable[str] = ()) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables.

    A bound variable is renamed only when a substituted term would otherwise
    be captured; `avoid` lists extra names (e.g. constants) a renamed
    variable must not take.
    """
    sigma = {v: t for v, t in sigma.items() if not (isinstance(t, Var) and t.name == v)}
    if not sigma:
        return f
    return _subst(f, sigma, frozenset(avoid))


def _subst(f: Formula, sigma: Mapping[str, Term], avoid: frozenset) -> Formula:
    if isinstance(f, Pred):
        return Pred(f.name, tuple(substitute_term(a, sigma) for a in f.args))
    if isinstance(f, Eq):
        return Eq(substitute_term(f.left, sigma), substitute_term(f.right, sigma))
    if isinstance(f, Not):
        return Not(_subst(f.body, sigma, avoid))
    if isinstance(f, BinOp):
        return type(f)(_subst(f.left, sigma, avoid), _subst(f.right, sigma, avoid))
    if isinstance(f, Quant):
        fv = set(free_variables(f.body))
        relevant = {k: t for k, t in sigma.items() if k != f.var and k in fv}
        if not relevant:
            return f
        range_vars: set[str] = set()
        for t in relevant.values():
            range_vars.update(term_variables(t))
        var = f.var
        if var in range_vars:
            used = fv | range_vars | set(relevant) | all_variables(f.body) | avoid
            var = fresh_name(f.var, used)
            relevant[f.var] = Var(var)
        return type(f)(var, _subst(f.body, relevant, avoid))
    return f


def rename_bound(f: Formula, avoid: Iterable[str]) -> Formula:
    """Alpha-rename every bound variable whose name is in `avoid`."""
    avoid = set(avoid)

    def go(g: Formula, used: set) -> Formula:
        if isinstance(g, Not):
            return Not(go(g.body, used))
        if isinstance(g, BinOp):
            return type(g)(go(g.left, used), go(g.right, used))
        if isinstance(g, Quant):
            if g.var in avoid:
                new = fresh_name(g.var, used | all_variables(g.body) | avoid)
                body = substitute(g.body, {g.var: Var(new)})
                return type(g)(new, go(body, used | {new}))
            return type(g)(g.var, go(g.body, used | {g.var}))
        return g

    return go(f, set(free_variables(f)) | avoid)


# ---------------------------------------------------------------------------
# Alpha equivalence


def _alpha_term(t: Term, env: Mapping[str, int]):
    if isinstance(t, Var):
        lvl = env.get(t.name)
        return ("v", t.name) if lvl is None else ("b", lvl)
    return ("f", t.name) + tuple(_alpha_term(a, env) for a in t.args)


def _alpha(f: Formula, env: Mapping[str, int], depth: int):
    if isinstance(f, Pred):
        return ("P", f.name) + tuple(_alpha_term(a, env) for a in f.args)
    if isinstance(f, Eq):
        return ("=", _alpha_term(f.left, env), _alpha_term(f.right, env))
    if isinstance(f, Not):
        return ("~", _alpha(f.body, env, depth))
    if isinstance(f, BinOp):
        return (f.symbol, _alpha(f.left, env, depth), _alpha(f.right, env, depth))
    if isinstance(f, Quant):
        return (f.keyword, _alpha(f.body, {**env, f.var: depth}, depth + 1))
    return ("T",) if isinstance(f, Top) else ("F",)


def alpha_key(f: Formula) -> tuple:
    """Hashable key identifying f up to renaming of bound variables."""
    return _alpha(f, {}, 0)


def alpha_equal(a: Formula, b: Formula) -> bool:
    return alpha_key(a) == alpha_key(b)


def alpha_normalize(f: Formula, prefix: str = "v") -> Formula:
    """Rename bound variables to prefix0, prefix1, ... in binder order."""
    counter = [0]
    taken = set(free_variables(f))

    def go(g: Formula, env: dict) -> Formula:
        if isinstance(g, (Pred, Eq)):
            return map_terms(g, lambda t: substitute_term(t, env))
        if isinstance(g, Not):
            return Not(go(g.body, env))
        if isinstance(g, BinOp):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, Quant):
            name = f"{prefix}{counter[0]}"
            while name in taken:
                counter[0] += 1
                name = f"{prefix}{counter[0]}"
            counter[0] += 1
            return type(g)(name, go(g.body, {**env, g.var: Var(name)}))
        return g

    return go(f, {})


# ---------------------------------------------------------------------------
# Rigidity and rigid-instance matching


def is_rigid_term(t: Term, sig: Signature) -> bool:
    if isinstance(t, Var):
        return True
    spec = sig.functions.get(t.name)
    if spec is None or not spec.rigid:
        return False
    return all(is_rigid_term(a, sig) for a in t.args)


def _match_term(ct: Term, pt: Term, cb: Mapping[str, int], pb: Mapping[str, int],
                sigma: dict, sig: Signature) -> bool:
    if isinstance(pt, Var):
        if pt.name in pb:
            return isinstance(ct, Var) and cb.get(ct.name) == pb[pt.name]
        if any(v in cb for v in term_variables(ct)):
            return False
        if not is_rigid_term(ct, sig):
            return False
        prev = sigma.get(pt.name)
        if prev is None:
            sigma[pt.name] = ct
            return True
        return prev == ct
    if not isinstance(ct, Func) or ct.name != pt.name or len(ct.args) != len(pt.args):
        return False
    return all(_match_term(c, p, cb, pb, sigma, sig) for c, p in zip(ct.args, pt.args))


def _match(c: Formula, p: Formula, cb: dict, pb: dict, depth: int, sigma: dict,
           sig: Signature) -> bool:
    if type(c) is not type(p):
        return False
    if isinstance(p, Pred):
        return (c.name == p.name and len(c.args) == len(p.args)
                and all(_match_term(x, y, cb, pb, sigma, sig) for x, y in zip(c.args, p.args)))
    if isinstance(p, Eq):
        return (_match_term(c.left, p.left, cb, pb, sigma, sig)
                and _match_term(c.right, p.right, cb, pb, sigma, sig))
    if isinstance(p, Not):
        return _match(c.body, p.body, cb, pb, depth, sigma, sig)
    if isinstance(p, BinOp):
        return (_match(c.left, p.left, cb, pb, depth, sigma, sig)
                and _match(c.right, p.right, cb, pb, depth, sigma, sig))
    if isinstance(p, Quant):
        return _match(c.body, p.body, {**cb, c.var: depth}, {**pb, p.var: depth},
                      depth + 1, sigma, sig)
    return True


def match_rigid_instance(candidate: Formula, pattern: Formula,
                         sig: Signature) -> dict[str, Term] | None:
    """Return sigma with rigid range such that pattern[sigma] is alpha-equal to
    candidate, or None.  The domain is exactly the free variables of pattern."""
    sigma: dict[str, Term] = {}
    if not _match(candidate, pattern, {}, {}, 0, sigma, sig):
        return None
    return {v: sigma[v] for v in free_variables(pattern)}


# ---------------------------------------------------------------------------
# Priming and the biconditional translation of questions


def prime_name(name: str) -> str:
    return name + PRIME


def unprime_name(name: str) -> str:
    return name[:-1] if name.endswith(PRIME) else name


def _map_symbols(f: Formula, pred_fn, func_fn) -> Formula:
    def term(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        return Func(func_fn(t.name), tuple(term(a) for a in t.args))

    def go(g: Formula) -> Formula:
        if isinstance(g, Pred):
            return Pred(pred_fn(g.name), tuple(term(a) for a in g.args))
        if isinstance(g, Eq):
            return Eq(term(g.left), term(g.right))
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, BinOp):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, Quant):
            return type(g)(g.var, go(g.body))
        return g

    return go(f)


def prime(f: Formula, sig: Signature) -> Formula:
    """Prime every predicate and every non-rigid function symbol."""
    names = symbol_names(f)
    if any(n.endswith(PRIME) for n in names):
        raise ValueError("formula already contains primed symbols")

    def func(name: str) -> str:
        spec = sig.functions.get(name)
        if spec is None:
            raise ValueError(f"undeclared function symbol {name!r}")
        return name if spec.rigid else prime_name(name)

    return _map_symbols(f, prime_name, func)


def unprime(f: Formula) -> Formula:
    return _map_symbols(f, unprime_name, unprime_name)


def sharp(q: Question, sig: Signature) -> Formula:
    """forall x1..xn (phi <-> phi*) over the free variables of the question body."""
    body = q.body
    return forall_all(free_variables(body), Iff(body, prime(body, sig)))


# ---------------------------------------------------------------------------
# Pretty printing

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_UNARY = 5
_ATOM = 6


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, BinOp):
        prec = _PREC[type(f)]
        if isinstance(f, Implies):
            s = f"{_fmt(f.left, prec + 1)} -> {_fmt(f.right, prec)}"
        else:
            s = f"{_fmt(f.left, prec)} {f.symbol} {_fmt(f.right, prec + 1)}"
    elif isinstance(f, Not):
        prec = _UNARY
        inner = _fmt(f.body, _UNARY)
        if isinstance(f.body, Eq):
            inner = f"({inner})"
        s = "~" + inner
    elif isinstance(f, Quant):
        prec = _UNARY
        s = f"{f.keyword} {f.var}. {_fmt(f.body, _UNARY)}"
    else:
        prec = _ATOM
        if isinstance(f, Pred):
            s = f.name if not f.args else f"{f.name}({', '.join(str(a) for a in f.args)})"
        elif isinstance(f, Eq):
            s = f"{f.left} = {f.right}"
        elif isinstance(f, Top):
            s = "true"
        else:
            s = "false"
    return f"({s})" if prec < ctx else s


def pretty(f: Formula) -> str:
    """ASCII rendering in the input grammar; parse_formula(pretty(f)) == f."""
    return _fmt(f, 0)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[~&|().,=])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, sig: Signature, internal: bool):
        self.text = text
        self.sig = sig
        self.internal = internal
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def error(self, msg: str, pos: int | None = None):
        raise FormulaSyntaxError(msg, self.text, self.peek()[2] if pos is None else pos)

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if value is not None and tok[1] != value:
            self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}")
        if kind is not None and tok[0] != kind:
            self.error(f"expected {kind}, found {tok[1] or 'end of input'!r}")
        self.i += 1
        return tok

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] == "op" and tok[1] == value

    def check_name(self, name: str, pos: int):
        if self.internal:
            return
        if PRIME in name:
            self.error(f"primed name {name!r} is reserved", pos)
        if name.startswith(RESERVED_PREFIX):
            self.error(f"name {name!r} uses the reserved '__' prefix", pos)

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "eof":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.at("<->"):
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.at("->"):
            self.take()
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "~":
            self.take()
            return Not(self.unary())
        if kind == "ident" and val in ("forall", "exists"):
            self.take()
            _, name, vpos = self.take(kind="ident")
            if name in KEYWORDS:
                self.error(f"keyword {name!r} cannot be a variable", vpos)
            if self.sig.is_predicate(name) or self.sig.is_function(name):
                self.error(f"cannot quantify over declared symbol {name!r}", vpos)
            self.check_name(name, vpos)
            self.take(".")
            body = self.unary()
            return Forall(name, body) if val == "forall" else Exists(name, body)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "op" and val == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if kind != "ident":
            self.error(f"expected a formula, found {val or 'end of input'!r}")
        if val == "true":
            self.take()
            return TOP
        if val == "false":
            self.take()
            return BOT
        if self.sig.is_predicate(val):
            self.take()
            self.check_name(val, pos)
            args = self.arglist() if self.at("(") else ()
            arity = self.sig.predicates[val]
            if len(args) != arity:
                self.error(f"predicate {val!r} expects {arity} argument(s), got {len(args)}", pos)
            return Pred(val, args)
        left = self.term()
        if not self.at("="):
            self.error("expected '=' after term (or an undeclared predicate was used)")
        self.take()
        return Eq(left, self.term())

    def arglist(self) -> tuple:
        self.take("(")
        args = [self.term()]
        while self.at(","):
            self.take()
            args.append(self.term())
        self.take(")")
        return tuple(args)

    def term(self) -> Term:
        kind, val, pos = self.take()
        if kind != "ident" or val in KEYWORDS:
            self.error(f"expected a term, found {val or 'end of input'!r}", pos)
        if self.sig.is_predicate(val):
            self.error(f"predicate {val!r} used as a term", pos)
        self.check_name(val, pos)
        spec = self.sig.functions.get(val)
        if spec is None:
            if self.at("("):
                self.error(f"undeclared function symbol {val!r} used with arguments", pos)
            return Var(val)
        args = self.arglist() if self.at("(") else ()
        if len(args) != spec.arity:
            self.error(f"function {val!r} expects {spec.arity} argument(s), got {len(args)}", pos)
        return Func(val, args)


def parse_formula(text: str, sig: Signature, internal: bool = False) -> Formula:
    """Parse ASCII formula syntax.  Undeclared argument-free identifiers are
    variables.  `internal=True` admits primed and '__' names."""
    return _Parser(text, sig, internal).parse()


def parse_term(text: str, sig: Signature, internal: bool = False) -> Term:
    p = _Parser(text, sig, internal)
    t = p.term()
    if p.peek()[0] != "eof":
        p.error(f"unexpected token {p.peek()[1]!r}")
    return t


def check_well_formed(f: Formula, sig: Signature) -> None:
    """Raise SignatureError unless every symbol of f is declared with its arity."""
    preds, funcs = symbols(f)
    for n, a in preds.items():
        if sig.predicates.get(n) != a:
            raise SignatureError(f"predicate {n}/{a} not declared")
    for n, a in funcs.items():
        spec = sig.functions.get(n)
        if spec is None or spec.arity != a:
            raise SignatureError(f"function {n}/{a} not declared")
