"""TPTP FOF export of sequents."""

from __future__ import annotations

import re

from ..syntax import (
    And, Bottom, Eq, Exists, Forall, Formula, Iff, Implies, Not, Or, Pred, Top, Var, all_variables,
)

_LOWER_WORD = re.compile(r"[a-z][A-Za-z0-9_]*\Z")
_UPPER_WORD = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")


def functor(name: str) -> str:
    """TPTP functor: a lower word as is, anything else single-quoted."""
    if _LOWER_WORD.match(name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


def variable_names(f: Formula) -> dict[str, str]:
    """Map every variable of f to a distinct TPTP upper word, deterministically."""
    out: dict[str, str] = {}
    taken: set[str] = set()
    for v in sorted(all_variables(f)):
        base = re.sub(r"[^A-Za-z0-9_]", "_", v)
        base = base[0].upper() + base[1:] if base[0].isalpha() else "V" + base
        if not _UPPER_WORD.match(base):
            base = "V" + base
        name, k = base, 0
        while name in taken:
            k += 1
            name = f"{base}_{k}"
        taken.add(name)
        out[v] = name
    return out


def _term(t, vmap) -> str:
    if isinstance(t, Var):
        return vmap[t.name]
    if not t.args:
        return functor(t.name)
    return functor(t.name) + "(" + ",".join(_term(a, vmap) for a in t.args) + ")"


def to_tptp(f: Formula, vmap: dict[str, str] | None = None) -> str:
    if vmap is None:
        vmap = variable_names(f)
    if isinstance(f, Pred):
        if not f.args:
            return functor(f.name)
        return functor(f.name) + "(" + ",".join(_term(a, vmap) for a in f.args) + ")"
    if isinstance(f, Eq):
        return f"{_term(f.left, vmap)} = {_term(f.right, vmap)}"
    if isinstance(f, Top):
        return "$true"
    if isinstance(f, Bottom):
        return "$false"
    if isinstance(f, Not):
        inner = to_tptp(f.body, vmap)
        return f"~ ({inner})" if isinstance(f.body, Eq) else "~ " + inner
    ops = {And: "&", Or: "|", Implies: "=>", Iff: "<=>"}
    if type(f) in ops:
        return f"({to_tptp(f.left, vmap)} {ops[type(f)]} {to_tptp(f.right, vmap)})"
    if isinstance(f, (Forall, Exists)):
        q = "!" if isinstance(f, Forall) else "?"
        return f"{q} [{vmap[f.var]}] : {to_tptp(f.body, vmap)}"
    raise TypeError(f"not a formula: {f!r}")


def sequent_to_tptp(s, name: str = "sequent") -> str:
    """fof lines: one axiom per premise and the conclusion as conjecture."""
    lines = [f"% {name}"]
    for i, p in enumerate(s.premises):
        lines.append(f"fof(premise_{i + 1}, axiom, {to_tptp(p)}).")
    lines.append(f"fof(goal, conjecture, {to_tptp(s.conclusion)}).")
    return "\n".join(lines) + "\n"
