"""Entailment between questions, answerhood, and development extraction.

Question entailment ?φ₁,…,?φₙ ⊨_χ ?ψ is decided from two directions: a
bounded search for a two-world countermodel (which can only refute) and a
resolution proof of the first-order translation

    ∀x̄₁(φ₁ ↔ φ₁*), …, χ, χ* ⊨ ∀ȳ(ψ ↔ ψ*)

(which can only confirm).  When both run dry the verdict is Unknown.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .development import (
    DevelopmentVariant, Tree, check_development, pretty_term, rigid_ground_terms,
)
from .prover import (
    DEFAULT_BUDGET, FOSequent, InterpolationResult, Proof, Proved, check_proof,
    interpolate, prove, prove_grounded,
)
from .semantics import Bounds, Countermodel, find_countermodel, is_countermodel
from .syntax import (
    BOT, TOP, And, BinOp, Bottom, Formula, Func, Iff, Implies, Not, Or, Pred, Quant, Question, Signature,
    Top, Var, forall_all, free_variables, map_terms, pretty, prime, rename_bound, sharp, substitute,
    symbol_names, unprime,
)

FRESH_PREDICATE = "__Q"
FRESH_CONSTANT = "__c"


class AnswerhoodError(ValueError):
    """Invalid input to an answerhood operation."""


class SoundnessError(AssertionError):
    """The two engines disagree, or a produced artifact fails its own check."""


class ExtractionError(RuntimeError):
    """Extraction ran out of resources at a named step."""

    def __init__(self, step: str, message: str):
        super().__init__(f"{step}: {message}")
        self.step = step


@dataclass(frozen=True)
class EngineConfig:
    bounds: Bounds = field(default_factory=Bounds)
    prover_budget: int = DEFAULT_BUDGET
    grounding_depth: int = 1
    max_grounding_depth: int = 2
    variant: DevelopmentVariant = field(default_factory=DevelopmentVariant)
    # run the prover even after a countermodel is found, to catch disagreement
    cross_check: bool = False
    cross_check_budget: int = 2000

    def __post_init__(self):
        if self.prover_budget <= 0:
            raise ValueError("prover budget must be positive")
        if self.grounding_depth < 0 or self.max_grounding_depth < self.grounding_depth:
            raise ValueError("bad grounding depth")


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Entailed:
    proof: Proof
    sequent: FOSequent
    kind = "ENTAILED"


@dataclass(frozen=True)
class NotEntailed:
    countermodel: Countermodel
    kind = "NOT_ENTAILED"


@dataclass(frozen=True)
class Unknown:
    bounds: Bounds
    budget_used: int
    kind = "UNKNOWN"


Verdict = Entailed | NotEntailed | Unknown


def translate_entailment(qs: Sequence[Question], chi: Formula, q: Question,
                         sig: Signature) -> FOSequent:
    """The first-order sequent equivalent to ?qs ⊨_chi ?q."""
    if free_variables(chi):
        raise AnswerhoodError("the context formula must be closed")
    try:
        premises = [sharp(x, sig) for x in qs] + [chi, prime(chi, sig)]
        conclusion = sharp(q, sig)
    except ValueError as exc:
        raise AnswerhoodError(str(exc)) from exc
    return FOSequent(tuple(premises), conclusion, sig.doubled())


def decide_entailment(qs: Sequence[Question], chi: Formula, q: Question, sig: Signature,
                      cfg: EngineConfig = EngineConfig()) -> Verdict:
    """Countermodel search first, then the prover; deterministic."""
    qs = list(qs)
    sequent = translate_entailment(qs, chi, q, sig)
    cm = find_countermodel(qs, chi, q, cfg.bounds, sig)
    if cm is not None:
        if not is_countermodel(cm.structure, cm.pair, qs, chi, q):
            raise SoundnessError("countermodel search returned a structure that does not refute")
        if cfg.cross_check:
            r = prove(sequent, cfg.cross_check_budget)
            if isinstance(r, Proved):
                raise SoundnessError(
                    f"prover proved a sequent with a countermodel: {pretty(sequent.conclusion)}")
        return NotEntailed(cm)
    r = prove(sequent, cfg.prover_budget)
    if isinstance(r, Proved):
        if not check_proof(r.proof):
            raise SoundnessError("prover emitted a proof that does not check")
        return Entailed(r.proof, sequent)
    return Unknown(cfg.bounds, r.generated)


def is_answer(psi: Formula, q: Question, chi: Formula, sig: Signature,
              cfg: EngineConfig = EngineConfig()) -> Verdict:
    """ψ answers ?φ under χ iff ?φ ⊨_χ ?ψ; ψ must be closed."""
    if free_variables(psi):
        raise AnswerhoodError("an answer must not have free variables")
    return decide_entailment([q], chi, Question(psi), sig, cfg)


# ---------------------------------------------------------------------------
# Simplification


def simplify(f: Formula) -> Formula:
    """Fold ⊤/⊥ and remove double negations."""
    if isinstance(f, Not):
        b = simplify(f.body)
        if isinstance(b, Top):
            return BOT
        if isinstance(b, Bottom):
            return TOP
        if isinstance(b, Not):
            return b.body
        return Not(b)
    if isinstance(f, Quant):
        b = simplify(f.body)
        if isinstance(b, (Top, Bottom)):
            return b
        return type(f)(f.var, b)
    if isinstance(f, BinOp):
        l, r = simplify(f.left), simplify(f.right)
        if isinstance(f, And):
            if isinstance(l, Bottom) or isinstance(r, Bottom):
                return BOT
            if isinstance(l, Top):
                return r
            if isinstance(r, Top):
                return l
        elif isinstance(f, Or):
            if isinstance(l, Top) or isinstance(r, Top):
                return TOP
            if isinstance(l, Bottom):
                return r
            if isinstance(r, Bottom):
                return l
        elif isinstance(f, Implies):
            if isinstance(l, Bottom) or isinstance(r, Top):
                return TOP
            if isinstance(l, Top):
                return r
            if isinstance(r, Bottom):
                return simplify(Not(l))
        elif isinstance(f, Iff):
            if isinstance(l, Top):
                return r
            if isinstance(r, Top):
                return l
            if isinstance(l, Bottom):
                return simplify(Not(r))
            if isinstance(r, Bottom):
                return simplify(Not(l))
        return type(f)(l, r)
    return f


# ---------------------------------------------------------------------------
# Extraction


@dataclass
class ExtractionResult:
    development: Formula
    tree: Tree
    equivalence_proofs: tuple[Proof, Proof]
    trace: list[tuple[str, str]]
    interpolation: InterpolationResult | None = None


def _replace_predicate(f: Formula, name: str, body: Formula, params: Sequence[str]) -> Formula:
    """Replace every atom name(t̄) by body[params := t̄] (capture-avoiding)."""
    if isinstance(f, Pred):
        if f.name == name:
            return substitute(body, dict(zip(params, f.args)))
        return f
    if isinstance(f, Not):
        return Not(_replace_predicate(f.body, name, body, params))
    if isinstance(f, BinOp):
        return type(f)(_replace_predicate(f.left, name, body, params),
                       _replace_predicate(f.right, name, body, params))
    if isinstance(f, Quant):
        return type(f)(f.var, _replace_predicate(f.body, name, body, params))
    return f


def _atomic_question(phi: Formula) -> tuple[str, tuple[str, ...]] | None:
    if isinstance(phi, Pred) and all(isinstance(a, Var) for a in phi.args):
        names = tuple(a.name for a in phi.args)
        if len(set(names)) == len(names):
            return phi.name, names
    return None


def _prove_equivalence_direction(chi: Formula, goal: Formula, sig: Signature,
                                 cfg: EngineConfig) -> Proof | None:
    s = FOSequent((chi,), goal, sig)
    r = prove(s, cfg.prover_budget)
    if isinstance(r, Proved):
        return r.proof
    rigid = {n: f.arity for n, f in sig.functions.items() if f.rigid}
    for depth in range(cfg.grounding_depth, cfg.max_grounding_depth + 1):
        r = prove_grounded(s, rigid_ground_terms(sig, depth), rigid, depth, cfg.prover_budget)
        if isinstance(r, Proved):
            return r.proof
    return None


def equivalence_proofs(psi: Formula, theta: Formula, chi: Formula, sig: Signature,
                       cfg: EngineConfig) -> tuple[Proof, Proof] | None:
    """Proofs of χ ⊨ ∀ȳ(ψ→ϑ) and χ ⊨ ∀ȳ(ϑ→ψ), or None if either is not found."""
    ys = list(dict.fromkeys(free_variables(psi) + free_variables(theta)))
    fwd = _prove_equivalence_direction(chi, forall_all(ys, Implies(psi, theta)), sig, cfg)
    if fwd is None:
        return None
    bwd = _prove_equivalence_direction(chi, forall_all(ys, Implies(theta, psi)), sig, cfg)
    if bwd is None:
        return None
    return fwd, bwd


def extract_development(psi: Formula, q: Question, chi: Formula, sig: Signature,
                        cfg: EngineConfig = EngineConfig()) -> ExtractionResult:
    """A development ϑ of q.body with χ ⊨ ∀ȳ(ψ ↔ ϑ), built by interpolation.

    ψ may have free variables ȳ.  Raises ExtractionError when a resource
    bound is hit and SoundnessError when the result fails verification.
    """
    if free_variables(chi):
        raise AnswerhoodError("the context formula must be closed")
    phi = q.body
    trace: list[tuple[str, str]] = []

    # (1) the question as an atom
    atomic = _atomic_question(phi)
    if atomic is not None:
        pname, xs = atomic
        sig1, chi1 = sig, chi
        trace.append(("question predicate", f"{pretty(phi)} is atomic; no fresh predicate"))
    else:
        xs = free_variables(phi)
        pname = FRESH_PREDICATE
        sig1 = sig.with_predicate(pname, len(xs))
        definition = forall_all(xs, Iff(Pred(pname, tuple(Var(x) for x in xs)), phi))
        chi1 = definition if isinstance(chi, Top) else And(chi, definition)
        trace.append(("fresh predicate", pretty(definition)))
    atom = Pred(pname, tuple(Var(x) for x in xs))

    # (2) translation
    seq = translate_entailment([Question(atom)], chi1, Question(psi), sig1)
    trace.append(("translation", " , ".join(pretty(p) for p in seq.premises)
                  + " |= " + pretty(seq.conclusion)))

    # (3) fresh constants for the free variables of ψ
    ys = free_variables(psi)
    consts = [Func(f"{FRESH_CONSTANT}{i}", ()) for i in range(len(ys))]
    sig2 = sig1
    for c in consts:
        sig2 = sig2.with_function(c.name, 0, True)
    psi_c = substitute(psi, dict(zip(ys, consts)))
    trace.append(("fresh constants", ", ".join(f"{y} := {c.name}" for y, c in zip(ys, consts)) or "none"))

    # (4) interpolation sequent
    bridge = forall_all(xs, Iff(atom, prime(atom, sig2)))
    left = [bridge, prime(chi1, sig2), prime(psi_c, sig2)]
    right = [chi1, Not(psi_c)]
    trace.append(("interpolation sequent", " , ".join(pretty(f) for f in left)
                  + " |= " + pretty(Implies(chi1, psi_c))))

    # (5)-(6) ground, refute, interpolate
    rigid = {n: f.arity for n, f in sig2.functions.items() if f.rigid}
    result = None
    for depth in range(cfg.grounding_depth, cfg.max_grounding_depth + 1):
        pool = consts + [t for t in rigid_ground_terms(sig, depth)]
        result = interpolate(left, right, pool, rigid, depth, cfg.prover_budget)
        trace.append(("grounding", f"depth {depth}, pool {{{', '.join(pretty_term(t) for t in pool)}}}: "
                      + ("refuted" if result else "no refutation within budget")))
        if result is not None:
            break
    if result is None:
        raise ExtractionError("ground refutation", "no refutation within the grounding depth and budget")
    theta = result.interpolant
    trace.append(("ground interpolant", pretty(result.ground_interpolant)))
    trace.append(("lifted interpolant", pretty(theta)))
    allowed = {pname} | {c.name for c in consts} | {n for n, f in sig2.functions.items() if f.rigid}
    stray = symbol_names(theta) - allowed
    if stray:
        raise SoundnessError(f"interpolant mentions {sorted(stray)}")

    # (7) unpriming
    theta = unprime(theta)
    trace.append(("unprimed", pretty(theta)))

    # (8) ⊤ / ⊥ elimination
    theta = simplify(theta)
    closed_atom = forall_all(xs, atom)
    if isinstance(theta, Top):
        theta = Or(closed_atom, Not(closed_atom))
    elif isinstance(theta, Bottom):
        theta = And(closed_atom, Not(closed_atom))
    trace.append(("constants eliminated", pretty(theta)))

    # (9) back to the original question body
    if atomic is None:
        theta = _replace_predicate(theta, pname, phi, xs)
        trace.append(("fresh predicate replaced", pretty(theta)))

    # (10) constants back to variables
    if consts:
        theta = rename_bound(theta, ys)
        back = {c: Var(y) for c, y in zip(consts, ys)}
        theta = map_terms(theta, lambda t: _replace_consts(t, back))
        trace.append(("regeneralized", pretty(theta)))
    theta = simplify(theta)
    trace.append(("simplified", pretty(theta)))

    tree = check_development(theta, [phi], sig)
    if tree is None:
        raise SoundnessError(f"extracted formula {pretty(theta)} is not a development of {pretty(phi)}")
    proofs = equivalence_proofs(psi, theta, chi, sig, cfg)
    if proofs is None:
        raise ExtractionError("equivalence proof", f"could not prove the equivalence of {pretty(theta)}")
    return ExtractionResult(theta, tree, proofs, trace, result)


def _replace_consts(t, back):
    if isinstance(t, Func):
        if t in back:
            return back[t]
        return Func(t.name, tuple(_replace_consts(a, back) for a in t.args))
    return t



def verify_extraction(r: ExtractionResult, psi: Formula, q: Question, chi: Formula, sig: Signature,
                      cfg: EngineConfig = EngineConfig()) -> bool:
    """The development is one of q.body and is provably equivalent to ψ under χ."""
    if check_development(r.development, [q.body], sig) is None:
        return False
    return equivalence_proofs(psi, r.development, chi, sig, cfg) is not None
