"""`qa`: command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 unknown (budget or
bounds exhausted), 3 usage or input error, 4 internal soundness error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .answerhood import (
    EngineConfig, Entailed, ExtractionError, NotEntailed, SoundnessError, decide_entailment,
    extract_development, is_answer, translate_entailment, verify_extraction,
)
from .development import (
    VARIANTS, DevelopmentVariant, check_development, classify_answer, enumerate_developments,
    tree_str, tree_to_json,
)
from .prover import sequent_to_tptp
from .semantics import Bounds, ModalStructure, StructureError, questions_partition
from .syntax import (
    TOP, FormulaSyntaxError, Question, Signature, SignatureError, free_variables, parse_formula,
    pretty,
)

EXIT_POSITIVE, EXIT_NEGATIVE, EXIT_UNKNOWN, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _text_arg(value: str) -> str:
    """`@path` reads the argument from a file."""
    if value.startswith("@"):
        try:
            return Path(value[1:]).read_text().strip()
        except OSError as exc:
            raise UsageError(f"cannot read {value[1:]}: {exc.strerror}") from exc
    return value


def _json_arg(value: str, what: str):
    """Inline JSON (starting with '{') or a path, optionally prefixed with '@'."""
    text = value if value.lstrip().startswith("{") else None
    if text is None:
        path = value[1:] if value.startswith("@") else value
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {what} file {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def _formula(args, text: str, what: str):
    try:
        return parse_formula(_text_arg(text), args.signature)
    except FormulaSyntaxError as exc:
        raise UsageError(f"{what}: {exc}") from exc


def _closed(args, text: str, what: str):
    f = _formula(args, text, what)
    if free_variables(f):
        raise UsageError(f"{what} must be closed; free: {', '.join(free_variables(f))}")
    return f


def _config(args) -> EngineConfig:
    return EngineConfig(
        bounds=Bounds(args.max_worlds, args.max_domain),
        prover_budget=args.budget,
        grounding_depth=args.depth,
        max_grounding_depth=args.depth + 1,
        variant=args.variant_obj,
        cross_check=True,
    )


def _countermodel_json(cm) -> dict:
    return {"pair": list(cm.pair), "structure": cm.structure.to_json()}


# ---------------------------------------------------------------------------
# Commands; each returns (exit code, text lines, json payload)


def _verdict(v):
    if isinstance(v, Entailed):
        lines = ["ENTAILED", f"proof: {len(v.proof.used_steps())} steps"]
        return EXIT_POSITIVE, lines, {"verdict": v.kind, "proof_steps": len(v.proof.used_steps()),
                                      "proof": v.proof.to_text()}
    if isinstance(v, NotEntailed):
        cm = _countermodel_json(v.countermodel)
        lines = ["NOT_ENTAILED",
                 f"countermodel: worlds {cm['pair'][0]}, {cm['pair'][1]}",
                 json.dumps(cm["structure"], sort_keys=True)]
        return EXIT_NEGATIVE, lines, {"verdict": v.kind, "countermodel": cm}
    lines = ["UNKNOWN", f"bounds: worlds <= {v.bounds.max_worlds}, domain <= {v.bounds.max_domain}; "
             f"clauses generated: {v.budget_used}"]
    return EXIT_UNKNOWN, lines, {"verdict": v.kind, "budget_used": v.budget_used,
                                 "bounds": {"max_worlds": v.bounds.max_worlds,
                                            "max_domain": v.bounds.max_domain}}


def cmd_check_entailment(args):
    qs = [Question(_formula(args, q, "question")) for q in args.question]
    if not args.target:
        raise UsageError("--target is required")
    target = Question(_formula(args, args.target, "target"))
    return _verdict(decide_entailment(qs, args.chi, target, args.signature, _config(args)))


def cmd_check_answer(args):
    if not args.answer or len(args.question) != 1:
        raise UsageError("check-answer needs --answer and exactly one --question")
    psi = _closed(args, args.answer, "answer")
    q = Question(_formula(args, args.question[0], "question"))
    return _verdict(is_answer(psi, q, args.chi, args.signature, _config(args)))


def cmd_check_development(args):
    if not args.of or not args.candidate:
        raise UsageError("check-development needs --of and --candidate")
    phis = [_formula(args, f, "--of") for f in args.of]
    psi = _formula(args, args.candidate, "candidate")
    tree = check_development(psi, phis, args.signature, args.variant_obj)
    if tree is None:
        return EXIT_NEGATIVE, ["NOT_DEVELOPMENT"], {"verdict": "NOT_DEVELOPMENT"}
    lines = ["DEVELOPMENT", tree_str(tree)]
    payload = {"verdict": "DEVELOPMENT", "tree": tree_to_json(tree)}
    if args.classify:
        c = classify_answer(psi, tree, args.signature, min(args.budget, 2000))
        fields = {"tautology": c.is_tautology, "contradiction": c.is_contradiction,
                  "atomic": c.is_atomic, "existential_free": c.existential_free}
        lines.append("classification: " + ", ".join(f"{k}={v}" for k, v in fields.items()))
        payload["classification"] = fields
    return EXIT_POSITIVE, lines, payload


def cmd_extract(args):
    if not args.answer or len(args.question) != 1:
        raise UsageError("extract needs --answer and exactly one --question")
    psi = _formula(args, args.answer, "answer")
    q = Question(_formula(args, args.question[0], "question"))
    cfg = _config(args)
    v = decide_entailment([q], args.chi, Question(psi), args.signature, cfg)
    if not isinstance(v, Entailed):
        return _verdict(v)
    try:
        r = extract_development(psi, q, args.chi, args.signature, cfg)
    except ExtractionError as exc:
        return EXIT_UNKNOWN, ["UNKNOWN", f"extraction failed at step '{exc.step}': {exc}"], \
            {"verdict": "UNKNOWN", "failed_step": exc.step, "message": str(exc)}
    lines = ["EXTRACTED", f"development: {pretty(r.development)}"]
    lines += [f"  {step}: {detail}" for step, detail in r.trace]
    lines.append(tree_str(r.tree))
    payload = {"verdict": "EXTRACTED", "development": pretty(r.development),
               "tree": tree_to_json(r.tree),
               "trace": [{"step": s, "detail": d} for s, d in r.trace],
               "equivalence_proof_steps": [len(p.used_steps()) for p in r.equivalence_proofs]}
    if args.verify:
        ok = verify_extraction(r, psi, q, args.chi, args.signature, cfg)
        if not ok:
            raise SoundnessError("extracted development failed verification")
        lines.append("verified: true")
        payload["verified"] = True
    return EXIT_POSITIVE, lines, payload


def cmd_partition(args):
    if not args.model:
        raise UsageError("partition needs --model")
    try:
        m = ModalStructure.from_json(_json_arg(args.model, "model"), args.signature)
    except StructureError as exc:
        raise UsageError(f"model: {exc}") from exc
    qs = [Question(_formula(args, q, "question")) for q in args.question]
    p = questions_partition(m, qs)
    blocks = [list(b) for b in p.blocks]
    return EXIT_POSITIVE, [" ".join(b) for b in blocks], {"blocks": blocks}


def cmd_enumerate_answers(args):
    phis = [_formula(args, f, "--of") for f in (args.of or [])]
    phis += [_formula(args, q, "question") for q in args.question]
    if not phis:
        raise UsageError("enumerate-answers needs --of or --question")
    if args.size is None:
        raise UsageError("enumerate-answers needs --size")
    cfg = _config(args)
    lines, answers = [], []
    for psi in enumerate_developments(phis, args.signature, args.size, args.variant_obj, args.depth):
        if free_variables(psi):
            continue
        entry = {"answer": pretty(psi)}
        text = pretty(psi)
        if args.verify:
            v = decide_entailment([Question(f) for f in phis], args.chi, Question(psi),
                                  args.signature, cfg)
            entry["verdict"] = v.kind
            text += f"\t{v.kind}"
        lines.append(text)
        answers.append(entry)
    return EXIT_POSITIVE, lines, {"answers": answers, "count": len(answers)}


def cmd_translate(args):
    qs = [Question(_formula(args, q, "question")) for q in args.question]
    if not args.target:
        raise UsageError("--target is required")
    target = Question(_formula(args, args.target, "target"))
    try:
        s = translate_entailment(qs, args.chi, target, args.signature)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.tptp:
        text = sequent_to_tptp(s, "question entailment").rstrip("\n")
        return EXIT_POSITIVE, text.split("\n"), {"tptp": text + "\n"}
    lines = [f"premise: {pretty(p)}" for p in s.premises] + [f"conclusion: {pretty(s.conclusion)}"]
    return EXIT_POSITIVE, lines, {"premises": [pretty(p) for p in s.premises],
                                  "conclusion": pretty(s.conclusion)}


COMMANDS = {
    "check-entailment": (cmd_check_entailment, "decide ?Q1,...,?Qn |=_chi ?T"),
    "check-answer": (cmd_check_answer, "decide whether a closed formula answers a question"),
    "check-development": (cmd_check_development, "check a candidate against the development grammar"),
    "extract": (cmd_extract, "extract a development equivalent to an answer"),
    "partition": (cmd_partition, "print the partition a question set induces on a model"),
    "enumerate-answers": (cmd_enumerate_answers, "list closed developments up to a size"),
    "translate": (cmd_translate, "print the first-order translation of an entailment"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sig", required=True, help="signature JSON file (or inline JSON)")
    common.add_argument("--context", help="context formula chi (default: true); @file accepted")
    common.add_argument("--question", action="append", default=[], help="question body (repeatable)")
    common.add_argument("--target", help="target question body")
    common.add_argument("--of", action="append", help="formula to develop (repeatable)")
    common.add_argument("--candidate", help="candidate development")
    common.add_argument("--answer", help="answer formula")
    common.add_argument("--model", help="model JSON file (or inline JSON)")
    common.add_argument("--max-worlds", type=int, default=2)
    common.add_argument("--max-domain", type=int, default=3)
    common.add_argument("--budget", type=int, default=50_000, help="prover clause budget")
    common.add_argument("--depth", type=int, default=1, help="ground-term nesting depth")
    common.add_argument("--size", type=int, help="maximum formula size for enumeration")
    common.add_argument("--variant", default="default",
                        help="development variant: " + ", ".join(VARIANTS) + " (combine with '+')")
    common.add_argument("--classify", action="store_true", help="classify an accepted development")
    common.add_argument("--verify", action="store_true", help="verify answers / extraction")
    common.add_argument("--tptp", action="store_true", help="emit TPTP FOF")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--deterministic", action="store_true",
                        help="omit timing information so repeated runs are byte-identical")

    parser = _Parser(prog="qa", description="Questions, answers and developments in partition semantics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def run(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        try:
            args.signature = Signature.from_json(_json_arg(args.sig, "signature"))
        except SignatureError as exc:
            raise UsageError(f"signature: {exc}") from exc
        try:
            args.variant_obj = DevelopmentVariant.from_name(args.variant)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if min(args.max_worlds, args.max_domain, args.budget) <= 0 or args.depth < 0:
            raise UsageError("bounds, budget and depth must be positive")
        args.chi = _closed(args, args.context, "context") if args.context else TOP
        code, lines, payload = COMMANDS[args.command][0](args)
    except UsageError as exc:
        print(f"qa: error: {exc}", file=err)
        return EXIT_INPUT
    except SoundnessError as exc:
        print(f"qa: internal soundness error: {exc}", file=err)
        return EXIT_INTERNAL
    elapsed = time.perf_counter() - start
    if args.json:
        doc = {"command": args.command, **payload}
        if not args.deterministic:
            doc["elapsed_seconds"] = round(elapsed, 6)
        out.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")
        if not args.deterministic:
            print(f"time: {elapsed:.3f}s", file=err)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
