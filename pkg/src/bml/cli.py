"""Command-line front end.

Exit codes: 0 when every verdict is ok, 1 on any semantic failure
(type errors, failed properties, false relational queries, countermodels),
2 on parse or I/O failures.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time

from . import corpus, selfcheck
from .contexts import ContextError, RelKind, derives, pos, wf_context
from .cs4 import from_box
from .kernel import audit_derivation, check, format_derivation, infer
from .lambox import lambox_infer, print_boxtype, translate
from .parsing import (
    ParseError,
    parse_formula,
    parse_judgment,
    parse_lambox_judgment,
    parse_rel_query,
)
from .printing import print_formula, print_judgment, print_term
from .reduction import StepCapExceeded, normalize
from .semantics import (
    InvalidModel,
    InvalidStructure,
    ModelFormatError,
    UnassignedClassifier,
    load_model,
    satisfies,
)

OK, SEMANTIC_FAILURE, PARSE_FAILURE = 0, 1, 2


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise SystemExit(_report_io(str(exc)))


def _report_io(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return PARSE_FAILURE


def default_seed() -> int:
    env = os.environ.get("BML_SEED")
    return int(env) if env else 2024


def cmd_check(args) -> int:
    try:
        ctx, term, ann = parse_judgment(_read(args.file))
    except ParseError as exc:
        return _report_io(f"{args.file}: {exc}")
    try:
        wf_context(ctx)
    except ContextError as exc:
        print(f"fail {args.file}: ill-formed context: {exc}")
        return SEMANTIC_FAILURE
    result = check(ctx, term, ann) if ann is not None else infer(ctx, term)
    if not result.ok:
        print(f"fail {args.file}: {result.error}")
        return SEMANTIC_FAILURE
    if args.trace:
        print(format_derivation(result.derivation))
    print(f"ok   {args.file}: {print_judgment(ctx, term, result.type)}")
    return OK


def cmd_normalize(args) -> int:
    try:
        ctx, term, _ = parse_judgment(_read(args.file))
    except ParseError as exc:
        return _report_io(f"{args.file}: {exc}")
    try:
        wf_context(ctx)
    except ContextError as exc:
        print(f"fail {args.file}: ill-formed context: {exc}")
        return SEMANTIC_FAILURE
    here = pos(ctx)
    try:
        outcome = normalize(term, here, args.step_cap)
    except StepCapExceeded as exc:
        print(f"fail {args.file}: {exc}")
        return SEMANTIC_FAILURE
    if args.trace:
        for k, site in enumerate(outcome.sites):
            at = "/".join(map(str, site.path)) or "root"
            print(f"step {k} @ {site.position}: {site.kind.value} at {at}")
    print(f"{print_term(outcome.term)}")
    print(f"steps: {outcome.steps}", file=sys.stderr)
    return OK


def cmd_rel(args) -> int:
    try:
        ctx, _, _ = parse_judgment(_read(args.file))
    except ParseError:
        try:
            from .parsing import parse_context

            ctx = parse_context(_read(args.file))
        except ParseError as exc:
            return _report_io(f"{args.file}: {exc}")
    try:
        wf_context(ctx)
    except ContextError as exc:
        print(f"fail {args.file}: ill-formed context: {exc}")
        return SEMANTIC_FAILURE
    code = OK
    for query in args.queries:
        try:
            op, a, b = parse_rel_query(query)
        except ParseError as exc:
            return _report_io(f"query {query!r}: {exc}")
        kind = RelKind.PRE if op == "<=" else RelKind.MOD
        try:
            verdict = derives(ctx, kind, a, b)
        except ContextError as exc:
            print(f"fail {query}: {exc}")
            code = SEMANTIC_FAILURE
            continue
        print(f"{'ok  ' if verdict else 'fail'} {a} {op} {b}: {str(verdict).lower()}")
        if not verdict:
            code = SEMANTIC_FAILURE
    return code


def cmd_model(args) -> int:
    text = _read(args.file)
    try:
        model = load_model(text)
    except ModelFormatError as exc:
        return _report_io(f"{args.file}: {exc}")
    except (InvalidStructure, InvalidModel) as exc:
        print(f"fail {args.file}:")
        for violation in exc.violations:
            print(f"  {violation}")
        return SEMANTIC_FAILURE
    if args.model_command == "check":
        print(f"ok   {args.file}: valid model with {len(model.worlds)} world(s)")
        return OK
    # sat
    try:
        formula = parse_formula(args.formula)
    except ParseError as exc:
        return _report_io(f"formula: {exc}")
    rho = {"!": model.structures[args.world].root if args.world in model.structures else "!"}
    if args.assign:
        for binding in args.assign.split(","):
            name, _, elem = binding.partition("=")
            if not elem:
                return _report_io(f"bad assignment {binding!r}; use g=d")
            rho[name.strip()] = elem.strip()
    try:
        verdict = satisfies(model, args.world, args.elem, rho, formula)
    except (ValueError, UnassignedClassifier) as exc:
        print(f"fail {args.file}: {exc}")
        return SEMANTIC_FAILURE
    print(f"{'ok  ' if verdict else 'fail'} {args.world},{args.elem} |= "
          f"{print_formula(formula)}: {str(verdict).lower()}")
    return OK if verdict else SEMANTIC_FAILURE


def cmd_translate_s4(args) -> int:
    try:
        stack, term, ann = parse_lambox_judgment(_read(args.file))
    except ParseError as exc:
        return _report_io(f"{args.file}: {exc}")
    try:
        ty = lambox_infer(stack, term)
    except Exception as exc:
        print(f"fail {args.file}: {exc}")
        return SEMANTIC_FAILURE
    if ann is not None and ty != ann:
        print(f"fail {args.file}: inferred {print_boxtype(ty)}, annotated {print_boxtype(ann)}")
        return SEMANTIC_FAILURE
    ctx, translated = translate(stack, term)
    result = infer(ctx, translated)
    if not result.ok:
        print(f"fail {args.file}: translated judgment does not re-check: {result.error}")
        return SEMANTIC_FAILURE
    emitted = print_judgment(ctx, translated, from_box(ty))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(emitted + "\n")
        print(f"ok   {args.file} -> {args.out}")
    else:
        print(emitted)
    return OK


def cmd_axioms(args) -> int:
    start = time.perf_counter()
    code = OK
    for name, ctx, term, ann in corpus.axiom_judgments():
        result = check(ctx, term, ann)
        if not result.ok:
            print(f"fail {name}: {result.error}")
            code = SEMANTIC_FAILURE
            continue
        line = f"ok   {name}: {print_formula(ann)}"
        print(line)
        if args.emit_normal_forms:
            nf = normalize(term, pos(ctx))
            print(f"     normal form ({nf.steps} steps): {print_term(nf.term)}")
    print(f"total: {time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code


def cmd_selftest(args) -> int:
    counts = {
        "contexts": args.contexts,
        "terms": args.terms,
        "models": args.models,
        "cs4_models": args.cs4_models,
        "roundtrip": args.roundtrip,
    }
    results = selfcheck.run_all(args.seed, counts)
    for result in results:
        print(result.line())
    return OK if all(r.ok for r in results) else SEMANTIC_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bml",
        description="Kernel for bounded modal logic: check, normalize, "
        "query relations, model-check, and translate box-calculus proofs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="type-check a judgment file")
    p_check.add_argument("file")
    p_check.add_argument("--trace", action="store_true", help="print the derivation tree")
    p_check.set_defaults(fn=cmd_check)

    p_norm = sub.add_parser("normalize", help="beta-normalize the term of a judgment file")
    p_norm.add_argument("file")
    p_norm.add_argument("--trace", action="store_true", help="print one line per step")
    p_norm.add_argument("--step-cap", type=int, default=100_000)
    p_norm.set_defaults(fn=cmd_normalize)

    p_rel = sub.add_parser("rel", help="evaluate relational queries against a context file")
    p_rel.add_argument("file")
    p_rel.add_argument("queries", nargs="+", help='queries like "g1 <= g2" or "g1 [= g2"')
    p_rel.set_defaults(fn=cmd_rel)

    p_model = sub.add_parser("model", help="validate or query a model file")
    model_sub = p_model.add_subparsers(dest="model_command", required=True)
    m_check = model_sub.add_parser("check", help="validate a model file")
    m_check.add_argument("file")
    m_check.set_defaults(fn=cmd_model)
    m_sat = model_sub.add_parser("sat", help="evaluate satisfaction at a world and element")
    m_sat.add_argument("file")
    m_sat.add_argument("--world", required=True)
    m_sat.add_argument("--elem", required=True)
    m_sat.add_argument("--assign", default="", help="comma-separated g=d bindings")
    m_sat.add_argument("--formula", required=True)
    m_sat.set_defaults(fn=cmd_model)

    p_tr = sub.add_parser("translate-s4", help="translate a box-calculus judgment file")
    p_tr.add_argument("file")
    p_tr.add_argument("--out", help="write the emitted judgment here instead of stdout")
    p_tr.set_defaults(fn=cmd_translate_s4)

    p_ax = sub.add_parser("axioms", help="check the bundled axiom corpus")
    p_ax.add_argument("--emit-normal-forms", action="store_true")
    p_ax.set_defaults(fn=cmd_axioms)

    p_self = sub.add_parser("selftest", help="run the randomized property suites")
    p_self.add_argument("--seed", type=int, default=default_seed())
    p_self.add_argument("--contexts", type=int, default=500)
    p_self.add_argument("--terms", type=int, default=300)
    p_self.add_argument("--models", type=int, default=50)
    p_self.add_argument("--cs4-models", type=int, default=100)
    p_self.add_argument("--roundtrip", type=int, default=1000)
    p_self.set_defaults(fn=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else PARSE_FAILURE


if __name__ == "__main__":
    sys.exit(main())
