"""Property suites behind both `bml selftest` and the acceptance tests:
the relation-engine oracle, reduction metatheory on a generated term
suite, soundness sampling over model families, the S4 equivalences, the
box-calculus embedding, and parser round-trips."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from . import corpus
from .contexts import RelKind, derives, dom_c, pos, wf_context
from .cs4 import cs4_satisfies, flatten, from_box, one_point, root_extend, stabilize, to_box
from .generators import Gen
from .kernel import audit_derivation, check, infer
from .lambox import lambox_infer, translate
from .parsing import parse_context, parse_formula, parse_term
from .printing import print_context, print_formula, print_term
from .reduction import (
    TermClass,
    beta_step,
    classify,
    is_subformula,
    normalize,
    normalize_innermost,
)
from .semantics import consequence_on, satisfies, satisfies_context
from .substitute import ClsSubst, subst_cls
from .syntax import (
    Atom,
    Box,
    Classifier,
    Context,
    Forall,
    Formula,
    Hyp,
    Imp,
    Term,
    alpha_eq,
    free_classifiers,
    free_variables,
)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "ok" if self.ok else "FAIL"
        return f"{verdict:4} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(fn):
    start = time.perf_counter()
    ok, detail = fn()
    return ok, detail, time.perf_counter() - start


def run_check(name: str, fn) -> CheckResult:
    ok, detail, seconds = _timed(fn)
    return CheckResult(name, ok, detail, seconds)


# ---------------------------------------------------------------------------
# Axiom regression


def check_axioms() -> CheckResult:
    def body():
        failures = []
        for name, ctx, term, ann in corpus.axiom_judgments():
            result = check(ctx, term, ann)
            if not result.ok:
                failures.append(f"{name}: {result.error}")
            else:
                problems = audit_derivation(result.derivation)
                if problems:
                    failures.append(f"{name}: audit: {problems[0]}")
        total = len(corpus.AXIOMS)
        if failures:
            return False, f"{total - len(failures)}/{total}: " + "; ".join(failures)
        return True, f"{total}/{total} axiom terms check at their listed types"

    return run_check("axioms", body)


# ---------------------------------------------------------------------------
# Relation oracle: brute-force fixpoint over the literal derivation rules


def oracle_relations(
    ctx: Context,
) -> tuple[frozenset[tuple[Classifier, Classifier]], frozenset[tuple[Classifier, Classifier]]]:
    """Least fixpoint of the rule set: reflexivity, transitivity, the
    scope-to-stage lift, and the per-item axioms. Independent of the
    reachability engine."""
    from .syntax import Cls as ClsItem
    from .syntax import Open as OpenItem

    pre: set[tuple[Classifier, Classifier]] = set()
    mod: set[tuple[Classifier, Classifier]] = set()
    for c in dom_c(ctx):
        pre.add((c, c))
        mod.add((c, c))
    for i, item in enumerate(ctx):
        prefix_pos = pos(ctx.prefix(i))
        if isinstance(item, Hyp):
            pre.add((prefix_pos, item.cls))
        elif isinstance(item, OpenItem):
            pre.add((item.bound, item.binder))
            mod.add((prefix_pos, item.binder))
        elif isinstance(item, ClsItem):
            pre.add((item.bound, item.binder))
    changed = True
    while changed:
        changed = False
        for a, b in list(pre):
            if (a, b) not in mod:
                mod.add((a, b))
                changed = True
        for rel in (pre, mod):
            for a, b in list(rel):
                for b2, c in list(rel):
                    if b2 == b and (a, c) not in rel:
                        rel.add((a, c))
                        changed = True
    return frozenset(pre), frozenset(mod)


def check_relation_oracle(rng: random.Random, n_contexts: int = 500) -> CheckResult:
    def body():
        gen = Gen(rng)
        pairs_checked = 0
        for _ in range(n_contexts):
            ctx = gen.context(max_items=10)
            pre, mod = oracle_relations(ctx)
            dom = sorted(dom_c(ctx), key=str)
            for a in dom:
                for b in dom:
                    pairs_checked += 2
                    if derives(ctx, RelKind.PRE, a, b) != ((a, b) in pre):
                        return False, f"scope disagreement on {a} <= {b} in {print_context(ctx)}"
                    if derives(ctx, RelKind.MOD, a, b) != ((a, b) in mod):
                        return False, f"stage disagreement on {a} [= {b} in {print_context(ctx)}"
        return True, f"{n_contexts} contexts, {pairs_checked} pairs agree with the rule fixpoint"

    return run_check("relation-oracle", body)


# ---------------------------------------------------------------------------
# Term suite: subject reduction, normalization, canonicity, subformulas


def build_term_suite(rng: random.Random, n_terms: int = 300) -> list[tuple[Context, Term]]:
    gen = Gen(rng)
    suite: list[tuple[Context, Term]] = [
        (ctx, term) for _, ctx, term, _ in corpus.all_judgments()
    ]
    while len(suite) < n_terms + len(corpus.all_judgments()):
        ctx = gen.context(max_items=5)
        suite.append((ctx, gen.typed_term(ctx, depth=4)))
    return suite


def check_subject_reduction(suite: list[tuple[Context, Term]]) -> CheckResult:
    def body():
        steps_total = 0
        for ctx, term in suite:
            here = pos(ctx)
            result = infer(ctx, term)
            if not result.ok:
                return False, f"suite term fails to type: {result.error}"
            expected = result.type
            current = term
            while True:
                stepped = beta_step(current, here)
                if stepped is None:
                    break
                steps_total += 1
                after = infer(ctx, stepped)
                if not after.ok:
                    return (
                        False,
                        f"step broke typing: {print_term(current)} -> "
                        f"{print_term(stepped)}: {after.error}",
                    )
                if not alpha_eq(after.type, expected):
                    return (
                        False,
                        f"step changed the type of {print_term(current)} to "
                        f"{print_formula(after.type)}",
                    )
                current = stepped
        return True, f"{len(suite)} terms, {steps_total} contractions preserve types"

    return run_check("subject-reduction", body)


def check_normalization(
    suite: list[tuple[Context, Term]], rng: random.Random, step_cap: int = 100_000
) -> CheckResult:
    def body():
        for ctx, term in suite:
            here = pos(ctx)
            left = normalize(term, here, step_cap)
            inner = normalize_innermost(term, here, rng, step_cap)
            if not alpha_eq(left.term, inner.term):
                return (
                    False,
                    f"strategies disagree on {print_term(term)}: "
                    f"{print_term(left.term)} vs {print_term(inner.term)}",
                )
        return True, f"{len(suite)} terms normalize under both strategies to equal forms"

    return run_check("normalization", body)


def check_canonicity_subformula(suite: list[tuple[Context, Term]]) -> CheckResult:
    def body():
        closed = 0
        for ctx, term in suite:
            here = pos(ctx)
            nf = normalize(term, here).term
            if not free_variables(nf):
                closed += 1
                if classify(nf) is not TermClass.CANONICAL:
                    return False, f"closed normal term is neutral: {print_term(nf)}"
        nodes = 0
        for name, ctx, term, _ in corpus.all_judgments():
            here = pos(ctx)
            nf = normalize(term, here).term
            result = infer(ctx, nf)
            if not result.ok:
                return False, f"{name}: normal form fails to type"
            top = result.type
            hyp_types = [item.ann for item in ctx if isinstance(item, Hyp)]
            stack = [result.derivation]
            while stack:
                d = stack.pop()
                nodes += 1
                if not (
                    is_subformula(d.type, top)
                    or any(is_subformula(d.type, ann) for ann in hyp_types)
                ):
                    return (
                        False,
                        f"{name}: type {print_formula(d.type)} of subterm "
                        f"{print_term(d.term)} is not a renamed subformula",
                    )
                stack.extend(d.premises)
        return True, f"{closed} closed normal terms canonical; {nodes} corpus subterms covered"

    return run_check("canonicity-subformula", body)


# ---------------------------------------------------------------------------
# Soundness sampling over generated model families


def build_model_suite(rng: random.Random, n_models: int = 50):
    gen = Gen(rng)
    return [gen.model(max_worlds=4, max_elems=5) for _ in range(n_models)]


def check_soundness(rng: random.Random, n_models: int = 50) -> CheckResult:
    def body():
        models = build_model_suite(rng, n_models)
        for name, ctx, term, ann in corpus.all_judgments():
            result = infer(ctx, term)
            if not result.ok:
                return False, f"{name} fails to type"
            verdict = consequence_on(models, ctx, result.type)
            if not verdict.holds:
                return (
                    False,
                    f"{name}: countermodel {verdict.model_index} at {verdict.world} "
                    f"with {verdict.rho}",
                )
        rel_ok = _relational_soundness(rng, models[:10])
        if rel_ok is not None:
            return False, rel_ok
        persist = _semantical_persistency(models)
        if persist is not None:
            return False, persist
        subst = _assignment_substitution(models)
        if subst is not None:
            return False, subst
        return True, (
            f"{len(corpus.all_judgments())} corpus judgments sound over {n_models} models; "
            "persistency and assignment substitution hold exhaustively"
        )

    return run_check("soundness", body)


def _relational_soundness(rng: random.Random, models) -> str | None:
    gen = Gen(rng)
    for _ in range(10):
        ctx = gen.context(max_items=4)
        dom = sorted(dom_c(ctx), key=str)
        names = sorted({c.name for c in dom_c(ctx)} - {"!"})
        derivable = [
            (kind, a, b)
            for kind in (RelKind.PRE, RelKind.MOD)
            for a in dom
            for b in dom
            if derives(ctx, kind, a, b)
        ]
        for model in models:
            for world in sorted(model.worlds):
                s = model.structures[world]
                elems = sorted(s.domain)
                for combo in itertools.product(elems, repeat=len(names)):
                    rho = dict(zip(names, combo))
                    rho["!"] = s.root
                    if not satisfies_context(model, world, rho, ctx):
                        continue
                    for kind, a, b in derivable:
                        rel = s.pre if kind is RelKind.PRE else s.mod
                        if (rho[a.name], rho[b.name]) not in rel:
                            return (
                                f"derivable {a} {kind.value} {b} not respected at "
                                f"{world} under {rho} in {print_context(ctx)}"
                            )
    return None


_PERSISTENCY_POOL: tuple[str, ...] = (
    "p",
    "p -> q",
    "[>= !]p",
    "[>= !]p -> p",
    "[>= g]p",
    "forall h >= g. [>= h]p",
    "forall h >= !. [>= h](p -> q) -> [>= h]p -> [>= h]q",
)


def _semantical_persistency(models) -> str | None:
    pool = [parse_formula(text) for text in _PERSISTENCY_POOL]
    for model in models:
        for w in sorted(model.worlds):
            for v in sorted(model.order_up[w]):
                sv = model.structures[v]
                sw = model.structures[w]
                for formula in pool:
                    names = sorted({c.name for c in free_classifiers(formula)} - {"!"})
                    for combo in itertools.product(sorted(sw.domain), repeat=len(names)):
                        rho = dict(zip(names, combo))
                        rho["!"] = sw.root
                        for d in sorted(sw.domain):
                            if not satisfies(model, w, d, rho, formula):
                                continue
                            for e in sorted(sv.pre_up[d]):
                                if not satisfies(model, v, e, rho, formula):
                                    return (
                                        f"persistency broken for {print_formula(formula)} "
                                        f"from ({w},{d}) to ({v},{e}) under {rho}"
                                    )
    return None


_SUBST_POOL: tuple[tuple[str, str, str], ...] = (
    ("[>= g2]p", "g2", "g1"),
    ("[>= g2]p -> p", "g2", "g1"),
    ("forall h >= g2. [>= h]q", "g2", "g1"),
)


def _assignment_substitution(models) -> str | None:
    for text, frm, to in _SUBST_POOL:
        formula = parse_formula(text)
        substituted = subst_cls(formula, ClsSubst(Classifier(frm), Classifier(to)))
        for model in models:
            for w in sorted(model.worlds):
                s = model.structures[w]
                for base in sorted(s.domain):
                    rho = {"!": s.root, to: base}
                    extended = {**rho, frm: rho[to]}
                    for d in sorted(s.domain):
                        if satisfies(model, w, d, extended, formula) != satisfies(
                            model, w, d, rho, substituted
                        ):
                            return (
                                f"assignment substitution fails for {text} "
                                f"at ({w},{d}) with {rho}"
                            )
    return None


# ---------------------------------------------------------------------------
# S4 bridge equivalences


def check_cs4(rng: random.Random, n_models: int = 100, formulas_per_model: int = 8) -> CheckResult:
    def body():
        gen = Gen(rng)
        checks = 0
        for _ in range(n_models):
            m = gen.cs4_model(max_worlds=6)
            stable = stabilize(m)
            if not stable.stable:
                return False, "stabilization produced an unstable model"
            bml = one_point(root_extend(stable))
            for _ in range(formulas_per_model):
                f = gen.box_formula(depth=4)
                translated = from_box(f)
                for w in sorted(m.worlds, key=str):
                    checks += 1
                    direct = cs4_satisfies(m, w, f)
                    if cs4_satisfies(stable, w, f) != direct:
                        return False, f"stabilization changed satisfaction of {f} at {w}"
                    via_bml = satisfies(bml, "*", str(w), {"!": "!"}, translated)
                    if direct != via_bml:
                        return (
                            False,
                            f"pipeline biconditional fails for {f} at {w}",
                        )
        bml_models = build_model_suite(rng, 20)
        for model in bml_models:
            flat = flatten(model)
            for _ in range(formulas_per_model):
                f = gen.initial_formula(depth=4)
                boxed = to_box(f)
                for w in sorted(model.worlds):
                    s = model.structures[w]
                    for d in sorted(s.domain):
                        checks += 1
                        if satisfies(model, w, d, {"!": s.root}, f) != cs4_satisfies(
                            flat, (w, d), boxed
                        ):
                            return (
                                False,
                                f"flattening biconditional fails for "
                                f"{print_formula(f)} at ({w},{d})",
                            )
        return True, f"{checks} biconditional checks, zero counterexamples"

    return run_check("cs4-equivalences", body)


# ---------------------------------------------------------------------------
# Box-calculus embedding


def check_lambox() -> CheckResult:
    def body():
        for name, stack, term, ann in corpus.lambox_judgments():
            ty = lambox_infer(stack, term)
            if ann is not None and ty != ann:
                return False, f"{name}: inferred {ty}, annotation {ann}"
            ctx, translated = translate(stack, term)
            result = infer(ctx, translated)
            if not result.ok:
                return False, f"{name}: translation fails to type: {result.error}"
            if not alpha_eq(result.type, from_box(ty)):
                return (
                    False,
                    f"{name}: translated type {print_formula(result.type)} is not the "
                    f"translation of {ty}",
                )
        return True, f"{len(corpus.LAMBOX)} box-calculus judgments embed and re-check"

    return run_check("lambox-embedding", body)


# ---------------------------------------------------------------------------
# Parser round-trips


def check_roundtrip(rng: random.Random, n: int = 1000) -> CheckResult:
    def body():
        gen = Gen(rng)
        per_kind = n // 3
        for _ in range(per_kind):
            f = gen.raw_formula(depth=4)
            if parse_formula(print_formula(f)) != f:
                return False, f"formula round-trip broke on {print_formula(f)}"
        for _ in range(per_kind):
            t = gen.raw_term(depth=4)
            if parse_term(print_term(t)) != t:
                return False, f"term round-trip broke on {print_term(t)}"
        for _ in range(n - 2 * per_kind):
            ctx = gen.raw_context(max_items=6)
            if parse_context(print_context(ctx)) != ctx:
                return False, f"context round-trip broke on {print_context(ctx)}"
        return True, f"{n} fuzzed round-trips are identities"

    return run_check("roundtrip", body)


# ---------------------------------------------------------------------------
# Entry point used by the CLI


def run_all(seed: int, counts: dict[str, int] | None = None) -> list[CheckResult]:
    counts = counts or {}
    results = [check_axioms()]
    results.append(
        check_relation_oracle(random.Random(seed), counts.get("contexts", 500))
    )
    suite = build_term_suite(random.Random(seed + 1), counts.get("terms", 300))
    results.append(check_subject_reduction(suite))
    results.append(check_normalization(suite, random.Random(seed + 2)))
    results.append(check_canonicity_subformula(suite))
    results.append(check_soundness(random.Random(seed + 3), counts.get("models", 50)))
    results.append(check_cs4(random.Random(seed + 4), counts.get("cs4_models", 100)))
    results.append(check_lambox())
    results.append(check_roundtrip(random.Random(seed + 5), counts.get("roundtrip", 1000)))
    return results
