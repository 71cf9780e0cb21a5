"""Syntax-directed type synthesis for the kernel calculus.

Each constructor maps to exactly one rule, so inference needs no search:
the only work is discharging the relational obligations. Successful runs
retain the full derivation tree, which `audit_derivation` can replay
rule by rule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .contexts import ContextError, RelKind, derives, dom_c, pos, wf_context, wf_formula
from .printing import print_formula, print_judgment, print_term
from .substitute import ClsSubst, subst_cls
from .syntax import (
    App,
    Atom,
    Box,
    CApp,
    CLam,
    Classifier,
    Cls,
    Context,
    Forall,
    Formula,
    Hyp,
    Imp,
    Lam,
    Open,
    Quo,
    Shut,
    Term,
    Unq,
    Var,
    alpha_eq,
    classifier_names,
    free_classifiers,
    free_variables,
    fresh_name,
    variable_names,
)

Path = tuple[str, ...]


class TypingFailure(Exception):
    """A typing obligation failed; names the rule and what it required."""

    def __init__(self, rule: str, obligation: str, context: Context, term: Term, path: Path):
        at = "/".join(path) if path else "root"
        super().__init__(f"{rule} at {at}: {obligation}")
        self.rule = rule
        self.obligation = obligation
        self.context = context
        self.term = term
        self.path = path


class TypeMismatch(TypingFailure):
    def __init__(self, context: Context, term: Term, expected: Formula, actual: Formula):
        super().__init__(
            "check",
            f"expected {print_formula(expected)} but inferred {print_formula(actual)}",
            context,
            term,
            (),
        )
        self.expected = expected
        self.actual = actual


class AtomicTypeError(Exception):
    """Eta expansion is undefined at atomic types."""


@dataclass(frozen=True)
class Derivation:
    rule: str
    context: Context
    term: Term
    type: Formula
    premises: tuple["Derivation", ...] = ()
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class TypingResult:
    type: Formula | None
    derivation: Derivation | None
    error: TypingFailure | None

    @property
    def ok(self) -> bool:
        return self.error is None


def infer(ctx: Context, term: Term) -> TypingResult:
    """Synthesize a type for `term` under `ctx` (which must be well formed)."""
    wf_context(ctx)
    try:
        d = _infer(ctx, term, ())
        return TypingResult(d.type, d, None)
    except TypingFailure as exc:
        return TypingResult(None, None, exc)


def check(ctx: Context, term: Term, formula: Formula) -> TypingResult:
    """Infer and compare against `formula` up to alpha-equivalence."""
    wf_context(ctx)
    wf_formula(ctx, formula)
    result = infer(ctx, term)
    if not result.ok:
        return result
    if not alpha_eq(result.type, formula):
        mismatch = TypeMismatch(ctx, term, formula, result.type)
        return TypingResult(None, result.derivation, mismatch)
    return result


def _fresh_binder(cls: Classifier, ctx: Context, body: Term) -> Classifier:
    avoid = {c.name for c in dom_c(ctx)} | classifier_names(body)
    return Classifier(fresh_name(cls.name, avoid))


def _infer(ctx: Context, term: Term, path: Path) -> Derivation:
    if isinstance(term, Var):
        here = pos(ctx)
        for item in reversed(ctx.items):
            if isinstance(item, Hyp) and item.var == term.name:
                if not derives(ctx, RelKind.PRE, item.cls, here):
                    raise TypingFailure(
                        "Var", f"requires {item.cls} <= {here}", ctx, term, path
                    )
                return Derivation(
                    "Var", ctx, term, item.ann, (), (f"{item.cls} <= {here}",)
                )
        raise TypingFailure("Var", f"unbound variable {term.name}", ctx, term, path)

    if isinstance(term, Lam):
        try:
            wf_formula(ctx, term.ann)
        except ContextError as exc:
            raise TypingFailure("->-I", f"ill-formed annotation: {exc}", ctx, term, path)
        cls, body = term.cls, term.body
        if cls in dom_c(ctx):
            # keep the extension fresh by renaming internally; the result
            # type is unchanged up to alpha
            renamed = _fresh_binder(cls, ctx, body)
            body = subst_cls(body, ClsSubst(cls, renamed))
            cls = renamed
        premise = _infer(ctx.extend(Hyp(term.var, cls, term.ann)), body, path + ("body",))
        if cls in free_classifiers(premise.type):
            raise TypingFailure(
                "->-I",
                f"classifier {cls} of the lambda escapes into the result type "
                f"{print_formula(premise.type)}",
                ctx,
                term,
                path,
            )
        return Derivation("->-I", ctx, term, Imp(term.ann, premise.type), (premise,))

    if isinstance(term, App):
        fn = _infer(ctx, term.fn, path + ("fn",))
        if not isinstance(fn.type, Imp):
            raise TypingFailure(
                "->-E", f"function has non-arrow type {print_formula(fn.type)}", ctx, term, path
            )
        arg = _infer(ctx, term.arg, path + ("arg",))
        if not alpha_eq(fn.type.lhs, arg.type):
            raise TypingFailure(
                "->-E",
                f"argument type {print_formula(arg.type)} does not match "
                f"{print_formula(fn.type.lhs)}",
                ctx,
                term,
                path,
            )
        return Derivation("->-E", ctx, term, fn.type.rhs, (fn, arg))

    if isinstance(term, Quo):
        if term.bound not in dom_c(ctx):
            raise TypingFailure(
                "box-I", f"unknown bound classifier {term.bound}", ctx, term, path
            )
        binder, body = term.binder, term.body
        if binder in dom_c(ctx):
            renamed = _fresh_binder(binder, ctx, body)
            body = subst_cls(body, ClsSubst(binder, renamed))
            binder = renamed
        premise = _infer(ctx.extend(Open(binder, term.bound)), body, path + ("body",))
        if binder in free_classifiers(premise.type):
            raise TypingFailure(
                "box-I",
                f"classifier {binder} of the quotation escapes into "
                f"{print_formula(premise.type)}",
                ctx,
                term,
                path,
            )
        return Derivation("box-I", ctx, term, Box(term.bound, premise.type), (premise,))

    if isinstance(term, Unq):
        here = pos(ctx)
        if term.at not in dom_c(ctx):
            raise TypingFailure("box-E", f"unknown classifier {term.at}", ctx, term, path)
        if not derives(ctx, RelKind.MOD, term.at, here):
            raise TypingFailure("box-E", f"requires {term.at} [= {here}", ctx, term, path)
        premise = _infer(ctx.extend(Shut(term.at)), term.body, path + ("body",))
        if not isinstance(premise.type, Box):
            raise TypingFailure(
                "box-E",
                f"spliced term has non-box type {print_formula(premise.type)}",
                ctx,
                term,
                path,
            )
        if not derives(ctx, RelKind.PRE, premise.type.bound, here):
            raise TypingFailure(
                "box-E", f"requires {premise.type.bound} <= {here}", ctx, term, path
            )
        return Derivation(
            "box-E",
            ctx,
            term,
            premise.type.body,
            (premise,),
            (f"{term.at} [= {here}", f"{premise.type.bound} <= {here}"),
        )

    if isinstance(term, CLam):
        if term.bound not in dom_c(ctx):
            raise TypingFailure(
                "forall-I", f"unknown bound classifier {term.bound}", ctx, term, path
            )
        binder, body = term.binder, term.body
        if binder in dom_c(ctx):
            renamed = _fresh_binder(binder, ctx, body)
            body = subst_cls(body, ClsSubst(binder, renamed))
            binder = renamed
        premise = _infer(ctx.extend(Cls(binder, term.bound)), body, path + ("body",))
        return Derivation(
            "forall-I", ctx, term, Forall(binder, term.bound, premise.type), (premise,)
        )

    if isinstance(term, CApp):
        if term.cls not in dom_c(ctx):
            raise TypingFailure(
                "forall-E", f"unknown classifier argument {term.cls}", ctx, term, path
            )
        fn = _infer(ctx, term.fn, path + ("fn",))
        if not isinstance(fn.type, Forall):
            raise TypingFailure(
                "forall-E",
                f"applied term has non-quantifier type {print_formula(fn.type)}",
                ctx,
                term,
                path,
            )
        if not derives(ctx, RelKind.PRE, fn.type.bound, term.cls):
            raise TypingFailure(
                "forall-E", f"requires {fn.type.bound} <= {term.cls}", ctx, term, path
            )
        instantiated = subst_cls(fn.type.body, ClsSubst(fn.type.binder, term.cls))
        return Derivation(
            "forall-E", ctx, term, instantiated, (fn,), (f"{fn.type.bound} <= {term.cls}",)
        )

    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Eta expansion (one level)


def eta_expand(ctx: Context, term: Term) -> Term:
    """Expand `term` one level at its inferred type; the result re-checks
    at the same type. Raises AtomicTypeError at atoms."""
    result = infer(ctx, term)
    if not result.ok:
        raise result.error
    ty = result.type
    if isinstance(ty, Atom):
        raise AtomicTypeError(f"cannot expand at atomic type {ty.name}")
    avoid = (
        {c.name for c in dom_c(ctx)}
        | classifier_names(term)
        | classifier_names(ty)
        | classifier_names(ctx)
    )
    delta = Classifier(fresh_name("e", avoid))
    if isinstance(ty, Imp):
        var = fresh_name("x", variable_names(term) | free_variables(term))
        return Lam(var, delta, ty.lhs, App(term, Var(var)))
    if isinstance(ty, Box):
        return Quo(delta, ty.bound, Unq(pos(ctx), term))
    if isinstance(ty, Forall):
        return CLam(delta, ty.bound, CApp(term, delta))
    raise TypeError(f"not a formula: {ty!r}")


# ---------------------------------------------------------------------------
# Derivation replay and display


def audit_derivation(d: Derivation) -> list[str]:
    """Re-validate every node of a derivation against its rule; returns the
    list of violations (empty when the derivation is faithful)."""
    problems: list[str] = []
    _audit(d, problems)
    return problems


def _expected_body(original: Term, binder: Classifier, actual: Classifier) -> Term:
    if binder == actual:
        return original
    return subst_cls(original, ClsSubst(binder, actual))


def _audit(d: Derivation, problems: list[str]) -> None:
    here = pos(d.context)
    t = d.term

    def bad(msg: str) -> None:
        problems.append(f"{d.rule} on {print_term(d.term)}: {msg}")

    if d.rule == "Var" and isinstance(t, Var):
        hyp = next(
            (it for it in reversed(d.context.items) if isinstance(it, Hyp) and it.var == t.name),
            None,
        )
        if hyp is None:
            bad("no hypothesis for the variable")
        else:
            if not derives(d.context, RelKind.PRE, hyp.cls, here):
                bad(f"missing {hyp.cls} <= {here}")
            if d.type != hyp.ann:
                bad("type is not the hypothesis annotation")
    elif d.rule == "->-I" and isinstance(t, Lam) and len(d.premises) == 1:
        (p,) = d.premises
        last = p.context.items[-1] if p.context.items else None
        if not (
            isinstance(last, Hyp)
            and last.var == t.var
            and last.ann == t.ann
            and p.context.items[:-1] == d.context.items
        ):
            bad("premise context is not the extension by the hypothesis")
        elif p.term != _expected_body(t.body, t.cls, last.cls):
            bad("premise term is not the lambda body")
        elif last.cls in free_classifiers(p.type):
            bad(f"classifier {last.cls} escapes into the codomain")
        elif d.type != Imp(t.ann, p.type):
            bad("conclusion type mismatch")
    elif d.rule == "->-E" and isinstance(t, App) and len(d.premises) == 2:
        fn, arg = d.premises
        if fn.context != d.context or arg.context != d.context:
            bad("premise contexts differ from the conclusion context")
        elif not isinstance(fn.type, Imp):
            bad("function premise is not an arrow")
        elif not alpha_eq(fn.type.lhs, arg.type):
            bad("argument type does not match the arrow domain")
        elif d.type != fn.type.rhs:
            bad("conclusion type is not the arrow codomain")
    elif d.rule == "box-I" and isinstance(t, Quo) and len(d.premises) == 1:
        (p,) = d.premises
        last = p.context.items[-1] if p.context.items else None
        if not (
            isinstance(last, Open)
            and last.bound == t.bound
            and p.context.items[:-1] == d.context.items
        ):
            bad("premise context is not the extension by an open item")
        elif p.term != _expected_body(t.body, t.binder, last.binder):
            bad("premise term is not the quotation body")
        elif last.binder in free_classifiers(p.type):
            bad(f"classifier {last.binder} escapes into the boxed type")
        elif d.type != Box(t.bound, p.type):
            bad("conclusion type mismatch")
    elif d.rule == "box-E" and isinstance(t, Unq) and len(d.premises) == 1:
        (p,) = d.premises
        if p.context.items != d.context.items + (Shut(t.at),):
            bad("premise context is not the extension by a shut item")
        elif not derives(d.context, RelKind.MOD, t.at, here):
            bad(f"missing {t.at} [= {here}")
        elif not isinstance(p.type, Box):
            bad("premise is not a box")
        elif not derives(d.context, RelKind.PRE, p.type.bound, here):
            bad(f"missing {p.type.bound} <= {here}")
        elif d.type != p.type.body:
            bad("conclusion type mismatch")
    elif d.rule == "forall-I" and isinstance(t, CLam) and len(d.premises) == 1:
        (p,) = d.premises
        last = p.context.items[-1] if p.context.items else None
        if not (
            isinstance(last, Cls)
            and last.bound == t.bound
            and p.context.items[:-1] == d.context.items
        ):
            bad("premise context is not the extension by a declaration")
        elif p.term != _expected_body(t.body, t.binder, last.binder):
            bad("premise term is not the abstraction body")
        elif d.type != Forall(last.binder, t.bound, p.type):
            bad("conclusion type mismatch")
    elif d.rule == "forall-E" and isinstance(t, CApp) and len(d.premises) == 1:
        (p,) = d.premises
        if p.context != d.context:
            bad("premise context differs from the conclusion context")
        elif not isinstance(p.type, Forall):
            bad("premise is not a quantifier")
        elif not derives(d.context, RelKind.PRE, p.type.bound, t.cls):
            bad(f"missing {p.type.bound} <= {t.cls}")
        elif d.type != subst_cls(p.type.body, ClsSubst(p.type.binder, t.cls)):
            bad("conclusion type is not the instantiated body")
    else:
        bad("rule name does not match the term shape")

    for p in d.premises:
        _audit(p, problems)


def format_derivation(d: Derivation, indent: int = 0) -> str:
    pad = "  " * indent
    lines = [f"{pad}[{d.rule}] {print_judgment(d.context, d.term, d.type)}"]
    for note in d.notes:
        lines.append(f"{pad}  | {note}")
    for p in d.premises:
        lines.append(format_derivation(p, indent + 1))
    return "\n".join(lines)
