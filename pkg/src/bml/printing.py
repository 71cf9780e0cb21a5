"""Concrete-syntax printers. print then parse is the identity on every
formula, term, context and judgment (tested by fuzzing)."""

from __future__ import annotations

from .syntax import (
    App,
    Atom,
    Box,
    CApp,
    CLam,
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
)


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Imp):
        return f"{_imp_lhs(f.lhs)} -> {print_formula(f.rhs)}"
    if isinstance(f, Box):
        return f"[>= {f.bound}]{_box_body(f.body)}"
    if isinstance(f, Forall):
        return f"forall {f.binder} >= {f.bound}. {print_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _imp_lhs(f: Formula) -> str:
    # "->" is right-associative and "forall" scopes to the end of the
    # expression, so both need parentheses on the left of an arrow.
    if isinstance(f, (Imp, Forall)):
        return f"({print_formula(f)})"
    return print_formula(f)


def _box_body(f: Formula) -> str:
    if isinstance(f, (Imp, Forall)):
        return f"({print_formula(f)})"
    return print_formula(f)


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"\\{t.var} : {print_formula(t.ann)} @ {t.cls}. {print_term(t.body)}"
    if isinstance(t, CLam):
        return f"gen {t.binder} >= {t.bound}. {print_term(t.body)}"
    if isinstance(t, App):
        return f"{_fn_pos(t.fn)} {_arg_pos(t.arg)}"
    if isinstance(t, CApp):
        return f"{_fn_pos(t.fn)}[{t.cls}]"
    if isinstance(t, Quo):
        return f"quo[{t.binder} >= {t.bound}]{{ {print_term(t.body)} }}"
    if isinstance(t, Unq):
        return f"unq[{t.at}]{{ {print_term(t.body)} }}"
    raise TypeError(f"not a term: {t!r}")


def _fn_pos(t: Term) -> str:
    # Application and classifier application associate to the left, so a
    # nested App/CApp head needs no parentheses; binders swallow the rest.
    if isinstance(t, (Lam, CLam)):
        return f"({print_term(t)})"
    return print_term(t)


def _arg_pos(t: Term) -> str:
    if isinstance(t, (Var, Quo, Unq)):
        return print_term(t)
    return f"({print_term(t)})"


def print_item(item) -> str:
    if isinstance(item, Hyp):
        return f"{item.var} : {print_formula(item.ann)} @ {item.cls}"
    if isinstance(item, Open):
        return f"open {item.binder} >= {item.bound}"
    if isinstance(item, Shut):
        return f"shut {item.at}"
    if isinstance(item, Cls):
        return f"cls {item.binder} >= {item.bound}"
    raise TypeError(f"not a context item: {item!r}")


def print_context(ctx: Context) -> str:
    return ", ".join(print_item(item) for item in ctx)


def print_judgment(ctx: Context, term: Term, ann: Formula | None = None) -> str:
    left = print_context(ctx)
    mid = f"{left} |- " if left else "|- "
    out = mid + print_term(term)
    if ann is not None:
        out += f" : {print_formula(ann)}"
    return out
