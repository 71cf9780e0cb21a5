"""Capture-avoiding classifier substitution on formulas, terms and
contexts, and the combined classifier-plus-variable substitution on terms
used by beta contraction."""

from __future__ import annotations

from dataclasses import dataclass

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
    classifier_names,
    free_classifiers,
    free_variables,
    fresh_name,
    variable_names,
)


@dataclass(frozen=True, slots=True)
class ClsSubst:
    """Replace free occurrences of `frm` with `to`."""

    frm: Classifier
    to: Classifier

    def __post_init__(self) -> None:
        if self.frm.is_initial:
            raise ValueError("the initial classifier is never substituted away")


@dataclass(frozen=True, slots=True)
class VarSubst:
    """Simultaneously replace a free classifier and a free variable."""

    cls: ClsSubst
    var: str
    replacement: Term


def subst_cls(subject, s: ClsSubst):
    """Apply a classifier substitution to a formula, term, or context.

    Binders that collide with the substitution's names are renamed fresh
    first, so the operation is total on formulas and terms. Context
    binders cannot be silently renamed (later items refer to them), so a
    collision there raises ValueError.
    """
    if isinstance(subject, Formula):
        return _cls_in_formula(subject, s.frm, s.to)
    if isinstance(subject, Term):
        return _cls_in_term(subject, s.frm, s.to)
    if isinstance(subject, Context):
        return _cls_in_context(subject, s.frm, s.to)
    raise TypeError(f"cannot substitute into {subject!r}")


def subst_var(term: Term, s: VarSubst) -> Term:
    """Apply a combined classifier and variable substitution to a term."""
    return _var_in_term(term, s.cls.frm, s.cls.to, s.var, s.replacement)


def _swap(c: Classifier, frm: Classifier, to: Classifier) -> Classifier:
    return to if c == frm else c


def _cls_in_formula(f: Formula, frm: Classifier, to: Classifier) -> Formula:
    if isinstance(f, Atom):
        return f
    if isinstance(f, Imp):
        return Imp(_cls_in_formula(f.lhs, frm, to), _cls_in_formula(f.rhs, frm, to))
    if isinstance(f, Box):
        return Box(_swap(f.bound, frm, to), _cls_in_formula(f.body, frm, to))
    if isinstance(f, Forall):
        binder, body = f.binder, f.body
        if binder == frm:
            # every occurrence below is bound: nothing to substitute inside
            return Forall(binder, _swap(f.bound, frm, to), body)
        if binder == to:
            fresh = Classifier(
                fresh_name(binder.name, classifier_names(body) | {frm.name, to.name})
            )
            body = _cls_in_formula(body, binder, fresh)
            binder = fresh
        return Forall(binder, _swap(f.bound, frm, to), _cls_in_formula(body, frm, to))
    raise TypeError(f"not a formula: {f!r}")


def _cls_in_term(t: Term, frm: Classifier, to: Classifier) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        # The lambda's position classifier is a free occurrence (it is not
        # alpha-renameable), so it is swapped like any other.
        return Lam(
            t.var,
            _swap(t.cls, frm, to),
            _cls_in_formula(t.ann, frm, to),
            _cls_in_term(t.body, frm, to),
        )
    if isinstance(t, App):
        return App(_cls_in_term(t.fn, frm, to), _cls_in_term(t.arg, frm, to))
    if isinstance(t, (Quo, CLam)):
        kind = Quo if isinstance(t, Quo) else CLam
        binder, body = t.binder, t.body
        if binder == frm:
            return kind(binder, _swap(t.bound, frm, to), body)
        if binder == to:
            fresh = Classifier(
                fresh_name(binder.name, classifier_names(body) | {frm.name, to.name})
            )
            body = _cls_in_term(body, binder, fresh)
            binder = fresh
        return kind(binder, _swap(t.bound, frm, to), _cls_in_term(body, frm, to))
    if isinstance(t, Unq):
        return Unq(_swap(t.at, frm, to), _cls_in_term(t.body, frm, to))
    if isinstance(t, CApp):
        return CApp(_cls_in_term(t.fn, frm, to), _swap(t.cls, frm, to))
    raise TypeError(f"not a term: {t!r}")


def _cls_in_context(ctx: Context, frm: Classifier, to: Classifier) -> Context:
    items = []
    for item in ctx:
        if isinstance(item, Hyp):
            if item.cls == frm or item.cls == to:
                raise ValueError(f"context binder {item.cls} collides with substitution")
            items.append(Hyp(item.var, item.cls, _cls_in_formula(item.ann, frm, to)))
        elif isinstance(item, Open):
            if item.binder == frm or item.binder == to:
                raise ValueError(f"context binder {item.binder} collides with substitution")
            items.append(Open(item.binder, _swap(item.bound, frm, to)))
        elif isinstance(item, Shut):
            items.append(Shut(_swap(item.at, frm, to)))
        elif isinstance(item, Cls):
            if item.binder == frm or item.binder == to:
                raise ValueError(f"context binder {item.binder} collides with substitution")
            items.append(Cls(item.binder, _swap(item.bound, frm, to)))
        else:
            raise TypeError(f"not a context item: {item!r}")
    return Context(tuple(items))


def _var_in_term(t: Term, frm: Classifier, to: Classifier, var: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == var else t
    if isinstance(t, Lam):
        body, bound_var = t.body, t.var
        if bound_var != var and bound_var in free_variables(repl):
            # capture: rename the bound variable before descending
            taken = variable_names(body) | variable_names(repl) | {var}
            fresh_var = fresh_name(bound_var, taken)
            body = _rename_var(body, bound_var, fresh_var)
            bound_var = fresh_var
        ann = _cls_in_formula(t.ann, frm, to)
        cls = _swap(t.cls, frm, to)
        if bound_var == var:
            # shadowed: only the classifier part continues inward
            return Lam(bound_var, cls, ann, _cls_in_term(body, frm, to))
        return Lam(bound_var, cls, ann, _var_in_term(body, frm, to, var, repl))
    if isinstance(t, App):
        return App(
            _var_in_term(t.fn, frm, to, var, repl), _var_in_term(t.arg, frm, to, var, repl)
        )
    if isinstance(t, (Quo, CLam)):
        kind = Quo if isinstance(t, Quo) else CLam
        binder, body = t.binder, t.body
        if binder == to or binder in free_classifiers(repl):
            avoid = classifier_names(body) | classifier_names(repl) | {frm.name, to.name}
            fresh = Classifier(fresh_name(binder.name, avoid))
            body = _cls_in_term(body, binder, fresh)
            binder = fresh
        if binder == frm:
            # the classifier part stops at its own binder; the variable
            # part continues below
            return kind(
                binder, _swap(t.bound, frm, to), _var_in_term(body, frm, frm, var, repl)
            )
        return kind(binder, _swap(t.bound, frm, to), _var_in_term(body, frm, to, var, repl))
    if isinstance(t, Unq):
        return Unq(_swap(t.at, frm, to), _var_in_term(t.body, frm, to, var, repl))
    if isinstance(t, CApp):
        return CApp(_var_in_term(t.fn, frm, to, var, repl), _swap(t.cls, frm, to))
    raise TypeError(f"not a term: {t!r}")


def _rename_var(t: Term, old: str, new: str) -> Term:
    if isinstance(t, Var):
        return Var(new) if t.name == old else t
    if isinstance(t, Lam):
        if t.var == old:
            return t
        return Lam(t.var, t.cls, t.ann, _rename_var(t.body, old, new))
    if isinstance(t, App):
        return App(_rename_var(t.fn, old, new), _rename_var(t.arg, old, new))
    if isinstance(t, Quo):
        return Quo(t.binder, t.bound, _rename_var(t.body, old, new))
    if isinstance(t, Unq):
        return Unq(t.at, _rename_var(t.body, old, new))
    if isinstance(t, CLam):
        return CLam(t.binder, t.bound, _rename_var(t.body, old, new))
    if isinstance(t, CApp):
        return CApp(_rename_var(t.fn, old, new), t.cls)
    raise TypeError(f"not a term: {t!r}")
