"""Position-indexed beta reduction, normalization under two strategies,
canonical/neutral classification, and the renamed-subformula test.

Reduction is a family of relations indexed by the scope at which the
contraction happens: descending into a lambda body moves the index to the
lambda's classifier, into a quotation to its binder, into a splice to its
annotation; application and classifier abstraction leave it unchanged.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Iterator

from .substitute import ClsSubst, VarSubst, subst_cls, subst_var
from .syntax import (
    App,
    Atom,
    Box,
    CApp,
    CLam,
    Classifier,
    Forall,
    Formula,
    Imp,
    Lam,
    Quo,
    Term,
    Unq,
    Var,
)


class RedexKind(enum.Enum):
    BETA_LAM = "beta-lam"
    BETA_QUO = "beta-quo"
    BETA_CLS = "beta-cls"


@dataclass(frozen=True)
class RedexSite:
    path: tuple[int, ...]
    position: Classifier
    kind: RedexKind


class StepCapExceeded(Exception):
    def __init__(self, cap: int):
        super().__init__(f"no normal form within {cap} steps")
        self.cap = cap


def _contract(term: Term, position: Classifier) -> tuple[Term, RedexKind] | None:
    if isinstance(term, App) and isinstance(term.fn, Lam):
        lam = term.fn
        out = subst_var(
            lam.body, VarSubst(ClsSubst(lam.cls, position), lam.var, term.arg)
        )
        return out, RedexKind.BETA_LAM
    if isinstance(term, Unq) and isinstance(term.body, Quo):
        quo = term.body
        return subst_cls(quo.body, ClsSubst(quo.binder, position)), RedexKind.BETA_QUO
    if isinstance(term, CApp) and isinstance(term.fn, CLam):
        clam = term.fn
        return subst_cls(clam.body, ClsSubst(clam.binder, term.cls)), RedexKind.BETA_CLS
    return None


def _children(term: Term, position: Classifier) -> list[tuple[int, Term, Classifier]]:
    """Child subterms with the reduction position each is reduced at."""
    if isinstance(term, Lam):
        return [(0, term.body, term.cls)]
    if isinstance(term, App):
        return [(0, term.fn, position), (1, term.arg, position)]
    if isinstance(term, Quo):
        return [(0, term.body, term.binder)]
    if isinstance(term, Unq):
        return [(0, term.body, term.at)]
    if isinstance(term, CLam):
        return [(0, term.body, position)]
    if isinstance(term, CApp):
        return [(0, term.fn, position)]
    return []


def _replace_child(term: Term, index: int, child: Term) -> Term:
    if isinstance(term, Lam):
        return Lam(term.var, term.cls, term.ann, child)
    if isinstance(term, App):
        return App(child, term.arg) if index == 0 else App(term.fn, child)
    if isinstance(term, Quo):
        return Quo(term.binder, term.bound, child)
    if isinstance(term, Unq):
        return Unq(term.at, child)
    if isinstance(term, CLam):
        return CLam(term.binder, term.bound, child)
    if isinstance(term, CApp):
        return CApp(child, term.cls)
    raise TypeError(f"term {term!r} has no children")


def _step_leftmost(term: Term, position: Classifier) -> tuple[Term, RedexSite] | None:
    hit = _contract(term, position)
    if hit is not None:
        return hit[0], RedexSite((), position, hit[1])
    for index, child, child_pos in _children(term, position):
        stepped = _step_leftmost(child, child_pos)
        if stepped is not None:
            new_child, site = stepped
            return (
                _replace_child(term, index, new_child),
                RedexSite((index,) + site.path, site.position, site.kind),
            )
    return None


def beta_step(term: Term, position: Classifier) -> Term | None:
    """Contract the leftmost-outermost redex at `position`; None if the
    term is already in normal form."""
    stepped = _step_leftmost(term, position)
    return stepped[0] if stepped is not None else None


@dataclass(frozen=True)
class Normalization:
    term: Term
    steps: int
    sites: tuple[RedexSite, ...]


def normalize(term: Term, position: Classifier, step_cap: int = 100_000) -> Normalization:
    """Reduce to beta-normal form, leftmost-outermost. For well-typed input
    the cap is unreachable; raw terms may hit StepCapExceeded."""
    sites: list[RedexSite] = []
    current = term
    for _ in range(step_cap):
        stepped = _step_leftmost(current, position)
        if stepped is None:
            return Normalization(current, len(sites), tuple(sites))
        current, site = stepped
        sites.append(site)
    if _step_leftmost(current, position) is None:
        return Normalization(current, len(sites), tuple(sites))
    raise StepCapExceeded(step_cap)


def redex_sites(term: Term, position: Classifier) -> list[RedexSite]:
    out: list[RedexSite] = []

    def walk(t: Term, p: Classifier, path: tuple[int, ...]) -> None:
        hit = _contract(t, p)
        if hit is not None:
            out.append(RedexSite(path, p, hit[1]))
        for index, child, child_pos in _children(t, p):
            walk(child, child_pos, path + (index,))

    walk(term, position, ())
    return out


def _contract_at(term: Term, path: tuple[int, ...], position: Classifier) -> Term:
    if not path:
        hit = _contract(term, position)
        if hit is None:
            raise ValueError("path does not point at a redex")
        return hit[0]
    for index, child, child_pos in _children(term, position):
        if index == path[0]:
            return _replace_child(term, index, _contract_at(child, path[1:], child_pos))
    raise ValueError("path leaves the term")


def normalize_innermost(
    term: Term, position: Classifier, rng: random.Random, step_cap: int = 100_000
) -> Normalization:
    """Reduce to normal form contracting a randomly chosen innermost redex
    at each step; used to witness uniqueness of normal forms."""
    sites: list[RedexSite] = []
    current = term
    for _ in range(step_cap):
        found = redex_sites(current, position)
        if not found:
            return Normalization(current, len(sites), tuple(sites))
        innermost = [
            s
            for s in found
            if not any(
                o.path != s.path and o.path[: len(s.path)] == s.path for o in found
            )
        ]
        site = rng.choice(innermost)
        current = _contract_at(current, site.path, position)
        sites.append(site)
    if not redex_sites(current, position):
        return Normalization(current, len(sites), tuple(sites))
    raise StepCapExceeded(step_cap)


# ---------------------------------------------------------------------------
# Canonical / neutral classification


class TermClass(enum.Enum):
    CANONICAL = "canonical"
    NEUTRAL = "neutral"


def classify(term: Term) -> TermClass:
    """Canonical iff the outermost former introduces a connective."""
    if isinstance(term, (Lam, Quo, CLam)):
        return TermClass.CANONICAL
    if isinstance(term, (Var, App, Unq, CApp)):
        return TermClass.NEUTRAL
    raise TypeError(f"not a term: {term!r}")


# ---------------------------------------------------------------------------
# Renamed-subformula test


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Imp):
        yield from subformulas(f.lhs)
        yield from subformulas(f.rhs)
    elif isinstance(f, (Box, Forall)):
        yield from subformulas(f.body)


def is_subformula(a: Formula, b: Formula) -> bool:
    """True iff `a` is a literal subexpression of `b` with classifiers
    renamed by some partial injective map."""
    return any(_renames_to(sub, a, {}, {}) for sub in subformulas(b))


def _renames_to(
    sub: Formula, target: Formula, fwd: dict[str, str], bwd: dict[str, str]
) -> bool:
    def cls_ok(c_sub: Classifier, c_tgt: Classifier) -> bool:
        if c_sub.name in fwd:
            return fwd[c_sub.name] == c_tgt.name
        if c_tgt.name in bwd:
            return False
        fwd[c_sub.name] = c_tgt.name
        bwd[c_tgt.name] = c_sub.name
        return True

    if type(sub) is not type(target):
        return False
    if isinstance(sub, Atom):
        return sub.name == target.name
    if isinstance(sub, Imp):
        return _renames_to(sub.lhs, target.lhs, fwd, bwd) and _renames_to(
            sub.rhs, target.rhs, fwd, bwd
        )
    if isinstance(sub, Box):
        return cls_ok(sub.bound, target.bound) and _renames_to(sub.body, target.body, fwd, bwd)
    if isinstance(sub, Forall):
        return (
            cls_ok(sub.binder, target.binder)
            and cls_ok(sub.bound, target.bound)
            and _renames_to(sub.body, target.body, fwd, bwd)
        )
    raise TypeError(f"not a formula: {sub!r}")
