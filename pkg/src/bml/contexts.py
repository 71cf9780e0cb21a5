"""Positions, classifier domains, the scope/stage relation judgments, and
well-formedness checking for contexts and formulas.

The two relations are decided by reachability over per-item generator
edges: scope edges alone decide "<=" (intuitionistic) and scope plus stage
edges decide "[=" (modal), both reflexively and transitively closed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .printing import print_formula, print_item
from .syntax import (
    Atom,
    Box,
    Classifier,
    Cls,
    Context,
    Forall,
    Formula,
    Hyp,
    Imp,
    INITIAL,
    Open,
    Shut,
)


class RelKind(enum.Enum):
    PRE = "<="
    MOD = "[="


class ContextError(Exception):
    """A context or formula failed well-formedness; carries the offending
    item index (or formula path)."""

    def __init__(self, message: str, index: int | None = None, path: tuple[str, ...] = ()):
        where = ""
        if index is not None:
            where = f" (item {index})"
        elif path:
            where = f" (at {'.'.join(path)})"
        super().__init__(message + where)
        self.index = index
        self.path = path


class DuplicateClassifier(ContextError):
    pass


class UnknownClassifier(ContextError):
    pass


class IllFormedAnnotation(ContextError):
    pass


class ShutNotBelow(ContextError):
    pass


def pos(ctx: Context) -> Classifier:
    """The classifier at which deduction under `ctx` takes place."""
    for item in reversed(ctx.items):
        if isinstance(item, Hyp):
            return item.cls
        if isinstance(item, Open):
            return item.binder
        if isinstance(item, Shut):
            return item.at
        # a classifier declaration leaves the position unchanged
    return INITIAL


def dom_c(ctx: Context) -> frozenset[Classifier]:
    out = {INITIAL}
    for item in ctx:
        if isinstance(item, Hyp):
            out.add(item.cls)
        elif isinstance(item, (Open, Cls)):
            out.add(item.binder)
    return frozenset(out)


@dataclass(frozen=True)
class RelationGraph:
    nodes: frozenset[Classifier]
    pre_edges: frozenset[tuple[Classifier, Classifier]]
    mod_edges: frozenset[tuple[Classifier, Classifier]]


def build_graph(ctx: Context) -> RelationGraph:
    """Generator edges induced by each item over its prefix position."""
    nodes = dom_c(ctx)
    pre: set[tuple[Classifier, Classifier]] = set()
    mod: set[tuple[Classifier, Classifier]] = set()
    here = INITIAL
    declared = {INITIAL}
    for i, item in enumerate(ctx):
        if isinstance(item, Hyp):
            pre.add((here, item.cls))
            declared.add(item.cls)
            here = item.cls
        elif isinstance(item, Open):
            if item.bound not in declared:
                raise UnknownClassifier(f"undeclared classifier {item.bound}", index=i)
            pre.add((item.bound, item.binder))
            mod.add((here, item.binder))
            declared.add(item.binder)
            here = item.binder
        elif isinstance(item, Shut):
            if item.at not in declared:
                raise UnknownClassifier(f"undeclared classifier {item.at}", index=i)
            here = item.at
        elif isinstance(item, Cls):
            if item.bound not in declared:
                raise UnknownClassifier(f"undeclared classifier {item.bound}", index=i)
            pre.add((item.bound, item.binder))
            declared.add(item.binder)
        else:
            raise TypeError(f"not a context item: {item!r}")
    return RelationGraph(nodes, frozenset(pre), frozenset(mod))


def _reachable(
    nodes: frozenset[Classifier], edges: frozenset[tuple[Classifier, Classifier]]
) -> dict[Classifier, frozenset[Classifier]]:
    succs: dict[Classifier, list[Classifier]] = {n: [] for n in nodes}
    for a, b in edges:
        succs[a].append(b)
    closure: dict[Classifier, frozenset[Classifier]] = {}
    for start in nodes:
        seen = {start}
        stack = [start]
        while stack:
            cur = stack.pop()
            for nxt in succs[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        closure[start] = frozenset(seen)
    return closure


@lru_cache(maxsize=4096)
def _closures(ctx: Context):
    graph = build_graph(ctx)
    pre = _reachable(graph.nodes, graph.pre_edges)
    mod = _reachable(graph.nodes, graph.pre_edges | graph.mod_edges)
    return pre, mod


def derives(ctx: Context, kind: RelKind, a: Classifier, b: Classifier) -> bool:
    """Does `ctx` derive a <= b (PRE) or a [= b (MOD)?"""
    dom = dom_c(ctx)
    if a not in dom:
        raise UnknownClassifier(f"unknown classifier {a}")
    if b not in dom:
        raise UnknownClassifier(f"unknown classifier {b}")
    pre, mod = _closures(ctx)
    table = pre if kind is RelKind.PRE else mod
    return b in table[a]


# ---------------------------------------------------------------------------
# Well-formedness


def wf_formula(ctx: Context, formula: Formula, _path: tuple[str, ...] = ()) -> None:
    """Check every classifier occurrence is in scope; raises UnknownClassifier
    with a path into the formula."""
    if isinstance(formula, Atom):
        return
    if isinstance(formula, Imp):
        wf_formula(ctx, formula.lhs, _path + ("lhs",))
        wf_formula(ctx, formula.rhs, _path + ("rhs",))
        return
    if isinstance(formula, Box):
        if formula.bound not in dom_c(ctx):
            raise UnknownClassifier(
                f"unknown classifier {formula.bound}", path=_path + ("bound",)
            )
        wf_formula(ctx, formula.body, _path + ("body",))
        return
    if isinstance(formula, Forall):
        if formula.bound not in dom_c(ctx):
            raise UnknownClassifier(
                f"unknown classifier {formula.bound}", path=_path + ("bound",)
            )
        if formula.binder in dom_c(ctx):
            raise DuplicateClassifier(
                f"quantifier re-declares {formula.binder}", path=_path + ("binder",)
            )
        wf_formula(ctx.extend(Cls(formula.binder, formula.bound)), formula.body, _path + ("body",))
        return
    raise TypeError(f"not a formula: {formula!r}")


def wf_context(ctx: Context) -> None:
    """Check the context item by item; raises on the first violation."""
    for i, item in enumerate(ctx):
        prefix = ctx.prefix(i)
        dom = dom_c(prefix)
        if isinstance(item, Hyp):
            if item.cls in dom:
                raise DuplicateClassifier(f"re-declared classifier {item.cls}", index=i)
            try:
                wf_formula(prefix, item.ann)
            except ContextError as exc:
                raise IllFormedAnnotation(
                    f"ill-formed annotation {print_formula(item.ann)}: {exc}", index=i
                ) from exc
        elif isinstance(item, (Open, Cls)):
            if item.binder in dom:
                raise DuplicateClassifier(f"re-declared classifier {item.binder}", index=i)
            if item.bound not in dom:
                raise UnknownClassifier(f"unknown classifier {item.bound}", index=i)
        elif isinstance(item, Shut):
            if item.at not in dom:
                raise UnknownClassifier(f"unknown classifier {item.at}", index=i)
            if not derives(prefix, RelKind.MOD, item.at, pos(prefix)):
                raise ShutNotBelow(
                    f"shut requires {item.at} [= {pos(prefix)}, which {print_item(item)} "
                    f"cannot derive here",
                    index=i,
                )
        else:
            raise TypeError(f"not a context item: {item!r}")


def is_wf_context(ctx: Context) -> bool:
    try:
        wf_context(ctx)
        return True
    except ContextError:
        return False
