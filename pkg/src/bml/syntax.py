"""Abstract syntax for bounded modal logic: classifiers, formulas, proof
terms, and contexts, plus free-name computation and alpha-equivalence.

All values are immutable after construction, so they hash and compare
structurally and are safe to share across checking sessions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class Classifier:
    """A scope name. The reserved name "!" is the global-scope root."""

    name: str

    def __str__(self) -> str:
        return self.name

    @property
    def is_initial(self) -> bool:
        return self.name == "!"


INITIAL = Classifier("!")


def _require_bindable(cls: Classifier, what: str) -> None:
    if cls.is_initial:
        raise ValueError(f"{what} may not bind the initial classifier '!'")


# ---------------------------------------------------------------------------
# Formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Imp(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    """Bounded modality: body holds across modal transitions into scopes
    above `bound`."""

    bound: Classifier
    body: Formula


@dataclass(frozen=True, slots=True)
class Forall(Formula):
    """Classifier quantifier: binder ranges over scopes above `bound`."""

    binder: Classifier
    bound: Classifier
    body: Formula

    def __post_init__(self) -> None:
        _require_bindable(self.binder, "a quantifier")
        if self.binder == self.bound:
            raise ValueError("quantifier binder must differ from its bound")


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str


@dataclass(frozen=True, slots=True)
class Lam(Term):
    var: str
    cls: Classifier
    ann: Formula
    body: Term

    def __post_init__(self) -> None:
        _require_bindable(self.cls, "a lambda")


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Quo(Term):
    """Quotation: moves into a fresh scope `binder` above `bound`."""

    binder: Classifier
    bound: Classifier
    body: Term

    def __post_init__(self) -> None:
        _require_bindable(self.binder, "a quotation")
        if self.binder == self.bound:
            raise ValueError("quotation binder must differ from its bound")


@dataclass(frozen=True, slots=True)
class Unq(Term):
    """Splice: moves back to scope `at` along a modal transition."""

    at: Classifier
    body: Term


@dataclass(frozen=True, slots=True)
class CLam(Term):
    binder: Classifier
    bound: Classifier
    body: Term

    def __post_init__(self) -> None:
        _require_bindable(self.binder, "a classifier abstraction")
        if self.binder == self.bound:
            raise ValueError("classifier abstraction binder must differ from its bound")


@dataclass(frozen=True, slots=True)
class CApp(Term):
    fn: Term
    cls: Classifier


# ---------------------------------------------------------------------------
# Contexts


class ContextItem:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Hyp(ContextItem):
    var: str
    cls: Classifier
    ann: Formula

    def __post_init__(self) -> None:
        _require_bindable(self.cls, "a hypothesis")


@dataclass(frozen=True, slots=True)
class Open(ContextItem):
    binder: Classifier
    bound: Classifier

    def __post_init__(self) -> None:
        _require_bindable(self.binder, "an open item")


@dataclass(frozen=True, slots=True)
class Shut(ContextItem):
    at: Classifier


@dataclass(frozen=True, slots=True)
class Cls(ContextItem):
    binder: Classifier
    bound: Classifier

    def __post_init__(self) -> None:
        _require_bindable(self.binder, "a classifier declaration")


@dataclass(frozen=True, slots=True)
class Context:
    items: tuple[ContextItem, ...] = ()

    def extend(self, item: ContextItem) -> "Context":
        return Context(self.items + (item,))

    def concat(self, other: "Context") -> "Context":
        return Context(self.items + other.items)

    def prefix(self, end: int) -> "Context":
        return Context(self.items[:end])

    def __iter__(self) -> Iterator[ContextItem]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


EMPTY = Context()

Subject = Union[Formula, Term]


# ---------------------------------------------------------------------------
# Free names


def free_classifiers(subject: Subject) -> frozenset[Classifier]:
    """The free classifiers of a formula or term.

    A lambda's position classifier counts as free; quantifier, quotation
    and classifier-abstraction binders are removed while their bounds are
    added.
    """
    if isinstance(subject, Atom):
        return frozenset()
    if isinstance(subject, Imp):
        return free_classifiers(subject.lhs) | free_classifiers(subject.rhs)
    if isinstance(subject, Box):
        return free_classifiers(subject.body) | {subject.bound}
    if isinstance(subject, Forall):
        return (free_classifiers(subject.body) - {subject.binder}) | {subject.bound}
    if isinstance(subject, Var):
        return frozenset()
    if isinstance(subject, Lam):
        return free_classifiers(subject.body) | {subject.cls}
    if isinstance(subject, App):
        return free_classifiers(subject.fn) | free_classifiers(subject.arg)
    if isinstance(subject, Quo):
        return (free_classifiers(subject.body) | {subject.bound}) - {subject.binder}
    if isinstance(subject, Unq):
        return free_classifiers(subject.body) | {subject.at}
    if isinstance(subject, CLam):
        return (free_classifiers(subject.body) - {subject.binder}) | {subject.bound}
    if isinstance(subject, CApp):
        return free_classifiers(subject.fn) | {subject.cls}
    raise TypeError(f"not a formula or term: {subject!r}")


def free_variables(term: Term) -> frozenset[str]:
    if isinstance(term, Var):
        return frozenset({term.name})
    if isinstance(term, Lam):
        return free_variables(term.body) - {term.var}
    if isinstance(term, App):
        return free_variables(term.fn) | free_variables(term.arg)
    if isinstance(term, (Quo, Unq, CLam)):
        return free_variables(term.body)
    if isinstance(term, CApp):
        return free_variables(term.fn)
    raise TypeError(f"not a term: {term!r}")


def variable_names(term: Term) -> set[str]:
    """Every variable name occurring in a term, free or bound."""
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, Lam):
        return variable_names(term.body) | {term.var}
    if isinstance(term, App):
        return variable_names(term.fn) | variable_names(term.arg)
    if isinstance(term, (Quo, Unq, CLam)):
        return variable_names(term.body)
    if isinstance(term, CApp):
        return variable_names(term.fn)
    raise TypeError(f"not a term: {term!r}")


def classifier_names(subject: object) -> set[str]:
    """Every classifier name occurring anywhere in a formula, term, context
    or context item, free or bound. Used to pick safe fresh names."""
    out: set[str] = set()

    def go(s: object) -> None:
        if isinstance(s, Classifier):
            out.add(s.name)
        elif isinstance(s, Atom) or isinstance(s, Var):
            pass
        elif isinstance(s, Imp):
            go(s.lhs)
            go(s.rhs)
        elif isinstance(s, Box):
            go(s.bound)
            go(s.body)
        elif isinstance(s, Forall):
            go(s.binder)
            go(s.bound)
            go(s.body)
        elif isinstance(s, Lam):
            go(s.cls)
            go(s.ann)
            go(s.body)
        elif isinstance(s, App):
            go(s.fn)
            go(s.arg)
        elif isinstance(s, Quo) or isinstance(s, CLam):
            go(s.binder)
            go(s.bound)
            go(s.body)
        elif isinstance(s, Unq):
            go(s.at)
            go(s.body)
        elif isinstance(s, CApp):
            go(s.fn)
            go(s.cls)
        elif isinstance(s, Hyp):
            go(s.cls)
            go(s.ann)
        elif isinstance(s, Open) or isinstance(s, Cls):
            go(s.binder)
            go(s.bound)
        elif isinstance(s, Shut):
            go(s.at)
        elif isinstance(s, Context):
            for item in s:
                go(item)
        else:
            raise TypeError(f"cannot collect classifier names from {s!r}")

    go(subject)
    return out


# ---------------------------------------------------------------------------
# Alpha-equivalence


def _cls_eq(a: Classifier, b: Classifier, env1: dict[str, int], env2: dict[str, int]) -> bool:
    d1 = env1.get(a.name)
    d2 = env2.get(b.name)
    if d1 is None and d2 is None:
        return a == b
    return d1 == d2


def alpha_eq(a: Subject, b: Subject) -> bool:
    """Structural equality up to consistent renaming of bound names.

    Renameable binders are quantifier/quotation/classifier-abstraction
    classifiers and lambda term variables. Everything else, including a
    lambda's position classifier and all bound annotations, must agree
    (through the renaming where an enclosing binder captures it).
    """
    return _alpha(a, b, {}, {}, {}, {}, 0)


def _alpha(
    a: Subject,
    b: Subject,
    cenv1: dict[str, int],
    cenv2: dict[str, int],
    venv1: dict[str, int],
    venv2: dict[str, int],
    depth: int,
) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Atom):
        return a.name == b.name
    if isinstance(a, Imp):
        return _alpha(a.lhs, b.lhs, cenv1, cenv2, venv1, venv2, depth) and _alpha(
            a.rhs, b.rhs, cenv1, cenv2, venv1, venv2, depth
        )
    if isinstance(a, Box):
        return _cls_eq(a.bound, b.bound, cenv1, cenv2) and _alpha(
            a.body, b.body, cenv1, cenv2, venv1, venv2, depth
        )
    if isinstance(a, Forall):
        if not _cls_eq(a.bound, b.bound, cenv1, cenv2):
            return False
        c1 = {**cenv1, a.binder.name: depth}
        c2 = {**cenv2, b.binder.name: depth}
        return _alpha(a.body, b.body, c1, c2, venv1, venv2, depth + 1)
    if isinstance(a, Var):
        d1 = venv1.get(a.name)
        d2 = venv2.get(b.name)
        if d1 is None and d2 is None:
            return a.name == b.name
        return d1 == d2
    if isinstance(a, Lam):
        if not _cls_eq(a.cls, b.cls, cenv1, cenv2):
            return False
        if not _alpha(a.ann, b.ann, cenv1, cenv2, venv1, venv2, depth):
            return False
        v1 = {**venv1, a.var: depth}
        v2 = {**venv2, b.var: depth}
        return _alpha(a.body, b.body, cenv1, cenv2, v1, v2, depth + 1)
    if isinstance(a, App):
        return _alpha(a.fn, b.fn, cenv1, cenv2, venv1, venv2, depth) and _alpha(
            a.arg, b.arg, cenv1, cenv2, venv1, venv2, depth
        )
    if isinstance(a, (Quo, CLam)):
        if not _cls_eq(a.bound, b.bound, cenv1, cenv2):
            return False
        c1 = {**cenv1, a.binder.name: depth}
        c2 = {**cenv2, b.binder.name: depth}
        return _alpha(a.body, b.body, c1, c2, venv1, venv2, depth + 1)
    if isinstance(a, Unq):
        return _cls_eq(a.at, b.at, cenv1, cenv2) and _alpha(
            a.body, b.body, cenv1, cenv2, venv1, venv2, depth
        )
    if isinstance(a, CApp):
        return _alpha(a.fn, b.fn, cenv1, cenv2, venv1, venv2, depth) and _cls_eq(
            a.cls, b.cls, cenv1, cenv2
        )
    raise TypeError(f"not a formula or term: {a!r}")


# ---------------------------------------------------------------------------
# Fresh names


def fresh_name(base: str, avoid: set[str]) -> str:
    """`base` itself if unused, else the first `base_N` that is."""
    if base not in avoid:
        return base
    n = 1
    while f"{base}_{n}" in avoid:
        n += 1
    return f"{base}_{n}"


class NameSupply:
    """Deterministic source of fresh classifier and variable names.

    Names are drawn per base as base0, base1, ... skipping anything in the
    avoid set or already handed out, so repeated runs over the same input
    produce identical output.
    """

    def __init__(self, avoid: "set[str] | frozenset[str]" = frozenset()):
        self._used: set[str] = set(avoid)
        self._counters: dict[str, int] = {}

    def reserve(self, names: "set[str] | frozenset[str]") -> None:
        self._used |= set(names)

    def fresh(self, base: str = "g") -> Classifier:
        return Classifier(self.fresh_name(base))

    def fresh_name(self, base: str = "g") -> str:
        n = self._counters.get(base, 0)
        while f"{base}{n}" in self._used:
            n += 1
        self._counters[base] = n + 1
        name = f"{base}{n}"
        self._used.add(name)
        return name
