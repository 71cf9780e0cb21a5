"""Birelational S4 models, the formula translations between the bounded
and plain box languages, and the model constructions connecting the two
semantics: stabilization, root extension, the one-point family, and
flattening."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

from .semantics import BmlModel, BmlStructure, Violation, close, validate_model, validate_structure
from .syntax import Atom, Box, Formula, Imp, INITIAL

World = Hashable
WPair = tuple[World, World]


class InvalidCS4Model(Exception):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(map(str, violations)))
        self.violations = violations


class NotInFragment(Exception):
    """The formula leaves the plain-box fragment (a non-initial bound or a
    quantifier)."""

    def __init__(self, message: str, path: tuple[str, ...]):
        at = ".".join(path) if path else "root"
        super().__init__(f"{message} (at {at})")
        self.path = path


def _succ_map(rel: frozenset[WPair], worlds: frozenset[World]) -> dict[World, frozenset[World]]:
    out: dict[World, set[World]] = {w: set() for w in worlds}
    for a, b in rel:
        out[a].add(b)
    return {w: frozenset(s) for w, s in out.items()}


@dataclass
class CS4Model:
    """Preordered worlds with a modal preorder satisfying left-persistency
    and an upward-closed valuation. Treat as immutable."""

    worlds: frozenset[World]
    pre: frozenset[WPair]
    rel: frozenset[WPair]
    valuation: dict[str, frozenset[World]]
    pre_up: dict[World, frozenset[World]] = field(
        default_factory=dict, repr=False, compare=False
    )
    rel_up: dict[World, frozenset[World]] = field(
        default_factory=dict, repr=False, compare=False
    )
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.pre_up:
            self.pre_up = _succ_map(self.pre, self.worlds)
        if not self.rel_up:
            self.rel_up = _succ_map(self.rel, self.worlds)

    @property
    def stable(self) -> bool:
        return self.pre <= self.rel


def _compose(
    first: frozenset[WPair], second_up: dict[World, frozenset[World]]
) -> set[WPair]:
    return {(a, c) for (a, b) in first for c in second_up[b]}


def validate_cs4(
    worlds: Iterable[World],
    pre: Iterable[WPair] = (),
    rel: Iterable[WPair] = (),
    valuation: Mapping[str, Iterable[World]] | None = None,
) -> CS4Model:
    ws = frozenset(worlds)
    violations: list[Violation] = []
    if not ws:
        raise InvalidCS4Model([Violation("NoWorlds", ())])
    pre_closed = close(pre, ws)
    rel_closed = close(rel, ws)
    pre_up = _succ_map(pre_closed, ws)
    rel_up = _succ_map(rel_closed, ws)
    rel_then_pre = _compose(rel_closed, pre_up)
    pre_then_rel = _compose(pre_closed, rel_up)
    for pair in sorted(rel_then_pre - pre_then_rel, key=repr):
        violations.append(Violation("LeftPersistencyViolated", pair))
    val: dict[str, frozenset[World]] = {}
    for atom, members in (valuation or {}).items():
        members = frozenset(members)
        for w in members:
            if w not in ws:
                violations.append(Violation("UnknownWorld", (atom, w)))
                continue
            if not pre_up[w] <= members:
                violations.append(Violation("ValuationNotUpwardClosed", (atom, w)))
        val[atom] = members
    if violations:
        raise InvalidCS4Model(violations)
    return CS4Model(ws, pre_closed, rel_closed, val, pre_up, rel_up)


# ---------------------------------------------------------------------------
# Formula translations


def to_box(formula: Formula, _path: tuple[str, ...] = ()):
    """Swap initial-bounded boxes for plain boxes; partial on the full
    language."""
    from .lambox import BArrow, BAtom, BBoxTy

    if isinstance(formula, Atom):
        return BAtom(formula.name)
    if isinstance(formula, Imp):
        return BArrow(
            to_box(formula.lhs, _path + ("lhs",)), to_box(formula.rhs, _path + ("rhs",))
        )
    if isinstance(formula, Box):
        if not formula.bound.is_initial:
            raise NotInFragment(f"box bounded by {formula.bound}, not '!'", _path)
        return BBoxTy(to_box(formula.body, _path + ("body",)))
    raise NotInFragment("classifier quantifier", _path)


def from_box(boxtype) -> Formula:
    """Swap plain boxes for initial-bounded boxes; total."""
    from .lambox import BArrow, BAtom, BBoxTy

    if isinstance(boxtype, BAtom):
        return Atom(boxtype.name)
    if isinstance(boxtype, BArrow):
        return Imp(from_box(boxtype.lhs), from_box(boxtype.rhs))
    if isinstance(boxtype, BBoxTy):
        return Box(INITIAL, from_box(boxtype.body))
    raise TypeError(f"not a box type: {boxtype!r}")


# ---------------------------------------------------------------------------
# Satisfaction


def cs4_satisfies(model: CS4Model, world: World, boxtype) -> bool:
    """Intuitionistic clauses for atoms and arrows; the box quantifies over
    modal successors of every preorder successor."""
    from .lambox import BArrow, BAtom, BBoxTy

    key = (world, boxtype)
    cached = model._cache.get(key)
    if cached is not None:
        return cached
    if isinstance(boxtype, BAtom):
        result = world in model.valuation.get(boxtype.name, frozenset())
    elif isinstance(boxtype, BArrow):
        result = all(
            not cs4_satisfies(model, v, boxtype.lhs) or cs4_satisfies(model, v, boxtype.rhs)
            for v in model.pre_up[world]
        )
    elif isinstance(boxtype, BBoxTy):
        result = all(
            cs4_satisfies(model, u, boxtype.body)
            for v in model.pre_up[world]
            for u in model.rel_up[v]
        )
    else:
        raise TypeError(f"not a box type: {boxtype!r}")
    model._cache[key] = result
    return result


# ---------------------------------------------------------------------------
# Model constructions


def stabilize(model: CS4Model) -> CS4Model:
    """Replace the modal relation by scope-then-modal composition; the
    result is stable and satisfies the same plain-box formulas."""
    composed = {(a, c) for (a, b) in model.pre for c in model.rel_up[b]}
    return validate_cs4(model.worlds, model.pre, composed, model.valuation)


def root_extend(model: CS4Model) -> BmlStructure:
    """Adjoin a fresh least element "!" below a stable model; the old
    worlds keep their theories."""
    if not model.stable:
        raise ValueError("root extension requires a stable model")
    if "!" in model.worlds:
        raise ValueError("the model already uses '!' as a world name")
    domain = {str(w) for w in model.worlds} | {"!"}
    pre = {(str(a), str(b)) for (a, b) in model.pre} | {("!", d) for d in domain}
    mod = {(str(a), str(b)) for (a, b) in model.rel} | {("!", d) for d in domain}
    everywhere = frozenset(model.worlds)
    valuation = {
        atom: {str(w) for w in members} | ({"!"} if members == everywhere else set())
        for atom, members in model.valuation.items()
    }
    return validate_structure(domain, pre=pre, mod=mod, valuation=valuation)


def one_point(structure: BmlStructure) -> BmlModel:
    """The single-world family carrying one structure."""
    return validate_model(["*"], [("*", "*")], {"*": structure})


def flatten(model: BmlModel) -> CS4Model:
    """Collapse a world-indexed family into one birelational model over the
    disjoint sum of the domains."""
    worlds = {(w, d) for w in model.worlds for d in model.structures[w].domain}
    pre = {
        ((w, d), (v, e))
        for (w, v) in model.order
        for d in model.structures[w].domain
        for e in model.structures[v].domain
        if (d, e) in model.structures[v].pre
    }
    rel = {
        ((w, d), (w, e))
        for w in model.worlds
        for (d, e) in model.structures[w].mod
    }
    atoms = {atom for w in model.worlds for atom in model.structures[w].valuation}
    valuation = {
        atom: {
            (w, d)
            for w in model.worlds
            for d in model.structures[w].valuation.get(atom, frozenset())
        }
        for atom in atoms
    }
    return validate_cs4(worlds, pre, rel, valuation)
