"""Finite birelational structures and their world-indexed families, the
mutually recursive satisfaction relations, context satisfaction, and
exhaustive semantic-consequence checking over a supplied model family.

Validators take human-written generator edges and close them; semantic
violations are collected and reported together rather than one at a time.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .contexts import dom_c, pos
from .syntax import (
    Atom,
    Box,
    Cls,
    Context,
    Forall,
    Formula,
    Hyp,
    Imp,
    Open,
    Shut,
    free_classifiers,
)

Pair = tuple[str, str]


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: tuple

    def __str__(self) -> str:
        return f"{self.kind}{self.detail!r}"


class InvalidStructure(Exception):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(map(str, violations)))
        self.violations = violations


class InvalidModel(Exception):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(map(str, violations)))
        self.violations = violations


class UnassignedClassifier(Exception):
    def __init__(self, name: str):
        super().__init__(f"assignment does not cover classifier {name}")
        self.name = name


class ModelFormatError(ValueError):
    pass


def close(pairs: Iterable[Pair], domain: Iterable[str]) -> frozenset[Pair]:
    """Reflexive-transitive closure over the given domain."""
    nodes = list(domain)
    succ: dict[str, set[str]] = {n: {n} for n in nodes}
    for a, b in pairs:
        succ[a].add(b)
    changed = True
    while changed:
        changed = False
        for n in nodes:
            extra = set()
            for m in succ[n]:
                extra |= succ[m]
            if not extra <= succ[n]:
                succ[n] |= extra
                changed = True
    return frozenset((a, b) for a in nodes for b in succ[a])


def _upward(rel: frozenset[Pair], domain: Iterable[str]) -> dict[str, frozenset[str]]:
    out: dict[str, set[str]] = {d: set() for d in domain}
    for a, b in rel:
        out[a].add(b)
    return {d: frozenset(s) for d, s in out.items()}


@dataclass
class BmlStructure:
    """A validated structure: closed preorders, least root, upward-closed
    valuation. Treat as immutable."""

    domain: frozenset[str]
    root: str
    pre: frozenset[Pair]
    mod: frozenset[Pair]
    valuation: dict[str, frozenset[str]]
    pre_up: dict[str, frozenset[str]] = field(default_factory=dict, repr=False, compare=False)
    mod_up: dict[str, frozenset[str]] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.pre_up:
            self.pre_up = _upward(self.pre, self.domain)
        if not self.mod_up:
            self.mod_up = _upward(self.mod, self.domain)


def validate_structure(
    domain: Iterable[str],
    pre: Iterable[Pair] = (),
    mod: Iterable[Pair] = (),
    valuation: Mapping[str, Iterable[str]] | None = None,
    root: str = "!",
) -> BmlStructure:
    """Close the generator edges, then check root-leastness, stability and
    upward-closed valuations; raises InvalidStructure with all violations."""
    dom = frozenset(domain)
    violations: list[Violation] = []
    if root not in dom:
        raise InvalidStructure([Violation("RootNotInDomain", (root,))])
    for a, b in itertools.chain(pre, mod):
        for end in (a, b):
            if end not in dom:
                violations.append(Violation("UnknownElement", (end,)))
    if violations:
        raise InvalidStructure(violations)
    pre_closed = close(pre, dom)
    # scope edges lift into stage edges, so mod is closed over both
    mod_closed = close(set(pre) | set(mod), dom)
    for d in sorted(dom):
        if (root, d) not in pre_closed:
            violations.append(Violation("NotRootLeast", (d,)))
    for p in pre_closed:
        if p not in mod_closed:
            violations.append(Violation("StabilityViolated", (p,)))
    val: dict[str, frozenset[str]] = {}
    for atom, elems in (valuation or {}).items():
        elems = frozenset(elems)
        for e in elems:
            if e not in dom:
                violations.append(Violation("UnknownElement", (atom, e)))
                continue
            for (a, b) in pre_closed:
                if a == e and b not in elems:
                    violations.append(Violation("ValuationNotUpwardClosed", (atom, (a, b))))
        val[atom] = elems
    if violations:
        raise InvalidStructure(violations)
    return BmlStructure(dom, root, pre_closed, mod_closed, val)


@dataclass
class BmlModel:
    """A validated world-indexed family of structures. Treat as immutable."""

    worlds: frozenset[str]
    order: frozenset[Pair]
    structures: dict[str, BmlStructure]
    order_up: dict[str, frozenset[str]] = field(default_factory=dict, repr=False, compare=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.order_up:
            self.order_up = _upward(self.order, self.worlds)


def validate_model(
    worlds: Iterable[str],
    order: Iterable[Pair],
    structures: Mapping[str, BmlStructure],
) -> BmlModel:
    """Close the world order and check every growth condition for every
    ordered pair of worlds."""
    ws = frozenset(worlds)
    violations: list[Violation] = []
    if not ws:
        raise InvalidModel([Violation("NoWorlds", ())])
    for w in ws:
        if w not in structures:
            violations.append(Violation("MissingStructure", (w,)))
    for a, b in order:
        for end in (a, b):
            if end not in ws:
                violations.append(Violation("UnknownWorld", (end,)))
    if violations:
        raise InvalidModel(violations)
    closed = close(order, ws)
    for w, v in sorted(closed):
        if w == v:
            continue
        sw, sv = structures[w], structures[v]
        if not sw.domain <= sv.domain:
            violations.append(Violation("DomainShrank", (w, v)))
        if not sw.pre <= sv.pre:
            violations.append(Violation("PreNotPreserved", (w, v)))
        if not sw.mod <= sv.mod:
            violations.append(Violation("ModNotPreserved", (w, v)))
        for atom, elems in sw.valuation.items():
            if not elems <= sv.valuation.get(atom, frozenset()):
                violations.append(Violation("ValuationNotPreserved", (atom, w, v)))
        if sw.root != sv.root:
            violations.append(Violation("RootChanged", (w, v)))
    if violations:
        raise InvalidModel(violations)
    return BmlModel(ws, closed, dict(structures))


# ---------------------------------------------------------------------------
# Satisfaction


def _effective_rho(model: BmlModel, world: str, rho: Mapping[str, str]) -> dict[str, str]:
    root = model.structures[world].root
    if "!" in rho and rho["!"] != root:
        raise ValueError(f"assignment maps '!' to {rho['!']}, not the root {root}")
    out = dict(rho)
    out["!"] = root
    return out


def _needed(formula: Formula) -> frozenset[str]:
    return frozenset(c.name for c in free_classifiers(formula)) | {"!"}


def satisfies(
    model: BmlModel, world: str, elem: str, rho: Mapping[str, str], formula: Formula
) -> bool:
    """The persistent satisfaction relation: the formula holds at `elem`
    in every world above `world`."""
    if world not in model.worlds:
        raise ValueError(f"unknown world {world}")
    if elem not in model.structures[world].domain:
        raise ValueError(f"unknown element {elem} in world {world}")
    return _sat(model, world, elem, _effective_rho(model, world, rho), formula)


def _sat(model: BmlModel, world: str, elem: str, rho: dict[str, str], formula: Formula) -> bool:
    needed = _needed(formula)
    for name in needed:
        if name not in rho:
            raise UnassignedClassifier(name)
    key = (world, elem, formula, frozenset((n, rho[n]) for n in needed))
    cached = model._cache.get(key)
    if cached is not None:
        return cached
    result = all(_sat_at(model, v, elem, rho, formula) for v in sorted(model.order_up[world]))
    model._cache[key] = result
    return result


def _sat_at(model: BmlModel, w: str, d: str, rho: dict[str, str], formula: Formula) -> bool:
    s = model.structures[w]
    if isinstance(formula, Atom):
        return d in s.valuation.get(formula.name, frozenset())
    if isinstance(formula, Imp):
        return all(
            not _sat(model, w, e, rho, formula.lhs) or _sat(model, w, e, rho, formula.rhs)
            for e in sorted(s.pre_up[d])
        )
    if isinstance(formula, Box):
        lower = rho[formula.bound.name]
        return all(
            _sat(model, w, e, rho, formula.body)
            for e in sorted(s.mod_up[d])
            if e in s.pre_up[lower]
        )
    if isinstance(formula, Forall):
        lower = rho[formula.bound.name]
        binder = formula.binder.name
        return all(
            _sat(model, w, d, {**rho, binder: e}, formula.body)
            for e in sorted(s.pre_up[lower])
        )
    raise TypeError(f"not a formula: {formula!r}")


def satisfies_context(
    model: BmlModel, world: str, rho: Mapping[str, str], ctx: Context
) -> bool:
    """Clause-by-clause interpretation of a context at a world."""
    s = model.structures[world]
    r = _effective_rho(model, world, rho)

    def lookup(name: str) -> str:
        if name not in r:
            raise UnassignedClassifier(name)
        return r[name]

    here = "!"
    for item in ctx:
        if isinstance(item, Hyp):
            target = lookup(item.cls.name)
            if (lookup(here), target) not in s.pre:
                return False
            if not _sat(model, world, target, r, item.ann):
                return False
            here = item.cls.name
        elif isinstance(item, Open):
            target = lookup(item.binder.name)
            if (lookup(here), target) not in s.mod:
                return False
            if (lookup(item.bound.name), target) not in s.pre:
                return False
            here = item.binder.name
        elif isinstance(item, Shut):
            here = item.at.name
        elif isinstance(item, Cls):
            if (lookup(item.bound.name), lookup(item.binder.name)) not in s.pre:
                return False
        else:
            raise TypeError(f"not a context item: {item!r}")
    return True


@dataclass(frozen=True)
class Consequence:
    holds: bool
    model_index: int | None = None
    world: str | None = None
    rho: dict[str, str] | None = None


def consequence_on(models: Sequence[BmlModel], ctx: Context, formula: Formula) -> Consequence:
    """Exhaustively check the consequence over every model, world and
    covering assignment; reports the first countermodel found."""
    mentioned = {c.name for c in dom_c(ctx)} | {c.name for c in free_classifiers(formula)}
    names = sorted(mentioned - {"!"})
    here = pos(ctx).name
    for index, model in enumerate(models):
        for world in sorted(model.worlds):
            s = model.structures[world]
            dom = sorted(s.domain)
            for combo in itertools.product(dom, repeat=len(names)):
                rho = dict(zip(names, combo))
                rho["!"] = s.root
                if not satisfies_context(model, world, rho, ctx):
                    continue
                if not _sat(model, world, rho[here], rho, formula):
                    return Consequence(False, index, world, rho)
    return Consequence(True)


# ---------------------------------------------------------------------------
# Model files


def load_model(text: str) -> BmlModel:
    """Parse and validate the JSON model format: top-level `worlds` and
    `order`, then one key per world with `domain`, `pre`, `mod`, `val`."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(raw, dict) or "worlds" not in raw:
        raise ModelFormatError("model file must be an object with a 'worlds' list")
    worlds = raw["worlds"]
    if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
        raise ModelFormatError("'worlds' must be a list of world names")
    order_raw = raw.get("order", [])
    if not isinstance(order_raw, list):
        raise ModelFormatError("'order' must be a list of [w, v] pairs")
    order = []
    for entry in order_raw:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise ModelFormatError(f"bad order entry {entry!r}")
        order.append((entry[0], entry[1]))
    structures = {}
    for w in worlds:
        spec = raw.get(w)
        if not isinstance(spec, dict):
            raise ModelFormatError(f"missing per-world entry for {w!r}")
        domain = spec.get("domain", [])
        if "!" not in domain:
            raise ModelFormatError(f"world {w!r} domain must contain '!'")
        structures[w] = validate_structure(
            domain,
            pre=[tuple(p) for p in spec.get("pre", [])],
            mod=[tuple(p) for p in spec.get("mod", [])],
            valuation=spec.get("val", {}),
        )
    return validate_model(worlds, order, structures)
