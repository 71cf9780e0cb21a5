"""Seeded random generators: well-formed contexts and formulas, well-typed
terms (redex-rich by construction), model families satisfying the growth
conditions, birelational S4 models satisfying left-persistency, and raw
syntax trees for parser fuzzing."""

from __future__ import annotations

import random

from . import lambox
from .contexts import RelKind, derives, dom_c, pos, wf_context
from .cs4 import CS4Model, validate_cs4
from .kernel import infer
from .semantics import BmlModel, close, validate_model, validate_structure
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
    EMPTY,
    Forall,
    Formula,
    Hyp,
    Imp,
    INITIAL,
    Lam,
    NameSupply,
    Open,
    Quo,
    Shut,
    Term,
    Unq,
    Var,
    free_classifiers,
)

ATOMS = ("p", "q", "r")


class Retry(Exception):
    pass


class Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng

    # -- well-formed contexts and formulas

    def context(self, max_items: int = 10) -> Context:
        return self.extend_context(EMPTY, self.rng.randint(0, max_items))

    def extend_context(self, ctx: Context, n_items: int, kinds=("hyp", "open", "cls", "shut")) -> Context:
        """Append n random items keeping the context well formed."""
        supply = NameSupply(avoid={c.name for c in dom_c(ctx)})
        base = len(ctx)
        for i in range(n_items):
            kind = self.rng.choices(kinds, [4, 2, 2, 2][: len(kinds)])[0]
            dom = sorted(c.name for c in dom_c(ctx))
            if kind == "hyp":
                cls = supply.fresh("g")
                ctx = ctx.extend(Hyp(f"x{base + i}", cls, self.formula(ctx, depth=2)))
            elif kind == "open":
                ctx = ctx.extend(Open(supply.fresh("g"), Classifier(self.rng.choice(dom))))
            elif kind == "cls":
                ctx = ctx.extend(Cls(supply.fresh("g"), Classifier(self.rng.choice(dom))))
            else:
                here = pos(ctx)
                below = [
                    c for c in dom if derives(ctx, RelKind.MOD, Classifier(c), here)
                ]
                ctx = ctx.extend(Shut(Classifier(self.rng.choice(below))))
        wf_context(ctx)
        return ctx

    def formula(self, ctx: Context, depth: int = 3) -> Formula:
        if depth <= 0:
            return Atom(self.rng.choice(ATOMS))
        kind = self.rng.choices(["atom", "imp", "box", "forall"], [3, 3, 2, 2])[0]
        if kind == "atom":
            return Atom(self.rng.choice(ATOMS))
        if kind == "imp":
            return Imp(self.formula(ctx, depth - 1), self.formula(ctx, depth - 1))
        dom = sorted(c.name for c in dom_c(ctx))
        bound = Classifier(self.rng.choice(dom))
        if kind == "box":
            return Box(bound, self.formula(ctx, depth - 1))
        avoid = {c.name for c in dom_c(ctx)}
        binder = Classifier(_pick_fresh(avoid, "h"))
        inner = ctx.extend(Cls(binder, bound))
        return Forall(binder, bound, self.formula(inner, depth - 1))

    # -- well-typed terms

    def typed_term(self, ctx: Context, depth: int = 4) -> Term:
        """A term accepted by the kernel under ctx; construction retries
        whenever a side condition fails."""
        for _ in range(60):
            supply = NameSupply(avoid={c.name for c in dom_c(ctx)})
            try:
                term, _ = self._term(ctx, depth, supply)
            except Retry:
                continue
            result = infer(ctx, term)
            if result.ok:
                return term
        # identity at a fresh classifier always types
        supply = NameSupply(avoid={c.name for c in dom_c(ctx)})
        v = supply.fresh_name("v")
        return Lam(v, supply.fresh("t"), Atom(self.rng.choice(ATOMS)), Var(v))

    def _term(self, ctx: Context, depth: int, supply: NameSupply) -> tuple[Term, Formula]:
        here = pos(ctx)
        usable = [
            item
            for item in ctx
            if isinstance(item, Hyp) and derives(ctx, RelKind.PRE, item.cls, here)
        ]
        if depth <= 0:
            if usable and self.rng.random() < 0.7:
                hyp = self.rng.choice(usable)
                return Var(hyp.var), hyp.ann
            v = supply.fresh_name("v")
            ann = Atom(self.rng.choice(ATOMS))
            return Lam(v, supply.fresh("t"), ann, Var(v)), Imp(ann, ann)

        choices = ["lam", "quo", "clam", "redex_app", "redex_unq", "redex_capp"]
        weights = [3, 2, 2, 3, 2, 2]
        if usable:
            choices.append("var")
            weights.append(3)
            if any(isinstance(h.ann, Box) for h in usable):
                choices.append("unq_var")
                weights.append(2)
        kind = self.rng.choices(choices, weights)[0]

        if kind == "var":
            hyp = self.rng.choice(usable)
            return Var(hyp.var), hyp.ann

        if kind == "lam":
            cls = supply.fresh("t")
            ann = self.formula(ctx, depth=2)
            v = supply.fresh_name("v")
            body, body_ty = self._term(ctx.extend(Hyp(v, cls, ann)), depth - 1, supply)
            if cls in free_classifiers(body_ty):
                raise Retry
            return Lam(v, cls, ann, body), Imp(ann, body_ty)

        if kind == "redex_app":
            arg, arg_ty = self._term(ctx, depth - 1, supply)
            cls = supply.fresh("t")
            v = supply.fresh_name("v")
            body, body_ty = self._term(ctx.extend(Hyp(v, cls, arg_ty)), depth - 1, supply)
            if cls in free_classifiers(body_ty):
                raise Retry
            return App(Lam(v, cls, arg_ty, body), arg), body_ty

        if kind == "quo":
            bound = self._some_classifier(ctx)
            binder = supply.fresh("t")
            body, body_ty = self._term(ctx.extend(Open(binder, bound)), depth - 1, supply)
            if binder in free_classifiers(body_ty):
                raise Retry
            return Quo(binder, bound, body), Box(bound, body_ty)

        if kind == "redex_unq":
            # unq at the current position around a quotation bounded below it
            candidates = [
                c for c in dom_c(ctx) if derives(ctx, RelKind.PRE, c, here)
            ]
            bound = self.rng.choice(sorted(candidates, key=str))
            binder = supply.fresh("t")
            inner_ctx = ctx.extend(Shut(here)).extend(Open(binder, bound))
            body, body_ty = self._term(inner_ctx, depth - 1, supply)
            if binder in free_classifiers(body_ty):
                raise Retry
            return Unq(here, Quo(binder, bound, body)), body_ty

        if kind == "unq_var":
            boxed = [
                h
                for h in usable
                if isinstance(h.ann, Box)
                and derives(ctx, RelKind.PRE, h.ann.bound, here)
            ]
            if not boxed:
                raise Retry
            hyp = self.rng.choice(boxed)
            return Unq(here, Var(hyp.var)), hyp.ann.body

        if kind == "clam":
            bound = self._some_classifier(ctx)
            binder = supply.fresh("t")
            body, body_ty = self._term(ctx.extend(Cls(binder, bound)), depth - 1, supply)
            return CLam(binder, bound, body), Forall(binder, bound, body_ty)

        if kind == "redex_capp":
            bound = self._some_classifier(ctx)
            binder = supply.fresh("t")
            body, body_ty = self._term(ctx.extend(Cls(binder, bound)), depth - 1, supply)
            targets = [
                c for c in dom_c(ctx) if derives(ctx, RelKind.PRE, bound, c)
            ]
            target = self.rng.choice(sorted(targets, key=str))
            return (
                CApp(CLam(binder, bound, body), target),
                subst_cls(body_ty, ClsSubst(binder, target)),
            )

        raise AssertionError(kind)

    def _some_classifier(self, ctx: Context) -> Classifier:
        return Classifier(self.rng.choice(sorted(c.name for c in dom_c(ctx))))

    # -- model families

    def model(self, max_worlds: int = 4, max_elems: int = 5, atoms=("p", "q")) -> BmlModel:
        n = self.rng.randint(1, max_worlds)
        worlds = [f"w{i}" for i in range(n)]
        order = [
            (worlds[i], worlds[j])
            for i in range(n)
            for j in range(i + 1, n)
            if self.rng.random() < 0.4
        ]
        pool = ["!"] + [f"d{i}" for i in range(max_elems - 1)]
        preds: dict[str, list[str]] = {w: [] for w in worlds}
        for a, b in close(order, worlds):
            if a != b:
                preds[b].append(a)
        specs: dict[str, tuple[set[str], set, set, dict[str, set[str]]]] = {}
        structures = {}
        for i, w in enumerate(worlds):
            dom: set[str] = {"!"}
            pre_g: set = set()
            mod_g: set = set()
            val: dict[str, set[str]] = {atom: set() for atom in atoms}
            for p in preds[w]:
                pdom, ppre, pmod, pval = specs[p]
                dom |= pdom
                pre_g |= ppre
                mod_g |= pmod
                for atom in atoms:
                    val[atom] |= pval[atom]
            for e in pool:
                if e not in dom and self.rng.random() < 0.5:
                    dom.add(e)
            elems = sorted(dom)
            pre_g |= {("!", e) for e in elems}
            for _ in range(self.rng.randint(0, 3)):
                pre_g.add((self.rng.choice(elems), self.rng.choice(elems)))
            for _ in range(self.rng.randint(0, 3)):
                mod_g.add((self.rng.choice(elems), self.rng.choice(elems)))
            closed_pre = close(pre_g, dom)
            up = {d: {e for (a, e) in closed_pre if a == d} for d in dom}
            for atom in atoms:
                for e in elems:
                    if self.rng.random() < 0.3:
                        val[atom].add(e)
                members = set(val[atom])
                for e in list(members):
                    members |= up[e]
                val[atom] = members
            specs[w] = (dom, pre_g, mod_g, val)
            structures[w] = validate_structure(dom, pre=pre_g, mod=mod_g, valuation=val)
        return validate_model(worlds, order, structures)

    # -- birelational S4 models

    def cs4_model(self, max_worlds: int = 6, atoms=ATOMS) -> CS4Model:
        n = self.rng.randint(1, max_worlds)
        worlds = [f"c{i}" for i in range(n)]
        pre_g = {
            (worlds[i], worlds[j])
            for i in range(n)
            for j in range(i + 1, n)
            if self.rng.random() < 0.35
        }
        pre_closed = close(pre_g, worlds)
        up = {w: {v for (a, v) in pre_closed if a == w} for w in worlds}
        if self.rng.random() < 0.35:
            # already-stable family: the modal relation contains the preorder
            rel_g = set(pre_g) | {
                (self.rng.choice(worlds), self.rng.choice(worlds))
                for _ in range(self.rng.randint(0, n))
            }
        else:
            # sandwich a sparse seed between preorders; left-persistency
            # holds by construction while stability generally fails
            seed = {
                (self.rng.choice(worlds), self.rng.choice(worlds))
                for _ in range(self.rng.randint(0, n))
            }
            rel_g = {
                (a, d)
                for (b, c) in seed
                for a in worlds
                if b in up[a]
                for d in up[c]
            }
        val: dict[str, set[str]] = {}
        for atom in atoms:
            members: set[str] = set()
            for w in worlds:
                if self.rng.random() < 0.3:
                    members |= up[w]
            val[atom] = members
        return validate_cs4(worlds, pre_g, rel_g, val)

    # -- plain-box and initial-fragment formulas

    def box_formula(self, depth: int = 4) -> lambox.BoxType:
        if depth <= 0:
            return lambox.BAtom(self.rng.choice(ATOMS))
        kind = self.rng.choices(["atom", "arrow", "box"], [2, 3, 3])[0]
        if kind == "atom":
            return lambox.BAtom(self.rng.choice(ATOMS))
        if kind == "arrow":
            return lambox.BArrow(self.box_formula(depth - 1), self.box_formula(depth - 1))
        return lambox.BBoxTy(self.box_formula(depth - 1))

    def initial_formula(self, depth: int = 4) -> Formula:
        """A formula in the fragment where every box is bounded by '!'."""
        if depth <= 0:
            return Atom(self.rng.choice(ATOMS))
        kind = self.rng.choices(["atom", "imp", "box"], [2, 3, 3])[0]
        if kind == "atom":
            return Atom(self.rng.choice(ATOMS))
        if kind == "imp":
            return Imp(self.initial_formula(depth - 1), self.initial_formula(depth - 1))
        return Box(INITIAL, self.initial_formula(depth - 1))

    # -- raw trees for parser fuzzing

    def raw_formula(self, depth: int = 4) -> Formula:
        if depth <= 0:
            return Atom(self.rng.choice(ATOMS))
        kind = self.rng.choices(["atom", "imp", "box", "forall"], [2, 3, 2, 2])[0]
        if kind == "atom":
            return Atom(self.rng.choice(ATOMS))
        if kind == "imp":
            return Imp(self.raw_formula(depth - 1), self.raw_formula(depth - 1))
        if kind == "box":
            return Box(self._raw_classifier(), self.raw_formula(depth - 1))
        binder = Classifier(self.rng.choice(["h1", "h2", "h3"]))
        bound = self._raw_classifier(avoid=binder)
        return Forall(binder, bound, self.raw_formula(depth - 1))

    def raw_term(self, depth: int = 4) -> Term:
        if depth <= 0:
            return Var(self.rng.choice(["x", "y", "z"]))
        kind = self.rng.choices(
            ["var", "lam", "app", "quo", "unq", "clam", "capp"], [2, 3, 3, 2, 2, 2, 2]
        )[0]
        if kind == "var":
            return Var(self.rng.choice(["x", "y", "z"]))
        if kind == "lam":
            return Lam(
                self.rng.choice(["x", "y", "z"]),
                self._raw_ident(),
                self.raw_formula(depth - 1),
                self.raw_term(depth - 1),
            )
        if kind == "app":
            return App(self.raw_term(depth - 1), self.raw_term(depth - 1))
        if kind == "quo":
            binder = self._raw_ident()
            return Quo(binder, self._raw_classifier(avoid=binder), self.raw_term(depth - 1))
        if kind == "unq":
            return Unq(self._raw_classifier(), self.raw_term(depth - 1))
        if kind == "clam":
            binder = self._raw_ident()
            return CLam(binder, self._raw_classifier(avoid=binder), self.raw_term(depth - 1))
        return CApp(self.raw_term(depth - 1), self._raw_classifier())

    def raw_context(self, max_items: int = 6) -> Context:
        items = []
        for i in range(self.rng.randint(0, max_items)):
            kind = self.rng.choice(["hyp", "open", "shut", "cls"])
            if kind == "hyp":
                items.append(Hyp(f"x{i}", self._raw_ident(), self.raw_formula(2)))
            elif kind == "open":
                items.append(Open(self._raw_ident(), self._raw_classifier()))
            elif kind == "shut":
                items.append(Shut(self._raw_classifier()))
            else:
                items.append(Cls(self._raw_ident(), self._raw_classifier()))
        return Context(tuple(items))

    def _raw_ident(self) -> Classifier:
        return Classifier(self.rng.choice(["g1", "g2", "g3", "g4"]))

    def _raw_classifier(self, avoid: Classifier | None = None) -> Classifier:
        pool = [c for c in ["!", "g1", "g2", "g3", "g4"] if c != (avoid.name if avoid else None)]
        return Classifier(self.rng.choice(pool))


def _pick_fresh(avoid: set[str], base: str) -> str:
    n = 0
    while f"{base}{n}" in avoid:
        n += 1
    return f"{base}{n}"
