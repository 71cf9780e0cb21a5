"""The Kripke-style S4 modal lambda calculus over context stacks, its type
synthesis, and the embedding into the bounded-modal kernel calculus.

Stacks grow one frame per quotation level; unbox_k jumps k frames back.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cs4 import from_box
from .syntax import (
    Classifier,
    Context,
    EMPTY,
    Formula,
    Hyp,
    INITIAL,
    Lam,
    NameSupply,
    Open,
    Shut,
    Term,
    Unq,
    Var,
)
from .syntax import App as KApp
from .syntax import Quo as KQuo


class BoxType:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class BAtom(BoxType):
    name: str


@dataclass(frozen=True, slots=True)
class BArrow(BoxType):
    lhs: BoxType
    rhs: BoxType


@dataclass(frozen=True, slots=True)
class BBoxTy(BoxType):
    body: BoxType


class BoxTerm:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class BVar(BoxTerm):
    name: str


@dataclass(frozen=True, slots=True)
class BLam(BoxTerm):
    var: str
    ann: BoxType
    body: BoxTerm


@dataclass(frozen=True, slots=True)
class BApp(BoxTerm):
    fn: BoxTerm
    arg: BoxTerm


@dataclass(frozen=True, slots=True)
class BBox(BoxTerm):
    body: BoxTerm


@dataclass(frozen=True, slots=True)
class BUnbox(BoxTerm):
    k: int
    body: BoxTerm

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("unbox index must be nonnegative")


Frame = tuple[tuple[str, BoxType], ...]
ContextStack = tuple[Frame, ...]

EMPTY_STACK: ContextStack = ((),)


class LamboxTypeError(Exception):
    def __init__(self, rule: str, message: str):
        super().__init__(f"{rule}: {message}")
        self.rule = rule


def lambox_infer(stack: ContextStack, term: BoxTerm) -> BoxType:
    """Synthesize the type of a box-calculus term under a context stack."""
    if not stack:
        raise ValueError("context stack must be nonempty")
    if isinstance(term, BVar):
        for x, ty in reversed(stack[-1]):
            if x == term.name:
                return ty
        raise LamboxTypeError("Var", f"variable {term.name} not bound in the top frame")
    if isinstance(term, BLam):
        inner = stack[:-1] + (stack[-1] + ((term.var, term.ann),),)
        body_ty = lambox_infer(inner, term.body)
        return BArrow(term.ann, body_ty)
    if isinstance(term, BApp):
        fn_ty = lambox_infer(stack, term.fn)
        if not isinstance(fn_ty, BArrow):
            raise LamboxTypeError("->-E", f"function has non-arrow type {fn_ty}")
        arg_ty = lambox_infer(stack, term.arg)
        if arg_ty != fn_ty.lhs:
            raise LamboxTypeError("->-E", f"argument type {arg_ty} does not match {fn_ty.lhs}")
        return fn_ty.rhs
    if isinstance(term, BBox):
        body_ty = lambox_infer(stack + ((),), term.body)
        return BBoxTy(body_ty)
    if isinstance(term, BUnbox):
        if term.k >= len(stack):
            raise LamboxTypeError(
                "box-E", f"unbox_{term.k} under a stack of only {len(stack)} frame(s)"
            )
        inner_ty = lambox_infer(stack[: len(stack) - term.k], term.body)
        if not isinstance(inner_ty, BBoxTy):
            raise LamboxTypeError("box-E", f"unboxed term has non-box type {inner_ty}")
        return inner_ty.body
    raise TypeError(f"not a box-calculus term: {term!r}")


# ---------------------------------------------------------------------------
# Translation into the kernel calculus


def translate(
    stack: ContextStack, term: BoxTerm, supply: NameSupply | None = None
) -> tuple[Context, Term]:
    """Translate a box-calculus judgment into a kernel context and term.

    Each stack frame boundary becomes an open item over "!", each
    hypothesis gets a fresh position classifier, and box/unbox become
    quotation and splice. The result types via the kernel at from_box of
    the source type.
    """
    lambox_infer(stack, term)
    if supply is None:
        supply = NameSupply()
    ctx, vec = _translate_stack(stack, supply)
    return ctx, _translate_term(term, vec, supply)


def _translate_stack(stack: ContextStack, supply: NameSupply) -> tuple[Context, list[Classifier]]:
    ctx = EMPTY
    vec = [INITIAL]
    for i, frame in enumerate(stack):
        if i > 0:
            delta = supply.fresh("d")
            ctx = ctx.extend(Open(delta, INITIAL))
            vec.append(delta)
        for x, ty in frame:
            delta = supply.fresh("d")
            ctx = ctx.extend(Hyp(x, delta, from_box(ty)))
            vec[-1] = delta
    return ctx, vec


def _translate_term(term: BoxTerm, vec: list[Classifier], supply: NameSupply) -> Term:
    if isinstance(term, BVar):
        return Var(term.name)
    if isinstance(term, BLam):
        delta = supply.fresh("d")
        body = _translate_term(term.body, vec[:-1] + [delta], supply)
        return Lam(term.var, delta, from_box(term.ann), body)
    if isinstance(term, BApp):
        return KApp(
            _translate_term(term.fn, vec, supply), _translate_term(term.arg, vec, supply)
        )
    if isinstance(term, BBox):
        delta = supply.fresh("d")
        return KQuo(delta, INITIAL, _translate_term(term.body, vec + [delta], supply))
    if isinstance(term, BUnbox):
        if term.k >= len(vec):
            raise LamboxTypeError(
                "box-E", f"unbox_{term.k} exceeds the translation stack depth {len(vec)}"
            )
        trimmed = vec[: len(vec) - term.k]
        return Unq(trimmed[-1], _translate_term(term.body, trimmed, supply))
    raise TypeError(f"not a box-calculus term: {term!r}")


# ---------------------------------------------------------------------------
# Printers (the parser lives with the main grammar in parsing.py)


def print_boxtype(t: BoxType) -> str:
    if isinstance(t, BAtom):
        return t.name
    if isinstance(t, BArrow):
        lhs = print_boxtype(t.lhs)
        if isinstance(t.lhs, BArrow):
            lhs = f"({lhs})"
        return f"{lhs} -> {print_boxtype(t.rhs)}"
    if isinstance(t, BBoxTy):
        body = print_boxtype(t.body)
        if isinstance(t.body, BArrow):
            body = f"({body})"
        return f"#{body}"
    raise TypeError(f"not a box type: {t!r}")


def print_boxterm(t: BoxTerm) -> str:
    if isinstance(t, BVar):
        return t.name
    if isinstance(t, BLam):
        return f"\\{t.var} : {print_boxtype(t.ann)}. {print_boxterm(t.body)}"
    if isinstance(t, BApp):
        fn = print_boxterm(t.fn)
        if isinstance(t.fn, BLam):
            fn = f"({fn})"
        arg = print_boxterm(t.arg)
        if isinstance(t.arg, (BApp, BLam)):
            arg = f"({arg})"
        return f"{fn} {arg}"
    if isinstance(t, BBox):
        return f"box{{ {print_boxterm(t.body)} }}"
    if isinstance(t, BUnbox):
        return f"unbox_{t.k}{{ {print_boxterm(t.body)} }}"
    raise TypeError(f"not a box-calculus term: {t!r}")


def print_stack(stack: ContextStack) -> str:
    frames = []
    for frame in stack:
        frames.append(", ".join(f"{x} : {print_boxtype(ty)}" for x, ty in frame))
    return " ; ".join(frames)


def print_lambox_judgment(stack: ContextStack, term: BoxTerm, ann: BoxType | None = None) -> str:
    left = print_stack(stack)
    out = (f"{left} |- " if left.strip() else "|- ") + print_boxterm(term)
    if ann is not None:
        out += f" : {print_boxtype(ann)}"
    return out
