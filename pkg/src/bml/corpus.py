"""Bundled judgment corpus: proof terms for the seven axiom schemes at
their listed types, a staged-program example, and a box-calculus corpus
for the embedding. All entries are stored as concrete syntax and go
through the real parser."""

from __future__ import annotations

from .parsing import parse_judgment, parse_lambox_judgment

AXIOMS: tuple[tuple[str, str], ...] = (
    (
        "K",
        r"|- gen g >= !. \f : [>= g](p -> q) @ gf. \a : [>= g]p @ ga."
        r" quo[g2 >= g]{ unq[gf]{ f } unq[ga]{ a } }"
        r" : forall g >= !. [>= g](p -> q) -> [>= g]p -> [>= g]q",
    ),
    (
        "T",
        r"|- \x : [>= !]p @ g1. unq[g1]{ x } : [>= !]p -> p",
    ),
    (
        "4inv",
        r"|- gen g >= !. \x : [>= g][>= g]p @ gx. quo[g2 >= g]{ unq[g2]{ unq[gx]{ x } } }"
        r" : forall g >= !. [>= g][>= g]p -> [>= g]p",
    ),
    (
        "4",
        r"|- gen g >= !. \x : [>= g]p @ gx. quo[g1 >= g]{ quo[g2 >= g]{ unq[gx]{ x } } }"
        r" : forall g >= !. [>= g]p -> [>= g][>= g]p",
    ),
    (
        "Mon",
        r"|- gen g1 >= !. \x : [>= g1]p @ gx. gen g2 >= g1. quo[g3 >= g2]{ unq[gx]{ x } }"
        r" : forall g1 >= !. [>= g1]p -> forall g2 >= g1. [>= g2]p",
    ),
    (
        "MonInv",
        r"|- gen g1 >= !. \x : (forall g2 >= g1. [>= g2]p) @ gx."
        r" quo[g3 >= g1]{ unq[gx]{ x[g3] } }"
        r" : forall g1 >= !. (forall g2 >= g1. [>= g2]p) -> [>= g1]p",
    ),
    (
        "KInvStar",
        r"|- gen g1 >= !. \f : (forall g2 >= g1. [>= g2]p -> [>= g2]q) @ g3."
        r" quo[g4 >= g1]{ \a : p @ g5. unq[g3]{ f[g5] quo[g6 >= g5]{ a } } }"
        r" : forall g1 >= !. (forall g2 >= g1. [>= g2]p -> [>= g2]q) -> [>= g1](p -> q)",
    ),
)

# Further well-typed judgments: hypothesis use, a staged "let code = quote
# (sqr n) in run code", eliminations, and a reducible instance of K.
EXTRAS: tuple[tuple[str, str], ...] = (
    ("identity", r"|- \x : p @ g. x : p -> p"),
    ("hyp", r"x : p @ g1, y : q @ g2 |- x : p"),
    (
        "staged",
        r"n : a @ g1, sqr : a -> a @ g2 |-"
        r" (\code : [>= g2]a @ g3. unq[g3]{ code }) quo[g4 >= g2]{ sqr n } : a",
    ),
    ("t-instance", r"x : [>= !]p @ g1 |- unq[g1]{ x } : p"),
    ("inst", r"cls g1 >= !, x : (forall g2 >= g1. p) @ gx |- x[g1] : p"),
    ("under-open", r"open g1 >= ! |- \x : p @ g2. x : p -> p"),
    (
        "k-applied",
        r"x : [>= !](p -> q) @ g1, y : [>= !]p @ g2 |-"
        r" (gen g >= !. \f : [>= g](p -> q) @ gf. \a : [>= g]p @ ga."
        r" quo[g3 >= g]{ unq[gf]{ f } unq[ga]{ a } })[!] x y : [>= !]q",
    ),
)

LAMBOX: tuple[tuple[str, str], ...] = (
    ("run", r"|- \x : #p. unbox_0{ x } : #p -> p"),
    (
        "box-k",
        r"|- \f : #(p -> q). \a : #p. box{ unbox_1{ f } unbox_1{ a } }"
        r" : #(p -> q) -> #p -> #q",
    ),
    ("box-4", r"|- \x : #p. box{ box{ unbox_2{ x } } } : #p -> ##p"),
    ("boxed-identity", r"|- box{ \x : p. x } : #(p -> p)"),
    ("stacked", r"x : #p ; |- unbox_1{ x } : p"),
    ("box-t", r"|- \x : #p. box{ unbox_1{ x } } : #p -> #p"),
)


def axiom_judgments():
    return [(name, *parse_judgment(text)) for name, text in AXIOMS]


def extra_judgments():
    return [(name, *parse_judgment(text)) for name, text in EXTRAS]


def all_judgments():
    return axiom_judgments() + extra_judgments()


def lambox_judgments():
    return [(name, *parse_lambox_judgment(text)) for name, text in LAMBOX]
