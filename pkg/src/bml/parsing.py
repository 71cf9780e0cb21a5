"""Lexer and recursive-descent parsers for the concrete syntax.

Grammar sketch (whitespace-insensitive, "#" opens a line comment unless it
immediately prefixes a box type):

    classifier ::= "!" | IDENT
    formula    ::= IDENT | formula "->" formula | "[" ">=" classifier "]" formula
                 | "forall" IDENT ">=" classifier "." formula | "(" formula ")"
    term       ::= IDENT | "\\" IDENT ":" formula "@" IDENT "." term | term term
                 | "quo" "[" IDENT ">=" classifier "]" "{" term "}"
                 | "unq" "[" classifier "]" "{" term "}"
                 | "gen" IDENT ">=" classifier "." term | term "[" classifier "]"
                 | "(" term ")"
    item       ::= IDENT ":" formula "@" IDENT | "open" IDENT ">=" classifier
                 | "shut" classifier | "cls" IDENT ">=" classifier
    judgment   ::= item*("," item) "|-" term (":" formula)?

"->" is right-associative and lowest; "[>= g]" binds tighter than "->";
"forall", "gen" and "\\" scope to the end of the expression; application
and "[g]" associate to the left and bind tightest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import lambox
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
    INITIAL,
    Lam,
    Open,
    Quo,
    Shut,
    Term,
    Unq,
    Var,
)


class ParseError(Exception):
    """Syntax error with source position and the token kinds expected."""

    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        loc = f"{line}:{col}"
        if expected:
            message = f"{message} (expected {', '.join(sorted(expected))})"
        super().__init__(f"{loc}: {message}")
        self.line = line
        self.col = col
        self.expected = expected


@dataclass(frozen=True, slots=True)
class Token:
    kind: str
    value: str
    line: int
    col: int


KEYWORDS = {
    "forall": "FORALL",
    "quo": "QUO",
    "unq": "UNQ",
    "gen": "GEN",
    "open": "OPEN",
    "shut": "SHUT",
    "cls": "CLS",
    "box": "BOX",
}

_PUNCT = {
    "->": "ARROW",
    ">=": "GE",
    "<=": "LE",
    "[=": "SUBMOD",
    "|-": "TURNSTILE",
    ".": "DOT",
    ",": "COMMA",
    ":": "COLON",
    "@": "AT",
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACK",
    "]": "RBRACK",
    "{": "LBRACE",
    "}": "RBRACE",
    "\\": "LAMBDA",
    "!": "BANG",
    ";": "SEMI",
    "#": "HASH",
}


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            # "#" glued to a type opens a box type; otherwise it's a comment.
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt.isalpha() or nxt in "_(#":
                tokens.append(Token("HASH", "#", line, col))
                i += 1
                col += 1
                continue
            while i < n and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 2]
        if two in ("->", ">=", "<=", "[=", "|-"):
            tokens.append(Token(_PUNCT[two], two, line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            tokens.append(Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in KEYWORDS:
                tokens.append(Token(KEYWORDS[word], word, line, col))
            elif word.startswith("unbox_") and word[6:].isdigit():
                tokens.append(Token("UNBOX", word[6:], line, col))
            else:
                tokens.append(Token("IDENT", word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("EOF", "", line, col))
    return tokens


_SHOW = {
    "IDENT": "an identifier",
    "BANG": "'!'",
    "ARROW": "'->'",
    "GE": "'>='",
    "DOT": "'.'",
    "COMMA": "','",
    "COLON": "':'",
    "AT": "'@'",
    "LPAREN": "'('",
    "RPAREN": "')'",
    "LBRACK": "'['",
    "RBRACK": "']'",
    "LBRACE": "'{'",
    "RBRACE": "'}'",
    "LAMBDA": "'\\'",
    "TURNSTILE": "'|-'",
    "SEMI": "';'",
    "HASH": "'#'",
    "EOF": "end of input",
}


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.peek().kind == kind:
            return self.advance()
        return None

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"found {tok.value!r}" if tok.kind != "EOF" else "input ended", {kind})
        return self.advance()

    def fail(self, message: str, expected: set[str]) -> None:
        tok = self.peek()
        shown = frozenset(_SHOW.get(k, k) for k in expected)
        raise ParseError(message, tok.line, tok.col, shown)

    def done(self) -> None:
        self.expect("EOF")

    # -- shared productions

    def classifier(self) -> Classifier:
        tok = self.peek()
        if tok.kind == "BANG":
            self.advance()
            return INITIAL
        if tok.kind == "IDENT":
            self.advance()
            return Classifier(tok.value)
        self.fail(f"found {tok.value!r}", {"IDENT", "BANG"})

    def ident(self) -> str:
        return self.expect("IDENT").value

    def binder(self) -> Classifier:
        # Binders are plain identifiers: "!" can never be re-declared.
        return Classifier(self.ident())

    # -- formulas

    def formula(self) -> Formula:
        left = self._formula_prefix()
        if self.accept("ARROW"):
            return Imp(left, self.formula())
        return left

    def _formula_prefix(self) -> Formula:
        tok = self.peek()
        if tok.kind == "FORALL":
            self.advance()
            binder = self.binder()
            self.expect("GE")
            bound = self.classifier()
            self.expect("DOT")
            body = self.formula()
            try:
                return Forall(binder, bound, body)
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        if tok.kind == "LBRACK":
            self.advance()
            self.expect("GE")
            bound = self.classifier()
            self.expect("RBRACK")
            return Box(bound, self._formula_prefix())
        if tok.kind == "IDENT":
            self.advance()
            return Atom(tok.value)
        if tok.kind == "LPAREN":
            self.advance()
            f = self.formula()
            self.expect("RPAREN")
            return f
        self.fail(f"found {tok.value!r}", {"IDENT", "FORALL", "LBRACK", "LPAREN"})

    # -- terms

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind == "LAMBDA":
            self.advance()
            var = self.ident()
            self.expect("COLON")
            ann = self.formula()
            self.expect("AT")
            cls = self.binder()
            self.expect("DOT")
            return Lam(var, cls, ann, self.term())
        if tok.kind == "GEN":
            self.advance()
            binder = self.binder()
            self.expect("GE")
            bound = self.classifier()
            self.expect("DOT")
            try:
                return CLam(binder, bound, self.term())
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        return self._app_term()

    _ATOM_STARTS = frozenset({"IDENT", "QUO", "UNQ", "LPAREN"})

    def _app_term(self) -> Term:
        t = self._atom_term()
        while True:
            kind = self.peek().kind
            if kind == "LBRACK":
                self.advance()
                cls = self.classifier()
                self.expect("RBRACK")
                t = CApp(t, cls)
            elif kind in self._ATOM_STARTS:
                t = App(t, self._atom_term())
            else:
                return t

    def _atom_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.advance()
            return Var(tok.value)
        if tok.kind == "QUO":
            self.advance()
            self.expect("LBRACK")
            binder = self.binder()
            self.expect("GE")
            bound = self.classifier()
            self.expect("RBRACK")
            self.expect("LBRACE")
            body = self.term()
            self.expect("RBRACE")
            try:
                return Quo(binder, bound, body)
            except ValueError as exc:
                raise ParseError(str(exc), tok.line, tok.col) from None
        if tok.kind == "UNQ":
            self.advance()
            self.expect("LBRACK")
            at = self.classifier()
            self.expect("RBRACK")
            self.expect("LBRACE")
            body = self.term()
            self.expect("RBRACE")
            return Unq(at, body)
        if tok.kind == "LPAREN":
            self.advance()
            t = self.term()
            self.expect("RPAREN")
            return t
        self.fail(f"found {tok.value!r}", {"IDENT", "QUO", "UNQ", "LPAREN", "LAMBDA", "GEN"})

    # -- contexts and judgments

    def context(self, stop: frozenset[str] = frozenset({"EOF"})) -> Context:
        if self.peek().kind in stop:
            return Context()
        items = [self.item()]
        while self.accept("COMMA"):
            items.append(self.item())
        return Context(tuple(items))

    def item(self):
        tok = self.peek()
        if tok.kind == "OPEN":
            self.advance()
            binder = self.binder()
            self.expect("GE")
            bound = self.classifier()
            return Open(binder, bound)
        if tok.kind == "SHUT":
            self.advance()
            return Shut(self.classifier())
        if tok.kind == "CLS":
            self.advance()
            binder = self.binder()
            self.expect("GE")
            bound = self.classifier()
            return Cls(binder, bound)
        if tok.kind == "IDENT":
            self.advance()
            self.expect("COLON")
            ann = self.formula()
            self.expect("AT")
            cls = self.binder()
            return Hyp(tok.value, cls, ann)
        self.fail(f"found {tok.value!r}", {"IDENT", "OPEN", "SHUT", "CLS"})

    def judgment(self) -> tuple[Context, Term, Formula | None]:
        ctx = self.context(stop=frozenset({"TURNSTILE"}))
        self.expect("TURNSTILE")
        term = self.term()
        ann = self.formula() if self.accept("COLON") else None
        self.done()
        return ctx, term, ann

    def rel_query(self) -> tuple[str, Classifier, Classifier]:
        a = self.classifier()
        tok = self.peek()
        if tok.kind == "LE":
            op = "<="
        elif tok.kind == "SUBMOD":
            op = "[="
        else:
            self.fail(f"found {tok.value!r}", {"'<='", "'[='"})
        self.advance()
        b = self.classifier()
        self.done()
        return op, a, b

    # -- box calculus

    def boxtype(self) -> lambox.BoxType:
        left = self._boxtype_prefix()
        if self.accept("ARROW"):
            return lambox.BArrow(left, self.boxtype())
        return left

    def _boxtype_prefix(self) -> lambox.BoxType:
        tok = self.peek()
        if tok.kind == "HASH":
            self.advance()
            return lambox.BBoxTy(self._boxtype_prefix())
        if tok.kind == "IDENT":
            self.advance()
            return lambox.BAtom(tok.value)
        if tok.kind == "LPAREN":
            self.advance()
            t = self.boxtype()
            self.expect("RPAREN")
            return t
        self.fail(f"found {tok.value!r}", {"IDENT", "HASH", "LPAREN"})

    def boxterm(self) -> lambox.BoxTerm:
        if self.accept("LAMBDA"):
            var = self.ident()
            self.expect("COLON")
            ann = self.boxtype()
            self.expect("DOT")
            return lambox.BLam(var, ann, self.boxterm())
        t = self._boxatom()
        while self.peek().kind in ("IDENT", "BOX", "UNBOX", "LPAREN"):
            t = lambox.BApp(t, self._boxatom())
        return t

    def _boxatom(self) -> lambox.BoxTerm:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.advance()
            return lambox.BVar(tok.value)
        if tok.kind == "BOX":
            self.advance()
            self.expect("LBRACE")
            body = self.boxterm()
            self.expect("RBRACE")
            return lambox.BBox(body)
        if tok.kind == "UNBOX":
            self.advance()
            self.expect("LBRACE")
            body = self.boxterm()
            self.expect("RBRACE")
            return lambox.BUnbox(int(tok.value), body)
        if tok.kind == "LPAREN":
            self.advance()
            t = self.boxterm()
            self.expect("RPAREN")
            return t
        self.fail(f"found {tok.value!r}", {"IDENT", "BOX", "UNBOX", "LPAREN", "LAMBDA"})

    def lambox_judgment(
        self,
    ) -> tuple[lambox.ContextStack, lambox.BoxTerm, lambox.BoxType | None]:
        frames = [self._frame()]
        while self.accept("SEMI"):
            frames.append(self._frame())
        self.expect("TURNSTILE")
        term = self.boxterm()
        ann = self.boxtype() if self.accept("COLON") else None
        self.done()
        return tuple(frames), term, ann

    def _frame(self) -> lambox.Frame:
        hyps = []
        while self.peek().kind == "IDENT":
            x = self.ident()
            self.expect("COLON")
            hyps.append((x, self.boxtype()))
            if not self.accept("COMMA"):
                break
        return tuple(hyps)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.done()
    return t


def parse_context(text: str) -> Context:
    p = _Parser(text)
    ctx = p.context()
    p.done()
    return ctx


def parse_judgment(text: str) -> tuple[Context, Term, Formula | None]:
    return _Parser(text).judgment()


def parse_rel_query(text: str) -> tuple[str, Classifier, Classifier]:
    return _Parser(text).rel_query()


def parse_lambox_judgment(
    text: str,
) -> tuple[lambox.ContextStack, lambox.BoxTerm, lambox.BoxType | None]:
    return _Parser(text).lambox_judgment()
