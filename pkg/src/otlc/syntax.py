"""Abstract syntax, S-expression reader/printer, and term utilities.

The term language is a lambda calculus with explicitly annotated binders,
integer and boolean literals, a fixed set of primitive operations, and a
three-armed conditional.  Types include a top type, numbers, singleton
booleans, latent-predicate arrows, finite untagged unions, and refinements
of a base type by a built-in predicate.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class Constant(Enum):
    """The seven built-in operations; there are no user-defined constants."""

    ADD1 = "add1"
    NOT = "not"
    NUMBER_P = "number?"
    BOOLEAN_P = "boolean?"
    PROCEDURE_P = "procedure?"
    EVEN_P = "even?"
    ODD_P = "odd?"


CONSTANT_BY_NAME = {c.value: c for c in Constant}


# ---------------------------------------------------------------------------
# Types


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class TopT(Type):
    pass


@dataclass(frozen=True)
class NumT(Type):
    pass


@dataclass(frozen=True)
class TrueT(Type):
    pass


@dataclass(frozen=True)
class FalseT(Type):
    pass


@dataclass(frozen=True)
class Arrow(Type):
    arg: Type
    res: Type
    latent: Type | None = None  # None means "not a predicate"


@dataclass(frozen=True)
class UnionT(Type):
    members: tuple[Type, ...]


@dataclass(frozen=True)
class Refine(Type):
    pred: Constant
    base: Type  # always the argument type of the predicate's own arrow


TOP = TopT()
NUM = NumT()
TRUE_T = TrueT()
FALSE_T = FalseT()
BOOLEAN = UnionT((TRUE_T, FALSE_T))
BOT = UnionT(())


# ---------------------------------------------------------------------------
# Visible predicates


class Pred:
    __slots__ = ()


@dataclass(frozen=True)
class TypeOfPred(Pred):
    """The test is true exactly when `var` holds a value of `type`."""

    type: Type
    var: str


@dataclass(frozen=True)
class VarPred(Pred):
    """The test is true exactly when `var` is not #f."""

    var: str


@dataclass(frozen=True)
class TruePred(Pred):
    pass


@dataclass(frozen=True)
class FalsePred(Pred):
    pass


@dataclass(frozen=True)
class NonePred(Pred):
    pass


TT = TruePred()
FF = FalsePred()
NONE_PRED = NonePred()


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class Num(Expr):
    value: int


@dataclass(frozen=True)
class Bool(Expr):
    value: bool


@dataclass(frozen=True)
class Const(Expr):
    c: Constant


@dataclass(frozen=True)
class Abs(Expr):
    param: str
    annot: Type
    body: Expr


@dataclass(frozen=True)
class App(Expr):
    rator: Expr
    rand: Expr


@dataclass(frozen=True)
class If(Expr):
    test: Expr
    then: Expr
    els: Expr


def is_value(e: Expr) -> bool:
    return isinstance(e, (Num, Bool, Const, Abs))


def free_vars(e: Expr) -> frozenset[str]:
    match e:
        case Var(name):
            return frozenset([name])
        case Abs(param, _, body):
            return free_vars(body) - {param}
        case App(rator, rand):
            return free_vars(rator) | free_vars(rand)
        case If(test, then, els):
            return free_vars(test) | free_vars(then) | free_vars(els)
        case _:
            return frozenset()


def substitute(body: Expr, x: str, v: Expr) -> Expr:
    """Replace free occurrences of `x` in `body` with the closed value `v`."""
    if free_vars(v):
        raise ValueError(f"substitute: replacement term is not closed: {print_expr(v)}")

    def go(e: Expr) -> Expr:
        match e:
            case Var(name):
                return v if name == x else e
            case Abs(param, annot, b):
                if param == x:  # shadowed
                    return e
                return Abs(param, annot, go(b))
            case App(rator, rand):
                return App(go(rator), go(rand))
            case If(test, then, els):
                return If(go(test), go(then), go(els))
            case _:
                return e

    return go(body)


# ---------------------------------------------------------------------------
# Reader


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Token:
    text: str  # "(", ")", ":", an atom, or "" for end of input
    line: int
    col: int


_DELIMS = {"(", ")", ":", ";"}

RESERVED_WORDS = {
    "lambda", "if", "U", "->", "Refinement", "declare-refinement",
    "Top", "Number", "True", "False", "Boolean", "Bot",
}


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch.isspace():
            col += 1
            i += 1
        elif ch == ";":  # comment to end of line
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "():":
            toks.append(_Token(ch, line, col))
            col += 1
            i += 1
        else:
            start = i
            start_col = col
            while i < n and not text[i].isspace() and text[i] not in _DELIMS:
                i += 1
                col += 1
            toks.append(_Token(text[start:i], line, start_col))
    toks.append(_Token("", line, col))
    return toks


_INT_CHARS = set("0123456789")


def _is_integer(atom: str) -> bool:
    digits = atom[1:] if atom[:1] in "+-" else atom
    return bool(digits) and set(digits) <= _INT_CHARS


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        tok = self.toks[self.pos]
        if tok.text:
            self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        shown = tok.text if tok.text else "<end of input>"
        raise ParseError(f"{message} (got {shown!r})", tok.line, tok.col)

    def expect(self, text: str):
        tok = self.next()
        if tok.text != text:
            self.fail(f"expected {text!r}", tok)

    def expect_end(self):
        if self.peek().text:
            self.fail("expected end of input")

    # -- expressions

    def read_expr(self) -> Expr:
        tok = self.next()
        if tok.text == "(":
            head = self.peek()
            if head.text == "lambda":
                self.next()
                self.expect("(")
                param = self.read_ident()
                self.expect(":")
                annot = self.read_type()
                self.expect(")")
                body = self.read_expr()
                self.expect(")")
                return Abs(param, annot, body)
            if head.text == "if":
                self.next()
                test = self.read_expr()
                then = self.read_expr()
                els = self.read_expr()
                self.expect(")")
                return If(test, then, els)
            rator = self.read_expr()
            rand = self.read_expr()
            self.expect(")")
            return App(rator, rand)
        return self.read_atom_expr(tok)

    def read_atom_expr(self, tok: _Token) -> Expr:
        atom = tok.text
        if not atom or atom in "():":
            self.fail("expected an expression", tok)
        if _is_integer(atom):
            return Num(int(atom))
        if atom == "#t":
            return Bool(True)
        if atom == "#f":
            return Bool(False)
        if atom in CONSTANT_BY_NAME:
            return Const(CONSTANT_BY_NAME[atom])
        if atom.startswith("#"):
            self.fail("unknown # literal", tok)
        if atom in RESERVED_WORDS:
            self.fail("reserved word used as a variable", tok)
        return Var(atom)

    def read_ident(self) -> str:
        tok = self.next()
        atom = tok.text
        if not atom or atom in "():":
            self.fail("expected an identifier", tok)
        if atom in RESERVED_WORDS or atom in CONSTANT_BY_NAME or atom.startswith("#") or _is_integer(atom):
            self.fail("expected an identifier", tok)
        return atom

    # -- types

    def read_type(self) -> Type:
        tok = self.next()
        if tok.text == "(":
            head = self.next()
            if head.text == "U":
                members: list[Type] = []
                while self.peek().text not in (")", ""):
                    if self.peek().text == "Boolean":
                        # Boolean is (U True False); splice it so that the
                        # printed form (U Number Boolean) reads back as the
                        # flat union it denotes
                        self.next()
                        members.extend((TRUE_T, FALSE_T))
                    else:
                        members.append(self.read_type())
                self.expect(")")
                return UnionT(tuple(members))
            if head.text == "->":
                arg = self.read_type()
                res = self.read_type()
                latent = None
                if self.peek().text == ":":
                    self.next()
                    latent = self.read_type()
                self.expect(")")
                return Arrow(arg, res, latent)
            if head.text == "Refinement":
                ctok = self.next()
                c = CONSTANT_BY_NAME.get(ctok.text)
                if c is None:
                    self.fail("unknown constant in Refinement type", ctok)
                self.expect(")")
                from .subtyping import refinement_base

                return Refine(c, refinement_base(c))
            self.fail("expected U, -> or Refinement", head)
        atom = tok.text
        if atom == "Top":
            return TOP
        if atom == "Number":
            return NUM
        if atom == "True":
            return TRUE_T
        if atom == "False":
            return FALSE_T
        if atom == "Boolean":
            return UnionT((TRUE_T, FALSE_T))
        if atom == "Bot":
            return UnionT(())
        self.fail("expected a type", tok)

    # -- predicates

    def read_pred(self) -> Pred:
        tok = self.peek()
        if tok.text == "tt":
            self.next()
            return TT
        if tok.text == "ff":
            self.next()
            return FF
        if tok.text == "none":
            self.next()
            return NONE_PRED
        # A lone identifier is a variable predicate; otherwise a type
        # followed by "@ x".
        if (tok.text not in ("(", ")", ":", "")
                and self.toks[self.pos + 1].text == ""
                and tok.text not in RESERVED_WORDS
                and tok.text not in CONSTANT_BY_NAME
                and not tok.text.startswith("#")
                and not _is_integer(tok.text)
                and tok.text != "@"):
            self.next()
            return VarPred(tok.text)
        t = self.read_type()
        self.expect("@")
        return TypeOfPred(t, self.read_ident())


def parse_expr(text: str) -> Expr:
    r = _Reader(text)
    e = r.read_expr()
    r.expect_end()
    return e


def parse_type(text: str) -> Type:
    r = _Reader(text)
    t = r.read_type()
    r.expect_end()
    return t


def parse_pred(text: str) -> Pred:
    r = _Reader(text)
    p = r.read_pred()
    r.expect_end()
    return p


def parse_program(text: str) -> tuple[tuple[Constant, ...], Expr]:
    """A program is zero or more (declare-refinement c) forms, then one
    expression."""
    r = _Reader(text)
    decls: list[Constant] = []
    while (r.peek().text == "(" and r.toks[r.pos + 1].text == "declare-refinement"):
        r.next()
        r.next()
        ctok = r.next()
        c = CONSTANT_BY_NAME.get(ctok.text)
        if c is None:
            r.fail("unknown constant in declare-refinement", ctok)
        r.expect(")")
        decls.append(c)
    e = r.read_expr()
    r.expect_end()
    return tuple(decls), e


# ---------------------------------------------------------------------------
# Printer


def print_type(t: Type) -> str:
    match t:
        case TopT():
            return "Top"
        case NumT():
            return "Number"
        case TrueT():
            return "True"
        case FalseT():
            return "False"
        case UnionT(members):
            if members == ():
                return "Bot"
            if members == (TRUE_T, FALSE_T):
                return "Boolean"
            parts = []
            i = 0
            while i < len(members):
                if members[i] == TRUE_T and i + 1 < len(members) and members[i + 1] == FALSE_T:
                    parts.append("Boolean")
                    i += 2
                elif members[i] == BOOLEAN:
                    # a literally nested (U True False) member must not
                    # collide with the spliced Boolean keyword
                    parts.append("(U True False)")
                    i += 1
                else:
                    parts.append(print_type(members[i]))
                    i += 1
            return "(U " + " ".join(parts) + ")"
        case Arrow(arg, res, latent):
            if latent is None:
                return f"(-> {print_type(arg)} {print_type(res)})"
            return f"(-> {print_type(arg)} {print_type(res)} : {print_type(latent)})"
        case Refine(c, _):
            return f"(Refinement {c.value})"
    raise TypeError(f"not a type: {t!r}")


def print_pred(p: Pred) -> str:
    match p:
        case TypeOfPred(t, x):
            return f"{print_type(t)} @ {x}"
        case VarPred(x):
            return x
        case TruePred():
            return "tt"
        case FalsePred():
            return "ff"
        case NonePred():
            return "none"
    raise TypeError(f"not a predicate: {p!r}")


def print_expr(e: Expr) -> str:
    match e:
        case Var(name):
            return name
        case Num(value):
            return str(value)
        case Bool(value):
            return "#t" if value else "#f"
        case Const(c):
            return c.value
        case Abs(param, annot, body):
            return f"(lambda ({param} : {print_type(annot)}) {print_expr(body)})"
        case App(rator, rand):
            return f"({print_expr(rator)} {print_expr(rand)})"
        case If(test, then, els):
            return f"(if {print_expr(test)} {print_expr(then)} {print_expr(els)})"
    raise TypeError(f"not an expression: {e!r}")
