"""Parsing and printing for the textual data-type language.

Two layers of text exist: definition sets and structure expressions.

Definition lines either introduce an algebraic data type,

    ::List a = Cons a (List a) | Nil

or declare a single free-standing constructor by its joint signature, result
type first (possibly absent), then the arrow, then argument types:

    FlexiCons: a <- a
    SimpleFemCons: <- Colour

Structure expressions apply constructors to arguments, with `_` for an
unfilled slot and an optional result-type annotation after the head:

    Cons:[List Bool] _ (Cons True Nil)

Type expressions are unary: an upper-case name optionally applied to one
atom, or a lower-case type variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class TextLangError(ValueError):
    pass


class AdtSyntaxError(TextLangError):
    def __init__(self, line: int, column: int, expected: str, found: str):
        self.line, self.column, self.expected, self.found = line, column, expected, found
        super().__init__(f"line {line}, column {column}: expected {expected}, found {found}")


class DuplicateTypeCons(TextLangError):
    pass


class DuplicateConstructor(TextLangError):
    pass


class UnknownTypeParam(TextLangError):
    pass


class HoleAtHeadPosition(TextLangError):
    pass


class MissingArrow(TextLangError):
    pass


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class TypeVar:
    name: str


@dataclass(frozen=True)
class TypeApp:
    cons: str
    arg: "TypeExpr | None" = None


TypeExpr = Union[TypeVar, TypeApp]


@dataclass(frozen=True)
class ConstructorAlt:
    name: str
    arg_types: tuple[TypeExpr, ...]


@dataclass(frozen=True)
class AdtDefinition:
    type_cons: str
    param: str | None
    alternatives: tuple[ConstructorAlt, ...]


@dataclass(frozen=True)
class FlexDecl:
    """A constructor declared directly by joint signature, outside any ADT."""

    name: str
    result_type: TypeExpr | None
    arg_types: tuple[TypeExpr, ...]


Definition = Union[AdtDefinition, FlexDecl]


@dataclass(frozen=True)
class Hole:
    pass


@dataclass(frozen=True)
class AdsApply:
    cons: str
    instance: TypeExpr | None
    args: "tuple[Ads, ...]"


Ads = Union[AdsApply, Hole]

HOLE = Hole()


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"(?P<WS>[ \t]+)"
    r"|(?P<NL>\r?\n)"
    r"|(?P<DEF>::)"
    r"|(?P<ARROW><-)"
    r"|(?P<UPPER>[A-Z][A-Za-z0-9']*)"
    r"|(?P<LOWER>[a-z][A-Za-z0-9']*)"
    r"|(?P<SYM>[=|()\[\]:_])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise AdtSyntaxError(line, col, "a token", repr(text[pos]))
        kind = m.lastgroup
        raw = m.group()
        if kind == "NL":
            toks.append(_Tok("NL", raw, line, col))
            line += 1
            col = 1
        else:
            if kind != "WS":
                k = raw if kind == "SYM" else kind
                toks.append(_Tok(k, raw, line, col))
            col += len(raw)
        pos = m.end()
    toks.append(_Tok("EOF", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str | None = None) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            raise AdtSyntaxError(t.line, t.col, what or kind, t.text or "end of input")
        return self.next()

    def skip_newlines(self):
        while self.peek().kind == "NL":
            self.next()

    def fail(self, expected: str):
        t = self.peek()
        raise AdtSyntaxError(t.line, t.col, expected, t.text or "end of input")

    # -- type expressions ---------------------------------------------------

    def type_expr(self) -> TypeExpr:
        t = self.peek()
        if t.kind == "UPPER":
            self.next()
            if self.peek().kind in ("UPPER", "LOWER", "("):
                return TypeApp(t.text, self.type_atom())
            return TypeApp(t.text, None)
        if t.kind == "LOWER":
            self.next()
            return TypeVar(t.text)
        if t.kind == "(":
            self.next()
            inner = self.type_expr()
            self.expect(")")
            return inner
        self.fail("a type expression")

    def type_atom(self) -> TypeExpr:
        t = self.peek()
        if t.kind == "UPPER":
            self.next()
            return TypeApp(t.text, None)
        if t.kind == "LOWER":
            self.next()
            return TypeVar(t.text)
        if t.kind == "(":
            self.next()
            inner = self.type_expr()
            self.expect(")")
            return inner
        self.fail("a type atom")

    # -- definitions ---------------------------------------------------------

    def definition(self) -> Definition:
        if self.peek().kind == "DEF":
            return self.adt_definition()
        return self.flex_decl()

    def adt_definition(self) -> AdtDefinition:
        self.expect("DEF")
        name = self.expect("UPPER", "a type-constructor name").text
        param = None
        if self.peek().kind == "LOWER":
            param = self.next().text
        if self.peek().kind == "LOWER":
            t = self.peek()
            raise AdtSyntaxError(t.line, t.col, "'=' (a single type parameter)", t.text)
        self.expect("=", "'='")
        alts = [self.alternative(name, param)]
        while self.peek().kind == "|":
            self.next()
            alts.append(self.alternative(name, param))
        return AdtDefinition(name, param, tuple(alts))

    def alternative(self, type_cons: str, param: str | None) -> ConstructorAlt:
        cons = self.expect("UPPER", "a constructor name").text
        args = []
        while self.peek().kind in ("UPPER", "LOWER", "("):
            args.append(self.type_atom())
        for a in args:
            _check_params(a, param, type_cons)
        return ConstructorAlt(cons, tuple(args))

    def flex_decl(self) -> FlexDecl:
        cons = self.expect("UPPER", "a constructor name").text
        self.expect(":", "':'")
        result = None
        if self.peek().kind != "ARROW":
            result = self.type_expr()
        if self.peek().kind != "ARROW":
            t = self.peek()
            raise MissingArrow(
                f"line {t.line}: constructor declaration for {cons} has no '<-'"
            )
        self.next()
        args = []
        while self.peek().kind in ("UPPER", "LOWER", "("):
            args.append(self.type_atom())
        return FlexDecl(cons, result, tuple(args))

    # -- structures -----------------------------------------------------------

    def ads(self) -> Ads:
        head = self.ads_atom()
        args = []
        while self.peek().kind in ("UPPER", "(", "_"):
            args.append(self.ads_atom())
        if not args:
            return head
        if isinstance(head, Hole):
            t = self.peek()
            raise HoleAtHeadPosition(
                f"line {t.line}: '_' cannot be applied to arguments"
            )
        if isinstance(head, AdsApply) and head.args:
            # "(Cons a b) c" - parenthesized application given more arguments
            t = self.peek()
            raise AdtSyntaxError(t.line, t.col, "end of application", t.text)
        return AdsApply(head.cons, head.instance, tuple(args))

    def ads_atom(self) -> Ads:
        t = self.peek()
        if t.kind == "_":
            self.next()
            return HOLE
        if t.kind == "UPPER":
            self.next()
            instance = None
            if self.peek().kind == ":":
                self.next()
                self.expect("[", "'['")
                instance = self.type_expr()
                self.expect("]", "']'")
            return AdsApply(t.text, instance, ())
        if t.kind == "(":
            self.next()
            inner = self.ads()
            self.expect(")")
            return inner
        self.fail("a constructor, '_' or '('")


def _check_params(t: TypeExpr, param: str | None, type_cons: str):
    if isinstance(t, TypeVar):
        if t.name != param:
            raise UnknownTypeParam(
                f"type variable {t.name!r} is not the parameter of ::{type_cons}"
            )
    elif isinstance(t, TypeApp) and t.arg is not None:
        _check_params(t.arg, param, type_cons)


# ---------------------------------------------------------------------------
# public entry points

def parse_type(text: str) -> TypeExpr:
    p = _Parser(text)
    p.skip_newlines()
    t = p.type_expr()
    p.skip_newlines()
    p.expect("EOF", "end of input")
    return t


def parse_adt_defs(text: str) -> tuple[Definition, ...]:
    p = _Parser(text)
    defs: list[Definition] = []
    p.skip_newlines()
    while p.peek().kind != "EOF":
        defs.append(p.definition())
        if p.peek().kind not in ("NL", "EOF"):
            p.fail("end of definition line")
        p.skip_newlines()
    seen_types: set[str] = set()
    seen_cons: set[str] = set()
    for d in defs:
        if isinstance(d, AdtDefinition):
            if d.type_cons in seen_types:
                raise DuplicateTypeCons(f"::{d.type_cons} defined twice")
            seen_types.add(d.type_cons)
            names = [a.name for a in d.alternatives]
        else:
            names = [d.name]
        for n in names:
            if n in seen_cons:
                raise DuplicateConstructor(f"constructor {n} declared twice")
            seen_cons.add(n)
    return tuple(defs)


def parse_ads(text: str) -> Ads:
    p = _Parser(text)
    p.skip_newlines()
    a = p.ads()
    p.skip_newlines()
    p.expect("EOF", "end of input")
    return a


# ---------------------------------------------------------------------------
# printing

def print_type(t: TypeExpr) -> str:
    if isinstance(t, TypeVar):
        return t.name
    if t.arg is None:
        return t.cons
    return f"{t.cons} {_type_atom_str(t.arg)}"


def _type_atom_str(t: TypeExpr) -> str:
    s = print_type(t)
    if isinstance(t, TypeApp) and t.arg is not None:
        return f"({s})"
    return s


def print_ads(a: Ads) -> str:
    if isinstance(a, Hole):
        return "_"
    head = a.cons if a.instance is None else f"{a.cons}:[{print_type(a.instance)}]"
    if not a.args:
        return head
    return " ".join([head] + [_ads_atom_str(x) for x in a.args])


def _ads_atom_str(a: Ads) -> str:
    s = print_ads(a)
    if isinstance(a, AdsApply) and a.args:
        return f"({s})"
    return s


def print_definition(d: Definition) -> str:
    if isinstance(d, AdtDefinition):
        head = f"::{d.type_cons}" + (f" {d.param}" if d.param else "")
        alts = " | ".join(
            " ".join([a.name] + [_type_atom_str(t) for t in a.arg_types])
            for a in d.alternatives
        )
        return f"{head} = {alts}"
    res = f" {print_type(d.result_type)}" if d.result_type is not None else ""
    args = "".join(f" {_type_atom_str(t)}" for t in d.arg_types)
    return f"{d.name}:{res} <-{args}"
