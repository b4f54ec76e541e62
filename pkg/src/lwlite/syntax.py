"""Surface syntax: AST, lexer, recursive-descent parser and printer.

The core language produced by translation reuses the same node classes;
only ``Var``, ``Lam``, ``App``, ``Let``, ``LetRec``, ``Select``, ``Record``,
literals, lists, ``Match`` and ``BinOp`` appear in it. Mangled names
(``add%3``, ``add$17``, ``?add``) are ordinary ``Var`` names there and are
only accepted by the lexer when ``core=True``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .errors import LexError, ParseError

Span = tuple[int, int]
NOSPAN: Span = (0, 0)


def _span():
    return field(default=NOSPAN, compare=False, repr=False)


# ---------------------------------------------------------------------------
# expressions

@dataclass(frozen=True)
class Var:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Implicit:
    name: str
    span: Span = _span()


@dataclass(frozen=True)
class Lam:
    param: str
    body: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class App:
    fn: "Expr"
    arg: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Let:
    name: str
    value: "Expr"
    body: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class LetRec:
    name: str
    value: "Expr"
    body: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class LetOver:
    name: str
    value: "Expr"
    body: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Overload:
    decls: tuple[tuple[str, "SType"], ...]
    body: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Record:
    fields: tuple[tuple[str, "Expr"], ...]
    span: Span = _span()


@dataclass(frozen=True)
class Select:
    expr: "Expr"
    label: str
    span: Span = _span()


@dataclass(frozen=True)
class Eject:
    expr: "Expr"
    names: tuple[str, ...] | None = None
    span: Span = _span()


@dataclass(frozen=True)
class Inject:
    expr: "Expr"
    names: tuple[str, ...] | None = None
    span: Span = _span()


@dataclass(frozen=True)
class IntLit:
    value: int
    span: Span = _span()


@dataclass(frozen=True)
class StrLit:
    value: str
    span: Span = _span()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    span: Span = _span()


@dataclass(frozen=True)
class ListLit:
    items: tuple["Expr", ...]
    span: Span = _span()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span = _span()


@dataclass(frozen=True)
class Match:
    scrutinee: "Expr"
    nil: "Expr | None"
    single: tuple[str, "Expr"] | None
    cons: tuple[str, str, "Expr"] | None
    span: Span = _span()


Expr = Union[Var, Implicit, Lam, App, Let, LetRec, LetOver, Overload, Record,
             Select, Eject, Inject, IntLit, StrLit, BoolLit, ListLit, BinOp,
             Match]


# ---------------------------------------------------------------------------
# type annotations

@dataclass(frozen=True)
class TyVar:
    name: str


@dataclass(frozen=True)
class TyCon:
    name: str


@dataclass(frozen=True)
class TyApp:
    con: str
    arg: "SType"


@dataclass(frozen=True)
class TyArrow:
    dom: "SType"
    cod: "SType"


@dataclass(frozen=True)
class TyRecord:
    fields: tuple[tuple[str, "SType"], ...]
    tail: str | None = None


SType = Union[TyVar, TyCon, TyApp, TyArrow, TyRecord]


def stype_vars(t: SType) -> list[str]:
    """Type variable names in first-occurrence order."""
    out: list[str] = []

    def go(t):
        if isinstance(t, TyVar):
            if t.name not in out:
                out.append(t.name)
        elif isinstance(t, TyApp):
            go(t.arg)
        elif isinstance(t, TyArrow):
            go(t.dom)
            go(t.cod)
        elif isinstance(t, TyRecord):
            for _, ft in t.fields:
                go(ft)
            if t.tail is not None and t.tail not in out:
                out.append(t.tail)

    go(t)
    return out


# ---------------------------------------------------------------------------
# programs

@dataclass(frozen=True)
class TopLet:
    name: str
    value: Expr
    rec: bool = False
    span: Span = _span()


@dataclass(frozen=True)
class TopLetOver:
    name: str
    value: Expr
    span: Span = _span()


@dataclass(frozen=True)
class TopOverload:
    decls: tuple[tuple[str, SType], ...]
    span: Span = _span()


Item = Union[TopLet, TopLetOver, TopOverload]


@dataclass(frozen=True)
class Program:
    items: tuple[Item, ...]


# ---------------------------------------------------------------------------
# lexer

KEYWORDS = frozenset({
    "let", "rec", "over", "overload", "in", "fun", "match", "with",
    "eject", "inject", "true", "false",
})

OPERATORS = ("->", "=>", "::", "||", "&&", "<=", ">=",
             "=", "<", ">", "+", "-", "*", "^", "|", ":")
# operators that may be written as identifiers, e.g. ``(+)``
NAMEABLE_OPS = ("::", "||", "&&", "<=", ">=", "=", "<", ">", "+", "-", "*", "^")
OP_CHARS = frozenset("+-*^|&=<>:")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_OPNAME = re.compile(
    r"\(\s*(" + "|".join(re.escape(o) for o in NAMEABLE_OPS) + r")\s*\)")
_SUFFIX = re.compile(r"[%$]\d+")


@dataclass(frozen=True)
class Token:
    kind: str       # INT STRING IDENT OPNAME IMPLICIT TVAR KW SYM EOF
    text: str
    start: int
    end: int
    value: object = None


def tokenize(source: str, core: bool = False) -> list[Token]:
    toks: list[Token] = []
    i, n = 0, len(source)
    while i < n:
        c = source[i]
        if c in " \t\r\n":
            i += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        start = i
        if c.isdigit():
            while i < n and source[i].isdigit():
                i += 1
            toks.append(Token("INT", source[start:i], start, i, int(source[start:i])))
            continue
        if c == '"':
            i += 1
            buf = []
            while True:
                if i >= n:
                    raise LexError("unterminated string literal", (start, i))
                ch = source[i]
                if ch == '"':
                    i += 1
                    break
                if ch == "\\":
                    if i + 1 >= n:
                        raise LexError("unterminated string literal", (start, i))
                    esc = source[i + 1]
                    mapped = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc)
                    if mapped is None:
                        raise LexError(f"bad escape \\{esc}", (i, i + 2))
                    buf.append(mapped)
                    i += 2
                    continue
                buf.append(ch)
                i += 1
            toks.append(Token("STRING", source[start:i], start, i, "".join(buf)))
            continue
        if c == "'":
            m = _IDENT.match(source, i + 1)
            if not m:
                raise LexError("bad type variable", (i, i + 1))
            i = m.end()
            toks.append(Token("TVAR", source[start:i], start, i))
            continue
        if c == "?":
            m = _IDENT.match(source, i + 1) or _OPNAME.match(source, i + 1)
            if not m:
                raise LexError("'?' must prefix an identifier", (i, i + 1))
            base = m.group(1) if m.re is _OPNAME else m.group(0)
            i = m.end()
            if core:
                toks.append(Token("IDENT", "?" + base, start, i))
            else:
                toks.append(Token("IMPLICIT", base, start, i))
            continue
        if c == "(":
            m = _OPNAME.match(source, i)
            if m:
                name = m.group(1)
                i = m.end()
                if core:
                    s = _SUFFIX.match(source, i)
                    if s:
                        name += s.group(0)
                        i = s.end()
                toks.append(Token("OPNAME", name, start, i))
                continue
        if c.isalpha() or c == "_":
            m = _IDENT.match(source, i)
            i = m.end()
            word = m.group(0)
            if word in KEYWORDS:
                toks.append(Token("KW", word, start, i))
                continue
            if core:
                s = _SUFFIX.match(source, i)
                if s:
                    word += s.group(0)
                    i = s.end()
            toks.append(Token("IDENT", word, start, i))
            continue
        if c in "(){}[];,.":
            toks.append(Token("SYM", c, start, i + 1))
            i += 1
            continue
        if c in OP_CHARS:
            for op in OPERATORS:
                if source.startswith(op, i):
                    toks.append(Token("SYM", op, start, i + len(op)))
                    i += len(op)
                    break
            else:  # pragma: no cover - every op char starts some operator
                raise LexError(f"bad operator character {c!r}", (i, i + 1))
            continue
        raise LexError(f"bad character {c!r}", (i, i + 1))
    toks.append(Token("EOF", "", n, n))
    return toks


# ---------------------------------------------------------------------------
# parser

BINOPS = {
    "||": (1, "right"), "&&": (2, "right"),
    "=": (3, "left"), "<": (3, "left"), "<=": (3, "left"),
    ">": (3, "left"), ">=": (3, "left"),
    "::": (4, "right"), "^": (5, "right"),
    "+": (6, "left"), "-": (6, "left"), "*": (7, "left"),
}

_EXPR_KEYWORDS = ("fun", "let", "match", "overload", "inject", "eject")


class Parser:
    def __init__(self, source: str, core: bool = False):
        self.source = source
        self.toks = tokenize(source, core)
        self.pos = 0

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("SYM", "KW") and t.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, msg: str):
        t = self.peek()
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"{msg}, found {found}", (t.start, t.end))

    def name(self) -> str:
        t = self.peek()
        if t.kind in ("IDENT", "OPNAME"):
            self.advance()
            return t.text
        self.fail("expected a name")

    def span_from(self, start: int) -> Span:
        prev = self.toks[self.pos - 1] if self.pos else self.toks[0]
        return (start, max(start, prev.end))

    # programs
    def program(self) -> Program:
        items = []
        while self.peek().kind != "EOF":
            items.append(self.item())
        return Program(tuple(items))

    def item(self) -> Item:
        start = self.peek().start
        if self.at("overload"):
            self.advance()
            decls = self.overload_decls()
            return TopOverload(decls, self.span_from(start))
        if self.at("let"):
            self.advance()
            kind, name, value = self.let_binding()
            if self.at("in"):
                self.fail("top-level let does not take 'in'")
            span = self.span_from(start)
            if kind == "over":
                return TopLetOver(name, value, span)
            return TopLet(name, value, kind == "rec", span)
        self.fail("expected 'let' or 'overload'")

    def overload_decls(self) -> tuple[tuple[str, SType], ...]:
        decls = []
        while True:
            name = self.name()
            self.expect(":")
            decls.append((name, self.type_arrow()))
            t, t2 = self.peek(), self.peek(1)
            if t.kind in ("IDENT", "OPNAME") and t2.kind == "SYM" and t2.text == ":":
                continue
            return tuple(decls)

    def let_binding(self) -> tuple[str, str, Expr]:
        kind = "plain"
        if self.accept("rec"):
            kind = "rec"
        elif self.accept("over"):
            kind = "over"
        name = self.name()
        params = []
        while self.peek().kind in ("IDENT", "OPNAME"):
            params.append(self.advance())
        self.expect("=")
        value = self.expr()
        for p in reversed(params):
            value = Lam(p.text, value, (p.start, value.span[1]))
        return kind, name, value

    # expressions
    def expr(self) -> Expr:
        t = self.peek()
        start = t.start
        if self.at("fun"):
            self.advance()
            params = []
            while self.peek().kind in ("IDENT", "OPNAME"):
                params.append(self.advance().text)
            if not params:
                self.fail("expected a parameter")
            self.expect("->")
            body = self.expr()
            for p in reversed(params):
                body = Lam(p, body, self.span_from(start))
            return body
        if self.at("let"):
            self.advance()
            return self.let_chain(start)
        if self.at("match"):
            return self.match()
        if self.at("overload"):
            self.advance()
            decls = self.overload_decls()
            self.expect("in")
            body = self.expr()
            return Overload(decls, body, self.span_from(start))
        return self.binop(0)

    def let_chain(self, start: int) -> Expr:
        kind, name, value = self.let_binding()
        if self.accept("in"):
            body = self.expr()
        elif self.at("let"):
            nxt = self.advance().start
            body = self.let_chain(nxt)
        else:
            self.fail("expected 'in'")
        cls = {"plain": Let, "rec": LetRec, "over": LetOver}[kind]
        return cls(name, value, body, self.span_from(start))

    def match(self) -> Expr:
        start = self.expect("match").start
        scrut = self.expr()
        self.expect("with")
        self.accept("|")
        nil = single = cons = None
        while True:
            arm_start = self.peek().start
            if self.at("["):
                self.advance()
                if self.accept("]"):
                    self.expect("->")
                    if nil is not None:
                        raise ParseError("duplicate [] arm", (arm_start, arm_start + 2))
                    nil = self.expr()
                else:
                    x = self.ident()
                    self.expect("]")
                    self.expect("->")
                    if single is not None:
                        raise ParseError("duplicate [x] arm", (arm_start, arm_start + 1))
                    single = (x, self.expr())
            else:
                h = self.ident()
                self.expect("::")
                tl = self.ident()
                self.expect("->")
                if cons is not None:
                    raise ParseError("duplicate x :: xs arm", (arm_start, arm_start + 1))
                cons = (h, tl, self.expr())
            if not self.accept("|"):
                break
        if nil is None or cons is None and single is None:
            raise ParseError("match needs a [] arm and a cons or singleton arm",
                             self.span_from(start))
        return Match(scrut, nil, single, cons, self.span_from(start))

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "IDENT":
            self.fail("expected an identifier")
        self.advance()
        return t.text

    def binop(self, min_prec: int) -> Expr:
        left = self.operand()
        while True:
            t = self.peek()
            if t.kind != "SYM" or t.text not in BINOPS:
                return left
            prec, assoc = BINOPS[t.text]
            if prec < min_prec:
                return left
            self.advance()
            right = self.binop(prec + 1 if assoc == "left" else prec)
            left = BinOp(t.text, left, right, (left.span[0], right.span[1]))

    def operand(self) -> Expr:
        if self.at("inject") or self.at("eject"):
            return self.ject()
        return self.app()

    def ject(self) -> Expr:
        kw = self.advance()
        cls = Inject if kw.text == "inject" else Eject
        k = 0
        while self.peek(k).kind in ("IDENT", "OPNAME"):
            k += 1
        if k and self.at("in", k):
            names = []
            for _ in range(k):
                t = self.advance()
                if t.text in names:
                    raise ParseError(f"duplicate name {t.text!r} in restriction list",
                                     (t.start, t.end))
                names.append(t.text)
            self.expect("in")
            body = self.expr()
            return cls(body, tuple(names), self.span_from(kw.start))
        if any(self.at(w) for w in _EXPR_KEYWORDS):
            body = self.expr()
        else:
            body = self.app()
        return cls(body, None, self.span_from(kw.start))

    def _starts_atom(self) -> bool:
        t = self.peek()
        if t.kind in ("INT", "STRING", "IDENT", "OPNAME", "IMPLICIT"):
            return True
        if t.kind == "KW":
            return t.text in ("true", "false")
        return t.kind == "SYM" and t.text in ("(", "{", "[")

    def app(self) -> Expr:
        if not self._starts_atom():
            self.fail("expected an expression")
        e = self.postfix()
        while self._starts_atom():
            arg = self.postfix()
            e = App(e, arg, (e.span[0], arg.span[1]))
        return e

    def postfix(self) -> Expr:
        e = self.atom()
        while self.at("."):
            self.advance()
            label = self.name()
            e = Select(e, label, self.span_from(e.span[0]))
        return e

    def atom(self) -> Expr:
        t = self.advance()
        sp = (t.start, t.end)
        if t.kind == "INT":
            return IntLit(t.value, sp)
        if t.kind == "STRING":
            return StrLit(t.value, sp)
        if t.kind in ("IDENT", "OPNAME"):
            return Var(t.text, sp)
        if t.kind == "IMPLICIT":
            return Implicit(t.text, sp)
        if t.kind == "KW" and t.text in ("true", "false"):
            return BoolLit(t.text == "true", sp)
        if t.text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t.text == "{":
            fields = []
            while True:
                label = self.name()
                self.expect("=")
                fields.append((label, self.expr()))
                if not self.accept(";") or self.at("}"):
                    break
            self.expect("}")
            return Record(tuple(fields), self.span_from(t.start))
        if t.text == "[":
            items = []
            if not self.at("]"):
                while True:
                    items.append(self.expr())
                    if not self.accept(";") or self.at("]"):
                        break
            self.expect("]")
            return ListLit(tuple(items), self.span_from(t.start))
        self.pos -= 1
        self.fail("expected an expression")

    # types
    def type_arrow(self) -> SType:
        t = self.type_app()
        if self.accept("->"):
            return TyArrow(t, self.type_arrow())
        return t

    def type_app(self) -> SType:
        t = self.type_atom()
        while self.peek().kind == "IDENT" and not self.at(":", 1):
            t = TyApp(self.advance().text, t)
        return t

    def type_atom(self) -> SType:
        t = self.advance()
        if t.kind == "TVAR":
            return TyVar(t.text)
        if t.kind == "IDENT":
            return TyCon(t.text)
        if t.text == "(":
            ty = self.type_arrow()
            self.expect(")")
            return ty
        if t.text == "{":
            fields = []
            tail = None
            if not self.at("}") and not self.at("|"):
                while True:
                    lt = self.advance()
                    if lt.kind in ("IDENT", "OPNAME"):
                        label = lt.text
                    elif lt.kind == "IMPLICIT":
                        label = "?" + lt.text
                    else:
                        self.pos -= 1
                        self.fail("expected a label")
                    self.expect(":")
                    fields.append((label, self.type_arrow()))
                    if not self.accept(";") or self.at("}") or self.at("|"):
                        break
            if self.accept("|"):
                tv = self.advance()
                if tv.kind != "TVAR":
                    self.pos -= 1
                    self.fail("expected a row variable")
                tail = tv.text
            self.expect("}")
            return TyRecord(tuple(fields), tail)
        self.pos -= 1
        self.fail("expected a type")

    def constrained_type(self):
        """``{ k : t; ... } => t`` or a plain type; returns (constraints, type)."""
        t = self.type_arrow()
        if self.accept("=>"):
            if not isinstance(t, TyRecord) or t.tail is not None:
                self.fail("constraint set must be a closed field list")
            return t.fields, self.type_arrow()
        return (), t

    def end(self):
        if self.peek().kind != "EOF":
            self.fail("unexpected trailing input")


def parse_program(source: str, core: bool = False) -> Program:
    return Parser(source, core).program()


def parse_expr(source: str, core: bool = False) -> Expr:
    p = Parser(source, core)
    e = p.expr()
    p.end()
    return e


def parse_type(source: str) -> SType:
    p = Parser(source)
    t = p.type_arrow()
    p.end()
    return t


def parse_constrained_type(source: str):
    p = Parser(source)
    r = p.constrained_type()
    p.end()
    return r


# ---------------------------------------------------------------------------
# printer

_MANGLED = re.compile(r"^(\?)?(.*?)([%$]\d+)?$", re.S)


def fmt_name(name: str) -> str:
    """Render a (possibly mangled) name so the lexer reads it back."""
    m = _MANGLED.match(name)
    q, base, suffix = m.group(1) or "", m.group(2), m.group(3) or ""
    if base and base[0] in OP_CHARS:
        base = f"({base})"
    return f"{q}{base}{suffix}"


def _str_lit(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t") + '"'


_ATOMIC = (Var, Implicit, IntLit, StrLit, BoolLit, ListLit, Record, Select)


def _atom(e: Expr) -> str:
    s = print_expr(e)
    return s if isinstance(e, _ATOMIC) else f"({s})"


def print_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return fmt_name(e.name)
    if isinstance(e, Implicit):
        return "?" + fmt_name(e.name)
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, StrLit):
        return _str_lit(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ListLit):
        return "[" + "; ".join(print_expr(x) for x in e.items) + "]"
    if isinstance(e, Record):
        return "{ " + "; ".join(f"{fmt_name(l)} = {print_expr(v)}" for l, v in e.fields) + " }"
    if isinstance(e, Select):
        return f"{_atom(e.expr)}.{fmt_name(e.label)}"
    if isinstance(e, App):
        fn = print_expr(e.fn) if isinstance(e.fn, (App,) + _ATOMIC) else f"({print_expr(e.fn)})"
        return f"{fn} {_atom(e.arg)}"
    if isinstance(e, BinOp):
        return f"{_atom(e.left)} {e.op} {_atom(e.right)}"
    if isinstance(e, Lam):
        params = [e.param]
        body = e.body
        while isinstance(body, Lam):
            params.append(body.param)
            body = body.body
        return f"fun {' '.join(fmt_name(p) for p in params)} -> {print_expr(body)}"
    if isinstance(e, (Let, LetRec, LetOver)):
        kw = {Let: "let", LetRec: "let rec", LetOver: "let over"}[type(e)]
        return f"{kw} {fmt_name(e.name)} = {print_expr(e.value)} in {print_expr(e.body)}"
    if isinstance(e, Overload):
        decls = " ".join(f"{fmt_name(n)} : {print_stype(t)}" for n, t in e.decls)
        return f"overload {decls} in {print_expr(e.body)}"
    if isinstance(e, (Eject, Inject)):
        kw = "eject" if isinstance(e, Eject) else "inject"
        if e.names is not None:
            return f"{kw} {' '.join(fmt_name(n) for n in e.names)} in {print_expr(e.expr)}"
        return f"{kw} ({print_expr(e.expr)})"
    if isinstance(e, Match):
        arms = [f"| [] -> ({print_expr(e.nil)})"]
        if e.single is not None:
            arms.append(f"| [{e.single[0]}] -> ({print_expr(e.single[1])})")
        if e.cons is not None:
            h, t, b = e.cons
            arms.append(f"| {h} :: {t} -> ({print_expr(b)})")
        return f"match {print_expr(e.scrutinee)} with " + " ".join(arms)
    raise TypeError(f"cannot print {e!r}")


def print_stype(t: SType, prec: int = 0) -> str:
    if isinstance(t, TyVar):
        return t.name
    if isinstance(t, TyCon):
        return t.name
    if isinstance(t, TyApp):
        return f"{print_stype(t.arg, 1)} {t.con}"
    if isinstance(t, TyArrow):
        s = f"{print_stype(t.dom, 1)} -> {print_stype(t.cod)}"
        return f"({s})" if prec else s
    if isinstance(t, TyRecord):
        body = "; ".join(f"{fmt_name(l)} : {print_stype(ft)}" for l, ft in t.fields)
        if t.tail is not None:
            body = f"{body} | {t.tail}" if body else f"| {t.tail}"
        return "{ " + body + " }" if body else "{}"
    raise TypeError(f"cannot print {t!r}")


def print_item(item: Item) -> str:
    if isinstance(item, TopOverload):
        return "overload " + "\n         ".join(
            f"{fmt_name(n)} : {print_stype(t)}" for n, t in item.decls)
    if isinstance(item, TopLetOver):
        return f"let over {fmt_name(item.name)} = {print_expr(item.value)}"
    kw = "let rec" if item.rec else "let"
    return f"{kw} {fmt_name(item.name)} = {print_expr(item.value)}"


def print_program(p: Program) -> str:
    return "\n".join(print_item(i) for i in p.items) + ("\n" if p.items else "")
