"""Core language evaluation, value printing, builtins and the dictionary
arity scanner.

Core programs reuse the syntax node classes; constraint keys are plain
variable names such as ``add%3``, ``add$1234`` or ``?add``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable

from . import syntax as S
from .errors import EvalError
from .types import Env, Plain, Scheme, Supply, from_stype, type_vars

# ---------------------------------------------------------------------------
# values


@dataclass(frozen=True)
class RecordValue:
    fields: tuple[tuple[str, object], ...]

    def get(self, label: str):
        for l, v in self.fields:
            if l == label:
                return v
        raise EvalError(f"record has no field {label}")


@dataclass
class Closure:
    param: str
    body: S.Expr
    env: "Frame | None"


@dataclass
class Builtin:
    name: str
    arity: int
    fn: Callable
    args: tuple = ()


class Frame:
    __slots__ = ("name", "value", "parent")

    def __init__(self, name, value, parent):
        self.name = name
        self.value = value
        self.parent = parent


def lookup(env: Frame | None, name: str):
    node = env
    while node is not None:
        if node.name == name:
            return node.value
        node = node.parent
    raise EvalError(f"unbound variable {S.fmt_name(name)}")


# ---------------------------------------------------------------------------
# builtins

def _map(ev, f, xs):
    return tuple(ev.apply(f, x) for x in xs)


def _foldl(ev, f, acc, xs):
    for x in xs:
        acc = ev.apply(ev.apply(f, x), acc)
    return acc


def _int_of_string(ev, s):
    try:
        return int(s)
    except ValueError:
        raise EvalError(f"int_of_string: bad input {s!r}") from None


def _float_of_string(ev, s):
    try:
        return float(s)
    except ValueError:
        raise EvalError(f"float_of_string: bad input {s!r}") from None


@dataclass(frozen=True)
class BuiltinSpec:
    name: str
    type: str
    arity: int
    fn: Callable


BUILTINS: tuple[BuiltinSpec, ...] = (
    BuiltinSpec("+", "int -> int -> int", 2, lambda ev, a, b: a + b),
    BuiltinSpec("-", "int -> int -> int", 2, lambda ev, a, b: a - b),
    BuiltinSpec("*", "int -> int -> int", 2, lambda ev, a, b: a * b),
    BuiltinSpec("^", "string -> string -> string", 2, lambda ev, a, b: a + b),
    BuiltinSpec("||", "bool -> bool -> bool", 2, lambda ev, a, b: a or b),
    BuiltinSpec("&&", "bool -> bool -> bool", 2, lambda ev, a, b: a and b),
    BuiltinSpec("=", "int -> int -> bool", 2, lambda ev, a, b: a == b),
    BuiltinSpec("<", "int -> int -> bool", 2, lambda ev, a, b: a < b),
    BuiltinSpec("<=", "int -> int -> bool", 2, lambda ev, a, b: a <= b),
    BuiltinSpec(">", "int -> int -> bool", 2, lambda ev, a, b: a > b),
    BuiltinSpec(">=", "int -> int -> bool", 2, lambda ev, a, b: a >= b),
    BuiltinSpec("::", "'a -> 'a list -> 'a list", 2, lambda ev, h, t: (h,) + t),
    BuiltinSpec("string_of_int", "int -> string", 1, lambda ev, n: str(n)),
    BuiltinSpec("int_of_string", "string -> int", 1, _int_of_string),
    BuiltinSpec("float_of_string", "string -> float", 1, _float_of_string),
    BuiltinSpec("map", "('a -> 'b) -> 'a list -> 'b list", 2, _map),
    BuiltinSpec("foldl", "('a -> 'b -> 'b) -> 'b -> 'a list -> 'b", 3, _foldl),
)


def builtin_env(supply: Supply | None = None) -> Env:
    supply = supply or Supply()
    env = Env.empty()
    for b in BUILTINS:
        t = from_stype(S.parse_type(b.type), {}, supply)
        env = env.extend(Plain(b.name), Scheme(tuple(type_vars(t)), (), t))
    return env


def builtin_values() -> Frame | None:
    env = None
    for b in BUILTINS:
        env = Frame(b.name, Builtin(b.name, b.arity, b.fn), env)
    return env


# ---------------------------------------------------------------------------
# evaluator

class Evaluator:
    """Call-by-value, left-to-right interpreter for core expressions."""

    def apply(self, f, arg):
        if isinstance(f, Closure):
            return self.eval(Frame(f.param, arg, f.env), f.body)
        if isinstance(f, Builtin):
            args = f.args + (arg,)
            if len(args) == f.arity:
                return f.fn(self, *args)
            return Builtin(f.name, f.arity, f.fn, args)
        raise EvalError(f"cannot apply a non-function value {print_value(f)}")

    def eval(self, env: Frame | None, e: S.Expr):
        while True:
            if isinstance(e, S.Var):
                return lookup(env, e.name)
            if isinstance(e, (S.IntLit, S.StrLit, S.BoolLit)):
                return e.value
            if isinstance(e, S.Lam):
                return Closure(e.param, e.body, env)
            if isinstance(e, S.App):
                f = self.eval(env, e.fn)
                a = self.eval(env, e.arg)
                if isinstance(f, Closure):  # loop instead of recursing
                    env, e = Frame(f.param, a, f.env), f.body
                    continue
                return self.apply(f, a)
            if isinstance(e, S.BinOp):
                f = lookup(env, e.op)
                l = self.eval(env, e.left)
                r = self.eval(env, e.right)
                return self.apply(self.apply(f, l), r)
            if isinstance(e, S.Let):
                v = self.eval(env, e.value)
                env, e = Frame(e.name, v, env), e.body
                continue
            if isinstance(e, S.LetRec):
                frame = Frame(e.name, None, env)
                frame.value = self.eval(frame, e.value)
                env, e = frame, e.body
                continue
            if isinstance(e, S.Record):
                return RecordValue(tuple((l, self.eval(env, v)) for l, v in e.fields))
            if isinstance(e, S.Select):
                r = self.eval(env, e.expr)
                if not isinstance(r, RecordValue):
                    raise EvalError(f"selection .{e.label} on a non-record value")
                return r.get(e.label)
            if isinstance(e, S.ListLit):
                return tuple(self.eval(env, x) for x in e.items)
            if isinstance(e, S.Match):
                xs = self.eval(env, e.scrutinee)
                if not isinstance(xs, tuple):
                    raise EvalError("match on a non-list value")
                if not xs:
                    e = e.nil
                elif len(xs) == 1 and e.single is not None:
                    env, e = Frame(e.single[0], xs[0], env), e.single[1]
                elif e.cons is not None:
                    h, t, body = e.cons
                    env, e = Frame(t, xs[1:], Frame(h, xs[0], env)), body
                else:
                    raise EvalError("match failure: no arm for a list of length "
                                    f"{len(xs)}")
                continue
            raise EvalError(f"cannot evaluate {type(e).__name__} in core")


def eval_program(items, env: Frame | None = None, on_value=None) -> Frame | None:
    """Evaluate core items in order; ``on_value(name, value)`` sees each result."""
    ev = Evaluator()
    env = builtin_values() if env is None else env
    for item in items:
        if item.rec:
            frame = Frame(item.name, None, env)
            frame.value = ev.eval(frame, item.value)
            env = frame
        else:
            env = Frame(item.name, ev.eval(env, item.value), env)
        if on_value is not None:
            on_value(item.name, env.value)
    return env


# ---------------------------------------------------------------------------
# printing

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def print_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return _quote(v)
    if isinstance(v, tuple):
        return "[" + "; ".join(print_value(x) for x in v) + "]"
    if isinstance(v, RecordValue):
        return "{ " + "; ".join(f"{S.fmt_name(l)} = {print_value(x)}" for l, x in v.fields) + " }"
    if isinstance(v, (Closure, Builtin)):
        return "<fun>"
    return repr(v)


# ---------------------------------------------------------------------------
# dictionary arity

_KEY_NAME = re.compile(r"(%\d+$)|(^\?)")


def is_key_name(name: str) -> bool:
    return bool(_KEY_NAME.search(name))


def dict_arity(value: S.Expr) -> int:
    n = 0
    while isinstance(value, S.Lam) and is_key_name(value.param):
        n += 1
        value = value.body
    return n


@dataclass
class ArityFinding:
    name: str
    expected: int
    got: int
    where: str

    def __str__(self):
        return (f"{self.where}: {S.fmt_name(self.name)} takes {self.expected} "
                f"dictionary argument(s) but is applied to {self.got}")


def check_core_arity(items) -> list[ArityFinding]:
    """Find uses of dictionary-abstracted names with too few dictionary arguments."""
    findings: list[ArityFinding] = []

    def walk(e, scope: dict, where: str):
        # App spine
        args = []
        head = e
        while isinstance(head, S.App):
            args.append(head.arg)
            head = head.fn
        args.reverse()
        if isinstance(head, S.Var):
            n = scope.get(head.name, 0)
            if n:
                got = 0
                for a in args:
                    if isinstance(a, S.Var) and is_key_name(a.name):
                        got += 1
                    else:
                        break
                if got < n:
                    findings.append(ArityFinding(head.name, n, got, where))
            for a in args:
                walk(a, scope, where)
            return
        if args:
            walk(head, scope, where)
            for a in args:
                walk(a, scope, where)
            return
        if isinstance(e, S.Lam):
            walk(e.body, {**scope, e.param: 0}, where)
        elif isinstance(e, S.Let):
            walk(e.value, scope, where)
            walk(e.body, {**scope, e.name: dict_arity(e.value)}, where)
        elif isinstance(e, S.LetRec):
            inner = {**scope, e.name: dict_arity(e.value)}
            walk(e.value, inner, where)
            walk(e.body, inner, where)
        elif isinstance(e, S.BinOp):
            walk(S.Var(e.op), scope, where)
            walk(e.left, scope, where)
            walk(e.right, scope, where)
        elif isinstance(e, S.Record):
            for _, v in e.fields:
                walk(v, scope, where)
        elif isinstance(e, S.Select):
            walk(e.expr, scope, where)
        elif isinstance(e, S.ListLit):
            for x in e.items:
                walk(x, scope, where)
        elif isinstance(e, S.Match):
            walk(e.scrutinee, scope, where)
            walk(e.nil, scope, where)
            if e.single is not None:
                walk(e.single[1], {**scope, e.single[0]: 0}, where)
            if e.cons is not None:
                h, t, b = e.cons
                walk(b, {**scope, h: 0, t: 0}, where)

    scope: dict = {}
    for item in items:
        n = dict_arity(item.value)
        if item.rec:
            walk(item.value, {**scope, item.name: n}, item.name)
        else:
            walk(item.value, scope, item.name)
        scope = {**scope, item.name: n}
    return findings
