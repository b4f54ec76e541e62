"""Kind-annotated types, rows, constraint sets, schemes and environments.

Rows are not a separate node: ``{ l : t | r }`` is the constructor
application ``ext_l t r`` and a record type is ``record r``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Union

from .errors import KindError, TypingError
from . import syntax as S


# ---------------------------------------------------------------------------
# kinds

@dataclass(frozen=True)
class Star:
    def __str__(self):
        return "*"


@dataclass(frozen=True)
class Row:
    def __str__(self):
        return "row"


@dataclass(frozen=True)
class KArrow:
    dom: "Kind"
    cod: "Kind"

    def __str__(self):
        d = f"({self.dom})" if isinstance(self.dom, KArrow) else str(self.dom)
        return f"{d} -> {self.cod}"


Kind = Union[Star, Row, KArrow]
STAR = Star()
ROW = Row()


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class TCon:
    name: str
    kind: Kind


@dataclass(frozen=True)
class TVar:
    id: int
    kind: Kind


@dataclass(frozen=True)
class TApp:
    fun: "Type"
    arg: "Type"
    kind: Kind = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        fk = self.fun.kind
        if not isinstance(fk, KArrow):
            raise KindError(f"cannot apply a type of kind {fk}")
        if fk.dom != self.arg.kind:
            raise KindError(f"kind mismatch: expected {fk.dom}, got {self.arg.kind}")
        object.__setattr__(self, "kind", fk.cod)


Type = Union[TCon, TVar, TApp]

INT = TCon("int", STAR)
STRING = TCon("string", STAR)
BOOL = TCon("bool", STAR)
FLOAT = TCon("float", STAR)
LIST = TCon("list", KArrow(STAR, STAR))
ARROW = TCon("->", KArrow(STAR, KArrow(STAR, STAR)))
EMPTY_ROW = TCon("<>", ROW)
RECORD = TCon("record", KArrow(ROW, STAR))
EXT_KIND = KArrow(STAR, KArrow(ROW, ROW))
BASE_TYPES = {"int": INT, "string": STRING, "bool": BOOL, "float": FLOAT}


@lru_cache(maxsize=None)
def ext(label: str) -> TCon:
    return TCon("ext_" + label, EXT_KIND)


def fn(*ts: Type) -> Type:
    """``fn(a, b, c)`` is ``a -> b -> c``."""
    out = ts[-1]
    for t in reversed(ts[:-1]):
        out = TApp(TApp(ARROW, t), out)
    return out


def list_of(t: Type) -> Type:
    return TApp(LIST, t)


def record_of(row: Type) -> Type:
    return TApp(RECORD, row)


def row_ext(label: str, t: Type, rest: Type) -> Type:
    return TApp(TApp(ext(label), t), rest)


def row_from(fields: Iterable[tuple[str, Type]], tail: Type = EMPTY_ROW) -> Type:
    fields = list(fields)
    out = tail
    for l, t in reversed(fields):
        out = row_ext(l, t, out)
    return out


def row_head(r: Type) -> tuple[str, Type, Type] | None:
    """``(label, field type, rest)`` when ``r`` is an extension, else None."""
    if isinstance(r, TApp) and isinstance(r.fun, TApp):
        c = r.fun.fun
        if isinstance(c, TCon) and c.kind == EXT_KIND:
            return c.name[4:], r.fun.arg, r.arg
    return None


def split_row(r: Type) -> tuple[list[tuple[str, Type]], Type]:
    fields = []
    h = row_head(r)
    while h is not None:
        fields.append((h[0], h[1]))
        r = h[2]
        h = row_head(r)
    return fields, r


def as_arrow(t: Type) -> tuple[Type, Type] | None:
    if isinstance(t, TApp) and isinstance(t.fun, TApp) and t.fun.fun == ARROW:
        return t.fun.arg, t.arg
    return None


def as_record(t: Type) -> Type | None:
    if isinstance(t, TApp) and t.fun == RECORD:
        return t.arg
    return None


def type_vars(t: Type, out: list | None = None) -> list[TVar]:
    """Free variables in first-occurrence (left-to-right) order."""
    if out is None:
        out = []
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, TVar):
            if t not in out:
                out.append(t)
        elif isinstance(t, TApp):
            stack.append(t.arg)
            stack.append(t.fun)
    return out


def occurs(v: TVar, t: Type) -> bool:
    if isinstance(t, TVar):
        return t == v
    if isinstance(t, TApp):
        return occurs(v, t.fun) or occurs(v, t.arg)
    return False


# ---------------------------------------------------------------------------
# constraint keys and schemes

@dataclass(frozen=True)
class Overloaded:
    base: str
    occ: int

    def __str__(self):
        return f"{self.base}%{self.occ}"


@dataclass(frozen=True)
class Implicit:
    base: str

    def __str__(self):
        return f"?{self.base}"


Key = Union[Overloaded, Implicit]
Constraints = dict  # Key -> Type


def key_order(k: Key) -> tuple[str, int]:
    return (k.base, k.occ if isinstance(k, Overloaded) else 0)


def sorted_keys(cs) -> list[Key]:
    return sorted(cs, key=key_order)


def key_from_name(name: str) -> Key | None:
    """Inverse of ``str(key)`` for mangled core names."""
    if name.startswith("?"):
        return Implicit(name[1:])
    base, sep, occ = name.rpartition("%")
    if sep and occ.isdigit():
        return Overloaded(base, int(occ))
    return None


@dataclass(frozen=True)
class Scheme:
    quantified: tuple[TVar, ...]
    constraints: tuple[tuple[Key, Type], ...]
    body: Type

    @staticmethod
    def mono(t: Type) -> "Scheme":
        return Scheme((), (), t)

    @property
    def cs(self) -> dict:
        return dict(self.constraints)


def make_scheme(quantified, cs: dict, body: Type) -> Scheme:
    return Scheme(tuple(quantified), tuple((k, cs[k]) for k in sorted_keys(cs)), body)


# ---------------------------------------------------------------------------
# environment names and environments

@dataclass(frozen=True)
class Plain:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Principal:
    base: str

    def __str__(self):
        return f"{self.base}$0"


@dataclass(frozen=True)
class Instance:
    base: str
    k: int

    def __str__(self):
        return f"{self.base}${self.k}"


EnvName = Union[Plain, Principal, Instance]


def constrained_ftv(cs: dict, t: Type) -> set[TVar]:
    out = set(type_vars(t))
    for ct in cs.values():
        out.update(type_vars(ct))
    return out


def scheme_ftv(s: Scheme) -> set[TVar]:
    return constrained_ftv(s.cs, s.body) - set(s.quantified)


class Env:
    """Immutable linked environment, innermost binding first."""

    __slots__ = ("name", "scheme", "parent", "ftv_all", "size")

    def __init__(self, name: EnvName | None = None, scheme: Scheme | None = None,
                 parent: "Env | None" = None):
        self.name = name
        self.scheme = scheme
        self.parent = parent
        own = scheme_ftv(scheme) if scheme is not None else set()
        base = parent.ftv_all if parent is not None else frozenset()
        self.ftv_all = frozenset(base | own) if own else base
        self.size = (parent.size if parent is not None else 0) + (name is not None)

    @staticmethod
    def empty() -> "Env":
        return Env()

    def extend(self, name: EnvName, scheme: Scheme) -> "Env":
        return Env(name, scheme, self)

    def __iter__(self) -> Iterator[tuple[EnvName, Scheme]]:
        node = self
        while node is not None and node.name is not None:
            yield node.name, node.scheme
            node = node.parent

    def __len__(self):
        return self.size

    def lookup(self, name: EnvName) -> Scheme | None:
        for n, s in self:
            if n == name:
                return s
        return None

    def lookup_var(self, x: str) -> tuple[EnvName, Scheme] | None:
        """Innermost of ``Plain(x)`` / ``Principal(x)``."""
        p, q = Plain(x), Principal(x)
        for n, s in self:
            if n == p or n == q:
                return n, s
        return None

    def ftv(self) -> set[TVar]:
        return set(self.ftv_all)

    def apply(self, s: dict) -> "Env":
        if not s or not any(v.id in s for v in self.ftv_all):
            return self
        # walk down to the outermost affected node, then rebuild upwards
        chain = []
        node = self
        while node.name is not None and any(v.id in s for v in node.ftv_all):
            chain.append(node)
            node = node.parent
        for n in reversed(chain):
            node = Env(n.name, apply_scheme(s, n.scheme), node)
        return node


# ---------------------------------------------------------------------------
# substitutions

Subst = dict  # int -> Type


def apply(s: Subst, t: Type) -> Type:
    if not s:
        return t
    if isinstance(t, TVar):
        return s.get(t.id, t)
    if isinstance(t, TApp):
        f = apply(s, t.fun)
        a = apply(s, t.arg)
        if f is t.fun and a is t.arg:
            return t
        return TApp(f, a)
    return t


def apply_cs(s: Subst, cs: dict) -> dict:
    if not s:
        return cs
    return {k: apply(s, t) for k, t in cs.items()}


def apply_scheme(s: Subst, sc: Scheme) -> Scheme:
    if not s:
        return sc
    qids = {v.id for v in sc.quantified}
    s2 = {v: t for v, t in s.items() if v not in qids} if qids & s.keys() else s
    return Scheme(sc.quantified, tuple((k, apply(s2, t)) for k, t in sc.constraints),
                  apply(s2, sc.body))


def apply_any(s: Subst, x):
    if isinstance(x, Env):
        return x.apply(s)
    if isinstance(x, Scheme):
        return apply_scheme(s, x)
    if isinstance(x, dict):
        return apply_cs(s, x)
    return apply(s, x)


def compose(s2: Subst, s1: Subst) -> Subst:
    """Substitution equal to applying ``s1`` first, then ``s2``."""
    if not s1:
        return dict(s2)
    if not s2:
        return dict(s1)
    out = {v: apply(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        out.setdefault(v, t)
    return out


def ftv(x) -> set[TVar]:
    if isinstance(x, Env):
        return x.ftv()
    if isinstance(x, Scheme):
        return scheme_ftv(x)
    if isinstance(x, dict):
        return constrained_ftv(x, EMPTY_ROW)
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], dict):
        return constrained_ftv(*x)
    return set(type_vars(x))


# ---------------------------------------------------------------------------
# fresh supply, instantiation, generalization

class Supply:
    """Session-scoped counters for type variables and occurrence suffixes."""

    def __init__(self, start: int = 0):
        self.next_var = start
        self.next_occ = 0

    def fresh(self, kind: Kind = STAR) -> TVar:
        self.next_var += 1
        return TVar(self.next_var, kind)

    def occ(self) -> int:
        self.next_occ += 1
        return self.next_occ

    def fresh_key(self, base: str) -> Overloaded:
        return Overloaded(base, self.occ())


def instantiate(sc: Scheme, supply: Supply) -> tuple[dict, Type]:
    s = {v.id: supply.fresh(v.kind) for v in sc.quantified}
    return {k: apply(s, t) for k, t in sc.constraints}, apply(s, sc.body)


def generalize(env: Env, cs: dict, t: Type) -> Scheme:
    order: list[TVar] = []
    for k in sorted_keys(cs):
        type_vars(cs[k], order)
    type_vars(t, order)
    env_ids = {v.id for v in env.ftv_all}
    return make_scheme([v for v in order if v.id not in env_ids], cs, t)


# ---------------------------------------------------------------------------
# printing

def var_name(i: int) -> str:
    letters = string.ascii_lowercase
    return "'" + letters[i % 26] + (str(i // 26) if i >= 26 else "")


class _Namer:
    def __init__(self):
        self.names: dict[int, str] = {}

    def __call__(self, v: TVar) -> str:
        if v.id not in self.names:
            self.names[v.id] = var_name(len(self.names))
        return self.names[v.id]


def _pt(t: Type, nm: _Namer, prec: int = 0) -> str:
    """prec 0: top, 1: arrow domain, 2: postfix argument."""
    if isinstance(t, TVar):
        return nm(t)
    if isinstance(t, TCon):
        if t == EMPTY_ROW:
            return "{}"
        return t.name
    arr = as_arrow(t)
    if arr is not None:
        s = f"{_pt(arr[0], nm, 1)} -> {_pt(arr[1], nm, 0)}"
        return f"({s})" if prec >= 1 else s
    if t.fun == LIST:
        return f"{_pt(t.arg, nm, 2)} list"
    row = as_record(t)
    if row is not None:
        return _print_row(row, nm)
    if t.kind == ROW:
        return "<" + _print_row(t, nm)[1:-1] + ">"
    return f"({_pt(t.fun, nm, 2)} {_pt(t.arg, nm, 2)})"


def _print_row(row: Type, nm: _Namer) -> str:
    fields, tail = split_row(row)
    parts = [f"{S.fmt_name(l)} : {_pt(ft, nm)}" for l, ft in fields]
    body = "; ".join(parts)
    if tail != EMPTY_ROW:
        tl = _pt(tail, nm, 2)
        body = f"{body} | {tl}" if body else f"| {tl}"
    return "{ " + body + " }" if body else "{}"


def _print_cs(cs: dict, nm: _Namer) -> str:
    parts = []
    for k in sorted_keys(cs):
        label = S.fmt_name(k.base)
        if isinstance(k, Implicit):
            label = "?" + label
        parts.append(f"{label} : {_pt(cs[k], nm)}")
    return "{ " + "; ".join(parts) + " }"


def print_constrained(cs: dict, t: Type) -> str:
    nm = _Namer()
    if cs:
        head = _print_cs(cs, nm)
        return f"{head} => {_pt(t, nm)}"
    return _pt(t, nm)


def normalize_print(x) -> str:
    """Canonical text of a Type, constraint set, (cs, type) pair or Scheme."""
    if isinstance(x, Scheme):
        return print_constrained(x.cs, x.body)
    if isinstance(x, tuple):
        return print_constrained(*x)
    if isinstance(x, dict):
        return _print_cs(x, _Namer())
    return _pt(x, _Namer())


def debug_print(t: Type) -> str:
    """Print with raw variable ids (stable within one session)."""
    class Raw(_Namer):
        def __call__(self, v):
            return f"'_{v.id}" if v.kind == STAR else f"'_r{v.id}"
    return _pt(t, Raw())


# ---------------------------------------------------------------------------
# annotations

def from_stype(st: S.SType, varmap: dict[str, TVar], supply: Supply) -> Type:
    """Convert a parsed annotation; ``varmap`` is extended in place."""

    def var(name: str, kind: Kind) -> TVar:
        v = varmap.get(name)
        if v is None:
            v = varmap[name] = supply.fresh(kind)
        elif v.kind != kind:
            raise KindError(f"type variable {name} used at kinds {v.kind} and {kind}")
        return v

    def go(t):
        if isinstance(t, S.TyVar):
            return var(t.name, STAR)
        if isinstance(t, S.TyCon):
            if t.name in BASE_TYPES:
                return BASE_TYPES[t.name]
            if t.name == "list":
                raise KindError("list expects a type argument")
            raise TypingError(f"unknown type constructor {t.name}")
        if isinstance(t, S.TyApp):
            if t.con != "list":
                if t.con in BASE_TYPES:
                    raise KindError(f"{t.con} does not take a type argument")
                raise TypingError(f"unknown type constructor {t.con}")
            return list_of(go(t.arg))
        if isinstance(t, S.TyArrow):
            return fn(go(t.dom), go(t.cod))
        if isinstance(t, S.TyRecord):
            tail = var(t.tail, ROW) if t.tail is not None else EMPTY_ROW
            return record_of(row_from([(l, go(ft)) for l, ft in t.fields], tail))
        raise TypeError(t)

    return go(st)


def scheme_of_annotation(st: S.SType, supply: Supply) -> Scheme:
    """Unconstrained scheme quantifying every variable of the annotation."""
    t = from_stype(st, {}, supply)
    return Scheme(tuple(type_vars(t)), (), t)


def rank(t: Type) -> int:
    """Constructor count: variables 0, constructors 1, applications add up."""
    if isinstance(t, TVar):
        return 0
    if isinstance(t, TCon):
        return 0 if t.name.startswith("!") else 1
    return rank(t.fun) + rank(t.arg)
