"""Golden-file harness: ``//! type:``, ``//! value:`` and ``//! error:``
expectations embedded in ``.lw`` sources, plus the alpha/row-order
insensitive scheme matcher they rely on."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

from . import syntax as S
from .core import print_value
from .constraints import instance_match
from .errors import LwError
from .infer import erase_env, erase_scheme, extend_with_keys
from .session import Session, SessionConfig
from .types import (Implicit, Overloaded, Scheme, TCon, TVar,
                    Type, from_stype, normalize_print, row_head, split_row,
                    Supply)

_EXPECT = re.compile(r"//!\s*(type|value|error):\s*(.*)$", re.M)


# ---------------------------------------------------------------------------
# alpha-equivalence modulo distinct-label row order


class _Renaming:
    def __init__(self, fwd=None, bwd=None):
        self.fwd = dict(fwd or {})
        self.bwd = dict(bwd or {})

    def copy(self):
        return _Renaming(self.fwd, self.bwd)

    def pair(self, a: TVar, b: TVar) -> bool:
        if a.kind != b.kind:
            return False
        if a.id in self.fwd or b.id in self.bwd:
            return self.fwd.get(a.id) == b.id and self.bwd.get(b.id) == a.id
        self.fwd[a.id] = b.id
        self.bwd[b.id] = a.id
        return True


def _group(fields):
    out: dict[str, list[Type]] = {}
    for l, t in fields:
        out.setdefault(l, []).append(t)
    return out


def match_types(t1: Type, t2: Type, ren: _Renaming) -> bool:
    if isinstance(t1, TVar) or isinstance(t2, TVar):
        return isinstance(t1, TVar) and isinstance(t2, TVar) and ren.pair(t1, t2)
    if isinstance(t1, TCon) or isinstance(t2, TCon):
        return t1 == t2
    if row_head(t1) is not None or row_head(t2) is not None:
        f1, tail1 = split_row(t1)
        f2, tail2 = split_row(t2)
        g1, g2 = _group(f1), _group(f2)
        if g1.keys() != g2.keys():
            return False
        for l in g1:
            if len(g1[l]) != len(g2[l]):
                return False
            for a, b in zip(g1[l], g2[l]):
                if not match_types(a, b, ren):
                    return False
        return match_types(tail1, tail2, ren)
    return match_types(t1.fun, t2.fun, ren) and match_types(t1.arg, t2.arg, ren)


def _key_class(k):
    return (isinstance(k, Implicit), k.base)


def match_constrained(cs1: dict, t1: Type, cs2: dict, t2: Type, fixed=()) -> bool:
    """Alpha-equivalence of ``cs1 => t1`` and ``cs2 => t2``.

    Constraint sets are compared as multisets of (base, implicit?) entries;
    duplicate overloaded entries are tried in every pairing. Variables in
    ``fixed`` may only correspond to themselves.
    """
    ren = _Renaming({v.id: v.id for v in fixed}, {v.id: v.id for v in fixed})
    if not match_types(t1, t2, ren):
        return False
    groups1: dict = {}
    groups2: dict = {}
    for k, t in cs1.items():
        groups1.setdefault(_key_class(k), []).append(t)
    for k, t in cs2.items():
        groups2.setdefault(_key_class(k), []).append(t)
    if groups1.keys() != groups2.keys():
        return False
    if any(len(groups1[g]) != len(groups2[g]) for g in groups1):
        return False
    classes = sorted(groups1)

    def go(i, ren):
        if i == len(classes):
            return True
        g = classes[i]
        for perm in permutations(groups2[g]):
            r = ren.copy()
            if all(match_types(a, b, r) for a, b in zip(groups1[g], perm)) and go(i + 1, r):
                return True
        return False

    return go(0, ren)


def schemes_match(s1: Scheme, s2: Scheme) -> bool:
    return match_constrained(s1.cs, s1.body, s2.cs, s2.body)


def parse_expected(text: str, supply: Supply | None = None) -> tuple[dict, Type]:
    """Parse a printed constrained type into constraints and body."""
    supply = supply or Supply(1 << 30)
    cons, st = S.parse_constrained_type(text)
    varmap: dict = {}
    # row tails first so their kind is fixed before ordinary uses
    _collect_tails(st, varmap, supply)
    for _, ct in cons:
        _collect_tails(ct, varmap, supply)
    cs = {}
    for label, ct in cons:
        t = from_stype(ct, varmap, supply)
        if label.startswith("?"):
            cs[Implicit(label[1:])] = t
        else:
            cs[Overloaded(label, supply.occ())] = t
    return cs, from_stype(st, varmap, supply)


def _collect_tails(st, varmap, supply):
    from .types import ROW
    if isinstance(st, S.TyRecord):
        if st.tail is not None and st.tail not in varmap:
            varmap[st.tail] = supply.fresh(ROW)
        for _, ft in st.fields:
            _collect_tails(ft, varmap, supply)
    elif isinstance(st, S.TyArrow):
        _collect_tails(st.dom, varmap, supply)
        _collect_tails(st.cod, varmap, supply)
    elif isinstance(st, S.TyApp):
        _collect_tails(st.arg, varmap, supply)


def type_matches(expected: str, actual: Scheme) -> bool:
    cs, t = parse_expected(expected)
    return match_constrained(cs, t, actual.cs, actual.body)


# ---------------------------------------------------------------------------
# expectations


@dataclass
class Expectation:
    kind: str       # type | value | error
    name: str
    expected: str
    offset: int
    line: int


@dataclass
class Outcome:
    expectation: Expectation
    ok: bool
    actual: str

    def render(self, path: str) -> str:
        e = self.expectation
        status = "PASS" if self.ok else "FAIL"
        head = f"{status} {path}:{e.line} {e.kind} {e.name}".rstrip()
        if self.ok:
            return head
        return f"{head}\n    expected: {e.expected}\n    actual:   {self.actual}"


@dataclass
class FileReport:
    path: str
    outcomes: list[Outcome] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors and all(o.ok for o in self.outcomes)


_NAME = re.compile(r"\s*(\([^)]*\)|[A-Za-z_][A-Za-z0-9_']*)\s*")


def parse_expectations(source: str) -> list[Expectation]:
    out = []
    for m in _EXPECT.finditer(source):
        kind, rest = m.group(1), m.group(2).strip()
        line = source.count("\n", 0, m.start()) + 1
        if kind == "error":
            out.append(Expectation(kind, "", rest, m.start(), line))
            continue
        nm = _NAME.match(rest)
        if nm is None:
            raise ValueError(f"line {line}: malformed expectation {rest!r}")
        name = nm.group(1)
        if name.startswith("("):
            name = name[1:-1].strip()
        sep = ":" if kind == "type" else "="
        body = rest[nm.end():]
        if not body.startswith(sep):
            raise ValueError(f"line {line}: expected {sep!r} after {name}")
        out.append(Expectation(kind, name, body[1:].strip(), m.start(), line))
    return out


def check_source(source: str, path: str = "<input>", session: Session | None = None) -> FileReport:
    report = FileReport(path)
    session = session or Session()
    try:
        expectations = parse_expectations(source)
    except ValueError as err:
        report.errors.append(str(err))
        return report
    try:
        res = session.check(source)
    except LwError as err:
        if any(e.kind == "error" and e.expected in err.message for e in expectations):
            return _only_errors(report, expectations, [err.message])
        report.errors.append(err.render(source, path))
        return report
    messages = [d.message for d in res.diagnostics]
    expected_errors = [e for e in expectations if e.kind == "error"]
    for d in res.diagnostics:
        if not any(e.expected in d.message for e in expected_errors):
            report.errors.append(d.error.render(source, path) if d.error else d.message)
    values: dict[int, str] = {}
    if not res.diagnostics:
        try:
            ran = session.run(res)
            for b, (_, v, _) in zip(res.bindings, ran):
                values[id(b)] = print_value(v)
        except LwError as err:
            report.errors.append(err.render(None, path))
    for e in expectations:
        if e.kind == "error":
            hit = [m for m in messages if e.expected in m]
            report.outcomes.append(Outcome(e, bool(hit), "; ".join(messages) or "no errors"))
            continue
        cands = [b for b in res.bindings if b.name == e.name and b.span[0] < e.offset]
        if not cands:
            report.outcomes.append(Outcome(e, False, "no such binding"))
            continue
        b = cands[-1]
        if e.kind == "type":
            actual = normalize_print(b.scheme)
            try:
                ok = type_matches(e.expected, b.scheme)
            except LwError as err:
                ok, actual = False, f"bad expectation: {err.message}"
            report.outcomes.append(Outcome(e, ok, actual))
        else:
            actual = values.get(id(b), "not evaluated")
            report.outcomes.append(Outcome(e, actual == e.expected, actual))
    return report


def _only_errors(report, expectations, messages):
    for e in expectations:
        if e.kind == "error":
            hit = any(e.expected in m for m in messages)
            report.outcomes.append(Outcome(e, hit, "; ".join(messages)))
        else:
            report.outcomes.append(Outcome(e, False, "file did not parse"))
    return report


# ---------------------------------------------------------------------------
# core round-trip


@dataclass
class RoundTrip:
    name: str
    original: str          # erased scheme of the surface binding
    rechecked: str
    exact: bool
    ok: bool


def core_roundtrip(source: str) -> tuple[list[RoundTrip], list[str]]:
    """Emit the core of ``source``, re-parse and re-check it in a fresh session.

    Dictionary parameters and dictionary lets are untyped in the core, so
    a binding may come back more general than its erased scheme; the erased
    scheme must then be an instance of the re-checked one."""
    res = Session().check(source)
    problems = [d.message for d in res.diagnostics]
    text = S.print_program(S.Program(tuple(res.core)))
    res2 = Session().check_program(S.parse_program(text, core=True))
    problems += [f"core: {d.message}" for d in res2.diagnostics]
    if len(res.bindings) != len(res2.bindings):
        problems.append("core has a different number of bindings")
    out = []
    for b1, b2 in zip(res.bindings, res2.bindings):
        erased = erase_scheme(b1.scheme)
        exact = schemes_match(erased, b2.scheme)
        ok = exact or instance_match(erased, b2.scheme.body) is not None
        out.append(RoundTrip(b1.name, normalize_print(erased),
                             normalize_print(b2.scheme), exact, ok))
    return out, problems


# ---------------------------------------------------------------------------
# translation correctness of inject/eject nodes


@dataclass
class JectCheck:
    node: str
    expected: str
    actual: str
    ok: bool


def ject_translations(source: str) -> list[JectCheck]:
    """Re-infer the emitted core of every inject/eject node of ``source``
    under the erased env extended with the node's constraint keys; the
    result must be the node's type with no constraints."""
    session = Session(SessionConfig(record_jects=True))
    session.check(source)
    out = []
    for j in session.jects:
        env = extend_with_keys(erase_env(j.env), j.cs)
        expected = normalize_print(j.type)
        try:
            core = S.parse_expr(S.print_expr(j.core), core=True)
            r = session.inferencer.infer(env, core)
        except LwError as err:
            out.append(JectCheck(S.print_expr(j.node), expected, err.message, False))
            continue
        ok = not r.cs and match_constrained({}, j.type, {}, r.type, fixed=env.ftv())
        out.append(JectCheck(S.print_expr(j.node), expected,
                             normalize_print((r.cs, r.type)), ok))
    return out


def check_file(path: Path) -> FileReport:
    return check_source(Path(path).read_text(encoding="utf-8"), str(path))


def corpus_files(directory: Path) -> list[Path]:
    return sorted(Path(directory).glob("*.lw"))
