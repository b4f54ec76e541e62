"""Type inference with dictionary-passing translation.

Every ``infer`` call returns constraints, type, translated core and the
substitution it computed; the substitution is already applied to the
constraints and type. Resolution (compaction plus the solver loop) runs
after each let right-hand side, after each let body, and after each
ejection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as S
from .constraints import NOT_FOUND, compact, hash_scheme, instance_match, solve_one
from .errors import LwError, TypingError, UnifyError
from .types import (BOOL, EMPTY_ROW, INT, ROW, STRING, Env, Implicit, Instance,
                    Overloaded, Plain, Principal, Scheme, Supply, TVar, Type,
                    apply, apply_cs, compose, fn, generalize, instantiate,
                    list_of, normalize_print, record_of, row_ext, row_from,
                    scheme_of_annotation, sorted_keys, split_row)
from .unify import unify

INJ_PARAM = "inj$0"
MAX_RESOLVE_STEPS = 200


@dataclass
class InferResult:
    cs: dict
    type: Type
    core: S.Expr
    subst: dict


@dataclass
class Ject:
    """An inject/eject node with the judgement it produced."""
    node: S.Expr
    env: Env
    cs: dict
    type: Type
    core: S.Expr


@dataclass
class Diagnostic:
    severity: str
    span: tuple[int, int] | None
    message: str
    error: LwError | None = None


@dataclass
class Binding:
    name: str          # user-facing name (instances report their base)
    core_name: str
    scheme: Scheme
    span: tuple[int, int] = (0, 0)


@dataclass
class ProgramResult:
    bindings: list[Binding] = field(default_factory=list)
    core: list[S.TopLet] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)
    env: Env | None = None

    @property
    def ok(self) -> bool:
        return not any(d.severity == "error" for d in self.diagnostics)


def instance_name(o: str, k: int) -> str:
    return f"{o}${k}"


def lam_keys(keys, body: S.Expr) -> S.Expr:
    for k in reversed(keys):
        body = S.Lam(str(k), body)
    return body


def app_keys(f: S.Expr, keys) -> S.Expr:
    for k in keys:
        f = S.App(f, S.Var(str(k)))
    return f


class Inferencer:
    def __init__(self, supply: Supply | None = None, record_jects: bool = False):
        self.supply = supply or Supply()
        self.record_jects = record_jects
        self.jects: list[Ject] = []

    # -- helpers -----------------------------------------------------------

    def fresh(self, kind=None) -> TVar:
        return self.supply.fresh(kind) if kind is not None else self.supply.fresh()

    def unify(self, t1: Type, t2: Type) -> dict:
        return unify(t1, t2, self.supply)

    def union(self, cs1: dict, cs2: dict) -> tuple[dict, dict]:
        """Set union of constraint sets; shared keys have their types unified."""
        s: dict = {}
        out = dict(cs1)
        for k, t in cs2.items():
            if k in out:
                s = compose(self.unify(apply(s, out[k]), apply(s, t)), s)
            else:
                out[k] = t
        return apply_cs(s, out), s

    # -- entry point ---------------------------------------------------------

    def infer(self, env: Env, e: S.Expr) -> InferResult:
        method = getattr(self, "_" + type(e).__name__)
        try:
            return method(env, e)
        except LwError as err:
            if err.span is None and e.span != S.NOSPAN:
                err.span = e.span
            raise

    # -- variables -----------------------------------------------------------

    def _Var(self, env, e):
        found = env.lookup_var(e.name)
        if found is None:
            raise TypingError(f"unbound variable {S.fmt_name(e.name)}")
        name, sc = found
        if isinstance(name, Principal):
            if sc.constraints:
                raise TypingError(f"principal type of {e.name} must be unconstrained")
            _, t0 = instantiate(sc, self.supply)
            key = self.supply.fresh_key(e.name)
            return InferResult({key: t0}, t0, S.Var(str(key)), {})
        cs0, t = instantiate(sc, self.supply)
        cs = {}
        keys = []
        for k in sorted_keys(cs0):
            nk = self.supply.fresh_key(k.base) if isinstance(k, Overloaded) else k
            cs[nk] = cs0[k]
            keys.append(nk)
        return InferResult(cs, t, app_keys(S.Var(e.name), keys), {})

    def _Implicit(self, env, e):
        a = self.fresh()
        key = Implicit(e.name)
        return InferResult({key: a}, a, S.Var(str(key)), {})

    # -- literals ------------------------------------------------------------

    def _IntLit(self, env, e):
        return InferResult({}, INT, e, {})

    def _StrLit(self, env, e):
        return InferResult({}, STRING, e, {})

    def _BoolLit(self, env, e):
        return InferResult({}, BOOL, e, {})

    def _ListLit(self, env, e):
        a = self.fresh()
        s: dict = {}
        cs: dict = {}
        cores = []
        for item in e.items:
            r = self.infer(env.apply(s), item)
            s = compose(r.subst, s)
            cs, s1 = self.union(apply_cs(r.subst, cs), r.cs)
            s = compose(s1, s)
            s2 = self.unify(apply(s, a), apply(s1, r.type))
            s = compose(s2, s)
            cs = apply_cs(s2, cs)
            cores.append(r.core)
        return InferResult(apply_cs(s, cs), list_of(apply(s, a)),
                           S.ListLit(tuple(cores), e.span), s)

    # -- functions -----------------------------------------------------------

    def _Lam(self, env, e):
        a = self.fresh()
        r = self.infer(env.extend(Plain(e.param), Scheme.mono(a)), e.body)
        return InferResult(r.cs, fn(apply(r.subst, a), r.type),
                           S.Lam(e.param, r.core, e.span), r.subst)

    def _apply(self, env, r1: InferResult, arg: S.Expr):
        r2 = self.infer(env.apply(r1.subst), arg)
        a = self.fresh()
        s3 = self.unify(apply(r2.subst, r1.type), fn(r2.type, a))
        s = compose(s3, compose(r2.subst, r1.subst))
        cs, s4 = self.union(apply_cs(s, r1.cs), apply_cs(s3, r2.cs))
        s = compose(s4, s)
        return cs, apply(s, a), r2.core, s

    def _App(self, env, e):
        r1 = self.infer(env, e.fn)
        cs, t, core2, s = self._apply(env, r1, e.arg)
        return InferResult(cs, t, S.App(r1.core, core2, e.span), s)

    def _BinOp(self, env, e):
        rop = self.infer(env, S.Var(e.op, e.span))
        cs1, t1, lcore, s1 = self._apply(env, rop, e.left)
        r1 = InferResult(cs1, t1, None, s1)
        cs, t, rcore, s = self._apply(env, r1, e.right)
        if rop.core == S.Var(e.op):
            core = S.BinOp(e.op, lcore, rcore, e.span)
        else:
            core = S.App(S.App(rop.core, lcore), rcore, e.span)
        return InferResult(cs, t, core, s)

    # -- records -------------------------------------------------------------

    def _Select(self, env, e):
        r = self.infer(env, e.expr)
        a, b = self.fresh(), self.fresh(ROW)
        s2 = self.unify(r.type, record_of(row_ext(e.label, a, b)))
        return InferResult(apply_cs(s2, r.cs), apply(s2, a),
                           S.Select(r.core, e.label, e.span), compose(s2, r.subst))

    def _Record(self, env, e):
        s: dict = {}
        cs: dict = {}
        fields = []
        cores = []
        for label, fe in e.fields:
            r = self.infer(env.apply(s), fe)
            s = compose(r.subst, s)
            cs, s1 = self.union(apply_cs(r.subst, cs), r.cs)
            s = compose(s1, s)
            fields.append((label, r.type))
            cores.append((label, r.core))
        t = record_of(row_from([(l, apply(s, ft)) for l, ft in fields]))
        return InferResult(apply_cs(s, cs), t, S.Record(tuple(cores), e.span), s)

    # -- lists ---------------------------------------------------------------

    def _Match(self, env, e):
        r0 = self.infer(env, e.scrutinee)
        a = self.fresh()
        res = self.fresh()
        s = compose(self.unify(r0.type, list_of(a)), r0.subst)
        cs = apply_cs(s, r0.cs)

        def arm(binds, body):
            nonlocal s, cs
            env1 = env.apply(s)
            for x, t in binds:
                env1 = env1.extend(Plain(x), Scheme.mono(apply(s, t)))
            r = self.infer(env1, body)
            s = compose(r.subst, s)
            cs, s1 = self.union(apply_cs(r.subst, cs), r.cs)
            s = compose(s1, s)
            s2 = self.unify(apply(s, res), apply(s1, r.type))
            s = compose(s2, s)
            cs = apply_cs(s2, cs)
            return r.core

        nil = arm([], e.nil)
        single = cons = None
        if e.single is not None:
            x, body = e.single
            single = (x, arm([(x, a)], body))
        if e.cons is not None:
            h, tl, body = e.cons
            cons = (h, tl, arm([(h, a), (tl, list_of(a))], body))
        core = S.Match(r0.core, nil, single, cons, e.span)
        return InferResult(apply_cs(s, cs), apply(s, res), core, s)

    # -- resolution ----------------------------------------------------------

    def resolve(self, env: Env, cs: dict, body: Type, core: S.Expr):
        """Compact and solve greedily; returns (cs, body, core, subst)."""
        s_total: dict = {}
        cs = dict(cs)
        for _ in range(MAX_RESOLVE_STEPS):
            cs, core = compact(cs, core)
            progress = False
            for k in sorted_keys(cs):
                res = solve_one(env, k, cs[k], body, self.supply)
                if res is NOT_FOUND:
                    continue
                t = cs.pop(k)
                inst_cs, inst_t = instantiate(res.scheme, self.supply)
                s1 = self.unify(t, inst_t)
                inherited = {}
                keys = []
                for ik in sorted_keys(inst_cs):
                    nk = self.supply.fresh_key(ik.base) if isinstance(ik, Overloaded) else ik
                    inherited[nk] = apply(s1, inst_cs[ik])
                    keys.append(nk)
                cs, s2 = self.union(apply_cs(s1, cs), inherited)
                s12 = compose(s2, s1)
                body = apply(s12, body)
                env = env.apply(s12)
                s_total = compose(s12, s_total)
                name = res.binding
                y = instance_name(name.base, name.k) if isinstance(name, Instance) else name.name
                core = S.Let(str(k), app_keys(S.Var(y), keys), core)
                progress = True
                break
            if not progress:
                break
        return cs, body, core, s_total

    # -- let forms -----------------------------------------------------------

    def infer_binding(self, env: Env, kind: str, name: str, value: S.Expr):
        """Infer a let right-hand side; returns (env', scheme, core value, subst).

        ``env'`` is the input env with the substitution applied but without
        the new binding.
        """
        if kind == "rec":
            a = self.fresh()
            r = self.infer(env.extend(Plain(name), Scheme.mono(a)), value)
            s0 = self.unify(apply(r.subst, a), r.type)
            s = compose(s0, r.subst)
            cs, t = apply_cs(s0, r.cs), apply(s0, r.type)
        else:
            r = self.infer(env, value)
            s, cs, t = r.subst, r.cs, r.type
        env1 = env.apply(s)
        cs, t, core, s_a = self.resolve(env1, cs, t, r.core)
        s = compose(s_a, s)
        env1 = env1.apply(s_a)
        sc = generalize(env1, cs, t)
        keys = [k for k, _ in sc.constraints]
        if kind == "rec" and keys:
            core = replace_free(core, name, app_keys(S.Var(name), keys))
        core = lam_keys(keys, core)
        if kind == "over":
            principal = env1.lookup(Principal(name))
            if principal is None:
                raise TypingError(f"let over {S.fmt_name(name)} without an overload declaration")
            if instance_match(sc, principal.body, self.supply) is None:
                raise TypingError(
                    f"instance {normalize_print(sc)} does not match the declared type "
                    f"{normalize_print(principal)} of {S.fmt_name(name)}")
        return env1, sc, core, s

    def _let(self, env, e, kind):
        env1, sc, vcore, s = self.infer_binding(env, kind, e.name, e.value)
        if kind == "over":
            bname = Instance(e.name, hash_scheme(sc))
            core_name = instance_name(e.name, bname.k)
        else:
            bname = Plain(e.name)
            core_name = e.name
        env2 = env1.extend(bname, sc)
        r = self.infer(env2, e.body)
        s = compose(r.subst, s)
        cs, t, bcore, s_b = self.resolve(env2.apply(r.subst), r.cs, r.type, r.core)
        s = compose(s_b, s)
        cls = S.LetRec if kind == "rec" else S.Let
        return InferResult(cs, t, cls(core_name, vcore, bcore, e.span), s)

    def _Let(self, env, e):
        return self._let(env, e, "plain")

    def _LetRec(self, env, e):
        return self._let(env, e, "rec")

    def _LetOver(self, env, e):
        return self._let(env, e, "over")

    def _Overload(self, env, e):
        env1 = env
        for o, st in e.decls:
            env1 = env1.extend(Principal(o), scheme_of_annotation(st, self.supply))
        r = self.infer(env1, e.body)
        cs, core, s = dict(r.cs), r.core, r.subst
        t = r.type
        for o in dict.fromkeys(o for o, _ in e.decls):
            esc = [k for k in sorted_keys(cs) if isinstance(k, Overloaded) and k.base == o]
            if not esc:
                continue
            ik = Implicit(o)
            target = cs.get(ik, cs[esc[0]])
            s1: dict = {}
            for k in esc:
                s1 = compose(self.unify(apply(s1, target), apply(s1, cs[k])), s1)
            for k in esc:
                del cs[k]
                core = S.Let(str(k), S.Var(str(ik)), core)
            cs[ik] = target
            cs = apply_cs(s1, cs)
            t = apply(s1, t)
            s = compose(s1, s)
        return InferResult(cs, t, core, s)

    # -- inject / eject ------------------------------------------------------

    def _record_ject(self, node, env, s, cs, t, core):
        if self.record_jects:
            self.jects.append(Ject(node, env.apply(s), dict(cs), t, core))

    def _inject_keys(self, cs: dict, t: Type, core: S.Expr, moved):
        """Move ``moved`` keys from the constraint set into a record argument."""
        labels = [k.base for k in moved]
        for i, k in enumerate(moved):
            for k2 in moved[i + 1:]:
                if k2.base == k.base and cs[k2] != cs[k]:
                    raise TypingError(
                        f"cannot inject {S.fmt_name(k.base)}: it has several "
                        "constraints with different types")
        rest = {k: v for k, v in cs.items() if k not in moved}
        tail = self.fresh(ROW)
        seen = set()
        fields = []
        lets = []
        for l, k in zip(labels, moved):
            if l not in seen:
                seen.add(l)
                fields.append((l, cs[k]))
            lets.append(k)
        rec = record_of(row_from(fields, tail))
        body = core
        for k in reversed(lets):
            body = S.Let(str(k), S.Select(S.Var(INJ_PARAM), k.base), body)
        return rest, fn(rec, t), S.Lam(INJ_PARAM, body)

    def _Inject(self, env, e):
        r = self.infer(env, e.expr)
        if e.names is None:
            if not r.cs:
                raise TypingError("inject: the expression has no constraints")
            moved = sorted_keys(r.cs)
        else:
            moved = []
            for x in e.names:
                ks = [k for k in r.cs if k.base == x]
                if not ks:
                    raise TypingError(f"inject: no constraint for {S.fmt_name(x)}")
                moved.extend(ks)
            moved = sorted_keys(moved)
        cs, t, core = self._inject_keys(r.cs, r.type, r.core, moved)
        self._record_ject(e, env, r.subst, cs, t, core)
        return InferResult(cs, t, core, r.subst)

    def _Eject(self, env, e):
        r = self.infer(env, e.expr)
        b, a = self.fresh(ROW), self.fresh()
        try:
            s2 = self.unify(r.type, fn(record_of(b), a))
        except UnifyError:
            raise TypingError(
                f"eject expects a function over a record, got {normalize_print(r.type)}") from None
        s = compose(s2, r.subst)
        fields, tail = split_row(apply(s, b))
        if not fields:
            raise TypingError("eject: the record argument has no known fields")
        if isinstance(tail, TVar):
            s = compose({tail.id: EMPTY_ROW}, s)
        env_s = env.apply(s)
        ej: dict = {}
        created = []
        rec = []
        for label, ft in fields:
            ft = apply(s, ft)
            principal = env_s.lookup(Principal(label))
            if principal is not None:
                _, tp = instantiate(principal, self.supply)
                s3 = self.unify(ft, tp)
                s = compose(s3, s)
                env_s = env_s.apply(s3)
                ej = apply_cs(s3, ej)
                key = self.supply.fresh_key(label)
            else:
                key = Implicit(label)
            ft = apply(s, ft)
            if key in ej:
                s3 = self.unify(ej[key], ft)
                s = compose(s3, s)
                env_s = env_s.apply(s3)
                ej = apply_cs(s3, ej)
            else:
                ej[key] = ft
                created.append((label, key))
            rec.append((label, S.Var(str(key))))
        cs, s4 = self.union(apply_cs(s, r.cs), ej)
        s = compose(s4, s)
        t = apply(s, a)
        core = S.App(r.core, S.Record(tuple(rec)), e.span)
        if e.names is not None:
            present = {l for l, _ in fields}
            for x in e.names:
                if x not in present:
                    raise TypingError(f"eject: the record has no field {S.fmt_name(x)}")
            moved = sorted_keys(k for l, k in created if l not in e.names)
            if moved:
                cs, t, core = self._inject_keys(cs, t, core, moved)
        self._record_ject(e, env, s, cs, t, core)
        cs, t, core, s_c = self.resolve(env.apply(s), cs, t, core)
        return InferResult(cs, t, core, compose(s_c, s))

    # -- programs ------------------------------------------------------------

    def infer_item(self, env: Env, item: S.Item):
        """Returns (env', [Binding], [core TopLet])."""
        if isinstance(item, S.TopOverload):
            for o, st in item.decls:
                env = env.extend(Principal(o), scheme_of_annotation(st, self.supply))
            return env, [], []
        kind = "over" if isinstance(item, S.TopLetOver) else ("rec" if item.rec else "plain")
        env1, sc, core, _ = self.infer_binding(env, kind, item.name, item.value)
        if kind == "over":
            k = hash_scheme(sc)
            core_name = instance_name(item.name, k)
            env2 = env1.extend(Instance(item.name, k), sc)
        else:
            core_name = item.name
            env2 = env1.extend(Plain(item.name), sc)
        binding = Binding(item.name, core_name, sc, item.span)
        return env2, [binding], [S.TopLet(core_name, core, kind == "rec", item.span)]


def infer_program(env0: Env, program: S.Program, inferencer: Inferencer | None = None) -> ProgramResult:
    inf = inferencer or Inferencer()
    out = ProgramResult(env=env0)
    env = env0
    for item in program.items:
        try:
            env, binds, core = inf.infer_item(env, item)
        except LwError as err:
            span = err.span if err.span is not None else item.span
            err.span = span
            out.diagnostics.append(Diagnostic("error", span, err.message, err))
            continue
        out.bindings.extend(binds)
        out.core.extend(core)
    out.env = env
    return out


def replace_free(e: S.Expr, name: str, repl: S.Expr) -> S.Expr:
    """Replace free occurrences of variable ``name`` in a core expression."""

    def go(e):
        if isinstance(e, S.Var):
            return repl if e.name == name else e
        if isinstance(e, S.Lam):
            return e if e.param == name else S.Lam(e.param, go(e.body), e.span)
        if isinstance(e, S.App):
            return S.App(go(e.fn), go(e.arg), e.span)
        if isinstance(e, S.BinOp):
            if e.op == name:
                return S.App(S.App(repl, go(e.left)), go(e.right), e.span)
            return S.BinOp(e.op, go(e.left), go(e.right), e.span)
        if isinstance(e, S.Let):
            body = e.body if e.name == name else go(e.body)
            return S.Let(e.name, go(e.value), body, e.span)
        if isinstance(e, S.LetRec):
            if e.name == name:
                return e
            return S.LetRec(e.name, go(e.value), go(e.body), e.span)
        if isinstance(e, S.Record):
            return S.Record(tuple((l, go(v)) for l, v in e.fields), e.span)
        if isinstance(e, S.Select):
            return S.Select(go(e.expr), e.label, e.span)
        if isinstance(e, S.ListLit):
            return S.ListLit(tuple(go(x) for x in e.items), e.span)
        if isinstance(e, S.Match):
            single = cons = None
            if e.single is not None:
                x, b = e.single
                single = (x, b if x == name else go(b))
            if e.cons is not None:
                h, t, b = e.cons
                cons = (h, t, b if name in (h, t) else go(b))
            return S.Match(go(e.scrutinee), go(e.nil), single, cons, e.span)
        return e

    return go(e)


# ---------------------------------------------------------------------------
# erasure: constraints become ordinary leading arguments

def erase_scheme(sc: Scheme) -> Scheme:
    if not sc.constraints:
        return sc
    return Scheme(sc.quantified, (), fn(*[t for _, t in sc.constraints], sc.body))


def erase_env(env: Env) -> Env:
    entries = []
    for name, sc in env:
        if isinstance(name, Principal):
            continue
        if isinstance(name, Instance):
            name = Plain(instance_name(name.base, name.k))
        entries.append((name, erase_scheme(sc)))
    out = Env.empty()
    for name, sc in reversed(entries):
        out = out.extend(name, sc)
    return out


def extend_with_keys(env: Env, cs: dict) -> Env:
    for k in sorted_keys(cs):
        env = env.extend(Plain(str(k)), Scheme.mono(cs[k]))
    return env
