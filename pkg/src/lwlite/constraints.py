"""Instance relation, type distance, instance hashing, compaction and the
single-constraint solver."""

from __future__ import annotations

from dataclasses import dataclass

from . import syntax as S
from .errors import UnifyError
from .types import (Env, EnvName, Instance, Key, Overloaded, Plain,
                    Principal, Scheme, Subst, Supply, TCon, TVar, Type, apply,
                    normalize_print, rank, scheme_ftv, sorted_keys, type_vars)
from .unify import unify

__all__ = ["instance_match", "rank", "distance", "hash_scheme", "compact",
           "is_unsolvable", "solve_one", "candidates", "fit_distance", "best_fit", "NotFound", "Found",
           "NOT_FOUND"]

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1


def skolem(v: TVar) -> TCon:
    return TCon(f"!{v.id}", v.kind)


def is_skolem(t: Type) -> bool:
    return isinstance(t, TCon) and t.name.startswith("!")


def _has_skolem(t: Type) -> bool:
    if isinstance(t, TCon):
        return is_skolem(t)
    if isinstance(t, TVar):
        return False
    return _has_skolem(t.fun) or _has_skolem(t.arg)


@dataclass(frozen=True)
class Match:
    subst: Subst          # over the refreshed variables of t0
    refreshed: tuple[TVar, ...]

    def distance(self) -> int:
        return sum(rank(apply(self.subst, v)) for v in self.refreshed)


def _match(s1: Scheme, t0: Type, supply: Supply, rigid: bool = True) -> Match | None:
    fresh = {v.id: supply.fresh(v.kind) for v in type_vars(t0)}
    t0r = apply(fresh, t0)
    if rigid:
        sk = {v.id: skolem(v) for v in s1.quantified}
    else:
        sk = {v.id: supply.fresh(v.kind) for v in s1.quantified}
    body = apply(sk, s1.body)
    try:
        th = unify(t0r, body, supply)
    except UnifyError:
        return None
    # the instance's own free variables are flexible but cannot capture
    # its quantified ones
    for v in scheme_ftv(s1):
        if v.id in th and _has_skolem(th[v.id]):
            return None
    return Match(th, tuple(fresh.values()))


def instance_match(s1: Scheme, t0: Type, supply: Supply | None = None) -> Subst | None:
    """Return a substitution witnessing that ``s1`` is an instance of ``t0``."""
    m = _match(s1, t0, supply or Supply(1 << 40))
    return None if m is None else m.subst


def distance(s: Scheme, t0: Type, supply: Supply | None = None) -> int | None:
    m = _match(s, t0, supply or Supply(1 << 40))
    return None if m is None else m.distance()


def fit_distance(s: Scheme, t0: Type, supply: Supply | None = None) -> int | None:
    """Distance used by the solver: the instance's quantified variables may
    be instantiated, so a generic instance can serve a concrete constraint."""
    m = _match(s, t0, supply or Supply(1 << 40), rigid=False)
    return None if m is None else m.distance()


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def hash_scheme(s: Scheme) -> int:
    return 1 + fnv1a64(normalize_print(s).encode("utf-8")) % (2**32 - 1)


def is_unsolvable(body: Type, t: Type) -> bool:
    return set(type_vars(body)) < set(type_vars(t))


def compact(cs: dict, core: S.Expr) -> tuple[dict, S.Expr]:
    """Merge overloaded keys of one base with identical types."""
    cs = dict(cs)
    changed = True
    while changed:
        changed = False
        keys = [k for k in sorted_keys(cs) if isinstance(k, Overloaded)]
        for i, ki in enumerate(keys):
            for kj in keys[i + 1:]:
                if ki.base == kj.base and cs[ki] == cs[kj]:
                    del cs[ki]
                    core = S.Let(str(ki), S.Var(str(kj)), core)
                    changed = True
                    break
            if changed:
                break
    return cs, core


class NotFound:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "NotFound"


NOT_FOUND = NotFound()


@dataclass(frozen=True)
class Found:
    binding: EnvName
    scheme: Scheme


def candidates(env: Env, base: str) -> list[tuple[Instance, Scheme]]:
    """Visible instances of ``base``; shadowed duplicates are skipped."""
    seen = set()
    out = []
    for name, sc in env:
        if isinstance(name, Instance) and name.base == base and name not in seen:
            seen.add(name)
            out.append((name, sc))
    return out


def best_fit(env: Env, base: str, t: Type, supply: Supply):
    scored = []
    for name, sc in candidates(env, base):
        d = fit_distance(sc, t, supply)
        if d is not None:
            scored.append((d, name, sc))
    if not scored:
        return NOT_FOUND
    best = min(d for d, _, _ in scored)
    winners = [(n, s) for d, n, s in scored if d == best]
    if len(winners) != 1:
        return NOT_FOUND
    return Found(*winners[0])


def solve_one(env: Env, key: Key, t: Type, body: Type, supply: Supply):
    if is_unsolvable(body, t):
        return NOT_FOUND
    if isinstance(key, Overloaded) or env.lookup(Principal(key.base)) is not None:
        return best_fit(env, key.base, t, supply)
    plain = Plain(key.base)
    for name, sc in env:
        if name == plain:
            if fit_distance(sc, t, supply) is not None:
                return Found(name, sc)
            return NOT_FOUND
    return NOT_FOUND
