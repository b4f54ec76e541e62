"""Independent checks for unifiers: equality modulo row order and a
most-general test by one-way matching."""

from lwlite.constraints import skolem
from lwlite.errors import UnifyError
from lwlite.types import STAR, TCon, TVar, Supply, apply, fn, ftv
from lwlite.unify import unify

from strategies import canon


def equal_mod_rows(t1, t2) -> bool:
    return canon(t1) == canon(t2)


def factors_through(theta: dict, other: dict, vs) -> bool:
    """Is there a delta with delta(theta(v)) == other(v) for every v in vs?"""
    vs = sorted(vs, key=lambda v: v.id)
    if not vs:
        return True
    lhs = fn(*[_box(apply(theta, v)) for v in vs], TCon("unit", STAR))
    rhs = fn(*[_box(apply(other, v)) for v in vs], TCon("unit", STAR))
    rigid = {v.id: skolem(v) for v in ftv(rhs)}
    try:
        unify(lhs, apply(rigid, rhs), Supply(1 << 45))
    except UnifyError:
        return False
    return True


def _box(t):
    # row-kinded variables are wrapped so every component has kind star
    from lwlite.types import record_of
    if isinstance(t, TVar) and t.kind != STAR:
        return record_of(t)
    if not isinstance(t, TVar) and not _is_star(t):
        return record_of(t)
    return t


def _is_star(t):
    from lwlite.types import KArrow, TApp
    k = t.kind if isinstance(t, (TCon, TVar)) else None
    if isinstance(t, TApp):
        f = t.fun
        depth = 0
        while isinstance(f, TApp):
            f, depth = f.fun, depth + 1
        k = f.kind
        for _ in range(depth + 1):
            k = k.cod
    return k == STAR and not isinstance(k, KArrow)
