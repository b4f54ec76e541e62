"""Kind-preserving unification with row rewriting."""

from __future__ import annotations

from .errors import UnifyError
from .types import (ROW, STAR, Subst, Supply, TApp, TCon, TVar, Type,
                    apply, compose, occurs,
                    row_ext, row_head, split_row)


def _both(t1: Type, t2: Type) -> str:
    # print the two sides with one shared variable naming
    from .types import _Namer, _pt
    nm = _Namer()
    return f"{_pt(t1, nm)} and {_pt(t2, nm)}"


def row_tail(r: Type) -> Type:
    return split_row(r)[1]


def _bind(v: TVar, t: Type) -> Subst:
    if t == v:
        return {}
    if v.kind != t.kind:
        raise UnifyError(f"kind mismatch: {v.kind} vs {t.kind}")
    if occurs(v, t):
        raise UnifyError(f"occurs check: cannot construct infinite type {_both(v, t)}")
    return {v.id: t}


def rewrite_row(r: Type, label: str, supply: Supply) -> tuple[Type, Type, Subst]:
    """Expose ``label`` at the head of ``r``: returns (field, rest, subst)."""
    h = row_head(r)
    if h is not None:
        l, t, rest = h
        if l == label:  # Row-Head
            return t, rest, {}
        ft, rest2, s = rewrite_row(rest, label, supply)  # Row-Swap
        return ft, row_ext(l, apply(s, t), rest2), s
    if isinstance(r, TVar):  # Row-Var
        g = supply.fresh(STAR)
        b = supply.fresh(ROW)
        return g, b, {r.id: row_ext(label, g, b)}
    raise UnifyError(f"record has no field {label}")


def unify(t1: Type, t2: Type, supply: Supply) -> Subst:
    if t1.kind != t2.kind:
        raise UnifyError(f"kind mismatch between {_both(t1, t2)}")
    if isinstance(t1, TVar):
        return _bind(t1, t2)
    if isinstance(t2, TVar):
        return _bind(t2, t1)
    if isinstance(t1, TCon) and isinstance(t2, TCon):
        if t1 == t2:
            return {}
        raise UnifyError(f"cannot unify {_both(t1, t2)}")
    h1 = row_head(t1)
    if h1 is not None:
        l, ft1, r1 = h1
        try:
            ft2, r2, s1 = rewrite_row(t2, l, supply)
        except UnifyError:
            raise UnifyError(f"cannot unify {_both(t1, t2)}: no field {l}") from None
        tl = row_tail(r1)
        if isinstance(tl, TVar) and tl.id in s1:
            raise UnifyError(f"recursive row type in {_both(t1, t2)}")
        s2 = unify(apply(s1, ft1), apply(s1, ft2), supply)
        s21 = compose(s2, s1)
        s3 = unify(apply(s21, r1), apply(s21, r2), supply)
        return compose(s3, s21)
    if row_head(t2) is not None:
        missing = row_head(t2)[0]
        raise UnifyError(f"cannot unify {_both(t1, t2)}: no field {missing}")
    if isinstance(t1, TApp) and isinstance(t2, TApp):
        s1 = unify(t1.fun, t2.fun, supply)
        s2 = unify(apply(s1, t1.arg), apply(s1, t2.arg), supply)
        return compose(s2, s1)
    raise UnifyError(f"cannot unify {_both(t1, t2)}")
