"""Random types for property tests."""

import random

from hypothesis import strategies as st

from lwlite.types import (BOOL, EMPTY_ROW, INT, ROW, STAR, STRING, TApp, TCon,
                          TVar, Type, fn, list_of, record_of, row_from,
                          split_row)

LABELS = ("a", "b", "c", "d", "e")
STAR_VARS = [TVar(i, STAR) for i in range(4)]
ROW_VARS = [TVar(10 + i, ROW) for i in range(2)]


def rows(inner):
    fields = st.lists(st.tuples(st.sampled_from(LABELS), inner), max_size=3)
    tail = st.sampled_from([EMPTY_ROW] + ROW_VARS)
    return st.builds(row_from, fields, tail)


def types(max_leaves: int = 12):
    leaves = st.sampled_from([INT, BOOL, STRING] + STAR_VARS)
    return st.recursive(
        leaves,
        lambda inner: st.one_of(
            st.builds(lambda a, b: fn(a, b), inner, inner),
            st.builds(list_of, inner),
            st.builds(record_of, rows(inner)),
        ),
        max_leaves=max_leaves,
    )


def random_type(rng: random.Random, depth: int = 4) -> Type:
    """Plain-random generator used where a fixed number of samples is needed."""
    if depth == 0 or rng.random() < 0.3:
        return rng.choice([INT, BOOL, STRING] + STAR_VARS)
    r = rng.random()
    if r < 0.45:
        return fn(random_type(rng, depth - 1), random_type(rng, depth - 1))
    if r < 0.65:
        return list_of(random_type(rng, depth - 1))
    n = rng.randint(0, 3)
    fields = [(rng.choice(LABELS), random_type(rng, depth - 1)) for _ in range(n)]
    return record_of(row_from(fields, rng.choice([EMPTY_ROW] + ROW_VARS)))


def kind_of(t: Type):
    if isinstance(t, (TCon, TVar)):
        return t.kind
    return kind_of(t.fun).cod


def canon(t: Type) -> Type:
    """Rows reordered by label with duplicate labels kept in order."""
    if isinstance(t, (TVar, TCon)):
        return t
    if isinstance(t.fun, TCon) and t.fun.name == "record":
        fields, tail = split_row(t.arg)
        fields = sorted(((l, canon(x)) for l, x in fields), key=lambda f: f[0])
        return record_of(row_from(fields, tail))
    return TApp(canon(t.fun), canon(t.arg))
