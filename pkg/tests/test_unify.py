import itertools
import random

import pytest
from hypothesis import given, strategies as st

from lwlite.errors import UnifyError
from lwlite.types import (BOOL, EMPTY_ROW, INT, ROW, STAR, Supply, TVar, apply,
                          fn, ftv, list_of, normalize_print, record_of,
                          row_from, split_row)
from lwlite.unify import rewrite_row, unify

from strategies import kind_of, random_type, types
from unify_oracle import equal_mod_rows, factors_through

a, b, g = TVar(100, STAR), TVar(101, STAR), TVar(102, STAR)
r, s = TVar(110, ROW), TVar(111, ROW)


def sup():
    return Supply(1000)


def test_var_binds():
    assert unify(a, INT, sup()) == {a.id: INT}


def test_row_swap_unifies():
    t1 = record_of(row_from([("x", INT), ("y", BOOL)]))
    t2 = record_of(row_from([("y", BOOL), ("x", INT)]))
    th = unify(t1, t2, sup())
    assert equal_mod_rows(apply(th, t1), apply(th, t2))


def test_sum_record_shape():
    # r used as r.zero and r.add in sum
    t = TVar(120, STAR)
    s1 = unify(t, record_of(row_from([("zero", a)], r)), sup())
    t = apply(s1, t)
    s2 = unify(t, record_of(row_from([("add", fn(b, a, a))], s)), sup())
    got = apply(s2, t)
    assert normalize_print(got) == "{ zero : 'a; add : 'b -> 'a -> 'a | 'c }"


def test_occurs_check():
    with pytest.raises(UnifyError, match="occurs"):
        unify(a, fn(a, INT), sup())


def test_kind_mismatch():
    with pytest.raises(UnifyError, match="kind"):
        unify(a, r, sup())


def test_missing_field_on_closed_row():
    with pytest.raises(UnifyError, match="no field"):
        unify(record_of(row_from([("x", INT)])), record_of(row_from([("y", INT)])), sup())


def test_recursive_row_tail_rejected():
    t1 = record_of(row_from([("x", INT)], r))
    t2 = record_of(row_from([("y", INT)], r))
    with pytest.raises(UnifyError, match="recursive row"):
        unify(t1, t2, sup())


def test_rewrite_row_examples():
    f, rest, th = rewrite_row(row_from([("a", INT), ("b", BOOL)]), "b", sup())
    assert (f, rest, th) == (BOOL, row_from([("a", INT)]), {})
    assert rewrite_row(row_from([("a", INT)], r), "a", sup()) == (INT, r, {})
    f, rest, th = rewrite_row(r, "k", sup())
    assert f.kind == STAR and rest.kind == ROW and th == {r.id: row_from([("k", f)], rest)}
    with pytest.raises(UnifyError):
        rewrite_row(EMPTY_ROW, "k", sup())


def test_scoped_labels_keep_duplicates():
    t1 = record_of(row_from([("l", a), ("l", b)], r))
    t2 = record_of(row_from([("l", INT)], s))
    th = unify(t1, t2, sup())
    assert apply(th, a) == INT
    fields, _ = split_row(apply(th, t2).arg)
    assert [l for l, _ in fields] == ["l", "l"] and fields[1][1] == apply(th, b)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_all_label_permutations_unify(n):
    labels = "abcde"[:n]
    tys = [INT, BOOL, list_of(INT), fn(INT, BOOL), list_of(BOOL)]
    base = [(labels[i], tys[i]) for i in range(n)]
    for perm in itertools.permutations(base):
        for tail in (EMPTY_ROW, r):
            t1, t2 = record_of(row_from(base, tail)), record_of(row_from(perm, tail))
            th = unify(t1, t2, sup())
            assert equal_mod_rows(apply(th, t1), apply(th, t2))


def _check_sound(t1, t2):
    try:
        th = unify(t1, t2, sup())
    except UnifyError:
        return None
    assert equal_mod_rows(apply(th, t1), apply(th, t2))
    kinds = {v.id: v.kind for v in ftv(t1) | ftv(t2)}
    for vid, t in th.items():
        if vid in kinds:
            assert kind_of(t) == kinds[vid]
    return th


@given(types(), types())
def test_soundness(t1, t2):
    _check_sound(t1, t2)


def _unifiable_pair(rng):
    """t1 and sigma(t1) for an idempotent sigma; sigma unifies them."""
    t1 = random_type(rng, 3)
    fresh = [TVar(20 + i, STAR) for i in range(3)]
    rows = [TVar(30 + i, ROW) for i in range(2)]
    sigma = {}
    for v in ftv(t1):
        if v.kind == STAR and rng.random() < 0.6:
            sigma[v.id] = rng.choice([INT, fn(rng.choice(fresh), INT), list_of(rng.choice(fresh))] + fresh)
        elif v.kind == ROW and rng.random() < 0.6:
            sigma[v.id] = row_from([("z", rng.choice(fresh))], rng.choice(rows + [EMPTY_ROW]))
    return t1, apply(sigma, t1), sigma


@given(st.integers(0, 10**9))
def test_most_general(seed):
    rng = random.Random(seed)
    t1, t2, sigma = _unifiable_pair(rng)
    th = unify(t1, t2, sup())
    assert equal_mod_rows(apply(th, t1), apply(th, t2))
    assert factors_through(th, sigma, ftv(t1) | ftv(t2))


@given(types())
def test_self_unification_binds_nothing_visible(t):
    th = unify(t, t, sup())
    assert apply(th, t) == t
