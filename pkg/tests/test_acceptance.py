"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed in the pytest
terminal summary and when this file is run as a script."""

import dataclasses
import itertools
import random
import time

from lwlite.constraints import NOT_FOUND, best_fit, rank
from lwlite.core import check_core_arity
from lwlite.errors import UnifyError
from lwlite.golden import check_file, core_roundtrip, ject_translations, type_matches
from lwlite.session import Session
from lwlite.types import (BOOL, EMPTY_ROW, FLOAT, INT, ROW, STAR, Env, Instance,
                          Scheme, Supply, TVar, apply, fn, ftv, list_of,
                          make_scheme, normalize_print, record_of, row_from,
                          type_vars)
from lwlite.unify import unify

from conftest import CORPUS, well_typed_corpus
from strategies import random_type
from test_constraints import count_constructors, exhaustive_best
from test_core import MUTANTS, _drop_key_arg
from test_unify import _unifiable_pair
from unify_oracle import equal_mod_rows, factors_through

RESULTS: list[str] = []


def report(n: int, title: str, ok: bool, detail: str) -> None:
    RESULTS.append(f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} ({detail})")
    assert ok, detail


def corpus():
    return sorted(CORPUS.glob("*.lw"))


REQUIRED_TYPES = {
    "01_overloading.lw": {"twice", "twice_one", "add", "four"},
    "02_constrained_instance.lw": {"<="},
    "03_implicits.lw": {"twice", "pretty4"},
    "04_inject.lw": {"sum", "concat_strings"},
    "05_eject.lw": {"osum", "multy"},
    "06_msums_rebind.lw": {"sum", "multR", "ej", "mej", "sum_map", "f_in", "msums"},
    "07_msums_ject.lw": {"sum", "multR", "ej", "mej", "sum_map", "inj", "msums"},
    "08_flatten.lw": {"flatten", "ej", "inj", "s"},
    "09_ject_algebra.lw": {"inj_all", "inj_x", "inj_xy", "inj_x_y",
                           "ej_all", "ej_x", "ej_xy", "ej_x_y"},
    "10_show_read.lw": {"pp", "pp_int"},
    "12_local_overload.lw": {"f"},
}

REQUIRED_VALUES = {
    ("01_overloading.lw", "four"): "4",
    ("01_overloading.lw", "one"): "1",
    ("03_implicits.lw", "nine"): "9",
    ("03_implicits.lw", "six"): "6",
    ("11_shadowing.lw", "sixteen"): "16",
    ("08_flatten.lw", "s"): '"1, 2, 3"',
    ("04_inject.lw", "ab"): '"' + "".join(["a", "b"]) + '"',
}


def _outcomes(kind):
    start = time.perf_counter()
    out = []
    for path in corpus():
        rep = check_file(path)
        assert not rep.errors, rep.errors
        out += [(path.name, o) for o in rep.outcomes if o.expectation.kind == kind]
    return out, time.perf_counter() - start


def test_criterion_1_golden_types():
    outs, elapsed = _outcomes("type")
    passed = {(f, o.expectation.name) for f, o in outs if o.ok}
    missing = [(f, n) for f, ns in REQUIRED_TYPES.items() for n in ns if (f, n) not in passed]
    failed = [(f, o.expectation.name) for f, o in outs if not o.ok]
    ok = len(outs) >= 30 and not failed and not missing and elapsed < 5
    report(1, "golden types", ok,
           f"{len(outs) - len(failed)}/{len(outs)} pass, missing {missing}, {elapsed:.2f}s")


def test_criterion_2_golden_values():
    outs, _ = _outcomes("value")
    actual = {(f, o.expectation.name): o.actual for f, o in outs}
    wrong = {k: actual.get(k) for k, v in REQUIRED_VALUES.items() if actual.get(k) != v}
    failed = [(f, o.expectation.name) for f, o in outs if not o.ok]
    report(2, "golden values", not wrong and not failed,
           f"{len(REQUIRED_VALUES) - len(wrong)}/{len(REQUIRED_VALUES)} required, "
           f"{len(outs) - len(failed)}/{len(outs)} corpus values, wrong {wrong}")


def test_criterion_3_translation_correctness():
    checks = [c for p in corpus() for c in ject_translations(p.read_text())]
    bad = [c for c in checks if not c.ok]
    report(3, "inject/eject translation correctness", checks and not bad,
           f"{len(checks) - len(bad)}/{len(checks)} nodes")


def test_criterion_4_unifier():
    rng = random.Random(4)
    n_ok = n_fail = unsound = general_bad = 0
    for i in range(10_000):
        if i % 2:
            t1, t2 = random_type(rng, 3), random_type(rng, 3)
            sigma = None
        else:
            t1, t2, sigma = _unifiable_pair(rng)
        try:
            th = unify(t1, t2, Supply(1000))
        except UnifyError:
            n_fail += 1
            unsound += sigma is not None
            continue
        n_ok += 1
        unsound += not equal_mod_rows(apply(th, t1), apply(th, t2))
        if sigma is not None:
            general_bad += not factors_through(th, sigma, ftv(t1) | ftv(t2))
    occurs_missed = 0
    for _ in range(1000):
        t = random_type(rng, 3)
        vs = [v for v in type_vars(t) if v.kind == STAR]
        if not vs or isinstance(t, TVar):
            continue
        try:
            unify(vs[0], t, Supply(1000))
            occurs_missed += 1
        except UnifyError:
            pass
    perm_bad = 0
    tys = [INT, BOOL, list_of(INT), fn(INT, BOOL), FLOAT]
    r = TVar(900, ROW)
    for n in range(1, 6):
        base = [("abcde"[i], tys[i]) for i in range(n)]
        for perm in itertools.permutations(base):
            for tail in (EMPTY_ROW, r):
                t1, t2 = record_of(row_from(base, tail)), record_of(row_from(perm, tail))
                try:
                    th = unify(t1, t2, Supply(1000))
                    perm_bad += not equal_mod_rows(apply(th, t1), apply(th, t2))
                except UnifyError:
                    perm_bad += 1
    try:
        unify(record_of(row_from([("x", INT)], r)), record_of(row_from([("y", INT)], r)), Supply(1000))
        side_ok = False
    except UnifyError as err:
        side_ok = "recursive row" in str(err)
    ok = not (unsound or general_bad or occurs_missed or perm_bad) and side_ok
    report(4, "unifier properties", ok,
           f"{n_ok} unified, {n_fail} rejected, {unsound} unsound, {general_bad} not most general, "
           f"{occurs_missed} occurs misses, {perm_bad} permutation failures, side condition {side_ok}")


def test_criterion_5_rank_and_best_fit():
    rng = random.Random(5)
    rank_bad = sum(rank(t) != count_constructors(t)
                   for t in (random_type(rng, 4) for _ in range(1000)))
    fit_bad = 0
    for _ in range(500):
        entries = [(Instance("o", rng.randint(1, 4)), Scheme((), (), random_type(rng, 2)))
                   for _ in range(rng.randint(1, 5))]
        env = Env.empty()
        for name, sc in entries:
            env = env.extend(name, make_scheme(type_vars(sc.body), {}, sc.body))
        t0 = random_type(rng, 2)
        got = best_fit(env, "o", t0, Supply(1000))
        want = exhaustive_best(env, "o", t0)
        fit_bad += not ((got is NOT_FOUND and want is None) or
                        (got is not NOT_FOUND and got.binding == want))
    a = TVar(901, STAR)
    tie_env = (Env.empty().extend(Instance("o", 1), Scheme.mono(fn(INT, INT)))
               .extend(Instance("o", 2), Scheme.mono(fn(BOOL, BOOL))))
    tie = best_fit(tie_env, "o", fn(a, a), Supply(1000)) is NOT_FOUND
    report(5, "rank oracle and best fit", not rank_bad and not fit_bad and tie,
           f"{rank_bad}/1000 rank mismatches, {fit_bad}/500 best-fit mismatches, tie NotFound {tie}")


def test_criterion_6_core_round_trip_and_arity():
    rt_bad, findings, total = [], 0, 0
    for p in well_typed_corpus():
        checks, problems = core_roundtrip(p.read_text())
        total += len(checks)
        rt_bad += problems + [f"{p.name}:{c.name}" for c in checks if not c.ok]
        res = Session().check(p.read_text())
        findings += len(check_core_arity(res.core))
    detected = 0
    for name, site in MUTANTS:
        res = Session().check((CORPUS / name).read_text())
        counter = [0]
        mutated = [dataclasses.replace(it, value=_drop_key_arg(it.value, site, counter))
                   for it in res.core]
        detected += len(check_core_arity(mutated)) >= 1
    ok = not rt_bad and findings == 0 and detected == len(MUTANTS)
    report(6, "core round trip and dictionary arity", ok,
           f"{total - len(rt_bad)}/{total} bindings re-check, {findings} findings on good cores, "
           f"{detected}/{len(MUTANTS)} mutants detected")


def test_criterion_7_show_read():
    res = Session().check((CORPUS / "10_show_read.lw").read_text())
    got = {b.name: b.scheme for b in res.bindings}
    pp = got["pp"]
    unsolved = sorted(k.base for k, _ in pp.constraints)
    pp_ok = unsolved == ["parse", "pretty"] and type_matches(
        "{ pretty : 'a -> string; parse : string -> 'a } => string -> string", pp)
    int_ok = normalize_print(got["pp_int"]) == "string -> string"
    report(7, "show/read", pp_ok and int_ok,
           f"pp : {normalize_print(pp)}; pp_int : {normalize_print(got['pp_int'])}")


if __name__ == "__main__":
    for name, fn_ in sorted(globals().items()):
        if name.startswith("test_criterion"):
            try:
                fn_()
            except AssertionError:
                pass
    print("\n".join(RESULTS))
