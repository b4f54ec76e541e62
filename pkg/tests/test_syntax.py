import pytest
from hypothesis import given, strategies as st

from lwlite import syntax as S
from lwlite.errors import LexError, ParseError

from conftest import CORPUS


def test_let_twice():
    p = S.parse_program("let twice x = add x x")
    (item,) = p.items
    assert isinstance(item, S.TopLet) and item.name == "twice"
    assert item.value == S.Lam("x", S.App(S.App(S.Var("add"), S.Var("x")), S.Var("x")))


def test_empty_program():
    assert S.parse_program("").items == ()
    assert S.parse_program("// only a comment\n").items == ()


def test_restricted_inject():
    e = S.parse_expr("inject x y in e")
    assert e == S.Inject(S.Var("e"), ("x", "y"))


def test_restricted_eject_operator_names():
    e = S.parse_expr("eject (+) zero in f")
    assert e == S.Eject(S.Var("f"), ("+", "zero"))


def test_duplicate_restriction_rejected():
    with pytest.raises(ParseError, match="duplicate"):
        S.parse_expr("inject x x in e")


@pytest.mark.parametrize("src, expected", [
    ("'a -> 'a -> 'a", S.TyArrow(S.TyVar("'a"), S.TyArrow(S.TyVar("'a"), S.TyVar("'a")))),
    ("'a", S.TyVar("'a")),
    ("string -> 'a", S.TyArrow(S.TyCon("string"), S.TyVar("'a"))),
    ("'a list -> int", S.TyArrow(S.TyApp("list", S.TyVar("'a")), S.TyCon("int"))),
])
def test_parse_type(src, expected):
    assert S.parse_type(src) == expected


def test_record_type_with_tail():
    t = S.parse_type("{ x : int; y : 'a | 'r }")
    assert t == S.TyRecord((("x", S.TyCon("int")), ("y", S.TyVar("'a"))), "'r")


def test_precedence():
    e = S.parse_expr("1 + 2 * 3 :: xs")
    assert e == S.BinOp("::", S.BinOp("+", S.IntLit(1), S.BinOp("*", S.IntLit(2), S.IntLit(3))),
                        S.Var("xs"))


def test_operator_as_identifier():
    assert S.parse_expr("(+)") == S.Var("+")
    assert S.parse_expr("( * )") == S.Var("*")


def test_match_arms():
    e = S.parse_expr("match l with | [] -> 0 | [x] -> x | x :: xs -> x")
    assert isinstance(e, S.Match)
    assert e.single[0] == "x" and e.cons[:2] == ("x", "xs")


def test_inject_applied_with_parentheses():
    e = S.parse_expr("(inject sum) { zero = 0 }")
    assert isinstance(e, S.App) and isinstance(e.fn, S.Inject)


def test_implicit_and_selection():
    e = S.parse_expr("?pretty r.x")
    assert e == S.App(S.Implicit("pretty"), S.Select(S.Var("r"), "x"))


def test_mangled_names_only_in_core_mode():
    with pytest.raises(LexError):
        S.parse_expr("add%1 x")
    assert S.parse_expr("add%1 x", core=True) == S.App(S.Var("add%1"), S.Var("x"))
    assert S.parse_expr("(<=)$42 ?x", core=True) == S.App(S.Var("<=$42"), S.Var("?x"))


def test_error_position():
    src = "let x =\n  1 +"
    with pytest.raises(ParseError) as ei:
        S.parse_program(src)
    assert ei.value.render(src, "f.lw").startswith("f.lw:2:")


def test_bad_character():
    with pytest.raises(LexError, match="bad character"):
        S.parse_program("let x = #")


def test_spans_point_into_source():
    src = "let f x = x.lab"
    item = S.parse_program(src).items[0]
    sel = item.value.body
    assert src[sel.span[0]:sel.span[1]] == "x.lab"


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.lw")), ids=lambda p: p.name)
def test_corpus_print_round_trip(path):
    p = S.parse_program(path.read_text())
    assert S.parse_program(S.print_program(p)) == p


# random surface expressions for the printer/parser round trip

_names = st.sampled_from(["x", "y", "f", "add", "+", "<="])
_labels = st.sampled_from(["a", "b", "zero"])


def _exprs():
    leaves = st.one_of(
        st.builds(S.Var, _names),
        st.builds(S.Implicit, st.sampled_from(["x", "pretty"])),
        st.builds(S.IntLit, st.integers(0, 99)),
        st.builds(S.StrLit, st.text(alphabet='ab"\\\n', max_size=4)),
        st.builds(S.BoolLit, st.booleans()),
    )

    def nodes(inner):
        return st.one_of(
            st.builds(S.Lam, st.sampled_from(["x", "y"]), inner),
            st.builds(S.App, inner, inner),
            st.builds(S.Let, st.sampled_from(["x", "f"]), inner, inner),
            st.builds(S.LetRec, st.just("f"), inner, inner),
            st.builds(S.LetOver, st.just("add"), inner, inner),
            st.builds(S.Record, st.lists(st.tuples(_labels, inner), min_size=1, max_size=3).map(tuple)),
            st.builds(S.Select, inner, _labels),
            st.builds(S.Eject, inner),
            st.builds(S.Inject, inner),
            st.builds(S.Inject, inner, st.just(("add", "zero"))),
            st.builds(S.ListLit, st.lists(inner, max_size=3).map(tuple)),
            st.builds(S.BinOp, st.sampled_from(["+", "*", "::", "^", "<=", "||"]), inner, inner),
            st.builds(S.Match, inner, inner, st.none() | st.tuples(st.just("x"), inner),
                      st.tuples(st.just("x"), st.just("xs"), inner)),
        )

    return st.recursive(leaves, nodes, max_leaves=10)


@given(_exprs())
def test_random_print_round_trip(e):
    assert S.parse_expr(S.print_expr(e)) == e
