import pytest
from hypothesis import given, settings, strategies as st

from fmalba.formula import (
    BOT,
    TOP,
    And,
    BlackDiamond,
    Bot,
    Box,
    Implies,
    Inequality,
    Nominal,
    Or,
    ParseError,
    Polarity,
    PropVar,
    QuasiInequality,
    canonical_quasi,
    fresh_nominal,
    is_basic,
    is_pure,
    parse_formula,
    parse_inequality,
    parse_quasi_inequality,
    polarity,
    print_formula,
    print_quasi_inequality,
    prop_vars,
    substitute,
)

p, q, r = PropVar("p"), PropVar("q"), PropVar("r")


class TestParse:
    def test_box_implication(self):
        assert parse_formula("[]p -> p") == Implies(Box(p), p)

    def test_nominal(self):
        assert parse_formula("@i0") == Nominal("i0")

    def test_precedence_and_over_or(self):
        assert parse_formula("p & q | r") == Or(And(p, q), r)

    def test_implies_right_assoc(self):
        assert parse_formula("p -> q -> r") == Implies(p, Implies(q, r))

    def test_unary_binds_tightest(self):
        assert parse_formula("[]p & q") == And(Box(p), q)
        assert parse_formula("<*>p | q") == Or(BlackDiamond(p), q)

    def test_constants_and_parens(self):
        assert parse_formula("bot -> (top)") == Implies(BOT, TOP)

    def test_nested_prefixes(self):
        assert parse_formula("[]<*>@i1") == Box(BlackDiamond(Nominal("i1")))

    def test_error_offset_and_expected(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p -> ")
        assert exc.value.offset == 5
        assert "identifier" in exc.value.expected

    def test_error_trailing(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p q")
        assert exc.value.offset == 2

    def test_error_bad_char(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p ? q")
        assert exc.value.offset == 2

    def test_inequality(self):
        assert parse_inequality("p & q <= r") == Inequality(And(p, q), r)

    def test_quasi(self):
        got = parse_quasi_inequality("<*>@i0 <= p & @j <= <*>@i0 => <*>@j <= p")
        assert got.antecedents == (
            Inequality(BlackDiamond(Nominal("i0")), p),
            Inequality(Nominal("j"), BlackDiamond(Nominal("i0"))),
        )
        assert got.consequent == Inequality(BlackDiamond(Nominal("j")), p)

    def test_quasi_empty_antecedents(self):
        for text in ("∅ => p <= q", "{} => p <= q", " => p <= q"):
            got = parse_quasi_inequality(text)
            assert got == QuasiInequality((), Inequality(p, q))

    def test_quasi_missing_entails(self):
        with pytest.raises(ParseError):
            parse_quasi_inequality("p <= q")


class TestPrint:
    def test_examples(self):
        assert print_formula(Implies(Box(p), p)) == "[]p -> p"
        assert print_formula(BOT) == "bot"
        assert print_formula(BlackDiamond(Nominal("i0"))) == "<*>@i0"

    def test_minimal_parens(self):
        assert print_formula(Or(And(p, q), r)) == "p & q | r"
        assert print_formula(And(p, Or(q, r))) == "p & (q | r)"
        assert print_formula(Implies(Implies(p, q), r)) == "(p -> q) -> r"
        assert print_formula(Box(Implies(p, q))) == "[](p -> q)"
        assert print_formula(And(And(p, q), r)) == "p & q & r"
        assert print_formula(And(p, And(q, r))) == "p & (q & r)"

    def test_quasi_rhs_conjunction_guarded(self):
        quasi = QuasiInequality(
            (Inequality(p, And(q, r)), Inequality(q, r)),
            Inequality(p, q),
        )
        text = print_quasi_inequality(quasi)
        assert text == "p <= (q & r) & q <= r => p <= q"
        assert parse_quasi_inequality(text) == quasi

    def test_quasi_rhs_nested_conjunction_guarded(self):
        # the & is exposed at depth 0 even though the top connective is ->
        quasi = QuasiInequality(
            (Inequality(p, Implies(q, And(r, p))), Inequality(q, r)),
            Inequality(p, q),
        )
        text = print_quasi_inequality(quasi)
        assert parse_quasi_inequality(text) == quasi

    def test_empty_antecedents(self):
        quasi = QuasiInequality((), Inequality(p, q))
        assert print_quasi_inequality(quasi) == "∅ => p <= q"


class TestPredicates:
    def test_is_basic(self):
        assert is_basic(parse_formula("[]p -> p & q | bot"))
        assert not is_basic(parse_formula("@i0"))
        assert not is_basic(parse_formula("<*>p"))

    def test_is_pure(self):
        assert is_pure(parse_formula("<*>@i0 -> @j"))
        assert is_pure(parse_formula("top & bot"))
        assert not is_pure(parse_formula("@i0 -> p"))


class TestSubstitute:
    def test_examples(self):
        assert substitute(Box(p), "p", BlackDiamond(Nominal("i0"))) == Box(BlackDiamond(Nominal("i0")))
        assert substitute(Implies(q, p), "p", BOT) == Implies(q, BOT)
        assert substitute(TOP, "p", q) == TOP

    def test_identity(self):
        f = parse_formula("[]p -> (p & q | r)")
        assert substitute(f, "p", p) == f


class TestPolarity:
    def test_examples(self):
        assert polarity(Implies(p, q), "p") == Polarity.NEGATIVE
        assert polarity(Box(p), "p") == Polarity.POSITIVE
        assert polarity(parse_formula("(p -> q) -> r"), "p") == Polarity.POSITIVE

    def test_absent_is_none(self):
        assert polarity(Implies(p, q), "r") == Polarity.NONE

    def test_both(self):
        assert polarity(parse_formula("p -> p"), "p") == Polarity.BOTH

    def test_lattice(self):
        assert Polarity.NONE | Polarity.POSITIVE == Polarity.POSITIVE
        assert Polarity.POSITIVE | Polarity.NEGATIVE == Polarity.BOTH
        assert Polarity.POSITIVE.flipped() == Polarity.NEGATIVE
        assert Polarity.BOTH.flipped() == Polarity.BOTH
        assert Polarity.NONE.flipped() == Polarity.NONE


class TestFreshNominal:
    def test_scheme(self):
        assert fresh_nominal(set()) == "i0"
        assert fresh_nominal({"i0"}) == "i1"
        assert fresh_nominal({"i0", "i2"}) == "i1"


def test_canonical_quasi():
    a = parse_quasi_inequality("@j <= <*>@k => <*>@j <= <*>@k")
    b = parse_quasi_inequality("@i1 <= <*>@i0 => <*>@i1 <= <*>@i0")
    assert canonical_quasi(a) == canonical_quasi(b)
    c = parse_quasi_inequality("@j <= <*>@k => <*>@k <= <*>@j")
    assert canonical_quasi(a) != canonical_quasi(c)


# ---------------------------------------------------------------------------
# Property tests.
# ---------------------------------------------------------------------------

names = st.sampled_from(["p", "q", "r", "s1"])
nominal_names_st = st.sampled_from(["i0", "i1", "j"])

formulas = st.recursive(
    st.one_of(
        names.map(PropVar),
        st.just(BOT),
        st.just(TOP),
        nominal_names_st.map(Nominal),
    ),
    lambda sub: st.one_of(
        st.tuples(sub, sub).map(lambda t: And(*t)),
        st.tuples(sub, sub).map(lambda t: Or(*t)),
        st.tuples(sub, sub).map(lambda t: Implies(*t)),
        sub.map(Box),
        sub.map(BlackDiamond),
    ),
    max_leaves=26,
)


@given(formulas)
@settings(max_examples=300)
def test_print_parse_roundtrip(f):
    assert parse_formula(print_formula(f)) == f


@given(formulas, names)
def test_polarity_none_iff_absent(f, name):
    assert (polarity(f, name) == Polarity.NONE) == (name not in prop_vars(f))


@given(formulas, names)
def test_substitute_self_is_identity(f, name):
    assert substitute(f, name, PropVar(name)) == f


@given(formulas, names)
def test_substitution_polarity_composition(f, name):
    # Substituting a formula in which `fresh` is positive: if `name` was
    # positive, `fresh` ends up positive (or absent when `name` was absent).
    fresh = "zz"
    theta = And(PropVar(fresh), TOP)
    if polarity(f, name) == Polarity.POSITIVE:
        out = polarity(substitute(f, name, theta), fresh)
        assert not (out & Polarity.NEGATIVE)
        assert out == Polarity.POSITIVE


@given(st.lists(st.integers(min_value=0, max_value=12), max_size=8))
def test_fresh_nominal_not_used(ks):
    used = {f"i{k}" for k in ks}
    assert fresh_nominal(used) not in used


quasis = st.tuples(
    st.lists(st.tuples(formulas, formulas).map(lambda t: Inequality(*t)), max_size=3),
    st.tuples(formulas, formulas).map(lambda t: Inequality(*t)),
).map(lambda t: QuasiInequality(tuple(t[0]), t[1]))


@given(quasis)
@settings(max_examples=200)
def test_quasi_print_parse_roundtrip(quasi):
    assert parse_quasi_inequality(print_quasi_inequality(quasi)) == quasi
