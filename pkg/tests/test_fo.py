import itertools

import pytest

from fmalba import fo
from fmalba.fo import (
    Conj,
    Equal,
    Exists,
    Forall,
    Impl,
    NominalConst,
    NotEqual,
    Pred,
    Rel,
    VarSupply,
    WorldVar,
    alpha_eq,
    bound_vars_distinct,
    correspondent,
    free_symbols,
    is_sentence,
    pred_names,
    print_fo,
    st,
    st_inequality,
    st_quasi,
    syntactic_ro_closure,
)
from fmalba.formula import parse_formula, parse_inequality, parse_quasi_inequality
from fmalba.frames import eval_fo, frame_from_dict


def mk(worlds, leq1=(), leq2=(), R=()):
    return frame_from_dict({"worlds": list(worlds), "leq1": [list(p) for p in leq1],
                            "leq2": [list(p) for p in leq2], "R": [list(p) for p in R]})


def x(name):
    return WorldVar(name)


def ro_closure_of_nominal(base, i, v1, v2, v3):
    """Hand-built (forall v1 >=1 base)(exists v2 >=2 v1)(exists v3 <=1 v2) i = v3."""
    return Forall(v1, Impl(
        Rel("leq1", x(base), x(v1)),
        Exists(v2, Conj(
            Rel("leq2", x(v1), x(v2)),
            Exists(v3, Conj(Rel("leq1", x(v3), x(v2)), Equal(NominalConst(i), x(v3)))),
        )),
    ))


class TestRoClosure:
    def test_nominal_shape(self):
        got = syntactic_ro_closure(
            "x", lambda v: Equal(NominalConst("i"), WorldVar(v)), VarSupply(reserved={"x", "i"})
        )
        assert got == ro_closure_of_nominal("x", "i", "y", "z", "w")

    def test_binders_fresh(self):
        supply = VarSupply(reserved={"x"})
        got = syntactic_ro_closure(
            "x",
            lambda v: syntactic_ro_closure(v, lambda u: Equal(x(u), x(u)), supply),
            supply,
        )
        assert bound_vars_distinct(got)

    def test_discrete_orders_collapse(self):
        # with identity orders the closure is semantically the identity
        frame = mk("abc")
        body = lambda v: Pred("P", x(v))
        closed = syntactic_ro_closure("x", body, VarSupply(reserved={"x"}))
        for mask in range(frame.full + 1):
            for w in range(frame.size):
                assert eval_fo(frame, {"x": w}, closed, {"P": mask}) == bool(mask >> w & 1)


class TestTranslationTable:
    def test_top_bot(self):
        assert st("x", parse_formula("top")) == Equal(x("x"), x("x"))
        assert st("x", parse_formula("bot")) == NotEqual(x("x"), x("x"))

    def test_prop(self):
        assert st("x", parse_formula("p")) == Pred("P", x("x"))

    def test_box(self):
        got = st("x", parse_formula("[]p"), VarSupply(reserved={"x"}))
        assert got == Forall("y", Impl(Rel("R", x("x"), x("y")), Pred("P", x("y"))))

    def test_conjunction_pointwise(self):
        got = st("x", parse_formula("p & q"), VarSupply(reserved={"x"}))
        assert got == Conj(Pred("P", x("x")), Pred("Q", x("x")))

    def test_nominal(self):
        got = st("x", parse_formula("@i"), VarSupply(reserved={"x", "i"}))
        assert got == ro_closure_of_nominal("x", "i", "y", "z", "w")

    def test_black_diamond_composes(self):
        got = st("x", parse_formula("<*>@i"), VarSupply(reserved={"x", "i"}))
        # outer closure at x; hole = exists s (R(s, hole_var) and ST_s(@i))
        assert isinstance(got, Forall)
        assert bound_vars_distinct(got)
        # two nested closures, each contributing two leq1 bounds and one leq2
        text = print_fo(got)
        assert text.count("leq1") == 4
        assert text.count("leq2") == 2
        assert text.count("R(") == 1
        # the innermost closure is taken at the R-predecessor variable, per
        # the translation table: "i = w1" under the w1 closure, not "i = x"
        assert "i = w1" in text

    def test_implication_bounded_quantifier(self):
        got = st("x", parse_formula("p -> q"), VarSupply(reserved={"x"}))
        assert got == Forall("y", Impl(Rel("leq1", x("x"), x("y")),
                                       Impl(Pred("P", x("y")), Pred("Q", x("y")))))


class TestInequalityTranslation:
    def test_plain(self):
        got = st_inequality(parse_inequality("p <= q"))
        assert got == Forall("x", Impl(Pred("P", x("x")), Pred("Q", x("x"))))

    def test_bot(self):
        got = st_inequality(parse_inequality("bot <= p"))
        assert got == Forall("x", Impl(NotEqual(x("x"), x("x")), Pred("P", x("x"))))

    def test_quasi_empty_is_consequent(self):
        got = st_quasi(parse_quasi_inequality("∅ => p <= q"))
        assert got == st_inequality(parse_inequality("p <= q"))

    def test_quasi_conjoins_antecedents(self):
        got = st_quasi(parse_quasi_inequality("p <= q & q <= r => p <= r"))
        assert isinstance(got, Impl)
        assert isinstance(got.left, Conj)


class TestCorrespondent:
    def test_rejects_impure(self):
        with pytest.raises(ValueError, match="pure"):
            correspondent([parse_quasi_inequality("∅ => @i0 <= p")])

    def test_sentence_and_predicate_free(self):
        sent = correspondent([parse_quasi_inequality("∅ => @i0 <= <*>@i0")])
        assert is_sentence(sent)
        assert not pred_names(sent)
        assert bound_vars_distinct(sent)

    def test_validity_shape(self):
        sent = correspondent([parse_quasi_inequality("∅ => @i0 <= @i0")])
        for frame in (mk("a"), mk("ab", leq1=[("a", "b")]), mk("abc", leq1=[("c", "a")])):
            assert eval_fo(frame, {}, sent)

    def test_multiple_systems_renamed_apart(self):
        q1 = parse_quasi_inequality("∅ => @i0 <= <*>@i0")
        q2 = parse_quasi_inequality("@i1 <= <*>@i0 => <*>@i1 <= <*>@i0")
        sent = correspondent([q1, q2])
        assert is_sentence(sent)
        assert bound_vars_distinct(sent)

    def test_nominals_quantified_universally(self):
        sent = correspondent([parse_quasi_inequality("∅ => @j <= @j")])
        assert isinstance(sent, Forall)
        assert sent.var == "i0"  # renamed into the canonical scheme


class TestAlphaEq:
    def test_rename_bound(self):
        a = Forall("x", Exists("y", Rel("leq1", x("x"), x("y"))))
        b = Forall("u", Exists("v", Rel("leq1", x("u"), x("v"))))
        assert alpha_eq(a, b)

    def test_free_names_matter(self):
        a = Pred("P", x("x"))
        b = Pred("P", x("y"))
        assert not alpha_eq(a, b)

    def test_structure_matters(self):
        a = Forall("x", Pred("P", x("x")))
        b = Exists("x", Pred("P", x("x")))
        assert not alpha_eq(a, b)

    def test_shadowing(self):
        a = Forall("x", Forall("x", Pred("P", x("x"))))
        b = Forall("y", Forall("z", Pred("P", x("z"))))
        assert alpha_eq(a, b)


class TestPrinter:
    def test_atoms(self):
        assert print_fo(Rel("leq1", x("x"), x("y"))) == "leq1(x,y)"
        assert print_fo(Equal(NominalConst("i0"), x("z"))) == "i0 = z"
        assert print_fo(NotEqual(x("x"), x("x"))) == "x != x"
        assert print_fo(Pred("P", x("x"))) == "P(x)"

    def test_precedence(self):
        phi = Impl(Conj(Pred("P", x("x")), Pred("Q", x("x"))), Pred("P", x("x")))
        assert print_fo(phi) == "P(x) & Q(x) -> P(x)"
        psi = Conj(Forall("y", Pred("P", x("y"))), Pred("Q", x("x")))
        assert print_fo(psi) == "(forall y. P(y)) & Q(x)"


class TestFreeSymbols:
    def test_binding(self):
        phi = Forall("x", Rel("leq1", x("x"), x("y")))
        assert free_symbols(phi) == frozenset({"y"})

    def test_nominal_constants_are_free(self):
        phi = Equal(NominalConst("i0"), x("z"))
        assert free_symbols(phi) == frozenset({"i0", "z"})


def test_translation_agrees_with_satisfaction_on_discrete_frame():
    # quick adequacy spot check; the full suite lives in the harness
    from fmalba.frames import Model, Valuation, compute_ro12, satisfies

    frame = mk("ab", R=[("a", "b")])
    algebra = compute_ro12(frame)
    for f_text in ("[]p", "p | q", "p -> q", "<*>p", "@i0", "[]p -> <*>@i0"):
        f = parse_formula(f_text)
        for pv, qv in itertools.product(algebra.carrier, repeat=2):
            model = Model(frame, Valuation({"p": pv, "q": qv}, {"i0": 1}))
            supply = VarSupply(reserved={"i0"})
            root = supply.fresh()
            phi = st(root, f, supply)
            for w in range(frame.size):
                assert satisfies(model, w, f) == eval_fo(
                    frame, {"i0": 1, root: w}, phi, {"P": pv, "Q": qv}
                )
