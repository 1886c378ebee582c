import pytest
from hypothesis import given, settings

import oracle
from gen import lsc_terms, pure_terms
from tightbounds.terms import (
    IDENTITY,
    OMEGA,
    App,
    Bound,
    ESub,
    Lam,
    NonPureTerm,
    ParseError,
    SystemTag,
    Var,
    alpha_equal,
    classify,
    esub,
    free_vars,
    is_pure,
    lam,
    parse,
    render,
    size,
    substitute,
    unfold,
)

HD, LO, MX, LSC = SystemTag.HD, SystemTag.LO, SystemTag.MX, SystemTag.LSC
T0 = r"(\x1. (\x0. x0 x1) x1) (\z. z)"


def P(s):
    return parse(s)


class TestParse:
    def test_identity(self):
        assert P(r"\x. x") == Lam("x", Bound(0))
        assert P(r"λx. x") == P(r"\y.y")

    def test_t0_shape(self):
        t = P(T0)
        assert isinstance(t, App) and t.arg == IDENTITY
        assert t.fn == lam("x1", App(lam("x0", App(Var("x0"), Var("x1"))), Var("x1")))

    def test_es_chain(self):
        assert P("x[x := y][y := z]") == esub(esub(Var("x"), "x", Var("y")), "y", Var("z"))

    def test_es_binds_tighter_than_application(self):
        t = P(r"(y x)[x:=z] (I I)")
        assert t == App(esub(App(Var("y"), Var("x")), "x", Var("z")), App(Var("I"), Var("I")))

    def test_application_is_left_associative(self):
        assert P("a b c") == App(App(Var("a"), Var("b")), Var("c"))

    def test_lambda_extends_right(self):
        assert P(r"\x. x y") == lam("x", App(Var("x"), Var("y")))

    @pytest.mark.parametrize("bad", ["", "(x", r"\x x", "x)", "x[y := ]", "x $"])
    def test_errors(self, bad):
        with pytest.raises(ParseError):
            parse(bad)

    def test_error_position(self):
        with pytest.raises(ParseError) as info:
            parse("x\n  (y")
        assert info.value.line == 2


class TestRender:
    def test_examples(self):
        assert render(Lam("x", Bound(0))) == r"\x. x"
        assert render(App(Var("x"), App(Var("y"), Var("z")))) == "x (y z)"
        assert render(esub(Var("x"), "x", Var("y"))) == "x[x := y]"

    def test_shadowing_gets_primed(self):
        # the binder hint clashes with a free name in the body
        assert render(Lam("y", App(Bound(0), Var("y")))) == r"\y'. y' y"

    @given(lsc_terms())
    def test_roundtrip(self, t):
        assert parse(render(t)) == t
        assert render(parse(render(t))) == render(t)


class TestFreeVarsAndSubstitution:
    def test_free_vars(self):
        assert free_vars(P(r"\x. x y")) == {"y"}
        assert free_vars(P("x[x := y]")) == {"y"}
        assert free_vars(P(T0)) == set()

    def test_substitute_examples(self):
        assert substitute(P("x x"), "x", P(r"\z.z")) == P(r"(\z.z) (\z.z)")
        out = substitute(P(r"\y. x"), "x", P("y"))
        assert out == P(r"\v. y") and render(out) == r"\y'. y"
        assert substitute(P("y"), "x", OMEGA) == P("y")

    @given(pure_terms(), pure_terms())
    def test_agrees_with_naive_substitution(self, t, u):
        want = oracle.subst(oracle.parse(render(t)), "x", oracle.parse(render(u)))
        got = oracle.parse(render(substitute(t, "x", u)))
        assert oracle.alpha_eq(got, want)

    @given(lsc_terms(), pure_terms(6))
    def test_vacuous(self, t, u):
        if "q" not in free_vars(t):
            assert substitute(t, "q", u) == t


class TestUnfold:
    def test_examples(self):
        assert unfold(P("x[x := y][y := z]")) == Var("z")
        assert unfold(P(r"\x. x")) == P(r"\x. x")
        assert unfold(P(r"(x x)[x := \z.z]")) == P(r"(\z.z)(\z.z)")

    @given(lsc_terms())
    def test_idempotent_and_pure(self, t):
        u = unfold(t)
        assert is_pure(u)
        assert unfold(u) == u
        assert free_vars(u) <= free_vars(t)


class TestSize:
    def test_examples(self):
        assert size(HD, IDENTITY) == 1
        assert size(LSC, IDENTITY) == 2
        assert size(HD, P("x (y z)")) == 1
        assert size(LO, P("x (y z)")) == 2
        assert size(MX, P("x (y z)")) == 2

    def test_lsc_ignores_substitutions(self):
        assert size(LSC, P(r"(\z. z)[z := x1][x0 := x1]")) == 2

    @pytest.mark.parametrize("system", [HD, LO, MX])
    def test_rejects_es(self, system):
        with pytest.raises(NonPureTerm):
            size(system, P("x[x := y]"))

    @given(pure_terms())
    def test_lo_dominates_hd_and_matches_oracle(self, t):
        o = oracle.parse(render(t))
        assert size(LO, t) >= size(HD, t)
        assert size(HD, t) == oracle.hd_size(o)
        assert size(LO, t) == oracle.lo_size(o)
        assert size(MX, t) == size(LO, t)


class TestClassify:
    def test_head_ignores_arguments(self):
        c = classify(HD, App(Var("x"), OMEGA))
        assert (c.normal, c.neutral, c.abs) == (True, True, False)

    def test_lo_requires_normal_arguments(self):
        assert not classify(LO, App(Var("x"), OMEGA)).normal

    def test_lsc_neutral_under_application(self):
        # head variable y is free, so the application can never become a redex
        c = classify(LSC, P(r"(y x)[x := z] ((\z.z)(\z.z))"))
        assert (c.normal, c.neutral, c.abs) == (True, True, False)

    def test_lsc_abs_modulo_substitution(self):
        c = classify(LSC, P(r"(\x.x)[y := z]"))
        assert (c.normal, c.neutral, c.abs) == (True, False, True)

    def test_lsc_pending_substitution_on_head(self):
        assert not classify(LSC, P("x[x := y]")).normal
        assert not classify(LSC, P(r"(x y)[x := \z.z]")).normal

    def test_lsc_evaluates_under_lambda(self):
        assert not classify(LSC, P(r"(\w. x y)[x := \z.z]")).normal
        c = classify(LSC, P(r"(\w. y x)[x := \z.z]"))
        assert c.normal and c.abs

    def test_redex(self):
        for s in (HD, LO, MX, LSC):
            assert not classify(s, P(r"(\x.x) y")).normal

    @given(pure_terms())
    def test_neutral_iff_normal_and_not_abs_pure(self, t):
        for s in (HD, LO, MX, LSC):
            c = classify(s, t)
            assert c.neutral == (c.normal and not c.abs)

    @given(lsc_terms())
    def test_neutral_iff_normal_and_not_abs_lsc(self, t):
        c = classify(LSC, t)
        assert c.neutral == (c.normal and not c.abs)

    @given(pure_terms())
    def test_normal_matches_oracle(self, t):
        o = oracle.parse(render(t))
        assert classify(HD, t).normal == (oracle.hd_step(o) is None)
        assert classify(LO, t).normal == (oracle.lo_step(o) is None)


@given(lsc_terms(), lsc_terms())
@settings(max_examples=50)
def test_alpha_equality_is_structural(t, u):
    assert alpha_equal(t, u) == (t == u)
    assert (t == u) <= (render(t) == render(u))


def test_esub_constructor_vs_raw_node():
    # the raw node keeps a free x in the body; esub binds it
    raw = ESub(Var("x"), "x", Var("y"))
    assert free_vars(raw) == {"x", "y"}
    assert free_vars(esub(Var("x"), "x", Var("y"))) == {"y"}
