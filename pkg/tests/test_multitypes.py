import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import contexts, multisets, multitypes, types
from tightbounds.multitypes import (
    ABS,
    EMPTY,
    NEG,
    NEUTRAL,
    POS,
    Arrow,
    Atom,
    Context,
    MultiSet,
    TypeSyntaxError,
    ctx_restrict,
    ctx_union,
    is_tight,
    occurrences,
    occurs,
    parse_context,
    parse_multiset,
    parse_multitype,
    parse_type,
    type_size,
)

N, A = NEUTRAL, ABS
A1 = Arrow(MultiSet([A]), A)
X = Atom(0)


def ms(*ts):
    return MultiSet(ts)


class TestMultiSet:
    def test_order_insensitive_with_multiplicity(self):
        assert ms(N, A) == ms(A, N)
        assert ms(N, N) != ms(N)
        assert len(ms(N, N)) == 2

    def test_union_and_remove(self):
        assert ms(N) + ms(A, N) == ms(N, N, A)
        assert ms(N, A, N).remove(N) == ms(A, N)
        with pytest.raises(ValueError):
            ms(N).remove(A)

    def test_render(self):
        assert str(ms(A1, A)) == "[A, [A] -> A]"
        assert str(EMPTY) == "[]"


class TestContexts:
    def test_union(self):
        assert ctx_union(Context({"x": [N]}), Context({"x": [A]})) == Context({"x": [N, A]})
        g = Context({"x": [N], "y": [A1]})
        assert ctx_union(g, Context()) == g
        assert ctx_union(Context({"x": [X]}), Context({"y": [A]})) == Context({"x": [X], "y": [A]})

    def test_restrict(self):
        assert ctx_restrict(Context({"x": [N], "y": [A]}), "x") == Context({"y": [A]})
        assert ctx_restrict(Context(), "x") == Context()
        assert ctx_restrict(Context({"x": [N, N]}), "y") == Context({"x": [N, N]})

    def test_empty_images_are_dropped(self):
        g = Context({"x": [], "y": [N]})
        assert g.domain() == {"y"} and g["x"] == EMPTY

    @given(contexts(), contexts(), contexts())
    def test_union_laws(self, g, d, e):
        assert g | d == d | g
        assert (g | d) | e == g | (d | e)
        assert g | Context() == g

    @given(contexts(), contexts())
    def test_type_size_additive(self, g, d):
        assert type_size(g | d) == type_size(g) + type_size(d)

    @given(contexts())
    def test_render_roundtrip(self, g):
        assert parse_context(str(g)) == g


class TestTightAndSize:
    def test_tight(self):
        assert is_tight(ms(N, A))
        assert not is_tight(Arrow(ms(N), N))
        assert is_tight(Context({"x": [], "y": [N]}))
        assert is_tight(EMPTY)
        assert not is_tight(X)

    def test_sizes(self):
        assert type_size(N) == 0
        assert type_size(A1) == 1
        assert type_size(ms(A1, A)) == 1
        assert type_size(Arrow(ms(A1, A1), A1)) == 4

    def test_rejects_non_types(self):
        with pytest.raises(TypeError):
            is_tight("N")


class TestOccurs:
    def test_examples(self):
        assert occurs(EMPTY, POS, EMPTY)
        assert occurs(EMPTY, NEG, Arrow(EMPTY, X))
        assert not occurs(EMPTY, POS, Arrow(ms(X), X))

    def test_domain_flips_twice(self):
        t = Arrow(ms(Arrow(EMPTY, X)), X)
        assert occurs(EMPTY, POS, t) and not occurs(EMPTY, NEG, t)

    def test_context_images_count_positively(self):
        g = Context({"x": [Arrow(EMPTY, X)]})
        assert occurs(EMPTY, NEG, g) and not occurs(EMPTY, POS, g)

    def test_polarity_table(self):
        assert POS * POS is POS and NEG * NEG is POS
        assert POS * NEG is NEG and NEG * POS is NEG

    @given(multitypes(), st.data())
    def test_transitivity(self, t, data):
        u, a = data.draw(st.sampled_from(list(occurrences(t))))
        v, b = data.draw(st.sampled_from(list(occurrences(u))))
        assert occurs(u, a, t) and occurs(v, b, u)
        assert occurs(v, a * b, t)

    @given(multitypes())
    def test_occurrences_agree_with_occurs(self, t):
        for u, p in occurrences(t):
            assert occurs(u, p, t)

    @given(multisets())
    def test_tight_multiset_has_only_itself_as_positive_empty(self, m):
        if is_tight(m) and occurs(EMPTY, POS, m):
            assert m == EMPTY


class TestSyntax:
    def test_parse(self):
        assert parse_type("N") == N
        assert parse_type("[A] -> A") == A1
        assert parse_type("[] -> a3") == Arrow(EMPTY, Atom(3))
        assert parse_multiset("[[A] -> A, A]") == ms(A, A1)
        assert parse_multitype("[N]") == ms(N)
        assert parse_multitype("[N] -> N") == Arrow(ms(N), N)
        assert parse_type("([N] -> N)") == Arrow(ms(N), N)

    def test_context(self):
        assert parse_context("x : [N]; y : [A, N]") == Context({"x": [N], "y": [A, N]})
        assert parse_context("") == Context()

    @pytest.mark.parametrize("bad", ["", "B", "[N", "[N] ->", "N N", "([N])"])
    def test_errors(self, bad):
        with pytest.raises(TypeSyntaxError):
            parse_type(bad)

    @given(types())
    def test_roundtrip(self, t):
        assert parse_type(str(t)) == t
