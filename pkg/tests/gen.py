"""Hypothesis strategies shared by the property tests."""

from hypothesis import strategies as st

from tightbounds.multitypes import ABS, NEUTRAL, Arrow, Atom, Context, MultiSet
from tightbounds.terms import App, Var, esub, lam

NAMES = ["x", "y", "z", "w"]


def pure_terms(max_leaves=12):
    return st.recursive(
        st.sampled_from(NAMES).map(Var),
        lambda sub: st.one_of(
            st.tuples(st.sampled_from(NAMES), sub).map(lambda p: lam(*p)),
            st.tuples(sub, sub).map(lambda p: App(*p)),
        ),
        max_leaves=max_leaves,
    )


def lsc_terms(max_leaves=10):
    return st.recursive(
        st.sampled_from(NAMES).map(Var),
        lambda sub: st.one_of(
            st.tuples(st.sampled_from(NAMES), sub).map(lambda p: lam(*p)),
            st.tuples(sub, sub).map(lambda p: App(*p)),
            st.tuples(sub, st.sampled_from(NAMES), sub).map(lambda p: esub(*p)),
        ),
        max_leaves=max_leaves,
    )


def types(max_leaves=6):
    base = st.one_of(st.just(NEUTRAL), st.just(ABS), st.integers(0, 2).map(Atom))
    return st.recursive(
        base,
        lambda sub: st.tuples(st.lists(sub, max_size=2), sub).map(lambda p: Arrow(MultiSet(p[0]), p[1])),
        max_leaves=max_leaves,
    )


def multisets(max_size=3):
    return st.lists(types(4), max_size=max_size).map(MultiSet)


def multitypes():
    return st.one_of(types(), multisets())


def contexts():
    return st.dictionaries(st.sampled_from(NAMES), multisets(2), max_size=3).map(Context)
