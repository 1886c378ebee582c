"""Derivations assembled rule by rule, independently of the synthesis code.

They transcribe the worked typing of t0 for the head and linear head systems
and serve as oracles for the synthesized derivations and the corpus files.
"""

from tightbounds.derivations import R, build
from tightbounds.multitypes import ABS, NEUTRAL, Arrow, MultiSet
from tightbounds.terms import App, SystemTag, Var, lam, parse

A = ABS
A1 = Arrow(MultiSet([A]), A)

T0 = parse(r"(\x1. (\x0. x0 x1) x1) (\z. z)")
I = parse(r"\z. z")


def t0_derivation(system: SystemTag):
    def ax(name, ty):
        return build(system, R.AX, Var(name), ty=ty)

    def many(term, *prems):
        return build(system, R.MANY, term, prems)

    x0, x1 = Var("x0"), Var("x1")
    x0x1 = App(x0, x1)
    inner = build(system, R.APP_B, x0x1, [ax("x0", A1), many(x1, ax("x1", A))])
    lam_x0 = build(system, R.FUN_B, lam("x0", x0x1), [inner])
    body = App(lam("x0", x0x1), x1)
    app = build(system, R.APP_B, body, [lam_x0, many(x1, ax("x1", A1))])
    fn = build(system, R.FUN_B, lam("x1", body), [app])

    # the displayed tree elides this part; N on the axiom is one valid choice
    i_abs = build(system, R.FUN_R, I, [ax("z", NEUTRAL)])
    i_arrow = build(system, R.FUN_B, I, [ax("z", A)])
    pool = many(I, i_abs, i_arrow)
    return build(system, R.APP_B, T0, [fn, pool])


# node path -> indices shown in the displayed derivations
HD_T0_INDICES = {
    (): (6, 1),
    (0,): (4, 0),
    (0, 0): (3, 0),
    (0, 0, 0): (2, 0),
    (0, 0, 0, 0): (1, 0),
    (1,): (1, 1),
}

LSC_T0_INDICES = {
    (): (6, 4, 2),
    (0,): (4, 3, 0),
    (0, 0): (3, 1, 2),
    (0, 0, 0): (2, 1, 1),
    (0, 0, 0, 0): (1, 0, 2),
    (0, 0, 0, 0, 0): (0, 0, 1),
    (1,): (1, 1, 2),
}
