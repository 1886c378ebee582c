"""Constructive side of the tight bounds: typing normal forms, derivation
surgery for (anti-)substitution, subject reduction and expansion along
recorded steps, and the head / linear head isomorphism."""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

from .derivations import (
    MANY_FAMILY,
    Derivation,
    R,
    _opened_name,
    build,
    retarget,
)
from .multitypes import NEUTRAL, Arrow, Atom, MultiSet, atoms
from .strategies import StepKind, StepRecord, Trace, contract_at, evaluate
from .terms import (
    App,
    ESub,
    Lam,
    NonPureTerm,
    SystemTag,
    Term,
    Var,
    binder_name,
    classify,
    close,
    esub,
    free_vars,
    fresh_name,
    is_pure,
    open_binder,
    render,
    substitute,
    subterm,
    unfold,
)


class SynthesisError(ValueError):
    pass


class NotNormal(SynthesisError):
    pass


class PoolMismatch(SynthesisError):
    pass


class SubjectMismatch(SynthesisError):
    pass


class NotTypedAtRedex(SynthesisError):
    pass


class FuelExhausted(SynthesisError):
    pass


def _sys(phi: Derivation) -> SystemTag:
    return phi.system


def _opened(phi: Derivation) -> str:
    """Name under which a binder node opened its subject in premise 0."""
    return _opened_name(phi.subject, phi.premises[0].subject, ())


def _names(phi: Derivation) -> set[str]:
    out: set[str] = set()
    for _, n in phi.nodes():
        out |= free_vars(n.subject)
    return out


def _freshen(phi: Derivation, avoid) -> Derivation:
    return retarget(phi, phi.subject, frozenset(avoid))


# ---------------------------------------------------------------------------
# tight typing of normal forms


def type_normal_form(system: SystemTag, t: Term) -> Derivation:
    system = SystemTag.parse(system)
    if not classify(system, t).normal:
        raise NotNormal(f"{render(t)} is not {system}-normal")
    return _tnf(system, t)


def _tnf(system, t):
    if isinstance(t, Var):
        return build(system, R.AX, t, ty=NEUTRAL)
    if isinstance(t, Lam):
        v = binder_name(t)
        return build(system, R.FUN_R, t, [_tnf(system, open_binder(t.body, v))])
    if isinstance(t, App):
        left = _tnf(system, t.fn)
        if system in (SystemTag.HD, SystemTag.LSC):
            return build(system, R.APP_HD, t, [left])
        return build(system, R.APP_LO, t, [left, _tnf(system, t.arg)])
    v = binder_name(t)
    body = _tnf(system, open_binder(t.body, v))
    return build(system, R.ES, t, [body, build(system, R.MANY, t.arg)])


# ---------------------------------------------------------------------------
# substitution and anti-substitution


def _many_rule(system, n):
    if system is SystemTag.MX:
        return R.MANY_POS if n else R.NONE
    return R.MANY


def substitute_derivation(
    system: SystemTag, phi_t: Derivation, x: str, pool: Sequence[Derivation], q: Optional[Term] = None
) -> Derivation:
    """Replace each axiom for ``x`` in ``phi_t`` by a pool member of the same type.

    Pool members all type the same term ``q``; the result types ``t{x := q}``.
    ``q`` must be passed explicitly when the pool is empty.  Axioms are served
    leftmost first, each taking the first unused member of equal type.
    """
    pool = list(pool)
    if q is None:
        if not pool:
            raise PoolMismatch("an empty pool needs the substituted term")
        q = pool[0].subject
    for p in pool:
        if p.subject != q:
            raise PoolMismatch("pool members type different terms")
        if p.rule in MANY_FAMILY:
            raise PoolMismatch("pool members must conclude types")
    if MultiSet(p.conclusion for p in pool) != phi_t.context[x]:
        raise PoolMismatch(f"pool types {MultiSet(p.conclusion for p in pool)} differ from {x} : {phi_t.context[x]}")
    phi_t = _freshen(phi_t, free_vars(q) | {x})
    out = _subs(phi_t, x, q, pool)
    if pool:
        raise PoolMismatch("unused pool members")
    return out


def _subs(phi, x, q, pool):
    if x not in free_vars(phi.subject):
        return phi
    rule, system = phi.rule, phi.system
    if rule is R.AX:
        for i, p in enumerate(pool):
            if p.conclusion == phi.conclusion:
                return pool.pop(i)
        raise PoolMismatch(f"no pool member of type {phi.conclusion}")
    new_subject = substitute(phi.subject, x, q)
    prem = [_subs(p, x, q, pool) for p in phi.premises]
    return build(system, rule, new_subject, prem)


def anti_substitute(system: SystemTag, phi: Derivation, u: Term, x: str, q: Term):
    """Split a derivation of ``u{x := q}`` into one of ``u`` and a pool for ``q``."""
    if substitute(u, x, q) != phi.subject:
        raise SubjectMismatch(f"{render(phi.subject)} is not {render(u)}{{{x} := {render(q)}}}")
    phi = _freshen(phi, free_vars(q) | free_vars(u) | {x})
    pool: list[Derivation] = []
    out = _anti(phi, u, x, q, pool)
    return out, pool


def _anti(phi, u, x, q, pool):
    rule, system = phi.rule, phi.system
    if x not in free_vars(u):
        return phi
    if rule in MANY_FAMILY:
        return build(system, rule, u, [_anti(p, u, x, q, pool) for p in phi.premises])
    if u == Var(x):
        pool.append(phi)
        return build(system, R.AX, u, ty=phi.conclusion)
    if rule in (R.FUN_B, R.FUN_R):
        v = _opened(phi)
        prem = [_anti(phi.premises[0], open_binder(u.body, v), x, q, pool)]
    elif rule is R.ES:
        v = _opened(phi)
        prem = [
            _anti(phi.premises[0], open_binder(u.body, v), x, q, pool),
            _anti(phi.premises[1], u.arg, x, q, pool),
        ]
    else:
        prem = [_anti(phi.premises[0], u.fn, x, q, pool)]
        if len(phi.premises) == 2:
            prem.append(_anti(phi.premises[1], u.arg, x, q, pool))
    return build(system, rule, u, prem)


# ---------------------------------------------------------------------------
# subject reduction


def _child(phi: Derivation, i: int) -> Optional[int]:
    """Premise index holding child ``i`` of the subject, or None if untyped."""
    if phi.rule in (R.FUN_B, R.FUN_R):
        return 0
    if phi.rule is R.APP_HD:
        return 0 if i == 0 else None
    return i


def subject_reduce(phi: Derivation, st: StepRecord) -> Derivation:
    """Transport ``phi`` (typing ``st.source``) to a derivation of ``st.result``."""
    if phi.subject != st.source:
        raise SubjectMismatch(f"derivation types {render(phi.subject)}, step starts from {render(st.source)}")
    phi = _freshen(phi, free_vars(st.source))
    occ = None if st.occurrence is None else st.occurrence[len(st.redex_path):]
    return _reduce(phi, tuple(st.redex_path), st.kind, occ)


def _reduce(phi, path, kind, occ):
    system, rule = phi.system, phi.rule
    new_subject = contract_at(phi.subject, path, kind)
    if rule in MANY_FAMILY:
        return build(system, rule, new_subject, [_reduce(p, path, kind, occ) for p in phi.premises])
    if path:
        j = _child(phi, path[0])
        prem = list(phi.premises)
        if j is not None:
            prem[j] = _reduce(prem[j], path[1:], kind, occ)
        return build(system, rule, new_subject, prem)
    if kind in (StepKind.BETA, StepKind.MX_NON_ERASING, StepKind.MX_ERASING):
        if rule is not R.APP_B or phi.premises[0].rule is not R.FUN_B:
            raise NotTypedAtRedex(f"redex typed by {rule.value}")
        fun, arg = phi.premises
        body = fun.premises[0]
        if kind is StepKind.MX_ERASING:
            return body
        return substitute_derivation(system, body, _opened(fun), list(arg.premises), arg.subject)
    if kind is StepKind.LSC_M:
        if rule is not R.APP_B:
            raise NotTypedAtRedex(f"redex typed by {rule.value}")
        left, arg = phi.premises
        return _rewrap_m(left, arg)
    if rule is not R.ES:
        raise NotTypedAtRedex(f"redex typed by {rule.value}")
    return _reduce_e(phi, occ)


def _rewrap_m(left, arg):
    """``L<\\x.t>`` typed by ``left`` and argument ``arg``: type ``L<t[x:=u]>``."""
    system = left.system
    if left.rule is R.ES:
        inner = _rewrap_m(left.premises[0], arg)
        v = _opened(left)
        subject = esub(inner.subject, v, left.subject.arg)
        return build(system, R.ES, subject, [inner, left.premises[1]])
    if left.rule is not R.FUN_B:
        raise NotTypedAtRedex(f"abstraction typed by {left.rule.value}")
    lam = left.subject
    return build(system, R.ES, ESub(lam.body, lam.binder, arg.subject), [left.premises[0], arg])


def _reduce_e(phi, occ):
    system = phi.system
    left, arg = phi.premises
    v = _opened(phi)
    left = _freshen(left, free_vars(arg.subject) | {v})
    pool = list(arg.premises)
    hole = occ[1:]

    def walk(node, path):
        if not path:
            if node.rule is not R.AX or node.subject != Var(v):
                raise NotTypedAtRedex(f"head occurrence typed by {node.rule.value}")
            for i, p in enumerate(pool):
                if p.conclusion == node.conclusion:
                    return pool.pop(i)
            raise PoolMismatch(f"no argument derivation of type {node.conclusion}")
        prem = list(node.premises)
        prem[0] = walk(prem[0], path[1:])
        if node.rule in (R.FUN_B, R.FUN_R):
            w = _opened(node)
            subject = Lam(node.subject.binder, close(prem[0].subject, w))
        elif node.rule is R.ES:
            w = _opened(node)
            subject = esub(prem[0].subject, w, node.subject.arg)
        else:
            subject = App(prem[0].subject, node.subject.arg)
        return build(system, node.rule, subject, prem)

    new_left = walk(left, hole)
    new_arg = build(system, R.MANY, arg.subject, pool)
    return build(system, R.ES, esub(new_left.subject, v, arg.subject), [new_left, new_arg])


def _es_depth(t):
    n = 0
    while isinstance(t, ESub):
        n += 1
        t = t.body
    return n


# ---------------------------------------------------------------------------
# subject expansion


def subject_expand(phi_p: Derivation, st: StepRecord) -> Derivation:
    """Transport ``phi_p`` (typing ``st.result``) back to a derivation of ``st.source``."""
    if phi_p.subject != st.result:
        raise SubjectMismatch(f"derivation types {render(phi_p.subject)}, step ends at {render(st.result)}")
    phi_p = _freshen(phi_p, free_vars(st.source) | free_vars(st.result))
    occ = None if st.occurrence is None else st.occurrence[len(st.redex_path):]
    return _expand(phi_p, st.source, tuple(st.redex_path), st.kind, occ)


def _expand(phi, old, path, kind, occ):
    """``phi`` types the reduct of ``old`` at ``path``; return a derivation of ``old``."""
    system, rule = phi.system, phi.rule
    if rule in MANY_FAMILY:
        return build(system, rule, old, [_expand(p, old, path, kind, occ) for p in phi.premises])
    if path:
        i = path[0]
        j = _child(phi, i)
        prem = list(phi.premises)
        if j is not None:
            if rule in (R.FUN_B, R.FUN_R) or (rule is R.ES and i == 0):
                sub_old = open_binder(old.body, _opened(phi))
            elif isinstance(old, App):
                sub_old = old.fn if i == 0 else old.arg
            else:
                sub_old = old.arg
            prem[j] = _expand(prem[j], sub_old, path[1:], kind, occ)
        return build(system, rule, old, prem)
    if kind in (StepKind.BETA, StepKind.MX_NON_ERASING):
        fn, q = old.fn, old.arg
        x = fresh_name(fn.binder, free_vars(old) | free_vars(phi.subject))
        u = open_binder(fn.body, x)
        phi_u, pool = anti_substitute(system, phi, u, x, q)
        fun = build(system, R.FUN_B, fn, [phi_u])
        many = build(system, _many_rule(system, len(pool)), q, pool)
        if system is SystemTag.MX and not pool:
            raise SynthesisError("non-erasing mx redex whose argument is untyped")
        return build(system, R.APP_B, old, [fun, many])
    if kind is StepKind.MX_ERASING:
        fn, q = old.fn, old.arg
        if not classify(system, q).normal:
            raise NotNormal(f"erased argument {render(q)} is not normal")
        fun = build(system, R.FUN_B, fn, [phi])
        return build(system, R.APP_B, old, [fun, build(system, R.NONE, q, [_tnf(system, q)])])
    if kind is StepKind.LSC_M:
        left, arg = _unwrap_m(phi, _es_depth(old.fn))
        return build(system, R.APP_B, old, [left, arg])
    return _expand_e(phi, old, occ)


def _unwrap_m(phi, depth):
    """Inverse of :func:`_rewrap_m`: from ``L<t[x:=u]>`` with ``|L| = depth``
    recover a derivation of ``L<\\x.t>`` and the many node for ``u``."""
    system = phi.system
    if phi.rule is not R.ES:
        raise NotTypedAtRedex(f"expected an explicit substitution, got {phi.rule.value}")
    body, many = phi.premises
    sub = phi.subject
    if depth == 0:
        return build(system, R.FUN_B, Lam(sub.binder, sub.body), [body]), many
    inner, arg = _unwrap_m(body, depth - 1)
    v = _opened(phi)
    return build(system, R.ES, esub(inner.subject, v, sub.arg), [inner, many]), arg


def _expand_e(phi, old, occ):
    system = phi.system
    if phi.rule is not R.ES:
        raise NotTypedAtRedex(f"expected an explicit substitution, got {phi.rule.value}")
    left, arg = phi.premises
    v = _opened(phi)
    left = _freshen(left, free_vars(old) | free_vars(phi.subject) | {v})
    hole = occ[1:]
    cut: list[Derivation] = []

    def walk(node, o, path):
        if not path:
            cut.append(node)
            return build(system, R.AX, o, ty=node.conclusion)
        prem = list(node.premises)
        if node.rule in (R.FUN_B, R.FUN_R, R.ES):
            o_child = open_binder(o.body, _opened(node))
        else:
            o_child = o.fn
        prem[0] = walk(prem[0], o_child, path[1:])
        return build(system, node.rule, o, prem)

    old_body = open_binder(old.body, v)
    if subterm(old_body, hole) != Var(v):
        raise SubjectMismatch("the recorded occurrence is not the substituted variable")
    new_left = walk(left, old_body, hole)
    new_arg = build(system, R.MANY, old.arg, list(arg.premises) + cut)
    return build(system, R.ES, old, [new_left, new_arg])


# ---------------------------------------------------------------------------
# pipelines


def synthesize_tight(system: SystemTag, t: Term, fuel: int = 10_000) -> tuple[Trace, Derivation]:
    """Evaluate ``t``, type its normal form tightly and expand back along the trace."""
    system = SystemTag.parse(system)
    trace = evaluate(system, t, fuel)
    if not trace.reached_normal:
        raise FuelExhausted(f"{render(t)} did not reach a {system}-normal form within {fuel} steps")
    phi = type_normal_form(system, trace.final)
    for st in reversed(trace.steps):
        phi = subject_expand(phi, st)
    return trace, phi


def reduction_chain(phi: Derivation, trace: Trace) -> list[Derivation]:
    """Apply subject reduction along every step; element i types the i-th term."""
    out = [phi]
    for st in trace.steps:
        phi = subject_reduce(phi, st)
        out.append(phi)
    return out


# ---------------------------------------------------------------------------
# minimal traditional shrinking typings of LO normal forms


def mts_type_normal_form(t: Term, tau=None) -> Derivation:
    """Traditional shrinking LO typing of a normal form, typing arguments linearly."""
    c = classify(SystemTag.LO, t)
    if not c.normal:
        raise NotNormal(f"{render(t)} is not lo-normal")
    if tau is not None and not c.neutral:
        raise SynthesisError("a type can only be prescribed for neutral terms")
    start = max(atoms(tau), default=-1) + 1 if tau is not None else 0
    counter = itertools.count(start)
    if c.neutral:
        return _mts_neutral(t, tau if tau is not None else Atom(next(counter)), counter)
    return _mts_normal(t, counter)


def _mts_neutral(t, tau, counter):
    lo = SystemTag.LO
    if isinstance(t, Var):
        return build(lo, R.AX, t, ty=tau)
    arg = _mts_normal(t.arg, counter)
    fn = _mts_neutral(t.fn, Arrow(MultiSet([arg.conclusion]), tau), counter)
    return build(lo, R.APP_B, t, [fn, build(lo, R.MANY, t.arg, [arg])])


def _mts_normal(t, counter):
    if isinstance(t, Lam):
        v = binder_name(t)
        return build(SystemTag.LO, R.FUN_B, t, [_mts_normal(open_binder(t.body, v), counter)])
    return _mts_neutral(t, Atom(next(counter)), counter)


# ---------------------------------------------------------------------------
# head / linear head isomorphism and unfolding


def _transport(phi: Derivation, target: SystemTag) -> Derivation:
    prem = [_transport(p, target) for p in phi.premises]
    ty = phi.conclusion if phi.rule is R.AX else None
    return build(target, phi.rule, phi.subject, prem, ty=ty)


def to_lsc(phi: Derivation) -> Derivation:
    """Rule-by-rule transport of a head derivation into the linear head system."""
    if phi.system is not SystemTag.HD:
        raise SynthesisError(f"expected a head derivation, got {phi.system}")
    return _transport(phi, SystemTag.LSC)


def to_hd(phi: Derivation) -> Derivation:
    """Inverse transport; only for derivations of terms without explicit substitutions."""
    if phi.system is not SystemTag.LSC:
        raise SynthesisError(f"expected a linear head derivation, got {phi.system}")
    if not is_pure(phi.subject):
        raise NonPureTerm("the head system has no rule for explicit substitutions")
    return _transport(phi, SystemTag.HD)


def head_iso(phi: Derivation) -> Derivation:
    return to_lsc(phi) if phi.system is SystemTag.HD else to_hd(phi)


def fold_substitutions(phi: Derivation) -> Derivation:
    """Turn every ES node into a derivation surgery, typing ``unfold(subject)``."""
    system = phi.system
    if phi.rule is R.ES:
        v = _opened(phi)
        left = fold_substitutions(phi.premises[0])
        pool = [fold_substitutions(p) for p in phi.premises[1].premises]
        return substitute_derivation(system, left, v, pool, unfold(phi.subject.arg))
    prem = [fold_substitutions(p) for p in phi.premises]
    ty = phi.conclusion if phi.rule is R.AX else None
    return build(system, phi.rule, unfold(phi.subject), prem, ty=ty)


def check_unfolding(phi_lsc: Derivation) -> Derivation:
    """Head derivation of the unfolded subject with the same context and type."""
    if phi_lsc.system is not SystemTag.LSC:
        raise SynthesisError(f"expected a linear head derivation, got {phi_lsc.system}")
    return to_hd(fold_substitutions(phi_lsc))
