"""Typing derivations for the four multi type systems.

A derivation node stores its full judgement.  :func:`build` is the single
place where a node's judgement is computed from its premises by the rule's
arithmetic, and :func:`check` re-derives every node through it.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Optional, Sequence

from .multitypes import (
    ABS,
    EMPTY,
    NEUTRAL,
    NEG,
    POS,
    Arrow,
    Context,
    MultiSet,
    TightNeutral,
    is_tight,
    mentions_tight,
    occurs,
    parse_context,
    parse_multiset,
    parse_type,
)
from .terms import (
    App,
    ESub,
    Lam,
    SystemTag,
    Term,
    Var,
    binder_name,
    free_vars,
    fresh_name,
    open_binder,
    parse,
    render,
)


class Rule(enum.Enum):
    AX = "ax"
    FUN_B = "fun_b"
    FUN_R = "fun_r"
    APP_B = "app_b"
    APP_HD = "app_hd"
    APP_LO = "app_lo"
    MANY = "many"
    MANY_POS = "many_pos"
    NONE = "none"
    ES = "es"


R = Rule
MANY_FAMILY = frozenset({R.MANY, R.MANY_POS, R.NONE})

RULES = {
    SystemTag.HD: frozenset({R.AX, R.FUN_B, R.FUN_R, R.APP_B, R.APP_HD, R.MANY}),
    SystemTag.LO: frozenset({R.AX, R.FUN_B, R.FUN_R, R.APP_B, R.APP_LO, R.MANY}),
    SystemTag.MX: frozenset({R.AX, R.FUN_B, R.FUN_R, R.APP_B, R.APP_LO, R.MANY_POS, R.NONE}),
    SystemTag.LSC: frozenset({R.AX, R.FUN_B, R.FUN_R, R.APP_B, R.APP_HD, R.MANY, R.ES}),
}

# rules not counted by the derivation size
UNCOUNTED = {
    SystemTag.HD: frozenset({R.AX, R.MANY}),
    SystemTag.LO: frozenset({R.AX, R.MANY}),
    SystemTag.MX: frozenset({R.AX, R.MANY_POS, R.NONE}),
    SystemTag.LSC: frozenset({R.MANY}),
}


class DerivationError(ValueError):
    def __init__(self, message, path=()):
        self.path = tuple(path)
        where = "root" if not self.path else "node " + ".".join(map(str, self.path))
        super().__init__(f"{type(self).__name__} at {where}: {message}")
        self.detail = message


class RuleMismatch(DerivationError):
    pass


class SideConditionViolation(DerivationError):
    pass


class IndexMismatch(DerivationError):
    pass


class ContextMismatch(DerivationError):
    pass


class NegativeIndex(DerivationError):
    pass


@dataclass(frozen=True)
class Judgement:
    system: SystemTag
    context: Context
    subject: Term
    conclusion: object  # Type, or MultiSet at many-family nodes
    indices: Optional[tuple[int, ...]]

    def __str__(self):
        idx = "?" if self.indices is None else ",".join(map(str, self.indices))
        ctx = str(self.context) or "."
        return f"{ctx} |-({idx}) {render(self.subject)} : {self.conclusion}"


@dataclass(frozen=True)
class Derivation:
    rule: Rule
    premises: tuple["Derivation", ...]
    judgement: Judgement

    @property
    def system(self) -> SystemTag:
        return self.judgement.system

    @property
    def subject(self) -> Term:
        return self.judgement.subject

    @property
    def context(self) -> Context:
        return self.judgement.context

    @property
    def conclusion(self):
        return self.judgement.conclusion

    @property
    def indices(self):
        return self.judgement.indices

    def nodes(self, path=()):
        """Pre-order walk yielding (path, node)."""
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    def pretty(self, indent=0) -> str:
        lines = ["  " * indent + f"[{self.rule.value}] {self.judgement}"]
        for p in self.premises:
            lines.append(p.pretty(indent + 1))
        return "\n".join(lines)


def _zero(system):
    return (0, 0, 0) if system is SystemTag.LSC else (0, 0)


def _add(*idx):
    return tuple(sum(c) for c in zip(*idx))


def _opened_name(subject: Lam | ESub, premise_subject: Term, path):
    """Recover the name under which ``subject``'s binder was opened in its premise."""
    outside = free_vars(subject.body)
    cands = free_vars(premise_subject) - outside
    if len(cands) > 1:
        raise RuleMismatch(f"premise subject {render(premise_subject)} is not an opening of {render(subject)}", path)
    v = cands.pop() if cands else binder_name(subject)
    if open_binder(subject.body, v) != premise_subject:
        raise RuleMismatch(f"premise subject {render(premise_subject)} is not an opening of {render(subject)}", path)
    return v


def _expect(cond, exc, msg, path):
    if not cond:
        raise exc(msg, path)


def build(
    system: SystemTag,
    rule: Rule,
    subject: Term,
    premises: Sequence[Derivation] = (),
    ty=None,
    path=(),
    indices: bool = True,
) -> Derivation:
    """Apply ``rule`` to ``premises`` and compute the conclusion judgement.

    ``ty`` is the axiom's type; ``subject`` matters only for axioms and
    many-family nodes but is always checked against the premises.  With
    ``indices=False`` premises may carry blank indices and the result does too.
    """
    system = SystemTag.parse(system)
    premises = tuple(premises)
    lsc = system is SystemTag.LSC
    _expect(rule in RULES[system], RuleMismatch, f"rule {rule.value} is not part of system {system}", path)
    for i, p in enumerate(premises):
        _expect(p.system is system, RuleMismatch, f"premise {i} belongs to system {p.system}", path)
    idx = [p.indices for p in premises] if indices else None
    if indices and any(i is None for i in idx):
        raise IndexMismatch("premise with blank indices", path)

    def arity(n):
        _expect(len(premises) == n, RuleMismatch, f"rule {rule.value} takes {n} premise(s), got {len(premises)}", path)

    def type_premise(p, what):
        _expect(not isinstance(p.conclusion, MultiSet), RuleMismatch, f"{what} must conclude a type", path)

    if rule is R.AX:
        arity(0)
        _expect(isinstance(subject, Var), RuleMismatch, "ax types a variable", path)
        _expect(ty is not None and not isinstance(ty, MultiSet), RuleMismatch, "ax needs a type", path)
        ctx = Context({subject.name: MultiSet([ty])})
        out_idx = (0, 0, 1) if lsc else (0, 0)
        return Derivation(rule, (), Judgement(system, ctx, subject, ty, out_idx if indices else None))

    if rule in MANY_FAMILY:
        for p in premises:
            type_premise(p, "many premise")
            _expect(p.subject == subject, RuleMismatch, "many premises must share the subject", path)
        if rule is R.NONE:
            arity(1)
            ctx, concl = premises[0].context, EMPTY
        else:
            if rule is R.MANY_POS:
                _expect(len(premises) > 0, SideConditionViolation, "many_pos needs at least one premise", path)
            ctx = Context()
            for p in premises:
                ctx = ctx.union(p.context)
            concl = MultiSet([p.conclusion for p in premises])
        out_idx = (_add(*idx) if idx else _zero(system)) if indices else None
        out = Derivation(rule, premises, Judgement(system, ctx, subject, concl, out_idx))
        _mx_law(out, path)
        return out

    if rule in (R.FUN_B, R.FUN_R):
        arity(1)
        _expect(isinstance(subject, Lam), RuleMismatch, f"{rule.value} types an abstraction", path)
        p = premises[0]
        type_premise(p, "abstraction body")
        v = _opened_name(subject, p.subject, path)
        m = p.context[v]
        ctx = p.context.restrict(v)
        if rule is R.FUN_B:
            concl = Arrow(m, p.conclusion)
            if indices:
                b, *rest = idx[0]
                out_idx = (b + 1, rest[0] + len(m), rest[1] - len(m)) if lsc else (b + 1, rest[0])
        else:
            _expect(is_tight(p.conclusion), SideConditionViolation, "fun_r premise type must be tight", path)
            _expect(is_tight(m), SideConditionViolation, f"fun_r needs a tight multiset for {v}", path)
            concl = ABS
            if indices:
                out_idx = idx[0][:-1] + (idx[0][-1] + 1,)
        if indices and min(out_idx) < 0:
            raise NegativeIndex(f"indices {out_idx}", path)
        out = Derivation(rule, premises, Judgement(system, ctx, subject, concl, out_idx if indices else None))
        _mx_law(out, path)
        return out

    if rule in (R.APP_B, R.APP_HD, R.APP_LO):
        _expect(isinstance(subject, App), RuleMismatch, f"{rule.value} types an application", path)
        arity(1 if rule is R.APP_HD else 2)
        left = premises[0]
        type_premise(left, "function premise")
        _expect(left.subject == subject.fn, RuleMismatch, "function premise must type the left subterm", path)
        if rule is R.APP_B:
            right = premises[1]
            _expect(right.rule in MANY_FAMILY, RuleMismatch, "argument premise must be a many node", path)
            _expect(right.subject == subject.arg, RuleMismatch, "argument premise must type the right subterm", path)
            _expect(isinstance(left.conclusion, Arrow), RuleMismatch, "function premise must have an arrow type", path)
            _expect(
                left.conclusion.domain == right.conclusion,
                SideConditionViolation,
                f"domain {left.conclusion.domain} differs from argument multiset {right.conclusion}",
                path,
            )
            ctx = left.context.union(right.context)
            concl = left.conclusion.codomain
            if indices:
                out_idx = _add(idx[0], idx[1])
                out_idx = (out_idx[0] + 1,) + out_idx[1:]
        else:
            _expect(
                isinstance(left.conclusion, TightNeutral),
                SideConditionViolation,
                f"{rule.value} needs a neutral-typed function premise",
                path,
            )
            concl = NEUTRAL
            if rule is R.APP_HD:
                ctx = left.context
                if indices:
                    out_idx = idx[0][:-1] + (idx[0][-1] + 1,)
            else:
                right = premises[1]
                type_premise(right, "argument premise")
                _expect(right.subject == subject.arg, RuleMismatch, "argument premise must type the right subterm", path)
                _expect(is_tight(right.conclusion), SideConditionViolation, "app_lo argument type must be tight", path)
                ctx = left.context.union(right.context)
                if indices:
                    out_idx = _add(idx[0], idx[1])
                    out_idx = out_idx[:-1] + (out_idx[-1] + 1,)
        out = Derivation(rule, premises, Judgement(system, ctx, subject, concl, out_idx if indices else None))
        _mx_law(out, path)
        return out

    # explicit substitution
    _expect(isinstance(subject, ESub), RuleMismatch, "es types an explicit substitution", path)
    arity(2)
    left, right = premises
    type_premise(left, "es body premise")
    _expect(right.rule in MANY_FAMILY, RuleMismatch, "es argument premise must be a many node", path)
    _expect(right.subject == subject.arg, RuleMismatch, "es argument premise must type the substituted term", path)
    v = _opened_name(subject, left.subject, path)
    m = left.context[v]
    _expect(m == right.conclusion, SideConditionViolation, f"{v} is typed {m} but the argument has {right.conclusion}", path)
    ctx = left.context.restrict(v).union(right.context)
    out_idx = None
    if indices:
        b, e, r = _add(idx[0], idx[1])
        out_idx = (b, e + len(m), r - len(m))
        if out_idx[2] < 0:
            raise NegativeIndex(f"indices {out_idx}", path)
    return Derivation(rule, premises, Judgement(system, ctx, subject, left.conclusion, out_idx))


def _mx_law(phi: Derivation, path):
    if phi.system is SystemTag.MX and phi.context.domain() != free_vars(phi.subject):
        raise ContextMismatch(
            f"mx context domain {sorted(phi.context.domain())} differs from free variables "
            f"{sorted(free_vars(phi.subject))}",
            path,
        )


def _rebuild(phi: Derivation, path, compare_indices: bool, indices: bool):
    prem = [_rebuild(p, path + (i,), compare_indices, indices) for i, p in enumerate(phi.premises)]
    ty = phi.conclusion if phi.rule is R.AX else None
    new = build(phi.system, phi.rule, phi.subject, prem, ty=ty, path=path, indices=indices)
    j, k = phi.judgement, new.judgement
    if j.conclusion != k.conclusion:
        raise RuleMismatch(f"conclusion {j.conclusion} but the rule yields {k.conclusion}", path)
    if j.context != k.context:
        raise ContextMismatch(f"context {j.context or '.'} but the rule yields {k.context or '.'}", path)
    if compare_indices and j.indices != k.indices:
        raise IndexMismatch(f"indices {j.indices} but the rule yields {k.indices}", path)
    return new


def check(phi: Derivation) -> Judgement:
    """Re-derive every node; return the root judgement or raise a DerivationError."""
    return _rebuild(phi, (), True, True).judgement


def infer_indices(skeleton: Derivation) -> Derivation:
    """Fill in every node's indices bottom-up by the rule arithmetic."""
    return _rebuild(skeleton, (), False, True)


def is_valid(phi: Derivation) -> bool:
    try:
        check(phi)
    except DerivationError:
        return False
    return True


def deriv_size(phi: Derivation) -> int:
    skip = UNCOUNTED[phi.system]
    return sum(1 for _, n in phi.nodes() if n.rule not in skip)


def count_rule(phi: Derivation, rule: Rule) -> int:
    return sum(1 for _, n in phi.nodes() if n.rule is rule)


@dataclass(frozen=True)
class DerivFlags:
    tight: bool
    garbage_tight: bool
    mx_tight: bool
    traditional: bool
    shrinking: bool

    def as_dict(self):
        return {k: getattr(self, k) for k in ("tight", "garbage_tight", "mx_tight", "traditional", "shrinking")}


def classify_derivation(phi: Derivation) -> DerivFlags:
    j = phi.judgement
    tight = not isinstance(j.conclusion, MultiSet) and is_tight(j.conclusion) and is_tight(j.context)
    garbage = all(is_tight(n.premises[0].conclusion) for _, n in phi.nodes() if n.rule is R.NONE)
    traditional = not any(mentions_tight(n.conclusion) or mentions_tight(n.context) for _, n in phi.nodes())
    shrinking = not occurs(EMPTY, NEG, j.context) and not occurs(EMPTY, POS, j.conclusion)
    return DerivFlags(tight, garbage, tight and garbage, traditional, shrinking)


def is_tight_for(phi: Derivation) -> bool:
    """Tight, or mx-tight for the maximal system."""
    f = classify_derivation(phi)
    return f.mx_tight if phi.system is SystemTag.MX else f.tight


# ---------------------------------------------------------------------------
# renaming


def retarget(phi: Derivation, subject: Term, avoid=frozenset()) -> Derivation:
    """Rebuild ``phi`` on ``subject``, a term of the same typed shape.

    Binders are reopened with names fresh for ``subject`` and ``avoid``; axiom
    names are taken from ``subject``.  Untyped positions may differ freely.
    """
    rule, sys = phi.rule, phi.system
    if rule is R.AX:
        return build(sys, rule, subject, ty=phi.conclusion)
    if rule in MANY_FAMILY:
        return build(sys, rule, subject, [retarget(p, subject, avoid) for p in phi.premises])
    if rule in (R.FUN_B, R.FUN_R):
        v = fresh_name(subject.binder, free_vars(subject) | set(avoid))
        return build(sys, rule, subject, [retarget(phi.premises[0], open_binder(subject.body, v), avoid)])
    if rule is R.ES:
        v = fresh_name(subject.binder, free_vars(subject.body) | free_vars(subject.arg) | set(avoid))
        left = retarget(phi.premises[0], open_binder(subject.body, v), avoid)
        return build(sys, rule, subject, [left, retarget(phi.premises[1], subject.arg, avoid)])
    prem = [retarget(phi.premises[0], subject.fn, avoid)]
    if len(phi.premises) == 2:
        prem.append(retarget(phi.premises[1], subject.arg, avoid))
    return build(sys, rule, subject, prem)


def canonical(phi: Derivation) -> Derivation:
    return retarget(phi, phi.subject)


def leaf(system: SystemTag, name: str, ty) -> Derivation:
    return build(system, R.AX, Var(name), ty=ty)


# ---------------------------------------------------------------------------
# serialization


def _node_to_obj(phi: Derivation) -> dict:
    j = phi.judgement
    obj = {"rule": phi.rule.value, "term": render(j.subject), "context": str(j.context)}
    if isinstance(j.conclusion, MultiSet):
        obj["multiset"] = str(j.conclusion)
    else:
        obj["type"] = str(j.conclusion)
    obj["indices"] = None if j.indices is None else list(j.indices)
    obj["premises"] = [_node_to_obj(p) for p in phi.premises]
    return obj


def to_json(phi: Derivation) -> str:
    doc = {"system": phi.system.value, "node": _node_to_obj(phi)}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


class FormatError(ValueError):
    pass


def _node_from_obj(system, obj, path) -> Derivation:
    try:
        rule = Rule(obj["rule"])
        subject = parse(obj["term"])
        ctx = parse_context(obj["context"])
        if "multiset" in obj:
            concl = parse_multiset(obj["multiset"])
        else:
            concl = parse_type(obj["type"])
        idx = obj.get("indices")
        idx = None if idx is None else tuple(int(i) for i in idx)
        premises = tuple(_node_from_obj(system, p, path + (i,)) for i, p in enumerate(obj.get("premises", [])))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        where = ".".join(map(str, path)) or "root"
        raise FormatError(f"malformed node at {where}: {exc}") from exc
    return Derivation(rule, premises, Judgement(system, ctx, subject, concl, idx))


def from_json(text: str) -> Derivation:
    """Load a derivation without validating it (use :func:`check` for that)."""
    try:
        doc = json.loads(text)
        system = SystemTag.parse(doc["system"])
        node = doc["node"]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"not a derivation document: {exc}") from exc
    return _node_from_obj(system, node, ())
