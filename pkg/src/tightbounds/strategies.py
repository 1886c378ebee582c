"""Deterministic head, leftmost-outermost, maximal and linear head strategies."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .terms import (
    App,
    Bound,
    ESub,
    Lam,
    SystemTag,
    Term,
    Var,
    _lo_neutral,
    _lo_normal,
    _lo_size,
    app,
    classify,
    instantiate,
    is_abs,
    lam,
    render,
    require_pure,
    shift,
    subterm,
    uses_index,
)

DEFAULT_FUEL = 10_000


class StepKind(enum.Enum):
    BETA = "beta"
    MX_ERASING = "mx-erasing"
    MX_NON_ERASING = "mx-non-erasing"
    LSC_M = "lsc-m"
    LSC_E = "lsc-e"


@dataclass(frozen=True)
class StepRecord:
    """One evaluation step.

    ``redex_path`` addresses the redex in ``source`` (0 = function, body or ES
    body; 1 = argument or ES argument).  For an exponential step the redex is
    the ES node and ``occurrence`` addresses the replaced variable occurrence.
    """

    source: Term
    result: Term
    kind: StepKind
    redex_path: tuple[int, ...]
    erased: int = 0
    occurrence: Optional[tuple[int, ...]] = None


@dataclass
class Trace:
    system: SystemTag
    initial: Term
    steps: list[StepRecord] = field(default_factory=list)
    final: Term = None
    reached_normal: bool = False

    @property
    def k(self) -> int:
        return len(self.steps)

    @property
    def e_total(self) -> int:
        return sum(s.erased for s in self.steps)

    @property
    def k_m(self) -> int:
        return sum(1 for s in self.steps if s.kind is not StepKind.LSC_E)

    @property
    def k_e(self) -> int:
        return sum(1 for s in self.steps if s.kind is StepKind.LSC_E)

    def totals(self) -> dict:
        return {"k": self.k, "e_total": self.e_total, "k_m": self.k_m, "k_e": self.k_e}

    def lines(self) -> list[str]:
        """Line-oriented dump: index, kind, erased size, rendered result."""
        return [f"{i}\t{s.kind.value}\t{s.erased}\t{render(s.result)}" for i, s in enumerate(self.steps, 1)]


# Each local stepper returns (result, kind, path, erased, occurrence) with
# paths relative to the term it was given.


def _prefix(i, r):
    if r is None:
        return None
    res, kind, path, erased, occ = r
    return res, kind, (i,) + path, erased, None if occ is None else (i,) + occ


def _wrap(t, i, r):
    """Rebuild ``t`` with child ``i`` replaced by the result of ``r``."""
    if r is None:
        return None
    child = r[0]
    if isinstance(t, Lam):
        new = Lam(t.binder, child)
    elif isinstance(t, App):
        new = App(child, t.arg) if i == 0 else App(t.fn, child)
    else:
        new = ESub(child, t.binder, t.arg) if i == 0 else ESub(t.body, t.binder, child)
    return (new,) + _prefix(i, r)[1:]


def _hd(t):
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            return instantiate(t.fn.body, t.arg), StepKind.BETA, (), 0, None
        return _wrap(t, 0, _hd(t.fn))
    if isinstance(t, Lam):
        return _wrap(t, 0, _hd(t.body))
    return None


def _lo(t):
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            return instantiate(t.fn.body, t.arg), StepKind.BETA, (), 0, None
        r = _lo(t.fn)
        if r is not None:
            return _wrap(t, 0, r)
        # fn is normal and not an abstraction, hence neutral
        return _wrap(t, 1, _lo(t.arg))
    if isinstance(t, Lam):
        return _wrap(t, 0, _lo(t.body))
    return None


def _mx(t):
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            body = t.fn.body
            if uses_index(body, 0):
                return instantiate(body, t.arg), StepKind.MX_NON_ERASING, (), 0, None
            if _lo_normal(t.arg):
                return shift(body, -1), StepKind.MX_ERASING, (), _lo_size(t.arg), None
            return _wrap(t, 1, _mx(t.arg))
        r = _mx(t.fn)
        if r is not None:
            return _wrap(t, 0, r)
        return _wrap(t, 1, _mx(t.arg))
    if isinstance(t, Lam):
        return _wrap(t, 0, _mx(t.body))
    return None


def _strip_subs(t):
    """Split ``L<u>`` into the list of ES nodes (outermost first) and ``u``."""
    subs = []
    while isinstance(t, ESub):
        subs.append(t)
        t = t.body
    return subs, t


def head_occurrence(body: Term):
    """Path and depth of the hole of ``body = H<x>`` for the binder just outside ``body``.

    Returns None when the head leaf of ``body`` is not that binder's variable.
    """
    path, depth = [], 0
    t = body
    while True:
        if isinstance(t, (Lam, ESub)):
            t = t.body
            path.append(0)
            depth += 1
        elif isinstance(t, App):
            t = t.fn
            path.append(0)
        elif isinstance(t, Bound) and t.index == depth:
            return tuple(path), depth
        else:
            return None


def _replace_at(t, path, new):
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Lam):
        return Lam(t.binder, _replace_at(t.body, rest, new))
    if isinstance(t, App):
        return App(_replace_at(t.fn, rest, new), t.arg) if i == 0 else App(t.fn, _replace_at(t.arg, rest, new))
    if i == 0:
        return ESub(_replace_at(t.body, rest, new), t.binder, t.arg)
    return ESub(t.body, t.binder, _replace_at(t.arg, rest, new))


def _lsc(t):
    if isinstance(t, App):
        subs, inner = _strip_subs(t.fn)
        if isinstance(inner, Lam):
            out = ESub(inner.body, inner.binder, shift(t.arg, len(subs)))
            for s in reversed(subs):
                out = ESub(out, s.binder, s.arg)
            return out, StepKind.LSC_M, (), 0, None
        return _wrap(t, 0, _lsc(t.fn))
    if isinstance(t, Lam):
        return _wrap(t, 0, _lsc(t.body))
    if isinstance(t, ESub):
        hole = head_occurrence(t.body)
        if hole is not None:
            path, depth = hole
            body = _replace_at(t.body, path, shift(t.arg, depth + 1))
            return ESub(body, t.binder, t.arg), StepKind.LSC_E, (), 0, (0,) + path
        return _wrap(t, 0, _lsc(t.body))
    return None


_STEPPERS = {SystemTag.HD: _hd, SystemTag.LO: _lo, SystemTag.MX: _mx, SystemTag.LSC: _lsc}


def step(system: SystemTag, t: Term) -> Optional[StepRecord]:
    system = SystemTag.parse(system)
    if system is not SystemTag.LSC:
        require_pure(t, system)
    r = _STEPPERS[system](t)
    if r is None:
        return None
    res, kind, path, erased, occ = r
    return StepRecord(t, res, kind, path, erased, occ)


def evaluate(system: SystemTag, t: Term, fuel: int = DEFAULT_FUEL) -> Trace:
    system = SystemTag.parse(system)
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    trace = Trace(system, t)
    cur = t
    for _ in range(fuel):
        st = step(system, cur)
        if st is None:
            break
        trace.steps.append(st)
        cur = st.result
    trace.final = cur
    trace.reached_normal = classify(system, cur).normal
    return trace


def applicable_rules(system: SystemTag, t: Term) -> int:
    """Count the strategy rules whose premises hold at the root of ``t``.

    Independent of the stepper above; used to test determinism.
    """
    system = SystemTag.parse(system)
    n = 0
    if system is SystemTag.LSC:
        if isinstance(t, App):
            subs, inner = _strip_subs(t.fn)
            n += isinstance(inner, Lam)
            n += (not is_abs(system, t.fn)) and step(system, t.fn) is not None
        elif isinstance(t, Lam):
            n += step(system, t.body) is not None
        elif isinstance(t, ESub):
            n += head_occurrence(t.body) is not None
            n += head_occurrence(t.body) is None and step(system, t.body) is not None
        return n
    if isinstance(t, Lam):
        return int(step(system, t.body) is not None)
    if not isinstance(t, App):
        return 0
    fn, arg = t.fn, t.arg
    if system is SystemTag.MX:
        if isinstance(fn, Lam):
            free = uses_index(fn.body, 0)
            n += free
            n += (not free) and _lo_normal(arg)
            n += (not free) and step(system, arg) is not None
        n += (not isinstance(fn, Lam)) and step(system, fn) is not None
        n += _lo_neutral(fn) and step(system, arg) is not None
        return n
    n += isinstance(fn, Lam)
    n += (not isinstance(fn, Lam)) and step(system, fn) is not None
    if system is SystemTag.LO:
        n += _lo_neutral(fn) and step(system, arg) is not None
    return n


def t_family(n: int) -> Term:
    """``(\\x_n. ... ((\\x_1. (\\x_0. x_0 x_1 ... x_n) x_1) x_2) ... x_n) I``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    names = [f"x{i}" for i in range(n + 1)]
    u = lam(names[0], app(*[Var(x) for x in names]))
    if n >= 1:
        u = App(u, Var(names[1]))
    for i in range(1, n + 1):
        u = lam(names[i], u)
        if i < n:
            u = App(u, Var(names[i + 1]))
    return App(u, lam("z", Var("z")))


def contract(kind: StepKind, redex: Term) -> Term:
    """Fire the base rule of ``kind`` at the root of ``redex``."""
    if kind in (StepKind.BETA, StepKind.MX_NON_ERASING):
        return instantiate(redex.fn.body, redex.arg)
    if kind is StepKind.MX_ERASING:
        return shift(redex.fn.body, -1)
    if kind is StepKind.LSC_M:
        subs, inner = _strip_subs(redex.fn)
        out = ESub(inner.body, inner.binder, shift(redex.arg, len(subs)))
        for s in reversed(subs):
            out = ESub(out, s.binder, s.arg)
        return out
    path, depth = head_occurrence(redex.body)
    return ESub(_replace_at(redex.body, path, shift(redex.arg, depth + 1)), redex.binder, redex.arg)


def contract_at(t: Term, path, kind: StepKind) -> Term:
    return _replace_at(t, tuple(path), contract(kind, subterm(t, path)))
