"""Fuzzing campaign: every theorem checked on random terms."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from .derivations import (
    R,
    Derivation,
    DerivationError,
    check,
    classify_derivation,
    count_rule,
    deriv_size,
)
from .generators import FuzzConfig, case_rng, generate_term
from .multitypes import ABS, NEUTRAL, MultiSet, is_tight, type_size
from .strategies import Trace, evaluate
from .synthesis import (
    SynthesisError,
    mts_type_normal_form,
    subject_expand,
    subject_reduce,
    to_hd,
    to_lsc,
    type_normal_form,
)
from .terms import SystemTag, Term, classify, render, size


@dataclass
class Failure:
    term: str
    check_name: str
    detail: str


@dataclass
class FuzzReport:
    system: SystemTag
    attempted: int = 0
    normalized: int = 0
    skipped_fuel: int = 0
    failures: list[Failure] = field(default_factory=list)
    passes: Counter = field(default_factory=Counter)
    indices: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        checks = " ".join(f"{k}={v}" for k, v in sorted(self.passes.items()))
        return (
            f"system={self.system} attempted={self.attempted} normalized={self.normalized} "
            f"skipped_fuel={self.skipped_fuel} failures={len(self.failures)} {checks}"
        )

    def as_dict(self) -> dict:
        return {
            "system": str(self.system),
            "attempted": self.attempted,
            "normalized": self.normalized,
            "skipped_fuel": self.skipped_fuel,
            "failures": [f.__dict__ for f in self.failures],
            "passes": dict(sorted(self.passes.items())),
        }


class _CheckFailed(Exception):
    pass


def expected_indices(system: SystemTag, trace: Trace) -> tuple[int, ...]:
    """Indices a tight typing must carry by the tight correctness theorems."""
    n = size(system, trace.final)
    if system is SystemTag.LSC:
        return (2 * trace.k_m, trace.k_e, n)
    if system is SystemTag.MX:
        return (2 * trace.k, n + trace.e_total)
    return (2 * trace.k, n)


def index_identity_holds(phi: Derivation) -> bool:
    """b + r = size, or b + e + r + #ES = size for the linear head system."""
    total = sum(phi.indices)
    if phi.system is SystemTag.LSC:
        total += count_rule(phi, R.ES)
    return total == deriv_size(phi)


def spreading_violations(phi: Derivation) -> list[str]:
    """Nodes typing a neutral term in a tight context with a non-tight type."""
    bad = []
    for path, node in phi.nodes():
        if isinstance(node.conclusion, MultiSet) or not is_tight(node.context):
            continue
        if classify(node.system, node.subject).neutral and not is_tight(node.conclusion):
            bad.append(f"node {path}: {node.judgement}")
    return bad


def step_delta(system: SystemTag, st) -> tuple[int, ...]:
    if system is SystemTag.LSC:
        return (-2, 0, 0) if st.kind.value == "lsc-m" else (0, -1, 0)
    if system is SystemTag.MX:
        return (-2, -st.erased)
    return (-2, 0)


def _expand_along(phi: Derivation, trace: Trace) -> Derivation:
    for st in reversed(trace.steps):
        phi = subject_expand(phi, st)
    return phi


class Battery:
    """The per-term checks; each records a pass or raises with a reason."""

    def __init__(self, system: SystemTag, report: FuzzReport, iso_lsc_fuel: int):
        self.system = system
        self.report = report
        self.iso_lsc_fuel = iso_lsc_fuel

    def expect(self, name: str, cond: bool, detail: str = ""):
        if not cond:
            raise _CheckFailed(f"{name}: {detail}")
        self.report.passes[name] += 1

    def run(self, t: Term, trace: Trace):
        system = self.system
        phi = _expand_along(type_normal_form(system, trace.final), trace)
        j = check(phi)
        self.expect("synthesize_checks", j.subject == t, "root subject differs")
        want = expected_indices(system, trace)
        self.expect("indices_exact", j.indices == want, f"indices {j.indices}, expected {want}")
        self.report.indices.append(j.indices)
        flags = classify_derivation(phi)
        tight = flags.mx_tight if system is SystemTag.MX else flags.tight
        self.expect("tight", tight, str(flags))
        self.expect("shrinking_if_tight", flags.shrinking, str(flags))
        c = classify(system, trace.final)
        want_ty = NEUTRAL if c.neutral else ABS
        self.expect("root_type", j.conclusion == want_ty, f"type {j.conclusion} for {render(trace.final)}")
        self.expect("index_size_identity", index_identity_holds(phi), f"{j.indices} vs size {deriv_size(phi)}")
        bad = spreading_violations(phi)
        self.expect("tight_spreading", not bad, "; ".join(bad[:2]))
        self.reduction_chain(phi, trace)
        if system is SystemTag.HD:
            self.head_iso(phi, t)
        if system is SystemTag.LO:
            self.shrinking(t, trace)

    def reduction_chain(self, phi: Derivation, trace: Trace):
        cur = phi
        for i, st in enumerate(trace.steps):
            nxt = subject_reduce(cur, st)
            j = check(nxt)
            self.expect("chain_subject", j.subject == st.result, f"step {i + 1}")
            delta = tuple(a - b for a, b in zip(j.indices, cur.indices))
            want = step_delta(self.system, st)
            self.expect("chain_delta", delta == want, f"step {i + 1} ({st.kind.value}): delta {delta}, expected {want}")
            if i == 0:
                back = subject_expand(nxt, st)
                self.expect(
                    "reduce_expand_inverse",
                    back.judgement == cur.judgement,
                    f"{back.judgement} vs {cur.judgement}",
                )
            cur = nxt
        self.expect("chain_ends_normal", cur.indices[0] == 0, f"final indices {cur.indices}")

    def head_iso(self, phi: Derivation, t: Term):
        lifted = to_lsc(phi)
        check(lifted)
        b, r = phi.indices
        lb, le, lr = lifted.indices
        self.expect("iso_indices", (lb, lr) == (b, r + 1), f"{phi.indices} -> {lifted.indices}")
        self.expect("iso_roundtrip", to_hd(lifted) == phi, "N(L(phi)) differs from phi")
        lsc = evaluate(SystemTag.LSC, t, self.iso_lsc_fuel)
        if lsc.reached_normal:
            self.expect("iso_e_counts_substitutions", le == lsc.k_e, f"e={le}, linear head k_e={lsc.k_e}")

    def shrinking(self, t: Term, trace: Trace):
        p = trace.final
        mts = mts_type_normal_form(p)
        n = size(SystemTag.LO, p)
        self.expect("mts_normal_form", mts.indices == (n, 0) and deriv_size(mts) == n, f"{mts.indices}")
        phi = _expand_along(mts, trace)
        j = check(phi)
        flags = classify_derivation(phi)
        self.expect("mts_expansion_traditional", flags.traditional and flags.shrinking, str(flags))
        k = trace.k
        self.expect("shrinking_completeness", 2 * k <= j.indices[0], f"k={k}, b={j.indices[0]}")
        self.expect(
            "shrinking_type_size",
            n == type_size(j.context) + type_size(j.conclusion),
            f"size {n}, type size {type_size(j.context) + type_size(j.conclusion)}",
        )
        self.expect("shrinking_correctness", n <= deriv_size(phi) - 2 * k, f"{n} > {deriv_size(phi)} - {2 * k}")
        cur = phi
        for st in trace.steps:
            nxt = subject_reduce(cur, st)
            check(nxt)
            self.expect("shrinking_decrement", nxt.indices[0] <= cur.indices[0] - 2, f"{cur.indices} -> {nxt.indices}")
            cur = nxt


def run_case(cfg: FuzzConfig, t: Term, report: FuzzReport, iso_lsc_fuel: Optional[int] = None):
    report.attempted += 1
    trace = evaluate(cfg.system, t, cfg.fuel)
    if not trace.reached_normal:
        report.skipped_fuel += 1
        return
    report.normalized += 1
    battery = Battery(cfg.system, report, iso_lsc_fuel if iso_lsc_fuel is not None else cfg.fuel * 20)
    try:
        battery.run(t, trace)
    except _CheckFailed as exc:
        name, _, detail = str(exc).partition(": ")
        report.failures.append(Failure(render(t), name, detail))
    except (DerivationError, SynthesisError) as exc:
        report.failures.append(Failure(render(t), type(exc).__name__, str(exc)))


def run_fuzz(cfg: FuzzConfig, terms: Optional[list[Term]] = None, progress: Optional[Callable] = None) -> FuzzReport:
    """Run the battery on ``cfg.count`` generated terms (or on ``terms``)."""
    report = FuzzReport(cfg.system)
    cases = terms if terms is not None else (generate_term(cfg, case_rng(cfg.seed, i)) for i in range(cfg.count))
    for i, t in enumerate(cases):
        run_case(cfg, t, report)
        if progress is not None:
            progress(i, report)
    return report
