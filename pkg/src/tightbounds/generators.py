"""Random term generators for fuzzing."""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .strategies import DEFAULT_FUEL
from .terms import App, SystemTag, Term, Var, free_vars, lam

FREE_POOL = ("a", "b", "c")


class Generator(enum.Enum):
    ARBITRARY = "arbitrary"
    SIMPLY_TYPED = "simply-typed"


@dataclass(frozen=True)
class FuzzConfig:
    system: SystemTag
    count: int = 100
    seed: int = 0
    max_term_size: int = 12
    fuel: int = 300
    generator: Generator = Generator.ARBITRARY

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.max_term_size < 1:
            raise ValueError("max_term_size must be at least 1")
        if self.fuel < 0 or self.fuel > DEFAULT_FUEL * 100:
            raise ValueError("fuel out of range")


def case_rng(seed: int, index: int) -> random.Random:
    """Independent, reproducible stream for one fuzz case."""
    return random.Random(f"{seed}:{index}")


def close_term(t: Term) -> Term:
    for x in sorted(free_vars(t), reverse=True):
        t = lam(x, t)
    return t


# ---------------------------------------------------------------------------
# untyped


def arbitrary_term(rng: random.Random, max_size: int) -> Term:
    """Random closed term with at most ``max_size`` constructors before closing."""
    size = rng.randint(1, max_size)
    counter = [0]

    def gen(n, scope):
        if n <= 1:
            if scope and rng.random() < 0.8:
                return Var(rng.choice(scope))
            return Var(rng.choice(FREE_POOL))
        if n == 2 or rng.random() < 0.35:
            name = f"x{counter[0]}"
            counter[0] += 1
            return lam(name, gen(n - 1, scope + [name]))
        k = rng.randint(1, n - 2)
        return App(gen(k, scope), gen(n - 1 - k, scope))

    return close_term(gen(size, []))


# ---------------------------------------------------------------------------
# simply typed, over one base type o

O = "o"


def _arrow(a, b):
    return ("->", a, b)


def _random_type(rng, depth):
    if depth <= 0 or rng.random() < 0.55:
        return O
    return _arrow(_random_type(rng, depth - 1), _random_type(rng, depth - 1))


def _targets(ty, goal):
    """Number of arguments to apply a head of type ``ty`` to reach ``goal``, or None."""
    n = 0
    while True:
        if ty == goal:
            return n
        if ty == O:
            return None
        ty = ty[2]
        n += 1


def simply_typed_term(rng: random.Random, max_size: int) -> Term:
    """Closed, simply typable term (hence strongly normalizing) with redexes."""
    counter = [0]
    env0 = [("c", O), ("f", _arrow(O, _arrow(O, O)))]

    def fresh():
        counter[0] += 1
        return f"y{counter[0]}"

    def head(goal, env, budget):
        options = []
        for name, ty in env:
            n = _targets(ty, goal)
            if n is not None:
                options.append((n, name, ty))
        if not options:
            return None
        if budget <= 1:
            least = min(n for n, _, _ in options)
            options = [o for o in options if o[0] == least]
        elif any(n for n, _, _ in options):
            options = [o for o in options if o[0]]
        n, name, ty = rng.choice(options)
        t = Var(name)
        share = max(1, (budget - 1) // max(n, 1))
        for _ in range(n):
            t = App(t, gen(ty[1], env, share))
            ty = ty[2]
        return t

    def gen(goal, env, budget):
        if goal != O and (budget <= 1 or rng.random() < 0.5):
            x = fresh()
            return lam(x, gen(goal[2], env + [(x, goal[1])], budget - 1))
        if budget >= 3 and rng.random() < 0.45:
            sigma = _random_type(rng, 1)
            x = fresh()
            b1 = rng.randint(1, budget - 2)
            fn = lam(x, gen(goal, env + [(x, sigma)], b1))
            return App(fn, gen(sigma, env, budget - 1 - b1))
        t = head(goal, env, budget)
        if t is None:
            x = fresh()
            return lam(x, gen(goal[2], env + [(x, goal[1])], budget - 1))
        return t

    goal = _random_type(rng, 1)
    return close_term(gen(goal, env0, rng.randint(2, max_size)))


def generate_term(cfg: FuzzConfig, rng: random.Random) -> Term:
    if cfg.generator is Generator.SIMPLY_TYPED:
        return simply_typed_term(rng, cfg.max_term_size)
    return arbitrary_term(rng, cfg.max_term_size)


def lo_normal_term(rng: random.Random, max_size: int) -> Term:
    """Random LO normal form: abstractions over a neutral spine with normal arguments."""
    counter = [0]

    def normal(n, scope):
        if n >= 2 and rng.random() < 0.35:
            counter[0] += 1
            name = f"w{counter[0]}"
            return lam(name, normal(n - 1, scope + [name]))
        return neutral(n, scope)

    def neutral(n, scope):
        if n <= 1:
            pool = scope + list(FREE_POOL) if scope else list(FREE_POOL)
            return Var(rng.choice(pool))
        k = rng.randint(1, n - 1)
        return App(neutral(k, scope), normal(n - k, scope))

    return normal(rng.randint(1, max_size), [])
