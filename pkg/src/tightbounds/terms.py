"""Lambda terms with explicit substitutions.

Binding is nameless: a bound occurrence is a :class:`Bound` de Bruijn index and
free variables are :class:`Var` names.  Binder names are kept only as hints for
printing and never take part in equality, so ``==`` on terms is
alpha-equivalence.  Public helpers (:func:`parse`, :func:`lam`, :func:`esub`,
:func:`render`) speak named syntax.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Union


class SystemTag(enum.Enum):
    HD = "hd"
    LO = "lo"
    MX = "mx"
    LSC = "lsc"

    @classmethod
    def parse(cls, text: "str | SystemTag") -> "SystemTag":
        if isinstance(text, SystemTag):
            return text
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown system {text!r}; expected one of hd, lo, mx, lsc") from None

    def __str__(self):
        return self.value


class NonPureTerm(ValueError):
    """Raised when a term with explicit substitutions reaches a pure-only system."""


class ParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Bound:
    index: int


@dataclass(frozen=True, slots=True)
class Lam:
    binder: str = field(compare=False)
    body: "Term"


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    arg: "Term"


@dataclass(frozen=True, slots=True)
class ESub:
    body: "Term"
    binder: str = field(compare=False)
    arg: "Term"


Term = Union[Var, Bound, Lam, App, ESub]


# ---------------------------------------------------------------------------
# index plumbing


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Add ``d`` to every index of ``t`` that is loose above ``cutoff``."""
    if d == 0:
        return t
    if isinstance(t, Bound):
        return Bound(t.index + d) if t.index >= cutoff else t
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.binder, shift(t.body, d, cutoff + 1))
    if isinstance(t, App):
        return App(shift(t.fn, d, cutoff), shift(t.arg, d, cutoff))
    return ESub(shift(t.body, d, cutoff + 1), t.binder, shift(t.arg, d, cutoff))


def instantiate(body: Term, u: Term) -> Term:
    """Replace index 0 of ``body`` (a binder body) by ``u``, removing the binder."""

    def go(t, depth):
        if isinstance(t, Bound):
            if t.index == depth:
                return shift(u, depth)
            return Bound(t.index - 1) if t.index > depth else t
        if isinstance(t, Var):
            return t
        if isinstance(t, Lam):
            return Lam(t.binder, go(t.body, depth + 1))
        if isinstance(t, App):
            return App(go(t.fn, depth), go(t.arg, depth))
        return ESub(go(t.body, depth + 1), t.binder, go(t.arg, depth))

    return go(body, 0)


def open_binder(body: Term, name: str) -> Term:
    return instantiate(body, Var(name))


def close(t: Term, name: str) -> Term:
    """Abstract the free name ``name``: the result is a binder body."""

    def go(t, depth):
        if isinstance(t, Var):
            return Bound(depth) if t.name == name else t
        if isinstance(t, Bound):
            return Bound(t.index + 1) if t.index >= depth else t
        if isinstance(t, Lam):
            return Lam(t.binder, go(t.body, depth + 1))
        if isinstance(t, App):
            return App(go(t.fn, depth), go(t.arg, depth))
        return ESub(go(t.body, depth + 1), t.binder, go(t.arg, depth))

    return go(t, 0)


def lam(name: str, body: Term) -> Lam:
    return Lam(name, close(body, name))


def esub(body: Term, name: str, arg: Term) -> ESub:
    return ESub(close(body, name), name, arg)


def app(*terms: Term) -> Term:
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


def uses_index(t: Term, j: int = 0) -> bool:
    """Whether the loose index ``j`` occurs in ``t``."""
    if isinstance(t, Bound):
        return t.index == j
    if isinstance(t, Var):
        return False
    if isinstance(t, Lam):
        return uses_index(t.body, j + 1)
    if isinstance(t, App):
        return uses_index(t.fn, j) or uses_index(t.arg, j)
    return uses_index(t.body, j + 1) or uses_index(t.arg, j)


def loose_indices(t: Term, depth: int = 0) -> set[int]:
    if isinstance(t, Bound):
        return {t.index - depth} if t.index >= depth else set()
    if isinstance(t, Var):
        return set()
    if isinstance(t, Lam):
        return loose_indices(t.body, depth + 1)
    if isinstance(t, App):
        return loose_indices(t.fn, depth) | loose_indices(t.arg, depth)
    return loose_indices(t.body, depth + 1) | loose_indices(t.arg, depth)


# ---------------------------------------------------------------------------
# named operations


def free_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            out.add(t.name)
        elif isinstance(t, Lam):
            stack.append(t.body)
        elif isinstance(t, App):
            stack.append(t.fn)
            stack.append(t.arg)
        elif isinstance(t, ESub):
            stack.append(t.body)
            stack.append(t.arg)
    return out


def substitute(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding ``t{x := u}``."""

    def go(t, depth):
        if isinstance(t, Var):
            return shift(u, depth) if t.name == x else t
        if isinstance(t, Bound):
            return t
        if isinstance(t, Lam):
            return Lam(t.binder, go(t.body, depth + 1))
        if isinstance(t, App):
            return App(go(t.fn, depth), go(t.arg, depth))
        return ESub(go(t.body, depth + 1), t.binder, go(t.arg, depth))

    return go(t, 0)


def fresh_name(hint: str, avoid) -> str:
    name = hint
    while name in avoid:
        name += "'"
    return name


def binder_name(t: Lam | ESub, avoid=()) -> str:
    """Name under which the binder of ``t`` is opened: its hint, primed until fresh."""
    if isinstance(t, Lam):
        used = free_vars(t)
    else:
        used = free_vars(t.body)
    if avoid:
        used = used | set(avoid)
    return fresh_name(t.binder, used)


def is_pure(t: Term) -> bool:
    if isinstance(t, ESub):
        return False
    if isinstance(t, Lam):
        return is_pure(t.body)
    if isinstance(t, App):
        return is_pure(t.fn) and is_pure(t.arg)
    return True


def require_pure(t: Term, system: SystemTag) -> None:
    if not is_pure(t):
        raise NonPureTerm(f"system {system} only accepts terms without explicit substitutions")


def unfold(t: Term) -> Term:
    """Turn every explicit substitution into a meta-level one."""
    if isinstance(t, (Var, Bound)):
        return t
    if isinstance(t, Lam):
        return Lam(t.binder, unfold(t.body))
    if isinstance(t, App):
        return App(unfold(t.fn), unfold(t.arg))
    return instantiate(unfold(t.body), unfold(t.arg))


def term_size(t: Term) -> int:
    """Constructor count, used to bound generators and report fuzz cases."""
    if isinstance(t, (Var, Bound)):
        return 1
    if isinstance(t, Lam):
        return 1 + term_size(t.body)
    if isinstance(t, App):
        return 1 + term_size(t.fn) + term_size(t.arg)
    return 1 + term_size(t.body) + term_size(t.arg)


def subterm(t: Term, path) -> Term:
    for i in path:
        if isinstance(t, Lam) and i == 0:
            t = t.body
        elif isinstance(t, App):
            t = t.fn if i == 0 else t.arg
        elif isinstance(t, ESub):
            t = t.body if i == 0 else t.arg
        else:
            raise IndexError(f"path {list(path)} leaves the term")
    return t


# ---------------------------------------------------------------------------
# sizes and predicates


def size(system: SystemTag, t: Term) -> int:
    system = SystemTag.parse(system)
    if system is SystemTag.LSC:
        return _lsc_size(t)
    require_pure(t, system)
    if system is SystemTag.HD:
        return _hd_size(t)
    return _lo_size(t)


def _hd_size(t):
    n = 0
    while True:
        if isinstance(t, Lam):
            n += 1
            t = t.body
        elif isinstance(t, App):
            n += 1
            t = t.fn
        else:
            return n


def _lo_size(t):
    if isinstance(t, Lam):
        return _lo_size(t.body) + 1
    if isinstance(t, App):
        return _lo_size(t.fn) + _lo_size(t.arg) + 1
    return 0


def _lsc_size(t):
    n = 0
    while True:
        if isinstance(t, (Lam, App)):
            n += 1
            t = t.body if isinstance(t, Lam) else t.fn
        elif isinstance(t, ESub):
            t = t.body
        else:
            return n + 1


@dataclass(frozen=True)
class Classification:
    normal: bool
    neutral: bool
    abs: bool


def is_abs(system: SystemTag, t: Term) -> bool:
    if system is SystemTag.LSC:
        while isinstance(t, ESub):
            t = t.body
    return isinstance(t, Lam)


def _hd_neutral(t):
    while isinstance(t, App):
        t = t.fn
    return isinstance(t, (Var, Bound))


def _hd_normal(t):
    while isinstance(t, Lam):
        t = t.body
    return _hd_neutral(t)


def _lo_neutral(t):
    while isinstance(t, App):
        if not _lo_normal(t.arg):
            return False
        t = t.fn
    return isinstance(t, (Var, Bound))


def _lo_normal(t):
    while isinstance(t, Lam):
        t = t.body
    return _lo_neutral(t)


# LSC head variables are reported relative to the term: ("free", name) or
# ("bound", loose index).  None means the predicate fails.


def _down(head):
    kind, v = head
    return head if kind == "free" else (kind, v - 1)


def lsc_neutral_head(t: Term):
    """Head variable x such that t is linear-head neutral with head x."""
    if isinstance(t, Var):
        return ("free", t.name)
    if isinstance(t, Bound):
        return ("bound", t.index)
    if isinstance(t, App):
        return lsc_neutral_head(t.fn)
    if isinstance(t, ESub):
        h = lsc_neutral_head(t.body)
        if h is None or h == ("bound", 0):
            return None
        return _down(h)
    return None


def lsc_normal_head(t: Term):
    """Head variable x such that t is linear-head normal with free head x."""
    h = lsc_neutral_head(t)
    if h is not None:
        return h
    if isinstance(t, (Lam, ESub)):
        h = lsc_normal_head(t.body)
        if h is None or h == ("bound", 0):
            return None
        return _down(h)
    return None


def lsc_normal_closed(t: Term) -> bool:
    """Normal form whose head variable is bound inside the term."""
    if isinstance(t, Lam):
        return lsc_normal_head(t.body) == ("bound", 0) or lsc_normal_closed(t.body)
    if isinstance(t, ESub):
        return lsc_normal_closed(t.body)
    return False


def classify(system: SystemTag, t: Term) -> Classification:
    system = SystemTag.parse(system)
    if system is SystemTag.LSC:
        neutral = lsc_neutral_head(t) is not None
        normal = neutral or lsc_normal_head(t) is not None or lsc_normal_closed(t)
        return Classification(normal, neutral, is_abs(system, t))
    require_pure(t, system)
    if system is SystemTag.HD:
        neutral = _hd_neutral(t)
        normal = _hd_normal(t)
    else:
        neutral = _lo_neutral(t)
        normal = _lo_normal(t)
    return Classification(normal, neutral, isinstance(t, Lam))


def is_normal(system: SystemTag, t: Term) -> bool:
    return classify(system, t).normal


def is_neutral(system: SystemTag, t: Term) -> bool:
    return classify(system, t).neutral


# ---------------------------------------------------------------------------
# surface syntax

_TOKEN = re.compile(
    r"""(?P<ws>\s+)
      | (?P<assign>:=)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<punct>[\\λ.()\[\]])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append((kind if kind != "punct" else value, value, line, col))
        for ch in value:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, kind):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind!r} but found {what!r}", tok[2], tok[3])
        self.i += 1
        return tok[1]

    def term(self):
        if self.peek() in ("\\", "λ"):
            return self.abstraction()
        return self.application()

    def abstraction(self):
        self.i += 1
        names = [self.take("ident")]
        while self.peek() == "ident":
            names.append(self.take("ident"))
        self.take(".")
        body = self.term()
        for name in reversed(names):
            body = ("lam", name, body)
        return body

    def application(self):
        out = self.atom()
        while self.peek() in ("ident", "(", "\\", "λ"):
            if self.peek() in ("\\", "λ"):
                return ("app", out, self.abstraction())
            out = ("app", out, self.atom())
        return out

    def atom(self):
        if self.peek() == "(":
            self.i += 1
            out = self.term()
            self.take(")")
        else:
            out = ("var", self.take("ident"))
        while self.peek() == "[":
            self.i += 1
            name = self.take("ident")
            self.take("assign")
            arg = self.term()
            self.take("]")
            out = ("es", out, name, arg)
        return out


def _from_ast(node, env):
    kind = node[0]
    if kind == "var":
        name = node[1]
        for depth, bound in enumerate(reversed(env)):
            if bound == name:
                return Bound(depth)
        return Var(name)
    if kind == "lam":
        return Lam(node[1], _from_ast(node[2], env + [node[1]]))
    if kind == "app":
        return App(_from_ast(node[1], env), _from_ast(node[2], env))
    return ESub(_from_ast(node[1], env + [node[2]]), node[2], _from_ast(node[3], env))


def parse(text: str) -> Term:
    p = _Parser(text)
    ast = p.term()
    tok = p.tokens[p.i]
    if tok[0] != "eof":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
    return _from_ast(ast, [])


def render(t: Term) -> str:
    return _render(t, [], "top")


def _pick(t, env):
    used = free_vars(t) | {env[-1 - i] for i in loose_indices(t) if i < len(env)}
    return fresh_name(t.binder, used)


def _render(t, env, ctx):
    # ctx: "top" (anything), "fn" (left of application), "atom" (argument / ES body)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Bound):
        if t.index >= len(env):
            raise ValueError(f"loose index {t.index} cannot be rendered")
        return env[-1 - t.index]
    if isinstance(t, Lam):
        name = _pick(t, env)
        s = f"\\{name}. {_render(t.body, env + [name], 'top')}"
        return s if ctx == "top" else f"({s})"
    if isinstance(t, App):
        s = f"{_render(t.fn, env, 'fn')} {_render(t.arg, env, 'atom')}"
        return f"({s})" if ctx == "atom" else s
    name = fresh_name(t.binder, free_vars(t.body) | {env[-i] for i in loose_indices(t.body) if 0 < i <= len(env)})
    return f"{_render(t.body, env + [name], 'atom')}[{name} := {_render(t.arg, env, 'top')}]"


def alpha_equal(t: Term, u: Term) -> bool:
    return t == u


IDENTITY = Lam("z", Bound(0))
OMEGA = App(Lam("x", App(Bound(0), Bound(0))), Lam("x", App(Bound(0), Bound(0))))
