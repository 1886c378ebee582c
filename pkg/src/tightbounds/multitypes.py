"""Multi types: tight constants, atoms, arrows with multiset domains, contexts."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union


@dataclass(frozen=True, slots=True)
class Atom:
    id: int

    def __str__(self):
        return f"a{self.id}"


@dataclass(frozen=True, slots=True)
class TightNeutral:
    def __str__(self):
        return "N"


@dataclass(frozen=True, slots=True)
class TightAbs:
    def __str__(self):
        return "A"


NEUTRAL = TightNeutral()
ABS = TightAbs()


class MultiSet:
    """Finite multiset of types, stored as a tuple sorted by :func:`type_key`."""

    __slots__ = ("items", "_hash")

    def __init__(self, items: Iterable["Type"] = ()):
        self.items = tuple(sorted(items, key=type_key))
        self._hash = None

    def __eq__(self, other):
        return isinstance(other, MultiSet) and self.items == other.items

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.items)
        return self._hash

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)

    def __add__(self, other: "MultiSet") -> "MultiSet":
        return MultiSet(self.items + other.items)

    def remove(self, tau: "Type") -> "MultiSet":
        items = list(self.items)
        items.remove(tau)
        return MultiSet(items)

    def __repr__(self):
        return f"MultiSet({list(self.items)!r})"

    def __str__(self):
        return "[" + ", ".join(str(t) for t in self.items) + "]"


@dataclass(frozen=True, slots=True)
class Arrow:
    domain: MultiSet
    codomain: "Type"

    def __str__(self):
        return f"{self.domain} -> {self.codomain}"


Type = Union[Atom, TightNeutral, TightAbs, Arrow]
MultiType = Union[Type, MultiSet]


def type_key(t: Type):
    if isinstance(t, TightNeutral):
        return (0,)
    if isinstance(t, TightAbs):
        return (1,)
    if isinstance(t, Atom):
        return (2, t.id)
    return (3, tuple(type_key(s) for s in t.domain.items), type_key(t.codomain))


EMPTY = MultiSet()


def multiset(*types: Type) -> MultiSet:
    return MultiSet(types)


class Context:
    """Finite-support map from variable names to non-empty multisets."""

    __slots__ = ("_map",)

    def __init__(self, entries=None):
        if isinstance(entries, dict):
            entries = entries.items()
        self._map = {x: m if isinstance(m, MultiSet) else MultiSet(m) for x, m in (entries or ()) if m}

    def __getitem__(self, x: str) -> MultiSet:
        return self._map.get(x, EMPTY)

    def domain(self) -> set[str]:
        return set(self._map)

    def items(self):
        return sorted(self._map.items())

    def union(self, other: "Context") -> "Context":
        out = Context()
        out._map = dict(self._map)
        for x, m in other._map.items():
            out._map[x] = out._map[x] + m if x in out._map else m
        return out

    __or__ = union

    def restrict(self, x: str) -> "Context":
        if x not in self._map:
            return self
        out = Context()
        out._map = {y: m for y, m in self._map.items() if y != x}
        return out

    def __eq__(self, other):
        return isinstance(other, Context) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __bool__(self):
        return bool(self._map)

    def __repr__(self):
        return f"Context({dict(self.items())!r})"

    def __str__(self):
        return "; ".join(f"{x} : {m}" for x, m in self.items())


EMPTY_CONTEXT = Context()


def ctx_union(g: Context, d: Context) -> Context:
    return g.union(d)


def ctx_restrict(g: Context, x: str) -> Context:
    return g.restrict(x)


def is_tight(entity) -> bool:
    if isinstance(entity, (TightNeutral, TightAbs)):
        return True
    if isinstance(entity, (Atom, Arrow)):
        return False
    if isinstance(entity, MultiSet):
        return all(is_tight(t) for t in entity)
    if isinstance(entity, Context):
        return all(is_tight(m) for _, m in entity.items())
    raise TypeError(f"not a type, multiset or context: {entity!r}")


def type_size(entity) -> int:
    if isinstance(entity, (TightNeutral, TightAbs, Atom)):
        return 0
    if isinstance(entity, Arrow):
        return type_size(entity.domain) + type_size(entity.codomain) + 1
    if isinstance(entity, MultiSet):
        return sum(type_size(t) for t in entity)
    if isinstance(entity, Context):
        return sum(type_size(m) for _, m in entity.items())
    raise TypeError(f"not a type, multiset or context: {entity!r}")


def mentions_tight(entity) -> bool:
    """Whether a tight constant occurs anywhere inside ``entity``."""
    if isinstance(entity, (TightNeutral, TightAbs)):
        return True
    if isinstance(entity, Atom):
        return False
    if isinstance(entity, Arrow):
        return mentions_tight(entity.domain) or mentions_tight(entity.codomain)
    if isinstance(entity, MultiSet):
        return any(mentions_tight(t) for t in entity)
    return any(mentions_tight(m) for _, m in entity.items())


def atoms(entity) -> set[int]:
    if isinstance(entity, Atom):
        return {entity.id}
    if isinstance(entity, Arrow):
        return atoms(entity.domain) | atoms(entity.codomain)
    if isinstance(entity, MultiSet):
        return set().union(*(atoms(t) for t in entity)) if entity else set()
    if isinstance(entity, Context):
        return set().union(*(atoms(m) for _, m in entity.items())) if entity else set()
    return set()


# ---------------------------------------------------------------------------
# polarities


class Polarity(enum.Enum):
    POS = "+"
    NEG = "-"

    def __mul__(self, other: "Polarity") -> "Polarity":
        return Polarity.POS if self is other else Polarity.NEG

    def flip(self) -> "Polarity":
        return Polarity.NEG if self is Polarity.POS else Polarity.POS


POS = Polarity.POS
NEG = Polarity.NEG


def occurs(target: MultiType, p: Polarity, container) -> bool:
    """Whether ``target`` is an occurrence of polarity ``p`` in ``container``."""
    if isinstance(container, Context):
        return any(occurs(target, p, m) for _, m in container.items())
    if isinstance(container, MultiSet):
        if p is POS and target == container:
            return True
        return any(occurs(target, p, t) for t in container)
    if p is POS and target == container:
        return True
    if isinstance(container, Arrow):
        return occurs(target, p.flip(), container.domain) or occurs(target, p, container.codomain)
    return False


def occurrences(container, p: Polarity = POS) -> Iterator[tuple[MultiType, Polarity]]:
    """Enumerate every (multi)type occurring in ``container`` with its polarity."""
    if isinstance(container, Context):
        for _, m in container.items():
            yield from occurrences(m, p)
        return
    yield container, p
    if isinstance(container, MultiSet):
        for t in container:
            yield from occurrences(t, p)
    elif isinstance(container, Arrow):
        yield from occurrences(container.domain, p.flip())
        yield from occurrences(container.codomain, p)


# ---------------------------------------------------------------------------
# surface syntax

_TYPE_TOKEN = re.compile(r"\s*(->|[\[\](),;:]|[A-Za-z_][A-Za-z0-9_']*)")


class TypeSyntaxError(ValueError):
    pass


def _type_tokens(text):
    pos, out = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TYPE_TOKEN.match(text, pos)
        if m is None:
            raise TypeSyntaxError(f"unexpected character {text[pos]!r} at offset {pos} in {text!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


class _TypeParser:
    def __init__(self, text):
        self.toks = _type_tokens(text)
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, tok=None):
        got = self.peek()
        if got is None or (tok is not None and got != tok):
            raise TypeSyntaxError(f"expected {tok or 'a token'} but found {got!r} in {self.text!r}")
        self.i += 1
        return got

    def done(self):
        if self.peek() is not None:
            raise TypeSyntaxError(f"trailing input {self.peek()!r} in {self.text!r}")

    def type(self):
        if self.peek() == "[":
            dom = self.multiset()
            self.take("->")
            return Arrow(dom, self.type())
        if self.peek() == "(":
            self.take("(")
            if self.peek() == "[":
                inner = self.multiset()
                if self.peek() == ")":
                    raise TypeSyntaxError(f"a multiset is not a type in {self.text!r}")
                self.take("->")
                inner = Arrow(inner, self.type())
            else:
                inner = self.type()
            self.take(")")
            return inner
        tok = self.take()
        if tok == "N":
            return NEUTRAL
        if tok == "A":
            return ABS
        if re.fullmatch(r"a\d+", tok):
            return Atom(int(tok[1:]))
        raise TypeSyntaxError(f"unknown type {tok!r} in {self.text!r}")

    def multiset(self):
        self.take("[")
        items = []
        if self.peek() != "]":
            items.append(self.type())
            while self.peek() == ",":
                self.take(",")
                items.append(self.type())
        self.take("]")
        return MultiSet(items)


def parse_type(text: str) -> Type:
    p = _TypeParser(text)
    out = p.type()
    p.done()
    return out


def parse_multiset(text: str) -> MultiSet:
    p = _TypeParser(text)
    out = p.multiset()
    p.done()
    return out


def parse_multitype(text: str) -> MultiType:
    """A type, or a multiset when the text is a bracket not followed by an arrow."""
    p = _TypeParser(text)
    if p.peek() == "[":
        dom = p.multiset()
        if p.peek() is None:
            return dom
        p.take("->")
        out = Arrow(dom, p.type())
    else:
        out = p.type()
    p.done()
    return out


def parse_context(text: str) -> Context:
    text = text.strip()
    if text in ("", "{}"):
        return Context()
    entries: dict[str, MultiSet] = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        name, _, rest = part.partition(":")
        name = name.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", name) or not rest:
            raise TypeSyntaxError(f"bad context entry {part!r}")
        m = parse_multiset(rest)
        entries[name] = entries[name] + m if name in entries else m
    return Context(entries)
