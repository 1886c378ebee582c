"""A deliberately naive reference evaluator on named tuples.

Terms are ('var', x), ('lam', x, body) or ('app', f, a). It has its own parser
and textbook capture-avoiding substitution, and shares no code with the
package, so agreement between the two is meaningful evidence.
"""

import itertools
import re

_TOK = re.compile(r"\s*(\\|λ|\.|\(|\)|[A-Za-z_][A-Za-z0-9_']*)")


def parse(text):
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m:
            raise ValueError(text[pos:])
        toks.append(m.group(1))
        pos = m.end()
    toks.append(None)
    i = 0

    def term():
        nonlocal i
        if toks[i] in ("\\", "λ"):
            x = toks[i + 1]
            assert toks[i + 2] == "."
            i += 3
            return ("lam", x, term())
        t = atom()
        while toks[i] not in (None, ")"):
            t = ("app", t, atom() if toks[i] not in ("\\", "λ") else term())
        return t

    def atom():
        nonlocal i
        tok = toks[i]
        if tok == "(":
            i += 1
            t = term()
            assert toks[i] == ")"
            i += 1
            return t
        if tok in ("\\", "λ"):
            return term()
        i += 1
        return ("var", tok)

    out = term()
    assert toks[i] is None
    return out


def fv(t):
    if t[0] == "var":
        return {t[1]}
    if t[0] == "lam":
        return fv(t[2]) - {t[1]}
    return fv(t[1]) | fv(t[2])


_fresh = itertools.count()


def subst(t, x, u):
    if t[0] == "var":
        return u if t[1] == x else t
    if t[0] == "app":
        return ("app", subst(t[1], x, u), subst(t[2], x, u))
    y, body = t[1], t[2]
    if y == x:
        return t
    if y in fv(u):
        z = f"_v{next(_fresh)}"
        body = subst(body, y, ("var", z))
        y = z
    return ("lam", y, subst(body, x, u))


def hd_step(t):
    if t[0] == "lam":
        r = hd_step(t[2])
        return None if r is None else ("lam", t[1], r)
    if t[0] == "app":
        if t[1][0] == "lam":
            return subst(t[1][2], t[1][1], t[2])
        r = hd_step(t[1])
        return None if r is None else ("app", r, t[2])
    return None


def lo_step(t):
    if t[0] == "lam":
        r = lo_step(t[2])
        return None if r is None else ("lam", t[1], r)
    if t[0] == "app":
        if t[1][0] == "lam":
            return subst(t[1][2], t[1][1], t[2])
        r = lo_step(t[1])
        if r is not None:
            return ("app", r, t[2])
        r = lo_step(t[2])
        return None if r is None else ("app", t[1], r)
    return None


def normalize(step, t, fuel):
    k = 0
    while k < fuel:
        r = step(t)
        if r is None:
            return t, k
        t, k = r, k + 1
    return None, k


def hd_size(t):
    if t[0] == "var":
        return 0
    if t[0] == "lam":
        return hd_size(t[2]) + 1
    return hd_size(t[1]) + 1


def lo_size(t):
    if t[0] == "var":
        return 0
    if t[0] == "lam":
        return lo_size(t[2]) + 1
    return lo_size(t[1]) + lo_size(t[2]) + 1


def debruijn(t, env=()):
    """Nameless form for alpha comparison."""
    if t[0] == "var":
        return ("b", env.index(t[1])) if t[1] in env else ("f", t[1])
    if t[0] == "lam":
        return ("l", debruijn(t[2], (t[1],) + env))
    return ("a", debruijn(t[1], env), debruijn(t[2], env))


def alpha_eq(t, u):
    return debruijn(t) == debruijn(u)


def lo_normal(t):
    return lo_step(t) is None


def mx_step(t):
    """Returns (result, erased size) or None."""
    if t[0] == "lam":
        r = mx_step(t[2])
        return None if r is None else (("lam", t[1], r[0]), r[1])
    if t[0] == "app":
        f, a = t[1], t[2]
        if f[0] == "lam":
            if f[1] in fv(f[2]):
                return subst(f[2], f[1], a), 0
            if lo_normal(a):
                return f[2], lo_size(a)
            r = mx_step(a)
            return ("app", f, r[0]), r[1]
        r = mx_step(f)
        if r is not None:
            return ("app", r[0], a), r[1]
        r = mx_step(a)
        return None if r is None else (("app", f, r[0]), r[1])
    return None


def mx_normalize(t, fuel):
    k = erased = 0
    while k < fuel:
        r = mx_step(t)
        if r is None:
            return t, k, erased
        t, k, erased = r[0], k + 1, erased + r[1]
    return None, k, erased


# linear head evaluation with explicit substitutions ('es', body, x, arg)


def fv_es(t):
    if t[0] == "var":
        return {t[1]}
    if t[0] == "lam":
        return fv_es(t[2]) - {t[1]}
    if t[0] == "es":
        return (fv_es(t[1]) - {t[2]}) | fv_es(t[3])
    return fv_es(t[1]) | fv_es(t[2])


def rename(t, x, y):
    """Rename free x to the fresh name y."""
    if t[0] == "var":
        return ("var", y) if t[1] == x else t
    if t[0] == "app":
        return ("app", rename(t[1], x, y), rename(t[2], x, y))
    if t[0] == "lam":
        return t if t[1] == x else ("lam", t[1], rename(t[2], x, y))
    body = t[1] if t[2] == x else rename(t[1], x, y)
    return ("es", body, t[2], rename(t[3], x, y))


def _freshen(binder, body, avoid):
    if binder not in avoid:
        return binder, body
    z = f"_v{next(_fresh)}"
    return z, rename(body, binder, z)


def _plug_head(t, x, u):
    """If t = H<x> with x free at the hole, replace the hole by u."""
    if t[0] == "var":
        return u if t[1] == x else None
    if t[0] == "app":
        r = _plug_head(t[1], x, u)
        return None if r is None else ("app", r, t[2])
    if t[0] == "lam":
        if t[1] == x:
            return None
        y, body = _freshen(t[1], t[2], fv_es(u))
        r = _plug_head(body, x, u)
        return None if r is None else ("lam", y, r)
    if t[2] == x:
        return None
    y, body = _freshen(t[2], t[1], fv_es(u))
    r = _plug_head(body, x, u)
    return None if r is None else ("es", r, y, t[3])


def _distance_redex(f, a):
    """f = L<\\x.t> applied to a: returns L<t[x := a]> or None."""
    if f[0] == "lam":
        x, body = _freshen(f[1], f[2], fv_es(a))
        return ("es", body, x, a)
    if f[0] == "es":
        y, body = _freshen(f[2], f[1], fv_es(a))
        r = _distance_redex(body, a)
        return None if r is None else ("es", r, y, f[3])
    return None


def lsc_step(t):
    """Returns (result, 'm' or 'e') or None."""
    if t[0] == "app":
        r = _distance_redex(t[1], t[2])
        if r is not None:
            return r, "m"
        r = lsc_step(t[1])
        return None if r is None else (("app", r[0], t[2]), r[1])
    if t[0] == "lam":
        r = lsc_step(t[2])
        return None if r is None else (("lam", t[1], r[0]), r[1])
    if t[0] == "es":
        x, body = _freshen(t[2], t[1], fv_es(t[3]))
        t = ("es", body, x, t[3])
        plugged = _plug_head(t[1], t[2], t[3])
        if plugged is not None:
            return ("es", plugged, t[2], t[3]), "e"
        r = lsc_step(t[1])
        return None if r is None else (("es", r[0], t[2], t[3]), r[1])
    return None


def lsc_normalize(t, fuel):
    km = ke = 0
    while km + ke < fuel:
        r = lsc_step(t)
        if r is None:
            return t, km, ke
        t = r[0]
        if r[1] == "m":
            km += 1
        else:
            ke += 1
    return None, km, ke


def unfold(t):
    if t[0] == "var":
        return t
    if t[0] == "lam":
        return ("lam", t[1], unfold(t[2]))
    if t[0] == "app":
        return ("app", unfold(t[1]), unfold(t[2]))
    return subst(unfold(t[1]), t[2], unfold(t[3]))
