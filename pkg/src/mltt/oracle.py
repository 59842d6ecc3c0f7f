"""Reference normalizer: substitution-based small-step reduction.

Shares nothing with the evaluator except the term syntax.  One step contracts
the outermost redex, scanning children left to right; ``normalize`` repeats
until no redex is left (full normal form, under binders too).  Constants are
unfolded (delta) and axioms stay put.
"""

from __future__ import annotations

import sys
from typing import Mapping, Optional

from . import syntax as S
from .syntax import Term

ORACLE_FUEL = 10 ** 6


class OracleFuelExhausted(RuntimeError):
    pass


def _contract(t: Term, bodies: Mapping[str, Term]) -> Optional[Term]:
    """Contract ``t`` itself if it is a redex."""
    match t:
        case S.Const(name):
            return bodies.get(name)
        case S.App(S.Lam(body), a):
            return S.subst(body, 0, a)
        case S.SigmaRec(_, g, S.Pair(a, b)):
            return S.App(S.App(g, a), b)
        case S.SumRec(_, l, _, S.Inl(a)):
            return S.App(l, a)
        case S.SumRec(_, _, r, S.Inr(b)):
            return S.App(r, b)
        case S.UnitRec(_, c, S.Star()):
            return c
        case S.BoolRec(_, on_t, _, S.TrueT()):
            return on_t
        case S.BoolRec(_, _, on_f, S.FalseT()):
            return on_f
        case S.NatRec(_, base, _, S.Zero()):
            return base
        case S.NatRec(m, base, step, S.Succ(n)):
            return S.instantiate(step, [n, S.NatRec(m, base, step, n)])
        case S.ListRec(_, on_nil, _, S.Nil()):
            return on_nil
        case S.ListRec(m, on_nil, on_cons, S.Cons(h, tl)):
            return S.instantiate(on_cons, [h, tl, S.ListRec(m, on_nil, on_cons, tl)])
        case S.J(_, _, on_refl, _, S.Refl()):
            return on_refl
        case S.TruncRec(_, _, f, S.TruncIn(a)):
            return S.App(f, a)
    return None


def step(t: Term, bodies: Mapping[str, Term]) -> Optional[Term]:
    """One leftmost-outermost reduction step, or None if ``t`` is normal."""
    r = _contract(t, bodies)
    if r is not None:
        return r
    spec = t._spec
    if not spec:
        return None
    fields = [getattr(t, name) for name, _ in spec]
    for i, (name, k) in enumerate(spec):
        if k is None:
            continue
        r = step(fields[i], bodies)
        if r is not None:
            fields[i] = r
            return type(t)(*fields)
    return None


def bodies_of(decls) -> dict[str, Term]:
    """Definition bodies by name; axioms are left out so they never unfold."""
    return {d.name: d.body for d in decls if not d.is_axiom}


def normalize(t: Term, decls=(), fuel: int = ORACLE_FUEL,
              bodies: Optional[Mapping[str, Term]] = None,
              cache: Optional[dict] = None) -> Term:
    """Reduce to normal form.  ``cache`` (shared across calls with the same
    ``bodies``) remembers the normal form of every term met on the way, so
    reduction sequences that merge are only followed once."""
    if bodies is None:
        bodies = bodies_of(decls)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    trail = []
    try:
        for _ in range(fuel):
            if cache is not None:
                hit = cache.get(t)
                if hit is not None:
                    t = hit
                    break
                trail.append(t)
            nxt = step(t, bodies)
            if nxt is None:
                break
            t = nxt
        else:
            raise OracleFuelExhausted(f"no normal form within {fuel} steps")
    finally:
        sys.setrecursionlimit(limit)
    if cache is not None:
        for u in trail:
            cache[u] = t
    return t
