"""Reference for the groupoid normal form: unordered rewriting to a fixpoint.

Every rule is tried at every position and every reachable expression is
explored, so the result does not depend on a strategy.  The rules are the
oriented groupoid laws on syntax; refl subjects in the final form are
normalized with the small-step reducer.
"""

from __future__ import annotations

import random
from collections import deque

from mltt import oracle
from mltt import syntax as S
from mltt.syntax import EBase, ECompose, EInv, EResp, ERefl


def src(e):
    match e:
        case ERefl(s):
            return s
        case EBase(_, l, _):
            return l
        case EInv(x):
            return tgt(x)
        case ECompose(_, e1):
            return src(e1)
        case EResp(f, x):
            return S.subst(f, 0, src(x))


def tgt(e):
    match e:
        case ERefl(s):
            return s
        case EBase(_, _, r):
            return r
        case EInv(x):
            return src(x)
        case ECompose(e2, _):
            return tgt(e2)
        case EResp(f, x):
            return S.subst(f, 0, tgt(x))


def root_rewrites(e):
    out = []
    match e:
        case ECompose(ERefl(), d):
            out.append(d)
    match e:
        case ECompose(d, ERefl()):
            out.append(d)
    match e:
        case ECompose(EInv(d), d2) if d == d2:
            out.append(ERefl(src(d)))
    match e:
        case ECompose(d, EInv(d2)) if d == d2:
            out.append(ERefl(tgt(d)))
    match e:
        case ECompose(EInv(d), ECompose(d2, g)) if d == d2:
            out.append(g)
    match e:
        case ECompose(d, ECompose(EInv(d2), g)) if d == d2:
            out.append(g)
    match e:
        case ECompose(ECompose(a, b), c):
            out.append(ECompose(a, ECompose(b, c)))
    match e:
        case EInv(EInv(d)):
            out.append(d)
        case EInv(ERefl(s)):
            out.append(ERefl(s))
        case EInv(ECompose(d2, d1)):
            out.append(ECompose(EInv(d1), EInv(d2)))
        case EResp(f, ERefl(s)):
            out.append(ERefl(S.subst(f, 0, s)))
        case EResp(f, EInv(d)):
            out.append(EInv(EResp(f, d)))
        case EResp(f, ECompose(b, a)):
            out.append(ECompose(EResp(f, b), EResp(f, a)))
    return out


def one_step(e):
    """All expressions reachable from ``e`` in one rewrite anywhere."""
    out = list(root_rewrites(e))
    match e:
        case EInv(x):
            out += [EInv(y) for y in one_step(x)]
        case ECompose(e2, e1):
            out += [ECompose(y, e1) for y in one_step(e2)]
            out += [ECompose(e2, y) for y in one_step(e1)]
        case EResp(f, x):
            out += [EResp(f, y) for y in one_step(x)]
    return out


def _finish(e):
    if type(e) is ERefl:
        return ERefl(oracle.normalize(e.subject))
    return e


class TooManyStates(RuntimeError):
    pass


def normal_forms(e, limit: int = 200_000) -> set:
    """The irreducible expressions reachable from ``e``."""
    seen = {e}
    todo = deque([e])
    found = set()
    while todo:
        x = todo.popleft()
        nxt = one_step(x)
        if not nxt:
            found.add(_finish(x))
        for y in nxt:
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise TooManyStates(len(seen))
                todo.append(y)
    return found


def size(e) -> int:
    match e:
        case ERefl() | EBase():
            return 1
        case EInv(x) | EResp(_, x):
            return 1 + size(x)
        case ECompose(a, b):
            return 1 + size(a) + size(b)


def random_order_normal_form(e, rng: random.Random):
    """Rewrite at a randomly chosen redex until none is left."""
    while True:
        nxt = one_step(e)
        if not nxt:
            return _finish(e)
        e = rng.choice(nxt)


def rewrite_normal_form(e, rng: random.Random | None = None, explore_upto: int = 8, tries: int = 3):
    """The unique normal form of ``e``.  Small expressions are explored in
    every rewrite order; larger ones follow several random orders, which must agree."""
    if size(e) <= explore_upto:
        nfs = normal_forms(e)
    else:
        rng = rng or random.Random(0)
        nfs = {random_order_normal_form(e, rng) for _ in range(tries)}
    if len(nfs) != 1:
        raise AssertionError(f"rewriting is not confluent here: {nfs}")
    return next(iter(nfs))


# ---- well-formed random expressions over Boolean generators ---------------------------------

T, F = S.TrueT(), S.FalseT()
GENERATORS = (EBase("p", T, F), EBase("q", F, F), EBase("r", T, T))
NOT = S.BoolRec(S.Bool(), F, T, S.Var(0))
FUNCTIONS = (S.Var(0), NOT, T)  # identity, negation, constant true
_APPLY = {S.Var(0): {T: T, F: F}, NOT: {T: F, F: T}, T: {T: T, F: T}}


def _atoms_from(s, gens):
    return [ERefl(s)] + [g for g in gens if g.lhs == s]


def _atoms_to(t, gens):
    return [ERefl(t)] + [g for g in gens if g.rhs == t]


def gen_from(rng, n, s, gens=GENERATORS, fns=FUNCTIONS):
    """A well-formed expression of size ``n`` starting at ``s``; returns (expr, end)."""
    if n == 1:
        a = rng.choice(_atoms_from(s, gens))
        return a, tgt(a)
    options = ["inv"]
    if n >= 3:
        options.append("compose")
    pre = [(f, v) for f in fns for v in (T, F) if _APPLY[f][v] == s]
    if pre:
        options.append("resp")
    match rng.choice(options):
        case "inv":
            x, start = gen_to(rng, n - 1, s, gens, fns)
            return EInv(x), start
        case "compose":
            k = rng.randint(1, n - 2)
            e1, m = gen_from(rng, k, s, gens, fns)
            e2, t = gen_from(rng, n - 1 - k, m, gens, fns)
            return ECompose(e2, e1), t
        case "resp":
            f, v = rng.choice(pre)
            x, end = gen_from(rng, n - 1, v, gens, fns)
            return EResp(f, x), _APPLY[f][end]


def gen_to(rng, n, t, gens=GENERATORS, fns=FUNCTIONS):
    """A well-formed expression of size ``n`` ending at ``t``; returns (expr, start)."""
    if n == 1:
        a = rng.choice(_atoms_to(t, gens))
        return a, src(a)
    options = ["inv"]
    if n >= 3:
        options.append("compose")
    pre = [(f, v) for f in fns for v in (T, F) if _APPLY[f][v] == t]
    if pre:
        options.append("resp")
    match rng.choice(options):
        case "inv":
            x, end = gen_from(rng, n - 1, t, gens, fns)
            return EInv(x), end
        case "compose":
            k = rng.randint(1, n - 2)
            e2, m = gen_to(rng, k, t, gens, fns)
            e1, s = gen_to(rng, n - 1 - k, m, gens, fns)
            return ECompose(e2, e1), s
        case "resp":
            f, v = rng.choice(pre)
            x, start = gen_to(rng, n - 1, v, gens, fns)
            return EResp(f, x), _APPLY[f][start]


def random_expr(rng, max_size=20, gens=GENERATORS, fns=FUNCTIONS):
    n = rng.randint(1, max_size)
    return gen_from(rng, n, rng.choice((T, F)), gens, fns)[0]


def all_exprs(max_size, gens=GENERATORS, fns=()):
    """Every well-formed expression up to ``max_size``, keyed by (size, source, target)."""
    table = {}
    vals = (T, F)
    for s in vals:
        for t in vals:
            table[1, s, t] = [a for a in _atoms_from(s, gens) if tgt(a) == t]
    for n in range(2, max_size + 1):
        for s in vals:
            for t in vals:
                out = [EInv(x) for x in table[n - 1, t, s]]
                for f in fns:
                    for a in vals:
                        for b in vals:
                            if _APPLY[f][a] == s and _APPLY[f][b] == t:
                                out += [EResp(f, x) for x in table[n - 1, a, b]]
                for k in range(1, n - 1):
                    for m in vals:
                        right = table[n - 1 - k, m, t]
                        out += [ECompose(e2, e1) for e1 in table[k, s, m] for e2 in right]
                table[n, s, t] = out
    return table
