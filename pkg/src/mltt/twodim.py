"""Two-dimensional fragment: equivalence evidence, groupoid normal forms,
finite groupoid semantics and Boolean canonicity.

Equivalence evidence ``alpha : M ~ N : A`` is checked by :class:`TwoDimChecker`,
a kernel checker that also understands ``map``.  Before anything is evaluated,
``map`` is elaborated away: along evidence that reduces to ``refl``, or through
a family that ignores its variable, it is the identity; at sum and product
families it acts componentwise; anything else escapes the fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from . import syntax as S
from .canonicity import Enumerator, Production, Synth, arrow_parts, is_simple
from .evaluator import Globals, env_of, evaluate, quote
from .kernel import Checker, Ctx, TypeCheckError
from .syntax import (
    Declaration, EBase, ECompose, EInv, EMap, EquivDecl, EquivExpr, EResp, ERefl, Term,
)


class FragmentError(TypeCheckError):
    """A term or context falls outside the finite two-dimensional fragment."""

    def __init__(self, message: str, span=None):
        super().__init__("escapes-fragment", message, span)


# ---- endpoints ----------------------------------------------------------------------------

def source(e: EquivExpr) -> Term:
    match e:
        case ERefl(s):
            return s
        case EBase(_, lhs, _):
            return lhs
        case EInv(x):
            return target(x)
        case ECompose(_, e1):
            return source(e1)
        case EResp(fn, x):
            return S.subst(fn, 0, source(x))
    raise TypeError(f"not an equivalence expression: {e!r}")


def target(e: EquivExpr) -> Term:
    match e:
        case ERefl(s):
            return s
        case EBase(_, _, rhs):
            return rhs
        case EInv(x):
            return source(x)
        case ECompose(e2, _):
            return target(e2)
        case EResp(fn, x):
            return S.subst(fn, 0, target(x))
    raise TypeError(f"not an equivalence expression: {e!r}")


def esize(e: EquivExpr) -> int:
    """Size counting constructors only: refl and generators are 1, resp ignores its function."""
    match e:
        case ERefl() | EBase():
            return 1
        case EInv(x) | EResp(_, x):
            return 1 + esize(x)
        case ECompose(e2, e1):
            return 1 + esize(e2) + esize(e1)
    raise TypeError(f"not an equivalence expression: {e!r}")


def _norm(t: Term, glob: Optional[Globals]) -> Term:
    """Normal form of a possibly open term; unchanged if it mentions unknown constants."""
    n = S.free_bound(t)
    try:
        return quote(n, evaluate(t, env_of(n), glob))
    except (KeyError, TypeError):
        return t


# ---- groupoid normal form -------------------------------------------------------------------
# Evidence flattens to a word of letters (atom, inverted) read in order of
# application.  Atoms are generators, possibly under nested resp.  Refl
# contributes the empty word, inverses reverse and flip, resp distributes over
# every letter; adjacent inverse letters cancel.  The result is rebuilt right
# nested, so this computes the normal form of the oriented system
#   refl.d -> d, d.refl -> d, d^-1.d -> refl, d.d^-1 -> refl, (d^-1)^-1 -> d,
#   refl^-1 -> refl, (d2.d1)^-1 -> d1^-1.d2^-1, (a.b).c -> a.(b.c),
#   resp F refl -> refl, resp F d^-1 -> (resp F d)^-1, resp F (b.a) -> resp F b . resp F a
# together with the cancellations d^-1.(d.g) -> g and d.(d^-1.g) -> g that make
# it confluent once composition is right nested.

Letter = tuple[EquivExpr, bool]


def _word(e: EquivExpr, glob, equivs) -> list[Letter]:
    match e:
        case ERefl():
            return []
        case EBase(name):
            d = equivs.get(name) if equivs else None
            if d is not None and d.evidence is not None:
                return _word(d.evidence, glob, equivs)
            return [(e, False)]
        case EInv(x):
            return [(a, not inv) for a, inv in reversed(_word(x, glob, equivs))]
        case ECompose(e2, e1):
            return _word(e1, glob, equivs) + _word(e2, glob, equivs)
        case EResp(fn, x):
            f = _norm(fn, glob)
            return [(EResp(f, a), inv) for a, inv in _word(x, glob, equivs)]
    raise TypeError(f"not an equivalence expression: {e!r}")


def _free_reduce(letters: Iterable[Letter]) -> list[Letter]:
    out: list[Letter] = []
    for a, inv in letters:
        if out and out[-1] == (a, not inv):
            out.pop()
        else:
            out.append((a, inv))
    return out


def _build(letters: Sequence[Letter]) -> EquivExpr:
    acc: Optional[EquivExpr] = None
    for a, inv in letters:
        x = EInv(a) if inv else a
        acc = x if acc is None else ECompose(x, acc)
    assert acc is not None
    return acc


def reduce_equiv(e: EquivExpr, glob: Optional[Globals] = None,
                 equivs: Optional[Mapping[str, EquivDecl]] = None) -> EquivExpr:
    """Groupoid normal form.  With ``equivs``, judged names unfold to their evidence."""
    letters = _free_reduce(_word(e, glob, equivs))
    if not letters:
        return ERefl(_norm(source(e), glob))
    return _build(letters)


def equiv_word(e: EquivExpr, glob: Optional[Globals] = None,
               equivs: Optional[Mapping[str, EquivDecl]] = None) -> tuple[Letter, ...]:
    return tuple(_free_reduce(_word(e, glob, equivs)))


# ---- elaboration of map ------------------------------------------------------------------------

def _transport(fam: Term, e: EquivExpr, subj: Term, glob) -> Term:
    """``map fam e subj`` for evidence ``e`` that does not reduce to refl."""
    if not S.occurs(fam, 0):
        return subj
    match fam:
        case S.Sum(b1, b2):
            match _norm(subj, glob):
                case S.Inl(x):
                    return S.Inl(_transport(b1, e, x, glob))
                case S.Inr(y):
                    return S.Inr(_transport(b2, e, y, glob))
        case S.Sigma(b1, b2) if not S.occurs(b2, 0):
            match _norm(subj, glob):
                case S.Pair(x, y):
                    return S.Pair(_transport(b1, e, x, glob),
                                  _transport(S.shift(b2, 0, -1), e, y, glob))
    raise FragmentError("map along non-trivial evidence is only defined componentwise "
                        "on sum and product families over canonical subjects")


def elaborate(t: Term, glob: Optional[Globals] = None,
              equivs: Optional[Mapping[str, EquivDecl]] = None) -> Term:
    """Remove every ``map`` from ``t``."""
    if not has_map(t):
        return t
    if type(t) is EMap:
        subj = elaborate(t.subject, glob, equivs)
        fam = elaborate(t.family, glob, equivs)
        if not S.occurs(fam, 0):
            return subj
        r = reduce_equiv(t.e, glob, equivs)
        if type(r) is ERefl:
            return subj
        return _transport(_norm(fam, glob), r, subj, glob)
    return S.map_children(t, lambda u, _k: elaborate(u, glob, equivs) if isinstance(u, Term) else u)


@lru_cache(maxsize=1 << 16)
def has_map(t: S.Node) -> bool:
    if type(t) is EMap:
        return True
    return any(has_map(u) for u, _ in S.children(t))


# ---- checking ------------------------------------------------------------------------------------

@dataclass
class TwoDimChecker(Checker):
    equivs: dict = field(default_factory=dict)

    def evaluate(self, t: Term, env: tuple):
        if has_map(t):
            t = elaborate(t, self.glob, self.equivs)
        return evaluate(t, env, self.glob)

    def infer(self, ctx: Ctx, t: Term):
        if type(t) is not EMap:
            return super().infer(ctx, t)
        a = self.equiv_type(ctx, t.e)
        lhs, rhs = self.endpoints(ctx, t.e, a)
        self.check_type(ctx.bind(a), t.family)
        env = ctx.env
        self.check(ctx, t.subject, self.evaluate(t.family, env + (lhs,)))
        return self.evaluate(t.family, env + (rhs,))

    def decl_of(self, name: str) -> Optional[EquivDecl]:
        return self.equivs.get(name)

    def generator(self, name: str) -> EquivDecl:
        d = self.decl_of(name)
        if d is None:
            self.fail("unbound", f"unknown equivalence {name}")
        return d

    def equiv_type(self, ctx: Ctx, e: EquivExpr):
        """The type both endpoints of ``e`` live in, when it can be read off."""
        match e:
            case ERefl(s):
                return self.infer(ctx, s)
            case EBase(name, _, _):
                return self.eval(ctx, self.generator(name).ty)
            case EInv(x):
                return self.equiv_type(ctx, x)
            case ECompose(e2, e1):
                try:
                    return self.equiv_type(ctx, e1)
                except TypeCheckError as err:
                    if err.code != "cannot-infer":
                        raise
                    return self.equiv_type(ctx, e2)
            case EResp(fn, x):
                a = self.equiv_type(ctx, x)
                b = self.infer(ctx.bind(a), fn)
                if S.occurs(quote(ctx.depth + 1, b), 0):
                    self.fail("mismatch", "the type of a resp function must not depend on its argument")
                return b
        raise TypeError(f"not an equivalence expression: {e!r}")

    def endpoints(self, ctx: Ctx, e: EquivExpr, a):
        """Check ``e`` as evidence at type ``a`` and return its endpoint values."""
        match e:
            case ERefl(s):
                self.check(ctx, s, a)
                v = self.eval(ctx, s)
                return v, v
            case EBase(name, lhs, rhs):
                d = self.generator(name)
                self.expect_type(ctx, a, self.eval(ctx, d.ty), f"generator {name}")
                for given, declared in ((lhs, d.lhs), (rhs, d.rhs)):
                    if not self.conv(ctx, a, self.eval(ctx, given), self.eval(ctx, declared)):
                        from .parser import pretty_print
                        self.fail("mismatch", f"{name} is declared as {pretty_print(d.lhs)} ~ "
                                  f"{pretty_print(d.rhs)}, not {pretty_print(lhs)} ~ {pretty_print(rhs)}")
                return self.eval(ctx, lhs), self.eval(ctx, rhs)
            case EInv(x):
                lhs, rhs = self.endpoints(ctx, x, a)
                return rhs, lhs
            case ECompose(e2, e1):
                lhs, m1 = self.endpoints(ctx, e1, a)
                m2, rhs = self.endpoints(ctx, e2, a)
                if not self.conv(ctx, a, m1, m2):
                    self.fail("mismatch", f"composition endpoints do not meet: {self.show(ctx, m1)} "
                              f"vs {self.show(ctx, m2)}")
                return lhs, rhs
            case EResp(fn, x):
                dom = self.equiv_type(ctx, x)
                lhs, rhs = self.endpoints(ctx, x, dom)
                self.check(ctx.bind(dom), fn, a)
                env = ctx.env
                return self.evaluate(fn, env + (lhs,)), self.evaluate(fn, env + (rhs,))
        raise TypeError(f"not an equivalence expression: {e!r}")

    def check_equiv(self, ctx: Ctx, e: EquivExpr, m, n, a) -> None:
        lhs, rhs = self.endpoints(ctx, e, a)
        for want, got, side in ((m, lhs, "source"), (n, rhs, "target")):
            if not self.conv(ctx, a, want, got):
                self.fail("mismatch", f"endpoint mismatch at the {side}: expected "
                          f"{self.show(ctx, want)}, evidence gives {self.show(ctx, got)}")


def _checker(glob, equivs, eta=True, max_universe=None) -> TwoDimChecker:
    return TwoDimChecker(glob if glob is not None else Globals(), eta, max_universe,
                         equivs=dict(equivs or {}))


def _ctx(chk: Checker, ctx: S.Context) -> Ctx:
    c = Ctx()
    for entry in ctx:
        chk.check_type(c, entry)
        c = c.bind(chk.eval(c, entry))
    return c


def check_equiv(ctx: S.Context, e: EquivExpr, m: Term, n: Term, a: Term,
                glob: Optional[Globals] = None,
                equivs: Optional[Mapping[str, EquivDecl]] = None, **kw) -> None:
    """``ctx |- e : m ~ n : a``; raises :class:`TypeCheckError` on failure."""
    chk = _checker(glob, equivs, **kw)
    c = _ctx(chk, ctx)
    chk.check_type(c, a)
    av = chk.eval(c, a)
    chk.check(c, m, av)
    chk.check(c, n, av)
    chk.check_equiv(c, e, chk.eval(c, m), chk.eval(c, n), av)


def infer_equiv(ctx: S.Context, e: EquivExpr, glob: Optional[Globals] = None,
                equivs: Optional[Mapping[str, EquivDecl]] = None, **kw) -> tuple[Term, Term, Term]:
    """Check ``e`` and return its normalized ``(source, target, type)``."""
    chk = _checker(glob, equivs, **kw)
    c = _ctx(chk, ctx)
    a = chk.equiv_type(c, e)
    lhs, rhs = chk.endpoints(c, e, a)
    d = c.depth
    return quote(d, lhs), quote(d, rhs), quote(d, a)


@dataclass(frozen=True)
class EquivJudgement:
    ctx: tuple
    lhs: Term
    rhs: Term
    ty: Term
    evidence: EquivExpr

    def check(self, glob: Optional[Globals] = None,
              equivs: Optional[Mapping[str, EquivDecl]] = None, **kw) -> None:
        check_equiv(self.ctx, self.evidence, self.lhs, self.rhs, self.ty, glob, equivs, **kw)


# ---- the fragment ---------------------------------------------------------------------------------

def is_fragment_type(ty: Term) -> bool:
    """Closed types built from Bool and Unit by sums and non-dependent pairs."""
    match ty:
        case S.Bool() | S.Unit():
            return True
        case S.Sum(a, b):
            return is_fragment_type(a) and is_fragment_type(b)
        case S.Sigma(a, b):
            return not S.occurs(b, 0) and is_fragment_type(a) and is_fragment_type(S.shift(b, 0, -1))
    return False


def _fragment_signature(ty: Term) -> bool:
    """Fragment types and first-order functions between them."""
    args, res = arrow_parts(ty)
    return all(is_fragment_type(a) for a in args) and is_fragment_type(res)


_FOREIGN = (S.Nat, S.Zero, S.Succ, S.NatRec, S.List, S.Nil, S.Cons, S.ListRec,
            S.Id, S.Refl, S.J, S.Trunc, S.TruncIn, S.TruncRec, S.Bottom, S.BottomRec)


def fragment_violation(t: S.Node, glob: Optional[Globals] = None,
                       _seen: Optional[set] = None) -> Optional[str]:
    """Why ``t`` falls outside the fragment, or None if it does not."""
    seen = set() if _seen is None else _seen
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, _FOREIGN):
            return f"{type(u).__name__} is outside the fragment"
        if type(u) is S.Universe and u.level > 0:
            return "only U0 may appear in the fragment"
        if type(u) is S.Const and u.name not in seen:
            seen.add(u.name)
            d = glob.get(u.name) if glob is not None else None
            if d is None:
                return f"unknown constant {u.name}"
            if d.is_axiom:
                return f"axiom {u.name} is outside the fragment"
            why = fragment_violation(d.body, glob, seen)
            if why:
                return f"{u.name}: {why}"
        stack.extend(c for c, _ in S.children(u))
    return None


def canonical_values(ty: Term) -> list[Term]:
    """Every closed canonical inhabitant of a fragment type."""
    match ty:
        case S.Bool():
            return [S.TrueT(), S.FalseT()]
        case S.Unit():
            return [S.Star()]
        case S.Sum(a, b):
            return [S.Inl(x) for x in canonical_values(a)] + [S.Inr(y) for y in canonical_values(b)]
        case S.Sigma(a, b) if not S.occurs(b, 0):
            rest = canonical_values(S.shift(b, 0, -1))
            return [S.Pair(x, y) for x in canonical_values(a) for y in rest]
    raise FragmentError(f"not a fragment type: {ty!r}")


def bool_canonicity(m: Term, glob: Optional[Globals | Iterable[Declaration]] = None,
                    equivs: Optional[Mapping[str, EquivDecl]] = None, eta: bool = True) -> bool:
    """Check ``m : Bool`` in the fragment and return which canonical boolean it computes to."""
    if glob is not None and not isinstance(glob, Globals):
        glob = Globals(list(glob))
    why = fragment_violation(m, glob)
    if why:
        raise FragmentError(why)
    chk = _checker(glob, equivs, eta)
    chk.check(Ctx(), m, chk.eval(Ctx(), S.Bool()))
    nf = quote(0, chk.evaluate(m, ()))
    match nf:
        case S.TrueT():
            return True
        case S.FalseT():
            return False
    raise FragmentError(f"closed boolean did not compute to a canonical form: {nf!r}")


# ---- groupoid semantics ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Arrow:
    src: int
    dst: int
    evidence: tuple  # one reduced EquivExpr per context entry


@dataclass
class PresentedGroupoid:
    """A finite presentation: objects are tuples of canonical values (one per
    context entry), arrows are tuples of reduced evidence.  ``closed`` is False
    when generators with loops make the hom-sets infinite; the tables then hold
    the words up to the length bound only."""

    names: tuple
    objects: list
    arrows: list
    identity: list
    inverse: list
    compose: dict
    closed: bool = True
    _index: dict = field(default_factory=dict, repr=False)
    _obj_index: dict = field(default_factory=dict, repr=False)
    _glob: Optional[Globals] = field(default=None, repr=False)
    _equivs: Optional[dict] = field(default=None, repr=False)

    def hom(self, i: int, j: int) -> list[int]:
        return [k for k, a in enumerate(self.arrows) if a.src == i and a.dst == j]

    def object_of(self, values: Sequence[Term]) -> int:
        key = tuple(_norm(v, self._glob) for v in values)
        return self._obj_index[key]

    def morphism_of(self, evidence: EquivExpr | Sequence[EquivExpr]) -> int:
        """Index of the arrow that ``evidence`` (one expression per entry) denotes."""
        if isinstance(evidence, EquivExpr):
            evidence = (evidence,)
        key = tuple(reduce_equiv(e, self._glob, self._equivs) for e in evidence)
        return self._index[key]

    def check_laws(self) -> list[str]:
        """Violations of the category and groupoid laws on the tables (empty if none)."""
        bad = []
        comp = self.compose
        for f, a in enumerate(self.arrows):
            if comp.get((self.identity[a.dst], f)) != f or comp.get((f, self.identity[a.src])) != f:
                bad.append(f"identity law fails at arrow {f}")
            g = self.inverse[f]
            if comp.get((g, f)) != self.identity[a.src] or comp.get((f, g)) != self.identity[a.dst]:
                bad.append(f"inverse law fails at arrow {f}")
        by_src: dict = {}
        for k, a in enumerate(self.arrows):
            by_src.setdefault(a.src, []).append(k)
        for (g, f), gf in comp.items():
            for h in by_src.get(self.arrows[g].dst, []):
                hg = comp.get((h, g))
                left = comp.get((h, gf))
                right = None if hg is None else comp.get((hg, f))
                if left is not None and right is not None and left != right:
                    bad.append(f"associativity fails at {h}.{g}.{f}")
        return bad

    def dump(self) -> str:
        from .parser import pretty_print
        lines = [f"objects {len(self.objects)}"]
        for i, obj in enumerate(self.objects):
            parts = ", ".join(f"{n} = {pretty_print(v)}" for n, v in zip(self.names, obj))
            lines.append(f"  o{i}: ({parts})")
        lines.append(f"morphisms {len(self.arrows)}")
        for k, a in enumerate(self.arrows):
            ev = ", ".join(pretty_print(e) for e in a.evidence)
            lines.append(f"  m{k}: o{a.src} -> o{a.dst} = ({ev})")
        lines.append(f"closed {'yes' if self.closed else 'no (hom-sets truncated)'}")
        return "\n".join(lines)


@dataclass
class _Component:
    """The free groupoid on the generators at one fragment type."""
    values: list
    arrows: list  # (src, dst, word)
    closed: bool


def _component(ty: Term, gens: Sequence[EquivDecl], glob, max_length: int) -> _Component:
    values = canonical_values(ty)
    pos = {v: i for i, v in enumerate(values)}
    letters = []
    for d in gens:
        a = EBase(d.name, d.lhs, d.rhs)
        s, t = pos[_norm(d.lhs, glob)], pos[_norm(d.rhs, glob)]
        letters.append(((a, False), s, t))
        letters.append(((a, True), t, s))
    arrows = []
    closed = True
    for start in range(len(values)):
        frontier = [((), start)]
        arrows.append((start, start, ()))
        for length in range(1, max_length + 2):
            nxt = []
            for word, end in frontier:
                for (a, inv), s, t in letters:
                    if s != end or (word and word[-1] == (a, not inv)):
                        continue
                    nxt.append((word + ((a, inv),), t))
            if length > max_length:
                closed = closed and not nxt
                break
            arrows.extend((start, end, w) for w, end in nxt)
            frontier = nxt
    return _Component(values, arrows, closed)


def _evidence(word, value) -> EquivExpr:
    return _build(word) if word else ERefl(value)


def interp(ctx: S.Context, glob: Optional[Globals] = None,
           generators: Iterable[EquivDecl] = (), max_length: int = 4,
           names: Optional[Sequence[str]] = None) -> PresentedGroupoid:
    """Interpret a context of fragment types as a presented groupoid.

    Morphisms at each entry are generated by the generators declared at that
    entry's type; the context's groupoid is their product.
    """
    gens = [d for d in generators if d.is_generator]
    comps = []
    for i, entry in enumerate(ctx):
        if S.occurs(entry, 0) or not S.is_closed(entry):
            raise FragmentError(f"context entry {i} depends on earlier entries")
        ty = _norm(entry, glob)
        if not is_fragment_type(ty):
            raise FragmentError(f"context entry {i} is not a fragment type")
        at = [d for d in gens if _norm(d.ty, glob) == ty]
        comps.append(_component(ty, at, glob, max_length))

    # objects and arrows of the product, in lexicographic order
    objects: list[tuple] = [()]
    arrows: list[tuple] = [((), (), ())]  # (src idx tuple, dst idx tuple, words)
    for c in comps:
        objects = [o + (v,) for o in objects for v in range(len(c.values))]
    obj_index = {o: i for i, o in enumerate(objects)}
    for c in comps:
        arrows = [(s + (cs,), d + (cd,), w + (cw,)) for s, d, w in arrows for cs, cd, cw in c.arrows]
    arrow_index = {(s, w): k for k, (s, _, w) in enumerate(arrows)}

    values = [tuple(c.values[i] for c, i in zip(comps, o)) for o in objects]
    out_arrows = []
    index = {}
    for k, (s, d, w) in enumerate(arrows):
        ev = tuple(_evidence(wi, c.values[si]) for wi, c, si in zip(w, comps, s))
        out_arrows.append(Arrow(obj_index[s], obj_index[d], ev))
        index[ev] = k
    identity = [arrow_index[(o, tuple(() for _ in o))] for o in objects]
    inverse = []
    for s, d, w in arrows:
        inv = tuple(tuple((a, not i) for a, i in reversed(wi)) for wi in w)
        inverse.append(arrow_index[(d, inv)])
    compose = {}
    by_src: dict = {}
    for k, (s, _, _) in enumerate(arrows):
        by_src.setdefault(s, []).append(k)
    for f, (s, d, wf) in enumerate(arrows):
        for g in by_src.get(d, []):
            wg = arrows[g][2]
            w = tuple(tuple(_free_reduce(a + b)) for a, b in zip(wf, wg))
            h = arrow_index.get((s, w))
            if h is not None:
                compose[(g, f)] = h
    closed = all(c.closed for c in comps)
    return PresentedGroupoid(
        names=tuple(names) if names else tuple(f"x{i}" for i in range(len(ctx))),
        objects=values, arrows=out_arrows, identity=identity, inverse=inverse,
        compose=compose, closed=closed, _index=index,
        _obj_index={v: i for i, v in enumerate(values)}, _glob=glob, _equivs=None)


# ---- enumeration of fragment terms --------------------------------------------------------------------

_CATALOG = (
    ERefl(S.TrueT()),
    EInv(ERefl(S.FalseT())),
    ECompose(ERefl(S.TrueT()), ERefl(S.TrueT())),
    EResp(S.BoolRec(S.Bool(), S.FalseT(), S.TrueT(), S.Var(0)), ERefl(S.FalseT())),
)


class FragmentEnumerator(Enumerator):
    """Closed fragment terms: the base grammar without naturals, plus ``map``
    along a small catalog of closed Boolean evidence, through constant and
    case-split families."""

    base_types = (S.Bool(), S.Unit())

    def __init__(self, constants=None, recursors: bool = True,
                 extra_types=(S.Sum(S.Unit(), S.Bool()), S.product(S.Bool(), S.Unit())),
                 catalog: Sequence[EquivExpr] = _CATALOG):
        super().__init__(constants, recursors, extra_types)
        self.catalog = tuple(catalog)

    @classmethod
    def from_globals(cls, glob: Optional[Globals], **kw) -> "FragmentEnumerator":
        consts = {}
        if glob is not None:
            for d in glob:
                if d.is_axiom or fragment_violation(S.Const(d.name), glob):
                    continue
                ty = quote(0, glob.type_of(d.name))
                if is_simple(ty) and _fragment_signature(ty):
                    consts[d.name] = ty
        return cls(consts, **kw)

    def _productions(self, ctx, ty, ws):
        out = super()._productions(ctx, ty, ws)
        if type(ty) in (S.Pi, Synth):
            return out
        families = (ty, S.BoolRec(S.Universe(0), ty, ty, S.Var(0)))
        for fam in families:
            for e in self.catalog:
                out.append(Production("map", lambda s, fam=fam, e=e: EMap(fam, e, s),
                                      1 + S.size(fam) + S.size(e), ((ctx, ty),)))
        return out


# ---- fragment files ------------------------------------------------------------------------------------

@dataclass
class FragmentResult:
    kind: str  # def | axiom | equiv | judge
    name: str
    detail: str = ""

    def line(self) -> str:
        return f"OK {self.kind} {self.name}" + (f" : {self.detail}" if self.detail else "")


@dataclass
class FragmentSession:
    """Checks a sequence of declarations and equivalence declarations in order."""

    glob: Globals = field(default_factory=Globals)
    equivs: dict = field(default_factory=dict)
    eta: bool = True
    allow_axioms: bool = False
    max_universe: Optional[int] = None

    def checker(self, span=None) -> TwoDimChecker:
        return TwoDimChecker(self.glob, self.eta, self.max_universe, span, equivs=self.equivs)

    def add(self, item: Declaration | EquivDecl) -> FragmentResult:
        from .parser import pretty_print
        try:
            if item.name in self.glob or item.name in self.equivs:
                raise TypeCheckError("duplicate", f"{item.name} is already declared", item.span)
            chk = self.checker(item.span)
            if isinstance(item, Declaration):
                if item.is_axiom and not self.allow_axioms:
                    raise TypeCheckError("axiom-forbidden",
                                         f"axiom {item.name} requires --allow-axioms", item.span)
                chk.check_type(Ctx(), item.type)
                if item.body is None:
                    self.glob.add(item)
                    return FragmentResult("axiom", item.name)
                chk.check(Ctx(), item.body, chk.eval(Ctx(), item.type))
                body = elaborate(item.body, self.glob, self.equivs)
                self.glob.add(Declaration(item.name, item.type, body, False, item.span))
                return FragmentResult("def", item.name)
            chk.check_type(Ctx(), item.ty)
            a = chk.eval(Ctx(), item.ty)
            chk.check(Ctx(), item.lhs, a)
            chk.check(Ctx(), item.rhs, a)
            head = f"{pretty_print(item.lhs)} ~ {pretty_print(item.rhs)} : {pretty_print(item.ty)}"
            if item.is_generator:
                self.equivs[item.name] = item
                return FragmentResult("equiv", item.name, head)
            chk.check_equiv(Ctx(), item.evidence, chk.eval(Ctx(), item.lhs),
                            chk.eval(Ctx(), item.rhs), a)
            self.equivs[item.name] = item
            nf = reduce_equiv(item.evidence, self.glob, self.equivs)
            return FragmentResult("judge", item.name, f"{head} by {pretty_print(nf)}")
        except TypeCheckError as e:
            e.decl = e.decl or item.name
            if e.span is None:
                e.span = item.span
            raise

    def generators(self) -> list[EquivDecl]:
        return [d for d in self.equivs.values() if d.is_generator]

    def groupoid(self, ctx: S.Context, **kw) -> PresentedGroupoid:
        g = interp(ctx, self.glob, self.generators(), **kw)
        g._equivs = self.equivs
        return g
