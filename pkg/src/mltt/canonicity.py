"""Closed-term enumeration and the canonicity scan.

The enumerator is type-directed and bottom-up: for each (context, type) it
lists *productions* (a constructor, its fixed node overhead, and the
(context, type) slots of its children), and memoizes counts and term lists by
size.  The grammar covers, for first-order target types built from Nat, Bool,
Unit, Bottom, sums, non-dependent pairs, lists and arrows:

* introduction forms of the target type,
* variables and constant heads applied to all their arguments,
* the recursors of every type in the working set, with constant motives.

Constants are admitted when their type normalizes to a first-order arrow type.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from . import oracle
from . import syntax as S
from .evaluator import (
    Globals, VNeutral, classify_canonical, evaluate, head_name, quote,
)
from .syntax import Term

DEFAULT_SAMPLES = 10_000
BASE_TYPES = (S.Nat(), S.Bool(), S.Unit())


# ---- first-order types ------------------------------------------------------------------------

def is_simple(ty: Term) -> bool:
    """Closed, non-dependent, built from the base inductives."""
    match ty:
        case S.Nat() | S.Bool() | S.Unit() | S.Bottom():
            return True
        case S.Sum(a, b):
            return is_simple(a) and is_simple(b)
        case S.Sigma(a, b) | S.Pi(a, b):
            return not S.occurs(b, 0) and is_simple(a) and is_simple(S.shift(b, 0, -1))
        case S.List(a):
            return is_simple(a)
    return False


def arrow_parts(ty: Term) -> tuple[list[Term], Term]:
    """``A1 -> .. -> An -> R`` to ``([A1..An], R)``; R is not an arrow."""
    args = []
    while type(ty) is S.Pi:
        args.append(ty.domain)
        ty = S.shift(ty.codomain, 0, -1)
    return args, ty


def components(ty: Term) -> set:
    out = {ty}
    match ty:
        case S.Sum(a, b):
            out |= components(a) | components(b)
        case S.Sigma(a, b) | S.Pi(a, b):
            out |= components(a) | components(S.shift(b, 0, -1))
        case S.List(a):
            out |= components(a)
    return out


def _pair_parts(ty: S.Sigma) -> tuple[Term, Term]:
    return ty.first, S.shift(ty.second, 0, -1)


# ---- productions ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Synth:
    """Slot marker: a term of ``ty`` whose type the kernel can infer, as
    recursor scrutinees must be.  Rules out bare lambdas, pairs, injections
    and empty lists."""
    ty: Term


CHECK_ONLY = frozenset({"lam", "pair", "inl", "inr", "nil"})

@dataclass(frozen=True)
class Production:
    name: str
    build: Callable[..., Term]
    overhead: int
    slots: tuple  # ((ctx, ty), ...)


class Enumerator:
    """Counts, lists and samples closed well-typed terms of first-order types.

    ``constants`` maps a name to its (first-order) type; use
    :meth:`from_globals` to pick them out of checked declarations.
    """

    base_types: tuple = BASE_TYPES

    def __init__(self, constants: Optional[dict[str, Term]] = None,
                 recursors: bool = True, extra_types: Iterable[Term] = ()):
        self.constants = dict(constants or {})
        self.recursors = recursors
        self.extra_types = tuple(extra_types)
        self._count: dict = {}
        self._terms: dict = {}
        self._fill_count: dict = {}
        self._fill_terms: dict = {}
        self._prods: dict = {}
        self._working: dict = {}

    @classmethod
    def from_globals(cls, glob: Optional[Globals], **kw) -> "Enumerator":
        consts = {}
        if glob is not None:
            for d in glob:
                ty = quote(0, glob.type_of(d.name))
                if is_simple(ty):
                    consts[d.name] = ty
        return cls(consts, **kw)

    # the set of types terms may be built at, for a given target
    def working_set(self, target: Term) -> frozenset:
        ws = self._working.get(target)
        if ws is not None:
            return ws
        types = set(components(target)) | set(self.base_types)
        for t in self.extra_types:
            types |= components(t)
        changed = True
        while changed:
            changed = False
            for cty in self.constants.values():
                args, res = arrow_parts(cty)
                if res in types:
                    for a in args:
                        new = components(a) - types
                        if new:
                            types |= new
                            changed = True
        ws = frozenset(types)
        self._working[target] = ws
        return ws

    def productions(self, ctx: tuple, ty: Term, ws: frozenset) -> list[Production]:
        key = (ctx, ty, ws)
        p = self._prods.get(key)
        if p is None:
            p = self._productions(ctx, ty, ws)
            self._prods[key] = p
        return p

    def _productions(self, ctx, ty, ws):
        if type(ty) is Synth:
            out = []
            for p in self.productions(ctx, ty.ty, ws):
                if p.name in CHECK_ONLY:
                    continue
                if p.name == "cons":
                    p = Production("cons", S.Cons, 1, ((ctx, Synth(ty.ty.elem)), (ctx, ty.ty)))
                out.append(p)
            return out
        out: list[Production] = []
        add = out.append
        # introduction forms
        match ty:
            case S.Nat():
                add(Production("zero", lambda: S.Zero(), 1, ()))
                add(Production("succ", S.Succ, 1, ((ctx, ty),)))
            case S.Bool():
                add(Production("true", lambda: S.TrueT(), 1, ()))
                add(Production("false", lambda: S.FalseT(), 1, ()))
            case S.Unit():
                add(Production("star", lambda: S.Star(), 1, ()))
            case S.Sum(a, b):
                add(Production("inl", S.Inl, 1, ((ctx, a),)))
                add(Production("inr", S.Inr, 1, ((ctx, b),)))
            case S.Sigma():
                a, b = _pair_parts(ty)
                add(Production("pair", S.Pair, 1, ((ctx, a), (ctx, b))))
            case S.List(a):
                add(Production("nil", lambda: S.Nil(), 1, ()))
                add(Production("cons", S.Cons, 1, ((ctx, a), (ctx, ty))))
            case S.Pi(a, b):
                add(Production("lam", S.Lam, 1, ((ctx + (a,), S.shift(b, 0, -1)),)))
        # variable and constant heads, fully applied
        n = len(ctx)
        for level, vty in enumerate(ctx):
            args, res = arrow_parts(vty)
            for k in range(len(args) + 1):
                if _rebuild(args[k:], res) == ty and all(x in ws or x == ty for x in args[:k]):
                    idx = n - 1 - level
                    add(_head(f"var{idx}", S.Var(idx), ctx, args[:k]))
        for name, cty in sorted(self.constants.items()):
            args, res = arrow_parts(cty)
            for k in range(len(args) + 1):
                if _rebuild(args[k:], res) == ty and all(x in ws for x in args[:k]):
                    add(_head(name, S.Const(name), ctx, args[:k]))
        # recursors with constant motive ``ty``
        if self.recursors and type(ty) is not S.Pi:
            sz = S.size(ty)
            lam_ty = S.Lam(ty)
            for src in sorted(ws, key=repr):
                match src:
                    case S.Bool():
                        add(Production("rec_Bool", lambda t, f, s: S.BoolRec(ty, t, f, s), 1 + sz,
                                       ((ctx, ty), (ctx, ty), (ctx, src))))
                    case S.Nat():
                        add(Production("rec_N", lambda z, st, s: S.NatRec(ty, z, st, s), 1 + sz,
                                       ((ctx, ty), (ctx + (src, ty), ty), (ctx, src))))
                    case S.Unit():
                        add(Production("rec_Unit", lambda c, s: S.UnitRec(lam_ty, c, s), 2 + sz,
                                       ((ctx, ty), (ctx, Synth(src)))))
                    case S.Bottom():
                        add(Production("rec_Bottom", lambda s: S.BottomRec(lam_ty, s), 2 + sz,
                                       ((ctx, Synth(src)),)))
                    case S.Sum(a, b):
                        add(Production("rec_Sum", lambda l, r, s: S.SumRec(lam_ty, S.Lam(l), S.Lam(r), s),
                                       4 + sz, ((ctx + (a,), ty), (ctx + (b,), ty), (ctx, Synth(src)))))
                    case S.Sigma():
                        a, b = _pair_parts(src)
                        add(Production("rec_Sigma", lambda c, s: S.SigmaRec(lam_ty, S.Lam(S.Lam(c)), s),
                                       4 + sz, ((ctx + (a, b), ty), (ctx, Synth(src)))))
                    case S.List(a):
                        add(Production("rec_List", lambda nl, c, s: S.ListRec(ty, nl, c, s), 1 + sz,
                                       ((ctx, ty), (ctx + (a, src, ty), ty), (ctx, Synth(src)))))
        return out

    # ---- counting -------------------------------------------------------------------------------

    def count(self, ty: Term, size: int, ctx: tuple = ()) -> int:
        return self._count_at(ctx, ty, size, self.working_set(ty))

    def count_upto(self, ty: Term, budget: int) -> int:
        return sum(self.count(ty, n) for n in range(1, budget + 1))

    def _count_at(self, ctx, ty, size, ws) -> int:
        if size <= 0:
            return 0
        key = (ctx, ty, size, ws)
        c = self._count.get(key)
        if c is None:
            c = 0
            self._count[key] = 0  # guards re-entry; sizes strictly decrease so never read
            for p in self.productions(ctx, ty, ws):
                c += self._fill_count_at(p.slots, size - p.overhead, ws)
            self._count[key] = c
        return c

    def _fill_count_at(self, slots, size, ws) -> int:
        if not slots:
            return 1 if size == 0 else 0
        if size < len(slots):
            return 0
        key = (slots, size, ws)
        c = self._fill_count.get(key)
        if c is None:
            (cx, t), rest = slots[0], slots[1:]
            c = 0
            for k in range(1, size - len(rest) + 1):
                head = self._count_at(cx, t, k, ws)
                if head:
                    c += head * self._fill_count_at(rest, size - k, ws)
            self._fill_count[key] = c
        return c

    # ---- listing ----------------------------------------------------------------------------------

    def terms(self, ty: Term, size: int, ctx: tuple = ()) -> list[Term]:
        return self._terms_at(ctx, ty, size, self.working_set(ty))

    def _terms_at(self, ctx, ty, size, ws) -> list:
        if size <= 0 or not self._count_at(ctx, ty, size, ws):
            return []
        key = (ctx, ty, size, ws)
        out = self._terms.get(key)
        if out is None:
            out = []
            for p in self.productions(ctx, ty, ws):
                for args in self._fill_terms_at(p.slots, size - p.overhead, ws):
                    out.append(p.build(*args))
            self._terms[key] = out
        return out

    def _fill_terms_at(self, slots, size, ws) -> list:
        if not slots:
            return [()] if size == 0 else []
        if not self._fill_count_at(slots, size, ws):
            return []
        key = (slots, size, ws)
        out = self._fill_terms.get(key)
        if out is None:
            (cx, t), rest = slots[0], slots[1:]
            out = []
            for k in range(1, size - len(rest) + 1):
                heads = self._terms_at(cx, t, k, ws)
                if not heads:
                    continue
                tails = self._fill_terms_at(rest, size - k, ws)
                for h in heads:
                    for tl in tails:
                        out.append((h,) + tl)
            self._fill_terms[key] = out
        return out

    def enumerate(self, ty: Term, budget: int) -> Iterator[Term]:
        for n in range(1, budget + 1):
            yield from self.terms(ty, n)

    # ---- uniform sampling ----------------------------------------------------------------------------

    def sample(self, ty: Term, size: int, rng: random.Random, ctx: tuple = ()) -> Optional[Term]:
        ws = self.working_set(ty)
        if not self._count_at(ctx, ty, size, ws):
            return None
        return self._sample_at(ctx, ty, size, ws, rng)

    def _sample_at(self, ctx, ty, size, ws, rng) -> Term:
        total = self._count_at(ctx, ty, size, ws)
        r = rng.randrange(total)
        for p in self.productions(ctx, ty, ws):
            c = self._fill_count_at(p.slots, size - p.overhead, ws)
            if r < c:
                return p.build(*self._sample_fill(p.slots, size - p.overhead, ws, rng, r))
            r -= c
        raise AssertionError("sampling fell off the production list")

    def _sample_fill(self, slots, size, ws, rng, r) -> tuple:
        out = []
        while slots:
            (cx, t), rest = slots[0], slots[1:]
            for k in range(1, size - len(rest) + 1):
                c = self._count_at(cx, t, k, ws) * self._fill_count_at(rest, size - k, ws)
                if r < c:
                    break
                r -= c
            else:
                raise AssertionError("sampling fell off the size splits")
            tail = self._fill_count_at(rest, size - k, ws)
            r %= tail
            out.append(self._sample_at(cx, t, k, ws, rng))
            slots, size = rest, size - k
        return tuple(out)


def _rebuild(args: Sequence[Term], res: Term) -> Term:
    for a in reversed(args):
        res = S.arrow(a, res)
    return res


def _head(name, head, ctx, args) -> Production:
    def build(*xs, head=head):
        return S.apps(head, *xs)
    return Production(name, build, 1 + len(args), tuple((ctx, a) for a in args))


def enumerate_closed(ty: Term, budget: int, decls: Optional[Globals | Iterable] = None,
                     **kw) -> Iterator[Term]:
    """All closed terms of ``ty`` up to AST size ``budget`` in the enumeration grammar."""
    if budget < 1:
        raise ValueError("size budget must be at least 1")
    if not is_simple(ty):
        raise ValueError("enumeration targets must be closed first-order types")
    glob = decls if isinstance(decls, Globals) or decls is None else Globals(list(decls))
    return Enumerator.from_globals(glob, **kw).enumerate(ty, budget)


# ---- the scan -----------------------------------------------------------------------------------

@dataclass(frozen=True)
class StuckWitness:
    type: str
    size: int
    head: str
    normal_form: str
    term: str = ""

    def tsv(self) -> str:
        return f"{self.type}\t{self.size}\t{self.head}\t{self.normal_form}"


@dataclass
class TypeTally:
    canonical: int = 0
    stuck: int = 0
    exhaustive: int = 0
    sampled: int = 0


@dataclass
class CanonicityReport:
    mode: str
    budget: int
    seed: Optional[int]
    tallies: dict[str, TypeTally] = field(default_factory=dict)
    witnesses: list[StuckWitness] = field(default_factory=list)
    oracle_checked: int = 0
    oracle_mismatches: list[tuple[str, str, str]] = field(default_factory=list)
    axioms: tuple = ()
    seconds: float = 0.0

    @property
    def population(self) -> int:
        return sum(t.canonical + t.stuck for t in self.tallies.values())

    @property
    def stuck(self) -> int:
        return sum(t.stuck for t in self.tallies.values())

    @property
    def canonical(self) -> int:
        return sum(t.canonical for t in self.tallies.values())

    @property
    def ok(self) -> bool:
        return self.stuck == 0 and not self.oracle_mismatches

    def text(self, max_witnesses: int = 20) -> str:
        lines = [f"canonicity scan: mode={self.mode} budget={self.budget} seed={self.seed}"]
        if self.axioms:
            lines.append(f"axioms in scope: {', '.join(self.axioms)}")
        for name, t in self.tallies.items():
            lines.append(f"  {name}: {t.canonical + t.stuck} terms "
                         f"({t.exhaustive} exhaustive, {t.sampled} sampled), "
                         f"{t.canonical} canonical, {t.stuck} stuck")
        if self.oracle_checked:
            lines.append(f"  small-step oracle: {self.oracle_checked} compared, "
                         f"{len(self.oracle_mismatches)} disagreements")
        lines.append(f"  total: {self.population} terms, {self.stuck} stuck")
        for w in self.witnesses[:max_witnesses]:
            nf = w.normal_form if len(w.normal_form) <= 100 else w.normal_form[:97] + "..."
            lines.append(f"  stuck on {w.head} (size {w.size}): {w.term}  ~>  {nf}")
        if len(self.witnesses) > max_witnesses:
            lines.append(f"  ... {len(self.witnesses) - max_witnesses} more witnesses")
        return "\n".join(lines)

    def records(self) -> list[str]:
        return [w.tsv() for w in self.witnesses]


def _as_globals(decls) -> Globals:
    if decls is None:
        return Globals()
    return decls if isinstance(decls, Globals) else Globals(list(decls))


def scan(ty: Term, budget: int = 12, decls=None, mode: str = "lazy",
         samples: int = 0, sample_max: int = 20, seed: int = 0,
         use_oracle: bool = False, enumerator: Optional[Enumerator] = None,
         report: Optional[CanonicityReport] = None) -> CanonicityReport:
    """Normalize every enumerated term of ``ty`` and classify the result.

    Sizes up to ``budget`` are covered exhaustively; ``samples`` further terms
    are drawn uniformly per size in ``budget+1 .. sample_max``.
    """
    from .parser import pretty_print
    if mode not in ("lazy", "eager"):
        raise ValueError(f"unknown mode {mode!r}")
    glob = _as_globals(decls)
    enum = enumerator or Enumerator.from_globals(glob)
    rep = report or CanonicityReport(mode, budget, seed if samples else None, axioms=tuple(glob.axioms()))
    start = time.perf_counter()
    name = pretty_print(ty)
    tally = rep.tallies.setdefault(name, TypeTally())
    bodies = oracle.bodies_of(glob) if use_oracle else None
    memo: dict = {}

    def visit(t: Term, sampled: bool):
        nf = quote(0, evaluate(t, (), glob))
        cls = classify_canonical(nf, mode, glob)
        if cls.kind == "stuck":
            tally.stuck += 1
            rep.witnesses.append(StuckWitness(name, S.size(t), cls.head, pretty_print(nf), pretty_print(t)))
        else:
            tally.canonical += 1
        if sampled:
            tally.sampled += 1
        else:
            tally.exhaustive += 1
        if use_oracle:
            rep.oracle_checked += 1
            ref = oracle.normalize(t, bodies=bodies, cache=memo)
            if ref != nf:
                rep.oracle_mismatches.append((pretty_print(t), pretty_print(nf), pretty_print(ref)))

    for t in enum.enumerate(ty, budget):
        visit(t, False)
    if samples:
        rng = random.Random(seed)
        sizes = [n for n in range(budget + 1, sample_max + 1) if enum.count(ty, n)]
        for _ in range(samples if sizes else 0):
            t = enum.sample(ty, rng.choice(sizes), rng)
            visit(t, True)
    rep.seconds += time.perf_counter() - start
    return rep


# ---- the univalence witness --------------------------------------------------------------------

WITNESS_NEEDS = ("coe", "ua", "not_equiv")


def stuck_univalence_witness(decls, path: Optional[Term] = None) -> Term:
    """``coe Bool Bool p true`` with ``p`` the univalence path for negation.

    Passing ``path`` replaces the univalence path, e.g. by ``refl Bool``.
    """
    glob = _as_globals(decls)
    missing = [n for n in WITNESS_NEEDS if n not in glob]
    if missing:
        raise KeyError(f"corpus lacks {', '.join(missing)}")
    if path is None:
        if "univ" not in glob:
            raise KeyError("the univalence axiom univ is not loaded")
        path = S.apps(S.Const("ua"), S.Bool(), S.Bool(), S.Const("not_equiv"))
    return S.apps(S.Const("coe"), S.Bool(), S.Bool(), path, S.TrueT())


def neutral_head(t: Term, glob: Globals) -> Optional[str]:
    v = evaluate(t, (), glob)
    return head_name(v) if type(v) is VNeutral else None
