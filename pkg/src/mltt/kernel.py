"""Bidirectional type checking: introductions check, eliminations infer.

Types are handled as values internally; the public functions take and return
terms.  Universes are Russell-style and non-cumulative: ``U i : U (i+1)`` and
a type in ``U 0`` is not silently a type in ``U 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import syntax as S
from .evaluator import (
    Conversion, FuelExhausted, Globals, Value,
    VBool, VBottom, VFalse, VId, VInl, VInr, VList, VNat, VPi, VRefl,
    VSigma, VStar, VSucc, VSum, VTrue, VTrunc, VTruncIn, VUnit, VUniverse, VZero, VNil, VCons,
    evaluate, quote, sigma_curried_type, sum_branch_type, trunc_witness_type, vapp, vvar,
)
from .syntax import Declaration, Span, Term

DEFAULT_FUEL = 10 ** 7


class TypeCheckError(Exception):
    """A failed judgement.  ``code`` is one of mismatch, unbound, not-a-function,
    not-a-type, cannot-infer, universe-violation, axiom-forbidden, duplicate,
    bad-scrutinee."""

    def __init__(self, code: str, message: str, span: Optional[Span] = None,
                 expected: Optional[Term] = None, actual: Optional[Term] = None,
                 decl: Optional[str] = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span
        self.expected = expected
        self.actual = actual
        self.decl = decl

    def __str__(self):
        where = f"{self.decl}: " if self.decl else ""
        return f"{where}{self.message}"


@dataclass(frozen=True)
class Ctx:
    types: tuple = ()
    names: tuple = ()

    def bind(self, ty: Value, name: Optional[str] = None) -> "Ctx":
        return Ctx(self.types + (ty,), self.names + (name or f"x{len(self.types)}",))

    @property
    def depth(self) -> int:
        return len(self.types)

    @property
    def env(self) -> tuple:
        return tuple(vvar(i) for i in range(len(self.types)))


@dataclass
class Checker:
    glob: Globals = field(default_factory=Globals)
    eta: bool = True
    max_universe: Optional[int] = None
    span: Optional[Span] = None

    # ---- helpers ------------------------------------------------------------------

    def evaluate(self, t: Term, env: tuple) -> Value:
        return evaluate(t, env, self.glob)

    def eval(self, ctx: Ctx, t: Term) -> Value:
        return self.evaluate(t, ctx.env)

    def show(self, ctx: Ctx, v: Value) -> str:
        from .parser import pretty_print
        return pretty_print(quote(ctx.depth, v), names=ctx.names)

    def fail(self, code, msg, expected=None, actual=None, ctx=None):
        exp = quote(ctx.depth, expected) if expected is not None and ctx else None
        act = quote(ctx.depth, actual) if actual is not None and ctx else None
        raise TypeCheckError(code, msg, self.span, exp, act)

    def conv(self, ctx: Ctx, ty: Value, a: Value, b: Value) -> bool:
        return Conversion(self.glob, self.eta).equal(ctx.types, ty, a, b)

    def conv_types(self, ctx: Ctx, a: Value, b: Value) -> bool:
        return Conversion(self.glob, self.eta).equal_types(ctx.types, a, b)

    def expect_type(self, ctx: Ctx, expected: Value, actual: Value, what: str = "term"):
        if not self.conv_types(ctx, expected, actual):
            self.fail("mismatch",
                      f"type mismatch for {what}: expected {self.show(ctx, expected)}, "
                      f"got {self.show(ctx, actual)}", expected, actual, ctx)

    def level(self, i: int) -> VUniverse:
        if self.max_universe is not None and i > self.max_universe:
            raise TypeCheckError("universe-violation",
                                 f"universe level {i} exceeds the maximum {self.max_universe}", self.span)
        return VUniverse(i)

    # ---- types ----------------------------------------------------------------------

    def check_type(self, ctx: Ctx, t: Term) -> int:
        """Check that ``t`` is a type and return its universe level."""
        ty = self.infer(ctx, t)
        if type(ty) is not VUniverse:
            self.fail("not-a-type", f"expected a type, got a term of type {self.show(ctx, ty)}",
                      actual=ty, ctx=ctx)
        return ty.level

    def check_family(self, ctx: Ctx, motive: Term, dom: Value) -> None:
        """``motive`` must be a type family over ``dom`` (a function into some universe)."""
        if type(motive) is S.Lam:
            self.check_type(ctx.bind(dom), motive.body)
            return
        ty = self.infer(ctx, motive)
        if type(ty) is not VPi:
            self.fail("not-a-function", f"motive must be a type family, got type {self.show(ctx, ty)}",
                      actual=ty, ctx=ctx)
        self.expect_type(ctx, dom, ty.dom, "motive domain")
        if type(ty.cod(vvar(ctx.depth))) is not VUniverse:
            self.fail("not-a-type", "motive must return a type")

    def scrutinee(self, ctx: Ctx, t: Term, kind, what: str) -> Value:
        ty = self.infer(ctx, t)
        if type(ty) is not kind:
            self.fail("bad-scrutinee", f"{what} expects a scrutinee of a {what[4:]} type, "
                      f"got {self.show(ctx, ty)}", actual=ty, ctx=ctx)
        return ty

    # ---- inference ----------------------------------------------------------------------

    def infer(self, ctx: Ctx, t: Term) -> Value:
        g = self.glob
        if g.fuel is not None:
            g.steps += 1
            if g.steps > g.fuel:
                raise FuelExhausted(f"exceeded {g.fuel} kernel steps")
        match t:
            case S.Var(i):
                if not 0 <= i < ctx.depth:
                    self.fail("unbound", f"variable index {i} is out of scope")
                return ctx.types[ctx.depth - 1 - i]
            case S.Const(name):
                if name not in g:
                    self.fail("unbound", f"unknown constant {name}")
                return g.type_of(name)
            case S.Universe(i):
                self.level(i)
                return self.level(i + 1)
            case S.Pi(a, b) | S.Sigma(a, b):
                i = self.check_type(ctx, a)
                j = self.check_type(ctx.bind(self.eval(ctx, a)), b)
                return self.level(max(i, j))
            case S.Sum(a, b):
                return self.level(max(self.check_type(ctx, a), self.check_type(ctx, b)))
            case S.Unit() | S.Bottom() | S.Bool() | S.Nat():
                return VUniverse(0)
            case S.List(a) | S.Trunc(a):
                return self.level(self.check_type(ctx, a))
            case S.Id(a, x, y):
                i = self.check_type(ctx, a)
                av = self.eval(ctx, a)
                self.check(ctx, x, av)
                self.check(ctx, y, av)
                return self.level(i)
            case S.Star():
                return VUnit()
            case S.TrueT() | S.FalseT():
                return VBool()
            case S.Zero():
                return VNat()
            case S.Succ(n):
                self.check(ctx, n, VNat())
                return VNat()
            case S.Cons(h, tl):
                ht = self.infer(ctx, h)
                lt = VList(ht)
                self.check(ctx, tl, lt)
                return lt
            case S.Refl(a):
                aty = self.infer(ctx, a)
                av = self.eval(ctx, a)
                return VId(aty, av, av)
            case S.TruncIn(a):
                return VTrunc(self.infer(ctx, a))
            case S.App(f, a):
                fty = self.infer(ctx, f)
                if type(fty) is not VPi:
                    self.fail("not-a-function",
                              f"cannot apply a term of type {self.show(ctx, fty)}", actual=fty, ctx=ctx)
                self.check(ctx, a, fty.dom)
                return fty.cod(self.eval(ctx, a))
            case S.SigmaRec(motive, curried, scrut):
                sty = self.scrutinee(ctx, scrut, VSigma, "rec_Sigma")
                self.check_family(ctx, motive, sty)
                mv = self.eval(ctx, motive)
                self.check(ctx, curried, sigma_curried_type(sty, mv))
                return vapp(mv, self.eval(ctx, scrut))
            case S.SumRec(motive, l, r, scrut):
                sty = self.scrutinee(ctx, scrut, VSum, "rec_Sum")
                self.check_family(ctx, motive, sty)
                mv = self.eval(ctx, motive)
                self.check(ctx, l, sum_branch_type(sty.left, VInl, mv))
                self.check(ctx, r, sum_branch_type(sty.right, VInr, mv))
                return vapp(mv, self.eval(ctx, scrut))
            case S.UnitRec(motive, c, scrut):
                self.scrutinee(ctx, scrut, VUnit, "rec_Unit")
                self.check_family(ctx, motive, VUnit())
                mv = self.eval(ctx, motive)
                self.check(ctx, c, vapp(mv, VStar()))
                return vapp(mv, self.eval(ctx, scrut))
            case S.BottomRec(motive, scrut):
                self.scrutinee(ctx, scrut, VBottom, "rec_Bottom")
                self.check_family(ctx, motive, VBottom())
                return vapp(self.eval(ctx, motive), self.eval(ctx, scrut))
            case S.BoolRec(motive, on_t, on_f, scrut):
                self.check(ctx, scrut, VBool())
                self.check_type(ctx.bind(VBool()), motive)
                env = ctx.env
                m = lambda v: self.evaluate(motive, env + (v,))
                self.check(ctx, on_t, m(VTrue()))
                self.check(ctx, on_f, m(VFalse()))
                return m(self.eval(ctx, scrut))
            case S.NatRec(motive, base, step, scrut):
                self.check(ctx, scrut, VNat())
                self.check_type(ctx.bind(VNat()), motive)
                env = ctx.env
                m = lambda v: self.evaluate(motive, env + (v,))
                self.check(ctx, base, m(VZero()))
                n = vvar(ctx.depth)
                self.check(ctx.bind(VNat()).bind(m(n)), step, m(VSucc(n)))
                return m(self.eval(ctx, scrut))
            case S.ListRec(motive, on_nil, on_cons, scrut):
                lty = self.scrutinee(ctx, scrut, VList, "rec_List")
                self.check_type(ctx.bind(lty), motive)
                env = ctx.env
                m = lambda v: self.evaluate(motive, env + (v,))
                self.check(ctx, on_nil, m(VNil()))
                hd, tl = vvar(ctx.depth), vvar(ctx.depth + 1)
                inner = ctx.bind(lty.elem).bind(lty).bind(m(tl))
                self.check(inner, on_cons, m(VCons(hd, tl)))
                return m(self.eval(ctx, scrut))
            case S.J(base, motive, on_refl, endpoint, path):
                if type(base) in (S.Lam, S.Pair, S.Inl, S.Inr, S.Nil):
                    # a check-only base takes its type from the path, so normal forms stay checkable
                    pty = self.infer(ctx, path)
                    if type(pty) is not VId:
                        self.fail("mismatch", f"J path has type {self.show(ctx, pty)}, not an identity type",
                                  actual=pty, ctx=ctx)
                    aty = pty.ty
                    self.check(ctx, base, aty)
                    bv = self.eval(ctx, base)
                    if not self.conv(ctx, aty, bv, pty.lhs):
                        self.fail("mismatch", "J base differs from the start of its path",
                                  expected=pty.lhs, actual=bv, ctx=ctx)
                else:
                    aty = self.infer(ctx, base)
                    bv = self.eval(ctx, base)
                x = vvar(ctx.depth)
                self.check_type(ctx.bind(aty).bind(VId(aty, bv, x)), motive)
                env = ctx.env
                m = lambda e, p: self.evaluate(motive, env + (e, p))
                self.check(ctx, on_refl, m(bv, VRefl(bv)))
                self.check(ctx, endpoint, aty)
                ev = self.eval(ctx, endpoint)
                self.check(ctx, path, VId(aty, bv, ev))
                return m(ev, self.eval(ctx, path))
            case S.TruncRec(motive, w, f, scrut):
                tty = self.scrutinee(ctx, scrut, VTrunc, "rec_Trunc")
                self.check_family(ctx, motive, tty)
                mv = self.eval(ctx, motive)
                self.check(ctx, w, trunc_witness_type(tty, mv))
                self.check(ctx, f, sum_branch_type(tty.ty, VTruncIn, mv))
                return vapp(mv, self.eval(ctx, scrut))
            case S.Lam() | S.Pair() | S.Inl() | S.Inr() | S.Nil():
                self.fail("cannot-infer",
                          f"cannot infer the type of {type(t).__name__}; it needs an expected type")
        self.fail("cannot-infer", f"{type(t).__name__} is not part of the kernel language")

    # ---- checking --------------------------------------------------------------------------

    def check(self, ctx: Ctx, t: Term, ty: Value) -> None:
        match t:
            case S.Lam(body):
                if type(ty) is not VPi:
                    self.fail("mismatch", f"a function cannot have type {self.show(ctx, ty)}",
                              expected=ty, ctx=ctx)
                self.check(ctx.bind(ty.dom), body, ty.cod(vvar(ctx.depth)))
                return
            case S.Pair(a, b):
                if type(ty) is not VSigma:
                    self.fail("mismatch", f"a pair cannot have type {self.show(ctx, ty)}",
                              expected=ty, ctx=ctx)
                self.check(ctx, a, ty.first)
                self.check(ctx, b, ty.second(self.eval(ctx, a)))
                return
            case S.Inl(a) | S.Inr(a):
                if type(ty) is not VSum:
                    self.fail("mismatch", f"an injection cannot have type {self.show(ctx, ty)}",
                              expected=ty, ctx=ctx)
                self.check(ctx, a, ty.left if type(t) is S.Inl else ty.right)
                return
            case S.Refl(a) if type(ty) is VId:
                self.check(ctx, a, ty.ty)
                av = self.eval(ctx, a)
                if not (self.conv(ctx, ty.ty, av, ty.lhs) and self.conv(ctx, ty.ty, av, ty.rhs)):
                    self.fail("mismatch",
                              f"refl {self.show(ctx, av)} cannot prove "
                              f"{self.show(ctx, ty.lhs)} = {self.show(ctx, ty.rhs)}",
                              expected=ty, ctx=ctx)
                return
            case S.Nil() if type(ty) is VList:
                return
            case S.Cons(h, tl) if type(ty) is VList:
                self.check(ctx, h, ty.elem)
                self.check(ctx, tl, ty)
                return
            case S.Succ(n) if type(ty) is VNat:
                self.check(ctx, n, ty)
                return
            case S.TruncIn(a) if type(ty) is VTrunc:
                self.check(ctx, a, ty.ty)
                return
            case S.Nil():
                self.fail("mismatch", f"nil cannot have type {self.show(ctx, ty)}", expected=ty, ctx=ctx)
        actual = self.infer(ctx, t)
        self.expect_type(ctx, ty, actual)


# ---- term-level API ---------------------------------------------------------------------------

def _checker(glob, eta=True, max_universe=None):
    return Checker(glob if glob is not None else Globals(), eta, max_universe)


def _ctx(chk: Checker, ctx: S.Context) -> Ctx:
    c = Ctx()
    for entry in ctx:
        chk.check_type(c, entry)
        c = c.bind(chk.eval(c, entry))
    return c


def check_context(ctx: S.Context, glob: Optional[Globals] = None, **kw) -> None:
    chk = _checker(glob, **kw)
    c = Ctx()
    for i, entry in enumerate(ctx):
        try:
            chk.check_type(c, entry)
        except TypeCheckError as e:
            e.message = f"context entry {i}: {e.message}"
            e.args = (e.message,)
            raise
        c = c.bind(chk.eval(c, entry))


def infer(ctx: S.Context, t: Term, glob: Optional[Globals] = None, **kw) -> Term:
    chk = _checker(glob, **kw)
    c = _ctx(chk, ctx)
    return quote(c.depth, chk.infer(c, t))


def check(ctx: S.Context, t: Term, ty: Term, glob: Optional[Globals] = None, **kw) -> None:
    chk = _checker(glob, **kw)
    c = _ctx(chk, ctx)
    chk.check_type(c, ty)
    chk.check(c, t, chk.eval(c, ty))


def check_declaration(prior: Globals | Iterable[Declaration], d: Declaration,
                      allow_axioms: bool = False, eta: bool = True,
                      max_universe: Optional[int] = None,
                      fuel: Optional[int] = DEFAULT_FUEL) -> None:
    """Check ``d`` against the already checked ``prior`` declarations.

    Does not add ``d``; callers extend their ``Globals`` after success.
    """
    glob = prior if isinstance(prior, Globals) else Globals(list(prior))
    saved = (glob.fuel, glob.steps)
    glob.reset_fuel(fuel)
    chk = Checker(glob, eta, max_universe, d.span)
    try:
        if d.name in glob:
            raise TypeCheckError("duplicate", f"{d.name} is already declared", d.span)
        if d.is_axiom and not allow_axioms:
            raise TypeCheckError("axiom-forbidden",
                                 f"axiom {d.name} requires --allow-axioms", d.span)
        chk.check_type(Ctx(), d.type)
        if d.body is not None:
            chk.check(Ctx(), d.body, chk.eval(Ctx(), d.type))
    except TypeCheckError as e:
        e.decl = e.decl or d.name
        if e.span is None:
            e.span = d.span
        raise
    finally:
        glob.fuel, glob.steps = saved


def check_substitution(ctx: S.Context, theta: S.Substitution, target: S.Context,
                       glob: Optional[Globals] = None, **kw) -> None:
    """``ctx |- theta : target``: component i checks against target type i
    instantiated with components 0..i-1."""
    if len(theta) != len(target):
        raise TypeCheckError("mismatch",
                             f"substitution has {len(theta)} components for a context of {len(target)}")
    chk = _checker(glob, **kw)
    c = _ctx(chk, ctx)
    env = ()
    for i, (comp, ty) in enumerate(zip(theta, target)):
        tyv = chk.evaluate(ty, env)
        try:
            chk.check(c, comp, tyv)
        except TypeCheckError as e:
            e.message = f"substitution component {i}: {e.message}"
            e.args = (e.message,)
            raise
        env = env + (chk.eval(c, comp),)


def check_declarations(decls: Sequence[Declaration], glob: Optional[Globals] = None,
                       allow_axioms: bool = False, **kw) -> Globals:
    glob = glob if glob is not None else Globals()
    for d in decls:
        check_declaration(glob, d, allow_axioms, **kw)
        glob.add(d)
    return glob
