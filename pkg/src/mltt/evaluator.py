"""Normalization by evaluation.

Terms evaluate into ``Value``s: constructor-headed values, closures over an
environment, and neutrals (a head that cannot compute, plus a spine of pending
eliminations).  ``quote`` reads a value back into a beta-normal term;
conversion is type-directed so eta for functions, pairs and unit comes for
free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import syntax as S
from .syntax import Declaration, Term


class FuelExhausted(RuntimeError):
    """More kernel steps than the budget allows; signals a non-termination bug."""


def _val(cls):
    return dataclass(frozen=True, slots=True)(cls)


class Value:
    __slots__ = ()


# ---- closures ------------------------------------------------------------------

class Clo:
    """Term body under ``arity`` binders, closed over ``env``."""

    __slots__ = ("env", "body", "glob", "arity")

    def __init__(self, env: tuple, body: Term, glob: "Globals", arity: int = 1):
        self.env = env
        self.body = body
        self.glob = glob
        self.arity = arity

    def __call__(self, *args: Value) -> Value:
        return evaluate(self.body, self.env + args, self.glob)


class MetaClo:
    """A closure given directly as a Python function (used to build types)."""

    __slots__ = ("fn", "arity")

    def __init__(self, fn: Callable[..., Value], arity: int = 1):
        self.fn = fn
        self.arity = arity

    def __call__(self, *args: Value) -> Value:
        return self.fn(*args)


Closure = Clo | MetaClo


# ---- type values -----------------------------------------------------------------

@_val
class VUniverse(Value):
    level: int


@_val
class VPi(Value):
    dom: Value
    cod: Closure


@_val
class VSigma(Value):
    first: Value
    second: Closure


@_val
class VSum(Value):
    left: Value
    right: Value


@_val
class VUnit(Value):
    pass


@_val
class VBottom(Value):
    pass


@_val
class VBool(Value):
    pass


@_val
class VNat(Value):
    pass


@_val
class VList(Value):
    elem: Value


@_val
class VId(Value):
    ty: Value
    lhs: Value
    rhs: Value


@_val
class VTrunc(Value):
    ty: Value


# ---- introduction forms ----------------------------------------------------------

@_val
class VLam(Value):
    body: Closure


@_val
class VPair(Value):
    a: Value
    b: Value


@_val
class VInl(Value):
    a: Value


@_val
class VInr(Value):
    b: Value


@_val
class VStar(Value):
    pass


@_val
class VTrue(Value):
    pass


@_val
class VFalse(Value):
    pass


@_val
class VZero(Value):
    pass


@_val
class VSucc(Value):
    n: Value


@_val
class VNil(Value):
    pass


@_val
class VCons(Value):
    head: Value
    tail: Value


@_val
class VRefl(Value):
    a: Value


@_val
class VTruncIn(Value):
    a: Value


# ---- neutrals ----------------------------------------------------------------------

@_val
class HVar:
    level: int


@_val
class HConst:
    name: str


@_val
class VNeutral(Value):
    head: HVar | HConst
    spine: tuple = ()


@_val
class FApp:
    arg: Value


@_val
class FSigmaRec:
    motive: Value
    curried: Value


@_val
class FSumRec:
    motive: Value
    on_left: Value
    on_right: Value


@_val
class FUnitRec:
    motive: Value
    on_star: Value


@_val
class FBottomRec:
    motive: Value


@_val
class FBoolRec:
    motive: Closure
    on_true: Value
    on_false: Value


@_val
class FNatRec:
    motive: Closure
    base: Value
    step: Closure


@_val
class FListRec:
    motive: Closure
    on_nil: Value
    on_cons: Closure


@_val
class FJ:
    base: Value
    motive: Closure
    on_refl: Value
    endpoint: Value


@_val
class FTruncRec:
    motive: Value
    is_prop: Value
    f: Value


def vvar(level: int) -> VNeutral:
    return VNeutral(HVar(level))


def head_name(v: VNeutral) -> str:
    h = v.head
    return h.name if isinstance(h, HConst) else f"#{h.level}"


# ---- global declarations ---------------------------------------------------------------

class Globals:
    """Checked declarations in order, with lazily evaluated types and bodies."""

    def __init__(self, decls: Sequence[Declaration] = (), fuel: Optional[int] = None):
        self._decls: dict[str, Declaration] = {}
        self._types: dict[str, Value] = {}
        self._values: dict[str, Value] = {}
        self.fuel = fuel
        self.steps = 0
        for d in decls:
            self.add(d)

    def add(self, d: Declaration) -> None:
        if d.name in self._decls:
            raise ValueError(f"duplicate declaration {d.name}")
        self._decls[d.name] = d

    def __contains__(self, name: str) -> bool:
        return name in self._decls

    def __iter__(self):
        return iter(self._decls.values())

    def __len__(self):
        return len(self._decls)

    def get(self, name: str) -> Optional[Declaration]:
        return self._decls.get(name)

    def names(self) -> list[str]:
        return list(self._decls)

    def axioms(self) -> list[str]:
        return [d.name for d in self._decls.values() if d.is_axiom]

    def type_of(self, name: str) -> Value:
        v = self._types.get(name)
        if v is None:
            v = evaluate(self._decls[name].type, (), self)
            self._types[name] = v
        return v

    def value_of(self, name: str) -> Value:
        v = self._values.get(name)
        if v is None:
            d = self._decls[name]
            v = VNeutral(HConst(name)) if d.is_axiom else evaluate(d.body, (), self)
            self._values[name] = v
        return v

    def copy(self) -> "Globals":
        g = Globals(fuel=self.fuel)
        g._decls = dict(self._decls)
        g._types = dict(self._types)
        g._values = dict(self._values)
        return g

    def reset_fuel(self, fuel: Optional[int]) -> None:
        self.fuel = fuel
        self.steps = 0


# ---- eliminations ------------------------------------------------------------------------

def _stuck(n: Value, frame) -> VNeutral:
    if not isinstance(n, VNeutral):
        raise TypeError(f"ill-typed elimination of {type(n).__name__}")
    return VNeutral(n.head, n.spine + (frame,))


def vapp(f: Value, a: Value) -> Value:
    if type(f) is VLam:
        return f.body(a)
    return _stuck(f, FApp(a))


def vsigma_rec(motive, curried, p):
    if type(p) is VPair:
        return vapp(vapp(curried, p.a), p.b)
    return _stuck(p, FSigmaRec(motive, curried))


def vsum_rec(motive, l, r, s):
    t = type(s)
    if t is VInl:
        return vapp(l, s.a)
    if t is VInr:
        return vapp(r, s.b)
    return _stuck(s, FSumRec(motive, l, r))


def vunit_rec(motive, c, u):
    if type(u) is VStar:
        return c
    return _stuck(u, FUnitRec(motive, c))


def vbottom_rec(motive, e):
    return _stuck(e, FBottomRec(motive))


def vbool_rec(motive, t, f, b):
    tb = type(b)
    if tb is VTrue:
        return t
    if tb is VFalse:
        return f
    return _stuck(b, FBoolRec(motive, t, f))


def vnat_rec(motive, base, step, n):
    # iterative over the successor tower to keep Python's stack shallow
    tower = []
    while type(n) is VSucc:
        tower.append(n.n)
        n = n.n
    if type(n) is VZero:
        acc = base
    else:
        acc = _stuck(n, FNatRec(motive, base, step))
    for pred in reversed(tower):
        acc = step(pred, acc)
    return acc


def vlist_rec(motive, nil, cons, xs):
    cells = []
    while type(xs) is VCons:
        cells.append(xs)
        xs = xs.tail
    if type(xs) is VNil:
        acc = nil
    else:
        acc = _stuck(xs, FListRec(motive, nil, cons))
    for c in reversed(cells):
        acc = cons(c.head, c.tail, acc)
    return acc


def vj(base, motive, on_refl, endpoint, path):
    if type(path) is VRefl:
        return on_refl
    return _stuck(path, FJ(base, motive, on_refl, endpoint))


def vtrunc_rec(motive, w, f, t):
    if type(t) is VTruncIn:
        return vapp(f, t.a)
    return _stuck(t, FTruncRec(motive, w, f))


def vfst(p: Value, sigma: VSigma) -> Value:
    if type(p) is VPair:
        return p.a
    motive = VLam(MetaClo(lambda _: sigma.first))
    return vsigma_rec(motive, VLam(MetaClo(lambda x: VLam(MetaClo(lambda _y: x)))), p)


def vsnd(p: Value, sigma: VSigma) -> Value:
    if type(p) is VPair:
        return p.b
    motive = VLam(MetaClo(lambda q: sigma.second(vfst(q, sigma))))
    return vsigma_rec(motive, VLam(MetaClo(lambda _x: VLam(MetaClo(lambda y: y)))), p)


# ---- evaluation ------------------------------------------------------------------------

def evaluate(t: Term, env: tuple, glob: Optional[Globals] = None) -> Value:
    if glob is not None and glob.fuel is not None:
        glob.steps += 1
        if glob.steps > glob.fuel:
            raise FuelExhausted(f"exceeded {glob.fuel} evaluation steps")
    return _EVAL[type(t)](t, env, glob)


def eval_term(env: Sequence[Value], t: Term, glob: Optional[Globals] = None) -> Value:
    """``eval(env, t)`` with the environment given outermost-first."""
    return evaluate(t, tuple(env), glob)


def _const(t, env, glob):
    if glob is None or t.name not in glob:
        raise KeyError(f"unknown constant {t.name}")
    return glob.value_of(t.name)


def _emap(t, env, glob):
    raise TypeError("map must be elaborated by the twodim fragment before evaluation")


_EVAL = {
    S.Var: lambda t, env, g: env[-1 - t.index],
    S.Universe: lambda t, env, g: VUniverse(t.level),
    S.Const: _const,
    S.Pi: lambda t, env, g: VPi(evaluate(t.domain, env, g), Clo(env, t.codomain, g)),
    S.Lam: lambda t, env, g: VLam(Clo(env, t.body, g)),
    S.App: lambda t, env, g: vapp(evaluate(t.fn, env, g), evaluate(t.arg, env, g)),
    S.Sigma: lambda t, env, g: VSigma(evaluate(t.first, env, g), Clo(env, t.second, g)),
    S.Pair: lambda t, env, g: VPair(evaluate(t.a, env, g), evaluate(t.b, env, g)),
    S.SigmaRec: lambda t, env, g: vsigma_rec(
        evaluate(t.motive, env, g), evaluate(t.curried, env, g), evaluate(t.scrutinee, env, g)),
    S.Sum: lambda t, env, g: VSum(evaluate(t.left, env, g), evaluate(t.right, env, g)),
    S.Inl: lambda t, env, g: VInl(evaluate(t.a, env, g)),
    S.Inr: lambda t, env, g: VInr(evaluate(t.b, env, g)),
    S.SumRec: lambda t, env, g: vsum_rec(
        evaluate(t.motive, env, g), evaluate(t.on_left, env, g),
        evaluate(t.on_right, env, g), evaluate(t.scrutinee, env, g)),
    S.Unit: lambda t, env, g: VUnit(),
    S.Star: lambda t, env, g: VStar(),
    S.UnitRec: lambda t, env, g: vunit_rec(
        evaluate(t.motive, env, g), evaluate(t.on_star, env, g), evaluate(t.scrutinee, env, g)),
    S.Bottom: lambda t, env, g: VBottom(),
    S.BottomRec: lambda t, env, g: vbottom_rec(
        evaluate(t.motive, env, g), evaluate(t.scrutinee, env, g)),
    S.Bool: lambda t, env, g: VBool(),
    S.TrueT: lambda t, env, g: VTrue(),
    S.FalseT: lambda t, env, g: VFalse(),
    S.BoolRec: lambda t, env, g: vbool_rec(
        Clo(env, t.motive, g), evaluate(t.on_true, env, g),
        evaluate(t.on_false, env, g), evaluate(t.scrutinee, env, g)),
    S.Nat: lambda t, env, g: VNat(),
    S.Zero: lambda t, env, g: VZero(),
    S.Succ: lambda t, env, g: VSucc(evaluate(t.n, env, g)),
    S.NatRec: lambda t, env, g: vnat_rec(
        Clo(env, t.motive, g), evaluate(t.base, env, g),
        Clo(env, t.step, g, 2), evaluate(t.scrutinee, env, g)),
    S.List: lambda t, env, g: VList(evaluate(t.elem, env, g)),
    S.Nil: lambda t, env, g: VNil(),
    S.Cons: lambda t, env, g: VCons(evaluate(t.head, env, g), evaluate(t.tail, env, g)),
    S.ListRec: lambda t, env, g: vlist_rec(
        Clo(env, t.motive, g), evaluate(t.on_nil, env, g),
        Clo(env, t.on_cons, g, 3), evaluate(t.scrutinee, env, g)),
    S.Id: lambda t, env, g: VId(
        evaluate(t.ty, env, g), evaluate(t.lhs, env, g), evaluate(t.rhs, env, g)),
    S.Refl: lambda t, env, g: VRefl(evaluate(t.a, env, g)),
    S.J: lambda t, env, g: vj(
        evaluate(t.base, env, g), Clo(env, t.motive, g, 2), evaluate(t.on_refl, env, g),
        evaluate(t.endpoint, env, g), evaluate(t.path, env, g)),
    S.Trunc: lambda t, env, g: VTrunc(evaluate(t.ty, env, g)),
    S.TruncIn: lambda t, env, g: VTruncIn(evaluate(t.a, env, g)),
    S.TruncRec: lambda t, env, g: vtrunc_rec(
        evaluate(t.motive, env, g), evaluate(t.is_prop, env, g),
        evaluate(t.f, env, g), evaluate(t.scrutinee, env, g)),
    S.EMap: _emap,
}


# ---- readback ------------------------------------------------------------------------------

def quote(depth: int, v: Value) -> Term:
    return _QUOTE[type(v)](depth, v)


def quote_closure(depth: int, c: Closure, arity: int = 1) -> Term:
    args = tuple(vvar(depth + i) for i in range(arity))
    return quote(depth + arity, c(*args))


def _quote_succ(depth, v):
    n = 0
    while type(v) is VSucc:
        v = v.n
        n += 1
    t = quote(depth, v)
    for _ in range(n):
        t = S.Succ(t)
    return t


def _quote_cons(depth, v):
    heads = []
    while type(v) is VCons:
        heads.append(quote(depth, v.head))
        v = v.tail
    t = quote(depth, v)
    for h in reversed(heads):
        t = S.Cons(h, t)
    return t


def _quote_neutral(depth, v):
    h = v.head
    t = S.Var(depth - h.level - 1) if type(h) is HVar else S.Const(h.name)
    for fr in v.spine:
        t = _quote_frame(depth, fr, t)
    return t


def _quote_frame(d, fr, t):
    q = quote
    match fr:
        case FApp(arg):
            return S.App(t, q(d, arg))
        case FSigmaRec(m, c):
            return S.SigmaRec(q(d, m), q(d, c), t)
        case FSumRec(m, l, r):
            return S.SumRec(q(d, m), q(d, l), q(d, r), t)
        case FUnitRec(m, c):
            return S.UnitRec(q(d, m), q(d, c), t)
        case FBottomRec(m):
            return S.BottomRec(q(d, m), t)
        case FBoolRec(m, a, b):
            return S.BoolRec(quote_closure(d, m), q(d, a), q(d, b), t)
        case FNatRec(m, z, s):
            return S.NatRec(quote_closure(d, m), q(d, z), quote_closure(d, s, 2), t)
        case FListRec(m, n, c):
            return S.ListRec(quote_closure(d, m), q(d, n), quote_closure(d, c, 3), t)
        case FJ(base, m, c, end):
            return S.J(q(d, base), quote_closure(d, m, 2), q(d, c), q(d, end), t)
        case FTruncRec(m, w, f):
            return S.TruncRec(q(d, m), q(d, w), q(d, f), t)
    raise TypeError(f"unknown frame {fr!r}")


_QUOTE = {
    VUniverse: lambda d, v: S.Universe(v.level),
    VPi: lambda d, v: S.Pi(quote(d, v.dom), quote_closure(d, v.cod)),
    VSigma: lambda d, v: S.Sigma(quote(d, v.first), quote_closure(d, v.second)),
    VSum: lambda d, v: S.Sum(quote(d, v.left), quote(d, v.right)),
    VUnit: lambda d, v: S.Unit(),
    VBottom: lambda d, v: S.Bottom(),
    VBool: lambda d, v: S.Bool(),
    VNat: lambda d, v: S.Nat(),
    VList: lambda d, v: S.List(quote(d, v.elem)),
    VId: lambda d, v: S.Id(quote(d, v.ty), quote(d, v.lhs), quote(d, v.rhs)),
    VTrunc: lambda d, v: S.Trunc(quote(d, v.ty)),
    VLam: lambda d, v: S.Lam(quote_closure(d, v.body)),
    VPair: lambda d, v: S.Pair(quote(d, v.a), quote(d, v.b)),
    VInl: lambda d, v: S.Inl(quote(d, v.a)),
    VInr: lambda d, v: S.Inr(quote(d, v.b)),
    VStar: lambda d, v: S.Star(),
    VTrue: lambda d, v: S.TrueT(),
    VFalse: lambda d, v: S.FalseT(),
    VZero: lambda d, v: S.Zero(),
    VSucc: _quote_succ,
    VNil: lambda d, v: S.Nil(),
    VCons: _quote_cons,
    VRefl: lambda d, v: S.Refl(quote(d, v.a)),
    VTruncIn: lambda d, v: S.TruncIn(quote(d, v.a)),
    VNeutral: _quote_neutral,
}


def env_of(n: int) -> tuple:
    return tuple(vvar(i) for i in range(n))


def normalize(ctx: S.Context, t: Term, glob: Optional[Globals] = None) -> Term:
    n = len(ctx)
    return quote(n, evaluate(t, env_of(n), glob))


# ---- types that the eliminators demand ------------------------------------------------------

def pi(dom: Value, fn: Callable[[Value], Value]) -> VPi:
    return VPi(dom, MetaClo(fn))


def sigma_curried_type(sig: VSigma, motive: Value) -> Value:
    return pi(sig.first, lambda x: pi(sig.second(x), lambda y: vapp(motive, VPair(x, y))))


def is_prop_type(ty: Value) -> Value:
    return pi(ty, lambda x: pi(ty, lambda y: VId(ty, x, y)))


def trunc_witness_type(tr: VTrunc, motive: Value) -> Value:
    return pi(tr, lambda z: is_prop_type(vapp(motive, z)))


def sum_branch_type(dom: Value, inj, motive: Value) -> Value:
    return pi(dom, lambda a: vapp(motive, inj(a)))


# ---- conversion -----------------------------------------------------------------------------

class Conversion:
    """Type-directed judgemental equality over a context of type values."""

    def __init__(self, glob: Optional[Globals], eta: bool = True):
        self.glob = glob
        self.eta = eta

    def equal(self, tys: tuple, ty: Value, a: Value, b: Value) -> bool:
        tt = type(ty)
        if tt is VPi:
            if self.eta:
                x = vvar(len(tys))
                return self.equal(tys + (ty.dom,), ty.cod(x), vapp(a, x), vapp(b, x))
            if type(a) is VLam and type(b) is VLam:
                x = vvar(len(tys))
                return self.equal(tys + (ty.dom,), ty.cod(x), a.body(x), b.body(x))
            return self._neutral_eq(tys, a, b)
        if tt is VSigma:
            if self.eta or (type(a) is VPair and type(b) is VPair):
                fa = vfst(a, ty)
                return (self.equal(tys, ty.first, fa, vfst(b, ty))
                        and self.equal(tys, ty.second(fa), vsnd(a, ty), vsnd(b, ty)))
            return self._neutral_eq(tys, a, b)
        if tt is VUnit:
            if self.eta:
                return True
            if type(a) is VStar and type(b) is VStar:
                return True
            return self._neutral_eq(tys, a, b)
        if tt is VUniverse:
            return self.equal_types(tys, a, b)
        ta, tb = type(a), type(b)
        if ta is VNeutral or tb is VNeutral:
            return self._neutral_eq(tys, a, b)
        if ta is not tb:
            return False
        if tt is VNat:
            while type(a) is VSucc and type(b) is VSucc:
                a, b = a.n, b.n
            if type(a) is VSucc or type(b) is VSucc:
                return False
            if type(a) is VZero and type(b) is VZero:
                return True
            return self.equal(tys, ty, a, b)
        if tt is VBool or tt is VBottom:
            return True
        if tt is VSum:
            if ta is VInl:
                return self.equal(tys, ty.left, a.a, b.a)
            return self.equal(tys, ty.right, a.b, b.b)
        if tt is VList:
            while type(a) is VCons and type(b) is VCons:
                if not self.equal(tys, ty.elem, a.head, b.head):
                    return False
                a, b = a.tail, b.tail
            if type(a) is VNil and type(b) is VNil:
                return True
            if type(a) is VNeutral or type(b) is VNeutral:
                return self._neutral_eq(tys, a, b)
            return False
        if tt is VId:
            return self.equal(tys, ty.ty, a.a, b.a)
        if tt is VTrunc:
            return self.equal(tys, ty.ty, a.a, b.a)
        return False

    def equal_types(self, tys: tuple, a: Value, b: Value) -> bool:
        ta, tb = type(a), type(b)
        if ta is VNeutral or tb is VNeutral:
            return self._neutral_eq(tys, a, b)
        if ta is not tb:
            return False
        if ta is VUniverse:
            return a.level == b.level
        if ta is VPi or ta is VSigma:
            d1, d2 = (a.dom, b.dom) if ta is VPi else (a.first, b.first)
            c1, c2 = (a.cod, b.cod) if ta is VPi else (a.second, b.second)
            if not self.equal_types(tys, d1, d2):
                return False
            x = vvar(len(tys))
            return self.equal_types(tys + (d1,), c1(x), c2(x))
        if ta is VSum:
            return self.equal_types(tys, a.left, b.left) and self.equal_types(tys, a.right, b.right)
        if ta is VList:
            return self.equal_types(tys, a.elem, b.elem)
        if ta is VTrunc:
            return self.equal_types(tys, a.ty, b.ty)
        if ta is VId:
            return (self.equal_types(tys, a.ty, b.ty)
                    and self.equal(tys, a.ty, a.lhs, b.lhs)
                    and self.equal(tys, a.ty, a.rhs, b.rhs))
        return ta in (VUnit, VBottom, VBool, VNat)

    def _neutral_eq(self, tys, a, b) -> bool:
        if type(a) is not VNeutral or type(b) is not VNeutral:
            return False
        return self.neutral_type(tys, a, b) is not None

    def _family_eq(self, tys, dom, m1, m2) -> bool:
        x = vvar(len(tys))
        return self.equal_types(tys + (dom,), vapp(m1, x), vapp(m2, x))

    def neutral_type(self, tys: tuple, a: VNeutral, b: VNeutral) -> Optional[Value]:
        """Compare two neutrals; on success return the type of the shared head + spine."""
        if a.head != b.head or len(a.spine) != len(b.spine):
            return None
        h = a.head
        if type(h) is HVar:
            ty = tys[h.level]
        else:
            ty = self.glob.type_of(h.name)
        sofar = VNeutral(h, ())
        eq = self.equal
        n = len(tys)
        for f1, f2 in zip(a.spine, b.spine):
            if type(f1) is not type(f2):
                return None
            tf = type(f1)
            if tf is FApp:
                if type(ty) is not VPi or not eq(tys, ty.dom, f1.arg, f2.arg):
                    return None
                ty = ty.cod(f1.arg)
            elif tf is FSigmaRec:
                if not self._family_eq(tys, ty, f1.motive, f2.motive):
                    return None
                if not eq(tys, sigma_curried_type(ty, f1.motive), f1.curried, f2.curried):
                    return None
                ty = vapp(f1.motive, sofar)
            elif tf is FSumRec:
                m = f1.motive
                if not (self._family_eq(tys, ty, m, f2.motive)
                        and eq(tys, sum_branch_type(ty.left, VInl, m), f1.on_left, f2.on_left)
                        and eq(tys, sum_branch_type(ty.right, VInr, m), f1.on_right, f2.on_right)):
                    return None
                ty = vapp(m, sofar)
            elif tf is FUnitRec:
                m = f1.motive
                if not (self._family_eq(tys, ty, m, f2.motive)
                        and eq(tys, vapp(m, VStar()), f1.on_star, f2.on_star)):
                    return None
                ty = vapp(m, sofar)
            elif tf is FBottomRec:
                if not self._family_eq(tys, ty, f1.motive, f2.motive):
                    return None
                ty = vapp(f1.motive, sofar)
            elif tf is FBoolRec:
                m = f1.motive
                x = vvar(n)
                if not (self.equal_types(tys + (VBool(),), m(x), f2.motive(x))
                        and eq(tys, m(VTrue()), f1.on_true, f2.on_true)
                        and eq(tys, m(VFalse()), f1.on_false, f2.on_false)):
                    return None
                ty = m(sofar)
            elif tf is FNatRec:
                m = f1.motive
                x, r = vvar(n), vvar(n + 1)
                if not (self.equal_types(tys + (VNat(),), m(x), f2.motive(x))
                        and eq(tys, m(VZero()), f1.base, f2.base)
                        and eq(tys + (VNat(), m(x)), m(VSucc(x)), f1.step(x, r), f2.step(x, r))):
                    return None
                ty = m(sofar)
            elif tf is FListRec:
                m = f1.motive
                elem = ty.elem
                x, hd, tl, r = vvar(n), vvar(n), vvar(n + 1), vvar(n + 2)
                ext = tys + (elem, ty, m(tl))
                if not (self.equal_types(tys + (ty,), m(x), f2.motive(x))
                        and eq(tys, m(VNil()), f1.on_nil, f2.on_nil)
                        and eq(ext, m(VCons(hd, tl)), f1.on_cons(hd, tl, r), f2.on_cons(hd, tl, r))):
                    return None
                ty = m(sofar)
            elif tf is FJ:
                A = ty.ty
                m = f1.motive
                x, p = vvar(n), vvar(n + 1)
                ext = tys + (A, VId(A, f1.base, x))
                if not (eq(tys, A, f1.base, f2.base)
                        and eq(tys, A, f1.endpoint, f2.endpoint)
                        and self.equal_types(ext, m(x, p), f2.motive(x, p))
                        and eq(tys, m(f1.base, VRefl(f1.base)), f1.on_refl, f2.on_refl)):
                    return None
                ty = m(f1.endpoint, sofar)
            elif tf is FTruncRec:
                m = f1.motive
                if not (self._family_eq(tys, ty, m, f2.motive)
                        and eq(tys, trunc_witness_type(ty, m), f1.is_prop, f2.is_prop)
                        and eq(tys, sum_branch_type(ty.ty, VTruncIn, m), f1.f, f2.f)):
                    return None
                ty = vapp(m, sofar)
            else:
                return None
            sofar = VNeutral(h, sofar.spine + (f1,))
        return ty


def context_types(ctx: S.Context, glob: Optional[Globals]) -> tuple:
    tys: list[Value] = []
    env = ()
    for i, entry in enumerate(ctx):
        tys.append(evaluate(entry, env, glob))
        env = env + (vvar(i),)
    return tuple(tys)


def convertible(ctx: S.Context, a: Term, b: Term, ty: Term,
                glob: Optional[Globals] = None, eta: bool = True) -> bool:
    tys = context_types(ctx, glob)
    env = env_of(len(ctx))
    conv = Conversion(glob, eta)
    return conv.equal(tys, evaluate(ty, env, glob), evaluate(a, env, glob), evaluate(b, env, glob))


# ---- canonical forms ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    kind: str  # "canonical" | "non-canonical" | "stuck"
    head: Optional[str] = None

    def __str__(self):
        return f"stuck({self.head})" if self.kind == "stuck" else self.kind


CANONICAL = Classification("canonical")
NON_CANONICAL = Classification("non-canonical")


def classify_canonical(t: Term, mode: str = "lazy", glob: Optional[Globals] = None) -> Classification:
    """Classify a closed term as canonical, reducible, or stuck on a neutral head.

    Lazy mode accepts any constructor-headed term; eager mode also requires the
    constructor's arguments (outside binders) to be canonical.
    """
    if mode not in ("lazy", "eager"):
        raise ValueError(f"unknown mode {mode!r}")
    if not S.is_closed(t):
        raise ValueError("classify_canonical expects a closed term")
    return _classify(t, mode, glob)


def _classify(t, mode, glob):
    if isinstance(t, S.INTRO_FORMS) or isinstance(t, S.TYPE_FORMERS):
        if mode == "lazy":
            return CANONICAL
        worst = CANONICAL
        for child, k in S.children(t):
            if k:
                continue
            c = _classify(child, mode, glob)
            if c.kind == "stuck":
                return c
            if c.kind == "non-canonical":
                worst = c
        return worst
    v = evaluate(t, (), glob)
    if type(v) is VNeutral:
        return Classification("stuck", head_name(v))
    return NON_CANONICAL
