"""Core term language with de Bruijn indices.

Every node class declares ``_spec``: one ``(field, binders)`` pair per field,
where ``binders`` is the number of variables the field's subtree is under, or
``None`` for plain data (levels, names).  shift/subst/size are written once
against that table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence


class MalformedTerm(ValueError):
    """De Bruijn arithmetic went out of range."""


@dataclass(frozen=True)
class Span:
    start: int
    end: int
    line: int
    col: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")


class Node:
    __slots__ = ()
    _spec: tuple = ()


class Term(Node):
    __slots__ = ()


def _node(cls):
    return dataclass(frozen=True, slots=True)(cls)


# ---- variables, universes, constants --------------------------------------

@_node
class Var(Term):
    index: int
    _spec = (("index", None),)


@_node
class Universe(Term):
    level: int
    _spec = (("level", None),)


@_node
class Const(Term):
    name: str
    _spec = (("name", None),)


# ---- functions ---------------------------------------------------------------

@_node
class Pi(Term):
    domain: Term
    codomain: Term
    _spec = (("domain", 0), ("codomain", 1))


@_node
class Lam(Term):
    body: Term
    _spec = (("body", 1),)


@_node
class App(Term):
    fn: Term
    arg: Term
    _spec = (("fn", 0), ("arg", 0))


# ---- dependent pairs ---------------------------------------------------------

@_node
class Sigma(Term):
    first: Term
    second: Term
    _spec = (("first", 0), ("second", 1))


@_node
class Pair(Term):
    a: Term
    b: Term
    _spec = (("a", 0), ("b", 0))


@_node
class SigmaRec(Term):
    motive: Term
    curried: Term
    scrutinee: Term
    _spec = (("motive", 0), ("curried", 0), ("scrutinee", 0))


# ---- coproducts --------------------------------------------------------------

@_node
class Sum(Term):
    left: Term
    right: Term
    _spec = (("left", 0), ("right", 0))


@_node
class Inl(Term):
    a: Term
    _spec = (("a", 0),)


@_node
class Inr(Term):
    b: Term
    _spec = (("b", 0),)


@_node
class SumRec(Term):
    motive: Term
    on_left: Term
    on_right: Term
    scrutinee: Term
    _spec = (("motive", 0), ("on_left", 0), ("on_right", 0), ("scrutinee", 0))


# ---- unit and empty ------------------------------------------------------------

@_node
class Unit(Term):
    pass


@_node
class Star(Term):
    pass


@_node
class UnitRec(Term):
    motive: Term
    on_star: Term
    scrutinee: Term
    _spec = (("motive", 0), ("on_star", 0), ("scrutinee", 0))


@_node
class Bottom(Term):
    pass


@_node
class BottomRec(Term):
    motive: Term
    scrutinee: Term
    _spec = (("motive", 0), ("scrutinee", 0))


# ---- booleans ----------------------------------------------------------------

@_node
class Bool(Term):
    pass


@_node
class TrueT(Term):
    pass


@_node
class FalseT(Term):
    pass


@_node
class BoolRec(Term):
    motive: Term
    on_true: Term
    on_false: Term
    scrutinee: Term
    _spec = (("motive", 1), ("on_true", 0), ("on_false", 0), ("scrutinee", 0))


# ---- naturals ----------------------------------------------------------------

@_node
class Nat(Term):
    pass


@_node
class Zero(Term):
    pass


@_node
class Succ(Term):
    n: Term
    _spec = (("n", 0),)


@_node
class NatRec(Term):
    """``step`` binds the predecessor (Var 1) and the recursive result (Var 0)."""

    motive: Term
    base: Term
    step: Term
    scrutinee: Term
    _spec = (("motive", 1), ("base", 0), ("step", 2), ("scrutinee", 0))


# ---- lists -------------------------------------------------------------------

@_node
class List(Term):
    elem: Term
    _spec = (("elem", 0),)


@_node
class Nil(Term):
    pass


@_node
class Cons(Term):
    head: Term
    tail: Term
    _spec = (("head", 0), ("tail", 0))


@_node
class ListRec(Term):
    """``on_cons`` binds head (Var 2), tail (Var 1) and recursive result (Var 0)."""

    motive: Term
    on_nil: Term
    on_cons: Term
    scrutinee: Term
    _spec = (("motive", 1), ("on_nil", 0), ("on_cons", 3), ("scrutinee", 0))


# ---- identity ------------------------------------------------------------------

@_node
class Id(Term):
    ty: Term
    lhs: Term
    rhs: Term
    _spec = (("ty", 0), ("lhs", 0), ("rhs", 0))


@_node
class Refl(Term):
    a: Term
    _spec = (("a", 0),)


@_node
class J(Term):
    """Based path induction.  ``motive`` binds the endpoint (Var 1) and the path (Var 0)."""

    base: Term
    motive: Term
    on_refl: Term
    endpoint: Term
    path: Term
    _spec = (("base", 0), ("motive", 2), ("on_refl", 0), ("endpoint", 0), ("path", 0))


# ---- propositional truncation ----------------------------------------------------

@_node
class Trunc(Term):
    ty: Term
    _spec = (("ty", 0),)


@_node
class TruncIn(Term):
    a: Term
    _spec = (("a", 0),)


@_node
class TruncRec(Term):
    motive: Term
    is_prop: Term
    f: Term
    scrutinee: Term
    _spec = (("motive", 0), ("is_prop", 0), ("f", 0), ("scrutinee", 0))


# ---- two-dimensional fragment ----------------------------------------------------
# Equivalence evidence is not part of the kernel's term language; the twodim
# module checks it and elaborates ``EMap`` away before the kernel sees a term.

class EquivExpr(Node):
    __slots__ = ()


@_node
class ERefl(EquivExpr):
    subject: Term
    _spec = (("subject", 0),)


@_node
class EInv(EquivExpr):
    e: EquivExpr
    _spec = (("e", 0),)


@_node
class ECompose(EquivExpr):
    """``e2 . e1``: first ``e1``, then ``e2``."""

    e2: EquivExpr
    e1: EquivExpr
    _spec = (("e2", 0), ("e1", 0))


@_node
class EResp(EquivExpr):
    fn: Term
    e: EquivExpr
    _spec = (("fn", 1), ("e", 0))


@_node
class EBase(EquivExpr):
    """A postulated generator ``name : lhs ~ rhs``; endpoints travel with it."""

    name: str
    lhs: Term
    rhs: Term
    _spec = (("name", None), ("lhs", 0), ("rhs", 0))


@_node
class EMap(Term):
    """Transport of ``subject : family[lhs]`` to ``family[rhs]`` along ``e``."""

    family: Term
    e: EquivExpr
    subject: Term
    _spec = (("family", 1), ("e", 0), ("subject", 0))


# ---- declarations ------------------------------------------------------------------

@dataclass(frozen=True)
class Declaration:
    name: str
    type: Term
    body: Optional[Term] = None
    is_axiom: bool = False
    span: Optional[Span] = field(default=None, compare=False)

    def __post_init__(self):
        if self.is_axiom and self.body is not None:
            raise ValueError(f"axiom {self.name} cannot have a body")
        if not self.is_axiom and self.body is None:
            raise ValueError(f"definition {self.name} needs a body")


@dataclass(frozen=True)
class EquivDecl:
    """``equiv name : lhs ~ rhs : ty`` (a generator) or a judged equivalence with evidence."""

    name: str
    lhs: Term
    rhs: Term
    ty: Term
    evidence: Optional[EquivExpr] = None
    span: Optional[Span] = field(default=None, compare=False)

    @property
    def is_generator(self) -> bool:
        return self.evidence is None


Context = Sequence[Term]
"""A telescope: entry i is a type in the context of entries 0..i-1."""

Substitution = Sequence[Term]


# ---- generic traversal --------------------------------------------------------------

def map_children(t: Node, f: Callable[[Node, int], Node]) -> Node:
    """Rebuild ``t`` with ``f(child, binders)`` applied to every node field."""
    spec = t._spec
    if not spec:
        return t
    args = []
    for name, k in spec:
        v = getattr(t, name)
        args.append(v if k is None else f(v, k))
    return type(t)(*args)


def children(t: Node) -> Iterator[tuple[Node, int]]:
    for name, k in t._spec:
        if k is not None:
            yield getattr(t, name), k


def shift(t: Node, cutoff: int, amount: int) -> Node:
    """Move free variables ``>= cutoff`` by ``amount``."""
    if amount == 0:
        return t
    return _shift(t, cutoff, amount)


def _shift(t, c, d):
    if type(t) is Var:
        i = t.index
        if i < c:
            return t
        if i + d < 0:
            raise MalformedTerm(f"shifting Var {i} by {d} underflows")
        return Var(i + d)
    if not t._spec:
        return t
    return map_children(t, lambda u, k: _shift(u, c + k, d))


def subst(t: Node, j: int, s: Term) -> Node:
    """Replace ``Var j`` by ``s`` and close the gap by decrementing larger indices."""
    return _subst(t, j, s, 0)


def _subst(t, j, s, depth):
    if type(t) is Var:
        i = t.index
        if i == j + depth:
            return shift(s, 0, depth)
        if i > j + depth:
            return Var(i - 1)
        return t
    if not t._spec:
        return t
    return map_children(t, lambda u, k: _subst(u, j, s, depth + k))


def instantiate(body: Node, args: Sequence[Term]) -> Node:
    """Substitute a k-binder body; ``args[0]`` is the outermost bound variable."""
    k = len(args)
    out = body
    for n, a in enumerate(reversed(args)):
        # innermost first; later substitutions pull every remaining index down by one
        out = subst(out, 0, shift(a, 0, k - n - 1))
    return out


def alpha_equal(t1: Node, t2: Node) -> bool:
    # de Bruijn terms carry no names, so alpha-equivalence is tree equality
    return t1 == t2


def size(t: Node) -> int:
    n = 1
    for u, _ in children(t):
        n += size(u)
    return n


def occurs(t: Node, j: int) -> bool:
    """Does ``Var j`` occur free in ``t``?"""
    if type(t) is Var:
        return t.index == j
    return any(occurs(u, j + k) for u, k in children(t))


def free_bound(t: Node) -> int:
    """Smallest n such that every free index is < n."""
    if type(t) is Var:
        return t.index + 1
    m = 0
    for u, k in children(t):
        m = max(m, free_bound(u) - k)
    return m


def is_closed(t: Node) -> bool:
    return free_bound(t) == 0


def scope_check(t: Node, depth: int) -> None:
    if free_bound(t) > depth:
        raise MalformedTerm(f"term has a free variable outside a context of length {depth}")


def constants(t: Node) -> set[str]:
    out = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if type(u) is Const:
            out.add(u.name)
        stack.extend(c for c, _ in children(u))
    return out


def numeral(n: int) -> Term:
    t: Term = Zero()
    for _ in range(n):
        t = Succ(t)
    return t


def as_numeral(t: Term) -> Optional[int]:
    n = 0
    while type(t) is Succ:
        t = t.n
        n += 1
    return n if type(t) is Zero else None


def apps(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def arrow(a: Term, b: Term) -> Term:
    return Pi(a, shift(b, 0, 1))


def product(a: Term, b: Term) -> Term:
    return Sigma(a, shift(b, 0, 1))


INTRO_FORMS = (Lam, Pair, Inl, Inr, Star, TrueT, FalseT, Zero, Succ, Nil, Cons, Refl, TruncIn)
TYPE_FORMERS = (Universe, Pi, Sigma, Sum, Unit, Bottom, Bool, Nat, List, Id, Trunc)
