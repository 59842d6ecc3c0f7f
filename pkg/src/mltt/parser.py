"""Surface language: lexer, parser, name resolution and pretty printing.

Grammar (lowest precedence first)::

    decl   ::= 'def' NAME ':' expr ':=' expr
             | 'axiom' NAME ':' expr
             | 'equiv' NAME ':' expr '~' expr ':' expr
             | 'judge' NAME ':' expr '~' expr ':' expr ':=' eexpr
    expr   ::= 'fun' NAME+ '=>' expr
             | 'if' expr 'return' expr 'then' expr 'else' expr
             | group+ '->' expr | sum '->' expr | sum
    sum    ::= prod ('+' prod)*
    prod   ::= group+ '*' prod | app '*' prod | app
    group  ::= '(' NAME+ ':' expr ')'
    app    ::= atom atom*
    atom   ::= NAME | NUMBER | U<n> | keyword | '(' expr ')' | '(' expr ',' expr (',' expr)* ')'
             | '[' (expr (',' expr)*)? ']'
    eexpr  ::= 'refl' atom | 'inv' eatom | 'compose' eatom eatom | 'resp' atom eatom | eatom
    eatom  ::= NAME | '(' eexpr ')'

Primitives are keywords applied like functions (``rec_N C z s n``).  An
argument position that binds ``k`` variables accepts ``fun x1 .. xk => e``;
any other expression there is taken as constant in the bound variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import syntax as S
from .syntax import Declaration, EquivDecl, Span, Term


class ParseError(Exception):
    def __init__(self, message: str, span: Optional[Span] = None,
                 expected: Iterable[str] = (), filename: str = "<input>", code: str = "syntax"):
        super().__init__(message)
        self.message = message
        self.span = span
        self.expected = frozenset(expected)
        self.filename = filename
        self.code = code

    def __str__(self):
        if self.span is None:
            return f"{self.filename}: {self.message}"
        return f"{self.filename}:{self.span.line}:{self.span.col}: {self.message}"


class ScopeError(ParseError):
    """Unbound or duplicate names found during resolution."""


# ---- lexer ---------------------------------------------------------------------------

KEYWORDS = {"def", "axiom", "judge", "fun", "if", "return", "then", "else", "map"}

# primitive -> binders per argument position
PRIMITIVES: dict[str, tuple[int, ...]] = {
    "Nat": (), "Bool": (), "Unit": (), "Bottom": (),
    "zero": (), "true": (), "false": (), "star": (), "nil": (),
    "succ": (0,), "List": (0,), "Trunc": (0,), "refl": (0,), "tin": (0,),
    "inl": (0,), "inr": (0,),
    "cons": (0, 0), "pair": (0, 0),
    "Id": (0, 0, 0),
    "rec_Sigma": (0, 0, 0), "rec_Sum": (0, 0, 0, 0), "rec_Unit": (0, 0, 0),
    "rec_Bottom": (0, 0), "rec_Trunc": (0, 0, 0, 0),
    "rec_Bool": (1, 0, 0, 0), "rec_N": (1, 0, 2, 0), "rec_List": (1, 0, 3, 0),
    "J": (0, 2, 0, 0, 0),
}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>:=|->|=>|[()\[\],:*+~])
""", re.VERBOSE)

_UNIVERSE = re.compile(r"U([0-9]+)\Z")


@dataclass(frozen=True)
class Token:
    kind: str  # ident | num | kw | prim | univ | sym | eof
    text: str
    span: Span


def _line_starts(src: str) -> list[int]:
    return [0] + [m.end() for m in re.finditer("\n", src)]


def _span(starts, a, b) -> Span:
    import bisect
    line = bisect.bisect_right(starts, a) - 1
    return Span(a, b, line + 1, a - starts[line] + 1)


def tokenize(src: str, filename: str = "<input>") -> list[Token]:
    starts = _line_starts(src)
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", _span(starts, pos, pos + 1),
                             filename=filename)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident":
                if text in KEYWORDS:
                    kind = "kw"
                elif text in PRIMITIVES:
                    kind = "prim"
                elif _UNIVERSE.match(text):
                    kind = "univ"
            out.append(Token(kind, text, _span(starts, m.start(), m.end())))
        pos = m.end()
    out.append(Token("eof", "", _span(starts, len(src), len(src))))
    return out


# ---- surface syntax --------------------------------------------------------------------

@dataclass(frozen=True)
class SName:
    name: str
    span: Span


@dataclass(frozen=True)
class SNum:
    value: int
    span: Span


@dataclass(frozen=True)
class SUniverse:
    level: int
    span: Span


@dataclass(frozen=True)
class SPrim:
    name: str
    span: Span


@dataclass(frozen=True)
class SLam:
    name: str
    body: object
    span: Span


@dataclass(frozen=True)
class SApp:
    fn: object
    args: tuple
    span: Span


@dataclass(frozen=True)
class SBinder:
    """``(x : A) -> B`` / ``(x : A) * B``, or the non-dependent forms when ``name`` is None."""

    op: str  # '->' | '*'
    name: Optional[str]
    dom: object
    body: object
    span: Span


@dataclass(frozen=True)
class SSum:
    left: object
    right: object
    span: Span


@dataclass(frozen=True)
class STuple:
    items: tuple
    span: Span


@dataclass(frozen=True)
class SList:
    items: tuple
    span: Span


@dataclass(frozen=True)
class SIf:
    scrutinee: object
    motive: object
    then: object
    orelse: object
    span: Span


@dataclass(frozen=True)
class SMap:
    family: object
    evidence: object
    subject: object
    span: Span


# equivalence expressions
@dataclass(frozen=True)
class SERefl:
    subject: object
    span: Span


@dataclass(frozen=True)
class SEInv:
    e: object
    span: Span


@dataclass(frozen=True)
class SECompose:
    e2: object
    e1: object
    span: Span


@dataclass(frozen=True)
class SEResp:
    fn: object
    e: object
    span: Span


@dataclass(frozen=True)
class SEBase:
    name: str
    span: Span


@dataclass(frozen=True)
class SurfaceDecl:
    kind: str  # def | axiom | equiv | judge
    name: str
    type: object
    body: object = None
    lhs: object = None
    rhs: object = None
    span: Optional[Span] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind in ("axiom", "equiv") and self.body is not None:
            raise ValueError(f"{self.kind} {self.name} cannot have a body")


# ---- parser ----------------------------------------------------------------------------------

_EXPR_START = ("identifier", "number", "(", "[", "fun", "if", "U<n>", "primitive", "map")
_ATOM_KINDS = {"ident", "num", "prim", "univ"}


class Parser:
    def __init__(self, src: str, filename: str = "<input>"):
        self.toks = tokenize(src, filename)
        self.pos = 0
        self.filename = filename

    # token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("sym", "kw", "prim")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def error(self, expected: Iterable[str], what: Optional[str] = None):
        exp = sorted(set(expected))
        found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
        shown = [e if e in ("identifier", "number", "primitive", "U<n>") else repr(e) for e in exp]
        msg = what or f"expected {' or '.join(shown)}, found {found}"
        raise ParseError(msg, self.tok.span, exp, self.filename)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error([text])
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(["identifier"])
        return self.advance()

    def join(self, a: Span, b: Span) -> Span:
        return Span(a.start, b.end, a.line, a.col)

    def last_span(self) -> Span:
        return self.toks[self.pos - 1].span if self.pos else self.tok.span

    # declarations
    def parse_file(self) -> list[SurfaceDecl]:
        out = []
        while self.tok.kind != "eof":
            out.append(self.parse_decl())
        return out

    def parse_decl(self) -> SurfaceDecl:
        start = self.tok.span
        t = self.tok
        if t.kind == "kw" and t.text in ("def", "axiom", "judge") or (t.kind == "ident" and t.text == "equiv"):
            self.advance()
            name = self.ident().text
            self.expect(":")
            if t.text in ("def", "axiom"):
                ty = self.parse_expr()
                body = None
                if t.text == "def":
                    self.expect(":=")
                    body = self.parse_expr()
                return SurfaceDecl(t.text, name, ty, body, span=self.join(start, self.last_span()))
            lhs = self.parse_expr()
            self.expect("~")
            rhs = self.parse_expr()
            self.expect(":")
            ty = self.parse_expr()
            body = None
            if t.text == "judge":
                self.expect(":=")
                body = self.parse_eexpr()
            return SurfaceDecl(t.text, name, ty, body, lhs, rhs, span=self.join(start, self.last_span()))
        self.error(["def", "axiom", "equiv", "judge"])

    # expressions
    def parse_expr(self):
        t = self.tok
        if self.at("fun"):
            self.advance()
            names = [self.ident()]
            while self.tok.kind == "ident":
                names.append(self.advance())
            if not self.at("=>"):
                self.error(["identifier", "=>"])
            self.advance()
            body = self.parse_expr()
            for n in reversed(names):
                body = SLam(n.text, body, self.join(n.span, self.last_span()))
            return body
        if self.at("if"):
            self.advance()
            scrut = self.parse_expr()
            self.expect("return")
            motive = self.parse_expr()
            self.expect("then")
            th = self.parse_expr()
            self.expect("else")
            el = self.parse_expr()
            return SIf(scrut, motive, th, el, self.join(t.span, self.last_span()))
        left = self.parse_sum()
        if self.accept("->"):
            return SBinder("->", None, left, self.parse_expr(), self.join(t.span, self.last_span()))
        return left

    def parse_sum(self):
        start = self.tok.span
        left = self.parse_prod()
        while self.accept("+"):
            left = SSum(left, self.parse_prod(), self.join(start, self.last_span()))
        return left

    def _binder_group_ahead(self) -> bool:
        if not self.at("("):
            return False
        k = 1
        if self.peek(k).kind != "ident":
            return False
        while self.peek(k).kind == "ident":
            k += 1
        t = self.peek(k)
        return t.kind == "sym" and t.text == ":"

    def parse_prod(self):
        start = self.tok.span
        if self._binder_group_ahead():
            groups = []
            while self._binder_group_ahead():
                self.advance()
                names = []
                while self.tok.kind == "ident":
                    names.append(self.advance().text)
                self.expect(":")
                dom = self.parse_expr()
                self.expect(")")
                groups.append((names, dom))
            if self.accept("->"):
                op, body = "->", None
                body = self.parse_expr()
            elif self.accept("*"):
                op = "*"
                body = self.parse_prod()
            else:
                self.error(["->", "*", "("])
            sp = self.join(start, self.last_span())
            for names, dom in reversed(groups):
                for n in reversed(names):
                    body = SBinder(op, n, dom, body, sp)
            return body
        left = self.parse_app()
        if self.accept("*"):
            return SBinder("*", None, left, self.parse_prod(), self.join(start, self.last_span()))
        return left

    def _atom_ahead(self) -> bool:
        t = self.tok
        return t.kind in _ATOM_KINDS or (t.kind == "sym" and t.text in ("(", "["))

    def parse_app(self):
        start = self.tok.span
        if self.at("map"):
            self.advance()
            fam = self.parse_atom()
            ev = self.parse_eatom()
            subj = self.parse_atom()
            head = SMap(fam, ev, subj, self.join(start, self.last_span()))
        else:
            head = self.parse_atom()
        args = []
        while self._atom_ahead():
            args.append(self.parse_atom())
        if not args:
            return head
        return SApp(head, tuple(args), self.join(start, self.last_span()))

    def parse_atom(self):
        t = self.tok
        if t.kind == "ident":
            self.advance()
            return SName(t.text, t.span)
        if t.kind == "num":
            self.advance()
            return SNum(int(t.text), t.span)
        if t.kind == "univ":
            self.advance()
            return SUniverse(int(t.text[1:]), t.span)
        if t.kind == "prim":
            self.advance()
            return SPrim(t.text, t.span)
        if self.accept("("):
            items = [self.parse_expr()]
            while self.accept(","):
                items.append(self.parse_expr())
            if not self.at(")"):
                self.error([")", ","])
            self.advance()
            if len(items) == 1:
                return items[0]
            return STuple(tuple(items), self.join(t.span, self.last_span()))
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.parse_expr())
                while self.accept(","):
                    items.append(self.parse_expr())
            if not self.at("]"):
                self.error(["]", ","])
            self.advance()
            return SList(tuple(items), self.join(t.span, self.last_span()))
        self.error(_EXPR_START)

    # equivalence expressions
    def parse_eexpr(self):
        t = self.tok
        if self.accept("refl"):
            return SERefl(self.parse_atom(), self.join(t.span, self.last_span()))
        if t.kind == "ident" and t.text == "inv":
            self.advance()
            return SEInv(self.parse_eatom(), self.join(t.span, self.last_span()))
        if t.kind == "ident" and t.text == "compose":
            self.advance()
            e2 = self.parse_eatom()
            e1 = self.parse_eatom()
            return SECompose(e2, e1, self.join(t.span, self.last_span()))
        if t.kind == "ident" and t.text == "resp":
            self.advance()
            fn = self.parse_atom()
            return SEResp(fn, self.parse_eatom(), self.join(t.span, self.last_span()))
        return self.parse_eatom()

    def parse_eatom(self):
        t = self.tok
        if t.kind == "ident" and t.text not in ("inv", "compose", "resp"):
            self.advance()
            return SEBase(t.text, t.span)
        if self.accept("("):
            e = self.parse_eexpr()
            self.expect(")")
            return e
        self.error(["identifier", "("], f"expected an equivalence, found {t.text or 'end of input'!r}")


def parse(source: str, filename: str = "<input>") -> list[SurfaceDecl]:
    return Parser(source, filename).parse_file()


def parse_expr(source: str, filename: str = "<expr>"):
    p = Parser(source, filename)
    e = p.parse_expr()
    if p.tok.kind != "eof":
        p.error(["end of input"])
    return e


# ---- resolution ------------------------------------------------------------------------------

_CONST0 = {
    "Nat": S.Nat(), "Bool": S.Bool(), "Unit": S.Unit(), "Bottom": S.Bottom(),
    "zero": S.Zero(), "true": S.TrueT(), "false": S.FalseT(), "star": S.Star(), "nil": S.Nil(),
}

_BUILD = {
    "succ": S.Succ, "List": S.List, "Trunc": S.Trunc, "refl": S.Refl, "tin": S.TruncIn,
    "inl": S.Inl, "inr": S.Inr, "cons": S.Cons, "pair": S.Pair, "Id": S.Id,
    "rec_Sigma": S.SigmaRec, "rec_Sum": S.SumRec, "rec_Unit": S.UnitRec, "rec_Bottom": S.BottomRec,
    "rec_Trunc": S.TruncRec, "rec_Bool": S.BoolRec, "rec_N": S.NatRec, "rec_List": S.ListRec, "J": S.J,
}


class Resolver:
    """Turns surface syntax into de Bruijn terms.

    ``constants`` are the names already declared; ``equivs`` maps generator
    and judgement names to their ``EquivDecl``.
    """

    def __init__(self, constants: Iterable[str] = (), equivs: Optional[dict] = None,
                 filename: str = "<input>"):
        self.constants = set(constants)
        self.equivs: dict[str, EquivDecl] = dict(equivs or {})
        self.filename = filename

    def err(self, code, msg, span):
        raise ScopeError(msg, span, filename=self.filename, code=code)

    def term(self, e, env: tuple = ()) -> Term:
        match e:
            case SName(name, span):
                for i, n in enumerate(reversed(env)):
                    if n == name:
                        return S.Var(i)
                if name in self.constants:
                    return S.Const(name)
                self.err("unbound", f"unbound identifier {name}", span)
            case SNum(n, _):
                return S.numeral(n)
            case SUniverse(level, _):
                return S.Universe(level)
            case SPrim() | SApp():
                return self.spine(e, env)
            case SLam(name, body, _):
                return S.Lam(self.term(body, env + (name,)))
            case SBinder(op, name, dom, body, _):
                d = self.term(dom, env)
                b = self.term(body, env + (name or "",)) if name else S.shift(self.term(body, env), 0, 1)
                return S.Pi(d, b) if op == "->" else S.Sigma(d, b)
            case SSum(l, r, _):
                return S.Sum(self.term(l, env), self.term(r, env))
            case STuple(items, _):
                out = self.term(items[-1], env)
                for it in reversed(items[:-1]):
                    out = S.Pair(self.term(it, env), out)
                return out
            case SList(items, _):
                out: Term = S.Nil()
                for it in reversed(items):
                    out = S.Cons(self.term(it, env), out)
                return out
            case SIf(scrut, motive, th, el, _):
                return S.BoolRec(self.binding(motive, 1, env), self.term(th, env),
                                 self.term(el, env), self.term(scrut, env))
            case SMap(fam, ev, subj, _):
                return S.EMap(self.binding(fam, 1, env), self.equiv(ev, env), self.term(subj, env))
        raise TypeError(f"not a surface expression: {e!r}")

    def binding(self, e, k: int, env: tuple) -> Term:
        """An argument under ``k`` binders: peel a syntactic ``fun``, otherwise weaken."""
        if k == 0:
            return self.term(e, env)
        names = []
        cur = e
        while len(names) < k and isinstance(cur, SLam):
            names.append(cur.name)
            cur = cur.body
        if len(names) == k:
            return self.term(cur, env + tuple(names))
        return S.shift(self.term(e, env), 0, k)

    def spine(self, e, env) -> Term:
        head, args = (e.fn, list(e.args)) if isinstance(e, SApp) else (e, [])
        if isinstance(head, SPrim):
            name = head.name
            arity = PRIMITIVES[name]
            if len(args) < len(arity):
                self.err("syntax", f"{name} expects {len(arity)} argument(s), got {len(args)}", e.span)
            if name in _CONST0:
                out = _CONST0[name]
            else:
                out = _BUILD[name](*(self.binding(a, k, env) for a, k in zip(args, arity)))
            args = args[len(arity):]
        else:
            out = self.term(head, env)
        for a in args:
            out = S.App(out, self.term(a, env))
        return out

    def equiv(self, e, env: tuple = ()) -> S.EquivExpr:
        match e:
            case SERefl(subject, _):
                return S.ERefl(self.term(subject, env))
            case SEInv(x, _):
                return S.EInv(self.equiv(x, env))
            case SECompose(e2, e1, _):
                return S.ECompose(self.equiv(e2, env), self.equiv(e1, env))
            case SEResp(fn, x, _):
                return S.EResp(self.binding(fn, 1, env), self.equiv(x, env))
            case SEBase(name, span):
                d = self.equivs.get(name)
                if d is None:
                    self.err("unbound", f"unbound equivalence {name}", span)
                if env:
                    return S.EBase(name, S.shift(d.lhs, 0, len(env)), S.shift(d.rhs, 0, len(env)))
                return S.EBase(name, d.lhs, d.rhs)
        raise TypeError(f"not an equivalence expression: {e!r}")

    def decl(self, d: SurfaceDecl):
        if d.name in self.constants or d.name in self.equivs:
            self.err("duplicate", f"duplicate definition {d.name}", d.span)
        if d.kind in ("def", "axiom"):
            out = Declaration(d.name, self.term(d.type), None if d.body is None else self.term(d.body),
                              d.kind == "axiom", d.span)
            self.constants.add(d.name)
            return out
        ed = EquivDecl(d.name, self.term(d.lhs), self.term(d.rhs), self.term(d.type),
                       None if d.body is None else self.equiv(d.body), d.span)
        self.equivs[d.name] = ed
        return ed


def resolve(decls: Sequence[SurfaceDecl], constants: Iterable[str] = (),
            equivs: Optional[dict] = None, filename: str = "<input>") -> list:
    """Resolve a file's declarations in order.  Earlier names are visible to later ones."""
    r = Resolver(constants, equivs, filename)
    return [r.decl(d) for d in decls]


def resolve_expr(e, constants: Iterable[str] = (), names: Sequence[str] = (),
                 equivs: Optional[dict] = None) -> Term:
    return Resolver(constants, equivs).term(e, tuple(names))


def parse_term(source: str, constants: Iterable[str] = (), names: Sequence[str] = (),
               equivs: Optional[dict] = None) -> Term:
    return resolve_expr(parse_expr(source), constants, names, equivs)


def load_source(source: str, constants: Iterable[str] = (), equivs: Optional[dict] = None,
                filename: str = "<input>") -> list:
    return resolve(parse(source, filename), constants, equivs, filename)


# ---- pretty printing --------------------------------------------------------------------------

_ARROW, _SUM, _PROD, _APP, _ATOM = range(5)
_NAME_RE = re.compile(r"([A-Za-z_]+)[0-9]+\Z")


class Printer:
    def __init__(self, raw: bool = False, prefix: str = "x"):
        self.raw = raw
        self.prefix = prefix

    def fresh(self, names: list) -> str:
        return f"{self.prefix}{len(names)}"

    def wrap(self, s: str, level: int, need: int) -> str:
        return f"({s})" if level < need else s

    def pp(self, t: Term, names: list, need: int = _ARROW) -> str:
        s, level = self._pp(t, names)
        return self.wrap(s, level, need)

    def bind(self, body: Term, k: int, names: list, need: int) -> str:
        if k == 0:
            return self.pp(body, names, need)
        if type(body) is not S.Lam and not any(S.occurs(body, i) for i in range(k)):
            return self.pp(S.shift(body, 0, -k), names, need)
        inner = list(names)
        bound = []
        for _ in range(k):
            n = self.fresh(inner)
            bound.append(n)
            inner.append(n)
        return self.wrap(f"fun {' '.join(bound)} => {self.pp(body, inner)}", _ARROW, need)

    def prim(self, name: str, parts: list) -> tuple[str, int]:
        return " ".join([name] + parts), _APP

    def _pp(self, t: Term, names: list) -> tuple[str, int]:
        pp = self.pp
        match t:
            case S.Var(i):
                if i < len(names):
                    return names[-1 - i], _ATOM
                return f"#{i}", _ATOM
            case S.Const(name):
                return name, _ATOM
            case S.Universe(level):
                return f"U{level}", _ATOM
            case S.Pi(dom, cod) | S.Sigma(dom, cod):
                arrow = type(t) is S.Pi
                op = "->" if arrow else "*"
                if S.occurs(cod, 0):
                    n = self.fresh(names)
                    body = pp(cod, names + [n], _ARROW if arrow else _PROD)
                    return f"({n} : {pp(dom, names)}) {op} {body}", _ARROW if arrow else _PROD
                c = S.shift(cod, 0, -1)
                if arrow:
                    return f"{pp(dom, names, _SUM)} -> {pp(c, names, _ARROW)}", _ARROW
                return f"{pp(dom, names, _APP)} * {pp(c, names, _PROD)}", _PROD
            case S.Lam():
                inner = list(names)
                bound = []
                while type(t) is S.Lam:
                    n = self.fresh(inner)
                    bound.append(n)
                    inner.append(n)
                    t = t.body
                return f"fun {' '.join(bound)} => {pp(t, inner)}", _ARROW
            case S.App():
                fn, args = t, []
                while type(fn) is S.App:
                    args.append(fn.arg)
                    fn = fn.fn
                parts = [pp(fn, names, _APP)] + [pp(a, names, _ATOM) for a in reversed(args)]
                return " ".join(parts), _APP
            case S.Sum(l, r):
                return f"{pp(l, names, _SUM)} + {pp(r, names, _PROD)}", _SUM
            case S.Pair():
                items = []
                while type(t) is S.Pair:
                    items.append(pp(t.a, names))
                    t = t.b
                items.append(pp(t, names))
                return f"({', '.join(items)})", _ATOM
            case S.Zero():
                return ("zero" if self.raw else "0"), _ATOM
            case S.Succ(n):
                k = S.as_numeral(t)
                if k is not None and not self.raw:
                    return str(k), _ATOM
                return self.prim("succ", [pp(n, names, _ATOM)])
            case S.Nil():
                return "nil", _ATOM
            case S.Cons(h, tl):
                items = []
                cur = t
                while type(cur) is S.Cons:
                    items.append(cur.head)
                    cur = cur.tail
                if type(cur) is S.Nil and not self.raw:
                    return f"[{', '.join(pp(i, names) for i in items)}]", _ATOM
                return self.prim("cons", [pp(h, names, _ATOM), pp(tl, names, _ATOM)])
            case S.BoolRec(m, on_t, on_f, scrut):
                return (f"if {pp(scrut, names)} return {self.bind(m, 1, names, _ARROW)} "
                        f"then {pp(on_t, names)} else {pp(on_f, names)}"), _ARROW
            case S.EMap(fam, e, subj):
                return self.prim("map", [self.bind(fam, 1, names, _ATOM), self.equiv(e, names, True),
                                         pp(subj, names, _ATOM)])
        for name, val in _CONST0.items():
            if t == val:
                return name, _ATOM
        for name, cls in _BUILD.items():
            if type(t) is cls:
                arity = PRIMITIVES[name]
                fields = [getattr(t, f) for f, _ in t._spec]
                return self.prim(name, [self.bind(v, k, names, _ATOM) for v, k in zip(fields, arity)])
        raise TypeError(f"cannot print {t!r}")

    def equiv(self, e: S.EquivExpr, names: list, atom: bool = False) -> str:
        match e:
            case S.EBase(name, _, _):
                return name
            case S.ERefl(subject):
                s = f"refl {self.pp(subject, names, _ATOM)}"
            case S.EInv(x):
                s = f"inv {self.equiv(x, names, True)}"
            case S.ECompose(e2, e1):
                s = f"compose {self.equiv(e2, names, True)} {self.equiv(e1, names, True)}"
            case S.EResp(fn, x):
                s = f"resp {self.bind(fn, 1, names, _ATOM)} {self.equiv(x, names, True)}"
            case _:
                raise TypeError(f"not an equivalence expression: {e!r}")
        return f"({s})" if atom else s


def _prefix_for(t) -> str:
    taken = set()
    for c in _all_constants(t):
        m = _NAME_RE.match(c)
        if m:
            taken.add(m.group(1))
    prefix = "x"
    while prefix in taken:
        prefix += "_"
    return prefix


def _all_constants(*nodes) -> set[str]:
    out = set()
    for n in nodes:
        if n is None:
            continue
        out |= S.constants(n)
        stack = [n]
        while stack:
            u = stack.pop()
            if type(u) is S.EBase:
                out.add(u.name)
            stack.extend(c for c, _ in S.children(u))
    return out


def pretty_print(t, ctx: S.Context = (), names: Optional[Sequence[str]] = None, raw: bool = False) -> str:
    """Render a term (or equivalence expression) re-parseably.

    Bound variables are named ``x<depth>``; free variables take ``names`` or
    default to the same scheme for the context.
    """
    prefix = _prefix_for(t)
    if names is None:
        n = len(ctx) if ctx else S.free_bound(t) if isinstance(t, S.Node) else 0
        names = [f"{prefix}{i}" for i in range(n)]
    pr = Printer(raw, prefix)
    if isinstance(t, S.EquivExpr):
        return pr.equiv(t, list(names))
    return pr.pp(t, list(names))


def format_decl(d, raw: bool = False) -> str:
    match d:
        case Declaration(name=name, type=ty, body=body, is_axiom=True):
            return f"axiom {name} : {pretty_print(ty, raw=raw)}"
        case Declaration(name=name, type=ty, body=body):
            return f"def {name} : {pretty_print(ty, raw=raw)}\n  := {pretty_print(body, raw=raw)}"
        case EquivDecl(name=name, lhs=lhs, rhs=rhs, ty=ty, evidence=ev):
            head = f"{pretty_print(lhs, raw=raw)} ~ {pretty_print(rhs, raw=raw)} : {pretty_print(ty, raw=raw)}"
            if ev is None:
                return f"equiv {name} : {head}"
            return f"judge {name} : {head}\n  := {pretty_print(ev, raw=raw)}"
    raise TypeError(f"not a declaration: {d!r}")


def format_decls(decls: Sequence, raw: bool = False) -> str:
    return "".join(format_decl(d, raw) + "\n\n" for d in decls)


def format_source(source: str, constants: Iterable[str] = (), equivs: Optional[dict] = None,
                  filename: str = "<input>") -> str:
    return format_decls(load_source(source, constants, equivs, filename))
