"""Command-line front end.

Exit status: 0 success, 1 type or parse error, 2 canonicity violation, 3 usage error.
Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import syntax as S
from .canonicity import CanonicityReport, DEFAULT_SAMPLES, scan
from .corpus import CorpusError, load_file, load_manifest, verify_corpus
from .evaluator import FuelExhausted, Globals, evaluate, quote
from .kernel import Checker, Ctx, TypeCheckError
from .parser import ParseError, load_source, parse_term, pretty_print

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _natural(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    if n < 0:
        raise argparse.ArgumentTypeError(f"not a natural number: {text!r}")
    return n


def _positive(text: str) -> int:
    n = _natural(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--eta", choices=("on", "off"), default="on",
                        help="eta rules for functions, pairs and unit (default on)")
    common.add_argument("--allow-axioms", action="store_true",
                        help="accept axiom declarations in input files")
    common.add_argument("--max-universe", type=_natural, default=16, metavar="N",
                        help="largest universe level accepted (default 16)")
    common.add_argument("--raw", action="store_true", help="print numerals as succ towers")
    common.add_argument("--with", dest="with_files", action="append", default=[], metavar="FILE",
                        help="extra declaration file to load first (repeatable)")
    common.add_argument("--no-corpus", action="store_true",
                        help="do not preload the axiom-free corpus")

    p = _Parser(prog="mltt", description="Martin-Löf type theory kernel")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="check declaration files in order")
    c.add_argument("paths", nargs="+")

    n = sub.add_parser("normalize", parents=[common], help="print the normal form of an expression")
    n.add_argument("paths", nargs="*")
    n.add_argument("-e", "--expr", required=True)
    n.add_argument("--type", dest="types", action="append", default=[],
                   help="check the expression against this type instead of inferring")

    i = sub.add_parser("infer", parents=[common], help="print the type of an expression")
    i.add_argument("paths", nargs="*")
    i.add_argument("-e", "--expr", required=True)

    k = sub.add_parser("corpus", parents=[common], help="verify the corpus manifest")
    k.add_argument("--dir", help="corpus directory (default: $MLTT_CORPUS_DIR or ./corpus)")

    s = sub.add_parser("canonicity", parents=[common], help="scan closed terms for canonicity")
    s.add_argument("paths", nargs="*")
    s.add_argument("--type", dest="types", action="append", default=[],
                   help="type to scan (repeatable; default Nat and Bool)")
    s.add_argument("--mode", choices=("eager", "lazy"), default="lazy")
    s.add_argument("--size-budget", type=_positive, default=12, metavar="N")
    s.add_argument("--samples", type=_natural, default=0, metavar="N",
                   help=f"random terms per type above the budget (the acceptance run uses {DEFAULT_SAMPLES})")
    s.add_argument("--sample-max", type=_positive, default=20, metavar="N")
    s.add_argument("--seed", type=_natural, default=0)
    s.add_argument("--oracle", action="store_true", help="compare every normal form with the small-step reducer")
    s.add_argument("--max-witnesses", type=_natural, default=20)

    t = sub.add_parser("twodim-check", parents=[common], help="check two-dimensional fragment files")
    t.add_argument("paths", nargs="*")
    t.add_argument("--groupoid", action="append", default=[], metavar="TYPE",
                   help="context entry of a groupoid to print (repeatable)")
    t.add_argument("--max-length", type=_natural, default=4,
                   help="word length bound for infinite hom-sets (default 4)")
    t.add_argument("-e", "--expr", action="append", default=[],
                   help="closed boolean whose canonical value to print (repeatable)")
    return p


# ---- environment -------------------------------------------------------------------------------

class Session:
    def __init__(self, args, out, err):
        self.args = args
        self.out = out
        self.err = err
        self.eta = args.eta == "on"
        self.glob = Globals()

    def print(self, *xs):
        print(*xs, file=self.out)

    def diag(self, *xs):
        print(*xs, file=self.err)

    def show(self, t, names=()) -> str:
        return pretty_print(t, names=list(names), raw=self.args.raw)

    def load(self, path: str, allow_axioms: bool, report=None):
        p = Path(path)
        if not p.is_file():
            raise UsageError(f"cannot read {path}")
        return load_file(p, self.glob, allow_axioms, self.eta, self.args.max_universe,
                         on_checked=report)

    def preload(self, with_corpus: bool = True):
        if with_corpus and not self.args.no_corpus:
            try:
                manifest = load_manifest()
            except CorpusError as e:
                raise UsageError(str(e))
            for entry in manifest.entries:
                if not entry.allow_axioms:
                    load_file(manifest.root / entry.file, self.glob, False, self.eta,
                              self.args.max_universe)
        for f in self.args.with_files:
            self.load(f, self.args.allow_axioms)
        for f in getattr(self.args, "paths", ()):
            self.load(f, self.args.allow_axioms)

    def checker(self) -> Checker:
        return Checker(self.glob, self.eta, self.args.max_universe)

    def term(self, text: str) -> S.Term:
        return parse_term(text, self.glob.names())


def _where(e: CorpusError) -> str:
    cause = e.cause
    span = getattr(cause, "span", None)
    if isinstance(cause, ParseError):
        return str(cause)
    loc = f"{e.file}:{span.line}:{span.col}: " if span is not None else (f"{e.file}: " if e.file else "")
    return f"{loc}{e}"


# ---- commands ----------------------------------------------------------------------------------

def cmd_check(s: Session) -> int:
    for f in s.args.with_files:
        s.load(f, s.args.allow_axioms)
    for f in s.args.paths:
        s.load(f, s.args.allow_axioms, report=lambda c: s.print(f"OK {c.name}"))
    return EXIT_OK


def _typed_value(s: Session, text: str, types: Sequence[str]):
    chk = s.checker()
    t = s.term(text)
    if types:
        ty = s.term(types[0])
        chk.check_type(Ctx(), ty)
        tyv = chk.eval(Ctx(), ty)
        chk.check(Ctx(), t, tyv)
    else:
        tyv = chk.infer(Ctx(), t)
    return t, tyv


def cmd_normalize(s: Session) -> int:
    s.preload()
    t, _ = _typed_value(s, s.args.expr, s.args.types)
    s.print(s.show(quote(0, evaluate(t, (), s.glob))))
    return EXIT_OK


def cmd_infer(s: Session) -> int:
    s.preload()
    _, tyv = _typed_value(s, s.args.expr, ())
    s.print(s.show(quote(0, tyv)))
    return EXIT_OK


def cmd_corpus(s: Session) -> int:
    try:
        manifest = load_manifest(s.args.dir)
    except CorpusError as e:
        raise UsageError(str(e))
    rep = verify_corpus(manifest, True if s.args.allow_axioms else None, s.eta, s.args.max_universe)
    for c in rep.checked:
        s.print(f"OK {c.file} {c.name}")
    s.diag(f"checked {len(rep.checked)} declarations in {rep.seconds:.2f} s")
    if rep.failure is not None:
        s.diag(_where(rep.failure))
        return EXIT_ERROR
    if rep.missing:
        s.diag("missing mandatory declarations: " + ", ".join(rep.missing))
        return EXIT_ERROR
    s.print(f"corpus ok: {len(rep.checked)} declarations")
    return EXIT_OK


def cmd_canonicity(s: Session) -> int:
    s.preload()
    a = s.args
    types = a.types or ["Nat", "Bool"]
    rep: Optional[CanonicityReport] = None
    t0 = time.perf_counter()
    for text in types:
        ty = s.term(text)
        s.checker().check_type(Ctx(), ty)
        rep = scan(ty, a.size_budget, s.glob, a.mode, a.samples, a.sample_max, a.seed,
                   a.oracle, report=rep)
    assert rep is not None
    s.print(rep.text(a.max_witnesses))
    s.diag(f"scanned {rep.population} terms in {time.perf_counter() - t0:.2f} s")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_twodim(s: Session) -> int:
    from .twodim import FragmentSession, bool_canonicity
    a = s.args
    paths = a.paths
    a.paths = []
    s.preload()
    fs = FragmentSession(s.glob, eta=s.eta, allow_axioms=a.allow_axioms, max_universe=a.max_universe)
    for f in paths:
        p = Path(f)
        if not p.is_file():
            raise UsageError(f"cannot read {f}")
        try:
            items = load_source(p.read_text(), s.glob.names(), fs.equivs, filename=str(p))
        except ParseError as e:
            raise CorpusError(str(e), p.name, cause=e) from e
        for item in items:
            try:
                s.print(fs.add(item).line())
            except TypeCheckError as e:
                raise CorpusError(str(e), p.name, item.name, e) from e
    for text in a.expr:
        m = parse_term(text, s.glob.names(), equivs=fs.equivs)
        s.print(f"{text} ~> {'true' if bool_canonicity(m, s.glob, fs.equivs, s.eta) else 'false'}")
    if a.groupoid:
        ctx = []
        for text in a.groupoid:
            ty = parse_term(text, s.glob.names())
            s.checker().check_type(Ctx(), ty)
            ctx.append(ty)
        g = fs.groupoid(ctx, max_length=a.max_length)
        s.print(g.dump())
        bad = g.check_laws()
        if bad:
            s.diag("\n".join(bad))
            return EXIT_ERROR
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "normalize": cmd_normalize,
    "infer": cmd_infer,
    "corpus": cmd_corpus,
    "canonicity": cmd_canonicity,
    "twodim-check": cmd_twodim,
}


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    s = Session(args, out, err)
    try:
        return COMMANDS[args.command](s)
    except UsageError as e:
        print(f"mltt: error: {e}", file=err)
        return EXIT_USAGE
    except CorpusError as e:
        print(_where(e), file=err)
        return EXIT_ERROR
    except ParseError as e:
        print(str(e), file=err)
        return EXIT_ERROR
    except TypeCheckError as e:
        loc = f"{e.span.line}:{e.span.col}: " if e.span is not None else ""
        print(f"{loc}{e}", file=err)
        return EXIT_ERROR
    except FuelExhausted as e:
        print(f"mltt: {e}", file=err)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())
