"""A small Martin-Löf type theory kernel with a canonicity harness and a 2DTT fragment."""

from .syntax import Declaration, EquivDecl, Span, Term
from .evaluator import FuelExhausted, Globals, classify_canonical, convertible, normalize
from .kernel import TypeCheckError, check, check_context, check_declaration, check_substitution, infer
from .parser import ParseError, ScopeError, parse, pretty_print, resolve
from .corpus import CorpusError, load_corpus, verify_corpus
from .canonicity import enumerate_closed, scan, stuck_univalence_witness
from .twodim import bool_canonicity, check_equiv, interp, reduce_equiv

__all__ = [
    "Declaration", "EquivDecl", "Span", "Term",
    "FuelExhausted", "Globals", "classify_canonical", "convertible", "normalize",
    "TypeCheckError", "check", "check_context", "check_declaration", "check_substitution", "infer",
    "ParseError", "ScopeError", "parse", "pretty_print", "resolve",
    "CorpusError", "load_corpus", "verify_corpus",
    "enumerate_closed", "scan", "stuck_univalence_witness",
    "bool_canonicity", "check_equiv", "interp", "reduce_equiv",
]
