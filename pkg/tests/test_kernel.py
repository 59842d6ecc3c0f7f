import pytest

from mltt import syntax as S
from mltt.canonicity import Enumerator
from mltt.evaluator import FuelExhausted, normalize
from mltt.kernel import (
    TypeCheckError, check, check_context, check_declaration, check_declarations,
    check_substitution, infer,
)
from mltt.parser import load_source, parse_term
from mltt.syntax import App, Declaration, Var

U0 = S.Universe(0)


def term(text, names=(), glob=None):
    return parse_term(text, glob.names() if glob is not None else (), names)


def code_of(fn, *args, **kw):
    with pytest.raises(TypeCheckError) as ei:
        fn(*args, **kw)
    return ei.value.code


# ---- contexts --------------------------------------------------------------------------------------

def test_contexts():
    check_context([])
    check_context([U0, Var(0)])
    assert code_of(check_context, [S.Zero()]) == "not-a-type"


# ---- inference --------------------------------------------------------------------------------------

def test_infer_identity(corpus):
    assert infer((), S.Const("id"), corpus) == S.Pi(U0, S.Pi(Var(0), Var(1)))


def test_infer_refl():
    assert infer((), S.Refl(S.Zero())) == S.Id(S.Nat(), S.Zero(), S.Zero())


def test_infer_errors():
    assert code_of(infer, (), App(S.Zero(), S.Zero())) == "not-a-function"
    assert code_of(infer, (), term("fun x => x")) == "cannot-infer"
    assert code_of(infer, (), S.Const("nope")) == "unbound"
    assert code_of(infer, (), Var(0)) == "unbound"
    assert code_of(infer, (), term("rec_Bottom (fun e => Nat) 0")) == "bad-scrutinee"


def test_universes_are_not_cumulative():
    assert infer((), U0) == S.Universe(1)
    assert infer((), S.Pi(U0, S.Nat())) == S.Universe(1)
    # a U0 type is not an element of U1
    assert code_of(check, (), S.Nat(), S.Universe(1)) == "mismatch"
    assert code_of(infer, (), S.Universe(3), max_universe=2) == "universe-violation"


# ---- checking --------------------------------------------------------------------------------------

def test_check_k_combinator():
    ty = term("(A B : U0) -> A -> B -> A")
    check((), term("fun A B a b => a"), ty)


def test_check_refl_unequal_endpoints():
    assert code_of(check, (), S.Refl(S.Zero()), S.Id(S.Nat(), S.Zero(), S.numeral(1))) == "mismatch"


def test_check_dependent_pair():
    ty = term("(x : Nat) * Id Nat x 0")
    check((), term("(0, refl 0)"), ty)
    assert code_of(check, (), term("(1, refl 0)"), ty) == "mismatch"


def test_mismatch_reports_both_types():
    with pytest.raises(TypeCheckError) as ei:
        check((), S.TrueT(), S.Nat())
    e = ei.value
    assert "expected Nat" in e.message and "got Bool" in e.message
    assert (e.expected, e.actual) == (S.Nat(), S.Bool())


def test_motive_must_be_family():
    t = term("rec_Sum (fun s => 0) (fun a => a) (fun b => b) x", ["x"])
    assert code_of(check, [S.Sum(S.Nat(), S.Nat())], t, S.Nat()) == "not-a-type"


def test_eta_flag_affects_checking():
    # refl f : f = fun x => f x needs eta
    ctx = [S.arrow(S.Nat(), S.Nat())]
    ty = term("Id (Nat -> Nat) f (fun x => f x)", ["f"])
    check(ctx, term("refl f", ["f"]), ty, eta=True)
    assert code_of(check, ctx, term("refl f", ["f"]), ty, eta=False) == "mismatch"


# ---- declarations -------------------------------------------------------------------------------------

def test_axioms_need_the_flag():
    ax = Declaration("univ_like", U0, is_axiom=True)
    assert code_of(check_declaration, [], ax) == "axiom-forbidden"
    check_declaration([], ax, allow_axioms=True)


def test_bad_definition_reports_name_and_span():
    d = load_source("def bad : Id Nat 0 1 := refl 0", filename="t")[0]
    with pytest.raises(TypeCheckError) as ei:
        check_declaration([], d)
    assert ei.value.code == "mismatch"
    assert ei.value.decl == "bad"
    assert ei.value.span is not None and ei.value.span.line == 1


def test_duplicate_declaration():
    d = Declaration("a", S.Nat(), S.Zero())
    g = check_declarations([d])
    assert code_of(check_declaration, g, d) == "duplicate"


def test_fuel_is_distinct_from_type_errors(corpus):
    d = Declaration("big", S.Id(S.Nat(), parse_term("double (double 30)", corpus.names()), S.numeral(120)),
                    S.Refl(S.numeral(120)))
    with pytest.raises(FuelExhausted):
        check_declaration(corpus.copy(), d, fuel=50)
    check_declaration(corpus.copy(), d)


# ---- substitutions ----------------------------------------------------------------------------------------

def test_substitutions():
    check_substitution([], [S.Zero()], [S.Nat()])
    assert code_of(check_substitution, [], [S.Star()], [S.Nat()]) == "mismatch"
    ctx = [U0, Var(0)]
    check_substitution(ctx, [Var(1), Var(0)], ctx)
    # later components see earlier ones
    check_substitution([], [S.Bool(), S.TrueT()], [U0, Var(0)])
    assert code_of(check_substitution, [], [S.Bool(), S.Zero()], [U0, Var(0)]) == "mismatch"


# ---- properties over the enumerated population -------------------------------------------------------------

@pytest.mark.parametrize("ty,other", [(S.Nat(), S.Bool()), (S.Bool(), S.Nat())], ids=["Nat", "Bool"])
def test_subject_reduction_and_agreement(corpus, ty, other):
    en = Enumerator.from_globals(corpus)
    n = 0
    for t in en.enumerate(ty, 10):
        assert infer((), t, corpus) == ty
        assert infer((), normalize((), t, corpus), corpus) == ty
        check((), t, ty, corpus)
        with pytest.raises(TypeCheckError):
            check((), t, other, corpus)
        n += 1
    assert n > 1000


def test_corpus_bodies_preserve_types_under_normalization(corpus):
    for d in corpus:
        if d.body is None:
            continue
        check((), normalize((), d.body, corpus), d.type, corpus)
