import pytest
from hypothesis import given, settings, strategies as st

from mltt import syntax as S
from mltt.canonicity import Enumerator, enumerate_closed, scan, stuck_univalence_witness
from mltt.evaluator import Globals, classify_canonical, normalize
from mltt.kernel import check
from mltt.parser import load_source, parse_term

from raw_terms import raw_count

NAT, BOOL = S.Nat(), S.Bool()


# ---- raw generate-and-filter oracle -----------------------------------------------------------

@pytest.mark.parametrize("ty,expected", [(NAT, [1, 1, 1, 1]), (BOOL, [2, 0, 0, 0])], ids=["Nat", "Bool"])
def test_small_sizes_match_raw_oracle(ty, expected):
    en = Enumerator()
    raw = [raw_count(ty, n) for n in range(1, 5)]
    assert raw == expected
    assert [en.count(ty, n) for n in range(1, 5)] == raw


def test_enumerated_terms_are_distinct_and_sized():
    en = Enumerator.from_globals(None)
    for n in range(1, 10):
        ts = en.terms(NAT, n)
        assert len(ts) == len(set(ts)) == en.count(NAT, n)
        assert all(S.size(t) == n for t in ts)


# ---- independent counting recurrence ------------------------------------------------------------

def test_counts_follow_recurrence_with_a_unary_constant():
    # terms of Nat from zero, succ and f : Nat -> Nat:
    # c(1) = 1, c(n) = c(n-1) [succ] + c(n-2) [App f _]
    en = Enumerator({"f": S.arrow(NAT, NAT)}, recursors=False)
    c = {0: 0, 1: 1}
    for n in range(2, 16):
        c[n] = c[n - 1] + c[n - 2]
    assert [en.count(NAT, n) for n in range(1, 16)] == [c[n] for n in range(1, 16)]


def test_counts_with_two_argument_constant():
    # g : Bool -> Bool -> Bool over true, false: b(1) = 2, b(n) = sum over splits of b(i) b(j), i+j = n-3
    en = Enumerator({"g": S.arrow(BOOL, S.arrow(BOOL, BOOL))}, recursors=False)
    b = {1: 2}
    for n in range(2, 14):
        b[n] = sum(b.get(i, 0) * b.get(n - 3 - i, 0) for i in range(1, n - 3))
    assert [en.count(BOOL, n) for n in range(1, 14)] == [b[n] for n in range(1, 14)]


def test_count_snapshot_without_constants():
    en = Enumerator()
    assert [en.count(NAT, n) for n in range(1, 13)] == [1, 1, 1, 1, 7, 21, 46, 85, 294, 1103, 3469, 9167]
    assert [en.count(BOOL, n) for n in range(1, 13)] == [2, 0, 0, 0, 16, 6, 6, 6, 416, 430, 646, 946]


def test_bottom_is_empty():
    assert list(enumerate_closed(S.Bottom(), 12)) == []


def test_enumerate_rejects_bad_targets():
    with pytest.raises(ValueError):
        list(enumerate_closed(NAT, 0))
    with pytest.raises(ValueError):
        enumerate_closed(S.Id(NAT, S.Zero(), S.Zero()), 3)


def test_enumerated_terms_typecheck(corpus):
    en = Enumerator.from_globals(corpus)
    for ty in (NAT, BOOL, S.Unit()):
        for t in en.enumerate(ty, 8):
            check((), t, ty, corpus)


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1), st.integers(13, 20))
def test_samples_typecheck(corpus, seed, size):
    import random
    en = Enumerator.from_globals(corpus)
    t = en.sample(NAT, size, random.Random(seed))
    if t is not None:
        assert S.size(t) == size
        check((), t, NAT, corpus)


# ---- scans -------------------------------------------------------------------------------------

def test_axiom_free_scan_is_canonical(corpus):
    rep = scan(NAT, 9, corpus, use_oracle=True)
    rep = scan(BOOL, 9, corpus, use_oracle=True, report=rep)
    assert rep.ok and rep.stuck == 0 and rep.population > 1000
    assert rep.oracle_checked == rep.population
    assert "0 stuck" in rep.text()


def test_eager_mode_agrees_on_first_order_types(corpus):
    lazy = scan(NAT, 8, corpus, "lazy")
    eager = scan(NAT, 8, corpus, "eager")
    assert lazy.canonical == eager.canonical == lazy.population


def test_sampling_is_seeded(corpus):
    a = scan(NAT, 6, corpus, samples=30, sample_max=14, seed=7)
    b = scan(NAT, 6, corpus, samples=30, sample_max=14, seed=7)
    assert a.tallies == b.tallies and a.tallies["Nat"].sampled == 30


def test_postulated_boolean_is_a_stuck_witness():
    g = Globals()
    for d in load_source("axiom b : Bool"):
        g.add(d)
    rep = scan(BOOL, 5, g)
    assert not rep.ok
    assert {w.head for w in rep.witnesses} == {"b"}
    assert rep.witnesses[0].tsv().startswith("Bool\t1\tb")


def test_univalence_witness_is_stuck(corpus_axioms):
    t = stuck_univalence_witness(corpus_axioms)
    check((), t, BOOL, corpus_axioms)
    nf = normalize((), t, corpus_axioms)
    cls = classify_canonical(nf, "lazy", corpus_axioms)
    assert cls.kind == "stuck" and cls.head == "univ"


def test_witness_with_refl_path_computes(corpus_axioms):
    t = stuck_univalence_witness(corpus_axioms, path=S.Refl(BOOL))
    assert normalize((), t, corpus_axioms) == S.TrueT()


def test_witness_needs_the_axiom(corpus):
    with pytest.raises(KeyError):
        stuck_univalence_witness(corpus)


def test_classification_modes():
    t = parse_term("(0, rec_N Nat 0 (fun k r => r) 2)", ())
    assert classify_canonical(t, "lazy").kind == "canonical"
    assert classify_canonical(t, "eager").kind == "non-canonical"
    with pytest.raises(ValueError):
        classify_canonical(S.Var(0))
