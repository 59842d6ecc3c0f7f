from pathlib import Path

import pytest

from mltt.corpus import (
    MANDATORY, CorpusError, load_corpus, load_manifest, parse_manifest, verify_corpus,
)
from mltt.evaluator import convertible, normalize
from mltt.kernel import infer
from mltt.parser import parse_term, pretty_print


def nf(text, g, names=(), ctx=()):
    return normalize(ctx, parse_term(text, g.names(), names), g)


def same(a, b, g, names=()):
    assert nf(a, g, names) == nf(b, g, names), f"{a} vs {b}"


def test_corpus_verifies_with_every_mandatory_name():
    rep = verify_corpus()
    assert rep.ok, rep.text()
    assert rep.missing == []
    assert set(MANDATORY) <= rep.names
    assert rep.seconds < 10


def test_univalence_needs_axioms():
    rep = verify_corpus(allow_axioms=False)
    assert not rep.ok
    assert rep.failure.decl == "univ"
    assert rep.failure.cause.code == "axiom-forbidden"


def test_axiom_free_corpus_has_no_axioms(corpus):
    assert all(d.body is not None for d in corpus)
    assert "univ" not in corpus.names()


def test_corpus_decls_are_well_typed_in_isolation(corpus_axioms):
    for d in corpus_axioms:
        infer((), d.type, corpus_axioms)


# ---- computational behaviour ------------------------------------------------------------------

def test_ap_on_refl(corpus):
    same("ap Nat Nat (fun x => x) 0 0 (refl 0)", "refl 0", corpus)


def test_transport_along_refl_is_identity(corpus):
    same("transport Nat (fun n => Bool) 2 2 (refl 2) true", "true", corpus)
    t = parse_term("fun b => transport Nat (fun n => Bool) 1 1 (refl 1) b", corpus.names())
    assert normalize((), t, corpus) == parse_term("fun b => b", ())


def test_trans_and_sym_on_refl(corpus):
    same("trans Nat 3 3 3 (refl 3) (refl 3)", "refl 3", corpus)
    same("sym Bool true true (refl true)", "refl true", corpus)


def test_uniq_coprod_on_injections(corpus):
    same("uniq_coprod Nat Bool (inl 2)", "inl (2, refl (inl 2))", corpus)
    same("uniq_coprod Nat Bool (inr false)", "inr (false, refl (inr false))", corpus)


def test_based_contr_at_centre(corpus):
    same("based_contr Nat 1 (1, refl 1)", "refl (1, refl 1)", corpus)


def test_j_from_transport_agrees_with_j_at_refl(corpus):
    motive = "(fun x p => Id Nat x x)"
    same(f"j_from_transport Nat 4 {motive} (refl 4) 4 (refl 4)",
         f"J 4 {motive} (refl 4) 4 (refl 4)", corpus)


def test_unbased_j_at_refl(corpus):
    same("unbased_j Nat (fun x y p => Nat) (fun x => succ x) 2 2 (refl 2)", "3", corpus)


def test_arithmetic(corpus):
    same("nat_add 3 4", "7", corpus)
    same("double 5", "10", corpus)
    same("list_fold Nat Nat nat_add 0 (cons 1 (cons 2 (cons 3 nil)))", "6", corpus)


def test_unary_naturals_agree(corpus):
    for n in range(6):
        same(f"from_unary (double' (to_unary {n}))", str(2 * n), corpus)
        same(f"from_unary (to_unary {n})", str(n), corpus)


def test_propositions(corpus):
    same("unit_isProp star star", "refl star", corpus)
    assert pretty_print(nf("trunc_demo", corpus)) == "tin 3"


def test_corpus_terms_convertible_with_their_normal_forms(corpus):
    for d in corpus:
        if d.body is not None:
            v = normalize((), d.body, corpus)
            assert convertible((), d.body, v, d.type, corpus)


# ---- manifest ---------------------------------------------------------------------------------

def test_manifest_order_and_flags():
    m = load_manifest()
    assert m.entries[0].file == "logic.mltt"
    assert [e.file for e in m.entries if e.allow_axioms] == ["univalence.mltt"]


@pytest.mark.parametrize("text,needle", [
    ("a.mltt\na.mltt\n", "listed twice"),
    ("a.mltt sometimes\n", "unknown flag"),
])
def test_manifest_errors(text, needle):
    with pytest.raises(CorpusError, match=needle):
        parse_manifest(text, Path("."))


def test_manifest_comments_and_blank_lines():
    m = parse_manifest("# header\n\nx.mltt  # note\ny.mltt allow-axioms\n", Path("."))
    assert [(e.file, e.allow_axioms) for e in m.entries] == [("x.mltt", False), ("y.mltt", True)]


def test_failure_names_file_and_declaration(tmp_path):
    (tmp_path / "MANIFEST").write_text("a.mltt\n")
    (tmp_path / "a.mltt").write_text("def ok : Nat := 0\ndef bad : Bool := 0\n")
    rep = verify_corpus(load_manifest(tmp_path))
    assert [c.name for c in rep.checked] == ["ok"]
    assert (rep.failure.file, rep.failure.decl) == ("a.mltt", "bad")
    assert "FAIL" in rep.text()
    with pytest.raises(CorpusError):
        verify_corpus(load_manifest(tmp_path), strict=True)


def test_missing_manifest(tmp_path):
    with pytest.raises(CorpusError):
        load_manifest(tmp_path)


def test_load_corpus_without_axioms():
    g = load_corpus(axioms=False)
    assert "univ" not in g.names()
    assert "trans" in g.names()


def test_corpus_does_not_rely_on_eta():
    rep = verify_corpus(eta=False)
    assert rep.ok, rep.text()
