import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wikicite.lexicon import JournalLexicon
from wikicite.matrix import (
    SparseCountMatrix,
    build_matrix,
    exclude_journals,
    load_matrix,
    matrix_stats,
    save_matrix,
    top_cited_journals,
)
from wikicite.wikitext import CitationInstance

RSB = "Proceedings of the Royal Society of London, Series B, Biological Sciences"


def cits(*pairs):
    return [CitationInstance(a, j, f"@{i}") for i, (a, j) in enumerate(pairs)]


@pytest.fixture
def three():
    return build_matrix(cits(("A", "Nature"), ("A", "Nature"), ("B", "Cell")))


def test_build_three(three):
    assert three.shape == (2, 2)
    assert three.row_labels == ("A", "B")
    assert three.col_labels == ("Nature", "Cell")
    assert three.labelled_entries() == {("A", "Nature"): 2, ("B", "Cell"): 1}
    assert matrix_stats(three)["total_count"] == 3


def test_build_empty():
    m = build_matrix([])
    assert m.shape == (0, 0)
    assert m.nnz == 0
    assert matrix_stats(m) == {"n_rows": 0, "n_cols": 0, "nnz": 0, "total_count": 0, "density": 0.0}


def test_variants_collapse_to_canonical(lexicon):
    m = build_matrix(cits(("A", "proc r soc lond b biol sci"), ("A", "Proc R Soc Lond B Biol Sci.")), lexicon)
    assert m.col_labels == (RSB,)
    assert m.labelled_entries() == {("A", RSB): 2}


def test_empty_journals_dropped():
    diag = Counter()
    m = build_matrix(cits(("A", ""), ("A", "  "), ("B", "Cell")), JournalLexicon(), diag)
    assert m.shape == (1, 1)
    assert diag["empty_journal"] == 2


def test_stats(three):
    s = matrix_stats(three)
    assert s["nnz"] == 2
    assert s["density"] == 0.5


def test_top_cited(three):
    assert top_cited_journals(three, 5) == [("Nature", 2), ("Cell", 1)]
    assert top_cited_journals(three, 1) == [("Nature", 2)]


def test_top_cited_ties_by_name():
    m = build_matrix(cits(("A", "Zeta"), ("B", "Alpha"), ("C", "Mu")))
    assert top_cited_journals(m, 3) == [("Alpha", 1), ("Mu", 1), ("Zeta", 1)]


def test_exclude_drops_empty_rows(three):
    m = exclude_journals(three, ["Nature"])
    assert m.shape == (1, 1)
    assert m.labelled_entries() == {("B", "Cell"): 1}
    assert three.shape == (2, 2)


def test_exclude_nothing(three):
    assert exclude_journals(three, []) == three
    diag = Counter()
    assert exclude_journals(three, ["Nonexistent"], diag) == three
    assert diag["exclude_missing"] == 1


def test_round_trip(tmp_path, lexicon):
    m = build_matrix(cits(("Ä b", "Nature"), ("A", "J Biol Chem"), ("A", "Cell"), ("Ä b", "Cell")), lexicon)
    save_matrix(m, tmp_path / "m")
    assert load_matrix(tmp_path / "m") == m
    header = (tmp_path / "m" / "matrix.txt").read_text().splitlines()[0]
    assert header == "2 3 4"


def test_round_trip_empty(tmp_path):
    save_matrix(build_matrix([]), tmp_path / "m")
    assert load_matrix(tmp_path / "m").shape == (0, 0)


def test_tocsr_matches_dense(three):
    np.testing.assert_array_equal(three.tocsr().toarray(), three.toarray())


citation_lists = st.lists(
    st.tuples(st.sampled_from("ABCDE"), st.sampled_from(["Nature", "Cell", "", "Gene", "gene", "Cell."])),
    max_size=40)


@given(citation_lists)
def test_conservation(pairs):
    m = build_matrix(cits(*pairs))
    assert matrix_stats(m)["total_count"] == sum(1 for _, j in pairs if j.strip(". "))
    assert (m.counts >= 1).all()
    assert len(set(m.row_labels)) == len(m.row_labels)
    assert len(set(m.col_labels)) == len(m.col_labels)


@given(citation_lists, st.integers(0, 1000))
def test_permutation_changes_only_order(pairs, seed):
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    assert build_matrix(cits(*shuffled)).labelled_entries() == build_matrix(cits(*pairs)).labelled_entries()


@given(citation_lists, st.lists(st.sampled_from(["Nature", "Cell", "Gene", "X"]), max_size=3))
def test_exclusion_soundness(pairs, names):
    m = exclude_journals(build_matrix(cits(*pairs)), names)
    assert not set(names) & set(m.col_labels)
    assert set(m.rows.tolist()) == set(range(m.shape[0]))
    assert isinstance(m, SparseCountMatrix)
