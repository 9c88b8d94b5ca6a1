import math

import numpy as np
import pytest

from calltopics.corpus import SegmentDoc
from calltopics.errors import DataError
from calltopics.stopwords import ENGLISH_STOPWORDS
from calltopics.textprep import (
    Vocabulary,
    build_vocabulary,
    load_vocabulary,
    save_vocabulary,
    tokenize,
    vectorize,
    vocabulary_from_dict,
    vocabulary_to_dict,
    write_tfidf_csv,
)

# Hand-computed tf-idf for a two-document fit: doc 1 = "xx xx yy",
# doc 2 = "xx zz". idf(xx) = ln(3/3)+1 = 1, idf(yy) = idf(zz) = ln(3/2)+1.
# The terms are doubled single letters so they clear the minimum token
# length; term spelling does not enter the arithmetic.
IDF_RARE = 1.4054651081081644
ROW_1 = (0.8181802073667197, 0.5749618667993135, 0.0)
ROW_2 = (0.5797386715376657, 0.0, 0.8148024746671689)


def doc(doc_id, text):
    return SegmentDoc(doc_id=doc_id, call_id=doc_id.split("#")[0], segment_index=0, text=text)


# ---------------------------------------------------------------------------
# tokenize


def test_tokenize_strips_stopwords_and_punctuation():
    got = tokenize("I eh listen to the music in English")
    assert got == ["eh", "listen", "music", "english"]


def test_tokenize_empty_input():
    assert tokenize("") == []


def test_tokenize_drops_stopwords_case_insensitively():
    assert tokenize("THE The the") == []


def test_tokenize_fuses_apostrophes():
    # apostrophes count as punctuation, so contractions collapse inward
    assert tokenize("I'm sure we don't") == ["im", "sure", "dont"]
    assert tokenize("it’s fine", remove_stopwords=False) == ["its", "fine"]


def test_tokenize_drops_single_characters():
    assert tokenize("a b xy", remove_stopwords=False) == ["xy"]


def test_tokenize_strips_symbols():
    assert tokenize("pay $50 + tip", remove_stopwords=False) == ["pay", "50", "tip"]


def test_tokenize_keeps_stopwords_on_request():
    assert tokenize("listen to the music", remove_stopwords=False) == [
        "listen",
        "to",
        "the",
        "music",
    ]


def test_stopword_list_is_lowercase_and_nonempty():
    assert len(ENGLISH_STOPWORDS) > 100
    assert all(w == w.lower() for w in ENGLISH_STOPWORDS)


# ---------------------------------------------------------------------------
# vocabulary


def test_min_df_removes_rare_terms():
    docs = [doc("d1#0", "aa bb"), doc("d2#0", "aa cc"), doc("d3#0", "aa dd")]
    vocab = build_vocabulary(docs, min_df=2, max_df_ratio=1.0, max_terms=10)
    assert vocab.terms == ("aa",)


def test_max_df_removes_ubiquitous_terms():
    docs = [
        doc("d1#0", "aa bb"),
        doc("d2#0", "aa bb"),
        doc("d3#0", "aa bb"),
        doc("d4#0", "aa bb"),
        doc("d5#0", "aa bb"),
        doc("d6#0", "aa bb"),
        doc("d7#0", "aa bb"),
        doc("d8#0", "aa bb"),
        doc("d9#0", "aa bb"),
        doc("d10#0", "aa cc"),
        doc("d11#0", "bb cc"),
    ]
    # aa and bb appear in 10/11 docs, far over a 50% ceiling; cc in 2/11
    vocab = build_vocabulary(docs, min_df=2, max_df_ratio=0.5, max_terms=10)
    assert vocab.terms == ("cc",)


def test_max_terms_keeps_highest_total_count():
    docs = [
        doc("d1#0", "aa aa aa bb bb cc"),
        doc("d2#0", "aa aa aa bb bb cc"),
    ]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=2)
    assert vocab.terms == ("aa", "bb")


def test_max_terms_ties_break_lexicographically():
    docs = [doc("d1#0", "bb aa dd cc"), doc("d2#0", "bb aa dd cc")]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=3)
    assert vocab.terms == ("aa", "bb", "cc")


def test_vocabulary_order_is_lexicographic():
    docs = [doc("d1#0", "zz yy xx"), doc("d2#0", "zz yy xx")]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=10)
    assert vocab.terms == ("xx", "yy", "zz")


def test_empty_vocabulary_is_an_error():
    docs = [doc("d1#0", "aa"), doc("d2#0", "bb")]
    with pytest.raises(DataError, match="empty vocabulary"):
        build_vocabulary(docs, min_df=2, max_df_ratio=1.0, max_terms=10)


def test_vocabulary_records_fit_statistics():
    docs = [doc("d1#0", "xx xx yy"), doc("d2#0", "xx zz")]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=10)
    assert vocab.n_docs_fit == 2
    assert dict(zip(vocab.terms, vocab.doc_freq)) == {"xx": 2, "yy": 1, "zz": 1}


# ---------------------------------------------------------------------------
# tf-idf values


@pytest.fixture()
def fitted():
    docs = [doc("d1#0", "xx xx yy"), doc("d2#0", "xx zz")]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=10)
    return docs, vocab


def test_idf_matches_hand_computation(fitted):
    _, vocab = fitted
    idf = vocab.idf()
    assert abs(idf[0] - 1.0) < 1e-15
    assert abs(idf[1] - IDF_RARE) < 1e-15
    assert abs(idf[2] - IDF_RARE) < 1e-15


def test_tfidf_rows_match_hand_computation(fitted):
    docs, vocab = fitted
    m = vectorize(docs, vocab)
    dense = m.matrix.toarray()
    assert np.allclose(dense[0], ROW_1, atol=1e-12, rtol=0.0)
    assert np.allclose(dense[1], ROW_2, atol=1e-12, rtol=0.0)
    assert m.row_ids == ("d1#0", "d2#0")


def test_nonzero_rows_have_unit_norm():
    rng = np.random.default_rng(8)
    words = [f"w{i:02d}" for i in range(30)]
    docs = []
    for d in range(40):
        picks = rng.integers(0, len(words), size=int(rng.integers(3, 12)))
        docs.append(doc(f"c{d}#0", " ".join(words[int(i)] for i in picks)))
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=30)
    dense = vectorize(docs, vocab).matrix.toarray()
    norms = np.linalg.norm(dense, axis=1)
    assert np.all(dense >= 0.0)
    for norm in norms:
        assert norm == 0.0 or abs(norm - 1.0) < 1e-12


def test_doc_without_vocab_terms_is_a_zero_row(fitted):
    _, vocab = fitted
    m = vectorize([doc("d9#0", "unseen words only")], vocab)
    assert m.matrix.nnz == 0


def test_eval_docs_reuse_training_idf(fitted):
    # a term's weight is set by its training df even if every eval doc has it
    _, vocab = fitted
    m = vectorize([doc("e1#0", "yy"), doc("e2#0", "yy")], vocab)
    dense = m.matrix.toarray()
    assert np.allclose(dense[:, 1], 1.0, atol=1e-12)  # lone term, unit norm
    assert vocab.doc_freq == (2, 1, 1)  # unchanged by evaluation use


def test_vectorizing_twice_is_bit_identical(fitted):
    docs, vocab = fitted
    a = vectorize(docs, vocab)
    b = vectorize(docs, vocab)
    assert np.array_equal(a.matrix.data, b.matrix.data)
    assert np.array_equal(a.matrix.indices, b.matrix.indices)
    assert np.array_equal(a.matrix.indptr, b.matrix.indptr)


# ---------------------------------------------------------------------------
# persistence


def test_vocabulary_json_round_trip(tmp_path, fitted):
    _, vocab = fitted
    rec = vocabulary_to_dict(vocab)
    assert rec == {
        "n_docs_fit": 2,
        "terms": [
            {"t": "xx", "df": 2},
            {"t": "yy", "df": 1},
            {"t": "zz", "df": 1},
        ],
    }
    assert vocabulary_from_dict(rec) == vocab
    path = tmp_path / "vocab.json"
    save_vocabulary(vocab, path)
    assert load_vocabulary(path) == vocab


def test_tfidf_csv_export(tmp_path, fitted):
    docs, vocab = fitted
    m = vectorize(docs, vocab)
    path = tmp_path / "tfidf.csv"
    write_tfidf_csv(m, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "doc_id,term_index,value"
    assert len(lines) == 1 + m.matrix.nnz
    first = lines[1].split(",")
    assert first[0] == "d1#0"
    assert float(first[2]) == pytest.approx(ROW_1[0], abs=1e-12)


def test_vocabulary_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        Vocabulary(terms=("aa", "bb"), doc_freq=(1,), n_docs_fit=2)
