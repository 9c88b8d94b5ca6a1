"""Tokenization, vocabulary selection, and tf-idf featurization.

The feature pipeline is deliberately plain: lowercase, strip punctuation and
symbols, split on whitespace, drop stopwords and one-character tokens. The
vocabulary keeps mid-frequency terms (document-frequency band plus a cap on
total size) and the matrix is l2-normalized tf-idf, which keeps every entry
nonnegative as the factorization requires.
"""

from __future__ import annotations

import json
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .corpus import SegmentDoc
from .errors import DataError
from .sparse import CsrMatrix
from .stopwords import ENGLISH_STOPWORDS


@lru_cache(maxsize=None)
def _keep_char(ch: str) -> bool:
    return unicodedata.category(ch)[0] not in ("P", "S")


def tokenize(text: str, remove_stopwords: bool = True) -> list[str]:
    """Lowercase, strip punctuation/symbol characters, split, filter.

    Punctuation is removed rather than replaced, so contractions fuse
    ("i'm" becomes "im"). Tokens shorter than two characters are dropped.
    """
    lowered = text.lower()
    cleaned = "".join(c for c in lowered if _keep_char(c))
    tokens = [t for t in cleaned.split() if len(t) >= 2]
    if remove_stopwords:
        tokens = [t for t in tokens if t not in ENGLISH_STOPWORDS]
    return tokens


@dataclass(frozen=True)
class Vocabulary:
    """Ordered term list plus the fitting statistics idf needs."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    n_docs_fit: int

    def __post_init__(self):
        if len(self.terms) != len(self.doc_freq):
            raise ValueError("terms and doc_freq length mismatch")

    def __len__(self) -> int:
        return len(self.terms)

    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}

    def idf(self) -> np.ndarray:
        df = np.asarray(self.doc_freq, dtype=np.float64)
        return np.log((1.0 + self.n_docs_fit) / (1.0 + df)) + 1.0


@dataclass(frozen=True)
class TfidfMatrix:
    matrix: CsrMatrix
    row_ids: tuple[str, ...]

    def __post_init__(self):
        if len(self.row_ids) != self.matrix.shape[0]:
            raise ValueError("row_ids length does not match matrix rows")

    @property
    def n_docs(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_terms(self) -> int:
        return self.matrix.shape[1]


def build_vocabulary(
    docs: list[SegmentDoc],
    min_df: int = 2,
    max_df_ratio: float = 0.10,
    max_terms: int = 1000,
) -> Vocabulary:
    """Select terms by document-frequency band, then cap by corpus frequency.

    Terms outside [min_df, max_df_ratio * n_docs] go first; of the survivors
    the max_terms with the highest total token count are kept (ties broken
    lexicographically) and the final column order is lexicographic.
    """
    if not docs:
        raise DataError("cannot build a vocabulary from zero documents")
    df: Counter[str] = Counter()
    tf: Counter[str] = Counter()
    for doc in docs:
        tokens = tokenize(doc.text)
        tf.update(tokens)
        df.update(set(tokens))
    max_df = max_df_ratio * len(docs)
    survivors = [t for t, d in df.items() if min_df <= d <= max_df]
    if not survivors:
        raise DataError("empty vocabulary: no term passed the frequency filters")
    survivors.sort(key=lambda t: (-tf[t], t))
    kept = sorted(survivors[:max_terms])
    return Vocabulary(tuple(kept), tuple(df[t] for t in kept), len(docs))


def vectorize(docs: list[SegmentDoc], vocab: Vocabulary) -> TfidfMatrix:
    """tf-idf rows over the vocabulary's columns, each l2-normalized.

    idf always comes from the vocabulary's fitting corpus, so evaluation
    documents are weighted exactly like training ones. Documents with no
    in-vocabulary term produce all-zero rows.
    """
    if len(vocab) == 0:
        raise DataError("empty vocabulary")
    index = vocab.index()
    idf = vocab.idf()
    rows: list[tuple[np.ndarray, np.ndarray]] = []
    for doc in docs:
        counts = Counter(t for t in tokenize(doc.text) if t in index)
        cols = np.array(sorted(index[t] for t in counts), dtype=np.int64)
        if cols.size == 0:
            rows.append((cols, np.zeros(0)))
            continue
        terms_sorted = sorted(counts, key=index.__getitem__)
        vals = np.array([counts[t] for t in terms_sorted], dtype=np.float64)
        vals *= idf[cols]
        norm = math.sqrt(float(vals @ vals))
        if norm > 0:
            vals /= norm
        rows.append((cols, vals))
    matrix = CsrMatrix.from_rows(rows, len(vocab))
    return TfidfMatrix(matrix, tuple(d.doc_id for d in docs))


# ---------------------------------------------------------------------------
# persistence


def vocabulary_to_dict(vocab: Vocabulary) -> dict:
    return {
        "n_docs_fit": vocab.n_docs_fit,
        "terms": [{"t": t, "df": d} for t, d in zip(vocab.terms, vocab.doc_freq)],
    }


def vocabulary_from_dict(rec: dict) -> Vocabulary:
    entries = rec["terms"]
    return Vocabulary(
        tuple(str(e["t"]) for e in entries),
        tuple(int(e["df"]) for e in entries),
        int(rec["n_docs_fit"]),
    )


def save_vocabulary(vocab: Vocabulary, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(vocabulary_to_dict(vocab), fh, ensure_ascii=False)
        fh.write("\n")


def load_vocabulary(path) -> Vocabulary:
    with open(path, encoding="utf-8") as fh:
        return vocabulary_from_dict(json.load(fh))


def write_tfidf_csv(m: TfidfMatrix, path_or_file) -> None:
    """Coordinate-format dump `doc_id,term_index,value` for debugging."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", encoding="utf-8") if own else path_or_file
    try:
        fh.write("doc_id,term_index,value\n")
        csr = m.matrix
        for i, doc_id in enumerate(m.row_ids):
            for p in range(csr.indptr[i], csr.indptr[i + 1]):
                fh.write(f"{doc_id},{csr.indices[p]},{float(csr.data[p])!r}\n")
    finally:
        if own:
            fh.close()
