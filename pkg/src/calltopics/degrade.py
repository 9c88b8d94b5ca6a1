"""Stochastic text corruption that mimics low-quality translation output.

Each whitespace token is independently dropped, substituted, or kept. A
substitute comes either from the corpus's own unigram distribution (the
default: plausible-but-wrong common words) or from a caller-supplied fixed
list for controlled experiments. Every document draws from its own random
stream keyed by (seed, doc_id), so the output does not depend on document
order and never changes when other documents are added or removed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from .corpus import SegmentDoc
from .errors import DataError
from .rng import philox

SUB_POOLS = ("corpus-unigram", "fixed-list")


@dataclass(frozen=True)
class NoiseSpec:
    p_drop: float
    p_sub: float
    seed: int
    sub_pool: str = "corpus-unigram"
    fixed_pool: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.p_drop <= 1.0 or not 0.0 <= self.p_sub <= 1.0:
            raise DataError("p_drop and p_sub must lie in [0, 1]")
        if self.p_drop + self.p_sub > 1.0:
            raise DataError(
                f"p_drop + p_sub = {self.p_drop + self.p_sub} exceeds 1; the "
                "per-token decision is drop OR substitute OR keep"
            )
        if self.sub_pool not in SUB_POOLS:
            raise DataError(f"sub_pool must be one of {SUB_POOLS}")
        if self.sub_pool == "fixed-list" and self.p_sub > 0 and not self.fixed_pool:
            raise DataError("fixed-list substitution needs a nonempty fixed_pool")


def degrade_corpus(docs: list[SegmentDoc], spec: NoiseSpec) -> list[SegmentDoc]:
    """Corrupt every document independently; ids and order are preserved.

    Per token one uniform draw decides its fate: u < p_drop deletes it,
    u < p_drop + p_sub replaces it, anything else keeps it. Token counts
    never increase. p_drop = p_sub = 0 returns the documents unchanged.
    """
    if spec.p_drop == 0.0 and spec.p_sub == 0.0:
        return list(docs)
    pool: list[str]
    cum: np.ndarray | None  # cumulative weights; None means uniform
    if spec.sub_pool == "fixed-list":
        pool = list(spec.fixed_pool)
        cum = None
    else:
        counts = Counter(tok for d in docs for tok in d.text.split())
        pool = sorted(counts)
        cum = None
        if pool:
            w = np.array([counts[t] for t in pool], dtype=np.float64)
            cum = np.cumsum(w / w.sum())
    out: list[SegmentDoc] = []
    cut = spec.p_drop + spec.p_sub
    for doc in docs:
        rng = philox(spec.seed, "degrade", doc.doc_id)
        kept: list[str] = []
        for tok in doc.text.split():
            u = rng.random()
            if u < spec.p_drop:
                continue
            if u < cut and pool:
                if cum is None:
                    kept.append(pool[rng.integers(len(pool))])
                else:
                    j = int(np.searchsorted(cum, rng.random(), side="right"))
                    kept.append(pool[min(j, len(pool) - 1)])
            else:
                kept.append(tok)
        out.append(replace(doc, text=" ".join(kept)))
    return out
