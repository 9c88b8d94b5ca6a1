"""Corpus-level BLEU with multiple references.

Classic BLEU-4: clipped n-gram precision (per-n-gram maximum across the
references), geometric mean over n = 1..4, and a brevity penalty against the
per-segment closest reference length. Text goes through the shared tokenizer
with stopword removal turned off, so scoring is case-insensitive and
punctuation-blind like the rest of the pipeline.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass

from .errors import DataError
from .textprep import tokenize

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuScore:
    score: float  # 0..100
    precisions: tuple[float, ...]  # n = 1..4, as used in the score
    brevity_penalty: float
    hyp_len: int
    ref_len: int


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(
    hyps: list[str], refs: list[list[str]], smooth: bool = False
) -> BleuScore:
    """Score a hypothesis corpus against per-segment reference sets.

    With smooth=True, add-1 smoothing applies to the n >= 2 precisions so
    tiny corpora with no high-order matches still get a graded score;
    unsmoothed scoring returns 0 whenever any precision is 0.
    """
    if len(hyps) != len(refs):
        raise DataError(f"{len(hyps)} hypotheses but {len(refs)} reference sets")
    matched = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for i, (hyp, ref_group) in enumerate(zip(hyps, refs)):
        if not ref_group:
            raise DataError(f"segment {i}: every hypothesis needs >= 1 reference")
        hyp_tokens = tokenize(hyp, remove_stopwords=False)
        ref_tokens = [tokenize(r, remove_stopwords=False) for r in ref_group]
        c = len(hyp_tokens)
        hyp_len += c
        # effective reference length: closest to the hypothesis, ties shorter
        ref_len += min((len(r) for r in ref_tokens), key=lambda L: (abs(L - c), L))
        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp_tokens, n)
            if not hyp_counts:
                continue
            clip: Counter = Counter()
            for r in ref_tokens:
                for gram, cnt in _ngrams(r, n).items():
                    if cnt > clip[gram]:
                        clip[gram] = cnt
            matched[n - 1] += sum(min(cnt, clip[g]) for g, cnt in hyp_counts.items())
            total[n - 1] += sum(hyp_counts.values())

    if hyp_len == 0:
        return BleuScore(0.0, (0.0,) * MAX_ORDER, 0.0, 0, ref_len)

    precisions: list[float] = []
    for n in range(1, MAX_ORDER + 1):
        m, t = matched[n - 1], total[n - 1]
        if smooth and n >= 2:
            m, t = m + 1, t + 1
        precisions.append(m / t if t > 0 else 0.0)

    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER)
    return BleuScore(score, tuple(precisions), bp, hyp_len, ref_len)


def write_bleu_json(result: BleuScore, path) -> None:
    payload = {
        "score": result.score,
        "precisions": list(result.precisions),
        "brevity_penalty": result.brevity_penalty,
        "hyp_len": result.hyp_len,
        "ref_len": result.ref_len,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
