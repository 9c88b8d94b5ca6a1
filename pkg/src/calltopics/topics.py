"""Topic model packaging: summaries, argmax labeling, and persistence.

A TopicModel bundles the vocabulary, the trained topic-term matrix, and the
training configuration into one JSON file whose fingerprint (SHA-256 over
the canonicalized payload) makes silent corruption or hand-editing loud.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .errors import (
    ModelFormatError,
    ModelHashError,
    ModelVersionError,
    NumericalError,
)
from .nmf import NmfConfig
from .stopwords import STOPWORDS_VERSION
from .textprep import Vocabulary, vocabulary_from_dict, vocabulary_to_dict

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TopicModel:
    vocab: Vocabulary
    h: np.ndarray  # topics x terms
    config: NmfConfig
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.float64)
        object.__setattr__(self, "h", h)
        if h.ndim != 2 or h.shape[1] != len(self.vocab):
            raise ValueError("H shape does not match the vocabulary")
        if self.names is not None and len(self.names) != h.shape[0]:
            raise ValueError("need exactly one name per topic")

    @property
    def n_topics(self) -> int:
        return self.h.shape[0]

    def topic_name(self, topic_id: int) -> str:
        if self.names is not None:
            return self.names[topic_id]
        return f"t{topic_id}"

    def fingerprint(self) -> str:
        return _fingerprint(_payload(self))


@dataclass(frozen=True)
class TopicSummary:
    topic_id: int
    top_terms: tuple[tuple[str, float], ...]


def top_terms(model: TopicModel, topic_id: int, k: int) -> TopicSummary:
    """The k highest-weight terms of one topic, ties broken by term order."""
    if not 0 <= topic_id < model.n_topics:
        raise ValueError(f"topic_id {topic_id} out of range [0, {model.n_topics})")
    if k < 1:
        raise ValueError("k must be >= 1")
    row = model.h[topic_id]
    if not row.any():
        raise NumericalError(f"degenerate topic {topic_id}: all weights are zero")
    order = sorted(range(len(row)), key=lambda j: (-row[j], model.vocab.terms[j]))
    picked = order[: min(k, len(row))]
    return TopicSummary(topic_id, tuple((model.vocab.terms[j], float(row[j])) for j in picked))


def assign_labels(w: np.ndarray) -> tuple[list[int], list[bool]]:
    """Per-row argmax labels plus a flag marking all-zero (degenerate) rows.

    Ties go to the lowest topic index; an all-zero row gets topic 0 and a
    True flag instead of an error, so labeling a noisy corpus never aborts.
    """
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] == 0:
        raise ValueError("expected a nonempty 2-d document-topic matrix")
    labels = [int(j) for j in np.argmax(w, axis=1)]
    degenerate = [not bool(row.any()) for row in w]
    return labels, degenerate


# ---------------------------------------------------------------------------
# persistence


def _payload(model: TopicModel) -> dict:
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "stopwords": STOPWORDS_VERSION,
        "config": {
            "n_topics": model.config.n_topics,
            "max_iter": model.config.max_iter,
            "tol": model.config.tol,
            "seed": model.config.seed,
            "init": model.config.init,
        },
        "vocab": vocabulary_to_dict(model.vocab),
        "h": [[float(x) for x in row] for row in model.h],
    }
    if model.names is not None:
        payload["names"] = list(model.names)
    return payload


def _fingerprint(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(model: TopicModel, path) -> None:
    # the fingerprint covers everything except itself
    payload = _payload(model)
    payload["fingerprint"] = _fingerprint(payload)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
        fh.write("\n")


def load_model(path) -> TopicModel:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"corrupt model file: {exc.msg} at line {exc.lineno}")
    if not isinstance(payload, dict):
        raise ModelFormatError("corrupt model file: top level is not an object")
    missing = {"version", "stopwords", "config", "vocab", "h", "fingerprint"} - set(payload)
    if missing:
        raise ModelFormatError(f"corrupt model file: missing keys {sorted(missing)}")
    if payload["version"] != MODEL_FORMAT_VERSION:
        raise ModelVersionError(
            f"model format version {payload['version']} is not supported "
            f"(this build reads version {MODEL_FORMAT_VERSION})"
        )
    if payload["stopwords"] != STOPWORDS_VERSION:
        raise ModelVersionError(
            f"model was built with stopword list '{payload['stopwords']}' "
            f"but this build bundles '{STOPWORDS_VERSION}'"
        )
    claimed = payload["fingerprint"]
    body = {k: v for k, v in payload.items() if k != "fingerprint"}
    actual = _fingerprint(body)
    if claimed != actual:
        raise ModelHashError(
            f"model fingerprint mismatch: file claims {claimed[:12]}…, "
            f"content hashes to {actual[:12]}…"
        )
    try:
        cfg = NmfConfig(**payload["config"])
        vocab = vocabulary_from_dict(payload["vocab"])
        h = np.array(payload["h"], dtype=np.float64)
        names = tuple(payload["names"]) if "names" in payload else None
        return TopicModel(vocab, h, cfg, names)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model file: {exc}")
