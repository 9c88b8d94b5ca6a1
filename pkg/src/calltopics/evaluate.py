"""Label-comparison metrics: accuracy, baseline, confusion, drift, histograms.

Predicted labels are always scored against silver labels (the model's own
labels on clean reference text), aligned by document id. The confusion
matrix is row-normalized per silver class, so its diagonal is per-class
recall.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .corpus import SegmentDoc
from .errors import AlignmentError, DataError


@dataclass(frozen=True)
class LabeledSet:
    doc_ids: tuple[str, ...]
    labels: tuple[int, ...]
    source: str = "system"  # silver | system | assigned-prompt

    def __post_init__(self):
        if len(self.doc_ids) != len(self.labels):
            raise DataError("doc_ids and labels must have equal length")
        if len(set(self.doc_ids)) != len(self.doc_ids):
            dupes = [d for d, c in Counter(self.doc_ids).items() if c > 1]
            raise DataError(f"duplicate doc_ids: {dupes[:5]}")

    def __len__(self) -> int:
        return len(self.doc_ids)

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.doc_ids, self.labels))


@dataclass(frozen=True)
class ConfusionMatrix:
    counts: np.ndarray  # silver x predicted, integers
    row_normalized: np.ndarray  # rows sum to 1, or all-zero for absent classes

    @property
    def n_topics(self) -> int:
        return self.counts.shape[0]


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    baseline_topic: int
    baseline_accuracy: float
    per_topic_recall: tuple[float, ...]
    confusion: ConfusionMatrix
    label_histograms: dict[str, dict[int, int]]
    n_docs: int


def _align(pred: LabeledSet, silver: LabeledSet) -> list[tuple[int, int]]:
    """Pair up labels by doc_id; the id sets must match exactly."""
    if set(pred.doc_ids) != set(silver.doc_ids):
        diff = sorted(set(pred.doc_ids) ^ set(silver.doc_ids))
        raise AlignmentError(
            f"label sets cover different documents; first divergence: '{diff[0]}'"
        )
    silver_map = silver.as_dict()
    return [(lbl, silver_map[d]) for d, lbl in zip(pred.doc_ids, pred.labels)]


def accuracy(pred: LabeledSet, silver: LabeledSet) -> float:
    pairs = _align(pred, silver)
    return sum(p == s for p, s in pairs) / len(pairs)


def majority_baseline(silver: LabeledSet) -> tuple[int, float]:
    """Most frequent label and its share; ties go to the lowest topic id."""
    if len(silver) == 0:
        raise DataError("cannot take a majority over an empty label set")
    counts = Counter(silver.labels)
    best = max(counts.items(), key=lambda kv: (kv[1], -kv[0]))
    return best[0], best[1] / len(silver)


def confusion(pred: LabeledSet, silver: LabeledSet, n_topics: int | None = None) -> ConfusionMatrix:
    pairs = _align(pred, silver)
    if n_topics is None:
        n_topics = max(max(p, s) for p, s in pairs) + 1
    counts = np.zeros((n_topics, n_topics), dtype=np.int64)
    for p, s in pairs:
        counts[s, p] += 1
    row_sums = counts.sum(axis=1, keepdims=True)
    normalized = np.divide(
        counts, row_sums, out=np.zeros(counts.shape, dtype=np.float64), where=row_sums > 0
    )
    return ConfusionMatrix(counts, normalized)


def eval_report(
    pred: LabeledSet, silver: LabeledSet, n_topics: int | None = None
) -> EvalReport:
    cm = confusion(pred, silver, n_topics)
    acc = float(np.trace(cm.counts)) / len(pred)
    base_topic, base_acc = majority_baseline(silver)
    hists = {
        pred.source: dict(sorted(Counter(pred.labels).items())),
        silver.source: dict(sorted(Counter(silver.labels).items())),
    }
    return EvalReport(
        accuracy=acc,
        baseline_topic=base_topic,
        baseline_accuracy=base_acc,
        per_topic_recall=tuple(float(x) for x in np.diag(cm.row_normalized)),
        confusion=cm,
        label_histograms=hists,
        n_docs=len(pred),
    )


def drift_timeline(
    labels: LabeledSet,
    segs: list[SegmentDoc],
    call_filter: set[str] | None = None,
    n_topics: int | None = None,
) -> dict[int, list[float]]:
    """Per segment index, the label distribution across (filtered) calls.

    Row k answers: among calls that reach minute k, what share of their
    minute-k segments carries each label? Each row sums to 1.
    """
    seg_map = {s.doc_id: s for s in segs}
    if n_topics is None:
        n_topics = max(labels.labels, default=-1) + 1
    counts: dict[int, np.ndarray] = {}
    for doc_id, label in zip(labels.doc_ids, labels.labels):
        seg = seg_map.get(doc_id)
        if seg is None:
            raise DataError(f"label refers to unknown document '{doc_id}'")
        if call_filter is not None and seg.call_id not in call_filter:
            continue
        row = counts.setdefault(seg.segment_index, np.zeros(n_topics))
        row[label] += 1
    table: dict[int, list[float]] = {}
    for idx in sorted(counts):
        row = counts[idx]
        table[idx] = [float(x) for x in row / row.sum()]
    return table


def prompt_histogram(assigned: LabeledSet) -> dict[int, float]:
    """Share of calls per assigned label; empty input gives an empty table."""
    if len(assigned) == 0:
        return {}
    counts = Counter(assigned.labels)
    return {lbl: counts[lbl] / len(assigned) for lbl in sorted(counts)}


# ---------------------------------------------------------------------------
# file output (percentages rendered with one decimal place)


def _pct(x: float) -> str:
    return f"{100.0 * x:.1f}"


def report_to_dict(report: EvalReport) -> dict:
    return {
        "n_docs": report.n_docs,
        "accuracy": report.accuracy,
        "accuracy_pct": _pct(report.accuracy),
        "baseline_topic": report.baseline_topic,
        "baseline_accuracy": report.baseline_accuracy,
        "baseline_accuracy_pct": _pct(report.baseline_accuracy),
        "per_topic_recall": list(report.per_topic_recall),
        "confusion_counts": report.confusion.counts.tolist(),
        "confusion_row_normalized": report.confusion.row_normalized.tolist(),
        "label_histograms": {
            src: {str(k): v for k, v in hist.items()}
            for src, hist in report.label_histograms.items()
        },
    }


def write_report_json(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_to_dict(report), fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def write_confusion_csv(cm: ConfusionMatrix, path, names: list[str] | None = None) -> None:
    """Row-normalized percentages; rows silver, columns predicted."""
    labels = names if names is not None else [f"t{i}" for i in range(cm.n_topics)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("silver\\predicted," + ",".join(labels) + "\n")
        for i, row in enumerate(cm.row_normalized):
            fh.write(labels[i] + "," + ",".join(_pct(x) for x in row) + "\n")


def write_recall_csv(report: EvalReport, path, names: list[str] | None = None) -> None:
    labels = names if names is not None else [f"t{i}" for i in range(len(report.per_topic_recall))]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("topic,recall_pct\n")
        for name, r in zip(labels, report.per_topic_recall):
            fh.write(f"{name},{_pct(r)}\n")


def write_timeline_csv(table: dict[int, list[float]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("segment_index,topic_id,fraction\n")
        for idx in sorted(table):
            for topic_id, frac in enumerate(table[idx]):
                fh.write(f"{idx},{topic_id},{float(frac)!r}\n")


def write_labels_csv(labels: LabeledSet, path, degenerate: list[bool] | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        if degenerate is None:
            fh.write("doc_id,label\n")
            for d, lbl in zip(labels.doc_ids, labels.labels):
                fh.write(f"{d},{lbl}\n")
        else:
            fh.write("doc_id,label,degenerate\n")
            for d, lbl, flag in zip(labels.doc_ids, labels.labels, degenerate):
                fh.write(f"{d},{lbl},{int(flag)}\n")


def read_labels_csv(path, source: str = "system") -> LabeledSet:
    doc_ids: list[str] = []
    labels: list[int] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[:2] != ["doc_id", "label"]:
            raise DataError(f"unexpected label file header: {header}")
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(",")
            if len(parts) < 2:
                raise DataError(f"line {lineno}: expected 'doc_id,label'")
            doc_ids.append(parts[0])
            labels.append(int(parts[1]))
    return LabeledSet(tuple(doc_ids), tuple(labels), source)
