"""Corpus ingestion, call segmentation, and reproducible splits.

Input corpora are JSON-lines files of translated utterances. Calls are cut
into fixed-duration windows (one minute by default) and each window's
utterance texts become one bag-of-words document downstream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import DataError, ParseError
from .rng import SplitMix64

REQUIRED_FIELDS = ("call_id", "speaker", "start_s", "end_s", "translation")


@dataclass(frozen=True)
class Utterance:
    call_id: str
    speaker: str
    start_s: float
    end_s: float
    translation: str
    references: tuple[str, ...] = ()


@dataclass(frozen=True)
class SegmentDoc:
    """One fixed-duration window of a call, texts space-joined in time order."""

    doc_id: str
    call_id: str
    segment_index: int
    text: str


@dataclass(frozen=True)
class CorpusSplit:
    name: str
    call_ids: frozenset[str]
    total_seconds: float
    seed: int


def load_corpus(path) -> list[Utterance]:
    """Read utterances from a JSON-lines file, preserving file order."""
    utts: list[Utterance] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})", lineno)
            if not isinstance(rec, dict):
                raise ParseError(f"line {lineno}: expected an object", lineno)
            for name in REQUIRED_FIELDS:
                if name not in rec:
                    raise ParseError(f"line {lineno}: missing field '{name}'", lineno)
            utts.append(_parse_utterance(rec, lineno))
    return utts


def _parse_utterance(rec: dict, lineno: int) -> Utterance:
    call_id = rec["call_id"]
    if not isinstance(call_id, str) or not call_id:
        raise ParseError(f"line {lineno}: field 'call_id' must be a nonempty string", lineno)
    try:
        start_s = float(rec["start_s"])
        end_s = float(rec["end_s"])
    except (TypeError, ValueError):
        raise ParseError(f"line {lineno}: fields 'start_s'/'end_s' must be numbers", lineno)
    if start_s < 0 or end_s <= start_s:
        raise ParseError(
            f"line {lineno}: need 0 <= start_s < end_s, got [{start_s}, {end_s}]", lineno
        )
    refs = rec.get("references", [])
    if not isinstance(refs, list) or any(not isinstance(r, str) for r in refs):
        raise ParseError(f"line {lineno}: field 'references' must be a list of strings", lineno)
    return Utterance(
        call_id=call_id,
        speaker=str(rec["speaker"]),
        start_s=start_s,
        end_s=end_s,
        translation=str(rec["translation"]),
        references=tuple(refs),
    )


def segment_calls(utts: list[Utterance], window_s: float = 60.0) -> list[SegmentDoc]:
    """Partition each call's utterances into fixed windows by start time.

    An utterance belongs to window floor(start_s / window_s) of its call, so
    each utterance lands in exactly one segment and boundary-straddling ones
    go with their start. Windows with no utterances are omitted. Within a
    window, texts are ordered by (start_s, speaker) and empty translations
    are skipped when joining.
    """
    if window_s <= 0:
        raise DataError(f"window_s must be positive, got {window_s}")
    by_call: dict[str, list[Utterance]] = {}
    for u in utts:
        by_call.setdefault(u.call_id, []).append(u)
    docs: list[SegmentDoc] = []
    for call_id, members in by_call.items():
        windows: dict[int, list[Utterance]] = {}
        for u in members:
            windows.setdefault(int(u.start_s // window_s), []).append(u)
        for idx in sorted(windows):
            ordered = sorted(windows[idx], key=lambda u: (u.start_s, u.speaker))
            text = " ".join(u.translation for u in ordered if u.translation)
            docs.append(SegmentDoc(f"{call_id}#{idx}", call_id, idx, text))
    return docs


def call_durations(utts: list[Utterance]) -> list[tuple[str, float]]:
    """Duration of each call (max end_s), in first-appearance order."""
    durs: dict[str, float] = {}
    for u in utts:
        durs[u.call_id] = max(durs.get(u.call_id, 0.0), u.end_s)
    return list(durs.items())


def sample_split(
    calls: list[tuple[str, float]],
    target_seconds: float,
    seed: int,
    name: str = "sample",
) -> CorpusSplit:
    """Greedily take shuffled calls until the duration target is met.

    The shuffle is a fixed, documented PRNG, so the same (calls, target,
    seed) triple selects the same calls on any platform. Because a lower
    target stops earlier along the same shuffled order, splits with
    decreasing targets under one seed are nested subsets.
    """
    available = sum(d for _, d in calls)
    if available < target_seconds:
        raise DataError(
            f"corpus holds {available:.1f} s, short of the {target_seconds:.1f} s "
            f"target by {target_seconds - available:.1f} s"
        )
    shuffled = list(calls)
    SplitMix64(seed).shuffle(shuffled)
    chosen: list[str] = []
    total = 0.0
    for call_id, dur in shuffled:
        if total >= target_seconds:
            break
        chosen.append(call_id)
        total += dur
    return CorpusSplit(name, frozenset(chosen), total, seed)


# ---------------------------------------------------------------------------
# serialization helpers shared by the CLI and the demo


def write_utterances(utts: list[Utterance], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u in utts:
            rec = {
                "call_id": u.call_id,
                "speaker": u.speaker,
                "start_s": u.start_s,
                "end_s": u.end_s,
                "translation": u.translation,
            }
            if u.references:
                rec["references"] = list(u.references)
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def write_segments(docs: list[SegmentDoc], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            rec = {
                "doc_id": d.doc_id,
                "call_id": d.call_id,
                "segment_index": d.segment_index,
                "text": d.text,
            }
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_segments(path) -> list[SegmentDoc]:
    docs: list[SegmentDoc] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"line {lineno}: invalid JSON ({exc.msg})", lineno)
            for name in ("doc_id", "call_id", "segment_index", "text"):
                if name not in rec:
                    raise ParseError(f"line {lineno}: missing field '{name}'", lineno)
            docs.append(
                SegmentDoc(
                    str(rec["doc_id"]),
                    str(rec["call_id"]),
                    int(rec["segment_index"]),
                    str(rec["text"]),
                )
            )
    return docs


def split_to_dict(split: CorpusSplit) -> dict:
    return {
        "name": split.name,
        "call_ids": sorted(split.call_ids),
        "total_seconds": split.total_seconds,
        "seed": split.seed,
    }


def split_from_dict(rec: dict) -> CorpusSplit:
    return CorpusSplit(
        str(rec["name"]),
        frozenset(rec["call_ids"]),
        float(rec["total_seconds"]),
        int(rec["seed"]),
    )
