"""Synthetic planted-topic corpora and the end-to-end demo pipeline.

The generator plants a known topic in every call: each one-minute segment
carries a couple of on-topic content words buried in generic chatter. The
chatter is shared across all calls, so the document-frequency filter sweeps
it out of the vocabulary and what remains is exactly the planted signal.
That gives the full pipeline (segment, split, fit, silver-label, degrade,
re-label, score) a corpus whose ground truth is known, at a size that runs
in seconds.
"""

from __future__ import annotations

import json
from pathlib import Path

from .bleu import corpus_bleu
from .corpus import (
    CorpusSplit,
    SegmentDoc,
    Utterance,
    call_durations,
    sample_split,
    segment_calls,
    split_to_dict,
    write_segments,
    write_utterances,
)
from .degrade import NoiseSpec, degrade_corpus
from .evaluate import (
    LabeledSet,
    drift_timeline,
    eval_report,
    majority_baseline,
    prompt_histogram,
    write_confusion_csv,
    write_labels_csv,
    write_recall_csv,
    write_report_json,
    write_timeline_csv,
)
from .nmf import NmfConfig, nmf_train, nmf_transform
from .rng import philox
from .textprep import build_vocabulary, vectorize
from .topics import TopicModel, assign_labels, save_model, top_terms

TOPIC_NAMES = ("family", "music", "religion", "travel", "tech")

# Five disjoint content lexicons; none of these words is in the bundled
# stopword list, so they survive tokenization wherever they are planted.
LEXICONS: dict[str, tuple[str, ...]] = {
    "family": (
        "family", "mother", "father", "sister", "brother", "cousin", "children",
        "daughter", "husband", "wife", "grandma", "uncle", "aunt", "nephew",
        "niece", "parents", "grandpa", "son", "marriage", "wedding",
    ),
    "music": (
        "music", "listen", "dance", "listening", "hear", "song", "songs",
        "guitar", "radio", "band", "concert", "singer", "rhythm", "salsa",
        "piano", "drums", "melody", "album", "lyrics", "dancing",
    ),
    "religion": (
        "church", "god", "religion", "catholic", "christian", "bible", "faith",
        "pray", "prayer", "mass", "priest", "holy", "worship", "gospel",
        "blessing", "saint", "temple", "spirit", "belief", "sunday",
    ),
    "travel": (
        "travel", "trip", "country", "airplane", "vacation", "beach", "hotel",
        "passport", "luggage", "flight", "airport", "tourist", "island",
        "mountains", "visit", "journey", "abroad", "ticket", "highway",
        "suitcase",
    ),
    "tech": (
        "internet", "email", "software", "phone", "website", "keyboard",
        "screen", "program", "digital", "online", "camera", "laptop",
        "printer", "network", "virus", "download", "files", "mouse", "robot",
        "gadget",
    ),
}

# Generic conversational filler shared by every call. It shows up in nearly
# every document, so the max-df filter removes it from the vocabulary.
CHATTER = (
    "yeah", "okay", "really", "right", "know", "think", "good", "time",
    "people", "going", "want", "things", "talking", "telling", "pretty",
    "little", "kind", "lot", "maybe", "actually", "probably", "exactly",
    "remember", "understand", "happened", "saying", "basically", "different",
    "better", "sure", "great", "nice", "long", "big", "new", "old", "way",
    "day", "year", "work",
)

# Majority prompt first; the rest share the remaining mass evenly. The
# majority share is a compromise: high enough that the naive baseline sits
# well above chance, low enough that the factorization does not prefer
# splitting the majority topic across two components.
PROMPT_PRIOR = (0.33, 0.1675, 0.1675, 0.1675, 0.1675)


def make_planted_docs(
    n_docs: int, tokens_per_doc: int, seed: int
) -> tuple[list[SegmentDoc], list[int]]:
    """Single-segment documents drawn purely from one planted lexicon each.

    Returns the documents and the planted topic index per document. Every
    token is an on-topic content word, so a topic model has the cleanest
    possible recovery target.
    """
    rng = philox(seed, "planted")
    lexicons = [LEXICONS[name] for name in TOPIC_NAMES]
    docs: list[SegmentDoc] = []
    labels: list[int] = []
    for i in range(n_docs):
        topic = int(rng.integers(len(lexicons)))
        lex = lexicons[topic]
        tokens = [lex[int(j)] for j in rng.integers(len(lex), size=tokens_per_doc)]
        call_id = f"synth{i:04d}"
        docs.append(SegmentDoc(f"{call_id}#0", call_id, 0, " ".join(tokens)))
        labels.append(topic)
    return docs, labels


def make_demo_calls(
    seed: int,
    n_calls: int = 500,
    segments_per_call: int = 8,
    tokens_per_segment: int = 100,
    topical_per_segment: int = 4,
    terms_per_topic: int = 20,
) -> tuple[list[Utterance], dict[str, int]]:
    """Synthetic calls with an assigned prompt and mostly-chatter speech.

    Each segment hides `topical_per_segment` words from the call's prompt
    lexicon (restricted to its first `terms_per_topic` terms) at random
    positions inside generic chatter. Segments become three 20-token
    utterances with alternating speakers.

    Returns the utterances plus the assigned prompt index per call.
    """
    rng = philox(seed, "demo-corpus")
    cumulative = []
    acc = 0.0
    for p in PROMPT_PRIOR:
        acc += p
        cumulative.append(acc)
    utts: list[Utterance] = []
    assigned: dict[str, int] = {}
    bounds = [0, tokens_per_segment // 3, 2 * tokens_per_segment // 3, tokens_per_segment]
    for c in range(n_calls):
        call_id = f"call{c:04d}"
        u = rng.random()
        topic = next(i for i, edge in enumerate(cumulative) if u < edge)
        assigned[call_id] = topic
        lex = LEXICONS[TOPIC_NAMES[topic]][:terms_per_topic]
        for s in range(segments_per_call):
            tokens = [CHATTER[int(j)] for j in rng.integers(len(CHATTER), size=tokens_per_segment)]
            spots = rng.permutation(tokens_per_segment)[:topical_per_segment]
            for spot in spots:
                tokens[int(spot)] = lex[int(rng.integers(len(lex)))]
            base = s * 60.0
            for k in range(3):
                chunk = tokens[bounds[k] : bounds[k + 1]]
                start = base + 20.0 * k
                utts.append(
                    Utterance(
                        call_id=call_id,
                        speaker="A" if k % 2 == 0 else "B",
                        start_s=start,
                        end_s=start + 18.0,
                        translation=" ".join(chunk),
                    )
                )
    return utts, assigned


def _infer_names(model: TopicModel) -> tuple[str, ...] | None:
    """Name each topic after the lexicon its strongest terms come from."""
    term_owner = {t: name for name, lex in LEXICONS.items() for t in lex}
    names: list[str] = []
    for topic_id in range(model.n_topics):
        owners = [
            term_owner.get(term)
            for term, _ in top_terms(model, topic_id, 3).top_terms
        ]
        owners = [o for o in owners if o is not None]
        names.append(owners[0] if owners else f"t{topic_id}")
    if len(set(names)) != len(names):
        return None  # ambiguous recovery; keep neutral ids
    return tuple(names)


NOISE_LEVELS = (
    ("clean", 0.0, 0.0),
    ("drop40", 0.4, 0.0),
    ("drop80", 0.8, 0.0),
    ("drop80_sub10", 0.8, 0.1),
)


def run_demo(out_dir, seed: int = 11, train_seconds: float = 129600.0) -> dict:
    """Generate the demo corpus and push it through the whole pipeline.

    Writes every artifact (corpus files, splits, model, silver labels, one
    directory per noise level, and the summary CSVs) under out_dir. All
    randomness derives from `seed`, so two runs with the same seed produce
    byte-identical trees. Returns a summary of the headline numbers.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    utts, assigned = make_demo_calls(seed)
    write_utterances(utts, out / "utterances.jsonl")
    segs = segment_calls(utts, 60.0)
    write_segments(segs, out / "segments.jsonl")

    durations = call_durations(utts)
    train_split = sample_split(durations, train_seconds, seed, "train")
    eval_ids = frozenset(cid for cid, _ in durations) - train_split.call_ids
    eval_split = CorpusSplit(
        "eval", eval_ids, sum(d for cid, d in durations if cid in eval_ids), seed
    )
    with open(out / "splits.json", "w", encoding="utf-8") as fh:
        json.dump(
            {"seed": seed, "splits": [split_to_dict(train_split), split_to_dict(eval_split)]},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")

    train_docs = [d for d in segs if d.call_id in train_split.call_ids]
    eval_docs = [d for d in segs if d.call_id in eval_ids]

    vocab = build_vocabulary(train_docs)
    v_train = vectorize(train_docs, vocab)
    cfg = NmfConfig(n_topics=len(TOPIC_NAMES), seed=seed)
    fit = nmf_train(v_train, cfg)
    model = TopicModel(vocab, fit.h, cfg)
    names = _infer_names(model)
    if names is not None:
        model = TopicModel(vocab, fit.h, cfg, names)
    save_model(model, out / "model.json")
    with open(out / "topics.csv", "w", encoding="utf-8") as fh:
        fh.write("topic_id,name,top_terms\n")
        for tid in range(model.n_topics):
            terms = " ".join(t for t, _ in top_terms(model, tid, 8).top_terms)
            fh.write(f"{tid},{model.topic_name(tid)},{terms}\n")

    # silver labels: the model's own reading of the clean reference text
    v_eval = vectorize(eval_docs, vocab)
    silver_w = nmf_transform(v_eval, model.h, cfg).w
    silver_labels, silver_deg = assign_labels(silver_w)
    silver = LabeledSet(tuple(d.doc_id for d in eval_docs), tuple(silver_labels), "silver")
    write_labels_csv(silver, out / "silver.csv", silver_deg)
    base_topic, base_acc = majority_baseline(silver)

    # assigned prompts over all calls, and silver drift over the eval calls
    prompt_set = LabeledSet(
        tuple(sorted(assigned)),
        tuple(assigned[c] for c in sorted(assigned)),
        "assigned-prompt",
    )
    hist = prompt_histogram(prompt_set)
    with open(out / "prompts.csv", "w", encoding="utf-8") as fh:
        fh.write("prompt_id,prompt_name,fraction_pct\n")
        for lbl, frac in hist.items():
            fh.write(f"{lbl},{TOPIC_NAMES[lbl]},{100.0 * frac:.1f}\n")
    with open(out / "calls.csv", "w", encoding="utf-8") as fh:
        fh.write("call_id,prompt_id,prompt_name\n")
        for call_id in sorted(assigned):
            pid = assigned[call_id]
            fh.write(f"{call_id},{pid},{TOPIC_NAMES[pid]}\n")
    write_timeline_csv(
        drift_timeline(silver, eval_docs, n_topics=model.n_topics),
        out / "timeline.csv",
    )
    for pid, pname in enumerate(TOPIC_NAMES):
        calls = {c for c, t in assigned.items() if t == pid and c in eval_ids}
        table = drift_timeline(silver, eval_docs, calls, n_topics=model.n_topics)
        write_timeline_csv(table, out / f"timeline_{pname}.csv")

    # noise ladder: degrade the eval text, re-vectorize, re-label, score
    levels_summary = []
    for name, p_drop, p_sub in NOISE_LEVELS:
        level_dir = out / "levels" / name
        level_dir.mkdir(parents=True, exist_ok=True)
        spec = NoiseSpec(
            p_drop=p_drop,
            p_sub=p_sub,
            seed=seed,
            sub_pool="fixed-list",
            fixed_pool=vocab.terms,
        )
        deg_docs = degrade_corpus(eval_docs, spec)
        write_segments(deg_docs, level_dir / "degraded.jsonl")
        w = nmf_transform(vectorize(deg_docs, vocab), model.h, cfg).w
        labels, deg_flags = assign_labels(w)
        pred = LabeledSet(tuple(d.doc_id for d in deg_docs), tuple(labels), "system")
        write_labels_csv(pred, level_dir / "labels.csv", deg_flags)
        report = eval_report(pred, silver, n_topics=model.n_topics)
        write_report_json(report, level_dir / "report.json")
        label_names = [model.topic_name(i) for i in range(model.n_topics)]
        write_confusion_csv(report.confusion, level_dir / "confusion.csv", label_names)
        write_recall_csv(report, level_dir / "recall.csv", label_names)
        bleu = corpus_bleu(
            [d.text for d in deg_docs], [[d.text] for d in eval_docs], smooth=True
        )
        levels_summary.append(
            {
                "level": name,
                "p_drop": p_drop,
                "p_sub": p_sub,
                "accuracy": report.accuracy,
                "bleu": bleu.score,
            }
        )

    with open(out / "accuracy.csv", "w", encoding="utf-8") as fh:
        fh.write("level,p_drop,p_sub,accuracy_pct\n")
        for row in levels_summary:
            fh.write(
                f"{row['level']},{row['p_drop']},{row['p_sub']},{100.0 * row['accuracy']:.1f}\n"
            )
        fh.write(f"majority-baseline,,,{100.0 * base_acc:.1f}\n")
    with open(out / "bleu.csv", "w", encoding="utf-8") as fh:
        fh.write("level,p_drop,p_sub,bleu\n")
        for row in levels_summary:
            fh.write(f"{row['level']},{row['p_drop']},{row['p_sub']},{row['bleu']:.2f}\n")

    summary = {
        "seed": seed,
        "n_calls": len(assigned),
        "n_train_docs": len(train_docs),
        "n_eval_docs": len(eval_docs),
        "vocab_size": len(vocab),
        "topic_names": list(model.names) if model.names else None,
        "baseline_topic": base_topic,
        "baseline_accuracy": base_acc,
        "levels": levels_summary,
    }
    with open(out / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
