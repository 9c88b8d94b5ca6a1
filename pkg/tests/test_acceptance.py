"""Acceptance gate: the ten properties the package must hold, one test each.

Each test prints a single PASS line on success (visible with -rA or -s);
pytest -v provides the per-criterion pass/fail verdict either way. Numbers
quoted in the assertions (tolerances, sizes, iteration budgets) are the
contract, not tuning knobs.
"""

import itertools
import time

import numpy as np
import pytest

from calltopics import kernels
from calltopics.bleu import corpus_bleu
from calltopics.demo import make_planted_docs
from calltopics.evaluate import (
    LabeledSet,
    accuracy,
    eval_report,
    majority_baseline,
    read_labels_csv,
)
from calltopics.nmf import NmfConfig, nmf_train, nmf_transform
from calltopics.textprep import build_vocabulary, vectorize
from calltopics.topics import assign_labels


def test_01_nmf_objective_is_monotone_and_fast():
    """200x100 random matrix, 10 topics, 200 iterations, under 5 seconds."""
    rng = np.random.default_rng(0)
    v = rng.random((200, 100))
    kernels.warmup()  # JIT compile outside the timed region
    start = time.perf_counter()
    result = nmf_train(v, NmfConfig(n_topics=10, max_iter=200, tol=0.0, seed=0))
    elapsed = time.perf_counter() - start
    trace = result.trace
    assert len(trace) == 201
    worst = max(after - before for before, after in zip(trace, trace[1:]))
    assert worst <= 1e-9
    assert elapsed < 5.0
    print(
        f"ACCEPTANCE 1 PASS: objective {trace[0]:.2f} -> {trace[-1]:.2f}, "
        f"worst step +{max(worst, 0.0):.2e}, {elapsed:.2f}s"
    )


def test_02_rank_one_matrix_factorizes_exactly():
    """A rank-1 corpus must be reconstructed to numerical noise at t=1."""
    rng = np.random.default_rng(1)
    v = np.outer(rng.random(200) + 0.1, rng.random(100) + 0.1)
    result = nmf_train(v, NmfConfig(n_topics=1, max_iter=200, tol=0.0, seed=1))
    bound = 1e-8 * np.linalg.norm(v) ** 2
    assert result.trace[-1] < bound
    print(f"ACCEPTANCE 2 PASS: final objective {result.trace[-1]:.3e} < {bound:.3e}")


def test_03_planted_topics_are_recovered():
    """500 single-topic docs over 5 disjoint 20-term lexicons, >= 95% agreement."""
    docs, planted = make_planted_docs(500, 50, seed=0)
    vocab = build_vocabulary(docs, min_df=2, max_df_ratio=1.0, max_terms=1000)
    fit = nmf_train(vectorize(docs, vocab), NmfConfig(n_topics=5, seed=0))
    labels, _ = assign_labels(fit.w)
    best = max(
        sum(perm[lbl] == truth for lbl, truth in zip(labels, planted))
        for perm in itertools.permutations(range(5))
    )
    agreement = best / len(docs)
    assert agreement >= 0.95
    print(f"ACCEPTANCE 3 PASS: best-permutation agreement {agreement:.3f}")


def test_04_tfidf_matches_hand_computed_values():
    """The two-document worked example, to 1e-12, plus unit row norms."""
    from calltopics.corpus import SegmentDoc

    docs = [
        SegmentDoc("d1#0", "d1", 0, "xx xx yy"),
        SegmentDoc("d2#0", "d2", 0, "xx zz"),
    ]
    vocab = build_vocabulary(docs, min_df=1, max_df_ratio=1.0, max_terms=10)
    dense = vectorize(docs, vocab).matrix.toarray()
    expected = np.array(
        [
            [0.8181802073667197, 0.5749618667993135, 0.0],
            [0.5797386715376657, 0.0, 0.8148024746671689],
        ]
    )
    assert np.allclose(dense, expected, atol=1e-12, rtol=0.0)

    rng = np.random.default_rng(2)
    words = [f"w{i:02d}" for i in range(40)]
    wide = [
        SegmentDoc(f"c{i}#0", f"c{i}", 0, " ".join(words[int(j)] for j in rng.integers(0, 40, 12)))
        for i in range(100)
    ]
    wide_vocab = build_vocabulary(wide, min_df=1, max_df_ratio=1.0, max_terms=40)
    matrix = vectorize(wide, wide_vocab).matrix
    norms = np.linalg.norm(matrix.toarray(), axis=1)
    nonzero = norms[norms > 0]
    assert np.all(np.abs(nonzero - 1.0) <= 1e-12)
    print("ACCEPTANCE 4 PASS: worked example to 1e-12, all nonzero rows unit norm")


def test_05_transform_freezes_h_and_reproduces():
    """Inference must never write H and must be exactly repeatable."""
    rng = np.random.default_rng(3)
    v = rng.random((60, 30))
    cfg = NmfConfig(n_topics=4, max_iter=80, tol=0.0, seed=3)
    h = nmf_train(v, cfg).h
    h_bytes = h.tobytes()
    vp = rng.random((20, 30))
    first = nmf_transform(vp, h, cfg)
    second = nmf_transform(vp, h, cfg)
    assert h.tobytes() == h_bytes
    assert np.array_equal(first.h, h)
    assert np.all(first.w >= 0.0)
    assert np.array_equal(first.w, second.w)
    print("ACCEPTANCE 5 PASS: H bit-identical, W' nonnegative and reproducible")


def test_06_evaluation_identities_hold():
    """Self-accuracy, confusion normalization, weighted recall, baseline."""
    ids = tuple(f"d{i}" for i in range(32))
    silver_labels = (0,) * 16 + (1,) * 8 + (2,) * 8
    silver = LabeledSet(ids, silver_labels, "silver")
    self_pred = LabeledSet(ids, silver_labels, "system")
    assert accuracy(self_pred, silver) == 1.0

    mixed_labels = (
        (0,) * 12 + (1,) * 4  # silver 0: 12 right
        + (1,) * 6 + (2,) * 2  # silver 1: 6 right
        + (0,) * 2 + (1,) * 2 + (2,) * 4  # silver 2: 4 right
    )
    pred = LabeledSet(ids, mixed_labels, "system")
    report = eval_report(pred, silver)
    rows = report.confusion.row_normalized
    present = rows.sum(axis=1) > 0
    assert np.all(np.abs(rows[present].sum(axis=1) - 1.0) <= 1e-9)

    # every class size and count is a power-of-two multiple, so each
    # recall, weight, and product is an exact binary float: == is fair
    weighted = sum(
        int(report.confusion.counts[c].sum()) / report.n_docs * report.per_topic_recall[c]
        for c in range(report.confusion.n_topics)
    )
    assert weighted == report.accuracy
    assert report.accuracy == 22 / 32

    topic, base = majority_baseline(silver)
    constant = LabeledSet(ids, (topic,) * len(ids), "system")
    assert accuracy(constant, silver) == base
    print("ACCEPTANCE 6 PASS: evaluation identities hold")


def test_07_zero_noise_labels_equal_silver(demo_runs):
    """Degrading with p=0 and relabeling must reproduce silver exactly."""
    root = demo_runs["dir_a"]
    silver = read_labels_csv(root / "silver.csv", source="silver")
    clean = read_labels_csv(root / "levels" / "clean" / "labels.csv")
    assert clean.doc_ids == silver.doc_ids
    assert clean.labels == silver.labels
    assert accuracy(clean, silver) == 1.0
    level = next(r for r in demo_runs["summary"]["levels"] if r["level"] == "clean")
    assert level["accuracy"] == 1.0
    print(f"ACCEPTANCE 7 PASS: {len(clean)} zero-noise labels match silver exactly")


def test_08_accuracy_decays_with_noise_to_below_baseline(demo_runs):
    """Accuracy strictly falls along the drop ladder; heavy drop+substitution
    lands below the majority baseline."""
    summary = demo_runs["summary"]
    by_level = {r["level"]: r["accuracy"] for r in summary["levels"]}
    ladder = [by_level["clean"], by_level["drop40"], by_level["drop80"]]
    assert ladder[0] > ladder[1] > ladder[2]
    baseline = summary["baseline_accuracy"]
    assert by_level["drop80_sub10"] < baseline
    print(
        "ACCEPTANCE 8 PASS: "
        f"{ladder[0]:.3f} > {ladder[1]:.3f} > {ladder[2]:.3f}; "
        f"drop80_sub10 {by_level['drop80_sub10']:.3f} < baseline {baseline:.3f}"
    )


def test_09_bleu_oracles_and_reference_monotonicity():
    """Perfect-match score, the hand-computed brevity penalty, and 20 seeded
    cases where adding a reference never lowers the score."""
    hyps = ["the cat sat on the mat", "it rains every single day"]
    assert corpus_bleu(hyps, [[h] for h in hyps]).score == 100.0

    bp = corpus_bleu(["the cat sat"], [["the cat sat down"]]).brevity_penalty
    assert bp == pytest.approx(0.7165313105737893, abs=1e-6)

    vocab = ["alpha", "beta", "gamma", "delta", "echo", "fox", "golf", "hotel"]

    def sentence(rng, n):
        return " ".join(vocab[int(i)] for i in rng.integers(0, len(vocab), n))

    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 8))
        case_hyps, refs, extra = [], [], []
        for _ in range(n):
            case_hyps.append(sentence(rng, int(rng.integers(4, 13))))
            ref_len = int(rng.integers(4, 13))
            refs.append([sentence(rng, ref_len) for _ in range(int(rng.integers(1, 3)))])
            extra.append(sentence(rng, ref_len))
        base = corpus_bleu(case_hyps, refs, smooth=True).score
        widened = corpus_bleu(
            case_hyps, [r + [e] for r, e in zip(refs, extra)], smooth=True
        ).score
        assert widened >= base - 1e-12
    print("ACCEPTANCE 9 PASS: BLEU oracles match; 20/20 monotone under added references")


def test_10_demo_runs_are_byte_identical(demo_runs):
    """Two cmd_demo invocations with one seed produce identical trees."""
    dir_a, dir_b = demo_runs["dir_a"], demo_runs["dir_b"]
    files_a = sorted(p.relative_to(dir_a) for p in dir_a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(dir_b) for p in dir_b.rglob("*") if p.is_file())
    assert files_a == files_b
    assert len(files_a) > 20
    for rel in files_a:
        assert (dir_a / rel).read_bytes() == (dir_b / rel).read_bytes(), str(rel)
    print(f"ACCEPTANCE 10 PASS: {len(files_a)} files byte-identical across runs")
