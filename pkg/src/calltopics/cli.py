"""Command-line pipeline: segment, split, fit, label, eval, drift, bleu,
degrade, and an end-to-end demo on a synthetic corpus.

Every subcommand reads files, writes files, and logs to stderr. Failures
exit 2 (usage), 3 (bad data), or 4 (numerical breakdown) with a one-line
JSON error on stderr so callers can script against it. A TOML config file
can pre-fill any flag; explicit flags always win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bleu import corpus_bleu, write_bleu_json
from .corpus import (
    call_durations,
    load_corpus,
    load_segments,
    sample_split,
    segment_calls,
    split_from_dict,
    split_to_dict,
    write_segments,
)
from .degrade import NoiseSpec, degrade_corpus
from .demo import run_demo
from .errors import DataError, NumericalError
from .evaluate import (
    LabeledSet,
    drift_timeline,
    eval_report,
    read_labels_csv,
    write_confusion_csv,
    write_labels_csv,
    write_recall_csv,
    write_report_json,
    write_timeline_csv,
)
from .nmf import NmfConfig, nmf_train, nmf_transform
from .textprep import build_vocabulary, vectorize
from .topics import TopicModel, assign_labels, load_model, save_model

log = logging.getLogger("calltopics")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _read_split_ids(path, name: str) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    for rec in payload.get("splits", []):
        if rec.get("name") == name:
            return set(split_from_dict(rec).call_ids)
    raise DataError(f"splits file {path} has no split named '{name}'")


def _filter_by_split(docs, args):
    if args.split is None:
        return docs
    if args.split_name is None:
        raise DataError("--split requires --split-name")
    ids = _read_split_ids(args.split, args.split_name)
    kept = [d for d in docs if d.call_id in ids]
    if not kept:
        raise DataError(f"split '{args.split_name}' matches no documents")
    return kept


def cmd_segment(args) -> int:
    utts = load_corpus(args.input)
    docs = segment_calls(utts, args.window_s)
    write_segments(docs, args.output)
    log.info("segmented %d utterances into %d documents", len(utts), len(docs))
    return EXIT_OK


def cmd_split(args) -> int:
    utts = load_corpus(args.input)
    durations = call_durations(utts)
    if args.exclude:
        drop: set[str] = set()
        with open(args.exclude, encoding="utf-8") as fh:
            for rec in json.load(fh).get("splits", []):
                drop.update(rec["call_ids"])
        durations = [(c, d) for c, d in durations if c not in drop]
    targets = [float(t) for t in args.targets.split(",")]
    names = args.names.split(",") if args.names else [f"t{t:g}s" for t in targets]
    if len(names) != len(targets):
        raise DataError(f"{len(targets)} targets but {len(names)} names")
    splits = [
        sample_split(durations, target, args.seed, name)
        for target, name in zip(targets, names)
    ]
    with open(args.output, "w", encoding="utf-8") as fh:
        json.dump(
            {"seed": args.seed, "splits": [split_to_dict(s) for s in splits]},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    for s in splits:
        log.info("split %s: %d calls, %.1f s", s.name, len(s.call_ids), s.total_seconds)
    return EXIT_OK


def cmd_fit(args) -> int:
    docs = _filter_by_split(load_segments(args.input), args)
    vocab = build_vocabulary(docs, args.min_df, args.max_df_ratio, args.max_terms)
    cfg = NmfConfig(
        n_topics=args.topics,
        max_iter=args.max_iter,
        tol=args.tol,
        seed=args.seed,
        init=args.init,
    )
    fit = nmf_train(vectorize(docs, vocab), cfg)
    names = tuple(args.names.split(",")) if args.names else None
    model = TopicModel(vocab, fit.h, cfg, names)
    save_model(model, args.model)
    log.info(
        "fit %d docs, vocab %d, %d topics, objective %.6f after %d iterations",
        len(docs), len(vocab), args.topics, fit.trace[-1], len(fit.trace) - 1,
    )
    return EXIT_OK


def cmd_label(args) -> int:
    docs = _filter_by_split(load_segments(args.input), args)
    model = load_model(args.model)
    w = nmf_transform(vectorize(docs, model.vocab), model.h, model.config).w
    labels, flags = assign_labels(w)
    labeled = LabeledSet(tuple(d.doc_id for d in docs), tuple(labels), "system")
    write_labels_csv(labeled, args.output, flags)
    log.info("labeled %d documents (%d degenerate)", len(labels), sum(flags))
    return EXIT_OK


def cmd_eval(args) -> int:
    pred = read_labels_csv(args.pred, "system")
    silver = read_labels_csv(args.silver, "silver")
    report = eval_report(pred, silver)
    write_report_json(report, args.output)
    if args.confusion_csv:
        write_confusion_csv(report.confusion, args.confusion_csv)
    if args.recall_csv:
        write_recall_csv(report, args.recall_csv)
    log.info(
        "accuracy %.3f over %d docs (majority baseline %.3f)",
        report.accuracy, report.n_docs, report.baseline_accuracy,
    )
    return EXIT_OK


def cmd_drift(args) -> int:
    labels = read_labels_csv(args.labels, "silver")
    segs = load_segments(args.segments)
    call_filter = None
    if args.calls:
        call_filter = set(args.calls.split(","))
    elif args.split:
        if args.split_name is None:
            raise DataError("--split requires --split-name")
        call_filter = _read_split_ids(args.split, args.split_name)
    table = drift_timeline(labels, segs, call_filter)
    write_timeline_csv(table, args.output)
    log.info("timeline over %d segment indexes", len(table))
    return EXIT_OK


def cmd_bleu(args) -> int:
    with open(args.hyp, encoding="utf-8") as fh:
        hyps = [line.rstrip("\n") for line in fh]
    ref_columns = []
    for path in args.refs:
        with open(path, encoding="utf-8") as fh:
            column = [line.rstrip("\n") for line in fh]
        if len(column) != len(hyps):
            raise DataError(
                f"reference file {path} has {len(column)} lines, hypothesis has {len(hyps)}"
            )
        ref_columns.append(column)
    refs = [[col[i] for col in ref_columns] for i in range(len(hyps))]
    result = corpus_bleu(hyps, refs, smooth=args.smooth)
    if args.output:
        write_bleu_json(result, args.output)
    else:
        json.dump({"score": result.score, "brevity_penalty": result.brevity_penalty}, sys.stdout)
        sys.stdout.write("\n")
    log.info("BLEU %.2f (BP %.3f) over %d segments", result.score, result.brevity_penalty, len(hyps))
    return EXIT_OK


def cmd_degrade(args) -> int:
    docs = load_segments(args.input)
    pool: tuple[str, ...] = ()
    if args.pool_file:
        with open(args.pool_file, encoding="utf-8") as fh:
            pool = tuple(tok for line in fh for tok in line.split())
    spec = NoiseSpec(
        p_drop=args.p_drop,
        p_sub=args.p_sub,
        seed=args.seed,
        sub_pool=args.sub_pool,
        fixed_pool=pool,
    )
    write_segments(degrade_corpus(docs, spec), args.output)
    log.info("degraded %d documents (p_drop=%g, p_sub=%g)", len(docs), args.p_drop, args.p_sub)
    return EXIT_OK


def cmd_demo(args) -> int:
    summary = run_demo(args.out_dir, args.seed)
    log.info(
        "demo: %d train / %d eval docs, baseline %.3f",
        summary["n_train_docs"], summary["n_eval_docs"], summary["baseline_accuracy"],
    )
    for row in summary["levels"]:
        log.info(
            "  %-14s p_drop=%.1f p_sub=%.1f accuracy=%.3f bleu=%.2f",
            row["level"], row["p_drop"], row["p_sub"], row["accuracy"], row["bleu"],
        )
    return EXIT_OK


def build_parser() -> tuple[argparse.ArgumentParser, argparse._SubParsersAction]:
    parser = argparse.ArgumentParser(
        prog="calltopics",
        description="Topic labeling for translated conversational speech.",
    )
    parser.add_argument("--config", help="TOML file with per-command default flags")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("segment", help="cut calls into fixed-duration documents")
    p.add_argument("input", help="utterances JSONL")
    p.add_argument("output", help="segments JSONL")
    p.add_argument("--window-s", type=float, default=60.0)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("split", help="sample reproducible call splits by duration")
    p.add_argument("input", help="utterances JSONL")
    p.add_argument("output", help="splits JSON")
    p.add_argument("--targets", required=True, help="comma-separated duration targets in seconds")
    p.add_argument("--names", help="comma-separated split names (default t<target>s)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exclude", help="splits JSON whose calls must not be reused")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("fit", help="build vocabulary and train the topic model")
    p.add_argument("input", help="segments JSONL")
    p.add_argument("model", help="output model JSON")
    p.add_argument("--topics", type=int, default=10)
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--max-df-ratio", type=float, default=0.10)
    p.add_argument("--max-terms", type=int, default=1000)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=["nndsvda", "seeded-random"], default="nndsvda")
    p.add_argument("--names", help="comma-separated topic names to store in the model")
    p.add_argument("--split", help="splits JSON restricting which calls are used")
    p.add_argument("--split-name", help="name of the split inside --split")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("label", help="infer topic labels for documents")
    p.add_argument("input", help="segments JSONL")
    p.add_argument("model", help="model JSON")
    p.add_argument("output", help="labels CSV")
    p.add_argument("--split", help="splits JSON restricting which calls are used")
    p.add_argument("--split-name", help="name of the split inside --split")
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("eval", help="score predicted labels against silver labels")
    p.add_argument("pred", help="predicted labels CSV")
    p.add_argument("silver", help="silver labels CSV")
    p.add_argument("output", help="report JSON")
    p.add_argument("--confusion-csv")
    p.add_argument("--recall-csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("drift", help="per-minute label distribution timeline")
    p.add_argument("labels", help="labels CSV")
    p.add_argument("segments", help="segments JSONL")
    p.add_argument("output", help="timeline CSV")
    p.add_argument("--calls", help="comma-separated call ids to keep")
    p.add_argument("--split", help="splits JSON of calls to keep")
    p.add_argument("--split-name", help="name of the split inside --split")
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("bleu", help="corpus BLEU of hypotheses against references")
    p.add_argument("hyp", help="hypothesis text, one segment per line")
    p.add_argument("refs", nargs="+", help="reference files, aligned line by line")
    p.add_argument("-o", "--output", help="JSON output path (default: stdout)")
    p.add_argument("--smooth", action="store_true", help="add-1 smoothing for n >= 2")
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("degrade", help="stochastically corrupt document text")
    p.add_argument("input", help="segments JSONL")
    p.add_argument("output", help="degraded segments JSONL")
    p.add_argument("--p-drop", type=float, default=0.0)
    p.add_argument("--p-sub", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sub-pool", choices=["corpus-unigram", "fixed-list"], default="corpus-unigram")
    p.add_argument("--pool-file", help="whitespace-separated tokens for fixed-list")
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("demo", help="run the whole pipeline on a synthetic corpus")
    p.add_argument("out_dir", help="output directory")
    p.add_argument("--seed", type=int, default=11)
    p.set_defaults(func=cmd_demo)

    return parser, sub


def _apply_config(parser, sub, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    with open(args.config, "rb") as fh:
        data = tomllib.load(fh)
    section = data.get(args.command, {})
    if not isinstance(section, dict):
        raise DataError(f"config section [{args.command}] must be a table")
    command_parser = sub.choices[args.command]
    valid = {a.dest for a in command_parser._actions}
    defaults = {}
    for key, value in section.items():
        dest = key.replace("-", "_")
        if dest not in valid:
            raise DataError(f"config key '{key}' is not a flag of '{args.command}'")
        defaults[dest] = value
    command_parser.set_defaults(**defaults)
    # re-parse: config fills the gaps, explicit flags still win
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser, sub = build_parser()
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        args = _apply_config(parser, sub, argv)
        log.setLevel(logging.DEBUG if args.verbose else logging.INFO)
        return args.func(args)
    except NumericalError as exc:
        _emit_error(exc)
        return EXIT_NUMERIC
    except DataError as exc:
        _emit_error(exc)
        return EXIT_DATA
    except OSError as exc:
        _emit_error(exc)
        return EXIT_DATA
    except json.JSONDecodeError as exc:
        _emit_error(exc)
        return EXIT_DATA
    except ValueError as exc:
        # parameter validation (NmfConfig bounds, shape checks) is a usage error
        _emit_error(exc)
        return EXIT_USAGE


def _emit_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    json.dump(payload, sys.stderr)
    sys.stderr.write("\n")


if __name__ == "__main__":
    sys.exit(main())
