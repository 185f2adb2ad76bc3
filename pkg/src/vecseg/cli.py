"""``vecseg`` command line: segment, evaluate, benchmark, gen, idf, audit, synth.

Exit status: 0 success, 1 usage error, 2 data error, 3 internal error.
Run settings are resolved as preset, then ``--config`` file, then flags; the
environment only supplies default resource paths (stopwords, embeddings).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .datagen import (
    SENTENCE_CONCAT, WORD_CHUNK, DataError, DatasetSpec, cross_validated_audit, dataset_statistics,
    SyntheticCorpusConfig, generate, parse_reference, read_corpus_dir, read_dataset, save_synthetic,
    write_dataset,
)
from .embeddings import EmbeddingError, compute_idf, write_idf
from .metrics import MetricError, evaluate
from .pipeline import (
    CONFIG_FIELDS, PRESETS, PipelineError, Resources, RunConfig, evaluate_document,
    parse_config_value, read_config_file, segment_document, tokenize,
)
from .porter import porter_stem
from .render import html_page, render_ansi, render_html, segment_char_ranges
from .scoring import ScoringError
from .splitters import Segmentation, SplitError, warm_up
from .text import CHAR, SENTENCE, WORD, RawDocument, TextError, default_stopwords, from_lines

log = logging.getLogger("vecseg")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

DATA_ERRORS = (
    DataError, EmbeddingError, MetricError, PipelineError, ScoringError, SplitError, TextError,
    OSError, UnicodeDecodeError, json.JSONDecodeError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------- run config

def _add_config_flags(p):
    g = p.add_argument_group("run configuration (flags > --config file > preset)")
    g.add_argument("--preset", choices=sorted(PRESETS), help="named experimental setting")
    g.add_argument("--config", metavar="FILE", help="key=value file of RunConfig fields")
    for name, f in CONFIG_FIELDS.items():
        flag = "--" + name.replace("_", "-")
        if isinstance(f.default, bool):
            g.add_argument(flag, dest=name, action=argparse.BooleanOptionalAction, default=None)
        elif name == "K":
            g.add_argument("-K", "--K", dest="K", default=None, metavar="K",
                           help="number of segments, or 'from-reference'")
        else:
            g.add_argument(flag, dest=name, default=None, metavar=name.upper())


def build_config(args) -> RunConfig:
    merged = dict(PRESETS[args.preset]) if args.preset else {}
    try:
        if args.config:
            if not Path(args.config).exists():
                raise FileNotFoundError(f"config file not found: {args.config}")
            merged.update(read_config_file(args.config))
        for name, f in CONFIG_FIELDS.items():
            value = getattr(args, name, None)
            if value is None:
                continue
            merged[name] = value if isinstance(f.default, bool) else parse_config_value(name, value)
        return RunConfig(**merged)
    except (PipelineError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _vocabulary(docs):
    return {t for d in docs for el in d.elements for t in el}


# ------------------------------------------------------------------ segment

def _read_input(path, fmt, level):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    name = "stdin" if path == "-" else Path(path).stem
    if fmt == "reference":
        ld = parse_reference(text, level, name, str(path))
        return ld.doc, ld.reference.k
    if fmt == "lines":
        if level != SENTENCE:
            raise UsageError("--input-format lines needs --level sentence")
        return from_lines(text, name), None
    return tokenize(RawDocument(text, name), level), None


def cmd_segment(args) -> int:
    cfg = build_config(args)
    doc, ref_k = _read_input(args.input, args.input_format, cfg.level)
    K = cfg.K if cfg.K is not None else ref_k
    if K is None:
        raise UsageError("number of segments is required: pass -K or use --input-format reference")
    res = Resources.load(cfg, vocabulary=_vocabulary([doc]))
    out = segment_document(doc, res, K=K)
    original = out.doc
    starts = (0,) + tuple(out.boundaries[:-1])
    chars = segment_char_ranges(original, out.boundaries)
    record = {
        "id": original.id,
        "n_elements": out.n_original,
        "K": len(out.boundaries),
        "boundaries": list(out.boundaries),
        "segments": [
            {"elements": [a, b], "chars": [ca, cb]}
            for (a, b), (ca, cb) in zip(zip(starts, out.boundaries), chars)
        ],
        "n_kept": out.n_kept,
        "kept_boundaries": list(out.kept_boundaries),
        "cost": out.cost,
        "iterations": out.iterations,
        "converged": out.converged,
        "config": cfg.to_dict(),
    }
    _write_json(record, args.output)
    if args.annotate:
        if args.annotate == "-":
            sys.stdout.write(render_ansi(original, out.boundaries) + "\n")
        elif Path(args.annotate).suffix.lower() in (".html", ".htm"):
            Path(args.annotate).write_text(html_page(render_html(original, out.boundaries), original.id),
                                           encoding="utf-8")
        else:
            Path(args.annotate).write_text(render_ansi(original, out.boundaries) + "\n", encoding="utf-8")
    return EXIT_OK


def _write_json(record, dest):
    text = json.dumps(record, indent=1) + "\n"
    if dest in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


# ----------------------------------------------------------------- evaluate

def _load_segmentation(path, level):
    path = Path(path)
    if path.suffix.lower() == ".json":
        rec = json.loads(path.read_text(encoding="utf-8"))
        try:
            return Segmentation(tuple(rec["boundaries"]), int(rec["n_elements"]))
        except (KeyError, TypeError) as exc:
            raise DataError(f"{path}: not a segmentation record ({exc})") from None
        except SplitError as exc:
            raise DataError(f"{path}: {exc}") from None
    text = path.read_text(encoding="utf-8")
    return parse_reference(text, level, path.stem, str(path)).reference


def cmd_evaluate(args) -> int:
    ref = _load_segmentation(args.reference, args.level)
    hyp = _load_segmentation(args.hypothesis, args.level)
    rep = evaluate(ref, hyp, args.k)
    print(f"pk={rep.pk:.6f} wd={rep.wd:.6f} k_used={rep.k_used} n_probes={rep.n_probes}")
    print(json.dumps({"pk": rep.pk, "wd": rep.wd, "k_used": rep.k_used, "n_probes": rep.n_probes}))
    return EXIT_OK


# ---------------------------------------------------------------- benchmark

RESULTS = "results.jsonl"
SUMMARY = "summary.json"
TIMINGS = "timings.jsonl"


def _run_one(ld, res, compare):
    try:
        rec = evaluate_document(ld, res, compare_splitters=compare)
        return rec, None
    except DATA_ERRORS as exc:
        log.warning("document %s failed: %s", ld.doc.id, exc)
        return None, {"id": ld.doc.id, "error": f"{type(exc).__name__}: {exc}"}


def summarize(records, failures, cfg, compare) -> tuple[dict, dict]:
    """Deterministic summary plus a separate wall-clock summary."""
    summary = {
        "config": cfg.to_dict(),
        "n_documents": len(records) + len(failures),
        "n_ok": len(records),
        "n_failed": len(failures),
        "mean_pk": float(np.mean([r["pk"] for r in records])) if records else None,
        "mean_wd": float(np.mean([r["wd"] for r in records])) if records else None,
        "mean_iterations": float(np.mean([r["iterations"] for r in records])) if records else None,
        "converged_fraction": float(np.mean([r["converged"] for r in records])) if records else None,
        "failures": failures,
    }
    stages = sorted({k for r in records for k in r["timings"]})
    totals = {s: float(sum(r["timings"].get(s, 0.0) for r in records)) for s in stages}
    timing = {"total_seconds": totals}
    if compare and totals.get("refine_split"):
        timing["dp_over_refine"] = totals["dp_split"] / totals["refine_split"]
    return summary, timing


def cmd_benchmark(args) -> int:
    cfg = build_config(args)
    if args.workers < 1:
        raise UsageError("--workers must be >= 1")
    docs, manifest = read_dataset(args.dataset)
    if not docs:
        raise DataError(f"dataset {args.dataset} has no documents")
    if args.limit:
        docs = docs[: args.limit]
    if cfg.level != manifest.get("level", SENTENCE):
        log.warning("config level %s differs from dataset level %s", cfg.level, manifest.get("level"))
    res = Resources.load(cfg, vocabulary=_vocabulary(ld.doc for ld in docs))
    compare = args.compare_splitters
    if compare:
        warm_up()
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        outcomes = list(pool.map(lambda ld: _run_one(ld, res, compare), docs))
    records = sorted((r for r, _ in outcomes if r is not None), key=lambda r: r["id"])
    failures = sorted((f for _, f in outcomes if f is not None), key=lambda f: f["id"])
    summary, timing = summarize(records, failures, cfg, compare)

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / RESULTS, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps({k: v for k, v in r.items() if k != "timings"}) + "\n")
        with open(out / TIMINGS, "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps({"id": r["id"], **r["timings"]}) + "\n")
            fh.write(json.dumps({"summary": timing}) + "\n")
        (out / SUMMARY).write_text(json.dumps(summary, indent=1) + "\n", encoding="utf-8")

    label = args.preset or f"{cfg.scorer}/{cfg.splitter}"
    print(f"{'setting':<12} {'docs':>5} {'failed':>6} {'Pk%':>7} {'WD%':>7}")
    if records:
        print(f"{label:<12} {summary['n_documents']:>5} {summary['n_failed']:>6} "
              f"{100 * summary['mean_pk']:>7.2f} {100 * summary['mean_wd']:>7.2f}")
    else:
        print(f"{label:<12} {summary['n_documents']:>5} {summary['n_failed']:>6} {'-':>7} {'-':>7}")
    if "dp_over_refine" in timing:
        t = timing["total_seconds"]
        print(f"split time: dp {t['dp_split']:.3f}s, refine(greedy) {t['refine_split']:.3f}s, "
              f"ratio {timing['dp_over_refine']:.2f}")
    if not records:
        print("all documents failed", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


# ---------------------------------------------------------------- gen / idf

def cmd_gen(args) -> int:
    level = WORD if args.style == WORD_CHUNK else SENTENCE
    corpus = read_corpus_dir(args.corpus, level)
    try:
        spec = DatasetSpec(args.style, tuple(args.n_range), args.segments, args.documents, args.seed)
    except DataError as exc:
        raise UsageError(str(exc)) from None
    docs = generate(corpus, spec)
    write_dataset(docs, args.out, spec, corpus_ids=[d.id for d in corpus])
    stats = dataset_statistics(docs)
    print(f"wrote {stats['documents']} documents to {args.out}")
    print(f"elements {stats['elements']}, unique {stats['unique_elements']}, "
          f"unique segment-initial {stats['unique_segment_initial']}")
    return EXIT_OK


def cmd_idf(args) -> int:
    corpus = read_corpus_dir(args.corpus, WORD if args.level == WORD else SENTENCE)
    if args.stem:
        corpus = [replace(d, elements=tuple(tuple(porter_stem(t) for t in el) for el in d.elements))
                  for d in corpus]
    table = compute_idf(corpus)
    write_idf(table, args.out)
    print(f"#documents {table.num_documents}, {len(table.df)} distinct tokens -> {args.out}")
    return EXIT_OK


def cmd_audit(args) -> int:
    if args.folds < 2:
        raise UsageError("cross-validation needs at least 2 folds")
    docs, _ = read_dataset(args.dataset)
    rep = cross_validated_audit(docs, args.folds, args.seed)
    d = rep.as_dict()
    print(f"accuracy={d['accuracy']:.4f} precision={d['precision']:.4f} "
          f"recall={d['recall']:.4f} pk={d['pk']:.4f} positions={d['positions']}")
    print(json.dumps(d))
    return EXIT_OK


def cmd_synth(args) -> int:
    cfg = SyntheticCorpusConfig(n_documents=args.documents, dim=args.dim, seed=args.seed)
    corpus_dir, emb = save_synthetic(cfg, args.out, default_stopwords())
    print(f"corpus: {corpus_dir}\nembeddings: {emb}")
    return EXIT_OK


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vecseg", description="Linear text segmentation toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("segment", help="split one document")
    s.add_argument("input", help="input file, or - for stdin")
    s.add_argument("--input-format", choices=("text", "lines", "reference"), default="text")
    s.add_argument("-o", "--output", default="-", help="JSON record destination (default stdout)")
    s.add_argument("--annotate", metavar="PATH",
                   help="annotated rendering: .html for markup, - for terminal colours")
    _add_config_flags(s)
    s.set_defaults(func=cmd_segment)

    e = sub.add_parser("evaluate", help="Pk and WindowDiff of a hypothesis")
    e.add_argument("reference")
    e.add_argument("hypothesis", help="reference-format file or segment JSON record")
    e.add_argument("--level", choices=(SENTENCE, WORD, CHAR), default=SENTENCE)
    e.add_argument("-k", type=int, default=None, help="probe distance (default from reference)")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("benchmark", help="segment every document of a dataset")
    b.add_argument("dataset")
    b.add_argument("--out", help="directory for results.jsonl, summary.json, timings.jsonl")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--limit", type=int, default=0, help="only the first N documents")
    b.add_argument("--compare-splitters", action=argparse.BooleanOptionalAction, default=True,
                   help="also time dp against refine(greedy) on every document")
    _add_config_flags(b)
    b.set_defaults(func=cmd_benchmark)

    g = sub.add_parser("gen", help="build a synthetic segmentation dataset from a corpus")
    g.add_argument("--corpus", required=True, help="directory of .txt documents")
    g.add_argument("--out", required=True)
    g.add_argument("--style", choices=(SENTENCE_CONCAT, WORD_CHUNK), default=SENTENCE_CONCAT)
    g.add_argument("--n-range", nargs=2, type=int, default=(3, 11), metavar=("LO", "HI"))
    g.add_argument("--segments", type=int, default=10)
    g.add_argument("--documents", type=int, default=400)
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_gen)

    i = sub.add_parser("idf", help="document-frequency table of a corpus")
    i.add_argument("--corpus", required=True)
    i.add_argument("--out", required=True)
    i.add_argument("--level", choices=(SENTENCE, WORD), default=SENTENCE)
    i.add_argument("--stem", action="store_true", help="count Porter stems")
    i.set_defaults(func=cmd_idf)

    a = sub.add_parser("audit", help="cross-validated boundary memorization")
    a.add_argument("dataset")
    a.add_argument("--folds", type=int, default=10)
    a.add_argument("--seed", type=int, default=0)
    a.set_defaults(func=cmd_audit)

    y = sub.add_parser("synth", help="write a synthetic topic corpus and matching word vectors")
    y.add_argument("--out", required=True)
    y.add_argument("--documents", type=int, default=124)
    y.add_argument("--dim", type=int, default=50)
    y.add_argument("--seed", type=int, default=0)
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"vecseg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DATA_ERRORS as exc:
        print(f"vecseg: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001 - last-resort report
        log.debug("internal error", exc_info=True)
        print(f"vecseg: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
