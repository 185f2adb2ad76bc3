"""Representation -> score -> split, wired together for one document at a time."""

from __future__ import annotations

import logging
import os
import threading
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .embeddings import (
    TF, TFIDF, RepresentationConfig, bow_matrix, build_element_matrix, load_embeddings,
    read_idf, spherical_kmeans, topic_matrix,
)
from .metrics import evaluate
from .scoring import make_scorer
from .splitters import Segmentation, dp_split, split
from .text import (
    CHAR, SENTENCE, WORD, PreprocessOptions, RawDocument, TextError, TokenizedDocument,
    default_stopwords_path, preprocess, read_stopwords, split_sentences, tokenize_chars,
    tokenize_words,
)

log = logging.getLogger(__name__)

EMBEDDINGS_ENV = "VECSEG_EMBEDDINGS"

VECTORS = "vectors"
BOW = "bow"
TOPICS = "topics"


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    level: str = SENTENCE
    representation: str = VECTORS
    weighting: str = TF
    normalize_word_vectors: bool = False
    normalize_element_vectors: bool = False
    topic_k: int = 0
    scorer: str = "cvs"
    rank_r: int = 11
    use_rank: bool = False
    rank_mode: str = "corrected"
    splitter: str = "dp"
    max_iters: int = 20
    K: int | None = None
    embeddings: str | None = None
    idf: str | None = None
    stopwords: str | None = None
    remove_stopwords: bool = True
    stem: bool = False
    min_element_tokens: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.level not in (SENTENCE, WORD, CHAR):
            raise PipelineError(f"unknown level {self.level!r}")
        if self.representation not in (VECTORS, BOW, TOPICS):
            raise PipelineError(f"unknown representation {self.representation!r}")
        if self.representation == TOPICS and self.topic_k < 1:
            raise PipelineError("topic representation needs topic_k >= 1")
        if self.K is not None and self.K < 1:
            raise PipelineError("K must be >= 1")
        if self.splitter not in ("greedy", "dp", "refine"):
            raise PipelineError(f"unknown splitter {self.splitter!r}")
        if self.scorer not in ("c99", "euclidean", "cvs"):
            raise PipelineError(f"unknown scorer {self.scorer!r}")

    def to_dict(self):
        return asdict(self)


_C99 = dict(scorer="c99", splitter="greedy", use_rank=False, rank_r=11, min_element_tokens=5,
            remove_stopwords=True, stem=False)

PRESETS = {
    "oC99": dict(_C99, representation=BOW, use_rank=True),
    "oC99tf": dict(_C99, representation=VECTORS, weighting=TF),
    "oC99tfidf": dict(_C99, representation=VECTORS, weighting=TFIDF),
    "oC99k50": dict(_C99, representation=TOPICS, topic_k=50),
    "oC99k200": dict(_C99, representation=TOPICS, topic_k=200),
    "G-CVS": dict(scorer="cvs", splitter="greedy", representation=VECTORS, weighting=TF),
    "R-CVS": dict(scorer="cvs", splitter="refine", representation=VECTORS, weighting=TF, max_iters=20),
    "DP-CVS": dict(scorer="cvs", splitter="dp", representation=VECTORS, weighting=TF),
    "CVSn": dict(scorer="cvs", splitter="refine", representation=VECTORS, weighting=TF,
                 normalize_word_vectors=True, max_iters=20),
}


def preset(name: str, **overrides) -> RunConfig:
    if name not in PRESETS:
        raise PipelineError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return RunConfig(**{**PRESETS[name], **overrides})


CONFIG_FIELDS = {f.name: f for f in fields(RunConfig)}


def parse_config_value(name, text):
    """Coerce a ``key=value`` string to the type of the ``RunConfig`` field."""
    if name not in CONFIG_FIELDS:
        raise PipelineError(f"unknown config key {name!r}")
    default = CONFIG_FIELDS[name].default
    text = text.strip()
    if name == "K":
        return None if text.lower() in ("", "none", "from-reference", "ref") else int(text)
    if isinstance(default, bool):
        if text.lower() in ("1", "true", "t", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "f", "no", "off"):
            return False
        raise PipelineError(f"{name}: expected a boolean, got {text!r}")
    if isinstance(default, int):
        return int(text)
    if text.lower() in ("", "none"):
        return None
    return text


def read_config_file(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PipelineError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = parse_config_value(k.strip(), v)
    return out


@dataclass
class Resources:
    """Loaded tables shared by every document of a run (read-only after loading)."""

    config: RunConfig
    table: object = None
    idf: object = None
    stopwords: frozenset = frozenset()
    clustering: object = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def load(cls, config: RunConfig, vocabulary=None, table=None, idf=None) -> "Resources":
        res = cls(config)
        if config.remove_stopwords:
            path = config.stopwords or default_stopwords_path()
            if not Path(path).exists():
                raise FileNotFoundError(f"stopword file not found: {path}")
            res.stopwords = read_stopwords(path)
        needs_vectors = config.representation in (VECTORS, TOPICS)
        if table is not None:
            res.table = table
        elif needs_vectors:
            path = config.embeddings or os.environ.get(EMBEDDINGS_ENV)
            if not path:
                raise PipelineError("this configuration needs an embeddings file")
            if not Path(path).exists():
                raise FileNotFoundError(f"embeddings file not found: {path}")
            res.table = load_embeddings(path, vocabulary)
        if idf is not None:
            res.idf = idf
        elif config.weighting == TFIDF and config.representation == VECTORS:
            if not config.idf:
                raise PipelineError("tfidf weighting needs an idf file")
            if not Path(config.idf).exists():
                raise FileNotFoundError(f"idf file not found: {config.idf}")
            res.idf = read_idf(config.idf)
        if config.representation == TOPICS:
            res.clustering = spherical_kmeans(res.table, config.topic_k, seed=config.seed)
        return res

    def preprocess_options(self) -> PreprocessOptions:
        c = self.config
        return PreprocessOptions(c.remove_stopwords, c.stem, c.min_element_tokens, self.stopwords)


@dataclass(frozen=True)
class SegmentOutcome:
    boundaries: tuple          # over original elements
    kept_boundaries: tuple     # over elements that survived preprocessing
    n_original: int
    n_kept: int
    cost: float
    iterations: int
    converged: bool
    timings: dict
    doc: TokenizedDocument


def tokenize(raw: RawDocument, level: str) -> TokenizedDocument:
    if level == SENTENCE:
        return split_sentences(raw)
    if level == WORD:
        return tokenize_words(raw)
    return tokenize_chars(raw)


def _drop_rows(doc, keep):
    keep = np.asarray(keep, dtype=bool)
    if keep.all():
        return doc
    if not keep.any():
        raise PipelineError("no element has a usable representation")
    return replace(
        doc,
        elements=tuple(e for e, k in zip(doc.elements, keep) if k),
        kept_index_map=tuple(i for i, k in zip(doc.kept_index_map, keep) if k),
        n_source=doc.n_original,
    )


def represent(doc: TokenizedDocument, res: Resources):
    """Element matrix for ``doc``; elements without any usable feature are dropped."""
    c = res.config
    if c.representation == BOW:
        V = bow_matrix(doc)
    elif c.representation == TOPICS:
        V = topic_matrix(doc, res.clustering)
    else:
        table = res.table
        doc = _drop_rows(doc, [any(t in table for t in el) for el in doc.elements])
        cfg = RepresentationConfig(c.weighting, c.normalize_word_vectors, c.normalize_element_vectors)
        V = build_element_matrix(doc, table, res.idf, cfg)
    if c.representation != VECTORS or c.scorer == "c99":
        nonzero = np.linalg.norm(V, axis=1) > 0
        if not nonzero.all():
            doc = _drop_rows(doc, nonzero)
            V = V[nonzero]
    return doc, V


def time_splitters(scorer, K, max_iters=20, repeats=3) -> dict:
    """Best-of-``repeats`` wall-clock of dp and of refine started from greedy."""
    def best(fn):
        times = []
        for _ in range(repeats):
            t = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t)
        return min(times)

    return {
        "dp_split": best(lambda: dp_split(scorer, scorer.n, K)),
        "refine_split": best(lambda: split(scorer, K, "refine", max_iters)),
    }


def segment_document(doc: TokenizedDocument, res: Resources, K: int | None = None,
                     compare_splitters: bool = False) -> SegmentOutcome:
    c = res.config
    timings = {}
    t0 = time.perf_counter()
    if c.level != CHAR:
        doc = preprocess(doc, res.preprocess_options())
    doc, V = represent(doc, res)
    K = c.K if K is None else K
    if K is None:
        raise PipelineError("number of segments K is required")
    K = min(K, len(doc))
    scorer = make_scorer(c.scorer, V, c.rank_r, c.use_rank, c.rank_mode)
    t1 = time.perf_counter()
    result = split(scorer, K, c.splitter, c.max_iters)
    t2 = time.perf_counter()
    timings["precompute"] = t1 - t0
    timings["split"] = t2 - t1
    if compare_splitters:
        timings.update(time_splitters(scorer, K, c.max_iters))
    kept = result.segmentation.boundaries
    return SegmentOutcome(
        boundaries=tuple(doc.to_original(kept)),
        kept_boundaries=kept,
        n_original=doc.n_original,
        n_kept=len(doc),
        cost=result.cost,
        iterations=result.iterations_used,
        converged=result.converged,
        timings=timings,
        doc=doc,
    )


def evaluate_document(ld, res: Resources, compare_splitters: bool = False) -> dict:
    """Segment a labeled document with K taken from its reference and score it."""
    out = segment_document(ld.doc, res, K=ld.reference.k, compare_splitters=compare_splitters)
    t = time.perf_counter()
    hyp = Segmentation(out.boundaries, ld.reference.n_elements)
    rep = evaluate(ld.reference, hyp)
    out.timings["metrics"] = time.perf_counter() - t
    return {
        "id": ld.doc.id,
        "pk": rep.pk,
        "wd": rep.wd,
        "k_used": rep.k_used,
        "n_probes": rep.n_probes,
        "n_elements": ld.reference.n_elements,
        "n_kept": out.n_kept,
        "K": ld.reference.k,
        "reference": list(ld.reference.boundaries),
        "hypothesis": list(out.boundaries),
        "cost": out.cost,
        "iterations": out.iterations,
        "converged": out.converged,
        "timings": out.timings,
    }


__all__ = [
    "RunConfig", "PRESETS", "preset", "Resources", "SegmentOutcome", "segment_document",
    "evaluate_document", "time_splitters", "tokenize", "represent", "read_config_file", "parse_config_value",
    "PipelineError", "TextError",
]
