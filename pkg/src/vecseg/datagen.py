"""Synthetic segmentation benchmarks, the reference file format, and the leakage audit."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingTable, save_embeddings
from .metrics import pk
from .splitters import Segmentation
from .text import SENTENCE, WORD, RawDocument, TokenizedDocument, split_sentences, tokenize_words, word_tokens

log = logging.getLogger(__name__)

DELIMITER = "=" * 10
WORDS_PER_LINE = 20
GENERATOR = "numpy.random.PCG64"
SENTENCE_CONCAT = "sentence_concat"
WORD_CHUNK = "word_chunk"


class DataError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledDocument:
    doc: TokenizedDocument
    reference: Segmentation
    source_ids: tuple = ()

    def __post_init__(self):
        if self.reference.n_elements != len(self.doc):
            raise DataError("reference does not cover the document")
        if self.source_ids and len(self.source_ids) != self.reference.k:
            raise DataError("one source entry per segment required")


@dataclass(frozen=True)
class DatasetSpec:
    style: str = SENTENCE_CONCAT
    n_range: tuple = (3, 11)
    num_segments: int = 10
    num_documents: int = 400
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.n_range
        if not 1 <= lo <= hi:
            raise DataError(f"bad n_range {self.n_range}")
        if self.num_segments < 2:
            raise DataError("num_segments must be >= 2")
        if self.style not in (SENTENCE_CONCAT, WORD_CHUNK):
            raise DataError(f"unknown style {self.style!r}")


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def _build_doc(texts, level, id):
    """Document whose element ``i`` has source text ``texts[i]``, joined by newlines."""
    spans = []
    pos = 0
    for t in texts:
        spans.append((pos, pos + len(t)))
        pos += len(t) + 1
    if level == SENTENCE:
        elements = tuple(tuple(word_tokens(t)) for t in texts)
    else:
        elements = tuple((t,) for t in texts)
    return TokenizedDocument(elements, level, tuple(range(len(texts))), "\n".join(texts), tuple(spans), id)


def gen_sentence_concat(corpus, spec: DatasetSpec) -> list[LabeledDocument]:
    """Concatenate the opening sentences of distinct random corpus documents."""
    lo, hi = spec.n_range
    if len(corpus) < spec.num_segments:
        raise DataError(f"corpus has {len(corpus)} documents, need {spec.num_segments}")
    short = [d.id or str(i) for i, d in enumerate(corpus) if len(d) < hi]
    if short:
        raise DataError(f"corpus documents shorter than {hi} sentences: {', '.join(short[:5])}")
    rng = _rng(spec.seed)
    out = []
    for n_doc in range(spec.num_documents):
        picks = rng.choice(len(corpus), size=spec.num_segments, replace=False)
        texts, lengths, sources = [], [], []
        for p in picks:
            n = int(rng.integers(lo, hi + 1))
            src = corpus[int(p)]
            texts.extend(src.element_text(i) for i in range(n))
            lengths.append(n)
            sources.append((src.id or str(int(p)), (0, n)))
        doc = _build_doc(texts, SENTENCE, f"{n_doc:04d}")
        out.append(LabeledDocument(doc, Segmentation.from_lengths(lengths), tuple(sources)))
    return out


def gen_word_chunk(corpus, spec: DatasetSpec) -> list[LabeledDocument]:
    """Concatenate contiguous word runs taken from random places in random documents."""
    lo, hi = spec.n_range
    usable = []
    for i, d in enumerate(corpus):
        if len(d) < hi:
            log.warning("skipping corpus document %s: %d words < %d", d.id or i, len(d), hi)
        else:
            usable.append(i)
    if not usable:
        raise DataError("no corpus document is long enough")
    rng = _rng(spec.seed)
    out = []
    for n_doc in range(spec.num_documents):
        words, lengths, sources = [], [], []
        for _ in range(spec.num_segments):
            p = usable[int(rng.integers(len(usable)))]
            src = corpus[p]
            n = int(rng.integers(lo, hi + 1))
            start = int(rng.integers(0, len(src) - n + 1))
            words.extend(src.elements[i][0] for i in range(start, start + n))
            lengths.append(n)
            sources.append((src.id or str(p), (start, start + n)))
        doc = _build_doc(words, WORD, f"{n_doc:04d}")
        out.append(LabeledDocument(doc, Segmentation.from_lengths(lengths), tuple(sources)))
    return out


def generate(corpus, spec: DatasetSpec) -> list[LabeledDocument]:
    if spec.style == SENTENCE_CONCAT:
        return gen_sentence_concat(corpus, spec)
    return gen_word_chunk(corpus, spec)


# ------------------------------------------------------------ reference files

def format_reference(ld: LabeledDocument) -> str:
    lines = [DELIMITER]
    doc = ld.doc
    for a, b in ld.reference.segments():
        if doc.level == SENTENCE:
            lines.extend(doc.element_text(i) for i in range(a, b))
        else:
            toks = [doc.elements[i][0] for i in range(a, b)]
            for c in range(0, len(toks), WORDS_PER_LINE):
                lines.append(" ".join(toks[c:c + WORDS_PER_LINE]))
        lines.append(DELIMITER)
    return "\n".join(lines) + "\n"


def write_reference_file(ld: LabeledDocument, path):
    Path(path).write_text(format_reference(ld), encoding="utf-8")


def parse_reference(text: str, level: str = SENTENCE, id: str = "", source: str = "<string>") -> LabeledDocument:
    """Parse delimiter-separated segments; leading/trailing delimiters are optional."""
    segments = []
    current = []
    leading_ok = True
    pos = 0
    for lineno, line in enumerate(text.splitlines(keepends=True), 1):
        body = line.rstrip("\r\n")
        stripped = body.strip()
        start = pos
        pos += len(line)
        if stripped and set(stripped) == {"="} and len(stripped) >= 3:
            if body != DELIMITER:
                raise DataError(f"{source}:{lineno}: malformed delimiter line {body!r}")
            if current:
                segments.append(current)
                current = []
            elif not leading_ok:
                raise DataError(f"{source}:{lineno}: empty segment")
            leading_ok = False
            continue
        if not stripped:
            continue
        leading_ok = False
        if level == SENTENCE:
            current.append((start, start + len(body)))
        else:
            col = 0
            for tok in body.split():
                col = body.index(tok, col)
                current.append((start + col, start + col + len(tok)))
                col += len(tok)
    if current:
        segments.append(current)
    if not segments:
        raise DataError(f"{source}: no elements")
    spans = [sp for seg in segments for sp in seg]
    if level == SENTENCE:
        elements = tuple(tuple(word_tokens(text[a:b])) for a, b in spans)
    else:
        elements = tuple((text[a:b],) for a, b in spans)
    doc = TokenizedDocument(elements, level, tuple(range(len(spans))), text, tuple(spans), id)
    ref = Segmentation.from_lengths([len(s) for s in segments])
    starts = (0,) + ref.boundaries[:-1]
    sources = tuple((id, (a, b)) for a, b in zip(starts, ref.boundaries))
    return LabeledDocument(doc, ref, sources)


def read_reference_file(path, level: str = SENTENCE) -> LabeledDocument:
    path = Path(path)
    return parse_reference(path.read_text(encoding="utf-8"), level, path.stem, str(path))


# -------------------------------------------------------------------- corpora

def read_corpus_dir(path, level: str = SENTENCE) -> list[TokenizedDocument]:
    """Every ``*.txt`` file of ``path`` in name order, one document per file."""
    path = Path(path)
    if not path.is_dir():
        raise DataError(f"corpus directory not found: {path}")
    files = sorted(path.glob("*.txt"))
    if not files:
        raise DataError(f"no .txt documents in {path}")
    docs = []
    for f in files:
        raw = RawDocument(f.read_text(encoding="utf-8"), f.stem)
        try:
            docs.append(split_sentences(raw) if level == SENTENCE else tokenize_words(raw))
        except ValueError as exc:
            raise DataError(f"{f}: {exc}") from None
    return docs


def write_corpus_dir(docs, path) -> list[Path]:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    out = []
    for d in docs:
        f = path / f"{d.id}.txt"
        f.write_text(d.text + "\n", encoding="utf-8")
        out.append(f)
    return out


# ------------------------------------------------------------------ datasets

MANIFEST = "manifest.json"


def write_dataset(docs, out_dir, spec: DatasetSpec | None = None, corpus_ids=(), extra=None) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    level = docs[0].doc.level if docs else SENTENCE
    for ld in docs:
        name = f"{ld.doc.id}.ref"
        write_reference_file(ld, out / name)
        entries.append({
            "id": ld.doc.id,
            "file": name,
            "n_elements": ld.reference.n_elements,
            "boundaries": list(ld.reference.boundaries),
            "sources": [[s, list(span)] for s, span in ld.source_ids],
        })
    manifest = {
        "level": level,
        "generator": GENERATOR,
        "spec": asdict(spec) if spec else None,
        "corpus_ids": list(corpus_ids),
        "statistics": dataset_statistics(docs),
        "documents": entries,
    }
    if extra:
        manifest.update(extra)
    (out / MANIFEST).write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    return out / MANIFEST


def read_dataset(path):
    """Load every reference file named by a dataset manifest, in manifest order."""
    path = Path(path)
    mpath = path / MANIFEST if path.is_dir() else path
    if not mpath.exists():
        raise DataError(f"no {MANIFEST} in {path}")
    manifest = json.loads(mpath.read_text(encoding="utf-8"))
    level = manifest.get("level", SENTENCE)
    docs = []
    for entry in manifest["documents"]:
        ld = read_reference_file(mpath.parent / entry["file"], level)
        if entry.get("sources"):
            ld = LabeledDocument(ld.doc, ld.reference, tuple((s, tuple(sp)) for s, sp in entry["sources"]))
        docs.append(ld)
    return docs, manifest


def dataset_statistics(docs) -> dict:
    texts = []
    initial = set()
    for ld in docs:
        t = [_element_key(ld.doc, i) for i in range(len(ld.doc))]
        texts.extend(t)
        for a, _ in ld.reference.segments():
            initial.add(t[a])
    return {
        "documents": len(docs),
        "elements": len(texts),
        "unique_elements": len(set(texts)),
        "unique_segment_initial": len(initial),
    }


def _element_key(doc, i):
    return " ".join(doc.elements[i])


# -------------------------------------------------------------- leakage audit

@dataclass
class AuditReport:
    true_positives: int = 0
    false_positives: int = 0
    false_negatives: int = 0
    true_negatives: int = 0
    pk_values: list = field(default_factory=list)

    @property
    def positions(self):
        return self.true_positives + self.false_positives + self.false_negatives + self.true_negatives

    @property
    def accuracy(self) -> float:
        return (self.true_positives + self.true_negatives) / self.positions if self.positions else 1.0

    @property
    def precision(self) -> float:
        d = self.true_positives + self.false_positives
        return self.true_positives / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.true_positives + self.false_negatives
        return self.true_positives / d if d else 0.0

    @property
    def mean_pk(self) -> float:
        return float(np.mean(self.pk_values)) if self.pk_values else 0.0

    def merge(self, other: "AuditReport"):
        self.true_positives += other.true_positives
        self.false_positives += other.false_positives
        self.false_negatives += other.false_negatives
        self.true_negatives += other.true_negatives
        self.pk_values.extend(other.pk_values)

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy, "precision": self.precision, "recall": self.recall,
            "pk": self.mean_pk, "positions": self.positions,
            "true_positives": self.true_positives, "false_positives": self.false_positives,
            "false_negatives": self.false_negatives, "true_negatives": self.true_negatives,
        }


def leakage_audit(train, test) -> AuditReport:
    """Predict a boundary before every test element that opened a training segment.

    Each interior position ``1..N-1`` of a test document is one classification;
    accuracy counts both boundary and non-boundary positions.
    """
    memorized = set()
    for ld in train:
        for a, _ in ld.reference.segments():
            memorized.add(_element_key(ld.doc, a))
    report = AuditReport()
    for ld in test:
        n = len(ld.doc)
        truth = set(ld.reference.boundaries[:-1])
        guess = [i for i in range(1, n) if _element_key(ld.doc, i) in memorized]
        gset = set(guess)
        tp = len(truth & gset)
        report.true_positives += tp
        report.false_positives += len(gset) - tp
        report.false_negatives += len(truth) - tp
        report.true_negatives += (n - 1) - len(truth | gset)
        hyp = Segmentation(tuple(guess) + (n,), n)
        try:
            report.pk_values.append(pk(ld.reference, hyp))
        except ValueError:
            pass
    return report


def cross_validated_audit(docs, folds: int = 10, seed: int = 0) -> AuditReport:
    if folds < 2:
        raise DataError("cross-validation needs at least 2 folds")
    if len(docs) < folds:
        raise DataError(f"{len(docs)} documents cannot fill {folds} folds")
    order = _rng(seed).permutation(len(docs))
    parts = np.array_split(order, folds)
    total = AuditReport()
    for f in range(folds):
        test_idx = set(parts[f].tolist())
        train = [docs[i] for i in range(len(docs)) if i not in test_idx]
        test = [docs[i] for i in sorted(test_idx)]
        total.merge(leakage_audit(train, test))
    return total


# ---------------------------------------------------------- synthetic corpus

_ONSETS = ["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z",
           "br", "cl", "dr", "gr", "pl", "st", "tr", "sh", "ch", "th"]
_NUCLEI = ["a", "e", "i", "o", "u", "ai", "ea", "ou", "io"]


def _pseudo_words(rng, count, taken):
    out = []
    while len(out) < count:
        n_syl = int(rng.integers(2, 4))
        w = "".join(_ONSETS[int(rng.integers(len(_ONSETS)))] + _NUCLEI[int(rng.integers(len(_NUCLEI)))]
                    for _ in range(n_syl))
        w += _ONSETS[int(rng.integers(len(_ONSETS)))]
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


@dataclass(frozen=True)
class SyntheticCorpusConfig:
    """Knobs of the toy topic corpus used where no real corpus is available."""

    n_documents: int = 124
    sentences: tuple = (11, 30)
    sentence_length: tuple = (8, 30)
    dim: int = 50
    n_topics: int = 124
    topic_words: int = 60
    general_words: int = 600
    p_topic: float = 0.2
    p_stopword: float = 0.35
    topic_strength: float = 1.5
    noise: float = 1.0
    common_strength: float = 1.5
    seed: int = 0


def synthetic_corpus(cfg: SyntheticCorpusConfig = SyntheticCorpusConfig(), stopwords=()):
    """Topic-structured sentence corpus plus a word-vector table consistent with it.

    Each document draws content words from its own topic vocabulary and a
    shared general vocabulary; topic word vectors point along the topic
    direction, and every vector carries a shared offset plus Gaussian noise.
    """
    rng = _rng(cfg.seed)
    D = cfg.dim
    taken = set(stopwords)
    topic_dirs = rng.normal(size=(cfg.n_topics, D))
    topic_dirs /= np.linalg.norm(topic_dirs, axis=1, keepdims=True)
    common = rng.normal(size=D)
    common *= cfg.common_strength / np.linalg.norm(common)
    scale = cfg.noise / np.sqrt(D)

    vectors = {}
    topic_vocab = []
    for t in range(cfg.n_topics):
        ws = _pseudo_words(rng, cfg.topic_words, taken)
        topic_vocab.append(ws)
        for w in ws:
            vectors[w] = cfg.topic_strength * topic_dirs[t] + common + scale * rng.normal(size=D)
    general = _pseudo_words(rng, cfg.general_words, taken)
    for w in general:
        vectors[w] = common + scale * rng.normal(size=D)
    stop = sorted(w for w in stopwords if w.isalpha())
    for w in stop:
        vectors[w] = 1.5 * common + scale * rng.normal(size=D)

    # Zipf-like usage inside each vocabulary
    def zipf(n):
        p = 1.0 / np.arange(1, n + 1)
        return p / p.sum()

    p_topic_w = zipf(cfg.topic_words)
    p_general = zipf(len(general))
    docs = []
    lo, hi = cfg.sentences
    for d in range(cfg.n_documents):
        topic = d % cfg.n_topics
        texts = []
        for _ in range(int(rng.integers(lo, hi + 1))):
            length = int(rng.integers(cfg.sentence_length[0], cfg.sentence_length[1] + 1))
            toks = []
            for _ in range(length):
                u = rng.random()
                if u < cfg.p_topic:
                    toks.append(topic_vocab[topic][int(rng.choice(cfg.topic_words, p=p_topic_w))])
                elif u < cfg.p_topic + cfg.p_stopword and stop:
                    toks.append(stop[int(rng.integers(len(stop)))])
                else:
                    toks.append(general[int(rng.choice(len(general), p=p_general))])
            texts.append(" ".join(toks) + " .")
        docs.append(_build_doc(texts, SENTENCE, f"doc{d:03d}"))
    table = EmbeddingTable.from_dict(vectors)
    return docs, table


def save_synthetic(cfg: SyntheticCorpusConfig, out_dir, stopwords=()):
    """Write the synthetic corpus as ``corpus/*.txt`` and its vectors as ``embeddings.txt``."""
    docs, table = synthetic_corpus(cfg, stopwords)
    out = Path(out_dir)
    corpus_dir = out / "corpus"
    write_corpus_dir(docs, corpus_dir)
    emb = out / "embeddings.txt"
    save_embeddings(table, emb)
    return corpus_dir, emb
