"""Word vectors, idf statistics and per-element feature matrices."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

TF = "tf"
TFIDF = "tfidf"


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingTable:
    """Vocabulary plus a dense ``(V, D)`` matrix of vectors."""

    words: tuple[str, ...]
    matrix: np.ndarray
    index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[1] < 1:
            raise EmbeddingError("vectors must be a non-empty 2-D array")
        if self.matrix.shape[0] != len(self.words):
            raise EmbeddingError("one vector per word required")
        if self.index is None:
            object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})
        self.matrix.setflags(write=False)

    @classmethod
    def from_dict(cls, vectors: dict) -> "EmbeddingTable":
        words = tuple(vectors)
        if not words:
            raise EmbeddingError("no vectors")
        return cls(words, np.array([np.asarray(vectors[w], dtype=float) for w in words]))

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def vector(self, word) -> np.ndarray:
        return self.matrix[self.index[word]]

    def restrict(self, vocabulary) -> "EmbeddingTable":
        keep = [w for w in self.words if w in vocabulary]
        if not keep:
            raise EmbeddingError("no vectors")
        rows = [self.index[w] for w in keep]
        return EmbeddingTable(tuple(keep), self.matrix[rows].copy())


def load_embeddings(path, vocabulary=None) -> EmbeddingTable:
    """Read a GloVe-style text table: ``word c1 c2 ... cD`` per line.

    With ``vocabulary`` given, only those words are kept (the file is still
    checked for consistent dimensions throughout).
    """
    words = []
    rows = []
    seen = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.rstrip("\n").split(" ")
            if not parts or not parts[0]:
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim < 1:
                    raise EmbeddingError(f"{path}:{lineno}: no vector components")
            elif len(values) != dim:
                raise EmbeddingError(
                    f"{path}:{lineno}: expected {dim} components, found {len(values)}"
                )
            if vocabulary is not None and word not in vocabulary:
                continue
            try:
                vec = [float(v) for v in values]
            except ValueError as exc:
                raise EmbeddingError(f"{path}:{lineno}: {exc}") from None
            if word in seen:
                log.warning("%s:%d: duplicate word %r, keeping the last one", path, lineno, word)
                rows[seen[word]] = vec
            else:
                seen[word] = len(words)
                words.append(word)
                rows.append(vec)
    if not words:
        raise EmbeddingError("no vectors")
    return EmbeddingTable(tuple(words), np.array(rows, dtype=float))


def save_embeddings(table: EmbeddingTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        for w, row in zip(table.words, table.matrix):
            fh.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")


@dataclass(frozen=True)
class IdfTable:
    num_documents: int
    df: dict

    def __post_init__(self):
        if self.num_documents < 1:
            raise EmbeddingError("num_documents must be positive")
        for w, d in self.df.items():
            if not 1 <= d <= self.num_documents:
                raise EmbeddingError(f"df of {w!r} outside [1, {self.num_documents}]")

    def idf(self, word) -> float:
        """Natural-log idf; words never seen are treated as occurring once."""
        return math.log(self.num_documents / self.df.get(word, 1))


def compute_idf(corpus) -> IdfTable:
    """Document frequencies over a list of tokenized documents."""
    corpus = list(corpus)
    if not corpus:
        raise EmbeddingError("empty corpus")
    df = Counter()
    for doc in corpus:
        df.update({t for element in doc.elements for t in element})
    return IdfTable(len(corpus), dict(df))


def write_idf(table: IdfTable, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"#documents {table.num_documents}\n")
        for w in sorted(table.df):
            fh.write(f"{w} {table.df[w]}\n")


def read_idf(path) -> IdfTable:
    num = None
    df = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                head = line[1:].split()
                if len(head) == 2 and head[0] == "documents":
                    num = int(head[1])
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EmbeddingError(f"{path}:{lineno}: expected 'word df'")
            df[parts[0]] = int(parts[1])
    if num is None:
        raise EmbeddingError(f"{path}: missing '#documents N' header")
    return IdfTable(num, df)


@dataclass(frozen=True)
class RepresentationConfig:
    weighting: str = TF
    normalize_word_vectors: bool = False
    normalize_element_vectors: bool = False
    oov_policy: str = "skip"

    def __post_init__(self):
        if self.weighting not in (TF, TFIDF):
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.oov_policy not in ("skip", "error"):
            raise ValueError(f"unknown oov_policy {self.oov_policy!r}")


def _unit(v):
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def element_vector(tokens, table: EmbeddingTable, idf: IdfTable | None = None,
                   cfg: RepresentationConfig = RepresentationConfig()) -> np.ndarray:
    """Weighted sum of the word vectors of one element."""
    if cfg.weighting == TFIDF and idf is None:
        raise EmbeddingError("tfidf weighting needs an idf table")
    out = np.zeros(table.dim)
    found = False
    for word, count in Counter(tokens).items():
        if word not in table:
            if cfg.oov_policy == "error":
                raise EmbeddingError(f"out-of-vocabulary token {word!r}")
            continue
        found = True
        v = table.vector(word)
        if cfg.normalize_word_vectors:
            v = _unit(v)
        weight = count * (idf.idf(word) if cfg.weighting == TFIDF else 1.0)
        out += weight * v
    if not found:
        raise EmbeddingError("empty element representation")
    if cfg.normalize_element_vectors:
        n = np.linalg.norm(out)
        if n > 0:
            out /= n
        else:
            log.warning("zero element vector left unnormalized")
    return out


def build_element_matrix(doc, table: EmbeddingTable, idf: IdfTable | None = None,
                         cfg: RepresentationConfig = RepresentationConfig()) -> np.ndarray:
    rows = []
    for i, tokens in enumerate(doc.elements):
        try:
            rows.append(element_vector(tokens, table, idf, cfg))
        except EmbeddingError as exc:
            raise EmbeddingError(f"element {i}: {exc}") from None
    return np.array(rows, dtype=float).reshape(len(rows), table.dim)


def oov_count(doc, table: EmbeddingTable) -> int:
    return sum(1 for tokens in doc.elements for t in tokens if t not in table)


def bow_matrix(doc, vocabulary=None) -> np.ndarray:
    """Term-frequency rows over the document's own vocabulary (or a given one)."""
    if vocabulary is None:
        vocabulary = sorted({t for el in doc.elements for t in el})
    col = {w: j for j, w in enumerate(vocabulary)}
    out = np.zeros((len(doc.elements), len(col)))
    for i, tokens in enumerate(doc.elements):
        for t in tokens:
            j = col.get(t)
            if j is not None:
                out[i, j] += 1.0
    return out


@dataclass(frozen=True)
class TopicClustering:
    centroids: np.ndarray
    assignment: dict
    iterations: int = 0
    objective_trace: tuple = ()

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def spherical_kmeans(table: EmbeddingTable, k: int, seed: int = 0, max_iters: int = 100) -> TopicClustering:
    """Cluster unit-normalized word vectors by cosine similarity.

    Centroids start at ``k`` distinct words drawn with ``numpy.random.PCG64``;
    assignment ties go to the lowest cluster id. An emptied cluster keeps its
    previous centroid.
    """
    n = len(table)
    if k < 1 or k > n:
        raise EmbeddingError(f"k={k} must lie in [1, {n}]")
    X = table.matrix / np.maximum(np.linalg.norm(table.matrix, axis=1, keepdims=True), 1e-300)
    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = X[rng.choice(n, size=k, replace=False)].copy()
    labels = None
    trace = []
    it = 0
    for it in range(1, max_iters + 1):
        sims = X @ centroids.T
        new = np.argmax(sims, axis=1)
        if labels is not None and np.array_equal(new, labels):
            it -= 1
            break
        labels = new
        for c in range(k):
            members = X[labels == c]
            if len(members):
                centroids[c] = _unit(members.sum(axis=0))
        trace.append(float(np.sum(np.einsum("ij,ij->i", X, centroids[labels]))))
    assignment = {w: int(c) for w, c in zip(table.words, labels)}
    return TopicClustering(centroids, assignment, it, tuple(trace))


def topic_histogram(tokens, clustering: TopicClustering) -> np.ndarray:
    out = np.zeros(clustering.k)
    for t in tokens:
        c = clustering.assignment.get(t)
        if c is not None:
            out[c] += 1.0
    return out


def topic_matrix(doc, clustering: TopicClustering) -> np.ndarray:
    return np.array([topic_histogram(el, clustering) for el in doc.elements]).reshape(len(doc.elements), clustering.k)
