"""Turning raw text into ordered elements (sentences or words)."""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .porter import porter_stem

SENTENCE = "sentence"
WORD = "word"
CHAR = "char"
LEVELS = (SENTENCE, WORD, CHAR)

STOPWORDS_ENV = "VECSEG_STOPWORDS"


class TextError(ValueError):
    """Raised for empty or otherwise unusable input text."""


@dataclass(frozen=True)
class RawDocument:
    text: str
    id: str = ""


@dataclass(frozen=True)
class TokenizedDocument:
    """Ordered elements plus the provenance needed to report boundaries.

    ``spans`` holds one ``(start, end)`` character range into ``text`` for every
    element of the *original* document; ``kept_index_map[i]`` is the original
    index of kept element ``i``.
    """

    elements: tuple[tuple[str, ...], ...]
    level: str
    kept_index_map: tuple[int, ...]
    text: str = ""
    spans: tuple[tuple[int, int], ...] = ()
    id: str = ""
    n_source: int = 0  # original element count when there are no spans

    def __post_init__(self):
        if len(self.kept_index_map) != len(self.elements):
            raise ValueError("kept_index_map must have one entry per element")
        if any(b <= a for a, b in zip(self.kept_index_map, self.kept_index_map[1:])):
            raise ValueError("kept_index_map must be strictly increasing")
        if self.level not in LEVELS:
            raise ValueError(f"unknown level {self.level!r}")
        for tokens in self.elements:
            if any(not t for t in tokens):
                raise ValueError("tokens must be non-empty strings")
            if self.level != SENTENCE and len(tokens) != 1:
                raise ValueError(f"{self.level}-level elements hold exactly one token")

    def __len__(self):
        return len(self.elements)

    @property
    def n_original(self) -> int:
        if self.spans:
            return len(self.spans)
        last = self.kept_index_map[-1] + 1 if self.kept_index_map else 0
        return max(self.n_source, last, len(self.elements))

    def element_text(self, i: int) -> str:
        """Source text of kept element ``i`` (falls back to its tokens)."""
        if self.spans:
            a, b = self.spans[self.kept_index_map[i]]
            return self.text[a:b]
        return " ".join(self.elements[i])

    def to_original(self, boundaries) -> list[int]:
        """Map boundaries over kept elements to boundaries over original elements.

        A boundary ``b`` splits before kept element ``b``; dropped elements that
        sit between two kept ones stay with the segment on their left.
        """
        out = []
        for b in boundaries:
            out.append(self.n_original if b >= len(self.elements) else self.kept_index_map[b])
        return out


@dataclass(frozen=True)
class PreprocessOptions:
    remove_stopwords: bool = False
    stem: bool = False
    min_element_tokens: int = 0
    stopword_list: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.min_element_tokens < 0:
            raise ValueError("min_element_tokens must be >= 0")


def _word_spans(text: str, offset: int = 0):
    """Yield ``(token, start, end)``: alphanumeric runs and single other characters."""
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isalnum():
            j = i + 1
            while j < n and text[j].isalnum():
                j += 1
            yield text[i:j].lower(), offset + i, offset + j
            i = j
        else:
            yield ch.lower(), offset + i, offset + i + 1
            i += 1


def word_tokens(text: str) -> list[str]:
    """Lowercase, pad every non-alphanumeric character with spaces, split."""
    return [t for t, _, _ in _word_spans(text)]


def tokenize_words(doc: RawDocument) -> TokenizedDocument:
    spans = list(_word_spans(doc.text))
    if not spans:
        raise TextError("empty document")
    return TokenizedDocument(
        elements=tuple((t,) for t, _, _ in spans),
        level=WORD,
        kept_index_map=tuple(range(len(spans))),
        text=doc.text,
        spans=tuple((a, b) for _, a, b in spans),
        id=doc.id,
    )


def tokenize_chars(doc: RawDocument) -> TokenizedDocument:
    """One element per non-whitespace character (handy for toy examples)."""
    pos = [i for i, ch in enumerate(doc.text) if not ch.isspace()]
    if not pos:
        raise TextError("empty document")
    return TokenizedDocument(
        elements=tuple((doc.text[i].lower(),) for i in pos),
        level=CHAR,
        kept_index_map=tuple(range(len(pos))),
        text=doc.text,
        spans=tuple((i, i + 1) for i in pos),
        id=doc.id,
    )


_SENTENCE_END = re.compile(r"[.!?](?=\s)")


def split_sentences(doc: RawDocument) -> TokenizedDocument:
    """Split free text after ``.``, ``!`` or ``?`` followed by whitespace."""
    text = doc.text
    if not text.strip():
        raise TextError("empty document")
    cuts = [m.end() for m in _SENTENCE_END.finditer(text)]
    spans = []
    start = 0
    for end in cuts + [len(text)]:
        chunk = text[start:end]
        stripped = chunk.strip()
        if stripped:
            a = start + (len(chunk) - len(chunk.lstrip()))
            spans.append((a, a + len(stripped)))
        start = end
    return _from_spans(text, spans, doc.id)


def from_lines(text: str, id: str = "") -> TokenizedDocument:
    """Sentence-level document with one element per non-blank line."""
    spans = []
    pos = 0
    for line in text.splitlines(keepends=True):
        body = line.rstrip("\r\n")
        if body.strip():
            spans.append((pos, pos + len(body)))
        pos += len(line)
    if not spans:
        raise TextError("empty document")
    return _from_spans(text, spans, id)


def _from_spans(text, spans, id):
    elements = []
    kept_spans = []
    for a, b in spans:
        tokens = tuple(word_tokens(text[a:b]))
        if tokens:
            elements.append(tokens)
            kept_spans.append((a, b))
    if not elements:
        raise TextError("empty document")
    return TokenizedDocument(
        elements=tuple(elements),
        level=SENTENCE,
        kept_index_map=tuple(range(len(elements))),
        text=text,
        spans=tuple(kept_spans),
        id=id,
    )


def preprocess(doc: TokenizedDocument, opts: PreprocessOptions) -> TokenizedDocument:
    """Drop stopwords, stem, then drop elements shorter than the cut."""
    stop = opts.stopword_list if opts.remove_stopwords else frozenset()
    elements = []
    kept = []
    for tokens, orig in zip(doc.elements, doc.kept_index_map):
        toks = [t for t in tokens if t not in stop]
        if opts.stem:
            toks = [porter_stem(t) for t in toks]
        if not toks or len(toks) < opts.min_element_tokens:
            continue
        elements.append(tuple(toks))
        kept.append(orig)
    if not elements:
        raise TextError("no elements survive preprocessing")
    elements, kept = tuple(elements), tuple(kept)
    if elements == doc.elements and kept == doc.kept_index_map:
        return doc
    return replace(doc, elements=elements, kept_index_map=kept, n_source=doc.n_original)


def read_stopwords(path) -> frozenset[str]:
    """One token per line; ``#`` starts a comment line."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


def default_stopwords_path() -> Path:
    env = os.environ.get(STOPWORDS_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("vecseg") / "data" / "stopwords.txt"))


def default_stopwords() -> frozenset[str]:
    return read_stopwords(default_stopwords_path())
