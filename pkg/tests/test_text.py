import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vecseg.text import (
    SENTENCE, WORD, PreprocessOptions, RawDocument, TextError, TokenizedDocument, default_stopwords,
    from_lines, preprocess, read_stopwords, split_sentences, tokenize_chars, tokenize_words, word_tokens,
)


def sent_doc(elements):
    return TokenizedDocument(tuple(tuple(e) for e in elements), SENTENCE, tuple(range(len(elements))))


def test_split_sentences_two_terminators():
    doc = split_sentences(RawDocument("A b. C d."))
    assert [list(e) for e in doc.elements] == [["a", "b", "."], ["c", "d", "."]]
    assert doc.level == SENTENCE


@pytest.mark.parametrize("text", ["", "   \n\t"])
def test_empty_documents_rejected(text):
    with pytest.raises(TextError, match="empty document"):
        split_sentences(RawDocument(text))
    with pytest.raises(TextError):
        tokenize_words(RawDocument(text))


def test_spans_cover_all_non_whitespace():
    text = "First one!  Second?\nThird without end"
    doc = split_sentences(RawDocument(text))
    covered = "".join(text[a:b] for a, b in doc.spans)
    assert covered.replace(" ", "") == "".join(text.split())


def test_choi_lines_one_element_per_line():
    lines = ["The jury said .", "It was fine .", "''", "Another line here ."]
    doc = from_lines("\n".join(lines) + "\n")
    assert len(doc) == len(lines)
    assert doc.element_text(2) == "''"


@pytest.mark.parametrize("text,tokens", [
    ("Eq.(3)", ["eq", ".", "(", "3", ")"]),
    ("abc", ["abc"]),
    ("a-b", ["a", "-", "b"]),
    ("Don't STOP", ["don", "'", "t", "stop"]),
])
def test_word_tokenization(text, tokens):
    doc = tokenize_words(RawDocument(text))
    assert [e[0] for e in doc.elements] == tokens
    assert doc.level == WORD
    assert all(len(e) == 1 for e in doc.elements)


@given(st.text(min_size=1, max_size=60))
def test_tokens_keep_alphanumerics_in_order(text):
    lowered = text.lower()
    if not lowered.strip():
        return
    toks = word_tokens(lowered)
    assert "".join(c for c in " ".join(toks) if c.isalnum()) == "".join(c for c in lowered if c.isalnum())


def test_word_spans_point_at_tokens():
    raw = RawDocument("Hello, World-wide 42.")
    doc = tokenize_words(raw)
    for tok, (a, b) in zip(doc.elements, doc.spans):
        assert raw.text[a:b].lower() == tok[0]


def test_char_level_skips_whitespace():
    doc = tokenize_chars(RawDocument("ab c"))
    assert [e[0] for e in doc.elements] == ["a", "b", "c"]
    assert doc.spans[2] == (3, 4)


def test_stopword_removal():
    doc = sent_doc([["the", "cat"], ["sat"]])
    out = preprocess(doc, PreprocessOptions(remove_stopwords=True, stopword_list=frozenset({"the"})))
    assert out.elements == (("cat",), ("sat",))


def test_min_tokens_drops_short_element_and_maps_indices():
    doc = sent_doc([["a"] * 6, ["b"] * 4, ["c"] * 5])
    out = preprocess(doc, PreprocessOptions(min_element_tokens=5))
    assert len(out) == 2
    assert out.kept_index_map == (0, 2)
    # boundary before kept element 1 is original element 2; dropped element joins the left
    assert out.to_original([1, 2]) == [2, 3]


def test_min_tokens_counts_after_stopword_removal():
    doc = sent_doc([["the", "a", "cat", "dog", "sat"], list("abcdefg")])
    out = preprocess(doc, PreprocessOptions(True, False, 4, frozenset({"the", "a"})))
    assert out.kept_index_map == (1,)


def test_all_off_is_identity():
    doc = sent_doc([["x", "y"], ["z"]])
    assert preprocess(doc, PreprocessOptions()) == doc


def test_everything_dropped_is_an_error():
    doc = sent_doc([["the"], ["the"]])
    with pytest.raises(TextError, match="no elements survive preprocessing"):
        preprocess(doc, PreprocessOptions(remove_stopwords=True, stopword_list=frozenset({"the"})))


def test_invalid_documents():
    with pytest.raises(ValueError):
        TokenizedDocument((("a",), ("b",)), SENTENCE, (1, 0))
    with pytest.raises(ValueError):
        TokenizedDocument((("a", "b"),), WORD, (0,))
    with pytest.raises(ValueError):
        TokenizedDocument((("",),), SENTENCE, (0,))
    with pytest.raises(ValueError):
        PreprocessOptions(min_element_tokens=-1)


def test_stopword_file(tmp_path):
    p = tmp_path / "stop.txt"
    p.write_text("# comment\nThe\n\n,\nof\n", encoding="utf-8")
    assert read_stopwords(p) == frozenset({"the", ",", "of"})


def test_default_stopwords_include_punctuation():
    stop = default_stopwords()
    assert {"the", "of", "and", ".", ","} <= stop
    assert "cat" not in stop


def test_stopwords_env_override(tmp_path, monkeypatch):
    p = tmp_path / "s.txt"
    p.write_text("zebra\n", encoding="utf-8")
    monkeypatch.setenv("VECSEG_STOPWORDS", str(p))
    assert default_stopwords() == frozenset({"zebra"})


words = st.sampled_from(["the", "cat", "runs", "running", "a", ".", "dog", "of", "caresses"])
elements = st.lists(st.lists(words, min_size=1, max_size=8), min_size=1, max_size=8)


@settings(max_examples=200)
@given(elements, st.booleans(), st.integers(0, 4))
def test_preprocess_idempotent_without_stemming(els, remove, cut):
    opts = PreprocessOptions(remove, False, cut, frozenset({"the", "a", ".", "of"}))
    try:
        once = preprocess(sent_doc(els), opts)
    except TextError:
        return
    assert preprocess(once, opts) == once


@settings(max_examples=200)
@given(elements, st.booleans(), st.booleans(), st.integers(0, 4))
def test_kept_elements_are_a_subsequence(els, remove, stem, cut):
    doc = sent_doc(els)
    opts = PreprocessOptions(remove, stem, cut, frozenset({"the", "a"}))
    try:
        out = preprocess(doc, opts)
    except TextError:
        return
    assert list(out.kept_index_map) == sorted(set(out.kept_index_map))
    assert all(0 <= i < len(doc) for i in out.kept_index_map)
    if not stem:
        for kept, orig in zip(out.elements, out.kept_index_map):
            src = [t for t in doc.elements[orig] if not (remove and t in {"the", "a"})]
            assert list(kept) == src
