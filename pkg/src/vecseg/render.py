"""Annotated views of a segmentation: alternating terminal backgrounds or HTML classes."""

from __future__ import annotations

import html

# dim blue / dim yellow backgrounds, readable on light and dark terminals
ANSI_STYLES = ("\x1b[48;5;24m", "\x1b[48;5;58m")
ANSI_RESET = "\x1b[0m"


def segment_char_ranges(doc, boundaries):
    """``(start, end)`` character range of every segment over original elements."""
    spans = doc.spans
    if not spans:
        raise ValueError("document carries no character spans")
    out = []
    prev = 0
    for b in boundaries:
        out.append((spans[prev][0], spans[b - 1][1]))
        prev = b
    return out


def _pieces(doc, boundaries):
    """Yield ``(segment index or None, text)`` covering the whole source text."""
    pos = 0
    for idx, (a, b) in enumerate(segment_char_ranges(doc, boundaries)):
        if a > pos:
            yield None, doc.text[pos:a]
        yield idx, doc.text[a:b]
        pos = b
    if pos < len(doc.text):
        yield None, doc.text[pos:]


def render_ansi(doc, boundaries) -> str:
    parts = []
    for idx, text in _pieces(doc, boundaries):
        if idx is None:
            parts.append(text)
            continue
        style = ANSI_STYLES[idx % 2]
        # restyle after every newline so backgrounds survive line-oriented pagers
        lines = text.split("\n")
        parts.append("\n".join(style + line + ANSI_RESET for line in lines))
    return "".join(parts)


def render_html(doc, boundaries) -> str:
    parts = ['<div class="segmentation">']
    for idx, text in _pieces(doc, boundaries):
        body = html.escape(text)
        if idx is None:
            parts.append(body)
        else:
            parity = "seg-even" if idx % 2 == 0 else "seg-odd"
            parts.append(f'<span class="seg {parity}" data-segment="{idx}">{body}</span>')
    parts.append("</div>")
    return "".join(parts)


HTML_STYLE = """<style>
.segmentation { white-space: pre-wrap; font-family: serif; }
.seg-even { background: #dbe8f7; }
.seg-odd { background: #f7ecd0; }
</style>"""


def html_page(fragment: str, title: str = "segmentation") -> str:
    return (f"<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>{html.escape(title)}</title>\n"
            f"{HTML_STYLE}</head>\n<body>\n{fragment}\n</body></html>\n")
