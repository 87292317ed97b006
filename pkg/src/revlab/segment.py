"""Rule-based sentence boundary detection tuned for English news copy.

Boundaries are placed only at terminal punctuation (with trailing close
quotes kept on the preceding sentence) and suppressed after known
abbreviations, single initials, and inside dateline prefixes such as
"WASHINGTON (AP) --". Sentence stubs shorter than a configurable minimum are
merged into their neighbor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources

TERMINALS = ".!?"
CLOSE_QUOTES = "\"'’”)»"
_WS_RE = re.compile(r"\s+")

# "CITY (AP) --" style prefix: an all-caps location (commas/periods allowed),
# a parenthesized agency, then a dash run.
_DATELINE_RE = re.compile(
    r"^[A-Z][A-Z0-9 .,'’-]{1,48}\([A-Za-z .]{2,24}\)\s*(?:--|—|–)\s*"
)

_SENTENCE_OPENER_RE = re.compile(r"[\"'‘“(«]*[A-Z0-9]")


def normalize_ws(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def default_abbreviations() -> frozenset[str]:
    raw = (
        resources.files("revlab.data").joinpath("abbreviations.txt").read_text("utf-8")
    )
    return frozenset(_parse_abbrev_lines(raw.splitlines()))


def load_abbreviations(path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(_parse_abbrev_lines(fh))


def _parse_abbrev_lines(lines) -> list[str]:
    entries = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if not line.endswith("."):
            raise ValueError(f"abbreviation {line!r} must end with '.'")
        entries.append(line)
    return entries


@dataclass(frozen=True)
class Sentence:
    index: int
    text: str
    span: tuple[int, int]


@dataclass
class SegmenterConfig:
    abbreviation_lexicon: frozenset[str] = field(default_factory=default_abbreviations)
    dateline_pattern: bool = True
    min_sentence_chars: int = 2

    def __post_init__(self) -> None:
        if self.min_sentence_chars < 1:
            raise ValueError("min_sentence_chars must be >= 1")
        for entry in self.abbreviation_lexicon:
            if not entry.endswith("."):
                raise ValueError(f"abbreviation {entry!r} must end with '.'")


def _token_ending_at(text: str, end: int) -> str:
    """The whitespace-delimited token whose last character is text[end]."""
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : end + 1]


_INITIAL_RE = re.compile(r"(?:^|[\s\"'“(])([A-Z]\.)$")


def _is_boundary(text: str, pos: int, cfg: SegmenterConfig, dateline_end: int) -> bool:
    """Whether the terminal character at pos ends a sentence."""
    ch = text[pos]
    if ch not in TERMINALS:
        return False
    if pos < dateline_end:
        return False
    # Part of a multi-char run like "..." or "?!": only the last one counts.
    if pos + 1 < len(text) and text[pos + 1] in TERMINALS:
        return False
    if ch == ".":
        token = _token_ending_at(text, pos)
        bare = token.lstrip("\"'‘“([")
        if bare in cfg.abbreviation_lexicon:
            return False
        if _INITIAL_RE.search(" " + token):
            return False
        # Decimal number or enumerated item like "3.5" / "No.1".
        if pos + 1 < len(text) and text[pos + 1].isdigit():
            return False
    # Skip trailing close quotes when looking at what follows.
    nxt = pos + 1
    while nxt < len(text) and text[nxt] in CLOSE_QUOTES:
        nxt += 1
    if nxt >= len(text):
        return True
    if not text[nxt].isspace():
        return False
    follow = text[nxt:].lstrip()
    if not follow:
        return True
    # The next sentence must open plausibly (capital, digit, or open quote).
    return bool(_SENTENCE_OPENER_RE.match(follow))


def segment(text: str, cfg: SegmenterConfig | None = None) -> list[Sentence]:
    """Split text into sentences with character spans into the raw input.

    Spans cover all non-whitespace characters, are non-overlapping, and
    strictly increase; sentence text is the whitespace-normalized span
    substring. Text without terminal punctuation comes back as one sentence.
    """
    if not text or not text.strip():
        raise ValueError("cannot segment empty text")
    cfg = cfg or SegmenterConfig()

    dateline_end = 0
    if cfg.dateline_pattern:
        m = _DATELINE_RE.match(text)
        if m:
            dateline_end = m.end()

    breaks: list[int] = []  # index one past the last char of each sentence
    for pos, ch in enumerate(text):
        if ch in TERMINALS and _is_boundary(text, pos, cfg, dateline_end):
            end = pos + 1
            while end < len(text) and text[end] in CLOSE_QUOTES:
                end += 1
            breaks.append(end)
    if not breaks or breaks[-1] < len(text.rstrip()):
        breaks.append(len(text))

    spans: list[tuple[int, int]] = []
    cursor = 0
    for brk in breaks:
        start = cursor
        while start < brk and text[start].isspace():
            start += 1
        end = brk
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            spans.append((start, end))
        cursor = brk

    # Merge stubs shorter than the minimum into the previous sentence
    # (or the next one when the stub comes first).
    merged: list[tuple[int, int]] = []
    for span in spans:
        if merged and _norm_len(text, merged[-1]) < cfg.min_sentence_chars:
            merged[-1] = (merged[-1][0], span[1])
        else:
            merged.append(span)
    while len(merged) > 1 and _norm_len(text, merged[-1]) < cfg.min_sentence_chars:
        tail = merged.pop()
        merged[-1] = (merged[-1][0], tail[1])

    return [
        Sentence(index=k, text=normalize_ws(text[s:e]), span=(s, e))
        for k, (s, e) in enumerate(merged)
    ]


def _norm_len(text: str, span: tuple[int, int]) -> int:
    return len(normalize_ws(text[span[0] : span[1]]))
