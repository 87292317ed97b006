"""Auxiliary per-sentence tags: precomputed model labels and linguistic cues.

Discourse/argumentation/quote/event/NLI tags are consumed from files produced
by external taggers; only the cue extractor runs locally, driven by a
shipped rule table of marker lexicons and regexes.
"""

from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass, fields
from importlib import resources

from revlab.segment import Sentence

log = logging.getLogger(__name__)

DISCOURSE_ROLES = frozenset(
    {
        "Main Event",
        "Consequence",
        "Previous Event",
        "Current Context",
        "Evaluation",
        "Expectation",
        "Historical Events",
        "Anecdotal Event",
    }
)
ARGUMENTATION_ROLES = frozenset(
    {"Anecdote", "Assumption", "Common Ground", "Statistics", "Testimony", "Other"}
)
NLI_VALUES = frozenset({"Entail", "Contradict", "Neutral"})


class FeatureFileError(Exception):
    pass


@dataclass(frozen=True)
class FeatureTags:
    discourse: str | None = None
    argumentation: str | None = None
    quote: bool | None = None
    event_trigger: bool | None = None

    def items(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is not None:
                yield f.name, value


@dataclass(frozen=True)
class CueVector:
    recent_event: bool = False
    developing_event: bool = False
    statistic: bool = False
    info_request: bool = False
    historical_event: bool = False
    opinion_analysis: bool = False
    description: bool = False
    future_tense: bool = False
    numeral_count: int = 0

    BOOL_FIELDS = (
        "recent_event",
        "developing_event",
        "statistic",
        "info_request",
        "historical_event",
        "opinion_analysis",
        "description",
        "future_tense",
    )

    def as_floats(self) -> list[float]:
        vals = [float(getattr(self, name)) for name in self.BOOL_FIELDS]
        vals.append(float(self.numeral_count))
        return vals


def load_feature_file(path: str) -> dict[tuple[str, int, int], FeatureTags]:
    """Sentence-level tag file keyed by (article_id, version, sentence_idx)."""
    if not os.path.exists(path):
        log.warning("feature file %s missing; features are optional", path)
        return {}
    out: dict[tuple[str, int, int], FeatureTags] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            discourse = obj.get("discourse")
            if discourse is not None and discourse not in DISCOURSE_ROLES:
                raise FeatureFileError(
                    f"line {lineno}: discourse {discourse!r} not one of "
                    f"{sorted(DISCOURSE_ROLES)}"
                )
            argumentation = obj.get("argumentation")
            if argumentation is not None and argumentation not in ARGUMENTATION_ROLES:
                raise FeatureFileError(
                    f"line {lineno}: argumentation {argumentation!r} not one of "
                    f"{sorted(ARGUMENTATION_ROLES)}"
                )
            key = (str(obj["article_id"]), int(obj["version"]), int(obj["sentence_idx"]))
            out[key] = FeatureTags(
                discourse=discourse,
                argumentation=argumentation,
                quote=obj.get("quote"),
                event_trigger=obj.get("event_trigger"),
            )
    return out


def load_nli_file(path: str) -> dict[tuple[str, int, int, int, int], str]:
    """Link-level NLI file keyed by (article_id, old_v, new_v, old_idx, new_idx)."""
    if not os.path.exists(path):
        log.warning("NLI file %s missing; features are optional", path)
        return {}
    out: dict[tuple[str, int, int, int, int], str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            nli = obj["nli"]
            if nli not in NLI_VALUES:
                raise FeatureFileError(
                    f"line {lineno}: nli {nli!r} not one of {sorted(NLI_VALUES)}"
                )
            key = (
                str(obj["article_id"]),
                int(obj["old_version"]),
                int(obj["new_version"]),
                int(obj["old_idx"]),
                int(obj["new_idx"]),
            )
            out[key] = nli
    return out


_NUMERAL_RE = re.compile(r"\b\d[\d,]*(?:\.\d+)?\b")
_YEAR_RE = re.compile(r"\b(1[89]\d{2}|20\d{2})\b")
_ORDINAL_RE = re.compile(r"\b\d+(?:st|nd|rd|th)\b", re.IGNORECASE)
_MONTHS = (
    "january|february|march|april|may|june|july|august|september|october"
    "|november|december"
)
_MONTH_DAY_RE = re.compile(
    rf"\b(?:{_MONTHS})\.?\s+\d{{1,2}}\b|\b\d{{1,2}}\s+(?:{_MONTHS})\b", re.IGNORECASE
)
_FUTURE_RE = re.compile(r"\bwill\b|\bwon't\b|\bgoing to\b|\bset to\b", re.IGNORECASE)


class CueRules:
    """Compiled marker rule table; the data file is the tunable surface."""

    def __init__(self, table: dict[str, list[str]], reference_year: int | None = None):
        self.reference_year = reference_year
        self.patterns: dict[str, list[re.Pattern]] = {}
        for cue, pats in table.items():
            self.patterns[cue] = [
                re.compile(p, re.IGNORECASE) for p in pats if not p.startswith("__")
            ]

    @classmethod
    def default(cls) -> "CueRules":
        raw = resources.files("revlab.data").joinpath("cue_rules.json").read_text(
            "utf-8"
        )
        return cls(json.loads(raw))

    @classmethod
    def from_file(cls, path: str) -> "CueRules":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))

    def _fires(self, cue: str, text: str) -> bool:
        return any(p.search(text) for p in self.patterns.get(cue, ()))


_DEFAULT_RULES: CueRules | None = None


def default_rules() -> CueRules:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        _DEFAULT_RULES = CueRules.default()
    return _DEFAULT_RULES


def count_numerals(text: str) -> int:
    """Numeral tokens excluding 4-digit years, ordinals, and month-day dates."""
    masked = _MONTH_DAY_RE.sub(" ", text)
    masked = _ORDINAL_RE.sub(" ", masked)
    count = 0
    for m in _NUMERAL_RE.finditer(masked):
        if _YEAR_RE.fullmatch(m.group(0)):
            continue
        count += 1
    return count


def _historical_year(text: str, reference_year: int | None) -> bool:
    for m in _YEAR_RE.finditer(text):
        year = int(m.group(0))
        if reference_year is None or year <= reference_year - 2:
            return True
    return False


def extract_cues(s: Sentence | str, rules: CueRules | None = None) -> CueVector:
    """Deterministic rule-table cue extraction for one sentence."""
    text = s.text if isinstance(s, Sentence) else s
    rules = rules or default_rules()
    numeral_count = count_numerals(text)
    recent = rules._fires("recent_event", text)
    developing = rules._fires("developing_event", text)
    return CueVector(
        recent_event=recent,
        developing_event=developing,
        statistic=numeral_count > 0,
        info_request=rules._fires("info_request", text),
        historical_event=_historical_year(text, rules.reference_year),
        opinion_analysis=rules._fires("opinion_analysis", text),
        description=not (recent or developing),
        future_tense=bool(_FUTURE_RE.search(text)),
        numeral_count=numeral_count,
    )
