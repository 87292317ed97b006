"""Intention labeling of edit records: LLM-backed or deterministic heuristics.

The LLM path instantiates a fixed prompt template over the sentence pair and
both documents and parses the decoded label list; the heuristic path is a
pure rule cascade that keeps the whole pipeline runnable offline.
"""

from __future__ import annotations

import json
import logging
import os
import re
from collections import Counter
from dataclasses import dataclass, field

from revlab.align import ActionKind, EditAction
from revlab.features import FeatureTags, extract_cues
from revlab.segment import normalize_ws
from revlab.taxonomy import (
    FineIntention,
    LabelSet,
    parse_labels,
    serialize_labels,
    validate,
)

log = logging.getLogger(__name__)

NONE_TOKEN = "[NONE]"
DOC_CHAR_BUDGET = 12_000

_ACTION_BY_VALUE = {k.value: k for k in ActionKind}


@dataclass
class EditRecord:
    article_id: str
    old_version: int
    new_version: int
    action: EditAction
    old_idx: int | None = None
    new_idx: int | None = None
    score: float | None = None
    labels: LabelSet = field(default_factory=LabelSet)
    label_source: str | None = None
    features: tuple[FeatureTags | None, FeatureTags | None] = (None, None)
    nli: str | None = None
    # Optional article topic column, consumed by topic-axis crosstabs.
    topic: str | None = None
    raw_decode: str | None = None
    parse_warnings: list[str] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.action.kind is ActionKind.ADDITION and self.old_idx is not None:
            raise ValueError("addition records carry no old_idx")
        if self.action.kind is ActionKind.DELETION and self.new_idx is not None:
            raise ValueError("deletion records carry no new_idx")

    @property
    def pair_key(self) -> str:
        return f"{self.article_id}:{self.old_version}:{self.new_version}"

    def to_json(self) -> str:
        obj = {
            "article_id": self.article_id,
            "old_version": self.old_version,
            "new_version": self.new_version,
            "old_idx": self.old_idx,
            "new_idx": self.new_idx,
            "action": self.action.kind.value,
            "moved": self.action.moved,
            "score": self.score,
            "labels": self.labels.display_list(),
            "label_source": self.label_source or "",
        }
        if self.labels.rejected_index is not None:
            obj["rejected_index"] = self.labels.rejected_index
        if self.topic is not None:
            obj["topic"] = self.topic
        if self.raw_decode is not None:
            obj["raw_decode"] = self.raw_decode
        return json.dumps(obj)

    @classmethod
    def from_json(cls, line: str) -> "EditRecord":
        obj = json.loads(line)
        kind = _ACTION_BY_VALUE[obj["action"]]
        moved = bool(obj.get("moved", False))
        old_idx = obj.get("old_idx")
        new_idx = obj.get("new_idx")
        delta = None
        if moved and old_idx is not None and new_idx is not None:
            delta = new_idx - old_idx
        labels = LabelSet([])
        warnings: list[str] = []
        for token in obj.get("labels", []):
            parsed, warn = parse_labels(token)
            labels.labels.extend(l for l in parsed.labels if l not in labels.labels)
            warnings.extend(warn)
        labels.rejected_index = obj.get("rejected_index")
        rec = cls(
            article_id=str(obj["article_id"]),
            old_version=int(obj["old_version"]),
            new_version=int(obj["new_version"]),
            action=EditAction(kind=kind, moved=moved, index_delta=delta),
            old_idx=old_idx,
            new_idx=new_idx,
            score=obj.get("score"),
            labels=labels,
            label_source=obj.get("label_source") or None,
            topic=obj.get("topic"),
            raw_decode=obj.get("raw_decode"),
            parse_warnings=warnings,
        )
        return rec


def _truncate(text: str, budget: int) -> str:
    return text if len(text) <= budget else text[:budget]


def _render_feature_parts(rec: EditRecord) -> list[str]:
    def render(value) -> str:
        if isinstance(value, bool):
            return "true" if value else "false"
        return str(value)

    parts = []
    old_tags, new_tags = rec.features
    if old_tags is not None:
        parts.extend(f"{k}_v1={render(v)}" for k, v in old_tags.items())
    if new_tags is not None:
        parts.extend(f"{k}_v2={render(v)}" for k, v in new_tags.items())
    if rec.nli is not None:
        parts.append(f"nli={rec.nli}")
    return parts


def build_label_prompt(
    rec: EditRecord,
    old_doc,
    new_doc,
    include_features: bool = False,
    doc_char_budget: int = DOC_CHAR_BUDGET,
) -> str:
    """Instantiate the labeling template; byte-stable for snapshotting."""
    old_sents = old_doc.ensure_sentences()
    new_sents = new_doc.ensure_sentences()
    if rec.old_idx is not None and not 0 <= rec.old_idx < len(old_sents):
        raise IndexError(f"old_idx {rec.old_idx} out of range")
    if rec.new_idx is not None and not 0 <= rec.new_idx < len(new_sents):
        raise IndexError(f"new_idx {rec.new_idx} out of range")
    v1 = old_sents[rec.old_idx].text if rec.old_idx is not None else NONE_TOKEN
    v2 = new_sents[rec.new_idx].text if rec.new_idx is not None else NONE_TOKEN
    lines = [
        "Predict the edit intention from version 1 to version 2.",
        f"Version 1: {v1}",
        f"Version 2: {v2}",
        f"Version 1 Document: {_truncate(old_doc.text, doc_char_budget)}",
        f"Version 2 Document: {_truncate(new_doc.text, doc_char_budget)}",
    ]
    if include_features:
        parts = _render_feature_parts(rec)
        if parts:
            lines.append("Features: " + "; ".join(parts))
    return "\n".join(lines)


def label_with_llm(rec: EditRecord, old_doc, new_doc, client, cfg=None) -> LabelSet:
    """Label one record through the chat client; failures leave it unlabeled."""
    include_features = getattr(cfg, "include_features", False) if cfg else False
    prompt = build_label_prompt(rec, old_doc, new_doc, include_features)
    try:
        decoded = client.complete(prompt)
    except Exception as exc:
        log.warning("labeling failed for %s: %s", rec.pair_key, exc)
        rec.label_source = "unlabeled"
        rec.labels = LabelSet([])
        return rec.labels
    labels, warnings = parse_labels(decoded)
    rec.labels = labels
    rec.raw_decode = decoded
    rec.parse_warnings = warnings
    rec.label_source = "silver_llm"
    rec.violations = validate(rec)
    return labels


_QUOTE_CHARS_RE = re.compile(r"[\"“”]")
_NUMERAL_TOKEN_RE = re.compile(r"\d[\d,.]*")


def _has_quote(text: str) -> bool:
    return len(_QUOTE_CHARS_RE.findall(text)) >= 2


def _numeral_tokens(text: str) -> list[str]:
    return sorted(_NUMERAL_TOKEN_RE.findall(text))


def _syntax_only_delta(old_text: str, new_text: str) -> bool:
    from revlab.align import norm_lexical

    if normalize_ws(old_text) == normalize_ws(new_text):
        # Whitespace-only difference in the raw strings.
        return old_text != new_text
    return norm_lexical(old_text) == norm_lexical(new_text)


def heuristic_label_texts(
    kind: ActionKind,
    old_text: str | None,
    new_text: str | None,
    quote_hint: bool | None = None,
) -> list[FineIntention]:
    """The rule cascade over raw texts; shared with the synthetic oracle."""
    quote_flag = quote_hint if quote_hint is not None else _has_quote(new_text or "")
    if kind is ActionKind.UNCHANGED:
        return [FineIntention.UNCHANGED]
    if kind is ActionKind.EDIT and _syntax_only_delta(old_text or "", new_text or ""):
        return [FineIntention.SYNTAX_CORRECTION]
    if kind is ActionKind.EDIT and _numeral_tokens(old_text or "") != _numeral_tokens(
        new_text or ""
    ):
        return [FineIntention.EVENT]
    if kind in (ActionKind.ADDITION, ActionKind.EDIT) and quote_flag:
        return [FineIntention.QUOTE]
    if (
        kind is ActionKind.ADDITION
        and new_text is not None
        and extract_cues(new_text).historical_event
    ):
        return [FineIntention.BACKGROUND]
    return [FineIntention.OTHER_NONE]


def label_with_heuristics(rec: EditRecord, old_doc, new_doc) -> LabelSet:
    """Deterministic rule cascade standing in for the trained labeler."""
    old_sents = old_doc.ensure_sentences()
    new_sents = new_doc.ensure_sentences()
    old_text = old_sents[rec.old_idx].text if rec.old_idx is not None else None
    new_text = new_sents[rec.new_idx].text if rec.new_idx is not None else None
    _, new_tags = rec.features
    quote_hint = new_tags.quote if new_tags is not None else None
    labels = heuristic_label_texts(
        rec.action.kind, old_text, new_text, quote_hint=quote_hint
    )
    rec.labels = LabelSet(labels)
    rec.label_source = "silver_heuristic"
    rec.violations = validate(rec)
    return rec.labels


def heuristic_labeler():
    return label_with_heuristics


def llm_labeler(client, cfg=None):
    def _label(rec: EditRecord, old_doc, new_doc) -> LabelSet:
        return label_with_llm(rec, old_doc, new_doc, client, cfg)

    return _label


def _read_checkpoint(path: str) -> set[str]:
    if not path or not os.path.exists(path):
        return set()
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


def _prune_output(out_path: str, completed: set[str]) -> None:
    """Keep only records of fully completed pairs; drops any partial tail."""
    if not os.path.exists(out_path):
        return
    kept = []
    with open(out_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                obj = json.loads(line)
                key = f"{obj['article_id']}:{obj['old_version']}:{obj['new_version']}"
            except (json.JSONDecodeError, KeyError):
                continue
            if key in completed:
                kept.append(line)
    with open(out_path, "w", encoding="utf-8") as fh:
        for line in kept:
            fh.write(line + "\n")


def silver_label_corpus(
    corpus,
    alignments,
    labeler,
    out_path: str,
    checkpoint_path: str | None = None,
    cfg=None,
    feature_map=None,
    nli_map=None,
    jobs: int = 1,
) -> dict:
    """Write one labeled EditRecord per edit across all aligned pairs.

    Pairs are processed in sorted key order; completed pair keys go to the
    checkpoint file so an interrupted run resumes without duplicating or
    reordering records. With jobs > 1 the records of a pair are labeled by a
    bounded worker pool, but the output file stays a single ordered writer.
    """
    from revlab.align import SimilarityConfig, classify_actions

    cfg = cfg or SimilarityConfig()
    completed = _read_checkpoint(checkpoint_path) if checkpoint_path else set()
    if completed and not os.path.exists(out_path):
        # A checkpoint without its output is stale: reprocess everything.
        completed = set()
    if completed:
        _prune_output(out_path, completed)
    elif os.path.exists(out_path):
        os.remove(out_path)

    by_key = {}
    for alignment in alignments:
        key = f"{alignment.article_id}:{alignment.old_version}:{alignment.new_version}"
        by_key[key] = alignment

    feature_map = feature_map or {}
    nli_map = nli_map or {}

    out = open(out_path, "a", encoding="utf-8")
    ckpt = open(checkpoint_path, "a", encoding="utf-8") if checkpoint_path else None
    try:
        for key in sorted(by_key):
            if key in completed:
                continue
            alignment = by_key[key]
            old_doc = corpus.get(alignment.article_id, alignment.old_version)
            new_doc = corpus.get(alignment.article_id, alignment.new_version)
            old_doc.ensure_sentences()
            new_doc.ensure_sentences()
            records = classify_actions(alignment, _pair_of(old_doc, new_doc), cfg)
            for rec in records:
                rec.features = (
                    feature_map.get((rec.article_id, rec.old_version, rec.old_idx)),
                    feature_map.get((rec.article_id, rec.new_version, rec.new_idx)),
                )
                if rec.old_idx is not None and rec.new_idx is not None:
                    rec.nli = nli_map.get(
                        (
                            rec.article_id,
                            rec.old_version,
                            rec.new_version,
                            rec.old_idx,
                            rec.new_idx,
                        )
                    )
            if jobs > 1 and len(records) > 1:
                from concurrent.futures import ThreadPoolExecutor

                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    list(pool.map(
                        lambda rec: labeler(rec, old_doc, new_doc), records
                    ))
            else:
                for rec in records:
                    labeler(rec, old_doc, new_doc)
            for rec in records:
                out.write(rec.to_json() + "\n")
            out.flush()
            if ckpt is not None:
                ckpt.write(key + "\n")
                ckpt.flush()
    finally:
        out.close()
        if ckpt is not None:
            ckpt.close()

    # Report from the final file so the counts match it exactly.
    label_counts: Counter = Counter()
    action_counts: Counter = Counter()
    total = 0
    for rec in read_records(out_path):
        action_counts[rec.action.kind.value] += 1
        for label in rec.labels:
            label_counts[serialize_labels(LabelSet([label]))] += 1
        total += 1
    return {
        "pairs": len(by_key),
        "records": total,
        "actions": dict(action_counts),
        "labels": dict(label_counts),
    }


def _pair_of(old_doc, new_doc):
    from revlab.corpus import RevisionPair

    return RevisionPair(old_doc.article_id, old_doc, new_doc)


def read_records(path: str) -> list[EditRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(EditRecord.from_json(line))
    return records
