"""Shared evaluation math: multi-label F1, Cohen's kappa, crosstabs."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from revlab.taxonomy import CoarseIntention, FineIntention, LabelSet, coarse_of

log = logging.getLogger(__name__)


@dataclass
class F1Report:
    macro: float  # percent
    micro: float  # percent
    per_label: dict[str, float] = field(default_factory=dict)
    # Labels excluded from the macro because they never occur in gold.
    zero_support: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "macro_f1": self.macro,
            "micro_f1": self.micro,
            "per_label_f1": self.per_label,
            "zero_support_labels": self.zero_support,
        }


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 1.0
    return 2 * tp / denom


def multilabel_f1(
    pred: list[LabelSet],
    gold: list[LabelSet],
    scope: CoarseIntention | None = None,
) -> F1Report:
    """Set-based multi-label F1 over parallel prediction/gold label sets.

    With a coarse scope, only records whose gold set contains at least one
    label of that category are scored, and only that category's fine labels
    enter the pools. Macro averages labels with gold support; micro pools
    TP/FP/FN across labels.
    """
    if len(pred) != len(gold):
        raise ValueError(
            f"prediction/gold length mismatch: {len(pred)} vs {len(gold)}"
        )
    records = list(zip(pred, gold))
    if scope is not None:
        records = [(p, g) for p, g in records if scope in g.coarse_set()]
        universe = [l for l in FineIntention if coarse_of(l) is scope]
    else:
        universe = list(FineIntention)

    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    gold_support: Counter = Counter()
    allowed = set(universe)
    for p, g in records:
        pset = p.as_set() & allowed
        gset = g.as_set() & allowed
        for label in gset:
            gold_support[label] += 1
        for label in pset & gset:
            tp[label] += 1
        for label in pset - gset:
            fp[label] += 1
        for label in gset - pset:
            fn[label] += 1

    per_label: dict[str, float] = {}
    supported: list[float] = []
    zero_support: list[str] = []
    for label in universe:
        if gold_support[label] == 0:
            if tp[label] or fp[label]:
                zero_support.append(label.value)
            continue
        score = _f1(tp[label], fp[label], fn[label]) * 100.0
        per_label[label.value] = score
        supported.append(score)

    macro = sum(supported) / len(supported) if supported else 0.0
    pooled_tp = sum(tp.values())
    pooled_fp = sum(fp.values())
    pooled_fn = sum(fn.values())
    micro = _f1(pooled_tp, pooled_fp, pooled_fn) * 100.0
    return F1Report(macro=macro, micro=micro, per_label=per_label,
                    zero_support=zero_support)


def cohens_kappa(a: list, b: list) -> float:
    """Chance-corrected agreement with marginal-product expected agreement."""
    if len(a) != len(b):
        raise ValueError(f"sequence length mismatch: {len(a)} vs {len(b)}")
    if not a:
        raise ValueError("kappa undefined on empty sequences")
    n = len(a)
    p_o = sum(x == y for x, y in zip(a, b)) / n
    counts_a = Counter(a)
    counts_b = Counter(b)
    p_e = sum(
        (counts_a[c] / n) * (counts_b[c] / n)
        for c in set(counts_a) | set(counts_b)
    )
    if p_e >= 1.0:
        # Degenerate single-category marginals with perfect agreement.
        log.warning("kappa degenerate: expected agreement is 1, returning 1.0")
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)


def labelset_kappa(a: list[LabelSet], b: list[LabelSet]) -> dict:
    """Multi-label agreement: per-label kappas averaged, plus exact-set kappa."""
    seen: set[FineIntention] = set()
    for ls in list(a) + list(b):
        seen.update(ls.labels)
    per_label: dict[str, float] = {}
    for label in sorted(seen, key=lambda l: l.value):
        xa = [label in ls for ls in a]
        xb = [label in ls for ls in b]
        per_label[label.value] = cohens_kappa(xa, xb)
    mean = sum(per_label.values()) / len(per_label) if per_label else 1.0
    exact = cohens_kappa([ls.as_set() for ls in a], [ls.as_set() for ls in b])
    return {"per_label": per_label, "mean_per_label": mean, "exact_set": exact}


@dataclass
class Crosstab:
    row_labels: list[str]
    col_labels: list[str]
    cells: dict[tuple[str, str], float]
    normalized: bool = False

    def cell(self, row: str, col: str) -> float:
        return self.cells.get((row, col), 0.0)

    def grand_total(self) -> float:
        return sum(self.cells.values())

    def to_dict(self) -> dict:
        return {
            "rows": self.row_labels,
            "cols": self.col_labels,
            "normalized": self.normalized,
            "cells": {
                row: {col: self.cell(row, col) for col in self.col_labels}
                for row in self.row_labels
            },
        }

    def render(self) -> str:
        """Aligned-column plain text."""
        width = max(
            [len(c) for c in self.col_labels] + [10]
        )
        row_width = max([len(r) for r in self.row_labels] + [8])
        fmt_cell = (lambda v: f"{v:>{width}.1f}") if self.normalized else (
            lambda v: f"{int(v):>{width}d}")
        lines = [
            " " * row_width + "  " + "  ".join(f"{c:>{width}}" for c in self.col_labels)
        ]
        for row in self.row_labels:
            cells = "  ".join(fmt_cell(self.cell(row, col)) for col in self.col_labels)
            lines.append(f"{row:<{row_width}}  {cells}")
        return "\n".join(lines)


def crosstab(
    records,
    rows: str = "action",
    cols: str = "coarse",
    normalize: str = "none",
) -> Crosstab:
    """Count records by (row axis, label axis).

    Rows come from the edit action kind (or a record's topic attribute);
    columns from coarse or fine labels. Multi-label records count once per
    attached label. Row normalization converts counts to percentages.
    """
    if normalize not in ("none", "row"):
        raise ValueError(f"unknown normalize mode {normalize!r}")
    counts: dict[tuple[str, str], float] = defaultdict(float)
    row_seen: list[str] = []
    col_seen: list[str] = []

    def note(seq: list[str], key: str) -> None:
        if key not in seq:
            seq.append(key)

    for rec in records:
        if rows == "action":
            row_key = rec.action.kind.value
        elif rows == "topic":
            row_key = getattr(rec, "topic", None) or "unknown"
        else:
            raise ValueError(f"unknown row axis {rows!r}")
        note(row_seen, row_key)
        for label in rec.labels:
            if cols == "coarse":
                col_key = coarse_of(label).value
            elif cols == "fine":
                col_key = label.value
            else:
                raise ValueError(f"unknown column axis {cols!r}")
            note(col_seen, col_key)
            counts[(row_key, col_key)] += 1

    if normalize == "row":
        for row in row_seen:
            total = sum(counts[(row, col)] for col in col_seen)
            if total > 0:
                for col in col_seen:
                    counts[(row, col)] = 100.0 * counts[(row, col)] / total
    return Crosstab(
        row_labels=row_seen,
        col_labels=col_seen,
        cells=dict(counts),
        normalized=(normalize == "row"),
    )
