"""Fact-update prediction: dataset construction, a linear cue model, binning.

The positive class is any old-version sentence that participates in an edit
whose intention is Fact-coarse; the model is logistic regression over the cue
vector plus a hashed token bag of the chosen context window.
"""

from __future__ import annotations

import json
import math
import random
import re
import zlib
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np

from revlab.features import CueVector, extract_cues
from revlab.taxonomy import CoarseIntention

DEFAULT_BAG_DIM = 2048
DENSE_DIM = len(CueVector.BOOL_FIELDS) + 1  # cue booleans + numeral_count

VARIANTS = ("sentence_only", "direct_context", "full_article")


class PredictorError(Exception):
    pass


@dataclass
class PredictionExample:
    article_id: str
    version: int
    sentence_idx: int
    sentence: str
    context_variant: str
    context: str
    gold: bool
    cue: CueVector
    timestamp: datetime

    def to_json(self) -> str:
        return json.dumps(
            {
                "article_id": self.article_id,
                "version": self.version,
                "sentence_idx": self.sentence_idx,
                "sentence": self.sentence,
                "context_variant": self.context_variant,
                "context": self.context,
                "gold": self.gold,
                "timestamp": self.timestamp.strftime("%Y-%m-%dT%H:%M:%SZ"),
            }
        )


@dataclass
class LikelihoodBins:
    t1: float = 1.0 / 3.0
    t2: float = 2.0 / 3.0

    def __post_init__(self) -> None:
        if not 0.0 < self.t1 < self.t2 < 1.0:
            raise PredictorError(
                f"bin thresholds must satisfy 0 < t1 < t2 < 1, got "
                f"({self.t1}, {self.t2})"
            )

    def bin(self, p: float) -> str:
        if p < self.t1:
            return "Low"
        if p < self.t2:
            return "Medium"
        return "High"


def sample_high_update(alignments_with_sizes):
    """Keep pairs with strictly >10% sentences added and >5% deleted.

    Takes (alignment, n, m) triples; returns the kept alignments.
    """
    kept = []
    for alignment, n, m in alignments_with_sizes:
        if n == 0 or m == 0:
            continue
        if len(alignment.additions) / m > 0.10 and len(alignment.deletions) / n > 0.05:
            kept.append(alignment)
    return kept


def _fact_update_indices(records) -> set[tuple[str, int, int]]:
    """(article_id, old_version, old_idx) keys of sentences with a Fact edit."""
    out: set[tuple[str, int, int]] = set()
    for rec in records:
        if rec.old_idx is None:
            continue
        if CoarseIntention.FACT in rec.labels.coarse_set():
            out.add((rec.article_id, rec.old_version, rec.old_idx))
    return out


def _context_for(sentences, idx: int, variant: str, doc_text: str) -> str:
    if variant == "sentence_only":
        return sentences[idx].text
    if variant == "direct_context":
        window = sentences[max(0, idx - 1) : idx + 2]
        return " ".join(s.text for s in window)
    if variant == "full_article":
        return doc_text
    raise PredictorError(f"unknown context variant {variant!r}")


def build_examples(corpus, kept_alignments, records, variant: str = "sentence_only"):
    """One example per old-version sentence of every kept pair."""
    if variant not in VARIANTS:
        raise PredictorError(f"unknown context variant {variant!r}")
    positives = _fact_update_indices(records)
    examples: list[PredictionExample] = []
    for alignment in kept_alignments:
        doc = corpus.get(alignment.article_id, alignment.old_version)
        sentences = doc.ensure_sentences()
        for idx, sentence in enumerate(sentences):
            examples.append(
                PredictionExample(
                    article_id=alignment.article_id,
                    version=alignment.old_version,
                    sentence_idx=idx,
                    sentence=sentence.text,
                    context_variant=variant,
                    context=_context_for(sentences, idx, variant, doc.text),
                    gold=(alignment.article_id, alignment.old_version, idx)
                    in positives,
                    cue=extract_cues(sentence),
                    timestamp=doc.timestamp,
                )
            )
    return examples


def chrono_split(examples, train_fraction: float = 0.8):
    """Chronological train/dev split; a straddled article goes whole to dev."""
    ordered = sorted(
        examples, key=lambda e: (e.timestamp, e.article_id, e.sentence_idx)
    )
    if not ordered:
        return [], []
    cut = int(math.floor(train_fraction * len(ordered)))
    dev_articles = {e.article_id for e in ordered[cut:]}
    while cut > 0 and ordered[cut - 1].article_id in dev_articles:
        cut -= 1
    return ordered[:cut], ordered[cut:]


def balance(examples, seed: int = 0):
    """Downsample the majority class uniformly; order is re-sorted for
    determinism."""
    pos = [e for e in examples if e.gold]
    neg = [e for e in examples if not e.gold]
    if not pos or not neg:
        raise PredictorError(
            f"both classes required to balance (pos={len(pos)}, neg={len(neg)})"
        )
    rng = random.Random(seed)
    if len(pos) > len(neg):
        pos = rng.sample(pos, len(neg))
    elif len(neg) > len(pos):
        neg = rng.sample(neg, len(pos))
    out = pos + neg
    out.sort(key=lambda e: (e.timestamp, e.article_id, e.version, e.sentence_idx))
    return out


# -- featurization -------------------------------------------------------------

_TOKEN_RE = re.compile(r"[a-z0-9']+")


def _hash_bag(text: str, dim: int) -> dict[int, float]:
    bag: dict[int, float] = {}
    for token in _TOKEN_RE.findall(text.lower()):
        slot = zlib.crc32(token.encode("utf-8")) % dim
        bag[slot] = bag.get(slot, 0.0) + 1.0
    return bag


def featurize(example: PredictionExample, bag_dim: int) -> np.ndarray:
    x = np.zeros(DENSE_DIM + bag_dim, dtype=np.float64)
    x[:DENSE_DIM] = example.cue.as_floats()
    for slot, count in _hash_bag(example.context, bag_dim).items():
        x[DENSE_DIM + slot] = count
    return x


def design_matrix(examples, bag_dim: int):
    X = np.stack([featurize(e, bag_dim) for e in examples])
    y = np.array([1.0 if e.gold else 0.0 for e in examples])
    return X, y


# -- model ----------------------------------------------------------------------

@dataclass
class CueModel:
    weights: np.ndarray
    bias: float
    bag_dim: int = DEFAULT_BAG_DIM
    seed: int = 0
    thresholds: LikelihoodBins = field(default_factory=LikelihoodBins)

    @classmethod
    def zeros(cls, bag_dim: int = DEFAULT_BAG_DIM, seed: int = 0) -> "CueModel":
        return cls(
            weights=np.zeros(DENSE_DIM + bag_dim, dtype=np.float64),
            bias=0.0,
            bag_dim=bag_dim,
            seed=seed,
        )

    def predict_proba(self, example: PredictionExample) -> float:
        x = featurize(example, self.bag_dim)
        z = float(self.weights @ x + self.bias)
        return _sigmoid(z)

    def predict_bin(self, example: PredictionExample) -> str:
        return self.thresholds.bin(self.predict_proba(example))

    def save(self, path: str) -> None:
        obj = {
            "version": 1,
            "B": self.bag_dim,
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "thresholds": [self.thresholds.t1, self.thresholds.t2],
            "seed": self.seed,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(obj, fh)

    @classmethod
    def load(cls, path: str) -> "CueModel":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        if obj.get("version") != 1:
            raise PredictorError(f"unsupported model version {obj.get('version')!r}")
        weights = np.asarray(obj["weights"], dtype=np.float64)
        return cls(
            weights=weights,
            bias=float(obj["bias"]),
            bag_dim=int(obj["B"]),
            seed=int(obj.get("seed", 0)),
            thresholds=LikelihoodBins(*obj["thresholds"]),
        )


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def loss_and_grad(weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray,
                  l2: float):
    """Mean logistic loss with L2 on the weights (not the bias)."""
    z = X @ weights + bias
    # log(1 + exp(-s*z)) computed stably
    sz = np.where(y > 0.5, z, -z)
    loss = float(np.mean(np.logaddexp(0.0, -sz))) + 0.5 * l2 * float(
        weights @ weights
    )
    p = 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))
    residual = p - y
    grad_w = X.T @ residual / len(y) + l2 * weights
    grad_b = float(np.mean(residual))
    return loss, grad_w, grad_b


@dataclass
class TrainHistory:
    losses: list[float] = field(default_factory=list)
    stopped_early: bool = False


def train(
    examples,
    lr: float = 0.5,
    epochs: int = 200,
    l2: float = 1e-4,
    seed: int = 0,
    bag_dim: int = DEFAULT_BAG_DIM,
) -> tuple[CueModel, TrainHistory]:
    """Full-batch gradient descent with backtracking; deterministic given seed.

    The loss must decrease every accepted epoch (within 1e-6); a step that
    increases it is retried at half the rate, and training stops early once
    the rate underflows.
    """
    X, y = design_matrix(examples, bag_dim)
    if not np.isfinite(X).all():
        raise PredictorError("non-finite feature values")
    model = CueModel.zeros(bag_dim=bag_dim, seed=seed)
    history = TrainHistory()
    loss, grad_w, grad_b = loss_and_grad(model.weights, model.bias, X, y, l2)
    if not math.isfinite(loss):
        raise PredictorError("non-finite loss at epoch 0")
    history.losses.append(loss)
    step = lr
    for epoch in range(1, epochs + 1):
        while True:
            new_w = model.weights - step * grad_w
            new_b = model.bias - step * grad_b
            new_loss, new_gw, new_gb = loss_and_grad(new_w, new_b, X, y, l2)
            if not math.isfinite(new_loss):
                raise PredictorError(f"non-finite loss at epoch {epoch}")
            if new_loss <= loss + 1e-6:
                break
            step /= 2.0
            if step < 1e-12:
                history.stopped_early = True
                return model, history
        model.weights, model.bias = new_w, new_b
        loss, grad_w, grad_b = new_loss, new_gw, new_gb
        history.losses.append(loss)
    return model, history


def evaluate(model: CueModel, examples) -> dict:
    """Binary F1 report shaped like the prediction-task result table."""
    tp = fp = fn = tn = 0
    for example in examples:
        pred = model.predict_proba(example) >= 0.5
        if pred and example.gold:
            tp += 1
        elif pred and not example.gold:
            fp += 1
        elif not pred and example.gold:
            fn += 1
        else:
            tn += 1

    def f1(a: int, b: int, c: int) -> float:
        denom = 2 * a + b + c
        return 100.0 if denom == 0 else 200.0 * a / denom

    fact = f1(tp, fp, fn)
    not_fact = f1(tn, fn, fp)
    total = tp + fp + fn + tn
    micro = 100.0 * (tp + tn) / total if total else 0.0
    return {
        "fact_f1": fact,
        "not_fact_f1": not_fact,
        "macro_f1": (fact + not_fact) / 2.0,
        "micro_f1": micro,
        "confusion": {"tp": tp, "fp": fp, "fn": fn, "tn": tn},
        "n": total,
    }
