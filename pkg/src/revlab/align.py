"""Sentence alignment across a revision pair.

Scores every (old, new) sentence pair with a lexical hybrid (token Jaccard +
character-trigram cosine) or an embedding service, then links sentences
one-to-one: an exact assignment for small problems, a deterministic greedy
sweep for large ones. Unlinked sentences become additions/deletions; linked
ones become edit or unchanged actions, with large normalized position shifts
flagged as moves.
"""

from __future__ import annotations

import enum
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from revlab._kernels import similarity_matrix as _kernel_matrix
from revlab.segment import Sentence, normalize_ws

_PUNCT_RE = re.compile(r"[^0-9a-z]+")

# Exact one-to-one assignment is used up to this n*m; greedy beyond.
EXACT_CELL_LIMIT = 10_000

# Scores for unequal texts are capped just below 1: repeated-token sentences
# can otherwise cosine to exactly 1.0 against a longer repetition of
# themselves, and 1.0 must mean lexical equality.
_UNEQUAL_CAP = 1.0 - 1e-9


@dataclass
class SimilarityConfig:
    backend: str = "lexical_hybrid"  # or "embedding_service"
    link_threshold: float = 0.45
    token_weight: float = 0.5
    move_threshold: float = 0.3

    def __post_init__(self) -> None:
        if not 0.0 <= self.link_threshold <= 1.0:
            raise ValueError(
                f"link_threshold must be in [0, 1], got {self.link_threshold}"
            )
        if not 0.0 <= self.token_weight <= 1.0:
            raise ValueError(
                f"token_weight must be in [0, 1], got {self.token_weight}"
            )
        if not 0.0 <= self.move_threshold <= 1.0:
            raise ValueError(
                f"move_threshold must be in [0, 1], got {self.move_threshold}"
            )
        if self.backend not in ("lexical_hybrid", "embedding_service"):
            raise ValueError(f"unknown similarity backend {self.backend!r}")


class ActionKind(str, enum.Enum):
    ADDITION = "addition"
    DELETION = "deletion"
    EDIT = "edit"
    UNCHANGED = "unchanged"


@dataclass(frozen=True)
class EditAction:
    kind: ActionKind
    moved: bool = False
    index_delta: int | None = None


@dataclass
class Alignment:
    article_id: str
    old_version: int
    new_version: int
    links: list[tuple[int, int, float]] = field(default_factory=list)
    additions: list[int] = field(default_factory=list)
    deletions: list[int] = field(default_factory=list)

    def link_pairs(self) -> set[tuple[int, int]]:
        return {(i, j) for i, j, _ in self.links}

    def check(self, n: int, m: int, link_threshold: float | None = None) -> None:
        """Raise if the one-to-one partition invariants are violated."""
        old_linked = [i for i, _, _ in self.links]
        new_linked = [j for _, j, _ in self.links]
        if len(set(old_linked)) != len(old_linked):
            raise ValueError("duplicate old index in links")
        if len(set(new_linked)) != len(new_linked):
            raise ValueError("duplicate new index in links")
        if set(old_linked) | set(self.deletions) != set(range(n)):
            raise ValueError("old indices not partitioned by links/deletions")
        if set(old_linked) & set(self.deletions):
            raise ValueError("old index both linked and deleted")
        if set(new_linked) | set(self.additions) != set(range(m)):
            raise ValueError("new indices not partitioned by links/additions")
        if set(new_linked) & set(self.additions):
            raise ValueError("new index both linked and added")
        if link_threshold is not None:
            low = [l for l in self.links if l[2] < link_threshold]
            if low:
                raise ValueError(f"links below threshold: {low}")

    def to_json(self) -> str:
        return json.dumps(
            {
                "article_id": self.article_id,
                "old_version": self.old_version,
                "new_version": self.new_version,
                "links": [[i, j, s] for i, j, s in self.links],
                "additions": list(self.additions),
                "deletions": list(self.deletions),
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "Alignment":
        obj = json.loads(line)
        return cls(
            article_id=obj["article_id"],
            old_version=int(obj["old_version"]),
            new_version=int(obj["new_version"]),
            links=[(int(i), int(j), float(s)) for i, j, s in obj["links"]],
            additions=[int(j) for j in obj["additions"]],
            deletions=[int(i) for i in obj["deletions"]],
        )


def norm_lexical(text: str) -> str:
    """Lowercased, punctuation-stripped, whitespace-collapsed form."""
    return normalize_ws(_PUNCT_RE.sub(" ", text.lower()))


def _trigrams(norm: str) -> Counter:
    if len(norm) < 3:
        return Counter({norm: 1}) if norm else Counter()
    return Counter(norm[k : k + 3] for k in range(len(norm) - 2))


def _pack_side(norms: list[str], tok_vocab: dict, tri_vocab: dict):
    """Flat packed arrays (tokens, trigram id/count runs, norms) for one side."""
    tok_data: list[int] = []
    tok_off = [0]
    tri_data: list[int] = []
    tri_cnt: list[int] = []
    tri_off = [0]
    tri_norm: list[float] = []
    for norm in norms:
        ids = sorted({tok_vocab.setdefault(t, len(tok_vocab)) for t in norm.split()})
        tok_data.extend(ids)
        tok_off.append(len(tok_data))
        grams = _trigrams(norm)
        pairs = sorted(
            (tri_vocab.setdefault(g, len(tri_vocab)), c) for g, c in grams.items()
        )
        for gid, c in pairs:
            tri_data.append(gid)
            tri_cnt.append(c)
        tri_off.append(len(tri_data))
        tri_norm.append(math.sqrt(sum(c * c for _, c in pairs)))
    return (
        np.asarray(tok_data, dtype=np.int32),
        np.asarray(tok_off, dtype=np.int64),
        np.asarray(tri_data, dtype=np.int32),
        np.asarray(tri_cnt, dtype=np.int32),
        np.asarray(tri_off, dtype=np.int64),
        np.asarray(tri_norm, dtype=np.float64),
    )


def lexical_matrix(
    old_texts: list[str], new_texts: list[str], token_weight: float
) -> np.ndarray:
    """(n, m) similarity matrix under the lexical hybrid backend."""
    norms_a = [norm_lexical(t) for t in old_texts]
    norms_b = [norm_lexical(t) for t in new_texts]
    tok_vocab: dict[str, int] = {}
    tri_vocab: dict[str, int] = {}
    side_a = _pack_side(norms_a, tok_vocab, tri_vocab)
    side_b = _pack_side(norms_b, tok_vocab, tri_vocab)
    mat = _kernel_matrix(*side_a, *side_b, float(token_weight))
    mat = np.minimum(mat, _UNEQUAL_CAP)
    by_norm: dict[str, list[int]] = {}
    for j, nb in enumerate(norms_b):
        by_norm.setdefault(nb, []).append(j)
    for i, na in enumerate(norms_a):
        for j in by_norm.get(na, ()):
            mat[i, j] = 1.0
    return mat


def embedding_matrix(old_texts, new_texts, client) -> np.ndarray:
    """Similarity via the embedding service, cosine mapped onto [0, 1]."""
    if client is None:
        raise ValueError("embedding_service backend requires a configured client")
    vecs = client.embed(list(old_texts) + list(new_texts))
    a = np.asarray(vecs[: len(old_texts)], dtype=np.float64)
    b = np.asarray(vecs[len(old_texts) :], dtype=np.float64)
    cos = a @ b.T
    return np.clip((cos + 1.0) / 2.0, 0.0, 1.0)


def similarity(a: Sentence, b: Sentence, cfg: SimilarityConfig, client=None) -> float:
    """Score one sentence pair; symmetric, and 1.0 iff lexically equal."""
    if not a.text or not b.text:
        raise ValueError("similarity requires non-empty sentences")
    if cfg.backend == "embedding_service":
        return float(embedding_matrix([a.text], [b.text], client)[0, 0])
    return float(lexical_matrix([a.text], [b.text], cfg.token_weight)[0, 0])


def _greedy_links(mat: np.ndarray, threshold: float) -> list[tuple[int, int, float]]:
    """Deterministic greedy sweep: best score first, position-stable ties."""
    n, m = mat.shape
    candidates = [
        (-mat[i, j], abs(i - j), i, j)
        for i in range(n)
        for j in range(m)
        if mat[i, j] >= threshold
    ]
    candidates.sort()
    used_i: set[int] = set()
    used_j: set[int] = set()
    links = []
    for negscore, _, i, j in candidates:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        links.append((i, j, float(-negscore)))
    links.sort()
    return links


def _exact_links(mat: np.ndarray, threshold: float) -> list[tuple[int, int, float]]:
    """Max-total-score assignment; below-threshold cells contribute nothing."""
    from scipy.optimize import linear_sum_assignment

    clamped = np.where(mat >= threshold, mat, 0.0)
    rows, cols = linear_sum_assignment(clamped, maximize=True)
    return sorted(
        (int(i), int(j), float(mat[i, j]))
        for i, j in zip(rows, cols)
        if mat[i, j] >= threshold
    )


def score_matrix(pair, cfg: SimilarityConfig, client=None) -> np.ndarray:
    old_texts = [s.text for s in pair.old.sentences]
    new_texts = [s.text for s in pair.new.sentences]
    if cfg.backend == "embedding_service":
        return embedding_matrix(old_texts, new_texts, client)
    return lexical_matrix(old_texts, new_texts, cfg.token_weight)


def align_pair(pair, cfg: SimilarityConfig, client=None, matcher: str | None = None):
    """Align a revision pair's sentences into links/additions/deletions."""
    if pair.old.sentences is None or pair.new.sentences is None:
        raise ValueError("both versions must be segmented before alignment")
    n = len(pair.old.sentences)
    m = len(pair.new.sentences)
    if n == 0 or m == 0:
        links: list[tuple[int, int, float]] = []
    else:
        mat = score_matrix(pair, cfg, client)
        if matcher is None:
            matcher = "exact" if n * m <= EXACT_CELL_LIMIT else "greedy"
        if matcher == "exact":
            links = _exact_links(mat, cfg.link_threshold)
        elif matcher == "greedy":
            links = _greedy_links(mat, cfg.link_threshold)
        else:
            raise ValueError(f"unknown matcher {matcher!r}")
    linked_i = {i for i, _, _ in links}
    linked_j = {j for _, j, _ in links}
    alignment = Alignment(
        article_id=pair.article_id,
        old_version=pair.old.version,
        new_version=pair.new.version,
        links=links,
        additions=sorted(set(range(m)) - linked_j),
        deletions=sorted(set(range(n)) - linked_i),
    )
    alignment.check(n, m, cfg.link_threshold)
    return alignment


def classify_actions(alignment: Alignment, pair, cfg: SimilarityConfig | None = None):
    """Derive per-sentence EditRecord stubs (no labels yet) from an alignment."""
    from revlab.labeler import EditRecord

    cfg = cfg or SimilarityConfig()
    old_sents = pair.old.sentences
    new_sents = pair.new.sentences
    n, m = len(old_sents), len(new_sents)
    records = []

    def stub(action, old_idx=None, new_idx=None, score=None):
        return EditRecord(
            article_id=alignment.article_id,
            old_version=alignment.old_version,
            new_version=alignment.new_version,
            old_idx=old_idx,
            new_idx=new_idx,
            action=action,
            score=score,
        )

    for i, j, score in sorted(alignment.links):
        same = old_sents[i].text == new_sents[j].text
        kind = ActionKind.UNCHANGED if same else ActionKind.EDIT
        moved = abs(i / n - j / m) > cfg.move_threshold
        action = EditAction(
            kind=kind, moved=moved, index_delta=(j - i) if moved else None
        )
        records.append(stub(action, old_idx=i, new_idx=j, score=score))
    for i in sorted(alignment.deletions):
        records.append(stub(EditAction(ActionKind.DELETION), old_idx=i))
    for j in sorted(alignment.additions):
        records.append(stub(EditAction(ActionKind.ADDITION), new_idx=j))
    return records


def alignment_f1(predicted: Alignment, gold: Alignment) -> tuple[float, float, float]:
    """Precision/recall/F1 of predicted links against gold links."""
    pred = predicted.link_pairs()
    true = gold.link_pairs()
    correct = len(pred & true)
    precision = correct / len(pred) if pred else 1.0
    recall = correct / len(true) if true else 1.0
    if precision + recall == 0:
        return (precision, recall, 0.0)
    f1 = 2 * precision * recall / (precision + recall)
    return (precision, recall, f1)
