"""Article revision-history store: ingest, validation, pair enumeration.

Persistence is an append-only JSONL record file keyed by (article_id,
version) with an in-memory offset index: a single writer appends, any number
of readers stream. Duplicate keys are rejected first-write-wins.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone

from revlab.segment import Sentence, SegmenterConfig, segment

RECORD_FIELDS = ("article_id", "version", "outlet", "timestamp", "text")


class CorpusError(Exception):
    pass


def parse_timestamp(raw: str) -> datetime:
    """ISO-8601; a trailing Z or missing offset both mean UTC."""
    if raw.endswith("Z"):
        raw = raw[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise CorpusError(f"bad timestamp {raw!r}: {exc}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class ArticleVersion:
    article_id: str
    version: int
    outlet: str
    timestamp: datetime
    text: str
    sentences: list[Sentence] | None = None

    @classmethod
    def from_record(cls, obj: dict) -> "ArticleVersion":
        missing = [k for k in RECORD_FIELDS if k not in obj]
        if missing:
            raise CorpusError(f"missing fields: {', '.join(missing)}")
        version = obj["version"]
        if not isinstance(version, int) or version < 0:
            raise CorpusError(f"version must be a non-negative int, got {version!r}")
        text = obj["text"]
        if not isinstance(text, str) or not text.strip():
            raise CorpusError("text must be a non-empty string")
        return cls(
            article_id=str(obj["article_id"]),
            version=version,
            outlet=str(obj["outlet"]),
            timestamp=parse_timestamp(str(obj["timestamp"])),
            text=text,
        )

    def to_record(self) -> dict:
        return {
            "article_id": self.article_id,
            "version": self.version,
            "outlet": self.outlet,
            "timestamp": format_timestamp(self.timestamp),
            "text": self.text,
        }

    def ensure_sentences(self, cfg: SegmenterConfig | None = None) -> list[Sentence]:
        if self.sentences is None:
            self.sentences = segment(self.text, cfg)
        return self.sentences


@dataclass
class RevisionPair:
    article_id: str
    old: ArticleVersion
    new: ArticleVersion

    def __post_init__(self) -> None:
        if self.old.article_id != self.new.article_id:
            raise CorpusError("revision pair must share an article_id")
        if not self.old.version < self.new.version:
            raise CorpusError(
                f"old version {self.old.version} must precede {self.new.version}"
            )

    @property
    def old_version(self) -> int:
        return self.old.version

    @property
    def new_version(self) -> int:
        return self.new.version

    @property
    def key(self) -> str:
        return f"{self.article_id}:{self.old_version}:{self.new_version}"


@dataclass
class LoadReport:
    ingested: int = 0
    articles: int = 0
    skipped: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ingested": self.ingested,
            "articles": self.articles,
            "skipped": [{"line": n, "reason": r} for n, r in self.skipped],
        }


def _iter_pairs(store, policy: str):
    if policy not in ("consecutive", "first_last"):
        raise CorpusError(f"unknown pair policy {policy!r}")
    for aid in store.article_ids():
        versions = store.versions(aid)
        if len(versions) < 2:
            continue
        if policy == "consecutive":
            for older, newer in zip(versions, versions[1:]):
                yield RevisionPair(aid, store.get(aid, older), store.get(aid, newer))
        else:
            yield RevisionPair(
                aid, store.get(aid, versions[0]), store.get(aid, versions[-1])
            )


class MemoryCorpus:
    """Dict-backed store with the same read interface as Corpus."""

    def __init__(self):
        self._records: dict[tuple[str, int], ArticleVersion] = {}

    def __len__(self) -> int:
        return len(self._records)

    def add(self, version: ArticleVersion) -> None:
        key = (version.article_id, version.version)
        if key in self._records:
            raise CorpusError(
                f"duplicate record for article {version.article_id!r} "
                f"version {version.version}"
            )
        self._records[key] = version

    def get(self, article_id: str, version: int) -> ArticleVersion:
        return self._records[(article_id, version)]

    def article_ids(self) -> list[str]:
        return sorted({aid for aid, _ in self._records})

    def versions(self, article_id: str) -> list[int]:
        return sorted(v for aid, v in self._records if aid == article_id)

    def pairs(self, policy: str = "consecutive"):
        return _iter_pairs(self, policy)

    @classmethod
    def from_jsonl(cls, path: str) -> "MemoryCorpus":
        store = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    store.add(ArticleVersion.from_record(json.loads(line)))
        return store


class Corpus:
    """On-disk append-only store of ArticleVersion records."""

    def __init__(self, store_dir: str):
        self.store_dir = store_dir
        os.makedirs(store_dir, exist_ok=True)
        self.records_path = os.path.join(store_dir, "records.jsonl")
        self._index: dict[tuple[str, int], int] = {}  # key -> byte offset
        self._timestamps: dict[tuple[str, int], datetime] = {}
        self._rebuild_index()

    def _rebuild_index(self) -> None:
        self._index.clear()
        self._timestamps.clear()
        if not os.path.exists(self.records_path):
            return
        with open(self.records_path, "rb") as fh:
            offset = 0
            for raw in fh:
                line = raw.decode("utf-8").strip()
                if line:
                    obj = json.loads(line)
                    key = (str(obj["article_id"]), int(obj["version"]))
                    self._index.setdefault(key, offset)
                    self._timestamps.setdefault(
                        key, parse_timestamp(str(obj["timestamp"]))
                    )
                offset += len(raw)

    def __len__(self) -> int:
        return len(self._index)

    def article_ids(self) -> list[str]:
        return sorted({aid for aid, _ in self._index})

    def versions(self, article_id: str) -> list[int]:
        return sorted(v for aid, v in self._index if aid == article_id)

    def _check_monotone(self, version: ArticleVersion) -> str | None:
        """Timestamps must be non-decreasing with version within an article."""
        for (aid, v), ts in self._timestamps.items():
            if aid != version.article_id:
                continue
            if v < version.version and ts > version.timestamp:
                return (
                    f"timestamp precedes version {v} of the same article"
                )
            if v > version.version and ts < version.timestamp:
                return f"timestamp follows version {v} of the same article"
        return None

    def add(self, version: ArticleVersion) -> None:
        key = (version.article_id, version.version)
        if key in self._index:
            raise CorpusError(
                f"duplicate record for article {version.article_id!r} "
                f"version {version.version}"
            )
        reason = self._check_monotone(version)
        if reason is not None:
            raise CorpusError(reason)
        line = json.dumps(version.to_record()) + "\n"
        with open(self.records_path, "a", encoding="utf-8") as fh:
            offset = fh.tell()
            fh.write(line)
            fh.flush()
        self._index[key] = offset
        self._timestamps[key] = version.timestamp

    def get(self, article_id: str, version: int) -> ArticleVersion:
        key = (article_id, version)
        if key not in self._index:
            raise KeyError(f"no record for {article_id!r} version {version}")
        with open(self.records_path, "rb") as fh:
            fh.seek(self._index[key])
            line = fh.readline().decode("utf-8")
        return ArticleVersion.from_record(json.loads(line))

    def ingest(self, path: str, fmt: str = "jsonl", strict: bool = False) -> LoadReport:
        """Load a JSONL record file; malformed lines are skipped and reported
        (or fatal in strict mode)."""
        if fmt != "jsonl":
            raise CorpusError(f"unsupported format {fmt!r}")
        if not os.path.exists(path):
            raise CorpusError(f"cannot read {path!r}")
        report = LoadReport()
        seen_articles: set[str] = set()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    obj = json.loads(line)
                    version = ArticleVersion.from_record(obj)
                    self.add(version)
                    report.ingested += 1
                    seen_articles.add(version.article_id)
                except (json.JSONDecodeError, CorpusError) as exc:
                    if strict:
                        raise CorpusError(f"line {lineno}: {exc}") from exc
                    report.skipped.append((lineno, str(exc)))
        report.articles = len(seen_articles)
        return report

    def export(self, path: str) -> int:
        """Write all records, sorted by key, as JSONL. Returns the count."""
        count = 0
        with open(path, "w", encoding="utf-8") as out:
            for aid, ver in sorted(self._index):
                out.write(json.dumps(self.get(aid, ver).to_record()) + "\n")
                count += 1
        return count

    def pairs(self, policy: str = "consecutive"):
        """Yield RevisionPairs per policy; single-version articles yield none."""
        return _iter_pairs(self, policy)
