"""Sectioned key-value run configuration with validation.

Precedence is flag > config file > default; unknown sections or keys are
rejected so typos cannot silently fall back to defaults.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass, field, fields


class ConfigError(Exception):
    pass


@dataclass
class CorpusSection:
    store_dir: str = "store"
    pair_policy: str = "consecutive"
    abbrev_file: str = ""
    min_sentence_chars: int = 2
    dateline: bool = True

    def validate(self) -> None:
        if self.pair_policy not in ("consecutive", "first_last"):
            raise ConfigError(f"corpus.pair_policy {self.pair_policy!r} invalid")
        if self.min_sentence_chars < 1:
            raise ConfigError("corpus.min_sentence_chars must be >= 1")


@dataclass
class AlignSection:
    backend: str = "lexical_hybrid"
    link_threshold: float = 0.45
    token_weight: float = 0.5
    move_threshold: float = 0.3
    jobs: int = 1

    def validate(self) -> None:
        for name in ("link_threshold", "token_weight", "move_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"align.{name} must be in [0, 1], got {value}")
        if self.backend not in ("lexical_hybrid", "embedding_service"):
            raise ConfigError(f"align.backend {self.backend!r} invalid")
        if self.jobs < 1:
            raise ConfigError("align.jobs must be >= 1")


@dataclass
class PredictSection:
    variant: str = "sentence_only"
    bag_dim: int = 2048
    lr: float = 0.5
    epochs: int = 200
    l2: float = 0.0001
    seed: int = 0
    t1: float = 1.0 / 3.0
    t2: float = 2.0 / 3.0

    def validate(self) -> None:
        if self.variant not in ("sentence_only", "direct_context", "full_article"):
            raise ConfigError(f"predict.variant {self.variant!r} invalid")
        if not 0.0 < self.t1 < self.t2 < 1.0:
            raise ConfigError(
                f"predict bins need 0 < t1 < t2 < 1, got ({self.t1}, {self.t2})"
            )
        if self.bag_dim < 1 or self.epochs < 0 or self.lr <= 0 or self.l2 < 0:
            raise ConfigError("predict hyperparameters out of range")


@dataclass
class QASection:
    strict: bool = False
    macro_axis: str = "abstain_answer"

    def validate(self) -> None:
        if self.macro_axis not in ("abstain_answer",):
            raise ConfigError(f"qa.macro_axis {self.macro_axis!r} invalid")


@dataclass
class LLMSection:
    endpoint: str = ""
    model: str = "default"
    embed_endpoint: str = ""
    embed_model: str = ""
    cache_dir: str = "llm-cache"
    max_concurrent: int = 4
    max_retries: int = 3
    backoff_base_ms: int = 250
    timeout_ms: int = 60000
    temperature: float = 0.0
    mock: bool = False

    def validate(self) -> None:
        if self.max_concurrent < 1:
            raise ConfigError("llm.max_concurrent must be >= 1")
        if self.temperature < 0:
            raise ConfigError("llm.temperature must be >= 0")


@dataclass
class RunConfig:
    corpus: CorpusSection = field(default_factory=CorpusSection)
    align: AlignSection = field(default_factory=AlignSection)
    predict: PredictSection = field(default_factory=PredictSection)
    qa: QASection = field(default_factory=QASection)
    llm: LLMSection = field(default_factory=LLMSection)

    def validate(self) -> None:
        for section in (self.corpus, self.align, self.predict, self.qa, self.llm):
            section.validate()

    def to_dict(self) -> dict:
        out = {}
        for section_field in fields(self):
            section = getattr(self, section_field.name)
            out[section_field.name] = {
                f.name: getattr(section, f.name) for f in fields(section)
            }
        return out

    def content_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _coerce(current, raw: str):
    if isinstance(current, bool):
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    return raw


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        cfg.validate()
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    sections = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    for section_name in parser.sections():
        if section_name not in sections:
            raise ConfigError(f"unknown config section [{section_name}]")
        section = sections[section_name]
        known = {f.name for f in fields(section)}
        for key, raw in parser.items(section_name):
            if key not in known:
                raise ConfigError(f"unknown key {key!r} in section [{section_name}]")
            try:
                setattr(section, key, _coerce(getattr(section, key), raw))
            except ValueError as exc:
                raise ConfigError(f"{section_name}.{key}: {exc}") from None
    cfg.validate()
    return cfg
