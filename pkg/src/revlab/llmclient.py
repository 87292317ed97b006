"""Chat-completions client with a disk cache, retries, and bounded concurrency.

All model traffic in the pipeline flows through this client so any scored run
replays offline from the cache. The wire shape is the de-facto chat JSON:
request {"model", "messages", "temperature"}, response text read from
choices[0].message.content; embeddings use {"model", "input"} and
data[*].embedding.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")


class ClientError(Exception):
    def __init__(self, message: str, status: int | None = None, attempts: int = 0):
        super().__init__(message)
        self.status = status
        self.attempts = attempts


@dataclass(frozen=True)
class ChatRequest:
    endpoint: str
    model: str
    messages: tuple[tuple[str, str], ...]  # (role, content)
    temperature: float = 0.0

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("a request needs at least one message")
        for role, _ in self.messages:
            if role not in ROLES:
                raise ValueError(f"unknown role {role!r}")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    def payload(self) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
            "temperature": self.temperature,
        }

    def cache_key(self) -> str:
        canon = json.dumps(
            {
                "endpoint": self.endpoint,
                "model": self.model,
                "messages": [[r, c] for r, c in self.messages],
                "temperature": self.temperature,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass
class RetryPolicy:
    max_retries: int = 3
    backoff_base_ms: int = 250
    timeout_ms: int = 60_000
    max_concurrent: int = 4


class TokenBucket:
    """Per-endpoint request rate limiter; rate=None disables it."""

    def __init__(self, rate_per_s: float | None, capacity: float | None = None):
        self.rate = rate_per_s
        self.capacity = capacity if capacity is not None else (rate_per_s or 1.0)
        self.tokens = self.capacity
        self.updated = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        if self.rate is None:
            return
        while True:
            with self._lock:
                now = time.monotonic()
                self.tokens = min(
                    self.capacity, self.tokens + (now - self.updated) * self.rate
                )
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            time.sleep(wait)


def atomic_write_text(path: str, text: str) -> None:
    """write-temp, fsync, rename: readers never observe a torn file."""
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class ResponseCache:
    """One file per key under a two-level hash-prefix directory."""

    def __init__(self, cache_dir: str):
        self.cache_dir = cache_dir

    def _path(self, key: str) -> str:
        return os.path.join(self.cache_dir, key[:2], key[2:4], key + ".json")

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        if not os.path.exists(path):
            return None
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        except (json.JSONDecodeError, OSError):
            log.warning("unreadable cache entry %s; treating as a miss", path)
            return None

    def put(self, key: str, entry: dict) -> None:
        atomic_write_text(self._path(key), json.dumps(entry, ensure_ascii=False))


def http_transport(url: str, payload: dict, timeout_s: float, api_key: str | None):
    import requests

    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    resp = requests.post(url, json=payload, headers=headers, timeout=timeout_s)
    try:
        body = resp.json()
    except ValueError:
        body = {"error": resp.text}
    return resp.status_code, body


class LLMClient:
    """Cache-first chat and embedding calls with retry/backoff and a
    concurrency bound shared across worker threads."""

    def __init__(
        self,
        endpoint: str | None = None,
        model: str = "default",
        api_key: str | None = None,
        cache_dir: str | None = None,
        policy: RetryPolicy | None = None,
        transport=None,
        embed_endpoint: str | None = None,
        embed_model: str | None = None,
        rate_per_s: float | None = None,
        temperature: float = 0.0,
    ):
        self.endpoint = endpoint or os.environ.get("REVLAB_LLM_ENDPOINT", "")
        self.model = model
        self.api_key = api_key or os.environ.get("REVLAB_LLM_API_KEY")
        self.policy = policy or RetryPolicy()
        self.cache = ResponseCache(cache_dir) if cache_dir else None
        self.transport = transport or http_transport
        self.embed_endpoint = embed_endpoint or self.endpoint
        self.embed_model = embed_model or model
        self.temperature = temperature
        self._sem = threading.BoundedSemaphore(max(1, self.policy.max_concurrent))
        self._bucket = TokenBucket(rate_per_s)

    # -- chat ---------------------------------------------------------------

    def send(self, req: ChatRequest) -> str:
        key = req.cache_key()
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return hit["response"]
        status, body = self._call(req.endpoint, req.payload())
        text = self._extract_chat(body)
        if self.cache is not None:
            self.cache.put(
                key,
                {
                    "response": text,
                    "created_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                    "usage": body.get("usage"),
                },
            )
        return text

    def complete(self, prompt: str, system: str | None = None) -> str:
        messages: list[tuple[str, str]] = []
        if system is not None:
            messages.append(("system", system))
        messages.append(("user", prompt))
        req = ChatRequest(
            endpoint=self.endpoint,
            model=self.model,
            messages=tuple(messages),
            temperature=self.temperature,
        )
        return self.send(req)

    @staticmethod
    def _extract_chat(body: dict) -> str:
        try:
            return body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError):
            raise ClientError(f"malformed chat response: {json.dumps(body)[:200]}")

    # -- embeddings ----------------------------------------------------------

    def embed(self, texts: list[str]) -> list[list[float]]:
        """One L2-normalized vector per text, each cached individually."""
        out: list[list[float] | None] = [None] * len(texts)
        misses: list[int] = []
        keys: list[str] = []
        for idx, text in enumerate(texts):
            key = hashlib.sha256(
                json.dumps(
                    {"endpoint": self.embed_endpoint, "model": self.embed_model,
                     "input": text},
                    sort_keys=True,
                    ensure_ascii=False,
                ).encode("utf-8")
            ).hexdigest()
            keys.append(key)
            if self.cache is not None:
                hit = self.cache.get(key)
                if hit is not None:
                    out[idx] = hit["vector"]
                    continue
            misses.append(idx)
        if misses:
            payload = {
                "model": self.embed_model,
                "input": [texts[i] for i in misses],
            }
            status, body = self._call(self.embed_endpoint, payload)
            try:
                vectors = [row["embedding"] for row in body["data"]]
            except (KeyError, TypeError):
                raise ClientError(
                    f"malformed embedding response: {json.dumps(body)[:200]}"
                )
            if len(vectors) != len(misses):
                raise ClientError(
                    f"embedding count mismatch: sent {len(misses)}, "
                    f"got {len(vectors)}"
                )
            for idx, vec in zip(misses, vectors):
                unit = _l2_normalize(vec)
                out[idx] = unit
                if self.cache is not None:
                    self.cache.put(keys[idx], {"vector": unit})
        return [v for v in out if v is not None]

    # -- transport with retries ----------------------------------------------

    def _call(self, url: str, payload: dict):
        if not url:
            raise ClientError("no endpoint configured and no cache hit")
        attempts = 0
        last_status: int | None = None
        while attempts <= self.policy.max_retries:
            attempts += 1
            self._bucket.acquire()
            with self._sem:
                try:
                    status, body = self.transport(
                        url, payload, self.policy.timeout_ms / 1000.0, self.api_key
                    )
                except ClientError:
                    raise
                except Exception as exc:  # connection-level failure: retryable
                    status, body = -1, {"error": str(exc)}
            if status == 200:
                return status, body
            last_status = status
            if status != -1 and status != 429 and 400 <= status < 500:
                raise ClientError(
                    f"request failed with status {status}: "
                    f"{json.dumps(body)[:200]}",
                    status=status,
                    attempts=attempts,
                )
            if attempts <= self.policy.max_retries:
                delay = self.policy.backoff_base_ms * (2 ** (attempts - 1)) / 1000.0
                time.sleep(delay)
        raise ClientError(
            f"exhausted {attempts} attempts, last status {last_status}",
            status=last_status,
            attempts=attempts,
        )


def _l2_normalize(vec: list[float]) -> list[float]:
    norm = math.sqrt(sum(x * x for x in vec))
    if norm == 0:
        return list(vec)
    return [x / norm for x in vec]


# -- deterministic offline agent ---------------------------------------------

_STALENESS_MARKERS = ("currently", "so far", "right now", "still ", "how many")
_UNIFORM_AGENT_MARKERS = ("currently", "right now", "still ")

ABSTAIN_PHRASE = "I don't have the most up-to-date information"


class MockNewsAgent:
    """Offline stand-in for the chat endpoint, used via the transport hook.

    Behaves like a cooperative model: question generation emits five distinct
    questions whose staleness markers depend on the requested conflict class;
    answering obeys any update warning in the system prompt; evaluation
    compares the two sentences it is shown. Fully deterministic.
    """

    def __init__(self):
        self.calls = 0

    def __call__(self, url: str, payload: dict, timeout_s: float, api_key):
        self.calls += 1
        if "input" in payload:
            return 200, self._embed(payload["input"])
        messages = payload["messages"]
        system = "\n".join(m["content"] for m in messages if m["role"] == "system")
        user = "\n".join(m["content"] for m in messages if m["role"] == "user")
        full = system + "\n" + user
        if "Ask 5 different questions" in full:
            text = self._questions(full)
        elif "Is this question answerable" in full:
            text = self._evaluate(full)
        elif "answers questions based on this news information" in system:
            text = self._answer(system, user)
        else:
            text = "OK."
        return 200, {"choices": [{"message": {"content": text}}]}

    @staticmethod
    def _embed(texts):
        import hashlib as _h

        data = []
        for text in texts:
            digest = _h.sha256(text.encode("utf-8")).digest()
            vec = [b / 255.0 - 0.5 for b in digest[:16]]
            data.append({"embedding": vec})
        return {"data": data}

    @staticmethod
    def _topic(sentence: str) -> str:
        words = [w.strip(".,;:'\"") for w in sentence.split()]
        words = [w for w in words if len(w) > 3]
        return words[0].lower() if words else "it"

    def _questions(self, full: str) -> str:
        lines = [l for l in full.splitlines() if l.strip()]
        sentence = ""
        for line in lines:
            for prefix in ("Here is a sentence:", "Here is the old sentence:"):
                if line.startswith(prefix):
                    sentence = line[len(prefix):].strip()
        topic = self._topic(sentence)
        if "Here is the old sentence:" in full:  # likely-conflict template
            qs = [
                f"How many {topic} have been reported so far?",
                f"What is currently known about the {topic}?",
                f"Is the {topic} situation still unfolding right now?",
                f"How many people are affected so far by the {topic}?",
                f"What is the latest count related to the {topic} right now?",
            ]
        elif "could go stale" in full:  # maybe-conflict template
            qs = [
                f"Is the {topic} still the case right now?",
                f"How many are involved in the {topic} so far?",
                f"What is currently happening with the {topic}?",
                f"Could the {topic} figures still change?",
                f"Is the {topic} currently ongoing?",
            ]
        else:  # no-conflict template
            qs = [
                f"What does the sentence say about the {topic}?",
                f"Who was mentioned in connection with the {topic}?",
                f"Where did the {topic} take place?",
                f"What kind of event does the sentence describe about the {topic}?",
                f"When was the {topic} first described?",
            ]
        return "\n".join(f"{k + 1}. {q}" for k, q in enumerate(qs))

    @staticmethod
    def _has_marker(question: str, markers) -> bool:
        low = question.lower()
        return any(m in low for m in markers)

    def _answer(self, system: str, question: str) -> str:
        if "DOES NOT have a major fact update" in system:
            return "Based on the provided information, the answer is as stated."
        if "DOES have a major fact update" in system:
            if self._has_marker(question, _STALENESS_MARKERS):
                return ABSTAIN_PHRASE
            return "Based on the provided information, the answer is as stated."
        if "chance of there being a fact update" in system:
            high = "a HIGH chance" in system
            if high and self._has_marker(question, _STALENESS_MARKERS):
                return ABSTAIN_PHRASE
            return "Based on the provided information, the answer is as stated."
        if "might go out of date" in system:
            if self._has_marker(question, _UNIFORM_AGENT_MARKERS):
                return ABSTAIN_PHRASE
            return "Based on the provided information, the answer is as stated."
        return "The answer is exactly what the sentence states."

    def _evaluate(self, full: str) -> str:
        old = new = question = ""
        for line in full.splitlines():
            if line.startswith("Old sentence:"):
                old = line[len("Old sentence:"):].strip()
            elif line.startswith("Revised sentence:"):
                new = line[len("Revised sentence:"):].strip()
            elif line.startswith("Question:"):
                question = line[len("Question:"):].strip()
        if self._fact_conflict(old, new) and self._has_marker(
            question, _STALENESS_MARKERS
        ):
            return "yes\nno"
        return "yes\nyes"

    @staticmethod
    def _fact_conflict(old: str, new: str) -> bool:
        """Facts changed: numerals differ, or a quote-bearing rewrite."""
        from revlab.align import norm_lexical

        nums_old = sorted(re.findall(r"\d[\d,.]*", old))
        nums_new = sorted(re.findall(r"\d[\d,.]*", new))
        if nums_old != nums_new:
            return True
        quoted = bool(re.search(r"[\"“”]", old + new))
        return quoted and norm_lexical(old) != norm_lexical(new)


def mock_client(cache_dir: str | None = None) -> LLMClient:
    """Client wired to the deterministic offline agent."""
    return LLMClient(
        endpoint="mock://agent",
        model="mock-news-agent",
        cache_dir=cache_dir,
        transport=MockNewsAgent(),
        policy=RetryPolicy(max_retries=1, backoff_base_ms=1),
    )
