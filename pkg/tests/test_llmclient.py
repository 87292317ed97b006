import json
import math
import os
import signal
import subprocess
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import pytest

from revlab.llmclient import (
    ChatRequest,
    ClientError,
    LLMClient,
    MockNewsAgent,
    ResponseCache,
    RetryPolicy,
    atomic_write_text,
    mock_client,
)


def _chat_body(text):
    return {"choices": [{"message": {"content": text}}]}


class CountingTransport:
    """Scripted (status, body) sequence with optional concurrency tracking."""

    def __init__(self, script=None, delay=0.0):
        self.script = list(script or [])
        self.calls = 0
        self.delay = delay
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()

    def __call__(self, url, payload, timeout_s, api_key):
        with self._lock:
            self.calls += 1
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
        try:
            if self.delay:
                time.sleep(self.delay)
            if self.script:
                return self.script.pop(0)
            return 200, _chat_body("ok")
        finally:
            with self._lock:
                self.in_flight -= 1


def _req(content="hello", temperature=0.0):
    return ChatRequest(
        endpoint="http://example/chat",
        model="m",
        messages=(("user", content),),
        temperature=temperature,
    )


def test_request_validation():
    with pytest.raises(ValueError):
        ChatRequest(endpoint="e", model="m", messages=())
    with pytest.raises(ValueError):
        ChatRequest(endpoint="e", model="m", messages=(("robot", "x"),))
    with pytest.raises(ValueError):
        ChatRequest(endpoint="e", model="m", messages=(("user", "x"),),
                    temperature=-1)


def test_cache_second_request_no_network(tmp_path):
    transport = CountingTransport()
    client = LLMClient(endpoint="http://example/chat", cache_dir=str(tmp_path),
                       transport=transport)
    assert client.send(_req()) == "ok"
    assert client.send(_req()) == "ok"
    assert transport.calls == 1


def test_retry_two_500s_then_success(tmp_path):
    transport = CountingTransport(
        script=[(500, {}), (500, {}), (200, _chat_body("fine"))]
    )
    client = LLMClient(
        endpoint="http://example/chat",
        cache_dir=str(tmp_path),
        transport=transport,
        policy=RetryPolicy(max_retries=3, backoff_base_ms=1),
    )
    assert client.send(_req()) == "fine"
    assert transport.calls == 3


def test_retry_exhaustion_carries_status_and_attempts():
    transport = CountingTransport(script=[(500, {})] * 10)
    client = LLMClient(
        endpoint="http://example/chat",
        transport=transport,
        policy=RetryPolicy(max_retries=2, backoff_base_ms=1),
    )
    with pytest.raises(ClientError) as err:
        client.send(_req())
    assert err.value.status == 500
    assert err.value.attempts == 3


def test_non_429_4xx_immediate_error():
    transport = CountingTransport(script=[(404, {"error": "nope"})])
    client = LLMClient(
        endpoint="http://example/chat",
        transport=transport,
        policy=RetryPolicy(max_retries=5, backoff_base_ms=1),
    )
    with pytest.raises(ClientError):
        client.send(_req())
    assert transport.calls == 1


def test_429_is_retried():
    transport = CountingTransport(script=[(429, {}), (200, _chat_body("ok"))])
    client = LLMClient(
        endpoint="http://example/chat",
        transport=transport,
        policy=RetryPolicy(max_retries=2, backoff_base_ms=1),
    )
    assert client.send(_req()) == "ok"
    assert transport.calls == 2


def test_temperature_distinct_cache_keys(tmp_path):
    transport = CountingTransport()
    client = LLMClient(endpoint="http://example/chat", cache_dir=str(tmp_path),
                       transport=transport)
    client.send(_req(temperature=0.0))
    client.send(_req(temperature=0.7))
    assert transport.calls == 2
    assert _req(temperature=0.0).cache_key() != _req(temperature=0.7).cache_key()


def test_cache_round_trip_bytes(tmp_path):
    cache = ResponseCache(str(tmp_path))
    key = "ab" * 32
    cache.put(key, {"response": "exact ’ text"})
    assert cache.get(key)["response"] == "exact ’ text"


def test_concurrency_bound():
    transport = CountingTransport(delay=0.02)
    client = LLMClient(
        endpoint="http://example/chat",
        transport=transport,
        policy=RetryPolicy(max_concurrent=3, backoff_base_ms=1),
    )
    with ThreadPoolExecutor(max_workers=10) as pool:
        futures = [pool.submit(client.send, _req(f"q{k}")) for k in range(20)]
        for future in futures:
            future.result()
    assert transport.max_in_flight <= 3


def test_embed_normalized_and_cached(tmp_path):
    calls = {"n": 0}

    def transport(url, payload, timeout_s, api_key):
        calls["n"] += 1
        return 200, {"data": [{"embedding": [3.0, 4.0]} for _ in payload["input"]]}

    client = LLMClient(endpoint="http://example/embed", cache_dir=str(tmp_path),
                       transport=transport)
    first = client.embed(["alpha"])[0]
    second = client.embed(["alpha"])[0]
    assert calls["n"] == 1
    assert first == second
    assert math.isclose(math.hypot(*first), 1.0, abs_tol=1e-6)
    cos = sum(a * b for a, b in zip(first, second))
    assert math.isclose(cos, 1.0, abs_tol=1e-6)


def test_embed_count_mismatch_raises():
    def transport(url, payload, timeout_s, api_key):
        return 200, {"data": []}

    client = LLMClient(endpoint="http://example/embed", transport=transport)
    with pytest.raises(ClientError):
        client.embed(["a", "b"])


def test_no_endpoint_no_cache_raises():
    client = LLMClient(endpoint="", transport=CountingTransport())
    with pytest.raises(ClientError):
        client.send(ChatRequest(endpoint="", model="m",
                                messages=(("user", "x"),)))


def test_atomic_write_replaces_not_appends(tmp_path):
    path = tmp_path / "f.json"
    atomic_write_text(str(path), "one")
    atomic_write_text(str(path), "two")
    assert path.read_text() == "two"
    leftovers = [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
    assert leftovers == []


_KILL_SCRIPT = """
import sys
from revlab.llmclient import ResponseCache
cache = ResponseCache(sys.argv[1])
k = 0
while True:
    key = ("%064x" % k)
    cache.put(key, {"response": "x" * 4096, "k": k})
    k += 1
"""


def test_no_torn_cache_files_after_kill(tmp_path):
    proc = subprocess.Popen(
        [sys.executable, "-c", _KILL_SCRIPT, str(tmp_path)],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    time.sleep(1.0)
    proc.send_signal(signal.SIGKILL)
    proc.wait()
    seen = 0
    for root, _, files in os.walk(tmp_path):
        for name in files:
            if name.startswith(".tmp-"):
                continue  # orphaned temp is fine; visible entries must parse
            with open(os.path.join(root, name), encoding="utf-8") as fh:
                obj = json.load(fh)
            assert obj["response"] == "x" * 4096
            seen += 1
    assert seen > 0


def test_mock_agent_shapes():
    client = mock_client()
    # question generation
    text = client.complete(
        "Here is a sentence: Crews cleared 12 blocks on Friday.\n"
        "Ask 5 different questions, output in a list. Don't say anything else."
    )
    lines = [l for l in text.splitlines() if l.strip()]
    assert len(lines) == 5
    # answering without a warning never abstains
    answer = client.complete(
        "Is the road still closed right now?",
        system="You are a helpful assistant who answers questions based on "
               "this news information:\nThe road is closed.\n\nTry to directly "
               "answer the users question and say nothing else.",
    )
    assert "up-to-date" not in answer


def test_mock_agent_fact_conflict_rule():
    agent = MockNewsAgent()
    assert agent._fact_conflict("injuring 10 people", "injuring 12 people")
    assert not agent._fact_conflict("Crews said so.", "Crews stated so.")
    assert agent._fact_conflict('"We are set," she said.', '"We are ready," she said.')
    assert not agent._fact_conflict("Same text.", "Same text.")
