import datetime as dt

import pytest

from revlab.corpus import ArticleVersion, RevisionPair


def make_version(article_id, version, text, hour=0, outlet="Test Wire"):
    doc = ArticleVersion(
        article_id=article_id,
        version=version,
        outlet=outlet,
        timestamp=dt.datetime(2020, 5, 1, 6 + hour, tzinfo=dt.timezone.utc),
        text=text,
    )
    doc.ensure_sentences()
    return doc


def make_pair_from_texts(old_sentences, new_sentences, article_id="a1"):
    old = make_version(article_id, 0, " ".join(old_sentences), hour=0)
    new = make_version(article_id, 1, " ".join(new_sentences), hour=2)
    return RevisionPair(article_id, old, new)


class StubClient:
    """Scripted chat client: returns queued responses in order."""

    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def complete(self, prompt, system=None):
        self.calls.append((system, prompt))
        if not self.responses:
            raise RuntimeError("stub exhausted")
        response = self.responses.pop(0)
        if isinstance(response, Exception):
            raise response
        return response


@pytest.fixture
def stub_client():
    return StubClient
