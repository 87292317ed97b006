import pytest

from revlab.segment import (
    SegmenterConfig,
    default_abbreviations,
    load_abbreviations,
    normalize_ws,
    segment,
)


def test_two_plain_sentences():
    sents = segment("The quake hit. Rescue is ongoing.")
    assert [s.text for s in sents] == ["The quake hit.", "Rescue is ongoing."]


def test_dateline_not_split():
    text = (
        "WASHINGTON (AP) -- The White House is on lockdown after a passenger "
        "vehicle struck a security barrier."
    )
    assert len(segment(text)) == 1


def test_mr_abbreviation_not_split():
    text = (
        "Mr. Causey, who reported his concern to authorities, was not charged "
        "in the indictment."
    )
    assert len(segment(text)) == 1


def test_multiple_abbreviations():
    text = (
        "Sen. Alma Whitfield of the U.S. delegation met Dr. Granger on Monday. "
        "The talks resumed Tuesday."
    )
    sents = segment(text)
    assert len(sents) == 2
    assert sents[0].text.startswith("Sen. Alma")


def test_single_initial_not_split():
    text = "Judge A. Kendrick issued the order. Appeals are expected."
    assert len(segment(text)) == 2


def test_closing_quote_stays_with_sentence():
    text = '"We are ready," she said. "The storm passed." Crews left at dawn.'
    sents = segment(text)
    assert len(sents) == 3
    assert sents[1].text == '"The storm passed."'


def test_no_terminal_punctuation_single_sentence():
    sents = segment("a headline without any terminal punctuation")
    assert len(sents) == 1


def test_empty_text_raises():
    with pytest.raises(ValueError):
        segment("   ")


def test_decimal_not_split():
    sents = segment("The quake measured 6.2 on the scale. Damage was light.")
    assert len(sents) == 2


def test_lossless_cover():
    text = (
        "RIVERTON (AP) -- Flood water closed the highway on Friday.  Crews "
        'worked overnight. "We will reopen it," Mr. Draper said.'
    )
    sents = segment(text)
    covered = set()
    for s in sents:
        covered.update(range(*s.span))
    missing = [
        k for k, ch in enumerate(text) if not ch.isspace() and k not in covered
    ]
    assert missing == []
    joined = " ".join(s.text for s in sents)
    assert normalize_ws(joined) == normalize_ws(text)


def test_spans_monotone_and_text_normalized():
    text = "One crew stayed.   Another   crew left. A third arrived."
    sents = segment(text)
    for a, b in zip(sents, sents[1:]):
        assert a.span[1] <= b.span[0]
    for s in sents:
        assert s.text == normalize_ws(text[s.span[0] : s.span[1]])


def test_deterministic():
    text = "The bridge closed. Repairs begin Monday. Traffic is heavy."
    assert segment(text) == segment(text)


def test_stub_suppression():
    cfg = SegmenterConfig(min_sentence_chars=4)
    sents = segment("5. Rescue teams arrived quickly. They left at dusk.", cfg)
    assert all(len(s.text) >= 4 for s in sents)


def test_trailing_stub_merges_backward():
    cfg = SegmenterConfig(min_sentence_chars=4)
    sents = segment("Rescue teams arrived quickly. Ok.", cfg)
    assert len(sents) == 1


def test_min_sentence_chars_validation():
    with pytest.raises(ValueError):
        SegmenterConfig(min_sentence_chars=0)


def test_lexicon_entries_must_end_with_period(tmp_path):
    path = tmp_path / "abbrev.txt"
    path.write_text("Mr.\nbroken\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_abbreviations(path)


def test_custom_lexicon(tmp_path):
    path = tmp_path / "abbrev.txt"
    path.write_text("# custom\nXyz.\n", encoding="utf-8")
    lex = load_abbreviations(path)
    cfg = SegmenterConfig(abbreviation_lexicon=lex)
    text = "The Xyz. Commission met on Monday. It adjourned at noon."
    assert len(segment(text, cfg)) == 2
    default_cfg = SegmenterConfig()
    assert len(segment(text, default_cfg)) == 3


def test_default_lexicon_size():
    lex = default_abbreviations()
    assert len(lex) >= 50
    assert "Mr." in lex and "U.S." in lex and "Sen." in lex


def test_synth_templates_segment_to_one_sentence():
    from revlab.synth import TEMPLATES, _fill
    import random

    rng = random.Random(99)
    for _, template in TEMPLATES:
        for _ in range(3):
            text = _fill(template, rng)
            assert len(segment(text)) == 1, text
