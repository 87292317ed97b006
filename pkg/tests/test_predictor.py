import datetime as dt
import math
import random

import numpy as np
import pytest

from revlab.align import Alignment
from revlab.features import CueVector
from revlab.predictor import (
    DENSE_DIM,
    CueModel,
    LikelihoodBins,
    PredictionExample,
    PredictorError,
    balance,
    build_examples,
    chrono_split,
    design_matrix,
    evaluate,
    featurize,
    loss_and_grad,
    sample_high_update,
    train,
)


def _ts(day, hour=6):
    return dt.datetime(2020, 5, day, hour, tzinfo=dt.timezone.utc)


def _example(article_id="a", sentence_idx=0, gold=False, day=1, cue=None,
             context="crews cleared the road", version=0):
    return PredictionExample(
        article_id=article_id,
        version=version,
        sentence_idx=sentence_idx,
        sentence=context,
        context_variant="sentence_only",
        context=context,
        gold=gold,
        cue=cue or CueVector(),
        timestamp=_ts(day),
    )


def _alignment(additions, deletions, links, aid="a", old=0, new=1):
    return Alignment(
        aid, old, new,
        links=[(i, i, 1.0) for i in range(links)],
        additions=list(range(1000, 1000 + additions)),
        deletions=list(range(2000, 2000 + deletions)),
    )


def test_filter_keeps_strict_pass():
    # m=20 with 3 additions (15%), n=20 with 2 deletions (10%)
    alignment = _alignment(additions=3, deletions=2, links=17)
    kept = sample_high_update([(alignment, 19, 20)])
    assert kept == [alignment]


def test_filter_excludes_exact_ten_percent():
    # exactly 10% added fails the strict > comparison
    alignment = _alignment(additions=2, deletions=2, links=18)
    kept = sample_high_update([(alignment, 20, 20)])
    assert kept == []


def test_filter_excludes_exact_five_percent_deletions():
    alignment = _alignment(additions=5, deletions=1, links=15)
    kept = sample_high_update([(alignment, 20, 20)])
    assert kept == []


def test_filter_matches_plan_derived_expectation():
    """Planted add/delete fractions, including exact-threshold cases."""
    from revlab.synth import AddSentence, DeleteSentence, EditPlan, make_pair

    # (adds, dels) on a 20-sentence base; m = 20 - dels + adds.
    cases = {
        (3, 2): True,   # 3/21 = 14.3% > 10%; 2/20 = 10% > 5%
        (2, 2): False,  # 2/20 = 10% exactly: strict > fails
        (3, 1): False,  # 1/20 = 5% exactly: strict > fails
        (4, 3): True,   # 4/21 = 19%; 3/20 = 15%
        (0, 4): False,  # no additions
        (5, 0): False,  # no deletions
    }
    triples = []
    expected = set()
    for k, ((adds, dels), keep) in enumerate(sorted(cases.items())):
        ops = [DeleteSentence(0) for _ in range(dels)]
        ops += [AddSentence(0, "statistic") for _ in range(adds)]
        plan = EditPlan(seed=900 + k, n_sentences=20, ops=ops)
        pair, alignment, _ = make_pair(plan, article_id=f"planted-{k}")
        n = len(pair.old.ensure_sentences())
        m = len(pair.new.ensure_sentences())
        assert (n, m) == (20, 20 - dels + adds)
        assert len(alignment.additions) == adds
        assert len(alignment.deletions) == dels
        triples.append((alignment, n, m))
        if keep:
            expected.add(alignment.article_id)
    kept = sample_high_update(triples)
    assert {a.article_id for a in kept} == expected
    assert expected  # the fixture does keep something


def _gold_setup(tmp_path):
    from revlab.corpus import MemoryCorpus
    from revlab.synth import make_corpus

    out = tmp_path / "synth"
    pairs, alignments, records = make_corpus(
        8, seed=21, difficulty="hard", out_dir=str(out)
    )
    store = MemoryCorpus.from_jsonl(str(out / "corpus.jsonl"))
    return store, alignments, records


def test_build_examples_gold_from_fact_labels(tmp_path):
    from revlab.taxonomy import CoarseIntention

    store, alignments, records = _gold_setup(tmp_path)
    examples = build_examples(store, alignments, records)
    # Independent recount of positive keys straight from the label file rows.
    positive_keys = {
        (r.article_id, r.old_version, r.old_idx)
        for r in records
        if r.old_idx is not None
        and any(
            CoarseIntention.FACT is c for c in r.labels.coarse_set()
        )
    }
    got_positive = {
        (e.article_id, e.version, e.sentence_idx) for e in examples if e.gold
    }
    assert got_positive == positive_keys
    assert len(examples) == sum(
        len(store.get(a.article_id, a.old_version).ensure_sentences())
        for a in alignments
    )


def test_build_examples_variants(tmp_path):
    store, alignments, records = _gold_setup(tmp_path)
    sent = build_examples(store, alignments, records, variant="sentence_only")
    direct = build_examples(store, alignments, records, variant="direct_context")
    full = build_examples(store, alignments, records, variant="full_article")
    k = 1  # an interior sentence
    assert sent[k].context == sent[k].sentence
    assert sent[k].sentence in direct[k].context
    assert len(direct[k].context) >= len(sent[k].context)
    doc = store.get(sent[k].article_id, sent[k].version)
    assert full[k].context == doc.text
    # document edges omit absent neighbors
    first = [e for e in direct if e.sentence_idx == 0][0]
    assert first.context.startswith(first.sentence.split()[0])


def test_chrono_split_eight_two():
    examples = [_example(article_id=f"a{k}", day=k + 1) for k in range(10)]
    train_set, dev_set = chrono_split(examples)
    assert len(train_set) == 8 and len(dev_set) == 2
    assert max(e.timestamp for e in train_set) <= min(e.timestamp for e in dev_set)


def test_chrono_split_tie_broken_by_article_id():
    examples = [_example(article_id=f"a{k}", day=1) for k in range(10)]
    train_set, dev_set = chrono_split(examples)
    assert [e.article_id for e in train_set] == [f"a{k}" for k in range(8)]


def test_chrono_split_article_atomicity():
    examples = []
    for k in range(4):
        for idx in range(3):
            examples.append(
                _example(article_id=f"a{k}", sentence_idx=idx, day=k + 1)
            )
    train_set, dev_set = chrono_split(examples)  # cut at 9.6 -> 9, mid a3
    train_articles = {e.article_id for e in train_set}
    dev_articles = {e.article_id for e in dev_set}
    assert not (train_articles & dev_articles)
    assert len(train_set) <= int(0.8 * len(examples))


def test_balance_downsamples_majority():
    examples = [_example(gold=True, sentence_idx=k) for k in range(4)]
    examples += [_example(gold=False, sentence_idx=10 + k) for k in range(2)]
    out = balance(examples, seed=3)
    assert sum(e.gold for e in out) == 2
    assert sum(not e.gold for e in out) == 2


def test_balance_identity_when_balanced():
    examples = [_example(gold=True, sentence_idx=0),
                _example(gold=False, sentence_idx=1)]
    out = balance(examples, seed=99)
    assert {id(e) for e in out} == {id(e) for e in examples}


def test_balance_deterministic():
    examples = [_example(gold=True, sentence_idx=k) for k in range(10)]
    examples += [_example(gold=False, sentence_idx=100 + k) for k in range(4)]
    a = balance(examples, seed=7)
    b = balance(examples, seed=7)
    assert [e.sentence_idx for e in a] == [e.sentence_idx for e in b]


def test_balance_requires_both_classes():
    with pytest.raises(PredictorError):
        balance([_example(gold=True)], seed=0)


def _separable_fixture():
    examples = []
    for k in range(10):
        examples.append(
            _example(
                gold=True,
                sentence_idx=k,
                cue=CueVector(statistic=True, recent_event=True, numeral_count=2),
                context=f"officials said {30 + k} rockets were fired on friday",
            )
        )
        examples.append(
            _example(
                gold=False,
                sentence_idx=100 + k,
                cue=CueVector(description=True, opinion_analysis=True),
                context="the reservoir supplies drinking water to the suburbs",
            )
        )
    return examples


def test_train_separable_reaches_accuracy_one():
    examples = _separable_fixture()
    model, history = train(examples, lr=0.5, epochs=200, l2=0.0, bag_dim=64)
    accuracy = np.mean(
        [(model.predict_proba(e) >= 0.5) == e.gold for e in examples]
    )
    assert accuracy == 1.0


def test_train_zero_epochs_gives_half_probability():
    examples = _separable_fixture()
    model, _ = train(examples, epochs=0, bag_dim=32)
    for example in examples[:4]:
        assert model.predict_proba(example) == pytest.approx(0.5)


def test_train_loss_monotone_non_increasing():
    examples = _separable_fixture()
    _, history = train(examples, lr=0.5, epochs=50, l2=1e-4, bag_dim=64)
    for before, after in zip(history.losses, history.losses[1:]):
        assert after <= before + 1e-6


def test_train_deterministic():
    examples = _separable_fixture()
    m1, _ = train(examples, seed=4, bag_dim=64)
    m2, _ = train(examples, seed=4, bag_dim=64)
    assert np.array_equal(m1.weights, m2.weights)
    assert m1.bias == m2.bias


def test_gradient_check_central_differences():
    rng = random.Random(12)
    npr = np.random.RandomState(12)
    examples = _separable_fixture()
    X, y = design_matrix(examples, 32)
    h = 1e-5
    for draw in range(5):
        w = npr.randn(X.shape[1]) * 0.3
        b = float(npr.randn())
        l2 = 0.01
        _, grad_w, grad_b = loss_and_grad(w, b, X, y, l2)
        for _ in range(5):
            k = rng.randrange(X.shape[1])
            wp = w.copy(); wp[k] += h
            wm = w.copy(); wm[k] -= h
            lp, _, _ = loss_and_grad(wp, b, X, y, l2)
            lm, _, _ = loss_and_grad(wm, b, X, y, l2)
            fd = (lp - lm) / (2 * h)
            assert abs(fd - grad_w[k]) < 1e-6
        lp, _, _ = loss_and_grad(w, b + h, X, y, l2)
        lm, _, _ = loss_and_grad(w, b - h, X, y, l2)
        assert abs((lp - lm) / (2 * h) - grad_b) < 1e-6


def test_bins():
    bins = LikelihoodBins()
    assert bins.bin(0.5) == "Medium"
    assert bins.bin(0.9) == "High"
    assert bins.bin(0.1) == "Low"
    assert bins.bin(1.0 / 3.0) == "Medium"  # left-closed boundary
    assert bins.bin(2.0 / 3.0) == "High"


def test_bins_monotone_step():
    bins = LikelihoodBins()
    order = {"Low": 0, "Medium": 1, "High": 2}
    prev = 0
    for p in np.linspace(0.001, 0.999, 97):
        level = order[bins.bin(float(p))]
        assert level >= prev
        prev = level


def test_bins_validation():
    with pytest.raises(PredictorError):
        LikelihoodBins(0.7, 0.3)


def test_evaluate_perfect():
    examples = _separable_fixture()
    model, _ = train(examples, bag_dim=64)
    report = evaluate(model, examples)
    assert report["fact_f1"] == 100.0
    assert report["not_fact_f1"] == 100.0
    assert report["macro_f1"] == 100.0
    assert report["micro_f1"] == 100.0


def test_evaluate_all_negative_on_balanced_set():
    examples = _separable_fixture()  # 10 pos, 10 neg
    model = CueModel.zeros(bag_dim=16)
    model.bias = -5.0  # predicts negative everywhere
    report = evaluate(model, examples)
    assert report["fact_f1"] == 0.0
    assert report["micro_f1"] == 50.0


def test_evaluate_confusion_fixture():
    # TP=2 FP=1 FN=2 TN=5 -> Fact F1 = 2*2/(2*2+1+2) = 4/7
    class Fixed:
        def __init__(self, p):
            self.p = p

        def predict_proba(self, e):
            return self.p[e.sentence_idx]

    examples = []
    probs = {}
    idx = 0
    for gold, pred, count in ((True, True, 2), (False, True, 1),
                              (True, False, 2), (False, False, 5)):
        for _ in range(count):
            examples.append(_example(gold=gold, sentence_idx=idx))
            probs[idx] = 0.9 if pred else 0.1
            idx += 1
    report = evaluate(Fixed(probs), examples)
    assert report["fact_f1"] == pytest.approx(400.0 / 7.0)
    assert report["fact_f1"] == pytest.approx(57.142857, abs=1e-4)
    assert report["confusion"] == {"tp": 2, "fp": 1, "fn": 2, "tn": 5}


def test_scaling_invariance():
    examples = _separable_fixture()
    X, _ = design_matrix(examples, 32)
    npr = np.random.RandomState(0)
    w = npr.randn(X.shape[1])
    b = 0.37
    c = 3.7
    for row in X[:8]:
        z1 = float(w @ row + b)
        z2 = float((w / c) @ (row * c) + b)
        assert abs(z1 - z2) < 1e-9


def test_model_save_load_round_trip(tmp_path):
    examples = _separable_fixture()
    model, _ = train(examples, bag_dim=64)
    path = tmp_path / "model.json"
    model.save(str(path))
    again = CueModel.load(str(path))
    assert np.array_equal(model.weights, again.weights)
    assert model.bias == again.bias
    assert model.bag_dim == again.bag_dim
    for example in examples[:4]:
        assert model.predict_proba(example) == again.predict_proba(example)


def test_featurize_dense_layout():
    cue = CueVector(statistic=True, numeral_count=3)
    x = featurize(_example(cue=cue, context="a b a"), 8)
    assert x.shape == (DENSE_DIM + 8,)
    assert x[2] == 1.0  # statistic slot
    assert x[DENSE_DIM - 1] == 3.0  # numeral_count slot
    assert x[DENSE_DIM:].sum() == 3.0  # bag counts
