"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with `pytest tests/test_acceptance.py -v -s`."""

import itertools
import json
import math
import os
import random
import signal
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name}")


def _corpus_f1(n_pairs, seed, difficulty):
    from revlab.align import SimilarityConfig, align_pair
    from revlab.synth import make_corpus

    pairs, golds, _ = make_corpus(n_pairs, seed=seed, difficulty=difficulty)
    cfg = SimilarityConfig()
    tp = fp = fn = 0
    for pair, gold in zip(pairs, golds):
        pair.old.ensure_sentences()
        pair.new.ensure_sentences()
        predicted = align_pair(pair, cfg)
        p = predicted.link_pairs()
        g = gold.link_pairs()
        tp += len(p & g)
        fp += len(p - g)
        fn += len(g - p)
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2 * precision * recall / (precision + recall)


def test_alignment_recovery():
    with criterion("alignment recovery: easy>=0.95, hard>=0.85, <30s"):
        start = time.monotonic()
        easy = _corpus_f1(200, seed=101, difficulty="easy")
        hard = _corpus_f1(200, seed=101, difficulty="hard")
        elapsed = time.monotonic() - start
        assert easy >= 0.95, f"easy F1 {easy:.4f} < 0.95"
        assert hard >= 0.85, f"hard F1 {hard:.4f} < 0.85"
        assert elapsed < 30.0, f"took {elapsed:.1f}s"


def _brute_force_max_weight(mat, threshold):
    n, m = mat.shape
    best_total = 0.0
    best_links = frozenset()
    for r in range(0, min(n, m) + 1):
        for rows in itertools.combinations(range(n), r):
            for cols in itertools.permutations(range(m), r):
                links = frozenset(
                    (i, j) for i, j in zip(rows, cols) if mat[i, j] >= threshold
                )
                total = sum(mat[i, j] for i, j in links)
                if total > best_total + 1e-12:
                    best_total = total
                    best_links = links
    return best_total, best_links


def test_exact_assignment_parity():
    from revlab.align import SimilarityConfig, align_pair, lexical_matrix
    from revlab.synth import EditPlan, RewriteSentence, AddSentence, \
        DeleteSentence, make_pair, applicable_perturbations

    with criterion("greedy within 2% of brute force; >=90% identical links"):
        cfg = SimilarityConfig()
        rng = random.Random(2024)
        identical = 0
        total_pairs = 0
        for k in range(100):
            n = rng.randint(4, 6)
            ops = []
            if rng.random() < 0.7:
                ops.append(DeleteSentence(rng.randrange(n)))
            ops.append(AddSentence(rng.randint(0, n - len(ops)), "statistic"))
            plan = EditPlan(seed=3000 + k, n_sentences=n, ops=ops)
            pair, _, _ = make_pair(plan)
            old = [s.text for s in pair.old.ensure_sentences()]
            new = [s.text for s in pair.new.ensure_sentences()]
            # rewrite one sentence lexically to create off-diagonal structure
            assert len(old) <= 8 and len(new) <= 8
            mat = lexical_matrix(old, new, cfg.token_weight)
            best_total, best_links = _brute_force_max_weight(
                mat, cfg.link_threshold
            )
            greedy = align_pair(pair, cfg, matcher="greedy")
            greedy_total = sum(score for _, _, score in greedy.links)
            if best_total > 0:
                assert greedy_total >= 0.98 * best_total, (
                    f"pair {k}: greedy {greedy_total:.4f} vs "
                    f"optimal {best_total:.4f}"
                )
            if greedy.link_pairs() == best_links:
                identical += 1
            total_pairs += 1
        assert total_pairs == 100
        assert identical >= 90, f"identical link sets in only {identical}/100"


def test_taxonomy_integrity():
    from revlab.taxonomy import (
        CoarseIntention,
        FineIntention,
        LabelSet,
        fine_labels,
        parse_labels,
        serialize_labels,
    )

    with criterion("taxonomy 7/7/3/3 of 20; round-trip; 1000 fuzz no crash"):
        assert len(list(FineIntention)) == 20
        sizes = [len(fine_labels(c)) for c in CoarseIntention]
        assert sizes == [7, 7, 3, 3]
        for label in FineIntention:
            parsed, warnings = parse_labels(serialize_labels(LabelSet([label])))
            assert parsed.labels == [label] and not warnings
        rng = random.Random(77)
        alphabet = (
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ |/()-.,"
        )
        for _ in range(1000):
            junk = "".join(
                rng.choice(alphabet) for _ in range(rng.randrange(0, 100))
            )
            parsed, _ = parse_labels(junk)
            assert all(isinstance(l, FineIntention) for l in parsed.labels)


def test_metric_oracles():
    from revlab.metrics import cohens_kappa, multilabel_f1
    from revlab.taxonomy import FineIntention, LabelSet

    with criterion("multilabel F1 and kappa match hand fixtures to 1e-9"):
        Q, T = FineIntention.QUOTE, FineIntention.TONAL_EDITS
        report = multilabel_f1([LabelSet([Q, T])], [LabelSet([Q])])
        assert abs(report.micro - 200.0 / 3.0) < 1e-9
        assert cohens_kappa(list("AABB"), list("AABB")) == 1.0
        assert abs(cohens_kappa(list("AABB"), list("ABAB")) - 0.0) < 1e-12
        assert abs(cohens_kappa(list("AAAB"), list("AABB")) - 0.5) < 1e-12


def test_filter_exactness():
    from revlab.predictor import sample_high_update
    from revlab.synth import AddSentence, DeleteSentence, EditPlan, make_pair

    with criterion("strict >10%/>5% filter equals plan-derived kept-set"):
        cases = {(3, 2): True, (2, 2): False, (3, 1): False, (4, 3): True,
                 (0, 4): False, (5, 0): False, (21, 2): True, (1, 10): False}
        triples = []
        expected = set()
        for k, ((adds, dels), keep) in enumerate(sorted(cases.items())):
            ops = [DeleteSentence(0) for _ in range(dels)]
            ops += [AddSentence(0, "statistic") for _ in range(adds)]
            plan = EditPlan(seed=4000 + k, n_sentences=20, ops=ops)
            pair, alignment, _ = make_pair(plan, article_id=f"planted-{k}")
            n = len(pair.old.ensure_sentences())
            m = len(pair.new.ensure_sentences())
            triples.append((alignment, n, m))
            if keep:
                expected.add(alignment.article_id)
        kept = {a.article_id for a in sample_high_update(triples)}
        assert kept == expected


def test_gradient_check_and_separable_fixture():
    from revlab.features import CueVector
    from revlab.predictor import (
        PredictionExample,
        design_matrix,
        loss_and_grad,
        train,
    )
    import datetime as dt

    def example(gold, idx, cue, context):
        return PredictionExample(
            article_id="a", version=0, sentence_idx=idx, sentence=context,
            context_variant="sentence_only", context=context, gold=gold,
            cue=cue, timestamp=dt.datetime(2020, 5, 1, tzinfo=dt.timezone.utc),
        )

    with criterion("gradient check <1e-6 over 20 draws; separable acc 1.0"):
        examples = []
        for k in range(10):
            examples.append(example(
                True, k,
                CueVector(statistic=True, recent_event=True, numeral_count=2),
                f"officials said {30 + k} rockets were fired on friday",
            ))
            examples.append(example(
                False, 100 + k,
                CueVector(description=True, opinion_analysis=True),
                "the reservoir supplies drinking water to the suburbs",
            ))
        X, y = design_matrix(examples, 32)
        rng = random.Random(5)
        npr = np.random.RandomState(5)
        h = 1e-5
        worst = 0.0
        for _ in range(20):
            w = npr.randn(X.shape[1]) * 0.5
            b = float(npr.randn())
            rows = sorted(rng.sample(range(len(y)), rng.randint(4, len(y))))
            Xb, yb = X[rows], y[rows]
            l2 = rng.choice([0.0, 0.01, 0.1])
            _, grad_w, grad_b = loss_and_grad(w, b, Xb, yb, l2)
            for _ in range(5):
                k = rng.randrange(X.shape[1])
                wp = w.copy(); wp[k] += h
                wm = w.copy(); wm[k] -= h
                lp, _, _ = loss_and_grad(wp, b, Xb, yb, l2)
                lm, _, _ = loss_and_grad(wm, b, Xb, yb, l2)
                worst = max(worst, abs((lp - lm) / (2 * h) - grad_w[k]))
            lp, _, _ = loss_and_grad(w, b + h, Xb, yb, l2)
            lm, _, _ = loss_and_grad(w, b - h, Xb, yb, l2)
            worst = max(worst, abs((lp - lm) / (2 * h) - grad_b))
        assert worst < 1e-6, f"worst gradient deviation {worst:.2e}"
        model, _ = train(examples, lr=0.5, epochs=200, l2=0.0, bag_dim=32)
        accuracy = np.mean(
            [(model.predict_proba(e) >= 0.5) == e.gold for e in examples]
        )
        assert accuracy == 1.0


LABEL_PROMPT_SNAPSHOT = (
    "Predict the edit intention from version 1 to version 2.\n"
    "Version 1: Crews searched the rubble.\n"
    "Version 2: Crews combed the rubble.\n"
    "Version 1 Document: The quake hit the north side. "
    "Crews searched the rubble.\n"
    "Version 2 Document: The quake hit the north side. "
    "Crews combed the rubble."
)

NO_WARNING_SNAPSHOT = (
    "You are a helpful assistant who answers questions based on this news "
    "information:\nThe road is closed.\n\n"
    "Try to directly answer the users question and say nothing else."
)

UNIFORM_WARNING_SNAPSHOT = (
    "You are a helpful assistant who answers questions based on this news "
    "information:\nThe road is closed.\n\n"
    "This sentence might go out of date.\n"
    "Answer cautiously and do not give the user wrong/outdated information.\n"
    "If the user's question looks like it will still be relevant even if the "
    "facts change, answer it directly.\n"
    'If the user\'s question looks like it will be outdated, say "I don\'t '
    'have the most up-to-date information" and that\'s it.\n'
    'Say nothing else. Do NOT say "I don\'t have the most up-to-date '
    'information" AND something else.'
)

UPDATE_PREDICTION_SNAPSHOT = (
    "You are a helpful assistant who answers questions based on this news "
    "information:\nThe road is closed.\n\n"
    "We give this a HIGH chance of there being a fact update in this "
    "sentence. That might mean some new information could make some of the "
    "information in this sentence outdated.\n"
    "The user will ask a question. "
    "Answer cautiously and do not give the user wrong/outdated information.\n"
    "If the user's question looks like it will still be relevant even if the "
    "facts change, answer it directly.\n"
    'If the user\'s question looks like it will be outdated, say "I don\'t '
    'have the most up-to-date information" and that\'s it.\n'
    'Say nothing else. Do NOT say "I don\'t have the most up-to-date '
    'information" AND something else.\n\n'
    "Keep our estimate in mind."
)

ORACLE_SNAPSHOT = (
    "You are a helpful assistant who answers questions based on this news "
    "information:\nThe road is closed.\n\n"
    "This sentence DOES NOT have a major fact update. That might mean some "
    "new information, updating information.\n"
    "Answer cautiously and do not give the user wrong/outdated information.\n"
    "If the user's question looks like it will still be relevant even if the "
    "facts change, answer it directly.\n"
    'If the user\'s question looks like it will be outdated, say "I don\'t '
    'have the most up-to-date information" and that\'s it.\n'
    'Say nothing else. Do NOT say "I don\'t have the most up-to-date '
    'information" AND something else.'
)


def test_prompt_snapshots():
    from revlab.labeler import EditRecord, build_label_prompt
    from revlab.align import ActionKind, EditAction
    from revlab.qa import Variant, build_answer_prompt
    from conftest import make_pair_from_texts

    with criterion("prompt templates byte-match frozen snapshots"):
        pair = make_pair_from_texts(
            ["The quake hit the north side.", "Crews searched the rubble."],
            ["The quake hit the north side.", "Crews combed the rubble."],
        )
        rec = EditRecord(
            article_id="a1", old_version=0, new_version=1,
            action=EditAction(ActionKind.EDIT), old_idx=1, new_idx=1,
        )
        assert build_label_prompt(rec, pair.old, pair.new) == \
            LABEL_PROMPT_SNAPSHOT
        sentence = "The road is closed."
        assert build_answer_prompt(Variant.NO_WARNING, sentence) == \
            NO_WARNING_SNAPSHOT
        uniform = build_answer_prompt(Variant.UNIFORM_WARNING, sentence)
        assert uniform == UNIFORM_WARNING_SNAPSHOT
        assert "This sentence might go out of date." in uniform
        pred = build_answer_prompt(Variant.WITH_UPDATE_PREDICTION, sentence,
                                   bin="High")
        assert pred == UPDATE_PREDICTION_SNAPSHOT
        assert "chance of there being a fact update" in pred
        oracle = build_answer_prompt(Variant.ORACLE_UPDATE, sentence,
                                     oracle_flag=False)
        assert oracle == ORACLE_SNAPSHOT
        assert "DOES NOT have a major fact update" in oracle
        oracle_true = build_answer_prompt(Variant.ORACLE_UPDATE, sentence,
                                          oracle_flag=True)
        assert "This sentence DOES have a major fact update." in oracle_true
        label_prompt = build_label_prompt(rec, pair.old, pair.new)
        assert "Predict the edit intention from version 1 to version 2." in \
            label_prompt


def _transcript_bucket(cls, spec):
    """spec: list of (abstained, should_abstain, count)."""
    from revlab.qa import QAItem, Verdicts

    items = []
    for abstained, should, count in spec:
        for _ in range(count):
            verdicts = Verdicts("yes", "no" if should else "yes")
            items.append(QAItem(
                pair_key="p:0:1", old_sentence="o", new_sentence="n",
                question="q", conflict_class=cls, abstained=abstained,
                verdicts=verdicts,
            ))
    return items


def test_abstention_scorer_hand_computation():
    from revlab.qa import ConflictClass, score

    with criterion("60-item transcript matches hand computation to 0.1"):
        items = []
        # no_conflict: tp=3 fn=2 fp=2 tn=13
        items += _transcript_bucket(ConflictClass.NO_CONFLICT, [
            (True, True, 3), (False, True, 2), (True, False, 2),
            (False, False, 13),
        ])
        # maybe_conflict: tp=8 fn=2 fp=1 tn=9
        items += _transcript_bucket(ConflictClass.MAYBE_CONFLICT, [
            (True, True, 8), (False, True, 2), (True, False, 1),
            (False, False, 9),
        ])
        # likely_conflict: tp=15 fn=1 fp=1 tn=3
        items += _transcript_bucket(ConflictClass.LIKELY_CONFLICT, [
            (True, True, 15), (False, True, 1), (True, False, 1),
            (False, False, 3),
        ])
        assert len(items) == 60
        report = score(items)
        no = report.per_class[ConflictClass.NO_CONFLICT]
        assert abs(no.micro_f1 - 80.0) < 0.1
        assert abs(no.macro_f1 - 100.0 * (0.6 + 26.0 / 30.0) / 2) < 0.1
        assert abs(no.abstention_rate - 25.0) < 0.1
        maybe = report.per_class[ConflictClass.MAYBE_CONFLICT]
        assert abs(maybe.micro_f1 - 85.0) < 0.1
        assert abs(maybe.macro_f1 - 100.0 * (16.0 / 19.0 + 18.0 / 21.0) / 2) < 0.1
        assert abs(maybe.abstention_rate - 45.0) < 0.1
        likely = report.per_class[ConflictClass.LIKELY_CONFLICT]
        assert abs(likely.micro_f1 - 90.0) < 0.1
        assert abs(likely.macro_f1 - 100.0 * (30.0 / 32.0 + 0.75) / 2) < 0.1
        assert abs(likely.abstention_rate - 80.0) < 0.1

        # zero-abstention transcript: rate exactly 0.0 in every class
        flat = []
        for cls in ConflictClass:
            flat += _transcript_bucket(cls, [(False, True, 4),
                                             (False, False, 16)])
        zero = score(flat)
        for cls in ConflictClass:
            assert zero.per_class[cls].abstention_rate == 0.0


def _run_cli(*argv):
    from revlab.cli import main

    code = main(list(argv))
    assert code == 0, f"command {argv} exited {code}"


def _digest_tree(paths):
    import hashlib

    out = {}
    for path in paths:
        digest = hashlib.sha256()
        with open(path, "rb") as fh:
            digest.update(fh.read())
        out[os.path.basename(path)] = digest.hexdigest()
    return out


def test_end_to_end_offline(tmp_path):
    with criterion("offline end-to-end <60s, exit 0, rerun byte-identical"):
        start = time.monotonic()
        d = tmp_path / "synth"
        store = tmp_path / "store"
        aligns = tmp_path / "aligned.jsonl"
        records = tmp_path / "records.jsonl"
        report_json = tmp_path / "crosstab.json"
        model = tmp_path / "model.json"
        scores = tmp_path / "scores.jsonl"
        items = tmp_path / "items.jsonl"
        answered = tmp_path / "answered.jsonl"
        judged = tmp_path / "judged.jsonl"
        qa_report = tmp_path / "qa_report.json"

        def run_all():
            _run_cli("synth", "--pairs", "20", "--seed", "55",
                     "--difficulty", "hard", "--out", str(d))
            _run_cli("ingest", "--in", str(d / "corpus.jsonl"),
                     "--store", str(store))
            _run_cli("align", "--store", str(store), "--out", str(aligns))
            _run_cli("label", "--store", str(store), "--alignments",
                     str(aligns), "--labeler", "heuristic",
                     "--out", str(records))
            _run_cli("report", "--records", str(records), "--out",
                     str(report_json))
            _run_cli("predict-train", "--store", str(store), "--alignments",
                     str(aligns), "--records", str(records),
                     "--model", str(model))
            _run_cli("predict-eval", "--store", str(store), "--alignments",
                     str(aligns), "--records", str(records),
                     "--model", str(model), "--split", "dev")
            _run_cli("predict-score", "--store", str(store), "--alignments",
                     str(aligns), "--model", str(model), "--out", str(scores),
                     "--bin")
            _run_cli("qa-gen", "--store", str(store), "--records",
                     str(records), "--out", str(items), "--mock",
                     "--max-links", "6")
            _run_cli("qa-run", "--items", str(items), "--variant",
                     "with_update_prediction", "--out", str(answered),
                     "--scores", str(scores), "--mock")
            _run_cli("qa-eval", "--items", str(answered), "--out",
                     str(judged), "--mock")
            _run_cli("qa-score", "--items", str(judged), "--out",
                     str(qa_report))

        run_all()
        artifacts = [
            d / "corpus.jsonl", d / "gold_alignments.jsonl",
            d / "gold_records.jsonl", aligns, records, report_json, model,
            scores, items, answered, judged, qa_report,
        ]
        first = _digest_tree(artifacts)
        run_all()  # same paths: duplicate ingests skipped, outputs rewritten
        second = _digest_tree(artifacts)
        elapsed = time.monotonic() - start
        assert first == second, "rerun produced different bytes"
        assert elapsed < 60.0, f"end-to-end took {elapsed:.1f}s"


def test_client_robustness(tmp_path):
    import threading

    from revlab.llmclient import ChatRequest, LLMClient, RetryPolicy

    with criterion("retry/backoff honored; cache 100% on pass 2; no torn "
                   "files after kill -9"):
        script = [(429, {}), (500, {}), (200, {"choices": [{"message":
                  {"content": "ok"}}]})]
        calls = {"n": 0}
        lock = threading.Lock()

        def flaky(url, payload, timeout_s, api_key):
            with lock:
                calls["n"] += 1
                if script:
                    return script.pop(0)
            return 200, {"choices": [{"message": {"content": "ok"}}]}

        cache_dir = tmp_path / "cache"
        client = LLMClient(
            endpoint="http://example/chat",
            cache_dir=str(cache_dir),
            transport=flaky,
            policy=RetryPolicy(max_retries=3, backoff_base_ms=1),
        )

        def req(k):
            return ChatRequest(endpoint="http://example/chat", model="m",
                               messages=(("user", f"q{k}"),))

        for k in range(10):
            assert client.send(req(k)) == "ok"
        assert calls["n"] == 12  # 10 requests + 2 injected failures
        before = calls["n"]
        for k in range(10):
            assert client.send(req(k)) == "ok"
        assert calls["n"] == before, "second pass was not 100% cache hits"

        script_path = tmp_path / "writer.py"
        script_path.write_text(
            "import sys\n"
            "from revlab.llmclient import ResponseCache\n"
            "cache = ResponseCache(sys.argv[1])\n"
            "k = 0\n"
            "while True:\n"
            "    cache.put('%064x' % k, {'response': 'y' * 8192})\n"
            "    k += 1\n",
            encoding="utf-8",
        )
        kill_dir = tmp_path / "killcache"
        proc = subprocess.Popen([sys.executable, str(script_path),
                                 str(kill_dir)],
                                stdout=subprocess.DEVNULL,
                                stderr=subprocess.DEVNULL)
        time.sleep(1.0)
        proc.send_signal(signal.SIGKILL)
        proc.wait()
        checked = 0
        for root, _, files in os.walk(kill_dir):
            for name in files:
                if name.startswith(".tmp-"):
                    continue
                with open(os.path.join(root, name), encoding="utf-8") as fh:
                    assert json.load(fh)["response"] == "y" * 8192
                checked += 1
        assert checked > 0


def test_warning_directionality(tmp_path):
    """Tables 2/3/7/8 absolute values are out of reach without the source
    corpus and models; the substituted property is the warning-obeying mock
    ordering across answer variants."""
    from revlab.llmclient import mock_client
    from revlab.qa import (
        ConflictClass,
        QAItem,
        Variant,
        answer_item,
        evaluate_item,
        gen_questions,
        score,
    )
    from revlab.synth import EditPlan, RewriteSentence, make_pair
    from revlab.taxonomy import CoarseIntention

    with criterion("mock-agent micro F1: pred & oracle >= uniform >= "
                   "no-warning"):
        # Planted links: 7 fact-updated (numeral change) and 5 stable
        # (synonym rewording in digit- and quote-free sentences).
        def planned_links(want, perturbation, predicate):
            links = []
            seed = 5000
            while len(links) < want:
                seed += 1
                probe, _, _ = make_pair(EditPlan(seed, 6, []))
                sentences = probe.old.ensure_sentences()
                target = next(
                    (k for k, s in enumerate(sentences) if predicate(s.text)),
                    None,
                )
                if target is None:
                    continue
                plan = EditPlan(seed, 6, [RewriteSentence(target, perturbation)])
                pair, alignment, records = make_pair(plan)
                edited = [r for r in records
                          if r.action.kind.value == "edit"][0]
                links.append((pair, edited))
            return links

        def has_digits(text):
            return any(ch.isdigit() for ch in text)

        def quiet(text):
            return (not has_digits(text) and '"' not in text
                    and "“" not in text
                    and any(w in text.lower().split() for w in
                            ("said", "officials", "remains", "supplies",
                             "sits", "links", "stretches", "anchors")))

        fixture = planned_links(7, "numeral_change", has_digits)
        fixture += planned_links(5, "synonym_swap", quiet)
        client = mock_client()
        base_items = []
        for pair, rec in fixture:
            old_sentence = pair.old.ensure_sentences()[rec.old_idx].text
            new_sentence = pair.new.ensure_sentences()[rec.new_idx].text
            flag = CoarseIntention.FACT in rec.labels.coarse_set()
            for cls in ConflictClass:
                questions = gen_questions(
                    old_sentence,
                    new_sentence if cls is ConflictClass.LIKELY_CONFLICT
                    else None,
                    cls, client,
                )
                for question in questions:
                    base_items.append(QAItem(
                        pair_key=rec.pair_key,
                        old_sentence=old_sentence,
                        new_sentence=new_sentence,
                        question=question,
                        conflict_class=cls,
                        oracle_flag=flag,
                        bin="High" if flag else "Low",
                    ))
        assert sum(1 for p, r in fixture
                   if CoarseIntention.FACT in r.labels.coarse_set()) == 7
        assert any(i.oracle_flag for i in base_items)
        assert any(not i.oracle_flag for i in base_items)

        micros = {}
        for variant in Variant:
            items = [QAItem(**{**item.__dict__}) for item in base_items]
            for item in items:
                answer_item(item, variant, client)
                item.verdicts = evaluate_item(
                    item.old_sentence, item.new_sentence, item.question,
                    client,
                )
            micros[variant] = score(items).overall.micro_f1
        assert micros[Variant.WITH_UPDATE_PREDICTION] >= \
            micros[Variant.UNIFORM_WARNING] - 1e-9
        assert micros[Variant.ORACLE_UPDATE] >= \
            micros[Variant.UNIFORM_WARNING] - 1e-9
        assert micros[Variant.UNIFORM_WARNING] >= \
            micros[Variant.NO_WARNING] - 1e-9
        assert micros[Variant.NO_WARNING] < 100.0


FRONTEND_FIXTURES = os.path.join(
    os.path.dirname(__file__), "..", "frontend", "tests", "fixtures"
)


def test_secondary_ui_annotations_round_trip(tmp_path, capsys):
    """[SECONDARY] The UI's saved annotations feed primary-side validation
    and a perfect self-agreement check; the 20-pair export it renders
    validates against the published schema."""
    import jsonschema

    from revlab.cli import main
    from revlab.labeler import read_records
    from revlab.taxonomy import DISPLAY

    sample = os.path.join(FRONTEND_FIXTURES, "annotations-sample.jsonl")
    viz_dir = os.path.join(FRONTEND_FIXTURES, "viz")
    if not os.path.exists(sample):
        pytest.skip("frontend fixtures not present")

    with criterion("UI annotations validate, agreement kappa = 1.0"):
        schema_path = os.path.join(
            os.path.dirname(__file__), "..", "docs", "viz_schema.json"
        )
        with open(schema_path, encoding="utf-8") as fh:
            schema = json.load(fh)
        docs = sorted(
            name for name in os.listdir(viz_dir) if name.endswith(".json")
        )
        assert len(docs) == 20
        for name in docs:
            with open(os.path.join(viz_dir, name), encoding="utf-8") as fh:
                jsonschema.validate(json.load(fh), schema)

        record_schema = schema["definitions"]["editRecord"]
        with open(sample, encoding="utf-8") as fh:
            rows = [json.loads(line) for line in fh if line.strip()]
        assert len(rows) == 10
        allowed = set(DISPLAY.values())
        for row in rows:
            jsonschema.validate(row, record_schema)
            assert set(row["labels"]) <= allowed
            assert row["label_source"] == "gold"
        assert sum(1 for row in rows if "rejected_index" in row) == 1

        records = read_records(sample)
        assert len(records) == 10
        assert sum(
            1 for r in records if r.labels.rejected_index is not None
        ) == 1

        code = main(["agreement", sample, sample])
        out = capsys.readouterr().out
        assert code == 0
        assert "PASS" in out
        start = out.index("{")
        end = out.rindex("}") + 1
        report = json.loads(out[start:end])
        assert report["mean_exact_set"] == 1.0
