"""Single entry point exposing the pipeline as subcommands.

Exit codes: 0 success, 1 user error, 2 internal error. Every run that writes
an artifact also writes a machine-readable manifest (inputs with content
hashes, resolved config, package version) sufficient to reproduce it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from revlab import __version__
from revlab.align import (
    Alignment,
    SimilarityConfig,
    align_pair,
    alignment_f1,
    classify_actions,
)
from revlab.config import ConfigError, RunConfig, load_config
from revlab.corpus import Corpus, CorpusError, MemoryCorpus
from revlab.segment import SegmenterConfig, load_abbreviations, segment
from revlab.taxonomy import manifest as taxonomy_manifest

USER_ERRORS = (
    ConfigError,
    CorpusError,
    ValueError,
    FileNotFoundError,
    KeyError,
    IndexError,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage on stderr, exit 1 per the CLI contract
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(1)


def _sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_path: str, command: str, argv, inputs, cfg: RunConfig):
    """Deterministic sidecar manifest; out_path may be a file or directory."""
    manifest = {
        "command": command,
        "argv": list(argv),
        "inputs": {
            path: _sha256_file(path)
            for path in sorted(set(inputs))
            if path and os.path.isfile(path)
        },
        "config": cfg.to_dict(),
        "config_hash": cfg.content_hash(),
        "package_version": __version__,
        "python_version": ".".join(str(v) for v in sys.version_info[:3]),
    }
    if os.path.isdir(out_path):
        target = os.path.join(out_path, "run_manifest.json")
    else:
        target = out_path + ".manifest.json"
    with open(target, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_store(args) -> Corpus | MemoryCorpus:
    """--store names a store directory; --in a corpus JSONL file or a
    directory containing corpus.jsonl."""
    if getattr(args, "store", None):
        return Corpus(args.store)
    path = args.in_path
    if not path:
        raise CorpusError("provide --in or --store")
    if os.path.isdir(path):
        path = os.path.join(path, "corpus.jsonl")
    if not os.path.exists(path):
        raise CorpusError(f"no corpus at {path!r}")
    return MemoryCorpus.from_jsonl(path)


def _segmenter_config(cfg: RunConfig, args) -> SegmenterConfig:
    abbrev_file = getattr(args, "abbrev_file", None) or cfg.corpus.abbrev_file
    kwargs = {}
    if abbrev_file:
        kwargs["abbreviation_lexicon"] = load_abbreviations(abbrev_file)
    return SegmenterConfig(
        dateline_pattern=cfg.corpus.dateline,
        min_sentence_chars=cfg.corpus.min_sentence_chars,
        **kwargs,
    )


def _similarity_config(cfg: RunConfig, args) -> SimilarityConfig:
    def pick(flag_name, cfg_value):
        flag = getattr(args, flag_name, None)
        return cfg_value if flag is None else flag

    return SimilarityConfig(
        backend=pick("backend", cfg.align.backend),
        link_threshold=pick("link_threshold", cfg.align.link_threshold),
        token_weight=pick("token_weight", cfg.align.token_weight),
        move_threshold=pick("move_threshold", cfg.align.move_threshold),
    )


def _make_client(cfg: RunConfig, args, cache_subdir: str | None = None):
    from revlab.llmclient import LLMClient, RetryPolicy, mock_client

    if getattr(args, "mock", False) or cfg.llm.mock:
        # The mock agent is deterministic and offline; a disk cache would
        # only leave llm-cache/ litter in the working directory.
        return mock_client(cache_dir=None)
    cache_dir = cfg.llm.cache_dir or None
    return LLMClient(
        endpoint=cfg.llm.endpoint or None,
        model=cfg.llm.model,
        cache_dir=cache_dir,
        embed_endpoint=cfg.llm.embed_endpoint or None,
        embed_model=cfg.llm.embed_model or cfg.llm.model,
        temperature=cfg.llm.temperature,
        policy=RetryPolicy(
            max_retries=cfg.llm.max_retries,
            backoff_base_ms=cfg.llm.backoff_base_ms,
            timeout_ms=cfg.llm.timeout_ms,
            max_concurrent=cfg.llm.max_concurrent,
        ),
    )


def _map_items(items, fn, jobs: int) -> None:
    """Apply fn over items, optionally with a bounded worker pool; item order
    and the output writer stay deterministic either way."""
    if jobs > 1 and len(items) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(fn, items))
    else:
        for item in items:
            fn(item)


def _read_alignments(path: str) -> list[Alignment]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Alignment.from_json(line))
    return out


def _ensure_segmented(store, cfg: RunConfig, args):
    seg_cfg = _segmenter_config(cfg, args)
    cache: dict[tuple[str, int], object] = {}

    class _SegmentingStore:
        def get(self, aid, ver):
            key = (aid, ver)
            if key not in cache:
                doc = store.get(aid, ver)
                doc.ensure_sentences(seg_cfg)
                cache[key] = doc
            return cache[key]

        def article_ids(self):
            return store.article_ids()

        def versions(self, aid):
            return store.versions(aid)

        def pairs(self, policy="consecutive"):
            from revlab.corpus import RevisionPair

            for pair in store.pairs(policy):
                yield RevisionPair(
                    pair.article_id,
                    self.get(pair.article_id, pair.old_version),
                    self.get(pair.article_id, pair.new_version),
                )

    return _SegmentingStore()


# -- subcommand handlers --------------------------------------------------------


def cmd_synth(args, cfg: RunConfig, argv) -> int:
    from revlab.synth import make_corpus

    make_corpus(args.pairs, args.seed, args.difficulty, out_dir=args.out)
    write_manifest(args.out, "synth", argv, [], cfg)
    print(f"wrote {args.pairs} pairs to {args.out}")
    return 0


def cmd_ingest(args, cfg: RunConfig, argv) -> int:
    store = Corpus(args.store)
    report = store.ingest(args.in_path, strict=args.strict)
    write_manifest(args.store, "ingest", argv, [args.in_path], cfg)
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_segment(args, cfg: RunConfig, argv) -> int:
    with open(args.in_path, encoding="utf-8") as fh:
        text = fh.read()
    sentences = segment(text, _segmenter_config(cfg, args))
    payload = [
        {"index": s.index, "text": s.text, "span": list(s.span)} for s in sentences
    ]
    out = json.dumps(payload, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
        write_manifest(args.out, "segment", argv, [args.in_path], cfg)
    else:
        print(out)
    return 0


def cmd_align(args, cfg: RunConfig, argv) -> int:
    sim_cfg = _similarity_config(cfg, args)
    store = _ensure_segmented(_load_store(args), cfg, args)
    client = _make_client(cfg, args) if sim_cfg.backend == "embedding_service" else None
    jobs = args.jobs or cfg.align.jobs
    pairs = list(store.pairs(args.pair_policy))
    if jobs > 1 and len(pairs) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            alignments = list(
                pool.map(lambda p: align_pair(p, sim_cfg, client=client), pairs)
            )
    else:
        alignments = [align_pair(p, sim_cfg, client=client) for p in pairs]
    with open(args.out, "w", encoding="utf-8") as fh:
        for alignment in alignments:
            fh.write(alignment.to_json() + "\n")
    inputs = [args.in_path or "", getattr(args, "store", "") or ""]
    write_manifest(args.out, "align", argv, inputs, cfg)
    print(f"aligned {len(alignments)} pairs -> {args.out}")
    return 0


def cmd_label(args, cfg: RunConfig, argv) -> int:
    from revlab.features import load_feature_file, load_nli_file
    from revlab.labeler import heuristic_labeler, llm_labeler, silver_label_corpus

    store = _ensure_segmented(_load_store(args), cfg, args)
    alignments = _read_alignments(args.alignments)
    if args.labeler == "heuristic":
        labeler = heuristic_labeler()
    else:
        labeler = llm_labeler(_make_client(cfg, args))
    feature_map = load_feature_file(args.features) if args.features else None
    nli_map = load_nli_file(args.nli) if args.nli else None
    report = silver_label_corpus(
        store,
        alignments,
        labeler,
        args.out,
        checkpoint_path=args.checkpoint,
        cfg=_similarity_config(cfg, args),
        feature_map=feature_map,
        nli_map=nli_map,
        jobs=args.jobs or cfg.llm.max_concurrent,
    )
    write_manifest(args.out, "label", argv, [args.alignments], cfg)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_sample(args, cfg: RunConfig, argv) -> int:
    from revlab.predictor import sample_high_update

    store = _ensure_segmented(_load_store(args), cfg, args)
    triples = []
    for alignment in _read_alignments(args.alignments):
        old = store.get(alignment.article_id, alignment.old_version)
        new = store.get(alignment.article_id, alignment.new_version)
        triples.append((alignment, len(old.sentences), len(new.sentences)))
    kept = sample_high_update(triples)
    with open(args.out, "w", encoding="utf-8") as fh:
        for alignment in kept:
            fh.write(alignment.to_json() + "\n")
    write_manifest(args.out, "sample", argv, [args.alignments], cfg)
    print(f"kept {len(kept)} of {len(triples)} pairs -> {args.out}")
    return 0


def _build_examples_from_args(args, cfg: RunConfig, variant: str):
    from revlab.labeler import read_records
    from revlab.predictor import build_examples

    store = _ensure_segmented(_load_store(args), cfg, args)
    alignments = _read_alignments(args.alignments)
    records = read_records(args.records)
    return build_examples(store, alignments, records, variant=variant)


def cmd_predict_train(args, cfg: RunConfig, argv) -> int:
    from revlab.predictor import LikelihoodBins, balance, chrono_split, evaluate, train

    variant = args.variant or cfg.predict.variant
    examples = _build_examples_from_args(args, cfg, variant)
    train_set, dev_set = chrono_split(examples)
    balanced = balance(train_set, seed=cfg.predict.seed)
    model, history = train(
        balanced,
        lr=cfg.predict.lr,
        epochs=cfg.predict.epochs,
        l2=cfg.predict.l2,
        seed=cfg.predict.seed,
        bag_dim=cfg.predict.bag_dim,
    )
    model.thresholds = LikelihoodBins(cfg.predict.t1, cfg.predict.t2)
    model.save(args.model)
    write_manifest(args.model, "predict-train", argv,
                   [args.alignments, args.records], cfg)
    report = {
        "examples": len(examples),
        "train": len(balanced),
        "dev": len(dev_set),
        "final_loss": history.losses[-1],
        "dev_report": evaluate(model, dev_set) if dev_set else None,
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_predict_eval(args, cfg: RunConfig, argv) -> int:
    from revlab.predictor import CueModel, chrono_split, evaluate

    model = CueModel.load(args.model)
    variant = args.variant or cfg.predict.variant
    examples = _build_examples_from_args(args, cfg, variant)
    if args.split == "dev":
        _, examples = chrono_split(examples)
    report = evaluate(model, examples)
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(args.out, "predict-eval", argv,
                       [args.alignments, args.records, args.model], cfg)
    return 0


def cmd_predict_score(args, cfg: RunConfig, argv) -> int:
    from revlab.predictor import CueModel, build_examples

    model = CueModel.load(args.model)
    store = _ensure_segmented(_load_store(args), cfg, args)
    alignments = _read_alignments(args.alignments)
    examples = build_examples(store, alignments, [], variant="sentence_only")
    with open(args.out, "w", encoding="utf-8") as fh:
        for example in examples:
            p = model.predict_proba(example)
            row = {
                "article_id": example.article_id,
                "version": example.version,
                "sentence_idx": example.sentence_idx,
                "p": p,
            }
            if args.bin:
                row["bin"] = model.thresholds.bin(p)
            fh.write(json.dumps(row) + "\n")
    write_manifest(args.out, "predict-score", argv,
                   [args.alignments, args.model], cfg)
    print(f"scored {len(examples)} sentences -> {args.out}")
    return 0


def cmd_qa_gen(args, cfg: RunConfig, argv) -> int:
    from revlab.labeler import read_records
    from revlab.qa import ConflictClass, QAError, QAItem, gen_questions, write_items
    from revlab.taxonomy import CoarseIntention

    store = _ensure_segmented(_load_store(args), cfg, args)
    records = read_records(args.records)
    client = _make_client(cfg, args)
    linked = [
        rec
        for rec in records
        if rec.old_idx is not None and rec.new_idx is not None
        and (args.include_unchanged or rec.action.kind.value == "edit")
    ]
    if args.max_links:
        linked = linked[: args.max_links]
    items: list[QAItem] = []
    failures = 0
    for rec in linked:
        old_doc = store.get(rec.article_id, rec.old_version)
        new_doc = store.get(rec.article_id, rec.new_version)
        old_sentence = old_doc.sentences[rec.old_idx].text
        new_sentence = new_doc.sentences[rec.new_idx].text
        oracle_flag = CoarseIntention.FACT in rec.labels.coarse_set()
        for cls in ConflictClass:
            try:
                questions = gen_questions(
                    old_sentence,
                    new_sentence if cls is ConflictClass.LIKELY_CONFLICT else None,
                    cls,
                    client,
                )
            except QAError:
                failures += 1
                continue
            for question in questions:
                items.append(
                    QAItem(
                        pair_key=rec.pair_key,
                        old_sentence=old_sentence,
                        new_sentence=new_sentence,
                        question=question,
                        conflict_class=cls,
                        old_idx=rec.old_idx,
                        new_idx=rec.new_idx,
                        oracle_flag=oracle_flag,
                    )
                )
    write_items(args.out, items)
    write_manifest(args.out, "qa-gen", argv, [args.records], cfg)
    print(
        json.dumps(
            {"items": len(items), "links": len(linked), "failed_generations": failures}
        )
    )
    return 0


def cmd_qa_run(args, cfg: RunConfig, argv) -> int:
    from revlab.qa import Variant, answer_item, read_items, write_items

    variant = Variant(args.variant)
    items = read_items(args.items)
    client = _make_client(cfg, args)
    bins = {}
    if args.scores:
        with open(args.scores, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    row = json.loads(line)
                    if "bin" not in row:
                        raise ValueError(
                            "scores file lacks bins; run predict-score --bin"
                        )
                    bins[
                        (row["article_id"], row["version"], row["sentence_idx"])
                    ] = row["bin"]
    for item in items:
        if variant is Variant.WITH_UPDATE_PREDICTION:
            article_id, old_version, _ = item.pair_key.split(":")
            key = (article_id, int(old_version), item.old_idx)
            if key in bins:
                item.bin = bins[key]
            elif item.bin is None:
                raise ValueError(f"no bin for {key} and none embedded in item")
    strict = cfg.qa.strict or args.strict
    _map_items(
        items, lambda item: answer_item(item, variant, client, strict=strict),
        args.jobs or cfg.llm.max_concurrent,
    )
    write_items(args.out, items)
    write_manifest(args.out, "qa-run", argv,
                   [args.items, args.scores or ""], cfg)
    print(f"answered {len(items)} items -> {args.out}")
    return 0


def cmd_qa_eval(args, cfg: RunConfig, argv) -> int:
    from revlab.qa import QAError, evaluate_item, read_items, write_items

    items = read_items(args.items)
    client = _make_client(cfg, args)
    failures = [0]

    def judge(item):
        try:
            item.verdicts = evaluate_item(
                item.old_sentence, item.new_sentence, item.question, client
            )
        except QAError:
            failures[0] += 1
            item.verdicts = None

    _map_items(items, judge, args.jobs or cfg.llm.max_concurrent)
    excluded = failures[0]
    write_items(args.out, items)
    write_manifest(args.out, "qa-eval", argv, [args.items], cfg)
    print(json.dumps({"items": len(items), "excluded": excluded}))
    return 0


def cmd_qa_score(args, cfg: RunConfig, argv) -> int:
    from revlab.qa import read_items, score

    items = read_items(args.items)
    report = score(items, strict=cfg.qa.strict or args.strict)
    payload = json.dumps(report.to_dict(), indent=2, sort_keys=True)
    print(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        write_manifest(args.out, "qa-score", argv, [args.items], cfg)
    return 0


def cmd_report(args, cfg: RunConfig, argv) -> int:
    from revlab.labeler import read_records
    from revlab.metrics import crosstab

    records = read_records(args.records)
    table = crosstab(records, rows=args.rows, cols=args.cols,
                     normalize=args.normalize)
    print(table.render())
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(table.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(args.out, "report", argv, [args.records], cfg)
    return 0


def cmd_export_viz(args, cfg: RunConfig, argv) -> int:
    from revlab.labeler import read_records

    store = _ensure_segmented(_load_store(args), cfg, args)
    alignments = _read_alignments(args.alignments)
    records = read_records(args.records) if args.records else []
    by_pair: dict[str, list] = {}
    for rec in records:
        by_pair.setdefault(rec.pair_key, []).append(rec)
    os.makedirs(args.out, exist_ok=True)
    count = 0
    for alignment in alignments:
        doc = export_viz_document(
            store, alignment, by_pair.get(
                f"{alignment.article_id}:{alignment.old_version}:"
                f"{alignment.new_version}", []
            )
        )
        name = (
            f"{alignment.article_id}_{alignment.old_version}_"
            f"{alignment.new_version}.json"
        )
        with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        count += 1
    write_manifest(args.out, "export-viz", argv,
                   [args.alignments, args.records or ""], cfg)
    print(f"exported {count} documents -> {args.out}")
    return 0


def export_viz_document(store, alignment: Alignment, records) -> dict:
    """Self-contained per-pair document for the viz/annotation UI."""
    old_doc = store.get(alignment.article_id, alignment.old_version)
    new_doc = store.get(alignment.article_id, alignment.new_version)
    n, m = len(old_doc.sentences), len(new_doc.sentences)
    for i, j, _ in alignment.links:
        if not (0 <= i < n and 0 <= j < m):
            raise ValueError(f"link ({i}, {j}) out of range for sizes ({n}, {m})")
    if any(not 0 <= j < m for j in alignment.additions):
        raise ValueError("addition index out of range")
    if any(not 0 <= i < n for i in alignment.deletions):
        raise ValueError("deletion index out of range")
    rec_payload = []
    for rec in records:
        if rec.old_idx is not None and not 0 <= rec.old_idx < n:
            raise ValueError(f"record old_idx {rec.old_idx} out of range")
        if rec.new_idx is not None and not 0 <= rec.new_idx < m:
            raise ValueError(f"record new_idx {rec.new_idx} out of range")
        rec_payload.append(json.loads(rec.to_json()))
    return {
        "article_id": alignment.article_id,
        "old_version": alignment.old_version,
        "new_version": alignment.new_version,
        "old": {
            "version": old_doc.version,
            "timestamp": old_doc.to_record()["timestamp"],
            "sentences": [s.text for s in old_doc.sentences],
        },
        "new": {
            "version": new_doc.version,
            "timestamp": new_doc.to_record()["timestamp"],
            "sentences": [s.text for s in new_doc.sentences],
        },
        "links": [[i, j, s] for i, j, s in alignment.links],
        "additions": list(alignment.additions),
        "deletions": list(alignment.deletions),
        "records": rec_payload,
        "taxonomy": taxonomy_manifest(),
    }


def cmd_agreement(args, cfg: RunConfig, argv) -> int:
    from revlab.labeler import read_records
    from revlab.metrics import labelset_kappa

    if len(args.files) < 2:
        raise ValueError("agreement needs at least two annotation files")
    annotators = []  # (name, key -> LabelSet); same path may appear twice
    for idx, path in enumerate(args.files):
        keyed = {}
        for rec in read_records(path):
            key = (rec.article_id, rec.old_version, rec.new_version,
                   rec.old_idx, rec.new_idx)
            keyed[key] = rec.labels
        annotators.append((f"{idx}:{path}", keyed))
    names = [name for name, _ in annotators]
    per_file = dict(annotators)
    shared = set.intersection(*(set(keyed) for _, keyed in annotators))
    if not shared:
        everything = set.union(*(set(keyed) for _, keyed in annotators))
        missing = {
            name: sorted(str(k) for k in everything - set(keyed))[:5]
            for name, keyed in annotators
        }
        raise ValueError(f"no shared edit keys across files; missing e.g. {missing}")
    ordered = sorted(
        shared,
        key=lambda k: (k[0], k[1], k[2],
                       -1 if k[3] is None else k[3],
                       -1 if k[4] is None else k[4]),
    )
    pairwise = []
    for a_idx in range(len(names)):
        for b_idx in range(a_idx + 1, len(names)):
            a_labels = [per_file[names[a_idx]][k] for k in ordered]
            b_labels = [per_file[names[b_idx]][k] for k in ordered]
            stats = labelset_kappa(a_labels, b_labels)
            pairwise.append(
                {
                    "a": names[a_idx],
                    "b": names[b_idx],
                    "kappa_mean_per_label": stats["mean_per_label"],
                    "kappa_exact_set": stats["exact_set"],
                    "per_label": stats["per_label"],
                }
            )
    mean_exact = sum(p["kappa_exact_set"] for p in pairwise) / len(pairwise)
    mean_per_label = sum(p["kappa_mean_per_label"] for p in pairwise) / len(pairwise)
    passed = mean_exact > args.gate
    report = {
        "pairwise": pairwise,
        "mean_exact_set": mean_exact,
        "mean_per_label": mean_per_label,
        "gate": args.gate,
        "gate_passed": passed,
        "shared_items": len(ordered),
    }
    print(json.dumps(report, indent=2, sort_keys=True))
    print(f"agreement gate ({args.gate}): {'PASS' if passed else 'FAIL'}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        write_manifest(args.out, "agreement", argv, args.files, cfg)
    return 0


def cmd_serve_viz(args, cfg: RunConfig, argv) -> int:
    from revlab.serve import run_server

    run_server(args.dir, args.port)
    return 0


def cmd_eval_alignment(args, cfg: RunConfig, argv) -> int:
    predicted = {
        (a.article_id, a.old_version, a.new_version): a
        for a in _read_alignments(args.predicted)
    }
    gold = {
        (a.article_id, a.old_version, a.new_version): a
        for a in _read_alignments(args.gold)
    }
    shared = sorted(set(predicted) & set(gold))
    if not shared:
        raise ValueError("no shared pairs between predicted and gold alignments")
    tp = fp = fn = 0
    for key in shared:
        p_links = predicted[key].link_pairs()
        g_links = gold[key].link_pairs()
        tp += len(p_links & g_links)
        fp += len(p_links - g_links)
        fn += len(g_links - p_links)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    print(json.dumps({"precision": precision, "recall": recall, "f1": f1,
                      "pairs": len(shared)}))
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="revlab", description=__doc__)
    parser.add_argument("--config", default=None, help="sectioned config file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        return p

    p = add("synth", cmd_synth, help="generate a synthetic gold corpus")
    p.add_argument("--pairs", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--difficulty", choices=["easy", "hard"], default="easy")
    p.add_argument("--out", required=True)

    p = add("ingest", cmd_ingest, help="load records into a store")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--store", required=True)
    p.add_argument("--strict", action="store_true")

    p = add("segment", cmd_segment, help="sentence-split a text file")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("align", cmd_align, help="align sentences across revision pairs")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--pair-policy", dest="pair_policy",
                   choices=["consecutive", "first_last"], default="consecutive")
    p.add_argument("--backend", choices=["lexical_hybrid", "embedding_service"],
                   default=None)
    p.add_argument("--link-threshold", dest="link_threshold", type=float,
                   default=None)
    p.add_argument("--token-weight", dest="token_weight", type=float, default=None)
    p.add_argument("--move-threshold", dest="move_threshold", type=float,
                   default=None)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)
    p.add_argument("--mock", action="store_true")
    p.add_argument("--jobs", type=int, default=None)

    p = add("label", cmd_label, help="attach intention labels to edits")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--alignments", required=True)
    p.add_argument("--labeler", choices=["heuristic", "llm"], default="heuristic")
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--features", default=None)
    p.add_argument("--nli", default=None)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)
    p.add_argument("--mock", action="store_true")
    p.add_argument("--jobs", type=int, default=None)

    p = add("sample", cmd_sample, help="keep pairs passing the update filter")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--alignments", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("predict-train", cmd_predict_train, help="train the cue model")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--alignments", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--variant", choices=["sentence_only", "direct_context",
                                         "full_article"], default=None)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("predict-eval", cmd_predict_eval, help="evaluate the cue model")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--alignments", required=True)
    p.add_argument("--records", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--variant", choices=["sentence_only", "direct_context",
                                         "full_article"], default=None)
    p.add_argument("--split", choices=["all", "dev"], default="all")
    p.add_argument("--out", default=None)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("predict-score", cmd_predict_score, help="score sentences")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--alignments", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--bin", action="store_true")
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("qa-gen", cmd_qa_gen, help="generate conflict-class questions")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--max-links", dest="max_links", type=int, default=None)
    p.add_argument("--include-unchanged", dest="include_unchanged",
                   action="store_true")
    p.add_argument("--mock", action="store_true")
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("qa-run", cmd_qa_run, help="answer questions under a variant")
    p.add_argument("--items", required=True)
    p.add_argument("--variant", required=True,
                   choices=["no_warning", "uniform_warning",
                            "with_update_prediction", "oracle_update"])
    p.add_argument("--out", required=True)
    p.add_argument("--scores", default=None)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--mock", action="store_true")
    p.add_argument("--jobs", type=int, default=None)

    p = add("qa-eval", cmd_qa_eval, help="judge answerability/consistency")
    p.add_argument("--items", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mock", action="store_true")
    p.add_argument("--jobs", type=int, default=None)

    p = add("qa-score", cmd_qa_score, help="score abstention behavior")
    p.add_argument("--items", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", default=None)

    p = add("report", cmd_report, help="crosstab of actions x labels")
    p.add_argument("--records", required=True)
    p.add_argument("--rows", choices=["action", "topic"], default="action")
    p.add_argument("--cols", choices=["coarse", "fine"], default="coarse")
    p.add_argument("--normalize", choices=["none", "row"], default="none")
    p.add_argument("--out", default=None)

    p = add("export-viz", cmd_export_viz, help="emit UI documents per pair")
    p.add_argument("--in", dest="in_path", default=None)
    p.add_argument("--store", default=None)
    p.add_argument("--alignments", required=True)
    p.add_argument("--records", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--abbrev-file", dest="abbrev_file", default=None)

    p = add("agreement", cmd_agreement, help="inter-annotator kappa report")
    p.add_argument("files", nargs="+")
    p.add_argument("--gate", type=float, default=0.6)
    p.add_argument("--out", default=None)

    p = add("eval-alignment", cmd_eval_alignment,
            help="link F1 of predicted vs gold alignments")
    p.add_argument("--predicted", required=True)
    p.add_argument("--gold", required=True)

    p = add("serve-viz", cmd_serve_viz, help="serve exported docs + annotations")
    p.add_argument("--dir", required=True)
    p.add_argument("--port", type=int, default=8731)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg, argv)
    except USER_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except Exception as exc:  # internal error
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
