"""Synthetic revision-pair generator with gold alignments, actions, labels.

Old articles are assembled from a news-styled template bank (datelines,
quotes, numerals, abbreviations) and a seeded edit plan rewrites them into a
new version while tracking every sentence, so the emitted gold is exact by
construction. Everything is deterministic given the seed.
"""

from __future__ import annotations

import json
import os
import random
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from revlab.align import ActionKind, Alignment, EditAction, SimilarityConfig
from revlab.corpus import ArticleVersion, RevisionPair, format_timestamp
from revlab.labeler import EditRecord, heuristic_label_texts
from revlab.taxonomy import LabelSet


class SynthError(Exception):
    pass


# -- edit plans ------------------------------------------------------------------

@dataclass(frozen=True)
class AddSentence:
    j: int
    template_class: str


@dataclass(frozen=True)
class DeleteSentence:
    i: int


@dataclass(frozen=True)
class RewriteSentence:
    i: int
    perturbation: str  # whitespace | synonym_swap | numeral_change | clause_append


@dataclass(frozen=True)
class MoveSentence:
    i: int
    j: int


@dataclass
class EditPlan:
    seed: int
    n_sentences: int
    ops: list = field(default_factory=list)


REWRITE_KINDS = ("whitespace", "synonym_swap", "numeral_change", "clause_append")
EASY_REWRITES = ("whitespace", "synonym_swap")

# -- template bank ---------------------------------------------------------------

# (class, template); every instance must segment to exactly one sentence.
TEMPLATES: list[tuple[str, str]] = [
    ("dateline", "{city} (AP) -- A magnitude {n}.{n2} earthquake shook the "
                 "{region} region on {weekday}, rattling windows and knocking "
                 "out power."),
    ("dateline", "{city} (AP) -- Crews battled a fast-moving warehouse fire "
                 "near the {region} docks on {weekday}, officials said."),
    ("dateline", "{city} (AP) -- A commuter train derailed outside the "
                 "{region} station early {weekday}, injuring at least {n} "
                 "passengers."),
    ("dateline", "{city} (AP) -- Flood water closed the main highway through "
                 "the {region} valley on {weekday}, stranding dozens of "
                 "drivers."),
    ("dateline", "{city} (AP) -- Police evacuated the {region} courthouse on "
                 "{weekday} after a suspicious package was found in the "
                 "lobby."),
    ("event", "Rescue crews pulled {n} survivors from the rubble on "
              "{weekday}, the fire marshal said."),
    ("event", "Emergency teams reached the stranded hikers after a {n}-hour "
              "search, officials said."),
    ("event", "The storm knocked out power to {n},000 homes across the "
              "county, the utility reported."),
    ("event", "Investigators said the blast damaged {n} storefronts along "
              "the waterfront."),
    ("event", "Hospital staff treated {n} patients for smoke inhalation "
              "overnight, administrators said."),
    ("event", "The wildfire has burned {n},400 acres since igniting late "
              "{weekday}, the forestry department said."),
    ("event", "Search teams recovered the flight recorder {n} miles off the "
              "coast, the navy announced."),
    ("statistic", "At least {n} people were hurt and {n2} remain unaccounted "
                  "for, the agency said."),
    ("statistic", "Officials put the early damage estimate at {n} million "
                  "dollars."),
    ("statistic", "The county reported {n} new cases on {weekday}, up from "
                  "{n2} a day earlier."),
    ("statistic", "Organizers said roughly {n},500 demonstrators filled the "
                  "square by midday."),
    ("statistic", "The recall covers about {n},000 vehicles sold over the "
                  "past two years."),
    ("quote", '"We are moving as fast as conditions allow," said {first} '
              "{surname}, the county fire chief."),
    ("quote", '"Our crews will remain on scene through the weekend," '
              "{org} director {first} {surname} said."),
    ("quote", '"This could have been far worse," Mr. {surname} told '
              "reporters outside the terminal."),
    ("quote", '"Residents should follow the detour signs," said {first} '
              "{surname}, a spokesperson for {org}."),
    ("quote", '"We expect a preliminary report within days," Dr. {surname} '
              "said at the evening briefing."),
    ("quote", '"The numbers may change as we verify reports," said {first} '
              "{surname} of {org}."),
    ("background", "The plant was built in {year} and has failed two safety "
                   "inspections since."),
    ("background", "A similar storm flooded the same neighborhood in {year}, "
                   "destroying hundreds of homes."),
    ("background", "The bridge, opened in {year}, carries roughly {n},000 "
                   "vehicles a day."),
    ("background", "Mr. {surname} founded the company in {year} after "
                   "leaving a career in shipping."),
    ("background", "The district has debated the zoning rules since {year}, "
                   "when the first tower was approved."),
    ("background", "The stadium, a fixture of the waterfront since {year}, "
                   "seats about {n},000 people."),
    ("info_request", "The governor's office did not immediately comment."),
    ("info_request", "A spokesperson for {org} did not immediately respond "
                     "to questions."),
    ("info_request", "There were no immediate reports of serious injuries."),
    ("info_request", "Calls to the company's regional office went unanswered "
                     "on {weekday}."),
    ("info_request", "The airline declined to comment while the review is "
                     "ongoing."),
    ("info_request", "{org} did not respond to a request for comment."),
    ("developing", "Officials said the casualty count is expected to rise as "
                   "crews reach outlying farms."),
    ("developing", "The cause of the fire has not yet been determined, "
                   "investigators said."),
    ("developing", "Authorities said the search will continue through the "
                   "night."),
    ("developing", "Repairs are expected to take weeks, and the terminal "
                   "remains closed."),
    ("developing", "The suspect has not yet been identified, police said."),
    ("developing", "So far, inspectors have cleared only a handful of "
                   "buildings for reentry."),
    ("analysis", "Analysts said the outage should prompt a broader review of "
                 "the aging grid."),
    ("analysis", "Economists believe the closure will weigh on the region's "
                 "hiring for months."),
    ("analysis", "Critics argued the agency should have acted on the "
                 "warnings years earlier."),
    ("analysis", "Observers said the verdict signals a tougher line on "
                 "campaign spending."),
    ("description", "The terminal sits on reclaimed land between the rail "
                    "yard and the harbor."),
    ("description", "The neighborhood is a dense grid of row houses and "
                    "small groceries."),
    ("description", "The reservoir supplies drinking water to most of the "
                    "eastern suburbs."),
    ("description", "The courthouse anchors a block of law offices and lunch "
                    "counters downtown."),
    ("description", "The refinery occupies a narrow strip between the river "
                    "and the interstate."),
    ("description", "The orchard stretches along the ridge above the county "
                    "road."),
    ("description", "The ferry crossing links the island's two largest "
                    "villages."),
]

TEMPLATE_CLASSES = tuple(sorted({cls for cls, _ in TEMPLATES}))

CITIES = [
    "RIVERTON", "HARBOR CITY", "CRESTFIELD", "NORWALK", "EASTPORT",
    "GRANVILLE", "MERIDIAN", "LAKEWOOD", "FAIRMONT", "DELMAR",
]
REGIONS = [
    "north side", "Ashwood", "Carver Point", "old mill", "bayfront",
    "Glenridge", "hillside", "Moss Landing",
]
FIRST_NAMES = [
    "Alma", "Bram", "Celia", "Dorian", "Edith", "Felix", "Greta", "Hugo",
    "Iris", "Jonas", "Lena", "Milo",
]
SURNAMES = [
    "Arden", "Bellamy", "Calloway", "Draper", "Ellison", "Farnsworth",
    "Granger", "Holloway", "Iverson", "Jessup", "Kendrick", "Langford",
    "Merritt", "Ostrander", "Pemberton", "Rutledge", "Thornbury", "Whitfield",
]
ORGS = [
    "the transit authority", "the county water board", "the port commission",
    "the regional health office", "the state highway agency",
    "the fire marshal's office",
]
WEEKDAYS = [
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday",
    "Sunday",
]

SYNONYMS: dict[str, str] = {
    "said": "stated",
    "told": "informed",
    "officials": "authorities",
    "police": "officers",
    "crews": "teams",
    "roughly": "approximately",
    "about": "around",
    "injuring": "hurting",
    "hurt": "injured",
    "damaged": "battered",
    "closed": "shut",
    "expected": "projected",
    "remain": "stay",
    "remains": "stays",
    "immediately": "promptly",
    "reports": "accounts",
    "reported": "recorded",
    "believe": "think",
    "argued": "contended",
    "search": "hunt",
    "sits": "rests",
    "stretches": "extends",
    "supplies": "provides",
    "links": "connects",
    "anchors": "dominates",
    "occupies": "fills",
    "neighborhood": "district",
    "dense": "tight",
    "evacuated": "cleared",
    "battled": "fought",
    "recovered": "retrieved",
    "treated": "cared for",
    "declined": "refused",
}

CLAUSES = [
    ", officials said",
    ", according to a statement",
    ", witnesses reported",
    ", the mayor's office confirmed",
]

_NUMERAL_TOKEN_RE = re.compile(r"\d[\d,]*(?:\.\d+)?")
_WORD_RE = re.compile(r"[A-Za-z']+")


def _fill(template: str, rng: random.Random) -> str:
    text = template.format(
        city=rng.choice(CITIES),
        region=rng.choice(REGIONS),
        first=rng.choice(FIRST_NAMES),
        surname=rng.choice(SURNAMES),
        org=rng.choice(ORGS),
        weekday=rng.choice(WEEKDAYS),
        year=rng.randint(1968, 2017),
        n=rng.randint(3, 97),
        n2=rng.randint(2, 89),
    )
    # Slot fills like "the port commission" can land sentence-initial.
    return text[0].upper() + text[1:]


# -- perturbations ----------------------------------------------------------------

def applicable_perturbations(text: str) -> list[str]:
    kinds = []
    if " " in text:
        kinds.append("whitespace")
    if text.endswith("."):
        kinds.append("clause_append")
    if any(w.lower() in SYNONYMS for w in _WORD_RE.findall(text)):
        kinds.append("synonym_swap")
    if _NUMERAL_TOKEN_RE.search(text):
        kinds.append("numeral_change")
    return kinds


def perturb(text: str, kind: str, rng: random.Random) -> str:
    if kind == "whitespace":
        spaces = [k for k, ch in enumerate(text) if ch == " "]
        if not spaces:
            raise SynthError("whitespace perturbation needs a space")
        pos = rng.choice(spaces)
        return text[:pos] + " " + text[pos:]
    if kind == "synonym_swap":
        for match in _WORD_RE.finditer(text):
            word = match.group(0)
            replacement = SYNONYMS.get(word.lower())
            if replacement is not None:
                if word[0].isupper():
                    replacement = replacement[0].upper() + replacement[1:]
                return text[: match.start()] + replacement + text[match.end():]
        raise SynthError(f"no synonym applies to {text!r}")
    if kind == "numeral_change":
        match = _NUMERAL_TOKEN_RE.search(text)
        if match is None:
            raise SynthError(f"no numeral to change in {text!r}")
        token = match.group(0)
        head = re.match(r"\d+", token).group(0)
        delta = rng.randint(1, 9)
        new_token = str(int(head) + delta) + token[len(head):]
        return text[: match.start()] + new_token + text[match.end():]
    if kind == "clause_append":
        clause = rng.choice(CLAUSES)
        if not text.endswith("."):
            raise SynthError("clause_append expects a period-terminated sentence")
        return text[:-1] + clause + "."
    raise SynthError(f"unknown perturbation {kind!r}")


# -- plan construction and application ---------------------------------------------

@dataclass
class _Tracked:
    orig: int | None
    text: str
    edited: bool = False


def _build_old_sentences(plan: EditPlan) -> tuple[list[str], set[int]]:
    rng = random.Random(f"synth-old:{plan.seed}")
    datelines = [k for k, (cls, _) in enumerate(TEMPLATES) if cls == "dateline"]
    others = [k for k, (cls, _) in enumerate(TEMPLATES) if cls != "dateline"]
    if plan.n_sentences < 1:
        raise SynthError("a plan needs at least one sentence")
    picks = [rng.choice(datelines)]
    picks.extend(rng.sample(others, min(plan.n_sentences - 1, len(others))))
    while len(picks) < plan.n_sentences:
        picks.append(rng.choice(others))
    return [_fill(TEMPLATES[k][1], rng) for k in picks], set(picks)


def _apply_ops(plan: EditPlan, old: list[str], used: set[int]) -> list[_Tracked]:
    rng = random.Random(f"synth-ops:{plan.seed}")
    items = [_Tracked(orig=k, text=text) for k, text in enumerate(old)]
    unused = [
        k for k, (cls, _) in enumerate(TEMPLATES)
        if cls != "dateline" and k not in used
    ]
    for op in plan.ops:
        if isinstance(op, AddSentence):
            if not 0 <= op.j <= len(items):
                raise SynthError(f"AddSentence index {op.j} out of range")
            pool = [k for k in unused if TEMPLATES[k][0] == op.template_class]
            if not pool:
                pool = [
                    k for k, (cls, _) in enumerate(TEMPLATES)
                    if cls == op.template_class
                ]
            if not pool:
                raise SynthError(f"unknown template class {op.template_class!r}")
            pick = rng.choice(pool)
            if pick in unused:
                unused.remove(pick)
            items.insert(op.j, _Tracked(orig=None, text=_fill(TEMPLATES[pick][1], rng)))
        elif isinstance(op, DeleteSentence):
            if not 0 <= op.i < len(items):
                raise SynthError(f"DeleteSentence index {op.i} out of range")
            items.pop(op.i)
        elif isinstance(op, RewriteSentence):
            if not 0 <= op.i < len(items):
                raise SynthError(f"RewriteSentence index {op.i} out of range")
            if op.perturbation not in REWRITE_KINDS:
                raise SynthError(f"unknown perturbation {op.perturbation!r}")
            item = items[op.i]
            item.text = perturb(item.text, op.perturbation, rng)
            item.edited = True
        elif isinstance(op, MoveSentence):
            if not 0 <= op.i < len(items):
                raise SynthError(f"MoveSentence source {op.i} out of range")
            item = items.pop(op.i)
            if not 0 <= op.j <= len(items):
                raise SynthError(f"MoveSentence target {op.j} out of range")
            items.insert(op.j, item)
        else:
            raise SynthError(f"unknown op {op!r}")
    return items


_EPOCH = datetime(2019, 3, 1, 6, 0, 0, tzinfo=timezone.utc)


def make_pair(
    plan: EditPlan,
    article_id: str | None = None,
    outlet: str = "Synth Wire",
    base_time: datetime | None = None,
    move_threshold: float | None = None,
):
    """Build (pair, gold alignment, gold records) from an edit plan."""
    article_id = article_id or f"synth-{plan.seed:06d}"
    base_time = base_time or (_EPOCH + timedelta(hours=plan.seed % 100_000))
    move_threshold = (
        move_threshold
        if move_threshold is not None
        else SimilarityConfig().move_threshold
    )
    old_sentences, used_templates = _build_old_sentences(plan)
    items = _apply_ops(plan, old_sentences, used_templates)
    new_sentences = [item.text for item in items]

    n = len(old_sentences)
    m = len(new_sentences)
    links: list[tuple[int, int, float]] = []
    additions: list[int] = []
    survivors: dict[int, tuple[int, _Tracked]] = {}
    for pos, item in enumerate(items):
        if item.orig is None:
            additions.append(pos)
        else:
            links.append((item.orig, pos, 1.0))
            survivors[item.orig] = (pos, item)
    deletions = sorted(set(range(n)) - set(survivors))
    links.sort()

    old_version = ArticleVersion(
        article_id=article_id,
        version=0,
        outlet=outlet,
        timestamp=base_time,
        text=" ".join(old_sentences),
    )
    new_version = ArticleVersion(
        article_id=article_id,
        version=1,
        outlet=outlet,
        timestamp=base_time + timedelta(hours=2),
        text=" ".join(new_sentences),
    )
    pair = RevisionPair(article_id, old_version, new_version)
    alignment = Alignment(
        article_id=article_id,
        old_version=0,
        new_version=1,
        links=links,
        additions=additions,
        deletions=deletions,
    )
    alignment.check(n, m)
    # Gold indices are only meaningful if the segmenter recovers the same
    # sentence count from the joined text.
    from revlab.segment import segment

    if len(segment(old_version.text)) != n or len(segment(new_version.text)) != m:
        raise SynthError(
            f"template bank produced text that does not segment back to "
            f"{n}/{m} sentences (plan seed {plan.seed})"
        )

    records: list[EditRecord] = []

    def record(kind, old_idx=None, new_idx=None, moved=False, delta=None,
               old_text=None, new_text=None):
        labels = heuristic_label_texts(kind, old_text, new_text)
        rec = EditRecord(
            article_id=article_id,
            old_version=0,
            new_version=1,
            action=EditAction(kind=kind, moved=moved, index_delta=delta),
            old_idx=old_idx,
            new_idx=new_idx,
            score=1.0 if kind in (ActionKind.UNCHANGED, ActionKind.EDIT) else None,
            labels=LabelSet(labels),
            label_source="gold",
        )
        return rec

    for i, j, _ in links:
        item = survivors[i][1]
        kind = ActionKind.EDIT if item.edited else ActionKind.UNCHANGED
        moved = abs(i / n - j / m) > move_threshold
        records.append(
            record(
                kind,
                old_idx=i,
                new_idx=j,
                moved=moved,
                delta=(j - i) if moved else None,
                old_text=old_sentences[i],
                new_text=item.text,
            )
        )
    for i in deletions:
        records.append(
            record(ActionKind.DELETION, old_idx=i, old_text=old_sentences[i])
        )
    for j in additions:
        records.append(
            record(ActionKind.ADDITION, new_idx=j, new_text=new_sentences[j])
        )
    return pair, alignment, records


def make_plan(seed: int, difficulty: str = "easy") -> EditPlan:
    """Construct a valid op sequence by simulating it against the templates."""
    if difficulty not in ("easy", "hard"):
        raise SynthError(f"unknown difficulty {difficulty!r}")
    rng = random.Random(f"synth-plan:{seed}")
    n_sentences = rng.randint(6, 10) if difficulty == "easy" else rng.randint(7, 12)
    plan = EditPlan(seed=seed, n_sentences=n_sentences, ops=[])
    # Simulate application so every op index is valid when applied.
    sim, _ = _build_old_sentences(plan)
    texts = list(sim)

    n_dels = rng.randint(1, 2) if difficulty == "easy" else rng.randint(1, 3)
    n_rewrites = rng.randint(1, 3) if difficulty == "easy" else rng.randint(2, 4)
    n_adds = rng.randint(1, 3) if difficulty == "easy" else rng.randint(2, 4)
    n_moves = 0 if difficulty == "easy" else rng.randint(1, 3)
    allowed = EASY_REWRITES if difficulty == "easy" else REWRITE_KINDS

    for _ in range(n_dels):
        if len(texts) <= 2:
            break
        i = rng.randrange(len(texts))
        plan.ops.append(DeleteSentence(i))
        texts.pop(i)
    for _ in range(n_rewrites):
        order = list(range(len(texts)))
        rng.shuffle(order)
        for i in order:
            kinds = [k for k in applicable_perturbations(texts[i]) if k in allowed]
            if kinds:
                kind = rng.choice(kinds)
                plan.ops.append(RewriteSentence(i, kind))
                texts[i] = perturb(texts[i], kind, random.Random(0))
                break
    for _ in range(n_adds):
        j = rng.randint(0, len(texts))
        cls = rng.choice([c for c in TEMPLATE_CLASSES if c != "dateline"])
        plan.ops.append(AddSentence(j, cls))
        texts.insert(j, f"<{cls}>")
    for _ in range(n_moves):
        if len(texts) < 2:
            break
        i = rng.randrange(len(texts))
        j = rng.randrange(len(texts) - 1)
        plan.ops.append(MoveSentence(i, j))
        item = texts.pop(i)
        texts.insert(j, item)
    return plan


def make_corpus(
    n_pairs: int,
    seed: int,
    difficulty: str = "easy",
    out_dir: str | None = None,
):
    """Generate pairs plus gold files; byte-identical for identical arguments."""
    if n_pairs < 1:
        raise SynthError("n_pairs must be >= 1")
    pairs = []
    alignments = []
    all_records = []
    for k in range(n_pairs):
        plan = make_plan(seed * 1_000_003 + k, difficulty)
        pair, alignment, records = make_pair(
            plan,
            article_id=f"synth-{seed:04d}-{k:04d}",
            base_time=_EPOCH + timedelta(hours=3 * k),
        )
        pairs.append(pair)
        alignments.append(alignment)
        all_records.extend(records)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "corpus.jsonl"), "w", encoding="utf-8") as fh:
            for pair in pairs:
                fh.write(json.dumps(pair.old.to_record()) + "\n")
                fh.write(json.dumps(pair.new.to_record()) + "\n")
        with open(
            os.path.join(out_dir, "gold_alignments.jsonl"), "w", encoding="utf-8"
        ) as fh:
            for alignment in alignments:
                fh.write(alignment.to_json() + "\n")
        with open(
            os.path.join(out_dir, "gold_records.jsonl"), "w", encoding="utf-8"
        ) as fh:
            for rec in all_records:
                fh.write(rec.to_json() + "\n")
    return pairs, alignments, all_records
