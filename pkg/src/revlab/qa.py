"""QA abstention harness over outdated sentences.

Questions are generated per conflict class from revision-pair sentences,
answered under four warning variants, judged for answerability/consistency,
and scored: abstaining exactly when either judgment fails is a success.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field

from revlab.llmclient import ABSTAIN_PHRASE


class ConflictClass(str, enum.Enum):
    NO_CONFLICT = "no_conflict"
    MAYBE_CONFLICT = "maybe_conflict"
    LIKELY_CONFLICT = "likely_conflict"


class Variant(str, enum.Enum):
    NO_WARNING = "no_warning"
    UNIFORM_WARNING = "uniform_warning"
    WITH_UPDATE_PREDICTION = "with_update_prediction"
    ORACLE_UPDATE = "oracle_update"


class QAError(Exception):
    pass


@dataclass
class Verdicts:
    answerable: str  # yes | no
    consistent: str  # yes | no | n/a

    def __post_init__(self) -> None:
        if self.answerable not in ("yes", "no"):
            raise QAError(f"answerable must be yes/no, got {self.answerable!r}")
        if self.consistent not in ("yes", "no", "n/a"):
            raise QAError(f"consistent must be yes/no/n-a, got {self.consistent!r}")
        if self.consistent == "n/a" and self.answerable != "no":
            raise QAError("consistent=n/a implies answerable=no")

    def should_abstain(self) -> bool:
        return not (self.answerable == "yes" and self.consistent == "yes")


@dataclass
class QAItem:
    pair_key: str
    old_sentence: str
    new_sentence: str
    question: str
    conflict_class: ConflictClass
    old_idx: int | None = None
    new_idx: int | None = None
    variant: Variant | None = None
    bin: str | None = None  # Low | Medium | High
    oracle_flag: bool | None = None
    response: str | None = None
    abstained: bool | None = None
    verdicts: Verdicts | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "pair_key": self.pair_key,
                "old_sentence": self.old_sentence,
                "new_sentence": self.new_sentence,
                "question": self.question,
                "conflict_class": self.conflict_class.value,
                "old_idx": self.old_idx,
                "new_idx": self.new_idx,
                "variant": self.variant.value if self.variant else None,
                "bin": self.bin,
                "oracle_flag": self.oracle_flag,
                "response": self.response,
                "abstained": self.abstained,
                "verdicts": (
                    {
                        "answerable": self.verdicts.answerable,
                        "consistent": self.verdicts.consistent,
                    }
                    if self.verdicts
                    else None
                ),
            }
        )

    @classmethod
    def from_json(cls, line: str) -> "QAItem":
        obj = json.loads(line)
        verdicts = None
        if obj.get("verdicts"):
            verdicts = Verdicts(
                answerable=obj["verdicts"]["answerable"],
                consistent=obj["verdicts"]["consistent"],
            )
        return cls(
            pair_key=obj["pair_key"],
            old_sentence=obj["old_sentence"],
            new_sentence=obj["new_sentence"],
            question=obj["question"],
            conflict_class=ConflictClass(obj["conflict_class"]),
            old_idx=obj.get("old_idx"),
            new_idx=obj.get("new_idx"),
            variant=Variant(obj["variant"]) if obj.get("variant") else None,
            bin=obj.get("bin"),
            oracle_flag=obj.get("oracle_flag"),
            response=obj.get("response"),
            abstained=obj.get("abstained"),
            verdicts=verdicts,
        )


# -- question generation -------------------------------------------------------

_FEWSHOT_NO_CONFLICT = [
    (
        "WASHINGTON (AP) -- The White House is on lockdown after a passenger "
        "vehicle struck a security barrier.",
        "What did the vehicle strike?",
    ),
    (
        "The death count from the 42nd street bombing is 49 injured, 2 killed "
        "so far.",
        "Where did the bombing take place?",
    ),
    (
        "The construction work left the bridge badly damaged and unsafe for "
        "passengers and is expected to remain so for days.",
        "What kind of work was being done?",
    ),
]

_FEWSHOT_MAYBE_CONFLICT = [
    (
        "WASHINGTON (AP) -- The White House is on lockdown after a passenger "
        "vehicle struck a security barrier.",
        "Is the White House currently in lockdown -- if I visit, will I get "
        "turned away?",
    ),
    (
        "The death count from the street bombing is 49 injured, 2 killed so "
        "far.",
        "How many people have died so far?",
    ),
    (
        "The construction work left the bridge badly damaged and unsafe for "
        "passengers and is expected to remain so for days.",
        "What route should I take? The bridge is the quickest way to work.",
    ),
]

_ASK_SUFFIX = "Ask 5 different questions, output in a list. Don't say anything else."


def _fewshot_block(examples) -> str:
    lines = ["Here are some examples:"]
    for k, (sentence, question) in enumerate(examples, 1):
        lines.append(f'Example {k}: Sentence: "{sentence}" Question: "{question}"')
    return "\n".join(lines)


def build_question_prompt(
    cls: ConflictClass, old_sentence: str, new_sentence: str | None = None
) -> str:
    if cls is ConflictClass.NO_CONFLICT:
        return "\n".join(
            [
                "I will give you a sentence and you will give me 5 different "
                "questions. It should be directly answerable by the sentence.",
                _fewshot_block(_FEWSHOT_NO_CONFLICT),
                "Ok, now it's your turn.",
                f"Here is a sentence: {old_sentence}",
                _ASK_SUFFIX,
            ]
        )
    if cls is ConflictClass.MAYBE_CONFLICT:
        return "\n".join(
            [
                "I will give you a sentence and you will give me an answer. It "
                "should be timely and related to the facts in the sentence.",
                "It should be a question that could go stale, especially for "
                "ongoing events, or facts like death counts that might update.",
                _fewshot_block(_FEWSHOT_MAYBE_CONFLICT),
                "Ok, now it's your turn.",
                f"Here is a sentence: {old_sentence}",
                _ASK_SUFFIX,
            ]
        )
    if new_sentence is None:
        raise QAError("likely-conflict generation requires both sentences")
    return "\n".join(
        [
            "I will give you two sentences from an updating news article and "
            "you will give me 5 different questions.",
            "They should ideally focus on information that changes in between "
            "the sentences. So, if someone were to just look at the old sentence",
            "and you asked them your question, they would get it wrong.",
            "Ok, now it's your turn.",
            f"Here is the old sentence: {old_sentence}",
            f"Here is the new sentence: {new_sentence}",
            _ASK_SUFFIX,
        ]
    )


_LIST_ITEM_RE = re.compile(r"^\s*(?:\d+\s*[.)]|[-*•])\s*(.+?)\s*$")


def parse_question_list(text: str) -> list[str]:
    """Numbered or bulleted list -> items, distinct after case/ws collapse."""
    items: list[str] = []
    seen: set[str] = set()
    for line in text.splitlines():
        m = _LIST_ITEM_RE.match(line)
        if not m:
            continue
        question = m.group(1).strip()
        norm = re.sub(r"\s+", " ", question.lower())
        if norm and norm not in seen:
            seen.add(norm)
            items.append(question)
    return items


def gen_questions(
    old_sentence: str,
    new_sentence: str | None,
    cls: ConflictClass,
    client,
) -> list[str]:
    """Exactly five distinct questions, with a single corrective retry."""
    prompt = build_question_prompt(cls, old_sentence, new_sentence)
    response = client.complete(prompt)
    questions = parse_question_list(response)
    if len(questions) != 5:
        retry_prompt = prompt + "\nRemember: output exactly 5 questions."
        response = client.complete(retry_prompt)
        questions = parse_question_list(response)
    if len(questions) != 5:
        raise QAError(
            f"question generation produced {len(questions)} items after retry"
        )
    return questions


# -- answering -----------------------------------------------------------------

_PREAMBLE = (
    "You are a helpful assistant who answers questions based on this news "
    "information:"
)

_CAUTION_BODY = (
    "Answer cautiously and do not give the user wrong/outdated information.\n"
    "If the user's question looks like it will still be relevant even if the "
    "facts change, answer it directly.\n"
    'If the user\'s question looks like it will be outdated, say "I don\'t '
    'have the most up-to-date information" and that\'s it.\n'
    'Say nothing else. Do NOT say "I don\'t have the most up-to-date '
    'information" AND something else.'
)


def build_answer_prompt(
    variant: Variant,
    old_sentence: str,
    bin: str | None = None,
    oracle_flag: bool | None = None,
) -> str:
    """Byte-stable system prompt for one answering variant."""
    if variant is Variant.NO_WARNING:
        return (
            f"{_PREAMBLE}\n{old_sentence}\n\n"
            "Try to directly answer the users question and say nothing else."
        )
    if variant is Variant.UNIFORM_WARNING:
        return (
            f"{_PREAMBLE}\n{old_sentence}\n\n"
            "This sentence might go out of date.\n" + _CAUTION_BODY
        )
    if variant is Variant.WITH_UPDATE_PREDICTION:
        if bin is None:
            raise QAError("with_update_prediction requires a likelihood bin")
        level = bin.upper()
        if level not in ("LOW", "MEDIUM", "HIGH"):
            raise QAError(f"unknown likelihood bin {bin!r}")
        return (
            f"{_PREAMBLE}\n{old_sentence}\n\n"
            f"We give this a {level} chance of there being a fact update in "
            "this sentence. That might mean some new information could make "
            "some of the information in this sentence outdated.\n"
            "The user will ask a question. " + _CAUTION_BODY + "\n\n"
            "Keep our estimate in mind."
        )
    if variant is Variant.ORACLE_UPDATE:
        if oracle_flag is None:
            raise QAError("oracle_update requires the oracle flag")
        verdict = "DOES" if oracle_flag else "DOES NOT"
        return (
            f"{_PREAMBLE}\n{old_sentence}\n\n"
            f"This sentence {verdict} have a major fact update. That might "
            "mean some new information, updating information.\n" + _CAUTION_BODY
        )
    raise QAError(f"unknown variant {variant!r}")


_APOSTROPHES = {"’": "'", "‘": "'", "ʼ": "'"}


def _normalize_response(text: str) -> str:
    for curly, straight in _APOSTROPHES.items():
        text = text.replace(curly, straight)
    return re.sub(r"\s+", " ", text).strip().lower()


_ABSTAIN_NORM = _normalize_response(ABSTAIN_PHRASE)


def detect_abstention(response: str, strict: bool = False) -> bool:
    """Mandated-phrase detection, case- and apostrophe-insensitive.

    Lenient mode counts any response containing the phrase; strict mode
    requires the phrase to be the whole response (trailing period allowed).
    """
    norm = _normalize_response(response)
    if strict:
        return norm == _ABSTAIN_NORM or norm == _ABSTAIN_NORM + "."
    return _ABSTAIN_NORM in norm


def answer_item(item: QAItem, variant: Variant, client, strict: bool = False) -> QAItem:
    system = build_answer_prompt(
        variant, item.old_sentence, bin=item.bin, oracle_flag=item.oracle_flag
    )
    response = client.complete(item.question, system=system)
    item.variant = variant
    item.response = response
    item.abstained = detect_abstention(response, strict=strict)
    return item


# -- evaluation ----------------------------------------------------------------

EVAL_SYSTEM_PROMPT = (
    "You are a helpful assistant. You will be shown an old sentence, a revised "
    "sentence, and a user-question.\n"
    "you will answer the following 2 questions:\n"
    "1. Is this question answerable given JUST the old sentence?\n"
    '    Answer with "yes" or "no". Do not answer anything else.\n'
    "    If the answer to 1 was yes, then proceed to the second question, "
    "otherwise respond to question 2 with n/a\n"
    "2. Does the question ask about something that is factually consistent "
    "with the information presented in the revised sentence?\n"
    '    Answer with "yes", "no" or "n/a." Do not answer with anything else.'
)


def build_eval_user(old: str, new: str, question: str) -> str:
    return f"Old sentence: {old}\nRevised sentence: {new}\nQuestion: {question}"


_VERDICT_TOKEN_RE = re.compile(r"\b(yes|no|n/a|n a|na)\b", re.IGNORECASE)


def _parse_verdicts(text: str) -> Verdicts:
    tokens = []
    for line in text.splitlines():
        line = line.strip().lower().rstrip(".")
        m = _VERDICT_TOKEN_RE.search(line)
        if m:
            tok = m.group(1).lower().replace(" ", "/")
            if tok == "na":
                tok = "n/a"
            tokens.append(tok)
    if len(tokens) < 2:
        raise QAError(f"cannot parse verdicts from {text!r}")
    answerable, consistent = tokens[0], tokens[1]
    if answerable == "n/a":
        raise QAError("answerable cannot be n/a")
    return Verdicts(answerable=answerable, consistent=consistent)


def evaluate_item(old: str, new: str, question: str, client) -> Verdicts:
    """Two yes/no(/n-a) judgments, with a single corrective retry."""
    user = build_eval_user(old, new, question)
    response = client.complete(user, system=EVAL_SYSTEM_PROMPT)
    try:
        return _parse_verdicts(response)
    except QAError:
        retry_user = user + '\nAnswer with two lines, e.g. "yes" then "no".'
        response = client.complete(retry_user, system=EVAL_SYSTEM_PROMPT)
        return _parse_verdicts(response)


# -- scoring -------------------------------------------------------------------

@dataclass
class ClassScore:
    micro_f1: float
    macro_f1: float
    abstention_rate: float
    confusion: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
            "abstention_rate": self.abstention_rate,
            "confusion": self.confusion,
        }


@dataclass
class AbstentionReport:
    per_class: dict[ConflictClass, ClassScore]
    overall: ClassScore
    excluded: int = 0

    def to_dict(self) -> dict:
        out = {cls.value: score.to_dict() for cls, score in self.per_class.items()}
        out["overall"] = self.overall.to_dict()
        out["excluded"] = self.excluded
        return out


def _binary_f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 1.0 if denom == 0 else 2 * tp / denom


def _score_bucket(items: list[tuple[bool, bool]]) -> ClassScore:
    """items: (abstained, should_abstain) pairs."""
    tp = sum(1 for a, s in items if a and s)
    fp = sum(1 for a, s in items if a and not s)
    fn = sum(1 for a, s in items if not a and s)
    tn = sum(1 for a, s in items if not a and not s)
    total = len(items)
    micro = 100.0 * (tp + tn) / total
    f1_abstain = _binary_f1(tp, fp, fn)
    f1_answer = _binary_f1(tn, fn, fp)
    macro = 100.0 * (f1_abstain + f1_answer) / 2.0
    rate = 100.0 * (tp + fp) / total
    return ClassScore(
        micro_f1=micro,
        macro_f1=macro,
        abstention_rate=rate,
        confusion={"tp": tp, "fp": fp, "fn": fn, "tn": tn},
    )


def score(items: list[QAItem], strict: bool = False) -> AbstentionReport:
    """Aggregate abstention correctness per conflict class and overall."""
    usable: list[tuple[ConflictClass, bool, bool]] = []
    excluded = 0
    for item in items:
        if item.verdicts is None:
            excluded += 1
            continue
        if item.response is not None:
            abstained = detect_abstention(item.response, strict=strict)
        elif item.abstained is not None:
            abstained = item.abstained
        else:
            excluded += 1
            continue
        usable.append((item.conflict_class, abstained, item.verdicts.should_abstain()))
    if not usable:
        raise QAError("no scorable items")
    per_class: dict[ConflictClass, ClassScore] = {}
    for cls in ConflictClass:
        bucket = [(a, s) for c, a, s in usable if c is cls]
        if bucket:
            per_class[cls] = _score_bucket(bucket)
    overall = _score_bucket([(a, s) for _, a, s in usable])
    return AbstentionReport(per_class=per_class, overall=overall, excluded=excluded)


def read_items(path: str) -> list[QAItem]:
    items = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                items.append(QAItem.from_json(line))
    return items


def write_items(path: str, items: list[QAItem]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(item.to_json() + "\n")
