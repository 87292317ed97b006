"""Edit-intention schema: 20 fine-grained labels under 4 coarse categories.

The fine labels collapse the "Delete/Add/Update X" families into a single
label each; the edit direction lives on the EditAction instead.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field


class CoarseIntention(str, enum.Enum):
    FACT = "Fact"
    STYLE = "Style"
    NARRATIVE = "Narrative"
    OTHER = "Other"


class FineIntention(str, enum.Enum):
    # Fact
    EYEWITNESS_ACCOUNT = "EyewitnessAccount"
    EVENT = "Event"
    SOURCE_DOC = "SourceDoc"
    CORRECTION = "Correction"
    QUOTE = "Quote"
    ADDITIONAL_SOURCING = "AdditionalSourcing"
    ADDITIONAL_INFORMATION = "AdditionalInformation"
    # Style
    SIMPLIFICATION = "Simplification"
    EMPHASIZE_DEEMPHASIZE = "EmphasizeDeemphasize"
    DEFINE_TERM = "DefineTerm"
    STYLE_GUIDE = "StyleGuide"
    SYNTAX_CORRECTION = "SyntaxCorrection"
    TONAL_EDITS = "TonalEdits"
    SENSITIVITY_CONSIDERATION = "SensitivityConsideration"
    # Narrative
    ANALYSIS = "Analysis"
    BACKGROUND = "Background"
    ANECDOTE = "Anecdote"
    # Other
    INCORRECT_LINK = "IncorrectLink"
    UNCHANGED = "Unchanged"
    OTHER_NONE = "OtherNone"


_COARSE_OF: dict[FineIntention, CoarseIntention] = {
    FineIntention.EYEWITNESS_ACCOUNT: CoarseIntention.FACT,
    FineIntention.EVENT: CoarseIntention.FACT,
    FineIntention.SOURCE_DOC: CoarseIntention.FACT,
    FineIntention.CORRECTION: CoarseIntention.FACT,
    FineIntention.QUOTE: CoarseIntention.FACT,
    FineIntention.ADDITIONAL_SOURCING: CoarseIntention.FACT,
    FineIntention.ADDITIONAL_INFORMATION: CoarseIntention.FACT,
    FineIntention.SIMPLIFICATION: CoarseIntention.STYLE,
    FineIntention.EMPHASIZE_DEEMPHASIZE: CoarseIntention.STYLE,
    FineIntention.DEFINE_TERM: CoarseIntention.STYLE,
    FineIntention.STYLE_GUIDE: CoarseIntention.STYLE,
    FineIntention.SYNTAX_CORRECTION: CoarseIntention.STYLE,
    FineIntention.TONAL_EDITS: CoarseIntention.STYLE,
    FineIntention.SENSITIVITY_CONSIDERATION: CoarseIntention.STYLE,
    FineIntention.ANALYSIS: CoarseIntention.NARRATIVE,
    FineIntention.BACKGROUND: CoarseIntention.NARRATIVE,
    FineIntention.ANECDOTE: CoarseIntention.NARRATIVE,
    FineIntention.INCORRECT_LINK: CoarseIntention.OTHER,
    FineIntention.UNCHANGED: CoarseIntention.OTHER,
    FineIntention.OTHER_NONE: CoarseIntention.OTHER,
}

# Canonical display strings used in serialized label lists, prompts and the UI.
DISPLAY: dict[FineIntention, str] = {
    FineIntention.EYEWITNESS_ACCOUNT: "Delete/Add/Update Eye-witness Account",
    FineIntention.EVENT: "Delete/Add/Update Event",
    FineIntention.SOURCE_DOC: "Delete/Add/Update Source-Doc",
    FineIntention.CORRECTION: "Correction",
    FineIntention.QUOTE: "Delete/Add/Update Quote",
    FineIntention.ADDITIONAL_SOURCING: "Additional Sourcing (Other)",
    FineIntention.ADDITIONAL_INFORMATION: "Additional Information (Other)",
    FineIntention.SIMPLIFICATION: "Simplification",
    FineIntention.EMPHASIZE_DEEMPHASIZE: "Emphasize/De-emphasize Importance",
    FineIntention.DEFINE_TERM: "Define Term",
    FineIntention.STYLE_GUIDE: "Style-Guide Adherence",
    FineIntention.SYNTAX_CORRECTION: "Syntax Correction",
    FineIntention.TONAL_EDITS: "Tonal Edits",
    FineIntention.SENSITIVITY_CONSIDERATION: "Sensitivity Consideration",
    FineIntention.ANALYSIS: "Delete/Add/Update Analysis",
    FineIntention.BACKGROUND: "Delete/Add/Update Background",
    FineIntention.ANECDOTE: "Delete/Add/Update Anecdote",
    FineIntention.INCORRECT_LINK: "Incorrect Link",
    FineIntention.UNCHANGED: "Unchanged",
    FineIntention.OTHER_NONE: "Other/None",
}

# Short working definitions surfaced in the annotation UI and prompts.
DEFINITION: dict[FineIntention, str] = {
    FineIntention.EYEWITNESS_ACCOUNT: (
        "First-hand account of the events changes: a witness description is "
        "added, removed, or revised."
    ),
    FineIntention.EVENT: (
        "A real-world development changed and the sentence tracks it: new "
        "occurrences, revised counts, outcomes, or verb-level changes to what "
        "happened."
    ),
    FineIntention.SOURCE_DOC: (
        "A released written document (filing, report, statement) motivates "
        "adding, removing, or revising content."
    ),
    FineIntention.CORRECTION: (
        "The earlier version contained a factual error that the newer version "
        "fixes."
    ),
    FineIntention.QUOTE: (
        "Quoted material is added, removed, replaced, or revised, including "
        "swapping one speaker's quote for another's."
    ),
    FineIntention.ADDITIONAL_SOURCING: (
        "Evidence of new sourcing or confirmation appears without necessarily "
        "introducing a quote or document."
    ),
    FineIntention.ADDITIONAL_INFORMATION: (
        "New details or context appear that no more specific factual category "
        "covers."
    ),
    FineIntention.SIMPLIFICATION: (
        "The rewrite reduces complexity or breadth, possibly dropping "
        "information in the process."
    ),
    FineIntention.EMPHASIZE_DEEMPHASIZE: (
        "The sentence moves up or down in the document to raise or lower its "
        "prominence."
    ),
    FineIntention.DEFINE_TERM: (
        "A term or concept the reader may not know is explained or "
        "disambiguated."
    ),
    FineIntention.STYLE_GUIDE: (
        "The rewrite brings the sentence into compliance with a formal style "
        "guide."
    ),
    FineIntention.SYNTAX_CORRECTION: (
        "Grammar, spelling, or punctuation errors are fixed; strictly error "
        "repair, not preference."
    ),
    FineIntention.TONAL_EDITS: (
        "The rewrite reflects personal or artistic preference: punch, "
        "elegance, scenery."
    ),
    FineIntention.SENSITIVITY_CONSIDERATION: (
        "The original wording was inappropriate or potentially insensitive "
        "and is reworded."
    ),
    FineIntention.ANALYSIS: (
        "Inference from the presented information changes: expectations, "
        "interpretations, usually forward-looking."
    ),
    FineIntention.BACKGROUND: (
        "Contextualizing history, geography, or significance is added, "
        "removed, or revised; usually past-looking."
    ),
    FineIntention.ANECDOTE: (
        "A brief illustrative or humanizing account of a person or incident "
        "is added, removed, or revised."
    ),
    FineIntention.INCORRECT_LINK: (
        "The sentence pairing itself is wrong: the two linked sentences are "
        "unrelated. Applies only to edit or unchanged links; may carry the "
        "index of the wrongly linked sentence."
    ),
    FineIntention.UNCHANGED: "The linked sentences are the same sentence.",
    FineIntention.OTHER_NONE: (
        "No other category applies, or the decoded label was unrecognized."
    ),
}

LABEL_DELIMITER = " || "


def coarse_of(label: FineIntention) -> CoarseIntention:
    """Map a fine label to its single coarse category."""
    return _COARSE_OF[label]


def fine_labels(coarse: CoarseIntention | None = None) -> list[FineIntention]:
    """All fine labels, optionally restricted to one coarse category."""
    if coarse is None:
        return list(FineIntention)
    return [f for f in FineIntention if _COARSE_OF[f] is coarse]


@dataclass
class LabelSet:
    """Ordered, duplicate-free intention labels attached to one edit."""

    labels: list[FineIntention] = field(default_factory=list)
    # Only meaningful when IncorrectLink is present: index of the sentence in
    # the other version that should not have been linked.
    rejected_index: int | None = None

    def __post_init__(self) -> None:
        seen: set[FineIntention] = set()
        deduped = []
        for lab in self.labels:
            if lab not in seen:
                seen.add(lab)
                deduped.append(lab)
        self.labels = deduped

    def __iter__(self):
        return iter(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: FineIntention) -> bool:
        return label in self.labels

    def as_set(self) -> frozenset[FineIntention]:
        return frozenset(self.labels)

    def coarse_set(self) -> frozenset[CoarseIntention]:
        return frozenset(coarse_of(l) for l in self.labels)

    def display_list(self) -> list[str]:
        return [DISPLAY[l] for l in self.labels]


def serialize_labels(ls: LabelSet) -> str:
    """Join the canonical display strings with the literal delimiter."""
    return LABEL_DELIMITER.join(DISPLAY[l] for l in ls.labels)


def _levenshtein(a: str, b: str, cap: int) -> int:
    """Edit distance, early-exiting once the best possible value exceeds cap."""
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        best = i
        for j, cb in enumerate(b, 1):
            cost = prev[j - 1] + (ca != cb)
            cost = min(cost, prev[j] + 1, cur[j - 1] + 1)
            cur.append(cost)
            best = min(best, cost)
        if best > cap:
            return cap + 1
        prev = cur
    return prev[-1]


_LOWER_DISPLAY = {DISPLAY[l].lower(): l for l in FineIntention}

FUZZY_MAX_DISTANCE = 2


def _match_token(token: str) -> FineIntention | None:
    low = token.lower()
    if low in _LOWER_DISPLAY:
        return _LOWER_DISPLAY[low]
    best: FineIntention | None = None
    best_dist = FUZZY_MAX_DISTANCE + 1
    for display_low, label in _LOWER_DISPLAY.items():
        d = _levenshtein(low, display_low, FUZZY_MAX_DISTANCE)
        if d < best_dist:
            best_dist = d
            best = label
    return best if best_dist <= FUZZY_MAX_DISTANCE else None


def parse_labels(s: str) -> tuple[LabelSet, list[str]]:
    """Parse a delimiter-joined label string back into a LabelSet.

    Tokens are trimmed, matched case-insensitively against the canonical
    display strings, then fuzzily within edit distance 2. Unmatched tokens map
    to Other/None and are reported in the returned warning list, never
    silently dropped.
    """
    warnings: list[str] = []
    labels: list[FineIntention] = []
    s = s.strip()
    if not s:
        return LabelSet([]), warnings
    for token in s.split(LABEL_DELIMITER.strip()):
        token = token.strip()
        if not token:
            continue
        match = _match_token(token)
        if match is None:
            warnings.append(f"unrecognized label {token!r} mapped to Other/None")
            match = FineIntention.OTHER_NONE
        labels.append(match)
    return LabelSet(labels), warnings


def manifest() -> dict:
    """Machine-readable schema manifest consumed by the UI and prompts."""
    return {
        "version": 1,
        "delimiter": LABEL_DELIMITER,
        "coarse": [c.value for c in CoarseIntention],
        "labels": [
            {
                "id": label.value,
                "display": DISPLAY[label],
                "coarse": _COARSE_OF[label].value,
                "definition": DEFINITION[label],
            }
            for label in FineIntention
        ],
    }


def manifest_json() -> str:
    return json.dumps(manifest(), indent=2)


def validate(record) -> list[str]:
    """Guideline checks on an EditRecord; violations are data, not errors."""
    from revlab.align import ActionKind  # local import to avoid a cycle

    violations: list[str] = []
    kind = record.action.kind
    labset = record.labels
    added_or_deleted = kind in (ActionKind.ADDITION, ActionKind.DELETION)
    for label in labset:
        if added_or_deleted and label in (
            FineIntention.SYNTAX_CORRECTION,
            FineIntention.STYLE_GUIDE,
            FineIntention.TONAL_EDITS,
        ):
            violations.append(
                f"{DISPLAY[label]} applies to rewrites, not {kind.value} actions"
            )
        if label is FineIntention.UNCHANGED and kind is not ActionKind.UNCHANGED:
            violations.append(
                f"Unchanged label on a {kind.value} action"
            )
        if added_or_deleted and label is FineIntention.INCORRECT_LINK:
            violations.append(
                f"Incorrect Link only pertains to edited or unchanged links, "
                f"not {kind.value} actions"
            )
    return violations
