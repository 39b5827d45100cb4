"""Corpus balancing: keyword-replacement augmentation and seeded down-sampling.

Under-represented bug types grow by swapping one matched keyword for another
surface from the same canonical group; the over-represented FunctionalDefect
class is down-sampled uniformly at random. Everything is seeded, and the
per-type generators are derived by hashing (seed, type) so results cannot
depend on scheduling or type order.
"""
from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from .errors import EmptyCorpus, NoReplaceableKeyword
from .lexicon import LexiconSet, match_terms, normalize_text
from .report import BugType

ORIGIN_ORIGINAL = "original"
ORIGIN_SAMPLED = "sampled"
ORIGIN_AUGMENTED_PREFIX = "augmented:"

#: which lexicon category supplies replacement keywords for each bug type
TYPE_KEYWORD_CATEGORY = {
    BugType.FUNCTIONAL_DEFECT: "functional_keywords",
    BugType.CRASH: "crash_keywords",
    BugType.LAYOUT_PROBLEM: "layout_keywords",
    BugType.DISPLAY_PROBLEM: "display_keywords",
    BugType.NETWORK_ERROR: "network_keywords",
    BugType.NULL_SCREEN: "null_screen_keywords",
    BugType.PERFORMANCE_PROBLEM: "performance_keywords",
    BugType.ERROR_PROMPT: "prompt_words",
    BugType.GARBLED_ERROR: "garbled_keywords",
    BugType.TRANSITION_PROBLEM: "transition_keywords",
}


@dataclass(frozen=True)
class LabeledDescription:
    text: str
    bug_type: BugType
    origin: str = ORIGIN_ORIGINAL
    id: str | None = None

    @property
    def is_augmented(self) -> bool:
        return self.origin.startswith(ORIGIN_AUGMENTED_PREFIX)


@dataclass(frozen=True)
class AugmentationPlan:
    per_type_target: dict[BugType, int] = field(hash=False)
    seed: int = 0

    def __post_init__(self) -> None:
        for bug_type in BugType:
            target = self.per_type_target.get(bug_type)
            if target is None:
                raise ValueError(f"plan is missing a target for {bug_type.value}")
            if target < 1:
                raise ValueError(f"target for {bug_type.value} must be positive")


@dataclass
class BalanceWarning:
    bug_type: BugType
    wanted: int
    produced: int

    def __str__(self) -> str:
        return (
            f"unreachable target for {self.bug_type.value}: wanted "
            f"{self.wanted}, produced {self.produced}"
        )


@dataclass
class BalanceResult:
    entries: list[LabeledDescription]
    warnings: list[BalanceWarning]


def _derived_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _all_variants(desc: LabeledDescription, lexicons: LexiconSet) -> list[str]:
    """Every distinct single-keyword substitution of the description, in a
    deterministic base order (match position, then group surface order)."""
    category = TYPE_KEYWORD_CATEGORY[desc.bug_type]
    if not lexicons.has_category(category):
        return []
    normalized = normalize_text(desc.text)
    matches = match_terms(normalized, lexicons, category)
    groups = lexicons.canonical_groups(category)
    variants: list[str] = []
    seen = {normalized}
    for match in matches:
        start, end = match.char_span
        for surface in groups.get(match.canonical, []):
            if surface == match.surface:
                continue
            variant = normalized[:start] + surface + normalized[end:]
            if variant not in seen:
                seen.add(variant)
                variants.append(variant)
    return variants


def augment_description(
    desc: LabeledDescription, lexicons: LexiconSet, rng_seed: int
) -> list[LabeledDescription]:
    """Keyword-replacement variants of one description, seeded order.

    Raises NoReplaceableKeyword when the text holds no keyword of its type's
    replacement category (callers skip such descriptions).
    """
    variants = _all_variants(desc, lexicons)
    if not variants:
        raise NoReplaceableKeyword(
            f"no replaceable {desc.bug_type.value} keyword in {desc.text!r}"
        )
    rng = random.Random(rng_seed)
    rng.shuffle(variants)
    source_id = desc.id if desc.id is not None else "unidentified"
    return [
        LabeledDescription(
            text=variant,
            bug_type=desc.bug_type,
            origin=f"{ORIGIN_AUGMENTED_PREFIX}{source_id}",
        )
        for variant in variants
    ]


def balance_corpus(
    corpus: list[LabeledDescription],
    plan: AugmentationPlan,
    lexicons: LexiconSet,
) -> BalanceResult:
    """Bring every bug type to its target count.

    Types above target are down-sampled uniformly at random; types below grow
    by augmenting randomly chosen sources until the target is met or distinct
    variants run out (reported as a warning, not an abort). All originals of
    under-target types are retained.
    """
    if not corpus:
        raise EmptyCorpus("cannot balance an empty corpus")
    identified = [
        entry if entry.id is not None else
        LabeledDescription(entry.text, entry.bug_type, entry.origin, id=f"d{i:05d}")
        for i, entry in enumerate(corpus)
    ]
    by_type: dict[BugType, list[LabeledDescription]] = {t: [] for t in BugType}
    for entry in identified:
        by_type[entry.bug_type].append(entry)

    output: list[LabeledDescription] = []
    warnings: list[BalanceWarning] = []
    for bug_type in BugType:
        entries = by_type[bug_type]
        target = plan.per_type_target[bug_type]
        if not entries:
            warnings.append(BalanceWarning(bug_type, target, 0))
            continue
        rng = random.Random(_derived_seed(plan.seed, bug_type.value))
        if len(entries) > target:
            picked = rng.sample(range(len(entries)), target)
            for i in sorted(picked):
                entry = entries[i]
                output.append(
                    LabeledDescription(entry.text, bug_type, ORIGIN_SAMPLED, entry.id)
                )
            continue
        output.extend(entries)
        need = target - len(entries)
        if need == 0:
            continue
        pools: list[list[LabeledDescription]] = []
        for j, source in enumerate(entries):
            try:
                pool = augment_description(
                    source, lexicons, _derived_seed(plan.seed, bug_type.value, j)
                )
            except NoReplaceableKeyword:
                continue
            pools.append(pool)
        while need > 0 and pools:
            pick = rng.randrange(len(pools))
            output.append(pools[pick].pop(0))
            if not pools[pick]:
                pools.pop(pick)
            need -= 1
        if need > 0:
            warnings.append(BalanceWarning(bug_type, target, target - need))
    return BalanceResult(entries=output, warnings=warnings)


def read_corpus(path: str | Path) -> list[LabeledDescription]:
    """Read a JSONL corpus: one {"text", "bug_type"[, "origin"]} per line."""
    entries = []
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines()):
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        entries.append(
            LabeledDescription(
                text=obj["text"],
                bug_type=BugType.from_name(obj["bug_type"]),
                origin=obj.get("origin", ORIGIN_ORIGINAL),
                id=obj.get("id", f"d{i:05d}"),
            )
        )
    return entries


def write_corpus(path: str | Path, entries: list[LabeledDescription]) -> None:
    lines = [
        json.dumps(
            {"text": e.text, "bug_type": e.bug_type.value, "origin": e.origin},
            ensure_ascii=False,
        )
        for e in entries
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
