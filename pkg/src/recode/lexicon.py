"""Lexicon loading and keyword matching.

The pipeline is driven by small word lists: locating features (colors,
positions, widget types), negation and double-negation patterns, prompt
verbs, and per-bug-type keyword groups. Each category lives in one UTF-8
text file (`canonical<TAB>surface` or bare `surface`, `#` comments) so users
can extend or replace the bundled defaults.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DuplicateTerm,
    EmptyCategory,
    InvalidPattern,
    MissingCategory,
    UnknownCategory,
)

REQUIRED_CATEGORIES = (
    "color_words",
    "position_words",
    "type_words",
    "negative_words",
    "double_negatives",
    "prompt_words",
    "crash_keywords",
    "network_keywords",
    "null_screen_keywords",
    "performance_keywords",
)

# augmentation keyword groups for types without a specific strategy lexicon
EXTRA_CATEGORIES = (
    "functional_keywords",
    "layout_keywords",
    "display_keywords",
    "transition_keywords",
    "garbled_keywords",
)

#: error HTTP response status codes recognized on screen texts
HTTP_STATUS_PATTERN = re.compile(r"(?<![0-9])(404|408|500|502|503|504)(?![0-9])")

#: canonical 12-color vocabulary with reference RGB values
CANONICAL_COLORS: tuple[tuple[str, tuple[int, int, int]], ...] = (
    ("black", (0, 0, 0)),
    ("white", (255, 255, 255)),
    ("gray", (128, 128, 128)),
    ("red", (255, 0, 0)),
    ("orange", (255, 165, 0)),
    ("yellow", (255, 255, 0)),
    ("green", (0, 128, 0)),
    ("cyan", (0, 255, 255)),
    ("blue", (0, 0, 255)),
    ("purple", (128, 0, 128)),
    ("pink", (255, 192, 203)),
    ("brown", (150, 75, 0)),
)

#: 3x3 grid position vocabulary, row-major
POSITION_NAMES = (
    "top-left",
    "top",
    "top-right",
    "left",
    "center",
    "right",
    "bottom-left",
    "bottom",
    "bottom-right",
)

_WS_RE = re.compile(r"\s+")


def collapse_whitespace(text: str) -> str:
    return _WS_RE.sub(" ", text).strip()


def normalize_text(text: str) -> str:
    """Lowercase and collapse whitespace runs; all matching happens on this form."""
    return collapse_whitespace(text).lower()


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def _has_cjk(term: str) -> bool:
    return any(
        "぀" <= ch <= "ヿ" or "㐀" <= ch <= "鿿" or "豈" <= ch <= "﫿"
        for ch in term
    )


@dataclass(frozen=True)
class Term:
    canonical: str
    surface: str


@dataclass(frozen=True)
class TermMatch:
    category: str
    canonical: str
    surface: str
    char_span: tuple[int, int]


@dataclass
class LexiconSet:
    """Immutable bundle of every lexicon category plus the loading-icon templates."""

    categories: dict[str, tuple[Term, ...]]
    double_negative_patterns: tuple[str, ...]
    loading_icon_templates: tuple[tuple[str, np.ndarray], ...] = field(repr=False, default=())

    def terms(self, category: str) -> tuple[Term, ...]:
        try:
            return self.categories[category]
        except KeyError:
            raise UnknownCategory(f"no lexicon category named {category!r}") from None

    def has_category(self, category: str) -> bool:
        return category in self.categories

    def surfaces(self, category: str) -> list[str]:
        return [t.surface for t in self.terms(category)]

    def canonical_groups(self, category: str) -> dict[str, list[str]]:
        groups: dict[str, list[str]] = {}
        for t in self.terms(category):
            groups.setdefault(t.canonical, []).append(t.surface)
        return groups


def _parse_category_file(path: Path, category: str) -> tuple[Term, ...]:
    terms: list[Term] = []
    seen: set[str] = set()
    for raw_line in path.read_text(encoding="utf-8").splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" in line:
            canonical, surface = line.split("\t", 1)
        else:
            canonical = surface = line
        canonical = collapse_whitespace(canonical)
        surface = normalize_text(surface)
        if not surface or not canonical:
            continue
        if surface in seen:
            raise DuplicateTerm(f"{category}: duplicate term {surface!r}")
        seen.add(surface)
        terms.append(Term(canonical=canonical, surface=surface))
    if not terms:
        raise EmptyCategory(f"{category}: no terms in {path}")
    return tuple(terms)


def _load_icon_templates(icons_dir: Path) -> tuple[tuple[str, np.ndarray], ...]:
    templates = []
    if icons_dir.is_dir():
        for png in sorted(icons_dir.glob("*.png")):
            with Image.open(png) as img:
                mask = np.asarray(img.convert("L"), dtype=np.uint8) < 128
            templates.append((png.stem, mask))
    return tuple(templates)


def bundled_lexicon_dir() -> Path:
    """Directory of the lexicon files shipped inside the package."""
    return Path(str(resources.files("recode").joinpath("data", "lexicons")))


def _validate_double_negatives(
    patterns: tuple[Term, ...], negative_terms: tuple[Term, ...]
) -> tuple[str, ...]:
    negative_lex = LexiconSet(categories={"negative_words": negative_terms},
                              double_negative_patterns=())
    out = []
    for pattern in patterns:
        count = len(match_terms(pattern.surface, negative_lex, "negative_words"))
        if count < 2 or count % 2 != 0:
            raise InvalidPattern(
                f"double_negatives: pattern {pattern.surface!r} must contain an even "
                f"number (>=2) of negative terms, found {count}"
            )
        out.append(pattern.surface)
    return tuple(out)


def load_lexicons(lexicon_dir: str | Path | None = None) -> LexiconSet:
    """Load all lexicon categories from a directory (bundled defaults when omitted)."""
    base = Path(lexicon_dir) if lexicon_dir is not None else bundled_lexicon_dir()
    categories: dict[str, tuple[Term, ...]] = {}
    for category in REQUIRED_CATEGORIES:
        path = base / f"{category}.txt"
        if not path.is_file():
            raise MissingCategory(f"missing lexicon file {path}")
        categories[category] = _parse_category_file(path, category)
    for category in EXTRA_CATEGORIES:
        path = base / f"{category}.txt"
        if path.is_file():
            categories[category] = _parse_category_file(path, category)
    patterns = _validate_double_negatives(
        categories["double_negatives"], categories["negative_words"]
    )
    templates = _load_icon_templates(base / "loading_icons")
    return LexiconSet(
        categories=categories,
        double_negative_patterns=patterns,
        loading_icon_templates=templates,
    )


def _candidate_matches(text: str, term: Term) -> list[tuple[int, int]]:
    spans = []
    start = 0
    surface = term.surface
    needs_boundary = not _has_cjk(surface)
    while True:
        idx = text.find(surface, start)
        if idx < 0:
            break
        end = idx + len(surface)
        ok = True
        if needs_boundary:
            if idx > 0 and _is_word_char(text[idx - 1]) and _is_word_char(surface[0]):
                ok = False
            if end < len(text) and _is_word_char(text[end - 1]) and _is_word_char(text[end]):
                ok = False
        if ok:
            spans.append((idx, end))
        start = idx + 1
    return spans


def match_terms(text: str, lexicons: LexiconSet, category: str) -> list[TermMatch]:
    """All non-overlapping lexicon matches in `text`, longest match first.

    Matching is case-insensitive over the normalized text; spans index into
    that normalized form. Latin-script terms require word boundaries, CJK
    terms do not.
    """
    terms = lexicons.terms(category)
    normalized = normalize_text(text)
    candidates: list[tuple[int, int, int, Term]] = []
    for order, term in enumerate(terms):
        for start, end in _candidate_matches(normalized, term):
            candidates.append((start, -(end - start), order, term))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    matches: list[TermMatch] = []
    taken_until = -1
    for start, neg_len, _, term in candidates:
        end = start - neg_len
        if start <= taken_until:
            continue
        matches.append(
            TermMatch(
                category=category,
                canonical=term.canonical,
                surface=normalized[start:end],
                char_span=(start, end),
            )
        )
        taken_until = end - 1
    return matches
