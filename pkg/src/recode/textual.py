"""Textual description decomposition: widget mentions, polarity, prompt text.

A dependency parser is deliberately avoided; mentions are built from lexicon
anchors (widget-type words and quoted literals) with clause-bounded windows
for attaching color and position words. The window machinery is configurable
so a real parser can be slotted behind the same signatures later.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .lexicon import LexiconSet, TermMatch, collapse_whitespace, match_terms

CLAUSE_BREAKERS = set(".!?;,。！？；，…")

#: opening quote -> closing quote
QUOTE_PAIRS = {
    "'": "'",
    '"': '"',
    "‘": "’",  # curly single
    "“": "”",  # curly double
    "「": "」",  # CJK corner
    "『": "』",  # CJK white corner
}

#: tokens never promoted to text literals by the capitalization rule
_LITERAL_STOPWORDS = {
    "the", "a", "an", "this", "that", "these", "those", "my", "your", "its",
    "it", "app", "page", "screen", "i", "we", "when", "after", "then",
}

_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+|[㐀-鿿぀-ヿ豈-﫿]")

ATTACH_WINDOW_TOKENS = 6
MERGE_WINDOW_TOKENS = 2


@dataclass
class WidgetMention:
    """One widget referenced in the description, with its locating features."""

    head_span: tuple[int, int]
    color: str | None = None
    position: str | None = None
    text_literal: str | None = None
    type_name: str | None = None

    def feature_count(self) -> int:
        return sum(
            f is not None
            for f in (self.color, self.position, self.text_literal, self.type_name)
        )


@dataclass
class TextAnalysis:
    mentions: list[WidgetMention]
    polarity: str  # "negative" | "positive"
    prompt_text: str | None


def _clause_ids(text: str) -> list[int]:
    ids = []
    clause = 0
    for ch in text:
        ids.append(clause)
        if ch in CLAUSE_BREAKERS:
            clause += 1
    return ids


def _token_spans(text: str) -> list[tuple[int, int]]:
    return [m.span() for m in _TOKEN_RE.finditer(text)]


def _token_index_of(pos: int, spans: list[tuple[int, int]]) -> int:
    """Index of the token containing `pos`, or of the nearest one before it."""
    best = 0
    for i, (start, _end) in enumerate(spans):
        if start <= pos:
            best = i
        else:
            break
    return best


def _quoted_spans(text: str) -> list[tuple[int, int]]:
    """Content spans of quoted strings, left to right, non-nested."""
    spans = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in QUOTE_PAIRS:
            closer = QUOTE_PAIRS[ch]
            j = text.find(closer, i + 1)
            if j > i + 1:
                spans.append((i + 1, j))
                i = j + 1
                continue
        i += 1
    return spans


@dataclass
class _Anchor:
    head_span: tuple[int, int]
    token_lo: int
    token_hi: int
    clause: int
    type_name: str | None = None
    text_literal: str | None = None
    color: str | None = None
    position: str | None = None


def _span_tokens(span: tuple[int, int], spans: list[tuple[int, int]]) -> tuple[int, int]:
    lo = _token_index_of(span[0], spans)
    hi = _token_index_of(max(span[0], span[1] - 1), spans)
    return lo, hi


def _token_distance(a: _Anchor, lo: int, hi: int) -> int:
    if hi < a.token_lo:
        return a.token_lo - hi
    if lo > a.token_hi:
        return lo - a.token_hi
    return 0


def extract_mentions(text: str, lexicons: LexiconSet) -> list[WidgetMention]:
    """Widget mentions with their C/P/X/Y locating features.

    Anchors are widget-type words and quoted literals; a quoted literal (or a
    capitalized token) right next to a type word joins that mention as its text
    literal. Color and position words attach to the nearest anchor within a
    6-token window inside the same clause. Mentions with no feature at all are
    dropped.
    """
    collapsed = collapse_whitespace(text)
    lowered = collapsed.lower()
    case_ok = len(collapsed) == len(lowered)
    tokens = _token_spans(lowered)
    if not tokens:
        return []
    clauses = _clause_ids(lowered)

    def clause_at(pos: int) -> int:
        return clauses[min(pos, len(clauses) - 1)]

    type_matches = match_terms(lowered, lexicons, "type_words")
    quoted = _quoted_spans(lowered)
    quoted_used = [False] * len(quoted)

    anchors: list[_Anchor] = []
    for match in type_matches:
        lo, hi = _span_tokens(match.char_span, tokens)
        anchor = _Anchor(
            head_span=match.char_span,
            token_lo=lo,
            token_hi=hi,
            clause=clause_at(match.char_span[0]),
            type_name=None if match.canonical == "widget" else match.canonical,
        )
        # a quoted literal just before or after the type word names the widget
        for qi, (qs, qe) in enumerate(quoted):
            if quoted_used[qi]:
                continue
            qlo, qhi = _span_tokens((qs, qe), tokens)
            if clause_at(qs) != anchor.clause:
                continue
            if _token_distance(anchor, qlo, qhi) <= MERGE_WINDOW_TOKENS:
                anchor.text_literal = lowered[qs:qe].strip()
                anchor.head_span = (min(anchor.head_span[0], qs), max(anchor.head_span[1], qe))
                anchor.token_lo = min(anchor.token_lo, qlo)
                anchor.token_hi = max(anchor.token_hi, qhi)
                quoted_used[qi] = True
                break
        # otherwise an adjacent capitalized token may name it
        if anchor.text_literal is None and case_ok:
            for ti in (anchor.token_lo - 1, anchor.token_hi + 1):
                if not (0 <= ti < len(tokens)):
                    continue
                ts, te = tokens[ti]
                word = collapsed[ts:te]
                if clause_at(ts) != anchor.clause:
                    continue
                if not word[:1].isupper():
                    continue
                if word.lower() in _LITERAL_STOPWORDS:
                    continue
                if word.lower() in {m.surface for m in type_matches}:
                    continue
                anchor.text_literal = word.lower()
                break
        anchors.append(anchor)

    for qi, (qs, qe) in enumerate(quoted):
        if quoted_used[qi] or qe <= qs:
            continue
        literal = lowered[qs:qe].strip()
        if not literal:
            continue
        qlo, qhi = _span_tokens((qs, qe), tokens)
        anchors.append(
            _Anchor(
                head_span=(qs, qe),
                token_lo=qlo,
                token_hi=qhi,
                clause=clause_at(qs),
                text_literal=literal,
            )
        )

    anchors.sort(key=lambda a: a.head_span)

    # attach color/position matches to the nearest anchor in the same clause
    feature_matches: list[tuple[str, TermMatch]] = []
    for category, slot in (("color_words", "color"), ("position_words", "position")):
        for match in match_terms(lowered, lexicons, category):
            feature_matches.append((slot, match))
    feature_matches.sort(key=lambda fm: fm[1].char_span)

    for slot, match in feature_matches:
        lo, hi = _span_tokens(match.char_span, tokens)
        clause = clause_at(match.char_span[0])
        best: _Anchor | None = None
        best_dist = None
        for anchor in anchors:
            if anchor.clause != clause:
                continue
            if getattr(anchor, slot) is not None:
                continue
            dist = _token_distance(anchor, lo, hi)
            if dist > ATTACH_WINDOW_TOKENS:
                continue
            if best_dist is None or dist < best_dist:
                best, best_dist = anchor, dist
        if best is not None:
            setattr(best, slot, match.canonical)

    mentions = [
        WidgetMention(
            head_span=a.head_span,
            color=a.color,
            position=a.position,
            text_literal=a.text_literal,
            type_name=a.type_name,
        )
        for a in anchors
    ]
    return [m for m in mentions if m.feature_count() >= 1]


def polarity(text: str, lexicons: LexiconSet) -> str:
    """"negative" iff any negative term is left unpaired after removing
    matched double-negative patterns, else "positive"."""
    negatives = match_terms(text, lexicons, "negative_words")
    count = len(negatives)
    normalized = collapse_whitespace(text).lower()
    pattern_hits = 0
    for pattern in lexicons.double_negative_patterns:
        start = 0
        while True:
            idx = normalized.find(pattern, start)
            if idx < 0:
                break
            pattern_hits += 1
            start = idx + len(pattern)
    adjusted = count - 2 * pattern_hits
    return "negative" if adjusted >= 1 else "positive"


def extract_prompt_text(text: str, lexicons: LexiconSet) -> str | None:
    """Text quoted on screen per the description: the first quoted span after a
    prompt word, or the prompt word's clause remainder."""
    prompts = match_terms(text, lexicons, "prompt_words")
    if not prompts:
        return None
    lowered = collapse_whitespace(text).lower()
    first = prompts[0]
    for qs, qe in _quoted_spans(lowered):
        if qs >= first.char_span[1]:
            content = lowered[qs:qe].strip()
            return content or None
    end = first.char_span[1]
    stop = len(lowered)
    for i in range(end, len(lowered)):
        if lowered[i] in CLAUSE_BREAKERS:
            stop = i
            break
    remainder = lowered[end:stop].strip()
    return remainder or None


def analyze_text(text: str, lexicons: LexiconSet) -> TextAnalysis:
    return TextAnalysis(
        mentions=extract_mentions(text, lexicons),
        polarity=polarity(text, lexicons),
        prompt_text=extract_prompt_text(text, lexicons),
    )
