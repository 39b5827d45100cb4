"""Corpus loading, tokenization, and vocabulary handling."""
from __future__ import annotations

import json
import re
from pathlib import Path

from . import BUG_TYPES, CorpusTooSmall

PAD, UNK, CLS = 0, 1, 2
SPECIALS = ("[PAD]", "[UNK]", "[CLS]")

_LATIN_RE = re.compile(r"[a-z0-9]+")
_CJK_RE = re.compile(r"[㐀-鿿぀-ヿ豈-﫿]+")


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; CJK runs become overlapping character bigrams."""
    tokens: list[str] = []
    pos = 0
    lowered = text.lower()
    while pos < len(lowered):
        latin = _LATIN_RE.match(lowered, pos)
        if latin:
            tokens.append(latin.group())
            pos = latin.end()
            continue
        cjk = _CJK_RE.match(lowered, pos)
        if cjk:
            run = cjk.group()
            if len(run) == 1:
                tokens.append(run)
            else:
                tokens.extend(run[i : i + 2] for i in range(len(run) - 1))
            pos = cjk.end()
            continue
        pos += 1
    return tokens


def read_jsonl(path: str | Path) -> list[tuple[str, str]]:
    """(text, bug_type) rows from a JSONL corpus file."""
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        bug_type = obj["bug_type"]
        if bug_type not in BUG_TYPES:
            raise ValueError(f"unknown bug type {bug_type!r}")
        rows.append((obj["text"], bug_type))
    if len({bug_type for _, bug_type in rows}) < 2:
        raise CorpusTooSmall(
            f"corpus must cover at least 2 classes, found {len({b for _, b in rows})}"
        )
    return rows


def build_vocab(rows: list[tuple[str, str]], min_count: int = 1) -> dict[str, int]:
    counts: dict[str, int] = {}
    for text, _ in rows:
        for token in tokenize(text):
            counts[token] = counts.get(token, 0) + 1
    vocab = {name: i for i, name in enumerate(SPECIALS)}
    for token in sorted(counts):
        if counts[token] >= min_count:
            vocab[token] = len(vocab)
    return vocab


def encode(text: str, vocab: dict[str, int], max_len: int) -> list[int]:
    ids = [CLS] + [vocab.get(token, UNK) for token in tokenize(text)]
    ids = ids[:max_len]
    return ids + [PAD] * (max_len - len(ids))
