"""Bug-type classification: tokenization, a smoothed multinomial baseline,
top-3 prediction, and multiclass evaluation.

The baseline is a plain token-count model with additive smoothing behind the
same top-3 interface an external plugin classifier implements, so the rest of
the pipeline never cares which one is active.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DegenerateCorpus, EmptySet
from .lexicon import LexiconSet, normalize_text
from .report import BugType, TopKPrediction

_LATIN_RE = re.compile(r"[a-z0-9]+")
_CJK_RE = re.compile(r"[㐀-鿿぀-ヿ豈-﫿]+")

MODEL_FORMAT = "recode-baseline"
MODEL_VERSION = 1


def _cjk_bigrams(run: str) -> list[str]:
    if len(run) == 1:
        return [run]
    return [run[i : i + 2] for i in range(len(run) - 1)]


def tokenize_for_classifier(text: str, lexicons: LexiconSet | None = None) -> list[str]:
    """Case-folded tokens: Latin words split on non-alphanumerics, CJK runs as
    overlapping character bigrams, multiword lexicon terms kept whole."""
    normalized = normalize_text(text)
    if not normalized:
        return []

    protected: list[tuple[int, int, str]] = []
    if lexicons is not None:
        spans: list[tuple[int, int, str]] = []
        for category in lexicons.categories:
            if category == "double_negatives":
                continue
            for term in lexicons.terms(category):
                if " " not in term.surface:
                    continue
                start = 0
                while True:
                    idx = normalized.find(term.surface, start)
                    if idx < 0:
                        break
                    spans.append((idx, idx + len(term.surface), term.surface))
                    start = idx + 1
        spans.sort(key=lambda s: (s[0], -(s[1] - s[0])))
        taken = -1
        for s, e, surface in spans:
            if s > taken:
                protected.append((s, e, surface.replace(" ", "_")))
                taken = e - 1

    tokens: list[str] = []

    def tokenize_plain(segment: str) -> None:
        pos = 0
        while pos < len(segment):
            latin = _LATIN_RE.match(segment, pos)
            if latin:
                tokens.append(latin.group())
                pos = latin.end()
                continue
            cjk = _CJK_RE.match(segment, pos)
            if cjk:
                tokens.extend(_cjk_bigrams(cjk.group()))
                pos = cjk.end()
                continue
            pos += 1

    cursor = 0
    for s, e, token in protected:
        tokenize_plain(normalized[cursor:s])
        tokens.append(token)
        cursor = e
    tokenize_plain(normalized[cursor:])
    return tokens


@dataclass
class BaselineModel:
    """Multinomial token-count model with additive smoothing over all 10 classes."""

    smoothing: float
    class_counts: dict[BugType, int]
    token_counts: dict[BugType, dict[str, int]]
    vocab: tuple[str, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if not self.vocab:
            seen: set[str] = set()
            for counts in self.token_counts.values():
                seen.update(counts)
            self.vocab = tuple(sorted(seen))

    @property
    def log_priors(self) -> dict[BugType, float]:
        total = sum(self.class_counts.values())
        denom = total + self.smoothing * len(BugType)
        return {
            t: math.log((self.class_counts.get(t, 0) + self.smoothing) / denom)
            for t in BugType
        }

    def class_token_total(self, bug_type: BugType) -> int:
        return sum(self.token_counts.get(bug_type, {}).values())

    def token_log_prob(self, bug_type: BugType, token: str) -> float:
        counts = self.token_counts.get(bug_type, {})
        denom = self.class_token_total(bug_type) + self.smoothing * (len(self.vocab) + 1)
        return math.log((counts.get(token, 0) + self.smoothing) / denom)


def train_baseline(
    corpus: list,
    smoothing: float = 1.0,
    lexicons: LexiconSet | None = None,
) -> BaselineModel:
    """Fit the baseline on (text, bug_type) pairs.

    Accepts any objects with `.text` and `.bug_type` attributes. Counting is
    order-independent, so training is deterministic for any corpus ordering.
    """
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    class_counts: dict[BugType, int] = {}
    token_counts: dict[BugType, dict[str, int]] = {}
    for item in corpus:
        bug_type = item.bug_type
        class_counts[bug_type] = class_counts.get(bug_type, 0) + 1
        bucket = token_counts.setdefault(bug_type, {})
        for token in tokenize_for_classifier(item.text, lexicons):
            bucket[token] = bucket.get(token, 0) + 1
    if len(class_counts) < 2:
        raise DegenerateCorpus(
            f"need examples from at least 2 classes, got {len(class_counts)}"
        )
    return BaselineModel(
        smoothing=smoothing, class_counts=class_counts, token_counts=token_counts
    )


def _posteriors(model: BaselineModel, text: str,
                lexicons: LexiconSet | None = None) -> dict[BugType, float]:
    token_freq: dict[str, int] = {}
    for token in tokenize_for_classifier(text, lexicons):
        token_freq[token] = token_freq.get(token, 0) + 1
    priors = model.log_priors
    alpha = model.smoothing
    v_plus_one = len(model.vocab) + 1
    scores = {}
    for bug_type in BugType:
        counts = model.token_counts.get(bug_type, {})
        log_denom = math.log(model.class_token_total(bug_type) + alpha * v_plus_one)
        score = priors[bug_type]
        for token, freq in token_freq.items():
            score += freq * (math.log(counts.get(token, 0) + alpha) - log_denom)
        scores[bug_type] = score
    peak = max(scores.values())
    expd = {t: math.exp(s - peak) for t, s in scores.items()}
    total = sum(expd.values())
    return {t: v / total for t, v in expd.items()}


def predict_top3(model, text: str, lexicons: LexiconSet | None = None) -> TopKPrediction:
    """Top-3 types with normalized confidences; ties break by taxonomy order."""
    if isinstance(model, BaselineModel):
        posterior = _posteriors(model, text, lexicons)
        ranked = sorted(posterior.items(), key=lambda kv: (-kv[1], kv[0].order))
        return TopKPrediction(entries=tuple((t, c) for t, c in ranked[:3]))
    # duck-typed plugin classifiers expose predict_top3(text)
    return model.predict_top3(text)


@dataclass
class MulticlassMetrics:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict[BugType, tuple[float, float, float, int]]
    confusion: list[list[int]]  # [true][predicted], taxonomy order
    k: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "per_class": {
                t.value: {"precision": p, "recall": r, "f1": f, "support": s}
                for t, (p, r, f, s) in self.per_class.items()
            },
            "confusion": self.confusion,
        }


def metrics_from_confusion(confusion: list[list[int]], hits: int, total: int,
                           k: int) -> MulticlassMetrics:
    """Macro metrics per class from a [true][predicted] count matrix."""
    types = list(BugType)
    per_class: dict[BugType, tuple[float, float, float, int]] = {}
    precisions, recalls, f1s = [], [], []
    for i, bug_type in enumerate(types):
        support = sum(confusion[i])
        predicted = sum(confusion[r][i] for r in range(len(types)))
        tp = confusion[i][i]
        precision = tp / predicted if predicted > 0 else 0.0
        recall = tp / support if support > 0 else 0.0
        f1 = (2 * precision * recall / (precision + recall)) if (precision + recall) > 0 else 0.0
        per_class[bug_type] = (precision, recall, f1, support)
        if support > 0:
            precisions.append(precision)
            recalls.append(recall)
            f1s.append(f1)
    def mean(vals: list[float]) -> float:
        return sum(vals) / len(vals) if vals else 0.0
    return MulticlassMetrics(
        accuracy=hits / total if total else 0.0,
        macro_precision=mean(precisions),
        macro_recall=mean(recalls),
        macro_f1=mean(f1s),
        per_class=per_class,
        confusion=confusion,
        k=k,
    )


def evaluate_classifier(model, labeled: list, k: int = 1,
                        lexicons: LexiconSet | None = None) -> MulticlassMetrics:
    """Top-k accuracy plus macro metrics from top-1 assignments."""
    if not labeled:
        raise EmptySet("no labeled examples to evaluate")
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    n = len(BugType)
    confusion = [[0] * n for _ in range(n)]
    hits = 0
    for item in labeled:
        prediction = predict_top3(model, item.text, lexicons)
        predicted_types = prediction.types
        if item.bug_type in predicted_types[:k]:
            hits += 1
        confusion[item.bug_type.order][predicted_types[0].order] += 1
    return metrics_from_confusion(confusion, hits, len(labeled), k)


def save_baseline(model: BaselineModel, path: str | Path) -> None:
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "smoothing": model.smoothing,
        "class_counts": {t.value: c for t, c in sorted(model.class_counts.items(),
                                                       key=lambda kv: kv[0].order)},
        "token_counts": {
            t.value: dict(sorted(counts.items()))
            for t, counts in sorted(model.token_counts.items(), key=lambda kv: kv[0].order)
        },
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, indent=1),
                          encoding="utf-8")


def load_baseline(path: str | Path) -> BaselineModel:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("format") != MODEL_FORMAT or data.get("version") != MODEL_VERSION:
        raise ValueError(f"{path}: not a recognized baseline model file")
    return BaselineModel(
        smoothing=float(data["smoothing"]),
        class_counts={BugType.from_name(t): int(c) for t, c in data["class_counts"].items()},
        token_counts={
            BugType.from_name(t): {tok: int(c) for tok, c in counts.items()}
            for t, counts in data["token_counts"].items()
        },
    )
