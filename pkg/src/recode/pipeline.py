"""Corpus-level orchestration: build a classifier, run detection over bundles,
and score against planted ground truth."""
from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .classifier import load_baseline, train_baseline
from .config import PipelineConfig
from .detector import DetectionRecord, detect
from .errors import PluginUnavailable, RecodeError, RootNotFound, UnlabeledReport
from .harness import BinaryMetrics, template_corpus, write_results
from .lexicon import LexiconSet, load_lexicons
from .plugin import PluginClassifier, PluginOcr, PluginTyper
from .report import TestReport, iter_bundle_dirs, load_report
from .screen import sidecar_ocr

log = logging.getLogger(__name__)


def build_lexicons(config: PipelineConfig) -> LexiconSet:
    return load_lexicons(config.resolve_lexicon_dir())


def build_model(config: PipelineConfig):
    """The classifier the run will use; plugin failures fall back to the
    baseline when allowed."""
    if config.classifier == "plugin":
        if not config.plugin_cmd:
            raise ValueError("classifier 'plugin' requires a plugin command")
        try:
            return PluginClassifier(config.plugin_cmd)
        except PluginUnavailable:
            if not config.plugin_fallback:
                raise
            log.warning("classifier plugin unavailable, falling back to baseline")
    if config.model_path:
        return load_baseline(config.model_path)
    corpus = template_corpus(config.template_per_class, seed=config.seed)
    return train_baseline(corpus, smoothing=config.smoothing)


def build_ocr(config: PipelineConfig):
    if config.ocr == "plugin":
        if not config.ocr_cmd:
            raise ValueError("ocr 'plugin' requires a plugin command")
        return PluginOcr(config.ocr_cmd)
    return sidecar_ocr


def build_typer(config: PipelineConfig):
    if config.typer == "plugin":
        if not config.typer_cmd:
            raise ValueError("typer 'plugin' requires a plugin command")
        return PluginTyper(config.typer_cmd)
    return None  # decompose_screenshot falls back to the heuristic typer


def detect_report(report: TestReport, model, lexicons: LexiconSet,
                  config: PipelineConfig, ocr=None, typer=None) -> DetectionRecord:
    return detect(
        report,
        model,
        lexicons,
        fusion=config.fusion,
        weights=config.weights,
        cfg=config.screen,
        ocr=ocr,
        typer=typer,
        crash_fallback=config.crash_fullscreen_fallback,
    )


def detect_corpus(
    corpus_dir: str | Path,
    config: PipelineConfig | None = None,
    model=None,
    lexicons: LexiconSet | None = None,
) -> tuple[list[DetectionRecord], list[tuple[str, str]]]:
    """Run detection over every bundle; per-report failures become error entries.

    Records come back sorted by report id regardless of worker count.
    """
    config = config or PipelineConfig()
    root = Path(corpus_dir)
    if not root.is_dir():
        raise RootNotFound(f"corpus directory not found: {root}")
    lexicons = lexicons or build_lexicons(config)
    model = model if model is not None else build_model(config)
    ocr = build_ocr(config)
    typer = build_typer(config)
    bundles = iter_bundle_dirs(root)

    def run_one(bundle: Path):
        try:
            report = load_report(bundle)
            record = detect_report(report, model, lexicons, config, ocr, typer)
            return bundle.name, record, None
        except RecodeError as exc:
            return bundle.name, None, f"{type(exc).__name__}: {exc}"

    jobs = config.jobs or os.cpu_count() or 1
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run_one, bundles))
    else:
        outcomes = [run_one(b) for b in bundles]

    records = [record for _, record, _ in outcomes if record is not None]
    errors = [(name, message) for name, _, message in outcomes if message is not None]
    records.sort(key=lambda r: r.report_id)
    errors.sort(key=lambda e: e[0])
    return records, errors


def evaluate_detector(
    corpus_dir: str | Path,
    config: PipelineConfig | None = None,
    model=None,
    out_dir: str | Path | None = None,
) -> BinaryMetrics:
    """End-to-end detection scored against the bundles' planted ground truth.

    The positive class is `consistent`. Per-report records are written next to
    the metrics when `out_dir` is given.
    """
    config = config or PipelineConfig()
    root = Path(corpus_dir)
    if not root.is_dir():
        raise RootNotFound(f"corpus directory not found: {root}")
    truth: dict[str, bool] = {}
    for bundle in iter_bundle_dirs(root):
        report = load_report(bundle)
        if report.ground_truth is None or report.ground_truth.consistent is None:
            raise UnlabeledReport(f"{bundle.name}: no ground-truth consistency label")
        truth[report.id] = report.ground_truth.consistent
    records, errors = detect_corpus(corpus_dir, config, model=model)
    if errors:
        name, message = errors[0]
        raise RecodeError(f"evaluation aborted, {name} failed: {message}")

    tp = fp = tn = fn = 0
    for record in records:
        actual = truth[record.report_id]
        predicted = record.verdict.consistent
        if predicted and actual:
            tp += 1
        elif predicted and not actual:
            fp += 1
        elif not predicted and not actual:
            tn += 1
        else:
            fn += 1
    metrics = BinaryMetrics(tp=tp, fp=fp, tn=tn, fn=fn)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_results(records, out / "results.csv", out / "trace.json")
        (out / "metrics.json").write_text(
            json.dumps(metrics.to_dict(), indent=1), encoding="utf-8"
        )
    return metrics
