"""Run configuration: one JSON file describing a full pipeline setup.

Command-line flags override file values; the `RECODE_LEXICON_DIR` environment
variable is the last-resort lexicon location.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .detector import FusionConfig, StrategyWeights
from .screen import ScreenConfig

LEXICON_DIR_ENV = "RECODE_LEXICON_DIR"


@dataclass(frozen=True)
class PipelineConfig:
    lexicon_dir: str | None = None
    classifier: str = "baseline"  # "baseline" | "plugin"
    plugin_cmd: str | None = None
    plugin_fallback: bool = True
    ocr: str = "sidecar"  # "sidecar" | "plugin"
    ocr_cmd: str | None = None
    typer: str = "heuristic"  # "heuristic" | "plugin"
    typer_cmd: str | None = None
    model_path: str | None = None
    smoothing: float = 1.0
    weights: StrategyWeights = field(default_factory=StrategyWeights)
    fusion: FusionConfig = field(default_factory=FusionConfig)
    screen: ScreenConfig = field(default_factory=ScreenConfig)
    crash_fullscreen_fallback: bool = True
    jobs: int | None = None
    seed: int = 0
    template_per_class: int = 60

    def resolve_lexicon_dir(self) -> str | None:
        if self.lexicon_dir:
            return self.lexicon_dir
        return os.environ.get(LEXICON_DIR_ENV) or None


def _weights_from(obj: dict) -> StrategyWeights:
    return StrategyWeights(
        color=float(obj.get("color", 0.15)),
        position=float(obj.get("position", 0.20)),
        text=float(obj.get("text", 0.45)),
        kind=float(obj.get("kind", 0.20)),
    )


def _fusion_from(obj: dict) -> FusionConfig:
    delta = obj.get("delta", (1.0, 0.9, 0.8))
    return FusionConfig(
        delta=tuple(float(d) for d in delta),  # type: ignore[arg-type]
        lambda_=float(obj.get("lambda", 0.5)),
        theta=float(obj.get("theta", 0.75)),
    )


def _screen_from(obj: dict) -> ScreenConfig:
    base = ScreenConfig()
    return ScreenConfig(
        gradient_threshold=float(obj.get("gradient_threshold", base.gradient_threshold)),
        merge_overlap=float(obj.get("merge_overlap", base.merge_overlap)),
        merge_gap=int(obj.get("merge_gap", base.merge_gap)),
        min_widget_px=int(obj.get("min_widget_px", base.min_widget_px)),
    )


def load_config(path: str | Path | None) -> PipelineConfig:
    """Build a PipelineConfig from a JSON file (defaults when path is None)."""
    if path is None:
        return PipelineConfig()
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    classifier = data.get("classifier", "baseline")
    plugin_cmd = data.get("plugin_cmd")
    if isinstance(classifier, str) and classifier.startswith("plugin:"):
        plugin_cmd = classifier[len("plugin:"):]
        classifier = "plugin"
    ocr = data.get("ocr", "sidecar")
    ocr_cmd = data.get("ocr_cmd")
    if isinstance(ocr, str) and ocr.startswith("plugin:"):
        ocr_cmd = ocr[len("plugin:"):]
        ocr = "plugin"
    typer = data.get("typer", "heuristic")
    typer_cmd = data.get("typer_cmd")
    if isinstance(typer, str) and typer.startswith("plugin:"):
        typer_cmd = typer[len("plugin:"):]
        typer = "plugin"
    return PipelineConfig(
        lexicon_dir=data.get("lexicons"),
        classifier=classifier,
        plugin_cmd=plugin_cmd,
        plugin_fallback=bool(data.get("plugin_fallback", True)),
        ocr=ocr,
        ocr_cmd=ocr_cmd,
        typer=typer,
        typer_cmd=typer_cmd,
        model_path=data.get("model"),
        smoothing=float(data.get("smoothing", 1.0)),
        weights=_weights_from(data.get("weights", {})),
        fusion=_fusion_from(data.get("fusion", {})),
        screen=_screen_from(data.get("screen", {})),
        crash_fullscreen_fallback=bool(data.get("crash_fullscreen_fallback", True)),
        jobs=data.get("jobs"),
        seed=int(data.get("seed", 0)),
        template_per_class=int(data.get("template_per_class", 60)),
    )


def override(config: PipelineConfig, **kwargs) -> PipelineConfig:
    """Non-None keyword values replace the corresponding config fields."""
    updates = {k: v for k, v in kwargs.items() if v is not None}
    return replace(config, **updates) if updates else config
