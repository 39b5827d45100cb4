"""Consistency checking for mobile-app crowdsourced test reports.

Two stages: a text classifier picks the three most likely bug types for a
report's description, then per-type matching strategies compare the
description against the attached screenshot and the discounted maximum score
decides the verdict.
"""
from .augment import AugmentationPlan, LabeledDescription, augment_description, balance_corpus
from .classifier import (
    BaselineModel,
    MulticlassMetrics,
    evaluate_classifier,
    predict_top3,
    tokenize_for_classifier,
    train_baseline,
)
from .config import PipelineConfig, load_config
from .detector import (
    DetectionRecord,
    FusionConfig,
    StrategyWeights,
    detect,
    fuse,
    general_strategy,
    score_type,
)
from .harness import BinaryMetrics, CorpusSpec, generate_corpus, template_corpus, write_results
from .lexicon import LexiconSet, TermMatch, load_lexicons, match_terms
from .pipeline import detect_corpus, evaluate_detector
from .report import (
    BugType,
    TestReport,
    TopKPrediction,
    Verdict,
    load_report,
    validate_corpus,
)
from .screen import (
    ScreenDecomposition,
    binarize,
    characterize_layout,
    decompose_screenshot,
    detect_popup,
    dominant_color,
    extract_widgets,
    grid_position,
    match_loading_icon,
    max_blank_area_ratio,
)
from .textual import TextAnalysis, WidgetMention, analyze_text, extract_mentions, polarity

__version__ = "0.1.0"
