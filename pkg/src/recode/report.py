"""Report data model and bundle ingestion.

A report bundle is a directory holding `description.txt` and `screenshot.png`,
with optional `ocr.json`, `widgets.json` and `manifest.json` sidecars. All
loaded values are immutable after construction.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import (
    EmptyDescription,
    MalformedAnnotation,
    MalformedImage,
    MissingFile,
    RecodeError,
    RootNotFound,
)

DESCRIPTION_FILE = "description.txt"
SCREENSHOT_FILE = "screenshot.png"
OCR_FILE = "ocr.json"
WIDGETS_FILE = "widgets.json"
MANIFEST_FILE = "manifest.json"

WIDGET_KINDS = (
    "Button",
    "CheckBox",
    "CheckTextView",
    "EditText",
    "ImageButton",
    "ImageView",
    "ProgressBarHorizontal",
    "ProgressBarVertical",
    "RadioButton",
    "RatingBar",
    "SeekBar",
    "Switch",
    "Spinner",
    "TextView",
)


class BugType(enum.Enum):
    """The ten-class bug taxonomy. Declaration order is the tie-break order."""

    FUNCTIONAL_DEFECT = "functional-defect"
    CRASH = "crash"
    LAYOUT_PROBLEM = "layout-problem"
    DISPLAY_PROBLEM = "display-problem"
    NETWORK_ERROR = "network-error"
    NULL_SCREEN = "null-screen"
    PERFORMANCE_PROBLEM = "performance-problem"
    ERROR_PROMPT = "error-prompt"
    GARBLED_ERROR = "garbled-error"
    TRANSITION_PROBLEM = "transition-problem"

    @classmethod
    def from_name(cls, name: str) -> "BugType":
        for t in cls:
            if t.value == name:
                return t
        raise ValueError(f"unknown bug type name: {name!r}")

    @property
    def order(self) -> int:
        return _BUG_ORDER[self]


_BUG_ORDER = {t: i for i, t in enumerate(BugType)}

GENERAL_STRATEGY_TYPES = frozenset(
    {
        BugType.FUNCTIONAL_DEFECT,
        BugType.LAYOUT_PROBLEM,
        BugType.DISPLAY_PROBLEM,
        BugType.TRANSITION_PROBLEM,
    }
)


@dataclass(frozen=True)
class BBox:
    """Pixel rectangle, origin top-left."""

    x: int
    y: int
    w: int
    h: int

    @property
    def right(self) -> int:
        return self.x + self.w

    @property
    def bottom(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h

    def contains_point(self, px: float, py: float) -> bool:
        return self.x <= px < self.right and self.y <= py < self.bottom

    def strictly_contains(self, other: "BBox") -> bool:
        return (
            self.x < other.x
            and self.y < other.y
            and self.right > other.right
            and self.bottom > other.bottom
        )

    def within_image(self, width: int, height: int) -> bool:
        return (
            self.x >= 0
            and self.y >= 0
            and self.w >= 1
            and self.h >= 1
            and self.right <= width
            and self.bottom <= height
        )


@dataclass(frozen=True)
class TextRegion:
    """One OCR result: a pixel box and the text read inside it."""

    bbox: BBox
    text: str


@dataclass(frozen=True)
class WidgetRegion:
    """A widget found on (or annotated for) a screenshot."""

    bbox: BBox
    kind: str | None = None
    text: str | None = None
    color: str | None = None
    position: str | None = None


@dataclass(frozen=True)
class GroundTruth:
    consistent: bool | None = None
    bug_type: BugType | None = None


@dataclass(eq=False)
class TestReport:
    """One crowdsourced test report: a screenshot plus its textual description."""

    __test__ = False  # not a pytest class, despite the name

    id: str
    description: str
    screenshot: np.ndarray  # (H, W, 3) uint8
    ocr_annotations: tuple[TextRegion, ...] | None = None
    widget_annotations: tuple[WidgetRegion, ...] | None = None
    ground_truth: GroundTruth | None = None

    def __post_init__(self) -> None:
        if not self.description.strip():
            raise EmptyDescription(f"report {self.id}: description is empty")
        h, w = self.screenshot.shape[:2]
        if w < 1 or h < 1:
            raise MalformedImage(f"report {self.id}: degenerate image {w}x{h}")

    @property
    def width(self) -> int:
        return int(self.screenshot.shape[1])

    @property
    def height(self) -> int:
        return int(self.screenshot.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TestReport):
            return NotImplemented
        return (
            self.id == other.id
            and self.description == other.description
            and np.array_equal(self.screenshot, other.screenshot)
            and self.ocr_annotations == other.ocr_annotations
            and self.widget_annotations == other.widget_annotations
            and self.ground_truth == other.ground_truth
        )


@dataclass(frozen=True)
class TopKPrediction:
    """Top-3 bug-type prediction, confidences sorted non-increasing."""

    entries: tuple[tuple[BugType, float], ...]

    def __post_init__(self) -> None:
        if len(self.entries) != 3:
            raise ValueError("exactly 3 prediction entries required")
        types = [t for t, _ in self.entries]
        if len(set(types)) != 3:
            raise ValueError("predicted types must be pairwise distinct")
        confs = [c for _, c in self.entries]
        for c in confs:
            if not (0.0 <= c <= 1.0):
                raise ValueError(f"confidence {c} outside [0, 1]")
        if any(confs[i] < confs[i + 1] for i in range(2)):
            raise ValueError("confidences must be non-increasing")

    @property
    def types(self) -> tuple[BugType, BugType, BugType]:
        return tuple(t for t, _ in self.entries)  # type: ignore[return-value]


@dataclass(frozen=True)
class Verdict:
    consistent: bool
    s_star: float
    per_type_scores: dict[BugType, float] = field(hash=False, default_factory=dict)


def _decode_png(path: Path) -> np.ndarray:
    """Decode a PNG to RGB8, compositing any alpha over white."""
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ("RGBA", "LA") or (img.mode == "P" and "transparency" in img.info):
                rgba = img.convert("RGBA")
                base = Image.new("RGBA", rgba.size, (255, 255, 255, 255))
                img = Image.alpha_composite(base, rgba).convert("RGB")
            else:
                img = img.convert("RGB")
            return np.asarray(img, dtype=np.uint8).copy()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise MalformedImage(f"cannot decode {path}: {exc}") from exc


def _require_int(obj: dict, key: str, where: str) -> int:
    value = obj.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise MalformedAnnotation(f"{where}: field {key!r} must be an integer")
    return value


def _load_json(path: Path, where: str) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedAnnotation(f"{where}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise MalformedAnnotation(f"{where}: top-level value must be an object")
    return data


def _parse_ocr(path: Path, width: int, height: int) -> tuple[TextRegion, ...]:
    data = _load_json(path, "ocr.json")
    texts = data.get("texts")
    if not isinstance(texts, list):
        raise MalformedAnnotation("ocr.json: missing 'texts' array")
    regions = []
    for i, entry in enumerate(texts):
        where = f"ocr.json texts[{i}]"
        if not isinstance(entry, dict):
            raise MalformedAnnotation(f"{where}: must be an object")
        bbox = BBox(
            _require_int(entry, "x", where),
            _require_int(entry, "y", where),
            _require_int(entry, "w", where),
            _require_int(entry, "h", where),
        )
        text = entry.get("text")
        if not isinstance(text, str) or not text:
            raise MalformedAnnotation(f"{where}: 'text' must be a non-empty string")
        if not bbox.within_image(width, height):
            raise MalformedAnnotation(f"{where}: box {bbox} outside {width}x{height} image")
        regions.append(TextRegion(bbox=bbox, text=text))
    return tuple(regions)


def _parse_widgets(path: Path, width: int, height: int) -> tuple[WidgetRegion, ...]:
    data = _load_json(path, "widgets.json")
    widgets = data.get("widgets")
    if not isinstance(widgets, list):
        raise MalformedAnnotation("widgets.json: missing 'widgets' array")
    out = []
    for i, entry in enumerate(widgets):
        where = f"widgets.json widgets[{i}]"
        if not isinstance(entry, dict):
            raise MalformedAnnotation(f"{where}: must be an object")
        bbox = BBox(
            _require_int(entry, "x", where),
            _require_int(entry, "y", where),
            _require_int(entry, "w", where),
            _require_int(entry, "h", where),
        )
        if not bbox.within_image(width, height):
            raise MalformedAnnotation(f"{where}: box {bbox} outside {width}x{height} image")
        kind = entry.get("kind")
        if kind is not None:
            if not isinstance(kind, str) or kind not in WIDGET_KINDS:
                raise MalformedAnnotation(f"{where}: unknown widget kind {kind!r}")
        text = entry.get("text")
        if text is not None and not isinstance(text, str):
            raise MalformedAnnotation(f"{where}: 'text' must be a string or null")
        out.append(WidgetRegion(bbox=bbox, kind=kind, text=text))
    return tuple(out)


def _parse_manifest(path: Path) -> GroundTruth:
    data = _load_json(path, "manifest.json")
    consistent = data.get("consistent")
    if consistent is not None and not isinstance(consistent, bool):
        raise MalformedAnnotation("manifest.json: 'consistent' must be a bool or null")
    bug_type = None
    raw_type = data.get("bug_type")
    if raw_type is not None:
        if not isinstance(raw_type, str):
            raise MalformedAnnotation("manifest.json: 'bug_type' must be a string or null")
        try:
            bug_type = BugType.from_name(raw_type)
        except ValueError as exc:
            raise MalformedAnnotation(f"manifest.json: {exc}") from exc
    return GroundTruth(consistent=consistent, bug_type=bug_type)


def load_report(bundle_path: str | Path) -> TestReport:
    """Load and validate one report bundle directory."""
    bundle = Path(bundle_path)
    desc_path = bundle / DESCRIPTION_FILE
    shot_path = bundle / SCREENSHOT_FILE
    if not desc_path.is_file():
        raise MissingFile(f"{bundle}: missing {DESCRIPTION_FILE}")
    if not shot_path.is_file():
        raise MissingFile(f"{bundle}: missing {SCREENSHOT_FILE}")

    description = desc_path.read_text(encoding="utf-8-sig")
    screenshot = _decode_png(shot_path)
    height, width = screenshot.shape[:2]

    ocr = None
    if (bundle / OCR_FILE).is_file():
        ocr = _parse_ocr(bundle / OCR_FILE, width, height)
    widgets = None
    if (bundle / WIDGETS_FILE).is_file():
        widgets = _parse_widgets(bundle / WIDGETS_FILE, width, height)
    ground_truth = None
    if (bundle / MANIFEST_FILE).is_file():
        ground_truth = _parse_manifest(bundle / MANIFEST_FILE)

    return TestReport(
        id=bundle.name,
        description=description,
        screenshot=screenshot,
        ocr_annotations=ocr,
        widget_annotations=widgets,
        ground_truth=ground_truth,
    )


def save_report(report: TestReport, bundle_path: str | Path) -> Path:
    """Write a report back out as a bundle directory (inverse of load_report)."""
    bundle = Path(bundle_path)
    bundle.mkdir(parents=True, exist_ok=True)
    (bundle / DESCRIPTION_FILE).write_text(report.description, encoding="utf-8")
    Image.fromarray(report.screenshot, mode="RGB").save(bundle / SCREENSHOT_FILE, format="PNG")
    if report.ocr_annotations is not None:
        payload = {
            "texts": [
                {"x": r.bbox.x, "y": r.bbox.y, "w": r.bbox.w, "h": r.bbox.h, "text": r.text}
                for r in report.ocr_annotations
            ]
        }
        (bundle / OCR_FILE).write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )
    if report.widget_annotations is not None:
        payload = {
            "widgets": [
                {
                    "x": w.bbox.x,
                    "y": w.bbox.y,
                    "w": w.bbox.w,
                    "h": w.bbox.h,
                    "kind": w.kind,
                    "text": w.text,
                }
                for w in report.widget_annotations
            ]
        }
        (bundle / WIDGETS_FILE).write_text(
            json.dumps(payload, ensure_ascii=False, indent=1), encoding="utf-8"
        )
    if report.ground_truth is not None:
        gt = report.ground_truth
        payload = {
            "consistent": gt.consistent,
            "bug_type": gt.bug_type.value if gt.bug_type else None,
        }
        (bundle / MANIFEST_FILE).write_text(json.dumps(payload, indent=1), encoding="utf-8")
    return bundle


def iter_bundle_dirs(root: Path) -> list[Path]:
    return sorted((p for p in root.iterdir() if p.is_dir()), key=lambda p: p.name)


def validate_corpus(root: str | Path) -> list[tuple[str, list[str]]]:
    """Try to load every bundle under `root`; collect issues instead of aborting.

    Returns one (report_id, issues) entry per subdirectory, sorted by id.
    """
    root_path = Path(root)
    if not root_path.is_dir():
        raise RootNotFound(f"corpus root not found: {root_path}")
    results: list[tuple[str, list[str]]] = []
    for bundle in iter_bundle_dirs(root_path):
        issues: list[str] = []
        try:
            load_report(bundle)
        except RecodeError as exc:
            issues.append(f"{type(exc).__name__}: {exc}")
        results.append((bundle.name, issues))
    return results
