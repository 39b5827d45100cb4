"""Screenshot decomposition: widgets, texts, layout, pop-ups, blank areas.

The pixel pipeline is deliberately simple and fully deterministic: an
edge-style binarization, 4-connected component grouping, and a handful of
geometric rules. OCR and widget typing are pluggable so the rest of the
pipeline can be tested bit-exactly without any model.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Protocol

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import DegenerateBox, OcrFailure
from .lexicon import CANONICAL_COLORS, POSITION_NAMES, LexiconSet
from .report import BBox, TestReport, TextRegion, WidgetRegion

log = logging.getLogger(__name__)

_CROSS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class ScreenConfig:
    """Tunables for the pixel pipeline; defaults keep the noise-free synthetic
    tier perfectly recoverable."""

    gradient_threshold: float = 32.0
    merge_overlap: float = 0.30
    merge_gap: int = 4
    min_widget_px: int = 8
    popup_min_width: float = 0.15
    popup_max_width: float = 0.85
    popup_min_height: float = 0.05
    popup_max_height: float = 0.60
    popup_luminance_delta: float = 24.0
    icon_distance: float = 0.15
    icon_dark_threshold: int = 128
    typer_dark_threshold: float = 160.0
    typer_boxed_fraction: float = 0.6


class Relation(enum.Enum):
    LEFT_OF = "left-of"
    RIGHT_OF = "right-of"
    ABOVE = "above"
    BELOW = "below"
    CONTAINS = "contains"
    CONTAINED_BY = "contained-by"


INVERSE_RELATION = {
    Relation.LEFT_OF: Relation.RIGHT_OF,
    Relation.RIGHT_OF: Relation.LEFT_OF,
    Relation.ABOVE: Relation.BELOW,
    Relation.BELOW: Relation.ABOVE,
    Relation.CONTAINS: Relation.CONTAINED_BY,
    Relation.CONTAINED_BY: Relation.CONTAINS,
}


@dataclass(frozen=True)
class LayoutGraph:
    nodes: tuple[int, ...]
    edges: tuple[tuple[int, int, Relation], ...]


@dataclass
class ScreenDecomposition:
    widgets: list[WidgetRegion]
    texts: list[TextRegion]
    layout: LayoutGraph
    popup: WidgetRegion | None
    blank_ratio: float


class OcrBackend(Protocol):
    def __call__(self, report: TestReport) -> list[TextRegion]: ...


class WidgetTyper(Protocol):
    def __call__(self, image: np.ndarray, bbox: BBox, text: str | None) -> str | None: ...


def sidecar_ocr(report: TestReport) -> list[TextRegion]:
    """Default OCR backend: the report's `ocr.json` sidecar (empty when absent)."""
    return list(report.ocr_annotations or ())


def grayscale(image: np.ndarray) -> np.ndarray:
    rgb = image.astype(np.float64)
    return 0.299 * rgb[..., 0] + 0.587 * rgb[..., 1] + 0.114 * rgb[..., 2]


def binarize(image: np.ndarray, threshold: float = 32.0) -> np.ndarray:
    """Edge-style binarization: foreground marks widget borders.

    A pixel is foreground iff the local gradient magnitude of the grayscale
    image is at least `threshold` (0..255 scale). Uniform images are all
    background.
    """
    gray = grayscale(image)
    if gray.shape[0] < 2 or gray.shape[1] < 2:
        return np.zeros(gray.shape, dtype=bool)
    gy, gx = np.gradient(gray)
    magnitude = np.hypot(gx, gy)
    return magnitude >= threshold


def max_blank_area_ratio(binary: np.ndarray) -> float:
    """Largest 4-connected background component, as a fraction of all pixels."""
    background = ~binary
    if not background.any():
        return 0.0
    labels, count = ndimage.label(background, structure=_CROSS)
    if count == 0:
        return 0.0
    sizes = np.bincount(labels.ravel())[1:]
    return float(sizes.max()) / float(binary.size)


def grid_position(bbox: BBox, image_dims: tuple[int, int]) -> str:
    """3x3 grid cell of the box center; boundary points belong to the earlier third."""
    width, height = image_dims
    cx2 = 2 * bbox.x + bbox.w  # twice the center, kept integral
    cy2 = 2 * bbox.y + bbox.h

    def cell(center2: int, extent: int) -> int:
        if center2 <= 0:
            return 0
        if 3 * center2 <= 2 * extent:
            return 0
        if 3 * center2 <= 4 * extent:
            return 1
        return 2

    return POSITION_NAMES[cell(cy2, height) * 3 + cell(cx2, width)]


def dominant_color(image: np.ndarray, bbox: BBox) -> str:
    """Nearest canonical name of the most frequent quantized color in the box interior."""
    if bbox.w < 1 or bbox.h < 1:
        raise DegenerateBox(f"degenerate box {bbox}")
    x0, y0, x1, y1 = bbox.x, bbox.y, bbox.right, bbox.bottom
    if bbox.w >= 3 and bbox.h >= 3:
        x0, y0, x1, y1 = x0 + 1, y0 + 1, x1 - 1, y1 - 1
    patch = image[y0:y1, x0:x1].reshape(-1, 3)
    quantized = (patch >> 5).astype(np.int32)
    keys = quantized[:, 0] * 64 + quantized[:, 1] * 8 + quantized[:, 2]
    counts = np.bincount(keys, minlength=512)
    best_key = int(counts.argmax())  # argmax takes the smallest key on ties
    bucket_center = np.array(
        [(best_key >> 6 & 7) * 32 + 16, (best_key >> 3 & 7) * 32 + 16, (best_key & 7) * 32 + 16],
        dtype=np.float64,
    )
    best_name, best_dist = None, None
    for name, rgb in CANONICAL_COLORS:
        dist = float(((bucket_center - np.array(rgb, dtype=np.float64)) ** 2).sum())
        if best_dist is None or dist < best_dist:
            best_name, best_dist = name, dist
    return best_name  # type: ignore[return-value]


def characterize_layout(widgets: list[WidgetRegion]) -> LayoutGraph:
    """Pairwise spatial relations; inverse edges are always materialized."""
    edges: list[tuple[int, int, Relation]] = []
    for a in range(len(widgets)):
        for b in range(len(widgets)):
            if a == b:
                continue
            box_a, box_b = widgets[a].bbox, widgets[b].bbox
            if box_a.strictly_contains(box_b):
                edges.append((a, b, Relation.CONTAINS))
                continue
            if box_b.strictly_contains(box_a):
                edges.append((a, b, Relation.CONTAINED_BY))
                continue
            if box_a.right <= box_b.x:
                edges.append((a, b, Relation.LEFT_OF))
            elif box_b.right <= box_a.x:
                edges.append((a, b, Relation.RIGHT_OF))
            if box_a.bottom <= box_b.y:
                edges.append((a, b, Relation.ABOVE))
            elif box_b.bottom <= box_a.y:
                edges.append((a, b, Relation.BELOW))
    return LayoutGraph(nodes=tuple(range(len(widgets))), edges=tuple(edges))


def _component_boxes(binary: np.ndarray) -> list[BBox]:
    labels, count = ndimage.label(binary, structure=_CROSS)
    boxes = []
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        ys, xs = sl
        boxes.append(BBox(x=xs.start, y=ys.start, w=xs.stop - xs.start, h=ys.stop - ys.start))
    return boxes


def _gap(a: BBox, b: BBox) -> int:
    gap_x = max(0, max(a.x, b.x) - min(a.right, b.right))
    gap_y = max(0, max(a.y, b.y) - min(a.bottom, b.bottom))
    return max(gap_x, gap_y)


def _overlap_fraction(a: BBox, b: BBox) -> float:
    ix = max(0, min(a.right, b.right) - max(a.x, b.x))
    iy = max(0, min(a.bottom, b.bottom) - max(a.y, b.y))
    inter = ix * iy
    if inter == 0:
        return 0.0
    return inter / min(a.area, b.area)


def _merge_boxes(boxes: list[BBox], cfg: ScreenConfig) -> list[BBox]:
    current = list(boxes)
    changed = True
    while changed:
        changed = False
        parent = list(range(len(current)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for i in range(len(current)):
            for j in range(i + 1, len(current)):
                a, b = current[i], current[j]
                if _overlap_fraction(a, b) >= cfg.merge_overlap or _gap(a, b) <= cfg.merge_gap:
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[rj] = ri
                        changed = True
        if not changed:
            break
        grouped: dict[int, BBox] = {}
        for i, box in enumerate(current):
            root = find(i)
            if root in grouped:
                g = grouped[root]
                x0, y0 = min(g.x, box.x), min(g.y, box.y)
                x1, y1 = max(g.right, box.right), max(g.bottom, box.bottom)
                grouped[root] = BBox(x=x0, y=y0, w=x1 - x0, h=y1 - y0)
            else:
                grouped[root] = box
        current = list(grouped.values())
    return current


def _perimeter_dark_fraction(gray: np.ndarray, inset: int, threshold: float) -> float:
    h, w = gray.shape
    if h - 2 * inset < 2 or w - 2 * inset < 2:
        return 0.0
    sub = gray[inset : h - inset, inset : w - inset]
    ring = np.concatenate([sub[0, :], sub[-1, :], sub[1:-1, 0], sub[1:-1, -1]])
    return float((ring < threshold).mean())


def heuristic_typer(image: np.ndarray, bbox: BBox, text: str | None,
                    cfg: ScreenConfig = ScreenConfig()) -> str | None:
    """Coarse rule-based widget typing over {Button, TextView, ImageView, EditText}.

    A widget counts as boxed when some near-perimeter ring is mostly dark
    (detected boxes sit a pixel or two outside the drawn border).
    """
    ratio = bbox.w / bbox.h
    if 0.75 <= ratio <= 1.33 and not text:
        return "ImageView"
    gray = grayscale(image[bbox.y : bbox.bottom, bbox.x : bbox.right])
    boxed = any(
        _perimeter_dark_fraction(gray, inset, cfg.typer_dark_threshold)
        >= cfg.typer_boxed_fraction
        for inset in (0, 1, 2)
    )
    if boxed:
        return "EditText" if ratio > 4.5 else "Button"
    if text:
        return "TextView"
    return None


def extract_widgets(
    image: np.ndarray,
    ocr: OcrBackend = sidecar_ocr,
    typer: WidgetTyper | None = None,
    *,
    report: TestReport | None = None,
    cfg: ScreenConfig = ScreenConfig(),
    binary: np.ndarray | None = None,
    texts: list[TextRegion] | None = None,
) -> list[WidgetRegion]:
    """Detect widget boxes from the binarized image, link OCR texts, fill attributes.

    `texts` may be supplied directly; otherwise the OCR backend is invoked on
    `report`. An OCR backend failure degrades to no texts with a warning.
    """
    height, width = image.shape[:2]
    if binary is None:
        binary = binarize(image, cfg.gradient_threshold)
    boxes = _merge_boxes(_component_boxes(binary), cfg)
    boxes = [b for b in boxes if b.w >= cfg.min_widget_px and b.h >= cfg.min_widget_px]
    boxes.sort(key=lambda b: (b.y, b.x))

    if texts is None:
        if report is not None:
            try:
                texts = ocr(report)
            except OcrFailure as exc:
                log.warning("OCR backend failed (%s); continuing without texts", exc)
                texts = []
        else:
            texts = []

    linked: dict[int, list[TextRegion]] = {}
    for region in texts:
        center_x = region.bbox.x + region.bbox.w / 2.0
        center_y = region.bbox.y + region.bbox.h / 2.0
        best_idx, best_area = None, None
        for idx, box in enumerate(boxes):
            if box.contains_point(center_x, center_y):
                if best_area is None or box.area < best_area:
                    best_idx, best_area = idx, box.area
        if best_idx is not None:
            linked.setdefault(best_idx, []).append(region)

    typer_fn = typer if typer is not None else (
        lambda img, box, txt: heuristic_typer(img, box, txt, cfg)
    )
    widgets = []
    for idx, box in enumerate(boxes):
        regions = sorted(linked.get(idx, []), key=lambda r: (r.bbox.y, r.bbox.x))
        text = " ".join(r.text for r in regions) if regions else None
        widgets.append(
            WidgetRegion(
                bbox=box,
                kind=typer_fn(image, box, text),
                text=text,
                color=dominant_color(image, box),
                position=grid_position(box, (width, height)),
            )
        )
    return widgets


def detect_popup(
    image: np.ndarray,
    widgets: list[WidgetRegion],
    cfg: ScreenConfig = ScreenConfig(),
) -> WidgetRegion | None:
    """Largest centered box whose interior luminance stands out from the rest."""
    height, width = image.shape[:2]
    gray = grayscale(image)
    total = float(gray.sum())
    best: WidgetRegion | None = None
    for widget in widgets:
        box = widget.bbox
        if grid_position(box, (width, height)) not in ("top", "center", "bottom"):
            continue
        if not (cfg.popup_min_width <= box.w / width <= cfg.popup_max_width):
            continue
        if not (cfg.popup_min_height <= box.h / height <= cfg.popup_max_height):
            continue
        interior = gray[box.y : box.bottom, box.x : box.right]
        n_in = interior.size
        n_out = gray.size - n_in
        if n_out == 0:
            continue
        mean_in = float(interior.sum()) / n_in
        mean_out = (total - float(interior.sum())) / n_out
        if abs(mean_in - mean_out) < cfg.popup_luminance_delta:
            continue
        if best is None or box.area > best.bbox.area:
            best = widget
    return best


def match_loading_icon(
    image: np.ndarray,
    widgets: list[WidgetRegion],
    templates: tuple[tuple[str, np.ndarray], ...],
    cfg: ScreenConfig = ScreenConfig(),
) -> bool:
    """True iff some widget crop, rescaled to 16x16, is within Hamming 0.15 of a template."""
    if not templates:
        return False
    for widget in widgets:
        box = widget.bbox
        crop = image[box.y : box.bottom, box.x : box.right]
        small = np.asarray(
            Image.fromarray(crop, mode="RGB").resize((16, 16), Image.NEAREST)
        )
        mask = grayscale(small) < cfg.icon_dark_threshold
        for _, template in templates:
            distance = float((mask ^ template).mean())
            if distance <= cfg.icon_distance:
                return True
    return False


def decompose_screenshot(
    report: TestReport,
    lexicons: LexiconSet | None = None,
    cfg: ScreenConfig = ScreenConfig(),
    ocr: OcrBackend = sidecar_ocr,
    typer: WidgetTyper | None = None,
) -> ScreenDecomposition:
    """Run the full pixel pipeline for one report."""
    image = report.screenshot
    binary = binarize(image, cfg.gradient_threshold)
    try:
        texts = ocr(report)
    except OcrFailure as exc:
        log.warning("OCR backend failed (%s); continuing without texts", exc)
        texts = []
    widgets = extract_widgets(
        image, ocr, typer, report=report, cfg=cfg, binary=binary, texts=texts
    )
    return ScreenDecomposition(
        widgets=widgets,
        texts=texts,
        layout=characterize_layout(widgets),
        popup=detect_popup(image, widgets, cfg),
        blank_ratio=max_blank_area_ratio(binary),
    )
