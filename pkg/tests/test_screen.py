import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recode.errors import DegenerateBox
from recode.report import BBox, TextRegion, WidgetRegion
from recode.screen import (
    INVERSE_RELATION,
    Relation,
    binarize,
    characterize_layout,
    detect_popup,
    dominant_color,
    extract_widgets,
    grid_position,
    heuristic_typer,
    match_loading_icon,
    max_blank_area_ratio,
)

from conftest import solid_image
from oracles import brute_force_binarize, flood_fill_blank_ratio, iou


class TestBinarize:
    def test_uniform_white_all_background(self):
        assert not binarize(solid_image(20, 20)).any()

    def test_uniform_black_all_background(self):
        assert not binarize(solid_image(20, 20, (0, 0, 0))).any()

    def test_rectangle_outline_marks_edges_within_1px(self):
        img = solid_image(40, 40)
        img[10:30, 10] = 0
        img[10:30, 29] = 0
        img[10, 10:30] = 0
        img[29, 10:30] = 0
        fg = binarize(img)
        assert fg.tolist() == brute_force_binarize(img.tolist())

        def on_outline(y, x):
            return (x in (10, 29) and 10 <= y <= 29) or (y in (10, 29) and 10 <= x <= 29)

        # every foreground pixel lies within 1px of the drawn outline
        for y, x in zip(*np.nonzero(fg)):
            assert any(
                on_outline(y + dy, x + dx) for dx in (-1, 0, 1) for dy in (-1, 0, 1)
            ), (x, y)
        # and every outline pixel has marked foreground within 1px
        for y in range(10, 30):
            for x in (10, 29):
                assert fg[max(0, y - 1) : y + 2, max(0, x - 1) : x + 2].any(), (x, y)
        for x in range(10, 30):
            for y in (10, 29):
                assert fg[max(0, y - 1) : y + 2, max(0, x - 1) : x + 2].any(), (x, y)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(11)
        img = rng.integers(0, 256, size=(12, 9, 3), dtype=np.uint8)
        expected = brute_force_binarize(img.tolist())
        got = binarize(img)
        assert got.tolist() == expected


class TestMaxBlankAreaRatio:
    def test_all_background(self):
        assert max_blank_area_ratio(np.zeros((100, 100), dtype=bool)) == 1.0

    def test_all_foreground(self):
        assert max_blank_area_ratio(np.ones((50, 50), dtype=bool)) == 0.0

    def test_vertical_split(self):
        binary = np.zeros((100, 100), dtype=bool)
        binary[:, 50] = True
        assert max_blank_area_ratio(binary) == 0.5

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_matches_flood_fill_oracle(self, seed):
        rng = np.random.default_rng(seed)
        h, w = int(rng.integers(1, 32)), int(rng.integers(1, 32))
        binary = rng.random((h, w)) < rng.uniform(0.05, 0.9)
        assert max_blank_area_ratio(binary) == pytest.approx(
            flood_fill_blank_ratio(binary.tolist()), abs=0
        )


class TestGridPosition:
    def test_top_left(self):
        assert grid_position(BBox(5, 5, 20, 20), (300, 300)) == "top-left"

    def test_center(self):
        assert grid_position(BBox(140, 140, 20, 20), (300, 300)) == "center"

    def test_boundary_belongs_to_earlier_third(self):
        # center exactly at (100, 100) on a 300x300 image = both boundaries
        assert grid_position(BBox(90, 90, 20, 20), (300, 300)) == "top-left"

    def test_all_nine_cells(self):
        names = set()
        for cy in (40, 150, 260):
            for cx in (40, 150, 260):
                names.add(grid_position(BBox(cx - 5, cy - 5, 10, 10), (300, 300)))
        assert len(names) == 9


class TestDominantColor:
    def test_pure_green_fill(self):
        img = solid_image(20, 20, (0, 255, 0))
        assert dominant_color(img, BBox(2, 2, 10, 10)) == "green"

    def test_near_white(self):
        img = solid_image(20, 20, (254, 254, 254))
        assert dominant_color(img, BBox(0, 0, 20, 20)) == "white"

    def test_degenerate_box(self):
        with pytest.raises(DegenerateBox):
            dominant_color(solid_image(10, 10), BBox(1, 1, 0, 5))

    def test_border_excluded(self):
        img = solid_image(20, 20, (0, 0, 255))
        img[5, 5:15] = (0, 0, 0)
        img[14, 5:15] = (0, 0, 0)
        img[5:15, 5] = (0, 0, 0)
        img[5:15, 14] = (0, 0, 0)
        assert dominant_color(img, BBox(5, 5, 10, 10)) == "blue"


class TestCharacterizeLayout:
    def test_side_by_side(self):
        widgets = [
            WidgetRegion(bbox=BBox(0, 0, 10, 10)),
            WidgetRegion(bbox=BBox(20, 0, 10, 10)),
        ]
        edges = set(characterize_layout(widgets).edges)
        assert (0, 1, Relation.LEFT_OF) in edges
        assert (1, 0, Relation.RIGHT_OF) in edges

    def test_nested(self):
        widgets = [
            WidgetRegion(bbox=BBox(0, 0, 30, 30)),
            WidgetRegion(bbox=BBox(5, 5, 10, 10)),
        ]
        edges = set(characterize_layout(widgets).edges)
        assert (0, 1, Relation.CONTAINS) in edges
        assert (1, 0, Relation.CONTAINED_BY) in edges

    def test_empty(self):
        graph = characterize_layout([])
        assert graph.nodes == ()
        assert graph.edges == ()

    @settings(max_examples=100, deadline=None)
    @given(
        boxes=st.lists(
            st.tuples(
                st.integers(0, 80), st.integers(0, 80), st.integers(1, 40), st.integers(1, 40)
            ),
            max_size=8,
        )
    )
    def test_inverse_edge_invariant(self, boxes):
        widgets = [WidgetRegion(bbox=BBox(*b)) for b in boxes]
        graph = characterize_layout(widgets)
        edge_set = set(graph.edges)
        for a, b, relation in edge_set:
            assert (b, a, INVERSE_RELATION[relation]) in edge_set


def draw_rect(img, x, y, w, h, color=(40, 40, 40), width=2):
    img[y : y + width, x : x + w] = color
    img[y + h - width : y + h, x : x + w] = color
    img[y : y + h, x : x + width] = color
    img[y : y + h, x + w - width : x + w] = color


class TestExtractWidgets:
    def test_two_disjoint_rectangles_sorted(self):
        img = solid_image(200, 200)
        draw_rect(img, 20, 120, 60, 30)
        draw_rect(img, 30, 20, 50, 40)
        widgets = extract_widgets(img)
        assert len(widgets) == 2
        assert widgets[0].bbox.y < widgets[1].bbox.y
        assert iou(
            (widgets[0].bbox.x, widgets[0].bbox.y, widgets[0].bbox.w, widgets[0].bbox.h),
            (30, 20, 50, 40),
        ) >= 0.5

    def test_blank_image(self):
        assert extract_widgets(solid_image(100, 100)) == []

    def test_ocr_text_linked_to_containing_widget(self):
        img = solid_image(200, 100)
        draw_rect(img, 40, 30, 100, 40)
        texts = [TextRegion(bbox=BBox(80, 45, 20, 10), text="confirm")]
        widgets = extract_widgets(img, texts=texts)
        assert len(widgets) == 1
        assert widgets[0].text == "confirm"

    def test_small_components_discarded(self):
        img = solid_image(100, 100)
        img[50:53, 50:53] = 0  # 3x3 dot, below the 8px minimum
        assert extract_widgets(img) == []


class TestHeuristicTyper:
    def test_boxed_wide_is_edit_text(self):
        img = solid_image(300, 100)
        draw_rect(img, 20, 30, 200, 30)
        widgets = extract_widgets(img, texts=[TextRegion(BBox(30, 40, 30, 10), "hint")])
        assert widgets[0].kind == "EditText"

    def test_boxed_moderate_is_button(self):
        img = solid_image(300, 100)
        draw_rect(img, 20, 30, 120, 40)
        widgets = extract_widgets(img, texts=[TextRegion(BBox(40, 45, 30, 10), "Go")])
        assert widgets[0].kind == "Button"

    def test_square_no_text_is_image(self):
        img = solid_image(200, 100)
        draw_rect(img, 30, 20, 50, 50)
        widgets = extract_widgets(img)
        assert widgets[0].kind == "ImageView"

    def test_bare_text_is_text_view(self):
        assert heuristic_typer(solid_image(60, 20), BBox(5, 5, 50, 12), "hello") == "TextView"


class TestDetectPopup:
    def test_centered_bright_dialog_on_dark_screen(self):
        img = solid_image(300, 400, (30, 30, 30))
        img[150:250, 60:240] = (240, 240, 240)
        widgets = [WidgetRegion(bbox=BBox(60, 150, 180, 100))]
        popup = detect_popup(img, widgets)
        assert popup is not None
        assert popup.bbox == BBox(60, 150, 180, 100)

    def test_blank_screen_no_popup(self):
        assert detect_popup(solid_image(300, 400), []) is None

    def test_full_width_box_rejected(self):
        img = solid_image(300, 400, (30, 30, 30))
        img[100:300, 0:300] = (240, 240, 240)
        widgets = [WidgetRegion(bbox=BBox(0, 100, 300, 200))]
        assert detect_popup(img, widgets) is None

    def test_low_contrast_rejected(self):
        img = solid_image(300, 400, (200, 200, 200))
        img[150:250, 60:240] = (210, 210, 210)
        widgets = [WidgetRegion(bbox=BBox(60, 150, 180, 100))]
        assert detect_popup(img, widgets) is None


class TestMatchLoadingIcon:
    def test_planted_template_at_3x_scale(self, lexicons):
        name, template = lexicons.loading_icon_templates[0]
        glyph = np.kron(template, np.ones((3, 3), dtype=bool))
        img = solid_image(200, 200)
        img[40 : 40 + glyph.shape[0], 60 : 60 + glyph.shape[1]][glyph] = (40, 40, 40)
        widgets = extract_widgets(img)
        assert widgets, "glyph should be detected as a widget"
        assert match_loading_icon(img, widgets, lexicons.loading_icon_templates)

    def test_blank_screen(self, lexicons):
        assert not match_loading_icon(
            solid_image(100, 100), [], lexicons.loading_icon_templates
        )

    def test_solid_square_not_matched(self, lexicons):
        img = solid_image(200, 200)
        img[50:110, 50:110] = (20, 20, 20)
        widgets = extract_widgets(img)
        assert widgets
        assert not match_loading_icon(img, widgets, lexicons.loading_icon_templates)

    def test_outlined_box_not_matched(self, lexicons):
        img = solid_image(200, 200)
        draw_rect(img, 40, 40, 80, 80)
        widgets = extract_widgets(img)
        assert widgets
        assert not match_loading_icon(img, widgets, lexicons.loading_icon_templates)

    def test_empty_templates(self):
        img = solid_image(50, 50)
        assert not match_loading_icon(img, [WidgetRegion(bbox=BBox(0, 0, 16, 16))], ())
