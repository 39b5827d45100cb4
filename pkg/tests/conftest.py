import json
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).resolve().parent))

from recode.lexicon import load_lexicons


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


def make_bundle(
    root: Path,
    name: str = "r0001",
    description: str = "The app crashes.",
    size: tuple[int, int] = (100, 100),
    color=(255, 255, 255),
    ocr=None,
    widgets=None,
    manifest=None,
) -> Path:
    bundle = root / name
    bundle.mkdir(parents=True, exist_ok=True)
    (bundle / "description.txt").write_text(description, encoding="utf-8")
    Image.new("RGB", size, color).save(bundle / "screenshot.png")
    if ocr is not None:
        (bundle / "ocr.json").write_text(json.dumps({"texts": ocr}), encoding="utf-8")
    if widgets is not None:
        (bundle / "widgets.json").write_text(
            json.dumps({"widgets": widgets}), encoding="utf-8"
        )
    if manifest is not None:
        (bundle / "manifest.json").write_text(json.dumps(manifest), encoding="utf-8")
    return bundle


@pytest.fixture
def bundle_factory(tmp_path):
    def factory(**kwargs):
        return make_bundle(tmp_path, **kwargs)

    return factory


def solid_image(w: int, h: int, color=(255, 255, 255)) -> np.ndarray:
    arr = np.zeros((h, w, 3), dtype=np.uint8)
    arr[:, :] = color
    return arr
