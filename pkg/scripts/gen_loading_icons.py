#!/usr/bin/env python3
"""Regenerate the bundled 16x16 loading-icon templates.

Each template is a black glyph on white whose tight bounding box fills the
full 16x16 frame, so a detected widget crop rescaled to 16x16 lines up with it.
"""
import math
from pathlib import Path

import numpy as np
from PIL import Image

SIZE = 16
OUT = Path(__file__).resolve().parents[1] / "src" / "recode" / "data" / "lexicons" / "loading_icons"


def ring_mask(gap_ranges=()):
    mask = np.zeros((SIZE, SIZE), dtype=bool)
    cx = cy = SIZE / 2.0
    for y in range(SIZE):
        for x in range(SIZE):
            dx, dy = x + 0.5 - cx, y + 0.5 - cy
            r = math.hypot(dx, dy)
            if not (5.4 <= r <= 8.0):
                continue
            angle = math.degrees(math.atan2(dy, dx)) % 360.0
            if any(lo <= angle < hi for lo, hi in gap_ranges):
                continue
            mask[y, x] = True
    return mask


def hourglass_mask():
    mask = np.zeros((SIZE, SIZE), dtype=bool)
    for y in range(SIZE):
        for x in range(SIZE):
            if y in (0, 1, 14, 15) and 1 <= x <= 14:
                mask[y, x] = True
            dx, dy = x - 7.5, y - 7.5
            if abs(abs(dx) - abs(dy)) < 1.2 and abs(dx) <= 7:
                mask[y, x] = True
    return mask


def save(name, mask):
    img = np.where(mask, 0, 255).astype(np.uint8)
    OUT.mkdir(parents=True, exist_ok=True)
    Image.fromarray(img, mode="L").save(OUT / f"{name}.png")
    print(f"wrote {name}.png ({int(mask.sum())} glyph px)")


def main():
    save("ring", ring_mask())
    save("spinner", ring_mask(gap_ranges=[(300.0, 360.0)]))
    save("refresh", ring_mask(gap_ranges=[(0.0, 50.0), (180.0, 230.0)]))
    save("hourglass", hourglass_mask())


if __name__ == "__main__":
    main()
