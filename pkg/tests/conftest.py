from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mask2inst import Mask
from mask2inst.synthgen import SceneSpec, generate


def disc_mask(r: float, pad: int = 4) -> Mask:
    size = int(2 * r) + 2 * pad
    c = size / 2 - 0.5
    yy, xx = np.mgrid[0:size, 0:size]
    return Mask((xx - c) ** 2 + (yy - c) ** 2 <= r * r)


def dumbbell_mask(r: float = 10.0, d: float = 18.33, pad: int = 6):
    """Two discs of radius r with centers d apart; returns (mask, c0, c1)."""
    w = int(2 * r + d + 2 * pad)
    h = int(2 * r + 2 * pad)
    cy = h / 2 - 0.5
    cx0 = pad + r
    cx1 = cx0 + d
    yy, xx = np.mgrid[0:h, 0:w]
    hit = ((xx - cx0) ** 2 + (yy - cy) ** 2 <= r * r) | ((xx - cx1) ** 2 + (yy - cy) ** 2 <= r * r)
    return Mask(hit), (cx0, cy), (cx1, cy)


def annulus_mask(r_out: float = 9.0, r_in: float = 5.0, size: int = 24) -> Mask:
    c = size / 2 - 0.5
    yy, xx = np.mgrid[0:size, 0:size]
    d2 = (xx - c) ** 2 + (yy - c) ** 2
    return Mask((d2 <= r_out * r_out) & (d2 > r_in * r_in))


def random_mask(rng: np.random.Generator, max_side: int = 64, density: float = 0.5) -> Mask:
    h = int(rng.integers(4, max_side + 1))
    w = int(rng.integers(4, max_side + 1))
    return Mask(rng.random((h, w)) < density)


def random_blobs(rng: np.random.Generator, size: int = 48, n: int = 4) -> Mask:
    """Union of random discs and bars: smooth blob-like test masks."""
    canvas = np.zeros((size, size), dtype=bool)
    yy, xx = np.mgrid[0:size, 0:size]
    for _ in range(n):
        kind = rng.integers(0, 2)
        cx = float(rng.uniform(6, size - 6))
        cy = float(rng.uniform(6, size - 6))
        if kind == 0:
            r = float(rng.uniform(3, 8))
            canvas |= (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r
        else:
            ang = float(rng.uniform(0, math.pi))
            hl = float(rng.uniform(5, 12))
            hw = float(rng.uniform(2, 4))
            ax, ay = math.cos(ang) * hl, math.sin(ang) * hl
            px, py = xx - (cx - ax), yy - (cy - ay)
            seg2 = (2 * ax) ** 2 + (2 * ay) ** 2
            t = np.clip((px * 2 * ax + py * 2 * ay) / seg2, 0, 1) if seg2 else 0
            canvas |= (px - t * 2 * ax) ** 2 + (py - t * 2 * ay) ** 2 <= hw * hw
    return Mask(canvas)


# The seeded acceptance suite: 6 regime/overlap pairings x 10 scenes, true
# counts within 1..12, overlap up to 0.4.
SUITE_GROUPS = (
    ("round", 0.25, 128, 1),
    ("round", 0.4, 128, 1),
    ("elongated", 0.35, 144, 5),
    ("elongated", 0.4, 144, 5),
    ("mixed", 0.35, 144, 1),
    ("dense_points", 0.0, 128, 1),
)


def build_suite() -> list[dict]:
    scenes = []
    for gi, (regime, overlap, size, nmin) in enumerate(SUITE_GROUPS):
        for k in range(10):
            span = 12 - nmin + 1
            n = nmin + (gi * 10 + k) % span
            spec = SceneSpec(
                width=size, height=size, regime=regime, n_objects=n,
                overlap=overlap, seed=9000 + (gi + 2) * 100 + k,
            )
            mask, count, truth = generate(spec)
            scenes.append(
                {"regime": regime, "overlap": overlap, "count": count, "mask": mask, "truth": truth}
            )
    return scenes


@pytest.fixture(scope="session")
def suite_scenes() -> list[dict]:
    return build_suite()
