"""Candidate segmentation lines and their geometric refinement.

Lines are proposed between the deepest pairs of convexity defects of a
region, optionally re-anchored onto the region skeleton when they drift too
far from it, then filtered by a length window found with bisection so the
carved instance count lands on a target. Carving rasterizes lines two
pixels thick (8-connectivity cannot leak across the cut) and hands the
carved pixels back to their nearest instance so the foreground is preserved
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage as ndi

from .contours import Contour, ConvexityDefect
from .morphops import nearest_seed_labels
from .raster import LabelMap, Mask, relabel
from .skeleton import Skeleton


@dataclass(frozen=True)
class SplitLine:
    """Straight candidate cut between two boundary points.

    ``length`` is always the Euclidean distance of the endpoints; ``aligned``
    records that skeleton correction moved the line; carving skips lines
    whose ``accepted`` flag is off (the length-window fit carves only the
    subset inside its bounds).
    """

    p0: tuple[float, float]
    p1: tuple[float, float]
    length: float = 0.0
    aligned: bool = False
    accepted: bool = True

    def __post_init__(self) -> None:
        d = math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])
        object.__setattr__(self, "length", d)


@dataclass(frozen=True)
class LengthBounds:
    min_len: float
    max_len: float

    def __post_init__(self) -> None:
        if not 0 <= self.min_len <= self.max_len:
            raise ValueError(f"need 0 <= min_len <= max_len, got ({self.min_len}, {self.max_len})")


def propose_lines(c: Contour, defects: list[ConvexityDefect]) -> list[SplitLine]:
    """Pair defects by descending depth into candidate cuts.

    The two deepest defects give the first line; with four or more defects
    the remaining ones pair up greedily (3rd with 4th and so on) so chained
    regions can receive several cuts. Fewer than two defects yield nothing.
    Depth ties break by contour index.
    """
    if len(defects) < 2:
        return []
    ordered = sorted(defects, key=lambda d: (-d.depth, d.index))
    lines = []
    for k in range(0, len(ordered) - 1, 2):
        a, b = ordered[k], ordered[k + 1]
        lines.append(SplitLine(p0=(float(a.point[0]), float(a.point[1])), p1=(float(b.point[0]), float(b.point[1]))))
    return lines


def align_to_skeleton(line: SplitLine, skel: Skeleton, tau: float, region: Mask) -> SplitLine:
    """Snap a drifting line onto the region's medial axis.

    If the line midpoint lies within ``tau`` of the nearest skeletal pixel of
    the region the line is returned unchanged. Otherwise the line translates
    so its midpoint meets that pixel, and both endpoints re-clip outward
    along the line direction to the last foreground pixel so they sit on the
    region boundary again. An empty skeleton leaves the line untouched.
    """
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    sk = skel.data & region.data
    if not sk.any():
        return replace(line, aligned=False)
    mx = (line.p0[0] + line.p1[0]) / 2.0
    my = (line.p0[1] + line.p1[1]) / 2.0
    ys, xs = np.nonzero(sk)
    d2 = (xs - mx) ** 2 + (ys - my) ** 2
    j = int(np.argmin(d2))
    if math.sqrt(float(d2[j])) <= tau:
        return replace(line, aligned=False)
    sx, sy = float(xs[j]), float(ys[j])
    dx, dy = line.p1[0] - line.p0[0], line.p1[1] - line.p0[1]
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        return replace(line, aligned=False)
    ux, uy = dx / norm, dy / norm
    h, w = region.data.shape

    def march(sign: float) -> tuple[float, float]:
        t = 0.0
        last = (sx, sy)
        while True:
            px = sx + sign * t * ux
            py = sy + sign * t * uy
            ix, iy = int(round(px)), int(round(py))
            if not (0 <= ix < w and 0 <= iy < h) or not region.data[iy, ix]:
                return last
            last = (float(ix), float(iy))
            t += 0.5

    new_p0 = march(-1.0)
    new_p1 = march(1.0)
    return SplitLine(p0=new_p0, p1=new_p1, aligned=True, accepted=line.accepted)


def _line_pixels(line: SplitLine, shape: tuple[int, int]) -> list[tuple[int, int]]:
    """Bresenham pixels of the line plus a perpendicular 4-neighbor (2 px thick)."""
    h, w = shape
    x0, y0 = int(round(line.p0[0])), int(round(line.p0[1]))
    x1, y1 = int(round(line.p1[0])), int(round(line.p1[1]))
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    horizontal = dx >= dy
    err = dx - dy
    pixels: list[tuple[int, int]] = []
    x, y = x0, y0
    while True:
        pixels.append((y, x))
        if horizontal:
            pixels.append((y + 1, x))
        else:
            pixels.append((y, x + 1))
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 > -dy:
            err -= dy
            x += sx
        if e2 < dx:
            err += dx
            y += sy
    return [(py, px) for py, px in pixels if 0 <= py < h and 0 <= px < w]


_STRUCT8 = np.ones((3, 3), dtype=np.int8)


def carve_into(base: np.ndarray, lines: list[SplitLine]) -> LabelMap:
    """Carve accepted lines into an existing instance partition.

    Line pixels drop to background, every instance re-splits into its
    8-connected pieces (cuts never merge two distinct input instances), and
    the carved foreground pixels rejoin the chamfer-nearest piece so the
    union of instances stays exactly the input foreground.
    """
    carve = np.zeros(base.shape, dtype=bool)
    for line in lines:
        if not line.accepted:
            continue
        for py, px in _line_pixels(line, base.shape):
            carve[py, px] = True
    carve &= base > 0
    if not carve.any():
        return relabel(LabelMap(base))
    remaining = (base > 0) & ~carve
    cc, ncc = ndi.label(remaining, structure=_STRUCT8)
    if ncc == 0:
        # Cuts consumed the entire foreground; carving degenerates to plain
        # connected components of the original foreground.
        lab, _ = ndi.label(base > 0, structure=_STRUCT8)
        return relabel(LabelMap(lab))
    combo = np.where(remaining, base.astype(np.int64) * (ncc + 1) + cc, 0)
    pieces = relabel(LabelMap(_compact(combo)))
    grown = nearest_seed_labels(pieces.data, weights=(3, 4), traversable=base > 0)
    out = np.where(carve, grown, pieces.data)
    stranded = (base > 0) & (out == 0)
    if stranded.any():
        # A cut swallowed a whole instance; its pixels rejoin the nearest
        # surviving piece across the plane.
        planar = nearest_seed_labels(out, weights=(3, 4), traversable=None)
        out = np.where(stranded, planar, out)
    return LabelMap(out)


def _compact(combo: np.ndarray) -> np.ndarray:
    """Map arbitrary nonzero ids onto 0..n (relabel then fixes the order)."""
    vals = np.unique(combo)
    idx = np.searchsorted(vals, combo)
    if vals[0] != 0:
        idx = idx + 1
    return idx.astype(np.int32)


def carve_lines(mask: Mask, lines: list[SplitLine]) -> LabelMap:
    """Carve accepted lines into a mask; no lines means plain components."""
    base, _ = ndi.label(mask.data, structure=_STRUCT8)
    return relabel(carve_into(base, lines))


def fit_length_bounds(
    lines: list[SplitLine],
    region: Mask,
    target_count: int,
    min_len: float,
    base: LabelMap | None = None,
) -> tuple[LengthBounds, LabelMap]:
    """Bisect the upper length bound until carving hits the target count.

    Lines whose length falls in [min_len, max_len] are carved; the instance
    count is monotone non-decreasing in max_len, so bisection over
    [min_len, image diagonal] converges. Stops on an exact hit or when the
    interval is narrower than one pixel (at most 24 steps) and returns the
    bounds plus the label map whose count came closest to the target, ties
    going to fewer carved lines.
    """
    if target_count < 1:
        raise ValueError(f"target_count must be >= 1, got {target_count}")
    if min_len < 0:
        raise ValueError(f"min_len must be >= 0, got {min_len}")
    base_arr = base.data if base is not None else None
    if base_arr is None:
        lab, _ = ndi.label(region.data, structure=_STRUCT8)
        base_arr = lab
    diag = math.hypot(region.data.shape[1], region.data.shape[0])
    lo, hi = float(min_len), max(float(min_len), diag)

    cache: dict[frozenset[int], tuple[int, LabelMap]] = {}

    def evaluate(limit: float) -> tuple[int, int, LabelMap]:
        chosen = frozenset(i for i, ln in enumerate(lines) if min_len <= ln.length <= limit)
        if chosen not in cache:
            subset = [replace(lines[i], accepted=True) for i in sorted(chosen)]
            carved = carve_into(base_arr, subset)
            cache[chosen] = (carved.count, carved)
        count, carved = cache[chosen]
        return count, len(chosen), carved

    best: tuple[int, int, float, LabelMap] | None = None
    mid = lo
    for _ in range(24):
        mid = (lo + hi) / 2.0
        count, n_lines, carved = evaluate(mid)
        score = (abs(count - target_count), n_lines)
        if best is None or score < (best[0], best[1]):
            best = (score[0], score[1], mid, carved)
        if count == target_count:
            return LengthBounds(min_len, mid), carved
        if count < target_count:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1.0:
            break
    assert best is not None
    return LengthBounds(min_len, best[2]), best[3]
