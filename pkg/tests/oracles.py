"""Independent brute-force reference implementations used as test oracles.

Everything here is deliberately written against the plain definitions
(per-pixel scans, exhaustive searches, textbook loops) and shares no code
with the library paths it checks.
"""

from __future__ import annotations

import heapq
import math

import numpy as np


def erode_brute(mask: np.ndarray, size: int) -> np.ndarray:
    """Per-pixel definition: keep iff every pixel under the window is set."""
    r = size // 2
    h, w = mask.shape
    out = np.zeros_like(mask)
    for y in range(h):
        for x in range(w):
            keep = True
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy, xx = y + dy, x + dx
                    if not (0 <= yy < h and 0 <= xx < w) or not mask[yy, xx]:
                        keep = False
                        break
                if not keep:
                    break
            out[y, x] = keep
    return out


def dilate_brute(mask: np.ndarray, size: int) -> np.ndarray:
    """Per-pixel definition: set iff any pixel under the window is set."""
    r = size // 2
    h, w = mask.shape
    out = np.zeros_like(mask)
    for y in range(h):
        for x in range(w):
            hit = False
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and mask[yy, xx]:
                        hit = True
                        break
                if hit:
                    break
            out[y, x] = hit
    return out


def euclidean_dt_brute(mask: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance to the nearest background pixel.

    Out-of-bounds counts as background, realized as a one-pixel virtual
    frame around the image. Minimization is over all background pixels.
    """
    h, w = mask.shape
    bg_y, bg_x = np.nonzero(~mask)
    frame = []
    for x in range(-1, w + 1):
        frame.append((-1, x))
        frame.append((h, x))
    for y in range(0, h):
        frame.append((y, -1))
        frame.append((y, w))
    all_bg_y = np.concatenate([bg_y, np.array([p[0] for p in frame], dtype=np.int64)])
    all_bg_x = np.concatenate([bg_x, np.array([p[1] for p in frame], dtype=np.int64)])
    out = np.zeros((h, w), dtype=np.float64)
    fg_y, fg_x = np.nonzero(mask)
    for start in range(0, len(fg_y), 256):
        cy = fg_y[start : start + 256]
        cx = fg_x[start : start + 256]
        d2 = (cy[:, None] - all_bg_y[None, :]) ** 2 + (cx[:, None] - all_bg_x[None, :]) ** 2
        out[cy, cx] = np.sqrt(d2.min(axis=1))
    return out


def zhang_suen_brute(mask: np.ndarray) -> np.ndarray:
    """Textbook two-subiteration thinning with explicit pixel loops."""
    img = mask.astype(np.uint8).copy()
    h, w = img.shape

    def neighbors(y, x):
        def at(yy, xx):
            return img[yy, xx] if 0 <= yy < h and 0 <= xx < w else 0

        return [at(y - 1, x), at(y - 1, x + 1), at(y, x + 1), at(y + 1, x + 1),
                at(y + 1, x), at(y + 1, x - 1), at(y, x - 1), at(y - 1, x - 1)]

    changed = True
    while changed:
        changed = False
        for sub in (0, 1):
            to_delete = []
            for y in range(h):
                for x in range(w):
                    if not img[y, x]:
                        continue
                    n = neighbors(y, x)
                    b = sum(n)
                    if not 2 <= b <= 6:
                        continue
                    seq = n + n[:1]
                    a = sum(1 for i in range(8) if seq[i] == 0 and seq[i + 1] == 1)
                    if a != 1:
                        continue
                    p2, p4, p6, p8 = n[0], n[2], n[4], n[6]
                    if sub == 0:
                        if p2 * p4 * p6 == 0 and p4 * p6 * p8 == 0:
                            to_delete.append((y, x))
                    else:
                        if p2 * p4 * p8 == 0 and p2 * p6 * p8 == 0:
                            to_delete.append((y, x))
            if to_delete:
                changed = True
                for y, x in to_delete:
                    img[y, x] = 0
    return img.astype(bool)


def hull_vertices_brute(points: np.ndarray) -> set[tuple[int, int]]:
    """Hull vertex coordinates by exhaustive supporting-line search."""
    pts = [tuple(map(int, p)) for p in points]
    unique = sorted(set(pts))
    if len(unique) <= 2:
        return set(unique)
    verts: set[tuple[int, int]] = set()
    for a in unique:
        for b in unique:
            if a == b:
                continue
            left = right = 0
            for c in unique:
                if c in (a, b):
                    continue
                cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
                if cross > 0:
                    left += 1
                elif cross < 0:
                    right += 1
            if left == 0 or right == 0:
                verts.add(a)
                verts.add(b)
    # Drop points strictly inside the segment between two other hull points.
    final = set()
    for v in verts:
        on_edge_interior = False
        for a in verts:
            for b in verts:
                if a == b or v in (a, b):
                    continue
                cross = (b[0] - a[0]) * (v[1] - a[1]) - (b[1] - a[1]) * (v[0] - a[0])
                if cross == 0:
                    if min(a[0], b[0]) <= v[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= v[1] <= max(a[1], b[1]):
                        on_edge_interior = True
        if not on_edge_interior:
            final.add(v)
    return final


def max_arc_distance_brute(points: np.ndarray, ia: int, ib: int) -> float:
    """Max perpendicular distance from the contour arc (ia, ib) to edge ia-ib."""
    n = len(points)
    a = points[ia].astype(np.float64)
    b = points[ib].astype(np.float64)
    ab = b - a
    norm = math.hypot(ab[0], ab[1])
    best = 0.0
    j = (ia + 1) % n
    while j != ib:
        p = points[j].astype(np.float64)
        if norm == 0:
            d = math.hypot(p[0] - a[0], p[1] - a[1])
        else:
            d = abs((p[0] - a[0]) * ab[1] - (p[1] - a[1]) * ab[0]) / norm
        best = max(best, d)
        j = (j + 1) % n
    return best


def geodesic_nearest_marker_brute(mask: np.ndarray, markers: np.ndarray) -> np.ndarray:
    """Assign each foreground pixel to the geodesically nearest marker.

    Chamfer (3, 4) step weights inside the foreground; ties go to the lower
    marker label. Plain Dijkstra with a heap, one run per marker label.
    """
    h, w = mask.shape
    labels = sorted(int(v) for v in np.unique(markers) if v > 0)
    best_d = np.full((h, w), np.inf)
    best_l = np.zeros((h, w), dtype=np.int32)
    for lab in labels:
        dist = np.full((h, w), np.inf)
        heap = []
        for y, x in np.argwhere(markers == lab):
            dist[y, x] = 0.0
            heapq.heappush(heap, (0.0, int(y), int(x)))
        while heap:
            d, y, x = heapq.heappop(heap)
            if d > dist[y, x]:
                continue
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    if dy == 0 and dx == 0:
                        continue
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and mask[yy, xx]:
                        nd = d + (4 if dy and dx else 3)
                        if nd < dist[yy, xx]:
                            dist[yy, xx] = nd
                            heapq.heappush(heap, (nd, yy, xx))
        better = dist < best_d
        best_d = np.where(better, dist, best_d)
        best_l = np.where(better & mask, lab, best_l)
    return best_l


def rank_brute(values: list[float]) -> list[float]:
    """Average ranks by explicit enumeration."""
    out = []
    for v in values:
        less = sum(1 for u in values if u < v)
        equal = sum(1 for u in values if u == v)
        out.append(less + (equal + 1) / 2.0)
    return out


def pearson_brute(x: list[float], y: list[float]) -> float:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    num = sum((a - mx) * (b - my) for a, b in zip(x, y))
    den = math.sqrt(sum((a - mx) ** 2 for a in x) * sum((b - my) ** 2 for b in y))
    return num / den
