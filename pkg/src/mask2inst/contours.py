"""Border following, hole hierarchy, convex hulls and convexity defects.

Contours are polygons over pixel centers. Outer contours follow the
boundary of each 8-connected foreground component; inner contours follow
the boundary of each 4-connected background hole and point at their
enclosing outer contour. Orientation is canonical: outer contours wind
counterclockwise on screen (negative literal shoelace sum with y growing
downward), inner contours wind clockwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi

from .morphops import connected_components
from .raster import Mask, _frozen

# Clockwise on screen starting east, as (dx, dy).
_TRACE_DIRS = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))
_DIR_INDEX = {d: i for i, d in enumerate(_TRACE_DIRS)}


@dataclass(frozen=True, eq=False)
class Contour:
    """Ordered boundary polygon; ``points`` has one (x, y) row per vertex."""

    points: np.ndarray
    kind: str
    parent: int | None
    area: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.int32)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise ValueError("contour needs at least one (x, y) point")
        if self.kind not in ("outer", "inner"):
            raise ValueError(f"contour kind must be 'outer' or 'inner', got {self.kind!r}")
        if (self.kind == "inner") != (self.parent is not None):
            raise ValueError("parent must be set exactly on inner contours")
        object.__setattr__(self, "points", _frozen(pts))

    def __len__(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class ConvexityDefect:
    """Deepest concave excursion between two hull vertices.

    ``index`` locates the defect point on the owning contour, ``depth`` is
    its perpendicular distance to the hull edge ``edge`` (pair of indices
    into the contour's point list).
    """

    point: tuple[int, int]
    index: int
    depth: float
    edge: tuple[int, int]


def signed_area(points: np.ndarray) -> float:
    """Literal shoelace sum / 2 with y taken as drawn (downward)."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[0] < 3:
        return 0.0
    x, y = pts[:, 0], pts[:, 1]
    return float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y) / 2.0)


def contour_area(c: Contour) -> float:
    """Shoelace magnitude of the contour polygon in pixels squared."""
    return abs(signed_area(c.points))


def _moore_trace(region: np.ndarray) -> np.ndarray:
    """Boundary walk of a connected pixel set; returns (n, 2) of (x, y).

    The walk starts at the topmost-leftmost pixel with its west neighbor as
    backtrack and stops when that exact state recurs, so pinched boundaries
    are traversed completely.
    """
    padded = np.pad(region, 1, mode="constant", constant_values=False)
    ys, xs = np.nonzero(padded)
    sy, sx = int(ys[0]), int(xs[0])
    start = (sx, sy)
    start_back = (sx - 1, sy)

    def next_step(cur: tuple[int, int], back: tuple[int, int]):
        base = _DIR_INDEX[(back[0] - cur[0], back[1] - cur[1])]
        for k in range(1, 9):
            dx, dy = _TRACE_DIRS[(base + k) % 8]
            cand = (cur[0] + dx, cur[1] + dy)
            if padded[cand[1], cand[0]]:
                pdx, pdy = _TRACE_DIRS[(base + k - 1) % 8]
                return cand, (cur[0] + pdx, cur[1] + pdy)
        return None, None

    points = [start]
    cur, back = next_step(start, start_back)
    if cur is None:
        return np.array([[sx - 1, sy - 1]], dtype=np.int32)
    limit = 8 * int(region.sum()) + 16
    while (cur, back) != (start, start_back) and len(points) <= limit:
        points.append(cur)
        cur, back = next_step(cur, back)
    return np.array(points, dtype=np.int32) - 1


def _oriented(points: np.ndarray, kind: str) -> np.ndarray:
    area = signed_area(points)
    want_negative = kind == "outer"
    if area != 0.0 and (area < 0) != want_negative:
        return points[::-1].copy()
    return points


def trace_contours(mask: Mask) -> list[Contour]:
    """Trace all outer and inner (hole) contours of a mask.

    Outer contours come first, one per 8-connected foreground component in
    scan order, then inner contours, one per enclosed 4-connected background
    hole, each carrying the index of its parent outer contour.
    """
    comps = connected_components(mask, 8)
    contours: list[Contour] = []
    objects = ndi.find_objects(comps.data)
    for lab, slc in enumerate(objects, start=1):
        if slc is None:
            continue
        region = comps.data[slc] == lab
        pts = _moore_trace(region)
        pts += np.array([slc[1].start, slc[0].start], dtype=np.int32)
        pts = _oriented(pts, "outer")
        contours.append(Contour(points=pts, kind="outer", parent=None, area=abs(signed_area(pts))))

    bg = ~mask.data
    holes = connected_components(Mask(bg), 4) if bg.any() else None
    if holes is not None and holes.count:
        border = np.zeros_like(bg)
        border[0, :] = border[-1, :] = True
        border[:, 0] = border[:, -1] = True
        touching = set(np.unique(holes.data[border & bg]).tolist())
        hole_objects = ndi.find_objects(holes.data)
        h, w = mask.data.shape
        for lab, slc in enumerate(hole_objects, start=1):
            if slc is None or lab in touching:
                continue
            region = holes.data[slc] == lab
            pts = _moore_trace(region)
            pts += np.array([slc[1].start, slc[0].start], dtype=np.int32)
            pts = _oriented(pts, "inner")
            parent = None
            for hy, hx in np.argwhere(holes.data == lab):
                for ny, nx in ((hy - 1, hx), (hy, hx - 1), (hy, hx + 1), (hy + 1, hx)):
                    if 0 <= ny < h and 0 <= nx < w and comps.data[ny, nx] > 0:
                        parent = int(comps.data[ny, nx]) - 1
                        break
                if parent is not None:
                    break
            if parent is None:
                continue
            contours.append(Contour(points=pts, kind="inner", parent=parent, area=abs(signed_area(pts))))
    return contours


def convex_hull(c: Contour) -> list[int]:
    """Monotone-chain hull over the contour points.

    Returns indices into ``c.points`` in contour order; duplicate
    coordinates resolve to their first occurrence. Collinear inputs give
    the two extreme indices, a single point gives itself.
    """
    pts = c.points
    first_index: dict[tuple[int, int], int] = {}
    for i, (x, y) in enumerate(pts.tolist()):
        first_index.setdefault((x, y), i)
    coords = sorted(first_index)
    if len(coords) == 1:
        return [first_index[coords[0]]]
    if len(coords) == 2:
        return sorted(first_index[c0] for c0 in coords)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in coords:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(coords):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull_coords = lower[:-1] + upper[:-1]
    if len(hull_coords) < 2:
        hull_coords = lower[:1] + upper[:1]
    return sorted(first_index[p] for p in hull_coords)


def _perp_distance(a: np.ndarray, b: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Distance from points p to the line through a-b (or to a when a == b)."""
    ab = (b - a).astype(np.float64)
    norm = float(np.hypot(ab[0], ab[1]))
    if norm == 0.0:
        d = p.astype(np.float64) - a
        return np.hypot(d[:, 0], d[:, 1])
    crossed = (p[:, 0] - a[0]) * ab[1] - (p[:, 1] - a[1]) * ab[0]
    return np.abs(crossed) / norm


def convexity_defects(c: Contour, hull: list[int], min_depth: float = 1.0) -> list[ConvexityDefect]:
    """Deepest defect per hull edge, shallow ones (< min_depth px) dropped.

    For each pair of hull vertices consecutive in contour order, the contour
    point strictly between them with maximum perpendicular distance to the
    edge is the defect point; that distance is the depth.
    """
    n = len(c)
    if len(hull) < 2 or n < 3:
        return []
    defects: list[ConvexityDefect] = []
    pts = c.points
    for k in range(len(hull)):
        ia = hull[k]
        ib = hull[(k + 1) % len(hull)]
        arc = [(ia + t) % n for t in range(1, (ib - ia) % n)]
        if not arc:
            continue
        arc_pts = pts[arc]
        dists = _perp_distance(pts[ia], pts[ib], arc_pts)
        j = int(np.argmax(dists))
        depth = float(dists[j])
        if depth >= min_depth:
            idx = arc[j]
            defects.append(
                ConvexityDefect(point=(int(pts[idx, 0]), int(pts[idx, 1])), index=idx, depth=depth, edge=(ia, ib))
            )
    return defects
