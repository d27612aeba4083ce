"""Marker-based watershed over the chamfer distance transform.

Markers are the connected pieces of the thresholded distance map; the
threshold is relative to each foreground component's own distance maximum
by default (``scope="component"``), which keeps small objects next to
large ones from being starved of markers. Flooding runs a max-priority
queue on distance so basins grow from the deepest interior outward, and
ties pop in enqueue order, which makes the partition deterministic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi

from .morphops import DistanceMap, connected_components, distance_transform
from .raster import LabelMap, Mask, _frozen, relabel


@dataclass(frozen=True, eq=False)
class MarkerMap:
    """Integer seed raster; 0 = unassigned, k >= 1 seeds instance k."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 2:
            raise ValueError("marker map must be a 2-D raster")
        object.__setattr__(self, "data", _frozen(data.astype(np.int32)))

    @property
    def count(self) -> int:
        labels = np.unique(self.data)
        return int((labels > 0).sum())


def compute_markers(dist: DistanceMap, fg_thresh: float, scope: str = "component") -> MarkerMap:
    """Threshold the distance map into labeled seed regions.

    ``scope="component"`` computes the cutoff fg_thresh * max(dist) per
    foreground component; ``scope="global"`` uses one image-wide maximum,
    which can leave low-relief components without any marker.
    """
    if not 0.0 <= fg_thresh <= 1.0:
        raise ValueError(f"fg_thresh must lie in [0, 1], got {fg_thresh}")
    if scope not in ("component", "global"):
        raise ValueError(f"threshold scope must be 'component' or 'global', got {scope!r}")
    fg = dist.data > 0
    if not fg.any():
        return MarkerMap(np.zeros(dist.data.shape, dtype=np.int32))
    if scope == "global":
        cutoff = fg_thresh * float(dist.data.max())
        selected = fg & (dist.data >= cutoff)
    else:
        comps = connected_components(Mask(fg), 8)
        maxima = ndi.maximum(dist.data, labels=comps.data, index=np.arange(1, comps.count + 1))
        cutoffs = np.concatenate(([np.inf], fg_thresh * np.atleast_1d(maxima)))
        selected = dist.data >= cutoffs[comps.data]
    markers = connected_components(Mask(selected), 8)
    return MarkerMap(markers.data)


def _priority_keys(dist: DistanceMap) -> np.ndarray:
    """Integer flood priorities; chamfer values are exact multiples of 1/15."""
    scaled = dist.data * 15.0
    keys = np.rint(scaled)
    if np.abs(scaled - keys).max() > 1e-6:
        # Non-chamfer distance map: fall back to a rank-based integer key.
        flat = np.unique(dist.data)
        keys = np.searchsorted(flat, dist.data)
    return keys.astype(np.int64)


def watershed_flood(mask: Mask, dist: DistanceMap, markers: MarkerMap) -> LabelMap:
    """Flood markers over the foreground, deepest distance first.

    Every foreground pixel 8-connected to a marker takes the label of the
    neighbor that enqueued it; foreground components without any marker get
    one fresh label each so no object is ever lost.
    """
    if mask.data.shape != dist.data.shape or mask.data.shape != markers.data.shape:
        raise ValueError(
            f"dimension mismatch: mask {mask.data.shape}, distance {dist.data.shape}, markers {markers.data.shape}"
        )
    h, w = mask.data.shape
    fg = np.zeros((h + 2, w + 2), dtype=bool)
    fg[1:-1, 1:-1] = mask.data
    labels = np.zeros((h + 2, w + 2), dtype=np.int32)
    labels[1:-1, 1:-1] = np.where(mask.data, markers.data, 0)
    keys = np.zeros((h + 2, w + 2), dtype=np.int64)
    keys[1:-1, 1:-1] = _priority_keys(dist)

    stride = w + 2
    offsets = (-stride - 1, -stride, -stride + 1, -1, 1, stride - 1, stride, stride + 1)
    fg_flat = fg.ravel().tolist()
    lab_flat = labels.ravel().tolist()
    key_flat = keys.ravel().tolist()

    heap: list[tuple[int, int, int]] = []
    seq = 0
    for i in np.flatnonzero(labels.ravel()).tolist():
        heap.append((-key_flat[i], seq, i))
        seq += 1
    heapq.heapify(heap)

    push = heapq.heappush
    pop = heapq.heappop
    while heap:
        _, _, i = pop(heap)
        lab = lab_flat[i]
        for off in offsets:
            j = i + off
            if fg_flat[j] and lab_flat[j] == 0:
                lab_flat[j] = lab
                push(heap, (-key_flat[j], seq, j))
                seq += 1

    out = np.array(lab_flat, dtype=np.int32).reshape(h + 2, w + 2)[1:-1, 1:-1]

    orphan = mask.data & (out == 0)
    if orphan.any():
        extra = connected_components(Mask(orphan), 8)
        base = int(out.max())
        out = np.where(orphan, extra.data + base, out)
    return LabelMap(out)


def _split_with_markers(
    mask: Mask, dist_kernel: int, fg_thresh: float, scope: str = "component"
) -> tuple[LabelMap, int]:
    dist = distance_transform(mask, dist_kernel)
    markers = compute_markers(dist, fg_thresh, scope)
    flooded = watershed_flood(mask, dist, markers)
    return relabel(flooded), markers.count


def watershed_split(mask: Mask, dist_kernel: int, fg_thresh: float, scope: str = "component") -> LabelMap:
    """Distance transform, marker extraction and flood in one call."""
    labels, _ = _split_with_markers(mask, dist_kernel, fg_thresh, scope)
    return labels
