"""Binary morphology, connected components and the chamfer distance transform.

The distance transform is a two-pass chamfer approximation of the Euclidean
distance to the nearest background pixel. Kernel size 3 uses integer weights
(3 orthogonal, 4 diagonal) scaled by 1/3; kernel size 5 adds knight moves and
uses (5, 7, 11) scaled by 1/5. Relative error against true Euclidean distance
stays within 8% for both. Out-of-bounds pixels count as background everywhere
in this module.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import ndimage as ndi

from .raster import LabelMap, Mask, _frozen, relabel

_INF = np.int64(1) << 48

# (dy, dx, weight-index) for the 8-neighborhood; weight index 0 = orthogonal,
# 1 = diagonal. Scan order fixed for determinism.
_NEIGHBORS_8 = (
    (-1, -1, 1), (-1, 0, 0), (-1, 1, 1),
    (0, -1, 0), (0, 1, 0),
    (1, -1, 1), (1, 0, 0), (1, 1, 1),
)


@dataclass(frozen=True)
class StructuringElement:
    """Square structuring element with an odd side length."""

    size: int

    def __post_init__(self) -> None:
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"structuring element size must be an odd integer >= 1, got {self.size}")

    @property
    def radius(self) -> int:
        return self.size // 2


@dataclass(frozen=True, eq=False)
class DistanceMap:
    """Per-pixel chamfer distance to the nearest background pixel."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError("distance map must be 2-D")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


def erode(mask: Mask, se: StructuringElement) -> Mask:
    """Keep a pixel iff every pixel under the centered element is foreground."""
    if se.size == 1:
        return Mask(mask.data)
    r = se.radius
    padded = np.pad(mask.data, r, mode="constant", constant_values=False)
    windows = sliding_window_view(padded, (se.size, se.size))
    return Mask(windows.all(axis=(2, 3)))


def dilate(mask: Mask, se: StructuringElement) -> Mask:
    """Keep a pixel iff any pixel under the centered element is foreground."""
    if se.size == 1:
        return Mask(mask.data)
    r = se.radius
    padded = np.pad(mask.data, r, mode="constant", constant_values=False)
    windows = sliding_window_view(padded, (se.size, se.size))
    return Mask(windows.any(axis=(2, 3)))


def connected_components(mask: Mask, connectivity: int = 8) -> LabelMap:
    """Label connected foreground regions, contiguous 1..count in scan order."""
    if connectivity == 8:
        structure = np.ones((3, 3), dtype=np.int8)
    elif connectivity == 4:
        structure = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.int8)
    else:
        raise ValueError(f"connectivity must be 4 or 8, got {connectivity}")
    labeled, _ = ndi.label(mask.data, structure=structure)
    return relabel(LabelMap(labeled))


def _chamfer_int(mask_data: np.ndarray, dist_kernel: int) -> np.ndarray:
    """Two-pass chamfer scan returning unscaled integer distances (padded off)."""
    if dist_kernel == 3:
        a, b, c = 3, 4, 0
    else:
        a, b, c = 5, 7, 11
    pad = 2
    h, w = mask_data.shape
    d = np.full((h + 2 * pad, w + 2 * pad), _INF, dtype=np.int64)
    d[pad:-pad, pad:-pad] = np.where(mask_data, _INF, 0)
    d[:pad, :] = 0
    d[-pad:, :] = 0
    d[:, :pad] = 0
    d[:, -pad:] = 0

    width = d.shape[1]
    slope = np.int64(a) * np.arange(width, dtype=np.int64)

    def shift(row: np.ndarray, k: int) -> np.ndarray:
        out = np.full(width, _INF, dtype=np.int64)
        if k > 0:
            out[k:] = row[:-k]
        elif k < 0:
            out[:k] = row[-k:]
        else:
            out[:] = row
        return out

    # Forward raster pass: prior rows contribute directly, the in-row
    # left-to-right chain collapses to a running minimum of (d - a*x).
    for y in range(pad, d.shape[0]):
        row = d[y]
        up = d[y - 1]
        row = np.minimum(row, up + a)
        row = np.minimum(row, shift(up, 1) + b)
        row = np.minimum(row, shift(up, -1) + b)
        if c:
            up2 = d[y - 2]
            row = np.minimum(row, shift(up, 2) + c)
            row = np.minimum(row, shift(up, -2) + c)
            row = np.minimum(row, shift(up2, 1) + c)
            row = np.minimum(row, shift(up2, -1) + c)
        row = np.minimum.accumulate(row - slope) + slope
        d[y] = row

    for y in range(d.shape[0] - pad - 1, -1, -1):
        row = d[y]
        down = d[y + 1]
        row = np.minimum(row, down + a)
        row = np.minimum(row, shift(down, 1) + b)
        row = np.minimum(row, shift(down, -1) + b)
        if c:
            down2 = d[y + 2]
            row = np.minimum(row, shift(down, 2) + c)
            row = np.minimum(row, shift(down, -2) + c)
            row = np.minimum(row, shift(down2, 1) + c)
            row = np.minimum(row, shift(down2, -1) + c)
        rev = row[::-1]
        rev = np.minimum.accumulate(rev - slope) + slope
        d[y] = rev[::-1]

    return d[pad:-pad, pad:-pad]


def distance_transform(mask: Mask, dist_kernel: int) -> DistanceMap:
    """Chamfer distance to the nearest background pixel.

    ``dist_kernel`` 3 covers the 8-neighborhood, 5 additionally propagates
    along knight moves for a tighter Euclidean approximation.
    """
    if dist_kernel not in (3, 5):
        raise ValueError(f"dist_kernel must be 3 or 5, got {dist_kernel}")
    scale = 3.0 if dist_kernel == 3 else 5.0
    return DistanceMap(_chamfer_int(mask.data, dist_kernel) / scale)


def nearest_seed_labels(
    seeds: np.ndarray,
    weights: tuple[int, int] = (3, 4),
    traversable: np.ndarray | None = None,
) -> np.ndarray:
    """Grow integer seed labels outward, nearest seed wins, ties to lowest label.

    Multi-source shortest path over the 8-neighborhood with integer step
    weights ``(orthogonal, diagonal)``. With weights (1, 1) this reproduces
    iterated unit dilation (uniform wavefronts); with (3, 4) it is the chamfer
    metric. ``traversable`` restricts where fronts may walk (None = anywhere).
    Unreachable pixels keep label 0.
    """
    h, w = seeds.shape
    labels = np.zeros((h + 2, w + 2), dtype=np.int32)
    labels[1:-1, 1:-1] = seeds
    if traversable is None:
        trav = np.zeros((h + 2, w + 2), dtype=bool)
        trav[1:-1, 1:-1] = True
    else:
        trav = np.zeros((h + 2, w + 2), dtype=bool)
        trav[1:-1, 1:-1] = traversable
    flat_labels = labels.ravel()
    flat_trav = trav.ravel()
    stride = w + 2
    offsets = [(dy * stride + dx, weights[wi]) for dy, dx, wi in _NEIGHBORS_8]

    idx0 = np.flatnonzero(flat_labels > 0)
    frontier: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {}
    levels: list[int] = []
    seen: set[int] = set()

    def push(level: int, idx: np.ndarray, lab: np.ndarray) -> None:
        if idx.size == 0:
            return
        frontier.setdefault(level, []).append((idx, lab))
        if level not in seen:
            seen.add(level)
            heapq.heappush(levels, level)

    current_idx = idx0
    current_lab = flat_labels[idx0]
    level = 0
    while True:
        for off, wt in offsets:
            nidx = current_idx + off
            ok = flat_trav[nidx] & (flat_labels[nidx] == 0)
            push(level + wt, nidx[ok], current_lab[ok])
        if not levels:
            break
        level = heapq.heappop(levels)
        seen.discard(level)
        chunks = frontier.pop(level)
        idx = np.concatenate([cidx for cidx, _ in chunks])
        lab = np.concatenate([clab for _, clab in chunks])
        fresh = flat_labels[idx] == 0
        idx, lab = idx[fresh], lab[fresh]
        if idx.size == 0:
            current_idx = idx
            current_lab = lab
            continue
        order = np.lexsort((lab, idx))
        idx, lab = idx[order], lab[order]
        keep = np.ones(idx.size, dtype=bool)
        keep[1:] = idx[1:] != idx[:-1]
        idx, lab = idx[keep], lab[keep]
        flat_labels[idx] = lab
        current_idx = idx
        current_lab = lab

    return labels[1:-1, 1:-1]


def morph_split(mask: Mask, se: StructuringElement) -> LabelMap:
    """Split light adhesions: erode, label the surviving cores, regrow.

    Cores regrow by geodesic dilation inside the original foreground, so the
    output instances cover exactly the input foreground. Foreground pixels in
    regions the erosion wiped out entirely join the nearest grown instance;
    if erosion left nothing at all, plain connected components are returned.
    """
    eroded = erode(mask, se)
    seeds = connected_components(eroded, 8)
    if seeds.count == 0:
        return connected_components(mask, 8)
    grown = nearest_seed_labels(seeds.data, weights=(1, 1), traversable=mask.data)
    orphan = mask.data & (grown == 0)
    if orphan.any():
        planar = nearest_seed_labels(grown, weights=(3, 4), traversable=None)
        grown = np.where(orphan, planar, grown)
    return relabel(LabelMap(np.where(mask.data, grown, 0)))
