"""Core raster types and PNG I/O shared by every other module.

Masks come in as 8-bit single-channel PNGs (nonzero = foreground), label
maps go out as 16-bit single-channel PNGs so the round trip is lossless.
All raster values are immutable after construction and safe to share
across workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image


class MaskLoadError(ValueError):
    """Input image cannot be interpreted as a binary mask."""


class LabelCapacityError(ValueError):
    """Label map holds more instances than the output format allows."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Mask:
    """Binary raster; ``data[y, x]`` is True on foreground pixels."""

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"mask must be a 2-D raster, got shape {data.shape}")
        object.__setattr__(self, "data", _frozen(data.astype(bool)))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def foreground_count(self) -> int:
        return int(self.data.sum())


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Integer raster; 0 is background, labels 1..count are instances.

    ``count`` is the number of distinct nonzero labels actually present,
    which equals the maximum label only after :func:`relabel`.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        data = np.asarray(self.data)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"label map must be a 2-D raster, got shape {data.shape}")
        if data.size and data.min() < 0:
            raise ValueError("label map values must be non-negative")
        object.__setattr__(self, "data", _frozen(data.astype(np.int32)))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def count(self) -> int:
        labels = np.unique(self.data)
        return int((labels > 0).sum())

    def foreground(self) -> Mask:
        return Mask(self.data > 0)


def load_mask(path: str | Path) -> Mask:
    """Load an 8-bit single-channel PNG as a binary mask.

    Any nonzero pixel is foreground, which tolerates both 0/1 and 0/255
    export conventions.
    """
    path = Path(path)
    if not path.exists():
        raise MaskLoadError(f"mask file does not exist: {path}")
    with Image.open(path) as img:
        mode = img.mode
        if mode in ("I;16", "I;16B", "I;16L", "I", "I;16N"):
            raise MaskLoadError(f"unsupported bit depth (expected 8-bit, got 16/32-bit) in {path}")
        if mode in ("RGB", "RGBA", "LA", "CMYK", "YCbCr"):
            n = len(img.getbands())
            raise MaskLoadError(f"unsupported channel count (expected 1, got {n}) in {path}")
        if mode != "L":
            raise MaskLoadError(f"unsupported image mode {mode!r} in {path}")
        data = np.asarray(img, dtype=np.uint8)
    return Mask(data != 0)


def save_labelmap(labels: LabelMap, path: str | Path) -> None:
    """Write a label map as a 16-bit single-channel PNG (lossless round trip)."""
    max_label = int(labels.data.max()) if labels.data.size else 0
    if max_label > 65535:
        raise LabelCapacityError(f"label map has max label {max_label}, 16-bit PNG holds at most 65535")
    img = Image.fromarray(labels.data.astype(np.uint16))
    img.save(Path(path), format="PNG")


def load_labelmap(path: str | Path) -> LabelMap:
    """Load a 16-bit single-channel PNG written by :func:`save_labelmap`."""
    path = Path(path)
    if not path.exists():
        raise MaskLoadError(f"label map file does not exist: {path}")
    with Image.open(path) as img:
        if img.mode not in ("I;16", "I;16B", "I;16L", "I", "I;16N"):
            raise MaskLoadError(f"unsupported bit depth (expected 16-bit, got mode {img.mode!r}) in {path}")
        data = np.asarray(img)
    return LabelMap(data.astype(np.int32))


def relabel(labels: LabelMap) -> LabelMap:
    """Compact labels to 1..count in row-major first-occurrence order.

    The induced pixel partition is unchanged; only label values move.
    """
    flat = labels.data.ravel()
    present, first = np.unique(flat, return_index=True)
    nonzero = present > 0
    present, first = present[nonzero], first[nonzero]
    order = np.argsort(first, kind="stable")
    lut = np.zeros(int(present.max()) + 1 if present.size else 1, dtype=np.int32)
    lut[present[order]] = np.arange(1, len(present) + 1, dtype=np.int32)
    return LabelMap(lut[labels.data])
