"""One full binary-to-instance conversion under one configuration.

``convert`` dispatches on the method of a hyperparameter tuple, then applies
minimum-area filtering, optional inner-contour collection, and relabeling.
The ``dymorph`` method is the refined stack: watershed first, convexity
defect lines per instance, skeleton alignment, and a bisected length window
targeting a reference object count. The ``combination`` method is the same
stack without any refinement, kept as the over-segmenting regression
baseline the refined path has to beat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage as ndi

from .contours import convex_hull, convexity_defects, trace_contours
from .morphops import StructuringElement, connected_components, morph_split
from .raster import LabelMap, Mask, relabel
from .skeleton import Skeleton, skeleton_split, thin
from .splitter import SplitLine, align_to_skeleton, carve_into, fit_length_bounds, propose_lines
from .watershed import _split_with_markers

METHODS = ("findcontour", "watershed", "skeleton", "morphology", "combination", "dymorph")


@dataclass(frozen=True)
class MixParams:
    """Five-element hyperparameter tuple selecting and shaping one method."""

    method: str
    dist_kernel: int = 3
    fg_thresh: float = 0.5
    min_len: float = 0.0
    max_len: float | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}, expected one of {METHODS}")
        if self.dist_kernel not in (3, 5):
            raise ValueError(f"dist_kernel must be 3 or 5, got {self.dist_kernel}")
        if not 0.0 <= self.fg_thresh <= 1.0:
            raise ValueError(f"fg_thresh must lie in [0, 1], got {self.fg_thresh}")
        if self.min_len < 0:
            raise ValueError(f"min_len must be >= 0, got {self.min_len}")
        if self.max_len is not None and self.max_len < self.min_len:
            raise ValueError(f"need min_len <= max_len, got ({self.min_len}, {self.max_len})")


@dataclass(frozen=True)
class PipelineConfig:
    """Shared knobs around the per-method tuples."""

    mix_params: tuple[MixParams, ...]
    min_area: float = 0.0
    inter_collect: bool = False
    connectivity: int = 8
    prune_len: int = 5
    tau: float = 5.0
    min_defect_depth: float = 1.0
    threshold_scope: str = "component"

    def __post_init__(self) -> None:
        if not self.mix_params:
            raise ValueError("mix_params must not be empty")
        object.__setattr__(self, "mix_params", tuple(self.mix_params))
        if self.min_area < 0:
            raise ValueError(f"min_area must be >= 0, got {self.min_area}")
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")
        if self.threshold_scope not in ("component", "global"):
            raise ValueError(f"threshold_scope must be 'component' or 'global', got {self.threshold_scope!r}")


@dataclass(frozen=True)
class ConvertStats:
    """Bookkeeping the tuner needs: how many cuts the run actually carved."""

    lines_proposed: int = 0
    lines_carved: int = 0


def _instance_lines(
    labels: LabelMap,
    cfg: PipelineConfig,
    skel: Skeleton | None = None,
) -> list[SplitLine]:
    """Defect-pair proposals per instance, optionally skeleton-aligned."""
    lines: list[SplitLine] = []
    objects = ndi.find_objects(labels.data)
    for lab, slc in enumerate(objects, start=1):
        if slc is None:
            continue
        sub = labels.data[slc] == lab
        cs = [c for c in trace_contours(Mask(sub)) if c.kind == "outer"]
        if not cs:
            continue
        outer = cs[0]
        hull = convex_hull(outer)
        defects = convexity_defects(outer, hull, min_depth=cfg.min_defect_depth)
        proposals = propose_lines(outer, defects)
        if not proposals:
            continue
        ox, oy = slc[1].start, slc[0].start
        shifted = [
            SplitLine(p0=(ln.p0[0] + ox, ln.p0[1] + oy), p1=(ln.p1[0] + ox, ln.p1[1] + oy))
            for ln in proposals
        ]
        if skel is not None:
            region = Mask(labels.data == lab)
            shifted = [align_to_skeleton(ln, skel, cfg.tau, region) for ln in shifted]
        lines.extend(shifted)
    return lines


def _run_dymorph(
    mask: Mask, p: MixParams, cfg: PipelineConfig, target_count: int | None
) -> tuple[LabelMap, ConvertStats]:
    ws, marker_count = _split_with_markers(mask, p.dist_kernel, p.fg_thresh, cfg.threshold_scope)
    if ws.count == 0:
        return ws, ConvertStats()
    target = target_count if target_count is not None else marker_count
    target = max(1, int(target))
    skel = thin(mask)
    lines = _instance_lines(ws, cfg, skel=skel)
    bounds, carved = fit_length_bounds(lines, mask, target, p.min_len, base=ws)
    n_carved = sum(1 for ln in lines if p.min_len <= ln.length <= bounds.max_len)
    return relabel(carved), ConvertStats(lines_proposed=len(lines), lines_carved=n_carved)


def _run_combination(mask: Mask, p: MixParams, cfg: PipelineConfig) -> tuple[LabelMap, ConvertStats]:
    ws, _ = _split_with_markers(mask, p.dist_kernel, p.fg_thresh, cfg.threshold_scope)
    if ws.count == 0:
        return ws, ConvertStats()
    lines = _instance_lines(ws, cfg, skel=None)
    carved = carve_into(ws.data, lines)
    out = np.zeros_like(carved.data)
    next_label = 0
    objects = ndi.find_objects(carved.data)
    for lab, slc in enumerate(objects, start=1):
        if slc is None:
            continue
        sub = carved.data[slc] == lab
        split = skeleton_split(Mask(sub), prune_len=0)
        view = out[slc]
        view[sub] = split.data[sub] + next_label
        next_label += split.count
    return relabel(LabelMap(out)), ConvertStats(lines_proposed=len(lines), lines_carved=len(lines))


def run_method(
    mask: Mask, p: MixParams, cfg: PipelineConfig, target_count: int | None = None
) -> LabelMap:
    """Dispatch one segmentation method; see :func:`convert` for the full pass."""
    labels, _ = _run_method_stats(mask, p, cfg, target_count)
    return labels


def _run_method_stats(
    mask: Mask, p: MixParams, cfg: PipelineConfig, target_count: int | None = None
) -> tuple[LabelMap, ConvertStats]:
    if p.method == "findcontour":
        return connected_components(mask, cfg.connectivity), ConvertStats()
    if p.method == "watershed":
        labels, _ = _split_with_markers(mask, p.dist_kernel, p.fg_thresh, cfg.threshold_scope)
        return labels, ConvertStats()
    if p.method == "skeleton":
        return skeleton_split(mask, cfg.prune_len), ConvertStats()
    if p.method == "morphology":
        return morph_split(mask, StructuringElement(p.dist_kernel)), ConvertStats()
    if p.method == "combination":
        return _run_combination(mask, p, cfg)
    if p.method == "dymorph":
        return _run_dymorph(mask, p, cfg, target_count)
    raise ValueError(f"unknown method {p.method!r}")


def filter_min_area(labels: LabelMap, min_area: float) -> LabelMap:
    """Merge or drop instances smaller than min_area pixels.

    A small instance folds into its largest 8-adjacent neighbor when one
    exists (so carve fragments keep their object's area); isolated specks
    drop to background.
    """
    if min_area < 0:
        raise ValueError(f"min_area must be >= 0, got {min_area}")
    if min_area <= 0 or labels.count == 0:
        return labels
    arr = labels.data.copy()
    max_label = int(arr.max())
    sizes = np.bincount(arr.ravel(), minlength=max_label + 1).astype(np.int64)
    for lab in range(1, max_label + 1):
        if sizes[lab] == 0 or sizes[lab] >= min_area:
            continue
        region = arr == lab
        ring = ndi.binary_dilation(region, structure=np.ones((3, 3), dtype=bool)) & ~region
        neighbors = np.unique(arr[ring])
        neighbors = neighbors[neighbors > 0]
        if neighbors.size:
            best = max(neighbors.tolist(), key=lambda n: (sizes[n], -n))
            arr[region] = best
            sizes[best] += sizes[lab]
        else:
            arr[region] = 0
        sizes[lab] = 0
    return relabel(LabelMap(arr))


def collect_inner(mask: Mask, labels: LabelMap, min_area: float) -> LabelMap:
    """Promote holes to instances of their own.

    A hole is a 4-connected background region of the mask that does not
    touch the image border; it becomes a fresh instance when it is at least
    min_area pixels and every adjacent labeled pixel belongs to one single
    instance.
    """
    bg = ~mask.data
    if not bg.any():
        return labels
    holes = connected_components(Mask(bg), 4)
    if holes.count == 0:
        return labels
    border = np.zeros_like(bg)
    border[0, :] = border[-1, :] = True
    border[:, 0] = border[:, -1] = True
    touching = set(np.unique(holes.data[border & bg]).tolist())
    arr = labels.data.copy()
    next_label = int(arr.max()) + 1
    objects = ndi.find_objects(holes.data)
    h, w = arr.shape
    for lab, slc in enumerate(objects, start=1):
        if slc is None or lab in touching:
            continue
        region_full = holes.data == lab
        size = int(region_full.sum())
        if size < min_area:
            continue
        ys, xs = np.nonzero(region_full)
        owner: set[int] = set()
        ok = True
        for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
            ny, nx = ys + dy, xs + dx
            valid = (ny >= 0) & (ny < h) & (nx >= 0) & (nx < w)
            vals = arr[ny[valid], nx[valid]]
            outside = ~region_full[ny[valid], nx[valid]]
            vals = vals[outside]
            owner.update(np.unique(vals).tolist())
        if 0 in owner or len(owner) != 1:
            ok = False
        if ok:
            arr[region_full] = next_label
            next_label += 1
    return LabelMap(arr)


def convert(
    mask: Mask, p: MixParams, cfg: PipelineConfig, target_count: int | None = None
) -> LabelMap:
    """Full conversion: method, area filter, optional hole collection, relabel."""
    labels, _ = convert_with_stats(mask, p, cfg, target_count)
    return labels


def convert_with_stats(
    mask: Mask, p: MixParams, cfg: PipelineConfig, target_count: int | None = None
) -> tuple[LabelMap, ConvertStats]:
    labels, stats = _run_method_stats(mask, p, cfg, target_count)
    labels = filter_min_area(labels, cfg.min_area)
    if cfg.inter_collect:
        labels = collect_inner(mask, labels, cfg.min_area)
    return relabel(labels), stats
