"""Binary segmentation masks to instance label maps.

Watershed over a chamfer distance transform handles round adhesions,
convexity-defect split lines refined against the region skeleton handle
elongated ones, and a per-image grid search picks the configuration whose
instance count best matches a reference. Includes a count-based evaluation
harness and a seeded synthetic scene generator.
"""

from .contours import Contour, ConvexityDefect, contour_area, convex_hull, convexity_defects, trace_contours
from .metrics import CountSeries, MetricError, evaluate_dataset, mape, pe, pearson, spearman
from .morphops import (
    DistanceMap,
    StructuringElement,
    connected_components,
    dilate,
    distance_transform,
    erode,
    morph_split,
)
from .pipeline import ConvertStats, MixParams, PipelineConfig, collect_inner, convert, filter_min_area, run_method
from .raster import LabelMap, Mask, load_labelmap, load_mask, relabel, save_labelmap
from .skeleton import Skeleton, skeleton_split, thin
from .splitter import LengthBounds, SplitLine, align_to_skeleton, carve_lines, fit_length_bounds, propose_lines
from .synthgen import Lcg, PlacementError, SceneSpec, generate
from .tuner import GridEntry, TuneResult, default_grid, grid_search, tune_dataset
from .watershed import MarkerMap, compute_markers, watershed_flood, watershed_split

__all__ = [
    "Contour", "ConvexityDefect", "contour_area", "convex_hull", "convexity_defects", "trace_contours",
    "CountSeries", "MetricError", "evaluate_dataset", "mape", "pe", "pearson", "spearman",
    "DistanceMap", "StructuringElement", "connected_components", "dilate", "distance_transform",
    "erode", "morph_split",
    "ConvertStats", "MixParams", "PipelineConfig", "collect_inner", "convert", "filter_min_area", "run_method",
    "LabelMap", "Mask", "load_labelmap", "load_mask", "relabel", "save_labelmap",
    "Skeleton", "skeleton_split", "thin",
    "LengthBounds", "SplitLine", "align_to_skeleton", "carve_lines", "fit_length_bounds", "propose_lines",
    "Lcg", "PlacementError", "SceneSpec", "generate",
    "GridEntry", "TuneResult", "default_grid", "grid_search", "tune_dataset",
    "MarkerMap", "compute_markers", "watershed_flood", "watershed_split",
]

__version__ = "0.1.0"
