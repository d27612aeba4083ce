"""Per-image hyperparameter search driven by reference object counts.

Each image gets its own grid search: every candidate configuration is
converted and the one whose instance count lands closest to the reference
wins. Ties prefer fewer carved lines, then earlier grid position, so results
are deterministic for a fixed grid order regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .pipeline import MixParams, PipelineConfig, convert_with_stats
from .raster import Mask


@dataclass(frozen=True)
class GridEntry:
    """One tunable candidate: a method tuple plus area/hole knobs."""

    params: MixParams
    min_area: float = 0.0
    inter_collect: bool = False


@dataclass(frozen=True)
class TuneResult:
    image_id: str
    chosen: GridEntry | None
    achieved_count: int
    reference_count: int
    objective: int
    candidates_evaluated: int
    error: str | None = None


def default_grid() -> list[GridEntry]:
    """The documented desk-scale default grid (288 entries)."""
    grid: list[GridEntry] = []
    for method in ("watershed", "dymorph"):
        for dist_kernel in (3, 5):
            for fg_thresh in (0.3, 0.4, 0.5, 0.6):
                for min_len in (0.0, 5.0, 10.0):
                    for min_area in (0.0, 30.0, 100.0):
                        for inter_collect in (False, True):
                            grid.append(
                                GridEntry(
                                    params=MixParams(
                                        method=method,
                                        dist_kernel=dist_kernel,
                                        fg_thresh=fg_thresh,
                                        min_len=min_len,
                                    ),
                                    min_area=min_area,
                                    inter_collect=inter_collect,
                                )
                            )
    return grid


def grid_search(
    mask: Mask,
    reference_count: int,
    grid: list[GridEntry],
    cfg: PipelineConfig,
    image_id: str = "",
) -> TuneResult:
    """Evaluate every grid entry on one mask and keep the closest count."""
    if not grid:
        raise ValueError("grid must not be empty")
    if reference_count < 0:
        raise ValueError(f"reference_count must be >= 0, got {reference_count}")
    best_key: tuple[int, int, int] | None = None
    best_entry: GridEntry | None = None
    best_count = 0
    for gi, entry in enumerate(grid):
        cfg_i = replace(
            cfg,
            mix_params=(entry.params,),
            min_area=entry.min_area,
            inter_collect=entry.inter_collect,
        )
        labels, stats = convert_with_stats(mask, entry.params, cfg_i, target_count=reference_count)
        count = labels.count
        key = (abs(count - reference_count), stats.lines_carved, gi)
        if best_key is None or key < best_key:
            best_key = key
            best_entry = entry
            best_count = count
    assert best_key is not None and best_entry is not None
    return TuneResult(
        image_id=image_id,
        chosen=best_entry,
        achieved_count=best_count,
        reference_count=reference_count,
        objective=best_key[0],
        candidates_evaluated=len(grid),
    )


def tune_dataset(
    images: list[tuple[Mask, int]],
    grid: list[GridEntry],
    cfg: PipelineConfig,
    ids: list[str] | None = None,
) -> list[TuneResult]:
    """Independent per-image searches; one failure never aborts the batch."""
    results: list[TuneResult] = []
    for i, (mask, reference) in enumerate(images):
        image_id = ids[i] if ids is not None else str(i)
        try:
            results.append(grid_search(mask, reference, grid, cfg, image_id=image_id))
        except Exception as exc:  # noqa: BLE001 - recorded, not silenced
            results.append(
                TuneResult(
                    image_id=image_id,
                    chosen=None,
                    achieved_count=0,
                    reference_count=reference,
                    objective=reference,
                    candidates_evaluated=0,
                    error=str(exc),
                )
            )
    return results
