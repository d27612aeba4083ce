"""Command-line entry point: convert, tune, eval and synth workflows.

All commands exit 0 only when every input processed cleanly. Outputs are
per-image PNGs plus one JSON manifest written at the end; overlays are
derived artifacts and never feed back into label maps.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
from PIL import Image

from .metrics import CountSeries, MetricError, evaluate_dataset
from .pipeline import METHODS, MixParams, PipelineConfig, convert
from .raster import LabelMap, load_mask, relabel, save_labelmap
from .synthgen import Lcg, SceneSpec, generate
from .tuner import GridEntry, grid_search

_SKIP_SUFFIXES = ("_labels.png", "_overlay.png", "_truth.png")


def load_config(path: str | Path) -> PipelineConfig:
    """Parse the JSON pipeline configuration."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    mix = tuple(
        MixParams(
            method=entry["method"],
            dist_kernel=int(entry.get("dist_kernel", 3)),
            fg_thresh=float(entry.get("fg_thresh", 0.5)),
            min_len=float(entry.get("min_len", 0.0)),
            max_len=None if entry.get("max_len") is None else float(entry["max_len"]),
        )
        for entry in raw["mix_params"]
    )
    return PipelineConfig(
        mix_params=mix,
        min_area=float(raw.get("min_area", 0.0)),
        inter_collect=bool(raw.get("inter_collect", False)),
        connectivity=int(raw.get("connectivity", 8)),
        prune_len=int(raw.get("prune_len", 5)),
        tau=float(raw.get("tau", 5.0)),
        min_defect_depth=float(raw.get("min_defect_depth", 1.0)),
        threshold_scope=str(raw.get("threshold_scope", "component")),
    )


def _config_grids(path: str | Path, cfg: PipelineConfig) -> list[GridEntry]:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    min_areas = [float(v) for v in raw.get("min_area_grid", [cfg.min_area])]
    inter = [bool(v) for v in raw.get("inter_collect_grid", [cfg.inter_collect])]
    return [
        GridEntry(params=p, min_area=a, inter_collect=ic)
        for p in cfg.mix_params
        for a in min_areas
        for ic in inter
    ]


def _collect_inputs(path: Path) -> list[Path]:
    if path.is_dir():
        files = sorted(
            p for p in path.glob("*.png") if not any(p.name.endswith(sfx) for sfx in _SKIP_SUFFIXES)
        )
        if not files:
            raise FileNotFoundError(f"no input PNGs found in {path}")
        return files
    return [path]


def read_refs(path: str | Path) -> dict[str, int]:
    """Reference counts CSV with header ``image,count``."""
    refs: dict[str, int] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["image", "count"]:
            raise ValueError(f"reference CSV must start with header 'image,count', got {header}")
        for row in reader:
            if not row:
                continue
            refs[row[0].strip()] = int(row[1])
    return refs


def _read_classes(path: str | Path) -> dict[str, str]:
    classes: dict[str, str] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["image", "class"]:
            raise ValueError(f"class CSV must start with header 'image,class', got {header}")
        for row in reader:
            if not row:
                continue
            classes[row[0].strip()] = row[1].strip()
    return classes


def render_overlay(labels: LabelMap, seed: int = 0) -> np.ndarray:
    """Random-palette RGB coloring of instances (background black)."""
    n = int(labels.data.max())
    palette = np.zeros((n + 1, 3), dtype=np.uint8)
    rng = Lcg(seed)
    for lab in range(1, n + 1):
        palette[lab] = (
            60 + rng.next_u64() % 196,
            60 + rng.next_u64() % 196,
            60 + rng.next_u64() % 196,
        )
    return palette[labels.data]


def _check_refs_cover(stems: list[str], refs: dict[str, int]) -> None:
    missing = [s for s in stems if s not in refs]
    orphaned = [r for r in refs if r not in set(stems)]
    if missing or orphaned:
        raise ValueError(
            "reference CSV does not match inputs; "
            f"images without reference: {missing or 'none'}; references without image: {orphaned or 'none'}"
        )


def _write_manifest(out_dir: Path, payload: dict) -> None:
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _grid_entry_dict(entry: GridEntry) -> dict:
    return {
        "method": entry.params.method,
        "dist_kernel": entry.params.dist_kernel,
        "fg_thresh": entry.params.fg_thresh,
        "min_len": entry.params.min_len,
        "max_len": entry.params.max_len,
        "min_area": entry.min_area,
        "inter_collect": entry.inter_collect,
    }


def _load_config_or_fail(path: str) -> PipelineConfig | None:
    try:
        return load_config(path)
    except (OSError, KeyError, ValueError, TypeError) as exc:
        print(f"error: invalid config {path}: {exc}", file=sys.stderr)
        return None


def cmd_convert(args: argparse.Namespace) -> int:
    cfg = _load_config_or_fail(args.config)
    if cfg is None:
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        inputs = _collect_inputs(Path(args.input))
        refs = read_refs(args.refs) if args.refs else {}
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    params = cfg.mix_params[0]

    def process(path: Path) -> dict:
        start = time.perf_counter()
        mask = load_mask(path)
        target = refs.get(path.stem)
        labels = convert(mask, params, cfg, target_count=target)
        label_path = out_dir / f"{path.stem}_labels.png"
        save_labelmap(labels, label_path)
        entry = {
            "input": str(path),
            "labels": str(label_path),
            "count": labels.count,
            "time_ms": (time.perf_counter() - start) * 1000.0,
        }
        if args.overlay:
            overlay_path = out_dir / f"{path.stem}_overlay.png"
            Image.fromarray(render_overlay(labels, seed=args.seed), mode="RGB").save(overlay_path)
            entry["overlay"] = str(overlay_path)
        return entry

    results, code = _run_batch(process, inputs, args.jobs)
    if code != 0:
        return code
    _write_manifest(
        out_dir,
        {
            "command": "convert",
            "config": str(args.config),
            "out": str(out_dir),
            "inputs": [str(p) for p in inputs],
            "images": results,
        },
    )
    return 0


def _run_batch(process, inputs: list[Path], jobs: int):
    """Run per-image work, possibly in a pool; abort on the first failure."""
    results: list[dict] = []
    try:
        if jobs and jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(process, inputs))
        else:
            results = [process(p) for p in inputs]
    except Exception as exc:  # noqa: BLE001 - reported with the failing file
        print(f"error: {exc}", file=sys.stderr)
        return results, 1
    return results, 0


def cmd_tune(args: argparse.Namespace) -> int:
    cfg = _load_config_or_fail(args.config)
    if cfg is None:
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not args.refs:
        print("error: tune requires --refs with per-image reference counts", file=sys.stderr)
        return 1
    try:
        refs = read_refs(args.refs)
        inputs = _collect_inputs(Path(args.input))
        _check_refs_cover([p.stem for p in inputs], refs)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    grid = _config_grids(args.config, cfg)

    def process(path: Path) -> dict:
        start = time.perf_counter()
        mask = load_mask(path)
        result = grid_search(mask, refs[path.stem], grid, cfg, image_id=path.stem)
        chosen = result.chosen
        assert chosen is not None
        cfg_i = replace(cfg, mix_params=(chosen.params,), min_area=chosen.min_area, inter_collect=chosen.inter_collect)
        labels = convert(mask, chosen.params, cfg_i, target_count=result.reference_count)
        label_path = out_dir / f"{path.stem}_labels.png"
        save_labelmap(labels, label_path)
        return {
            "input": str(path),
            "labels": str(label_path),
            "chosen": _grid_entry_dict(chosen),
            "count": result.achieved_count,
            "reference": result.reference_count,
            "objective": result.objective,
            "candidates_evaluated": result.candidates_evaluated,
            "time_ms": (time.perf_counter() - start) * 1000.0,
        }

    results, code = _run_batch(process, inputs, args.jobs)
    if code != 0:
        return code
    with open(out_dir / "tune_results.json", "w", encoding="utf-8") as fh:
        json.dump({"images": results}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(
        out_dir,
        {
            "command": "tune",
            "config": str(args.config),
            "out": str(out_dir),
            "inputs": [str(p) for p in inputs],
            "images": results,
        },
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = _load_config_or_fail(args.config)
    if cfg is None:
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not args.refs:
        print("error: eval requires --refs with per-image reference counts", file=sys.stderr)
        return 1
    try:
        refs = read_refs(args.refs)
        inputs = _collect_inputs(Path(args.input))
        _check_refs_cover([p.stem for p in inputs], refs)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    classes = _read_classes(args.classes) if args.classes else {}
    methods = args.methods.split(",") if args.methods else list(METHODS)
    base = cfg.mix_params[0]

    def process(path: Path) -> dict:
        mask = load_mask(path)
        ref = refs[path.stem]
        counts = {}
        for method in methods:
            p = replace(base, method=method)
            target = ref if method == "dymorph" else None
            counts[method] = convert(mask, p, cfg, target_count=target).count
        return {"image": path.stem, "class": classes.get(path.stem, "all"), "reference": ref, "counts": counts}

    rows, code = _run_batch(process, inputs, args.jobs)
    if code != 0:
        return code

    series_by_method: dict[str, list[CountSeries]] = {}
    class_ids = sorted({r["class"] for r in rows})
    for method in methods:
        series_by_method[method] = [
            CountSeries(
                class_id=cid,
                samples=tuple(
                    (r["image"], r["counts"][method], r["reference"]) for r in rows if r["class"] == cid
                ),
            )
            for cid in class_ids
        ]
    try:
        report = evaluate_dataset(series_by_method)
    except MetricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for method in methods:
        with open(out_dir / f"pe_{method}.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["image", "class", "pe"])
            for r in rows:
                h = r["reference"]
                writer.writerow([r["image"], r["class"], (r["counts"][method] - h) / h])
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        with open(args.scenes, "r", encoding="utf-8") as fh:
            scene_list = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ref_rows: list[tuple[str, int, str]] = []
    try:
        for i, raw in enumerate(scene_list):
            scene_id = str(raw.get("id", f"scene_{i:04d}"))
            spec = SceneSpec(
                width=int(raw["width"]),
                height=int(raw["height"]),
                regime=str(raw["regime"]),
                n_objects=int(raw["n_objects"]),
                overlap=float(raw.get("overlap", 0.0)),
                seed=int(raw.get("seed", args.seed + i)),
            )
            mask, count, truth = generate(spec)
            Image.fromarray(mask.data.astype(np.uint8) * 255, mode="L").save(out_dir / f"{scene_id}_mask.png")
            save_labelmap(relabel(truth), out_dir / f"{scene_id}_truth.png")
            ref_rows.append((f"{scene_id}_mask", count, str(raw.get("class", raw["regime"]))))
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return 1
    with open(out_dir / "refs.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image", "count"])
        for scene_id, count, _ in ref_rows:
            writer.writerow([scene_id, count])
    with open(out_dir / "classes.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image", "class"])
        for scene_id, _, cls in ref_rows:
            writer.writerow([scene_id, cls])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mask2inst", description="Binary-to-instance mask conversion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_convert = sub.add_parser("convert", help="convert masks to instance label maps")
    p_convert.add_argument("--config", required=True)
    p_convert.add_argument("--input", required=True, help="mask PNG or directory of mask PNGs")
    p_convert.add_argument("--out", required=True)
    p_convert.add_argument("--refs", default=None, help="optional reference counts CSV (image,count)")
    p_convert.add_argument("--overlay", action="store_true", help="also write colored instance overlays")
    p_convert.add_argument("--jobs", type=int, default=1)
    p_convert.add_argument("--seed", type=int, default=0, help="overlay palette seed")
    p_convert.set_defaults(func=cmd_convert)

    p_tune = sub.add_parser("tune", help="per-image grid search against reference counts")
    p_tune.add_argument("--config", required=True)
    p_tune.add_argument("--input", required=True)
    p_tune.add_argument("--out", required=True)
    p_tune.add_argument("--refs", required=False, default=None)
    p_tune.add_argument("--jobs", type=int, default=1)
    p_tune.set_defaults(func=cmd_tune)

    p_eval = sub.add_parser("eval", help="count-accuracy report across methods")
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--input", required=True)
    p_eval.add_argument("--out", required=True)
    p_eval.add_argument("--refs", required=False, default=None)
    p_eval.add_argument("--classes", default=None, help="optional class CSV (image,class)")
    p_eval.add_argument("--methods", default=None, help="comma list, default all six")
    p_eval.add_argument("--jobs", type=int, default=1)
    p_eval.set_defaults(func=cmd_eval)

    p_synth = sub.add_parser("synth", help="generate synthetic scenes with ground truth")
    p_synth.add_argument("--scenes", required=True, help="JSON list of scene specs")
    p_synth.add_argument("--out", required=True)
    p_synth.add_argument("--seed", type=int, default=0, help="base seed for scenes without one")
    p_synth.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
