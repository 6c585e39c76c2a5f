"""End-to-end run orchestration.

Stages, each a plain function over files so they can be driven from the CLI
or from tests without touching each other's internals:

  ingest_dataset   images/ + masks/ directories -> paired, decoded sources
  generate_run     sources -> occluded samples on disk + manifest.jsonl
  add_prompts      manifest -> manifest with point/box prompts per sample
  simulate_run     manifest -> synthetic predictor masks on disk
  evaluate_run     manifest + prediction dir -> per-sample score records
  aggregate_records  score records -> per-cell means and degradation
  emit_report      aggregate rows -> csv / jsonl / markdown
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import pngio
from .archetypes import predict
from .errors import DimensionMismatchError, EmptyDatasetError
from .generate import BINS, OCCLUSION_TYPES, generate_dataset
from .manifest import atomic_write_text, dumps, read_manifest, write_manifest
from .metrics import relative_degradation
from .prompts import KINDS as PROMPT_KINDS
from .prompts import Prompt, box_prompt, point_prompt
from .protocol import MODES, decompose, score_mode
from .seeds import subseed

IMAGE_EXTS = (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")

CSV_COLUMNS = (
    "dataset",
    "model",
    "prompt",
    "occlusion_type",
    "bin",
    "mode",
    "n",
    "mean_dsc",
    "mean_hd95",
    "delta_pct",
    "missing",
)


# ---------------------------------------------------------------- ingestion


def _scan(directory):
    out = {}
    for name in sorted(os.listdir(directory)):
        if name.startswith("."):
            continue
        stem, ext = os.path.splitext(name)
        if ext.lower() in IMAGE_EXTS:
            out[stem] = os.path.join(directory, name)
    return out


def ingest_dataset(root):
    """Pair images/ and masks/ by filename stem and decode them.

    Returns (sources, warnings) where sources is a sorted list of
    (stem, rgb_image, bool_mask). Unpaired files, undecodable files and
    empty masks are reported as warnings and skipped; they never abort
    the batch. An unusable directory or a pairing with zero survivors
    raises EmptyDatasetError.
    """
    images_dir = os.path.join(root, "images")
    masks_dir = os.path.join(root, "masks")
    if not os.path.isdir(images_dir) or not os.path.isdir(masks_dir):
        raise EmptyDatasetError(f"{root}: expected images/ and masks/ directories")

    images = _scan(images_dir)
    masks = _scan(masks_dir)

    warnings = []
    for stem in sorted(set(images) - set(masks)):
        warnings.append(f"image without mask: {images[stem]}")
    for stem in sorted(set(masks) - set(images)):
        warnings.append(f"mask without image: {masks[stem]}")

    sources = []
    for stem in sorted(set(images) & set(masks)):
        try:
            img = pngio.read_image(images[stem])
            msk = pngio.read_mask(masks[stem])
        except Exception as exc:  # decode failure: report, keep going
            warnings.append(f"unreadable pair {stem}: {exc}")
            continue
        if img.shape[:2] != msk.shape:
            warnings.append(f"size mismatch for {stem}, skipped")
            continue
        if not msk.any():
            warnings.append(f"empty ground-truth mask for {stem}, skipped")
            continue
        sources.append((stem, img, msk))

    if not sources:
        raise EmptyDatasetError(f"{root}: no usable image/mask pairs")
    return sources, warnings


# ---------------------------------------------------------------- grid


@dataclass(frozen=True)
class GridCell:
    dataset: str
    occlusion_type: str
    bin: str
    mode: str
    prompt: str
    model: str


def plan_grid(datasets, occlusion_types, bins, prompt_kinds, model_ids, modes=MODES):
    """Full factorial experiment grid, in deterministic nested order."""
    cells = []
    for ds in datasets:
        for occ in occlusion_types:
            for b in bins:
                for mode in modes:
                    for pk in prompt_kinds:
                        for m in model_ids:
                            cells.append(GridCell(ds, occ, b, mode, pk, m))
    return cells


# ---------------------------------------------------------------- generation


def _sample_files(sample_id):
    return {
        "image": f"samples/{sample_id}_image.png",
        "occluder": f"samples/{sample_id}_occ.png",
        "full": f"samples/{sample_id}_full.png",
        "visible": f"samples/{sample_id}_vis.png",
        "invisible": f"samples/{sample_id}_inv.png",
    }


def generate_run(
    dataset_dir,
    out_dir,
    dataset_id,
    seed,
    library=None,
    types=OCCLUSION_TYPES,
    bin_labels=("low", "medium", "high"),
    workers=0,
    clean=True,
):
    """Synthesize occlusions for a dataset and persist the run.

    Writes samples/<id>_{image,occ,full,vis,inv}.png, manifest.jsonl and
    generation_report.json under out_dir. Returns the manifest path.
    """
    sources, warnings = ingest_dataset(dataset_dir)
    samples, report = generate_dataset(
        sources,
        seed,
        library=library,
        types=types,
        bin_labels=bin_labels,
        workers=workers,
        clean=clean,
    )

    samples_dir = os.path.join(out_dir, "samples")
    os.makedirs(samples_dir, exist_ok=True)

    records = []
    for s in samples:
        sample_id = f"{s.source_id}__{s.occlusion_type}__{s.bin.label}"
        files = _sample_files(sample_id)
        targets = decompose(s.full, s.occluder)
        pngio.write_image(os.path.join(out_dir, files["image"]), s.image)
        pngio.write_mask(os.path.join(out_dir, files["occluder"]), s.occluder)
        pngio.write_mask(os.path.join(out_dir, files["full"]), targets.full)
        pngio.write_mask(os.path.join(out_dir, files["visible"]), targets.visible)
        pngio.write_mask(os.path.join(out_dir, files["invisible"]), targets.invisible)
        h, w = s.full.shape
        records.append(
            {
                "sample_id": sample_id,
                "source_id": s.source_id,
                "occlusion_type": s.occlusion_type,
                "bin": s.bin.label,
                "ratio": float(s.ratio),
                "out_of_bin": bool(s.out_of_bin),
                "attempts_used": int(s.attempts_used),
                "seed": int(s.seed),
                "width": int(w),
                "height": int(h),
                "files": files,
                "params": s.params,
            }
        )

    report = dict(report)
    report["ingest_warnings"] = warnings

    header = {
        "dataset": dataset_id,
        "seed": int(seed),
        "types": list(types),
        "bins": list(bin_labels) + (["clean"] if clean else []),
    }
    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    write_manifest(manifest_path, header, records)
    atomic_write_text(
        os.path.join(out_dir, "generation_report.json"),
        json.dumps(report, sort_keys=True, indent=2) + "\n",
    )
    return manifest_path


# ---------------------------------------------------------------- prompts


def prompt_to_record(p):
    if p.kind == "point":
        return {"kind": "point", "x": int(p.point.x), "y": int(p.point.y)}
    return {
        "kind": "box",
        "x_min": int(p.box.x_min),
        "y_min": int(p.box.y_min),
        "x_max": int(p.box.x_max),
        "y_max": int(p.box.y_max),
    }


def prompt_from_record(d):
    from .mask_utils import Box, Point

    if d["kind"] == "point":
        return Prompt(kind="point", point=Point(d["x"], d["y"]))
    if d["kind"] == "box":
        return Prompt(
            kind="box", box=Box(d["x_min"], d["y_min"], d["x_max"], d["y_max"])
        )
    raise ValueError(f"unknown prompt kind {d['kind']!r}")


def add_prompts(manifest_path, seed=None):
    """Derive point and box prompts from each sample's full target.

    Prompts depend only on the master seed and the sample id, so re-running
    rewrites the manifest byte-identically. A point landing under the
    occluder is legitimate (the prompt is derived from the pre-occlusion
    ground truth); the event is recorded per sample for audits.
    """
    base = os.path.dirname(os.path.abspath(manifest_path))
    header, records = read_manifest(manifest_path)
    master = header["seed"] if seed is None else seed

    for rec in records:
        full = pngio.read_mask(os.path.join(base, rec["files"]["full"]))
        occ = pngio.read_mask(os.path.join(base, rec["files"]["occluder"]))
        pt = point_prompt(full, subseed(master, "prompt", rec["sample_id"]))
        bx = box_prompt(full)
        rec["prompts"] = {
            "point": prompt_to_record(pt),
            "box": prompt_to_record(bx),
        }
        rec["point_in_occluder"] = bool(occ[pt.point.y, pt.point.x])

    write_manifest(manifest_path, header, records)
    return manifest_path


# ---------------------------------------------------------------- simulation


def prediction_name(sample_id, model_id, prompt_kind):
    return f"{sample_id}__{model_id}__{prompt_kind}.png"


def _simulate_one(task):
    (base, rec, kind, archetype, model_id, noise, master, out_dir) = task
    full = pngio.read_mask(os.path.join(base, rec["files"]["full"]))
    occ = pngio.read_mask(os.path.join(base, rec["files"]["occluder"]))
    prompt = prompt_from_record(rec["prompts"][kind])
    rng = np.random.default_rng(subseed(master, model_id, rec["sample_id"], kind))
    pred = predict(archetype, full, occ, prompt=prompt, noise=noise, rng=rng)
    name = prediction_name(rec["sample_id"], model_id, kind)
    pngio.write_mask(os.path.join(out_dir, name), pred)
    return name


def simulate_run(
    manifest_path,
    out_dir,
    archetype,
    model_id=None,
    noise=0,
    seed=None,
    workers=0,
    prompt_kinds=PROMPT_KINDS,
):
    """Render one synthetic predictor's masks for every sample and prompt."""
    base = os.path.dirname(os.path.abspath(manifest_path))
    header, records = read_manifest(manifest_path)
    master = header["seed"] if seed is None else seed
    model_id = archetype if model_id is None else model_id
    os.makedirs(out_dir, exist_ok=True)

    tasks = []
    for rec in records:
        if "prompts" not in rec:
            raise ValueError(f"{rec['sample_id']}: manifest has no prompts yet")
        for kind in prompt_kinds:
            tasks.append((base, rec, kind, archetype, model_id, noise, master, out_dir))

    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            names = list(pool.map(_simulate_one, tasks, chunksize=8))
    else:
        names = [_simulate_one(t) for t in tasks]
    return names


# ---------------------------------------------------------------- evaluation


def evaluate_run(manifest_path, preds_dir, model_id, out_path, prompt_kinds=PROMPT_KINDS):
    """Score every prediction against the decomposed targets.

    Emits a JSON-lines file of records: kind "eval" rows carry dsc/hd95 for
    one (sample, prompt, mode); kind "missing" rows mark an absent
    prediction file, one per mode that would have been scored; kind "error"
    rows mark unusable predictions. Unscorable modes (empty invisible
    region on clean samples) are simply not emitted.
    """
    base = os.path.dirname(os.path.abspath(manifest_path))
    header, records = read_manifest(manifest_path)
    dataset = header["dataset"]

    out = []
    n_eval = n_missing = 0
    for rec in records:
        full = pngio.read_mask(os.path.join(base, rec["files"]["full"]))
        occ = pngio.read_mask(os.path.join(base, rec["files"]["occluder"]))
        targets = decompose(full, occ)
        common = {
            "dataset": dataset,
            "model": model_id,
            "occlusion_type": rec["occlusion_type"],
            "bin": rec["bin"],
            "sample_id": rec["sample_id"],
            "ratio": rec["ratio"],
            "out_of_bin": rec["out_of_bin"],
        }
        for kind in prompt_kinds:
            pred_path = os.path.join(
                preds_dir, prediction_name(rec["sample_id"], model_id, kind)
            )
            if not os.path.isfile(pred_path):
                n_missing += 1
                for mode in MODES:
                    if score_mode_defined(targets, mode):
                        out.append({"kind": "missing", "prompt": kind, "mode": mode, **common})
                continue
            try:
                pred = pngio.read_mask(pred_path)
                if pred.shape != full.shape:
                    raise DimensionMismatchError(
                        f"{pred_path}: prediction {pred.shape} vs target {full.shape}"
                    )
            except Exception as exc:
                out.append(
                    {"kind": "error", "prompt": kind, "reason": str(exc), **common}
                )
                continue
            for mode in MODES:
                scored = score_mode(pred, targets, mode)
                if scored is None:
                    continue
                dsc, hd = scored
                n_eval += 1
                out.append(
                    {
                        "kind": "eval",
                        "prompt": kind,
                        "mode": mode,
                        "dsc": float(dsc),
                        "hd95": float(hd),
                        **common,
                    }
                )

    atomic_write_text(out_path, "".join(dumps(r) + "\n" for r in out))
    return n_eval, n_missing


def score_mode_defined(targets, mode):
    if mode == "invisible":
        return bool(targets.invisible.any())
    return True


# ---------------------------------------------------------------- aggregation


def _read_records(paths):
    records = []
    for path in paths:
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    records.append(json.loads(line))
    return records


def aggregate_records(paths):
    """Collapse score records into per-cell rows.

    Cell key: (dataset, model, prompt, occlusion_type, bin, mode). Samples
    flagged out_of_bin are excluded from the means. delta_pct compares a
    cell's mean DSC to the clean baseline of the same (dataset, model,
    prompt, mode); it is absent on clean rows and on rows with no usable
    baseline. Rows come out lexicographically sorted.
    """
    records = _read_records(paths)

    groups = {}
    missing = {}
    for r in records:
        key = (r["dataset"], r["model"], r["prompt"], r["occlusion_type"], r["bin"], r["mode"])
        if r["kind"] == "eval":
            if r.get("out_of_bin"):
                continue
            groups.setdefault(key, []).append((r["dsc"], r["hd95"]))
        elif r["kind"] == "missing":
            missing[key] = missing.get(key, 0) + 1

    baselines = {}
    for key, vals in groups.items():
        ds, model, prompt, occ, b, mode = key
        if b == "clean" and vals:
            mean_dsc = float(np.mean([v[0] for v in vals]))
            baselines[(ds, model, prompt, mode)] = mean_dsc

    rows = []
    for key in sorted(set(groups) | set(missing)):
        ds, model, prompt, occ, b, mode = key
        vals = groups.get(key, [])
        n = len(vals)
        if n:
            mean_dsc = float(np.mean([v[0] for v in vals]))
            mean_hd = float(np.mean([v[1] for v in vals]))
        else:
            mean_dsc = mean_hd = None
        delta = None
        if b != "clean" and n:
            base = baselines.get((ds, model, prompt, mode))
            if base is not None and base > 0:
                delta = relative_degradation(base, mean_dsc)
        rows.append(
            {
                "dataset": ds,
                "model": model,
                "prompt": prompt,
                "occlusion_type": occ,
                "bin": b,
                "mode": mode,
                "n": n,
                "mean_dsc": mean_dsc,
                "mean_hd95": mean_hd,
                "delta_pct": delta,
                "missing": missing.get(key, 0),
            }
        )
    return rows


def write_aggregate(rows, path):
    atomic_write_text(path, "".join(dumps(r) + "\n" for r in rows))
    return path


def read_aggregate(path):
    return _read_records([path])


# ---------------------------------------------------------------- reports


def _fmt(value, spec):
    return "" if value is None else format(value, spec)


def _round(value, digits):
    return None if value is None else round(value, digits)


def emit_report(rows, fmt, out_path):
    """Render aggregate rows as csv, jsonl or markdown. Byte-deterministic."""
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for r in rows:
            lines.append(
                ",".join(
                    [
                        r["dataset"],
                        r["model"],
                        r["prompt"],
                        r["occlusion_type"],
                        r["bin"],
                        r["mode"],
                        str(r["n"]),
                        _fmt(r["mean_dsc"], ".3f"),
                        _fmt(r["mean_hd95"], ".2f"),
                        _fmt(r["delta_pct"], ".1f"),
                        str(r["missing"]),
                    ]
                )
            )
        text = "\n".join(lines) + "\n"
    elif fmt == "jsonl":
        out = []
        for r in rows:
            r = dict(r)
            r["mean_dsc"] = _round(r["mean_dsc"], 3)
            r["mean_hd95"] = _round(r["mean_hd95"], 2)
            r["delta_pct"] = _round(r["delta_pct"], 1)
            out.append(dumps(r))
        text = "\n".join(out) + "\n" if out else ""
    elif fmt == "markdown":
        parts = []
        for ds in sorted({r["dataset"] for r in rows}):
            parts.append(f"## {ds}\n")
            parts.append(
                "| model | prompt | type | bin | mode | n | DSC | HD95 | drop% | missing |"
            )
            parts.append("|---|---|---|---|---|---|---|---|---|---|")
            for r in rows:
                if r["dataset"] != ds:
                    continue
                parts.append(
                    "| {model} | {prompt} | {occlusion_type} | {bin} | {mode} "
                    "| {n} | {dsc} | {hd} | {delta} | {missing} |".format(
                        model=r["model"],
                        prompt=r["prompt"],
                        occlusion_type=r["occlusion_type"],
                        bin=r["bin"],
                        mode=r["mode"],
                        n=r["n"],
                        dsc=_fmt(r["mean_dsc"], ".3f"),
                        hd=_fmt(r["mean_hd95"], ".2f"),
                        delta=_fmt(r["delta_pct"], ".1f"),
                        missing=r["missing"],
                    )
                )
            parts.append("")
        text = "\n".join(parts)
    else:
        raise ValueError(f"unknown report format {fmt!r}")

    atomic_write_text(out_path, text)
    return out_path
