"""Command line front end.

Option resolution order, per option: explicit flag, then the --config YAML
file, then the OCCBENCH_SEED environment variable (seed only), then the
built-in default. The config file is flat: top-level keys named like the
long flags (seed, workers, out, ...).
"""

from __future__ import annotations

import argparse
import os
import sys

import yaml

from . import harness, synthetic
from .errors import OccbenchError
from .generate import OCCLUSION_BIN_LABELS, OCCLUSION_TYPES, load_tool_library

DEFAULT_SEED = 0


def _load_config(path):
    if path is None:
        return {}
    with open(path, encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise OccbenchError(f"{path}: config must be a mapping")
    return data


def _resolve(flag_value, config, key, default=None, env=None, cast=None):
    if flag_value is not None:
        return flag_value
    if key in config:
        value = config[key]
    elif env is not None and os.environ.get(env) not in (None, ""):
        value = os.environ[env]
    else:
        return default
    return cast(value) if cast is not None else value


def _resolve_seed(args, config):
    return _resolve(args.seed, config, "seed", DEFAULT_SEED, env="OCCBENCH_SEED", cast=int)


def _csv_list(text):
    return tuple(part for part in text.split(",") if part)


# ---------------------------------------------------------------- commands


def _cmd_synth(args, config):
    out = _resolve(args.out, config, "out")
    seed = _resolve_seed(args, config)
    synthetic.make_dataset(out, n_images=args.images, size=args.size, seed=seed)
    synthetic.make_tool_library(
        os.path.join(out, "tools"), n_tools=args.tools, size=args.size, seed=seed
    )
    print(f"synthetic dataset with {args.images} images and {args.tools} tools at {out}")
    return 0


def _cmd_generate(args, config):
    dataset = _resolve(args.dataset, config, "dataset")
    out = _resolve(args.out, config, "out")
    seed = _resolve_seed(args, config)
    workers = _resolve(args.workers, config, "workers", 0, cast=int)
    types = _csv_list(_resolve(args.types, config, "types", ",".join(OCCLUSION_TYPES)))
    bins = _csv_list(_resolve(args.bins, config, "bins", ",".join(OCCLUSION_BIN_LABELS)))
    dataset_id = _resolve(args.dataset_id, config, "dataset_id") or os.path.basename(
        os.path.normpath(dataset)
    )
    tools_dir = _resolve(args.tools, config, "tools")
    if "tool" in types and tools_dir is None:
        raise OccbenchError("tool occlusions need --tools <dir>")
    library = load_tool_library(tools_dir) if "tool" in types else None

    manifest = harness.generate_run(
        dataset,
        out,
        dataset_id,
        seed,
        library=library,
        types=types,
        bin_labels=bins,
        workers=workers,
        clean=not args.no_clean,
    )
    print(f"manifest: {manifest}")
    return 0


def _cmd_prompts(args, config):
    seed = args.seed if args.seed is not None else config.get("seed")
    path = harness.add_prompts(args.manifest, seed=seed)
    print(f"prompts added: {path}")
    return 0


def _cmd_simulate(args, config):
    seed = args.seed if args.seed is not None else config.get("seed")
    workers = _resolve(args.workers, config, "workers", 0, cast=int)
    names = harness.simulate_run(
        args.manifest,
        args.out,
        args.archetype,
        model_id=args.model,
        noise=args.noise,
        seed=seed,
        workers=workers,
    )
    print(f"wrote {len(names)} predictions to {args.out}")
    return 0


def _cmd_evaluate(args, config):
    out = args.out
    if out is None:
        out = os.path.join(
            os.path.dirname(os.path.abspath(args.manifest)), f"eval__{args.model}.jsonl"
        )
    n_eval, n_missing = harness.evaluate_run(args.manifest, args.preds, args.model, out)
    print(f"{n_eval} scored, {n_missing} missing -> {out}")
    return 0


def _cmd_aggregate(args, config):
    rows = harness.aggregate_records(args.records)
    harness.write_aggregate(rows, args.out)
    print(f"{len(rows)} cells -> {args.out}")
    return 0


def _cmd_report(args, config):
    rows = harness.read_aggregate(args.aggregate)
    harness.emit_report(rows, args.format, args.out)
    print(f"report ({args.format}) -> {args.out}")
    return 0


# ---------------------------------------------------------------- parser


def build_parser():
    parser = argparse.ArgumentParser(
        prog="occbench",
        description="Occlusion-robustness benchmark over segmentation datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="YAML config file")
        p.set_defaults(func=func)
        return p

    p = add("synth", _cmd_synth, "write a small self-contained demo dataset")
    p.add_argument("--out", default=None)
    p.add_argument("--images", type=int, default=64)
    p.add_argument("--tools", type=int, default=8)
    p.add_argument("--size", type=int, default=96)
    p.add_argument("--seed", type=int, default=None)

    p = add("generate", _cmd_generate, "synthesize occluded samples and a manifest")
    p.add_argument("--dataset", default=None, help="directory with images/ and masks/")
    p.add_argument("--tools", default=None, help="tool crop library directory")
    p.add_argument("--out", default=None)
    p.add_argument("--dataset-id", dest="dataset_id", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--types", default=None, help="comma list, e.g. tool,cutout")
    p.add_argument("--bins", default=None, help="comma list, e.g. low,medium,high")
    p.add_argument("--no-clean", action="store_true", help="skip clean baselines")

    p = add("prompts", _cmd_prompts, "derive point/box prompts into the manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--seed", type=int, default=None)

    p = add("simulate", _cmd_simulate, "render synthetic predictor masks")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--archetype", required=True)
    p.add_argument("--model", default=None, help="model id for filenames")
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = add("evaluate", _cmd_evaluate, "score prediction masks against targets")
    p.add_argument("--manifest", required=True)
    p.add_argument("--preds", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default=None)

    p = add("aggregate", _cmd_aggregate, "collapse score records into cell means")
    p.add_argument("--records", nargs="+", required=True)
    p.add_argument("--out", required=True)

    p = add("report", _cmd_report, "render an aggregate as csv/jsonl/markdown")
    p.add_argument("--aggregate", required=True)
    p.add_argument("--format", required=True, choices=("csv", "jsonl", "markdown"))
    p.add_argument("--out", required=True)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        return args.func(args, config)
    except OccbenchError as exc:
        print(f"occbench: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
