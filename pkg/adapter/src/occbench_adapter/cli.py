"""Console entry points: batch prediction and output validation."""

from __future__ import annotations

import argparse
import sys

from .backends import BackendLoadError
from .runner import PROMPT_KINDS, AdapterJob, run_adapter
from .validate import validate_output


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="occbench-adapter",
        description="Run a promptable segmentation backend over a benchmark manifest.",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--model", required=True, help="checkpoint id, or 'mock'")
    parser.add_argument("--prompt", required=True, choices=PROMPT_KINDS)
    parser.add_argument("--out", required=True)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--batch-size", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        job = AdapterJob(
            manifest=args.manifest,
            model=args.model,
            prompt=args.prompt,
            out=args.out,
            device=args.device,
            batch_size=args.batch_size,
        )
        summary = run_adapter(job)
    except (BackendLoadError, ValueError, OSError) as exc:
        print(f"occbench-adapter: {exc}", file=sys.stderr)
        return 2
    print(
        f"{summary['predicted']} predictions -> {args.out} "
        f"({summary['failed']} failed, log: {summary['log']})"
    )
    return 0


def validate_main(argv=None):
    parser = argparse.ArgumentParser(
        prog="occbench-adapter-validate",
        description="Check a prediction directory against its manifest.",
    )
    parser.add_argument("--manifest", required=True)
    parser.add_argument("--preds", required=True)
    parser.add_argument("--model", required=True)
    parser.add_argument("--prompt", required=True, choices=PROMPT_KINDS)
    args = parser.parse_args(argv)

    try:
        violations = validate_output(args.preds, args.manifest, args.model, args.prompt)
    except (ValueError, OSError) as exc:
        print(f"occbench-adapter-validate: {exc}", file=sys.stderr)
        return 2
    for v in violations:
        print(v)
    if violations:
        print(f"{len(violations)} violation(s)", file=sys.stderr)
        return 1
    print("ok")
    return 0


if __name__ == "__main__":
    sys.exit(main())
