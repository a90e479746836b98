"""CLI: run one extraction experiment, optionally steering the surrogate
size with an upstream cache-analysis report.

`--from-report report.json` reads the gemmtap analyze output and uses its
estimates.id_rounded as the surrogate input side.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from mea_harness.harness import run_experiment


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="mea")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train and evaluate one surrogate")
    run.add_argument("--victim-id", type=int, required=True, choices=[8, 16, 32])
    size = run.add_mutually_exclusive_group(required=True)
    size.add_argument("--surrogate-id", type=int, choices=[8, 16, 32])
    size.add_argument("--from-report", help="gemmtap analyze JSON; uses estimates.id_rounded")
    run.add_argument("--budget", type=int, default=256)
    run.add_argument("--strategy", choices=["random", "uncertainty"], default="random")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", help="write results JSON here (default stdout)")

    args = ap.parse_args(argv)

    surrogate_id = args.surrogate_id
    if args.from_report:
        report = json.loads(Path(args.from_report).read_text(encoding="utf-8"))
        surrogate_id = int(report["estimates"]["id_rounded"])
        if surrogate_id not in (8, 16, 32):
            # Snap to the nearest toy size; a real attack would build the
            # surrogate at the estimated size directly.
            surrogate_id = min((8, 16, 32), key=lambda s: abs(s - surrogate_id))

    results = run_experiment(
        victim_id=args.victim_id,
        surrogate_id=surrogate_id,
        budget=args.budget,
        strategy=args.strategy,
        seed=args.seed,
    )
    text = json.dumps(results, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
