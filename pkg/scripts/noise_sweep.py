#!/usr/bin/env python3
"""Sweep probe-noise levels and report how often the recovered input side
stays within one pixel of the truth.

Usage: python scripts/noise_sweep.py [--seeds 50] [--out sweep.json]
"""

import argparse
import json

from gemmtap.dim_inverter import AnalysisError, analyze
from gemmtap.gemm_model import BlockingConstants, ConvGeometry, conv_to_gemm
from gemmtap.synth import SynthExecutor, TimingModel, synthesize

VICTIMS = {
    32: ConvGeometry(3, 1, 1),
    64: ConvGeometry(4, 1, 1),
    128: ConvGeometry(3, 2, 1),
    224: ConvGeometry(7, 2, 3),
}

JITTERS = [0.0, 0.01, 0.02, 0.05, 0.1]
DUP_PROBS = [0.0, 0.3, 0.6]


def hit_rate(side: int, geom: ConvGeometry, tm: TimingModel, seeds: int) -> float:
    consts = BlockingConstants()
    dims = conv_to_gemm(geom, side)
    hits = 0
    for seed in range(seeds):
        samples = synthesize(dims, consts, tm, seed=seed)
        try:
            rep = analyze(samples, geom=geom, consts=consts,
                          executor=SynthExecutor(tm=tm, consts=consts, seed=seed + 10_000))
        except AnalysisError:
            continue
        hits += abs(rep.estimate.id_rounded - side) <= 1
    return hits / seeds


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--out")
    args = ap.parse_args()

    results = []
    print(f"{'id':>4} {'jitter':>7} {'dup':>5} {'hit_rate':>9}")
    for side, geom in VICTIMS.items():
        for jitter in JITTERS:
            for dup in DUP_PROBS:
                tm = TimingModel(jitter_sigma=jitter, duplicate_prob=dup)
                rate = hit_rate(side, geom, tm, args.seeds)
                results.append({"id": side, "jitter": jitter, "dup": dup, "hit_rate": rate})
                print(f"{side:>4} {jitter:>7.2f} {dup:>5.1f} {rate:>9.2f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
