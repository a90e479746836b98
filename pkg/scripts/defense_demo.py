#!/usr/bin/env python3
"""Show how padding dummy rows/columns into the first layer's GEMM drags
the side-channel estimate away from the true input size.

Usage: python scripts/defense_demo.py [--id 128]
"""

import argparse

from gemmtap.dim_inverter import analyze
from gemmtap.gemm_model import BlockingConstants, ConvGeometry, conv_to_gemm
from gemmtap.synth import ObfuscationPlan, SynthExecutor, TimingModel, apply_obfuscation, synthesize

GEOMS = {32: ConvGeometry(3, 1, 1), 64: ConvGeometry(4, 1, 1),
         128: ConvGeometry(3, 2, 1), 224: ConvGeometry(7, 2, 3)}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--id", type=int, default=128, choices=sorted(GEOMS))
    args = ap.parse_args()

    geom = GEOMS[args.id]
    consts = BlockingConstants()
    dims = conv_to_gemm(geom, args.id)
    tm = TimingModel()

    print(f"victim input side {args.id}, true GEMM dims {dims}")
    print(f"{'dummy_rows':>10} {'dummy_cols':>10} {'m_est':>10} {'kernel_est':>10} "
          f"{'id_raw':>8} {'id_rounded':>10}")
    for rows, cols in [(0, 0), (200, 0), (500, 0), (1000, 0), (2000, 0),
                       (0, 21), (0, 48), (1000, 21)]:
        observed = apply_obfuscation(dims, ObfuscationPlan(dummy_rows=rows, dummy_cols=cols))
        samples = synthesize(observed, consts, tm, seed=1)
        rep = analyze(samples, geom=geom, consts=consts,
                      executor=SynthExecutor(tm=tm, consts=consts, seed=2))
        est = rep.estimate
        print(f"{rows:>10} {cols:>10} {est.m_est:>10.1f} {est.kernel_est:>10.2f} "
              f"{est.id_raw:>8.1f} {est.id_rounded:>10}")


if __name__ == "__main__":
    main()
