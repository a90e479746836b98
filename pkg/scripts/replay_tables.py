#!/usr/bin/env python3
"""Replay the recorded loop properties of the four reference victims and
print the recovered dimensions next to the published reference values.

Usage: python scripts/replay_tables.py
"""

from gemmtap.dim_inverter import analyze, props_from_dict
from gemmtap.gemm_model import ConvGeometry

VICTIMS = [
    ("RN50_[32]", ConvGeometry(3, 1, 1),
     {"L1": {"N": 1, "AT": 1527, "ST": 163},
      "L2": {"N": 4, "AT": 49, "ST": 29},
      "L3": {"N": 6, "AT": 11.5, "ST": 10}},
     {"m": 1018.8, "n": 72, "k": 34.2, "kernel": 3.4, "id": 32.3}),
    ("RN50_[64]", ConvGeometry(4, 1, 1),
     {"L1": {"N": 1, "AT": 5774, "ST": 704},
      "L2": {"N": 13, "AT": 69.1, "ST": 50},
      "L3": {"N": 6, "AT": 18.3, "ST": 3.0}},
     {"m": 3983.1, "n": 64, "k": 39.0, "kernel": 3.6, "id": 63.7}),
    ("RN50_[128]", ConvGeometry(3, 2, 1),
     {"L1": {"N": 1, "AT": 5212, "ST": 582},
      "L2": {"N": 13, "AT": 44.9, "ST": 42},
      "L3": {"N": 6, "AT": 11.3, "ST": 9}},
     {"m": 4118.5, "n": 72, "k": 35.7, "kernel": 3.5, "id": 129.3}),
    ("RN50_[224]", ConvGeometry(7, 2, 3),
     {"L1": {"N": 1, "AT": 17665.5, "ST": 8163},
      "L2": {"N": 40, "AT": 208.3, "ST": 124},
      "L3": {"N": 6, "AT": 38.25, "ST": 13}},
     {"m": 12541, "n": 64, "k": 147.9, "kernel": 7.0, "id": 224.0}),
]


def main() -> None:
    header = f"{'victim':<12} {'quantity':<8} {'recovered':>12} {'reference':>10} {'|diff|':>8}"
    print(header)
    print("-" * len(header))
    for name, geom, loops, ref in VICTIMS:
        report = analyze(props=props_from_dict(loops), geom=geom)
        est = report.estimate
        got = {"m": est.m_est, "n": est.n_est, "k": est.k_est,
               "kernel": est.kernel_est, "id": est.id_raw}
        for key in ("m", "n", "k", "kernel", "id"):
            diff = abs(got[key] - ref[key])
            flag = "" if diff <= 0.1 else "  <-- recorded ST was rounded; see README"
            print(f"{name:<12} {key:<8} {got[key]:>12.4f} {ref[key]:>10} {diff:>8.4f}{flag}")
        print(f"{name:<12} {'rounded':<8} {est.id_rounded:>12}")
        print()


if __name__ == "__main__":
    main()
