"""Deterministic synthetic probe-trace generator: the forward oracle.

The generator lays the scheduled loop nest onto a slot timeline.  Each L2
iteration over an m-chunk of `mc` rows under a k-chunk of `kc` columns
spans round(unit * mc * kc) slots, so every within-segment gap is
proportional to its chunk and a whole L1 segment is proportional to its
k-chunk -- the two facts the inverse calculation consumes.  The L3 loop
subdivides the first L2 iteration in proportion to the n-chunks, since the
first m-chunk's compute is interleaved with the packing of every n-panel.
Markers that close an iteration (kernel) land on the iteration's end
boundary and markers that open one (itcopy, oncopy) land on its start, so
the observed call order reproduces the schedule's marker sequence exactly
and the last event of a segment sits on the segment's end slot.

Every slot that carries a hit also carries miss rows for the other two
monitored functions, making the log look like a real three-address probe
and keeping hit-threshold sensitivity testable.  Identical inputs and seed
produce bit-identical output.

Noise knobs: jitter_sigma scales each iteration duration by a Gaussian
factor (relative sigma); duplicate_prob re-observes a call within the
filter's duplicate window; drop_prob loses calls outright (the downstream
filter cannot repair drops, so they default off); spurious_rate injects
stray hits per 1,000 slots.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Union

import numpy as np

from gemmtap.gemm_model import (
    ITCOPY,
    KERNEL,
    MONITORED_FUNCS,
    ONCOPY,
    BlockingConstants,
    ConvGeometry,
    GemmDims,
    schedule,
)
from gemmtap.trace_io import ProbeSample

_SLOT_FUNC_ORDER = (KERNEL, ITCOPY, ONCOPY)  # closers before openers on shared slots


@dataclass(frozen=True)
class TimingModel:
    """Slot-timeline parameters.

    unit is the number of probe slots per unit of GEMM work (one m-row
    element times one k-column element).  Multiples of 4 keep every
    scheduled duration integral even with half-sized tail chunks; keep it
    large enough that the shortest L3 iteration spans several slots.
    jitter_sigma is the relative standard deviation of each iteration's
    duration.
    """

    unit: float = 4.0
    jitter_sigma: float = 0.0
    duplicate_prob: float = 0.0
    drop_prob: float = 0.0
    spurious_rate: float = 0.0
    duplicate_offset_max: int = 9

    def __post_init__(self) -> None:
        if self.unit <= 0:
            raise ValueError("unit must be > 0")
        if self.jitter_sigma < 0:
            raise ValueError("jitter_sigma must be >= 0")
        for name in ("duplicate_prob", "drop_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.spurious_rate < 0:
            raise ValueError("spurious_rate must be >= 0")
        if self.duplicate_offset_max < 1:
            raise ValueError("duplicate_offset_max must be >= 1")


@dataclass(frozen=True)
class ObfuscationPlan:
    """Dummy rows/columns a defender pads into the first layer's GEMM."""

    dummy_rows: int = 0
    dummy_cols: int = 0

    def __post_init__(self) -> None:
        if self.dummy_rows < 0 or self.dummy_cols < 0:
            raise ValueError("dummy rows/cols must be >= 0")


def apply_obfuscation(dims: GemmDims, plan: ObfuscationPlan) -> GemmDims:
    """Dimensions the probe actually observes when the victim pads its GEMM."""
    return GemmDims(m=dims.m + plan.dummy_rows, k=dims.k + plan.dummy_cols, n=dims.n)


def _duration(rng: np.random.Generator, tm: TimingModel, nominal: float) -> int:
    if tm.jitter_sigma > 0:
        nominal = nominal * (1.0 + rng.normal(0.0, tm.jitter_sigma))
    return max(1, round(nominal))


def synthesize(
    dims: GemmDims,
    consts: BlockingConstants = BlockingConstants(),
    tm: TimingModel = TimingModel(),
    seed: int = 0,
) -> list[ProbeSample]:
    """Generate the probe log a monitored GEMM of these dimensions would leave."""
    sched = schedule(dims, consts)
    rng = np.random.default_rng(seed)

    markers: list[tuple[int, str]] = []
    t = 0
    for kc in sched.l1_chunks:
        markers.append((t, ITCOPY))
        d0 = _duration(rng, tm, tm.unit * sched.l2_chunks[0] * kc)
        cum = 0
        for nc in sched.l3_chunks:
            markers.append((t + (d0 * cum) // dims.n, ONCOPY))
            cum += nc
            markers.append((t + (d0 * cum) // dims.n, KERNEL))
        t += d0
        for mc in sched.l2_chunks[1:]:
            markers.append((t, ITCOPY))
            d = _duration(rng, tm, tm.unit * mc * kc)
            markers.append((t + d, KERNEL))
            t += d
    span = t

    if tm.drop_prob > 0:
        markers = [mk for mk in markers if rng.random() >= tm.drop_prob]
    hits = list(markers)
    if tm.duplicate_prob > 0:
        for slot, func in markers:
            if rng.random() < tm.duplicate_prob:
                offset = int(rng.integers(1, tm.duplicate_offset_max + 1))
                hits.append((slot + offset, func))
    if tm.spurious_rate > 0:
        count = int(rng.poisson(tm.spurious_rate * span / 1000.0))
        for _ in range(count):
            slot = int(rng.integers(0, span + 1))
            func = MONITORED_FUNCS[int(rng.integers(0, 3))]
            hits.append((slot, func))

    by_slot: dict[int, set[str]] = {}
    for slot, func in hits:
        by_slot.setdefault(slot, set()).add(func)

    samples: list[ProbeSample] = []
    for slot in sorted(by_slot):
        present = by_slot[slot]
        for func in _SLOT_FUNC_ORDER:
            if func in present:
                latency = int(rng.integers(25, 60))
            else:
                latency = int(rng.integers(180, 320))
            samples.append(ProbeSample(slot=slot, func=func, latency=latency))
    return samples


@dataclass(frozen=True)
class SynthExecutor:
    """Runs a synthetic GEMM of requested dimensions under a fixed timing model.

    Stands in for launching the library on the victim's machine when the
    L1 average time must be calibrated with a known k = 4Q multiplication.
    """

    tm: TimingModel = TimingModel()
    consts: BlockingConstants = BlockingConstants()
    seed: int = 0

    def __call__(self, m: int, k: int, n: int) -> list[ProbeSample]:
        mixed = (self.seed * 1000003) ^ (m * 8191) ^ (k * 131) ^ n
        return synthesize(GemmDims(m=m, k=k, n=n), self.consts, self.tm, seed=mixed)


def ground_truth_sidecar(
    dims: GemmDims,
    geom: ConvGeometry,
    input_side: int,
    seed: int,
    tm: TimingModel,
    consts: BlockingConstants,
    obfuscation: ObfuscationPlan | None = None,
) -> dict:
    """Ground-truth record written next to a synthetic trace for harnesses."""
    doc = {
        "dims": {"m": dims.m, "k": dims.k, "n": dims.n},
        "geometry": asdict(geom),
        "id": input_side,
        "seed": seed,
        "timing_model": asdict(tm),
        "constants": asdict(consts),
    }
    if obfuscation is not None and (obfuscation.dummy_rows or obfuscation.dummy_cols):
        doc["obfuscation"] = asdict(obfuscation)
    return doc


def load_sidecar(path: Union[str, Path]) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def executor_from_sidecar(doc: dict) -> SynthExecutor:
    """Rebuild the machine's timing model from a sidecar to drive calibration."""
    tm = TimingModel(**doc["timing_model"])
    consts = BlockingConstants(**doc.get("constants", {}))
    # Calibration runs on the same machine as the victim but is a separate
    # execution; derive a distinct seed so its noise is independent.
    return SynthExecutor(tm=tm, consts=consts, seed=int(doc.get("seed", 0)) + 0x5CA1)


def sidecar_path(trace_path: Union[str, Path]) -> Path:
    return Path(trace_path).with_suffix(".json")
