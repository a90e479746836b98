"""Inverse calculation: loop properties back to GEMM dims and input size.

The estimators undo the blocked schedule one loop at a time:

* m from L2: all iterations except the last two process a full P-chunk and
  the last two share the remainder, so m = ((N - 2) + 2 * ST/AT) * P.
* n from L3: the tail chunk is either a full 3*UNROLL or a bare UNROLL;
  a short time under half the average marks the small tail.
* k from L1: same halved-tail inversion as m, except that a single-chunk
  L1 (k <= Q, the common first-layer case) has no full-Q iteration to give
  an average, so AT_L1 is calibrated by running a known k = 4Q
  multiplication of the same estimated m and n on the same machine and
  timing its full-Q segments.

kernel = sqrt(k / in_channels), and the input side follows from inverting
the convolution's output-size formula with the analyst-known stride and
padding.  A stride above one floors away low bits of the input side, so
the recovered value is the canonical (largest) preimage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from gemmtap.gemm_model import BlockingConstants, ConvGeometry
from gemmtap.loop_profile import (
    LoopId,
    LoopProperties,
    PatternError,
    extract_properties,
    segment_start_indexes,
)
from gemmtap.noise_filter import FilterConfig, filter_dcg
from gemmtap.trace_io import DcgEvent, ProbeConfig, ProbeSample, create_dcg

Executor = Callable[[int, int, int], Sequence[ProbeSample]]


class BelowCalibrationRange(ValueError):
    """Too few full-block iterations to anchor the average time."""


class CalibrationError(RuntimeError):
    """The calibration run produced no usable L1 pattern."""


class AnalysisError(RuntimeError):
    """Pipeline failure, tagged with the stage that raised it."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass(frozen=True)
class IdEstimate:
    m_est: float
    n_est: Optional[int]
    k_est: float
    kernel_est: float
    id_raw: float
    id_rounded: int


def _round_nearest(x: float) -> int:
    return math.floor(x + 0.5)


def estimate_m(l2: LoopProperties, p: int) -> float:
    """Invert the L2 blocking; needs at least one full-P iteration."""
    if l2.n_iters < 3:
        raise BelowCalibrationRange(
            f"below calibration range: N_L2 = {l2.n_iters} < 3, no full-P iteration anchors AT"
        )
    if l2.avg_time is None:
        raise BelowCalibrationRange("below calibration range: AT_L2 missing")
    return ((l2.n_iters - 2) + 2.0 * (l2.short_time / l2.avg_time)) * p


def estimate_n(l3: LoopProperties, unroll: int) -> int:
    """Invert the L3 blocking; the short time picks the tail-chunk size."""
    at = l3.avg_time if l3.avg_time is not None else l3.short_time
    if l3.short_time < at / 2.0:
        return (l3.n_iters - 1) * 3 * unroll + unroll
    return l3.n_iters * 3 * unroll


def calibration_at_from_samples(
    samples: Sequence[ProbeSample],
    probe_cfg: ProbeConfig = ProbeConfig(),
    filter_cfg: FilterConfig = FilterConfig(),
) -> float:
    """AT_L1 from a calibration probe log: mean gap between L1 segment
    openings, excluding the last gap (the halved tail)."""
    events = filter_dcg(create_dcg(samples, probe_cfg), filter_cfg)
    starts = segment_start_indexes(events)
    if len(starts) < 3:
        raise CalibrationError(
            f"calibration failure: found {len(starts)} L1 pattern occurrences, need >= 3"
        )
    slots = [events[i].slot for i in starts]
    gaps = [b - a for a, b in zip(slots, slots[1:])]
    body = gaps[:-1]
    return sum(body) / len(body)


def estimate_l1_at(
    m_est: float,
    n_est: int,
    q: int,
    executor: Executor,
    probe_cfg: ProbeConfig = ProbeConfig(),
    filter_cfg: FilterConfig = FilterConfig(),
) -> float:
    """Calibrate the per-full-Q-chunk time by timing a known k = 4Q GEMM.

    Runs the executor at (round(m_est), 4Q, n_est), rebuilds the filtered
    DCG and times its full-Q L1 segments.
    """
    m_run = max(1, _round_nearest(m_est))
    samples = executor(m_run, 4 * q, max(1, n_est))
    return calibration_at_from_samples(samples, probe_cfg, filter_cfg)


def estimate_k(l1: LoopProperties, q: int, at_l1: Optional[float] = None) -> float:
    """Invert the L1 blocking, using a calibrated AT when only one chunk ran."""
    if l1.n_iters < 2:
        if at_l1 is None or at_l1 <= 0:
            raise CalibrationError("AT_L1 required when N_L1 < 2 but none was provided")
        return (l1.short_time / at_l1) * q
    at = at_l1 if at_l1 is not None else l1.avg_time
    if at is None:
        raise BelowCalibrationRange("AT_L1 missing for multi-chunk L1")
    return ((l1.n_iters - 2) + 2.0 * (l1.short_time / at)) * q


def estimate_id(
    m_est: float,
    k_est: float,
    geom: ConvGeometry,
    n_est: Optional[int] = None,
) -> IdEstimate:
    """Kernel size and input side from the recovered GEMM dimensions."""
    if m_est <= 0 or k_est <= 0:
        raise ValueError("m and k estimates must be positive")
    kernel_est = math.sqrt(k_est / geom.in_channels)
    id_raw = (math.sqrt(m_est) + (kernel_est - 1.0) - 2.0 * geom.padding) * geom.stride
    return IdEstimate(
        m_est=m_est,
        n_est=n_est,
        k_est=k_est,
        kernel_est=kernel_est,
        id_raw=id_raw,
        id_rounded=_round_nearest(id_raw),
    )


@dataclass
class AnalysisReport:
    config: dict
    loops: Mapping[LoopId, LoopProperties]
    estimate: IdEstimate
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        loops = {
            lid.value: {
                "N": props.n_iters,
                "ST": props.short_time,
                "AT": props.avg_time,
            }
            for lid, props in self.loops.items()
        }
        est = self.estimate
        return {
            "config": self.config,
            "loops": loops,
            "estimates": {
                "m": est.m_est,
                "n": est.n_est,
                "k": est.k_est,
                "kernel": est.kernel_est,
                "id_raw": est.id_raw,
                "id_rounded": est.id_rounded,
            },
            "warnings": list(self.warnings),
        }


def props_from_dict(doc: Mapping[str, Mapping[str, float]]) -> dict[LoopId, LoopProperties]:
    """Loop properties from the {L1,L2,L3: {N, ST, AT}} JSON layout."""
    out: dict[LoopId, LoopProperties] = {}
    for lid in LoopId:
        if lid.value not in doc:
            raise ValueError(f"loop properties missing {lid.value}")
        entry = doc[lid.value]
        at = entry.get("AT")
        out[lid] = LoopProperties(
            loop=lid,
            n_iters=int(entry["N"]),
            short_time=float(entry["ST"]),
            avg_time=None if at is None else float(at),
        )
    return out


def analyze(
    samples: Optional[Sequence[ProbeSample]] = None,
    *,
    events: Optional[Sequence[DcgEvent]] = None,
    props: Optional[Mapping[LoopId, LoopProperties]] = None,
    geom: ConvGeometry,
    consts: BlockingConstants = BlockingConstants(),
    probe_cfg: ProbeConfig = ProbeConfig(),
    filter_cfg: FilterConfig = FilterConfig(),
    at_l1: Optional[float] = None,
    executor: Optional[Executor] = None,
) -> AnalysisReport:
    """Full pipeline: DCG construction, filtering, extraction, inversion.

    Exactly one of samples / events / props supplies the observations.
    AT_L1 for a single-chunk L1 comes from, in order of precedence: the
    at_l1 argument, the supplied loop properties, or a calibration run
    through the executor.
    """
    supplied = [x is not None for x in (samples, events, props)]
    if sum(supplied) != 1:
        raise ValueError("provide exactly one of samples, events or props")

    warnings: list[str] = []
    if props is None:
        if samples is not None:
            events = create_dcg(samples, probe_cfg)
        assert events is not None
        try:
            filtered = filter_dcg(events, filter_cfg)
        except Exception as exc:  # defensive; filter has no declared errors
            raise AnalysisError("filter", str(exc)) from exc
        try:
            loops = extract_properties(filtered)
        except PatternError as exc:
            raise AnalysisError("extract", str(exc)) from exc
    else:
        loops = dict(props)

    l1, l2, l3 = loops[LoopId.L1], loops[LoopId.L2], loops[LoopId.L3]

    try:
        m_est = estimate_m(l2, consts.p)
        n_est = estimate_n(l3, consts.unroll)
    except BelowCalibrationRange as exc:
        raise AnalysisError("invert", str(exc)) from exc

    at_l1_source: Optional[str] = None
    if at_l1 is not None:
        at_l1_source = "flag"
    elif l1.n_iters >= 2 and l1.avg_time is not None:
        at_l1_source = "extracted"  # estimate_k reads l1.avg_time directly
    elif l1.avg_time is not None:
        at_l1 = l1.avg_time
        at_l1_source = "props"
    elif executor is not None:
        try:
            at_l1 = estimate_l1_at(m_est, n_est, consts.q, executor, probe_cfg, filter_cfg)
        except CalibrationError as exc:
            raise AnalysisError("calibrate", str(exc)) from exc
        at_l1_source = "executor"
    elif l1.n_iters < 2:
        raise AnalysisError(
            "calibrate",
            "N_L1 < 2 and no AT_L1 available: pass at_l1, loop properties with AT, "
            "or an executor for the 4Q calibration run",
        )

    try:
        k_est = estimate_k(l1, consts.q, at_l1)
        estimate = estimate_id(m_est, k_est, geom, n_est)
    except (BelowCalibrationRange, CalibrationError, ValueError) as exc:
        raise AnalysisError("invert", str(exc)) from exc

    if l2.n_iters == 3:
        warnings.append("only one full-P L2 iteration anchors AT_L2; m rests on a single gap")
    at3 = l3.avg_time if l3.avg_time is not None else l3.short_time
    ratio = l3.short_time / at3 if at3 else 1.0
    if 0.4 <= ratio <= 0.6:
        warnings.append(
            f"L3 short/average ratio {ratio:.2f} is near the 0.5 branch point; "
            "n may be off by one chunk"
        )
    if geom.stride > 1:
        warnings.append(
            f"stride {geom.stride} floors away input-size parity; "
            "id is the canonical (largest) preimage"
        )

    config = {
        "p": consts.p,
        "q": consts.q,
        "unroll": consts.unroll,
        "hit_threshold": probe_cfg.hit_threshold,
        "duplicate_window": filter_cfg.duplicate_window,
        "itcopy_interval_rule": filter_cfg.itcopy_interval_rule,
        "itcopy_interval_scale": filter_cfg.itcopy_interval_scale,
        "stride": geom.stride,
        "padding": geom.padding,
        "in_channels": geom.in_channels,
        "at_l1": at_l1,
        "at_l1_source": at_l1_source,
    }
    return AnalysisReport(config=config, loops=loops, estimate=estimate, warnings=warnings)
