"""Segment a filtered DCG into the three blocked loops and time them.

An L1 segment runs from an opening itcopy (the one packing the first
m-chunk, recognisable because the next observed call is an oncopy) to the
next opening itcopy or the end of the trace.  Within the first segment:

* N_L2 = itcopy count, N_L3 = oncopy count, N_L1 = number of segments;
* iteration durations are inter-marker gaps (itcopy-to-itcopy for L2,
  oncopy-to-oncopy for L3), and the final iteration's duration runs from
  its marker to the loop's terminator -- the next segment start, the first
  trailing itcopy (for L3), or the trace's last observed slot;
* ST is the final iteration's duration.  AT averages full-chunk
  iterations only: L3 has a single remainder tail so it drops just the
  final duration, while L2 and L1 split their tail over the final two
  iterations, so both are dropped.  Averaging in the penultimate
  half-chunk would bias every inverse estimate upward by ~2h(p-h)/p per
  resolved block, which the exactness checks reject.

kernel events are never timed; their intervals are subsumed by the
marker intervals on either side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

from gemmtap.gemm_model import ITCOPY, ONCOPY
from gemmtap.trace_io import DcgEvent


class PatternError(ValueError):
    """The event stream does not contain the blocked-GEMM call pattern."""


class LoopId(str, enum.Enum):
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"


@dataclass(frozen=True)
class LoopProperties:
    loop: LoopId
    n_iters: int
    short_time: float
    avg_time: Optional[float]

    def __post_init__(self) -> None:
        if self.n_iters < 1:
            raise ValueError("n_iters must be >= 1")
        if self.short_time <= 0:
            raise ValueError("short_time must be > 0")
        if self.avg_time is not None and self.avg_time <= 0:
            raise ValueError("avg_time must be > 0 when present")


def segment_start_indexes(events: Sequence[DcgEvent]) -> list[int]:
    """Indexes of opening itcopies: an itcopy whose next event is an oncopy."""
    return [
        i
        for i in range(len(events) - 1)
        if events[i].func == ITCOPY and events[i + 1].func == ONCOPY
    ]


def _durations(marker_slots: list[int], terminator: int) -> list[float]:
    gaps = [float(b - a) for a, b in zip(marker_slots, marker_slots[1:])]
    if any(g <= 0 for g in gaps):
        raise PatternError("insufficient markers: non-positive inter-marker gap")
    final = float(terminator - marker_slots[-1])
    if final <= 0:
        final = 1.0  # trace ends on the marker itself; clamp to probe resolution
    gaps.append(final)
    return gaps


def _halved_tail_stats(durations: list[float]) -> tuple[float, Optional[float]]:
    """ST/AT for a loop whose tail is split over the final two iterations."""
    st = durations[-1]
    if len(durations) >= 3:
        body = durations[:-2]
    elif len(durations) == 2:
        body = durations[:-1]
    else:
        return st, None
    return st, sum(body) / len(body)


def extract_properties(events: Sequence[DcgEvent]) -> dict[LoopId, LoopProperties]:
    """Loop iteration counts and timing from a filtered, slot-ordered DCG."""
    if not any(ev.func == ITCOPY for ev in events):
        raise PatternError("pattern not found: no itcopy events")
    if not any(ev.func == ONCOPY for ev in events):
        raise PatternError("pattern not found: no oncopy events")
    starts = segment_start_indexes(events)
    if not starts:
        raise PatternError("pattern not found: no itcopy-oncopy segment opening")

    end_sentinel = events[-1].slot
    seg_end_idx = starts[1] if len(starts) > 1 else len(events)
    segment = events[starts[0]:seg_end_idx]
    seg_terminator = events[starts[1]].slot if len(starts) > 1 else end_sentinel

    itcopy_slots = [ev.slot for ev in segment if ev.func == ITCOPY]
    oncopy_slots = [ev.slot for ev in segment if ev.func == ONCOPY]

    l2_durs = _durations(itcopy_slots, seg_terminator)
    st_l2, at_l2 = _halved_tail_stats(l2_durs)
    if at_l2 is None:
        at_l2 = st_l2

    # The L3 loop ends where the trailing (itcopy, kernel) block begins.
    last_onc_idx = max(i for i, ev in enumerate(segment) if ev.func == ONCOPY)
    trailing_its = [ev.slot for ev in segment[last_onc_idx + 1:] if ev.func == ITCOPY]
    l3_terminator = trailing_its[0] if trailing_its else seg_terminator
    l3_durs = _durations(oncopy_slots, l3_terminator)
    st_l3 = l3_durs[-1]
    at_l3 = sum(l3_durs[:-1]) / (len(l3_durs) - 1) if len(l3_durs) > 1 else st_l3

    start_slots = [events[i].slot for i in starts]
    l1_durs = _durations(start_slots, end_sentinel)
    if len(starts) == 1:
        st_l1, at_l1 = l1_durs[0], None  # span; AT must come from calibration
    else:
        st_l1, at_l1 = _halved_tail_stats(l1_durs)

    return {
        LoopId.L1: LoopProperties(LoopId.L1, len(starts), st_l1, at_l1),
        LoopId.L2: LoopProperties(LoopId.L2, len(itcopy_slots), st_l2, at_l2),
        LoopId.L3: LoopProperties(LoopId.L3, len(oncopy_slots), st_l3, at_l3),
    }
