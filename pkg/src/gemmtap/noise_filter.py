"""Duplicate and spurious-observation filtering for raw DCG event streams.

Two rules, applied in order:

1. Per function, drop any event observed less than duplicate_window slots
   after the previously retained event of the same function; two probes
   that close together are one call seen twice.
2. Over the itcopy events that survive rule 1, compute the mean interval
   between consecutive events and drop any itcopy whose gap to the
   previously retained itcopy falls below that mean scaled by
   itcopy_interval_scale.  With a scale of 1.0 a legitimate short final
   iteration (down to half a full chunk) would be deleted, so the cut sits
   at the half-mean by default.

Rule 2 assumes a roughly stationary itcopy cadence, which holds for
single-layer traces where one k-chunk sets the time scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gemmtap.gemm_model import ITCOPY
from gemmtap.trace_io import DcgEvent


@dataclass(frozen=True)
class FilterConfig:
    duplicate_window: int = 10
    itcopy_interval_rule: bool = True
    itcopy_interval_scale: float = 0.5

    def __post_init__(self) -> None:
        if self.duplicate_window < 1:
            raise ValueError("duplicate_window must be >= 1")
        if not 0.0 < self.itcopy_interval_scale <= 1.0:
            raise ValueError("itcopy_interval_scale must be in (0, 1]")


def _drop_close_repeats(events: Sequence[DcgEvent], window: int) -> list[DcgEvent]:
    last_kept: dict[str, int] = {}
    kept: list[DcgEvent] = []
    for ev in events:
        prev = last_kept.get(ev.func)
        if prev is not None and ev.slot - prev < window:
            continue
        last_kept[ev.func] = ev.slot
        kept.append(ev)
    return kept


def _drop_short_itcopy_gaps(events: Sequence[DcgEvent], scale: float) -> list[DcgEvent]:
    itcopy_slots = [ev.slot for ev in events if ev.func == ITCOPY]
    if len(itcopy_slots) < 2:
        return list(events)
    gaps = [b - a for a, b in zip(itcopy_slots, itcopy_slots[1:])]
    threshold = scale * (sum(gaps) / len(gaps))
    kept: list[DcgEvent] = []
    prev_itcopy: int | None = None
    for ev in events:
        if ev.func == ITCOPY:
            if prev_itcopy is not None and ev.slot - prev_itcopy < threshold:
                continue
            prev_itcopy = ev.slot
        kept.append(ev)
    return kept


def filter_dcg(events: Sequence[DcgEvent], cfg: FilterConfig = FilterConfig()) -> list[DcgEvent]:
    """Apply both noise rules; output is a subsequence of the input."""
    out = _drop_close_repeats(events, cfg.duplicate_window)
    if cfg.itcopy_interval_rule:
        out = _drop_short_itcopy_gaps(out, cfg.itcopy_interval_scale)
    return out
