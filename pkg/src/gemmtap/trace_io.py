"""Probe-log format and raw dynamic call graph (DCG) construction.

A probe log is UTF-8 CSV with no header, one row per probe observation:

    slot,func,latency

slot is the probe-loop index (non-decreasing), func is one of
itcopy/oncopy/kernel, latency is the measured access delay in cycles.
The log records every probe, hits and misses alike, so the hit threshold
can be re-applied offline; the DCG is always derived, never stored.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence, Union

from gemmtap.gemm_model import MONITORED_FUNCS


class TraceParseError(ValueError):
    """Malformed probe log; the message names the offending row."""


@dataclass(frozen=True)
class ProbeSample:
    slot: int
    func: str
    latency: int


@dataclass(frozen=True)
class ProbeConfig:
    """Latency strictly below hit_threshold counts as a cache hit."""

    hit_threshold: int = 100

    def __post_init__(self) -> None:
        if self.hit_threshold <= 0:
            raise ValueError("hit_threshold must be > 0")


@dataclass(frozen=True)
class DcgEvent:
    slot: int
    func: str
    latency: int


Source = Union[bytes, BinaryIO, str, Path]


def _as_text(source: Source) -> str:
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes().decode("utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def read_probe_log(source: Source) -> list[ProbeSample]:
    """Parse a probe log, rejecting malformed rows by row number."""
    text = _as_text(source)
    samples: list[ProbeSample] = []
    prev_slot = -1
    for row_no, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue  # blank line (normally only the trailing one)
        parts = line.split(",")
        if len(parts) != 3:
            raise TraceParseError(f"malformed row at row {row_no}: {line!r}")
        slot_s, func, latency_s = parts
        try:
            slot = int(slot_s)
            latency = int(latency_s)
        except ValueError:
            raise TraceParseError(f"non-integer field at row {row_no}: {line!r}") from None
        if func not in MONITORED_FUNCS:
            raise TraceParseError(f"unknown function name at row {row_no}: {func!r}")
        if slot < 0 or latency < 0:
            raise TraceParseError(f"negative field at row {row_no}: {line!r}")
        if slot < prev_slot:
            raise TraceParseError(f"non-monotone slot at row {row_no}")
        prev_slot = slot
        samples.append(ProbeSample(slot=slot, func=func, latency=latency))
    return samples


def write_probe_log(samples: Iterable[ProbeSample], dest: Union[BinaryIO, str, Path]) -> None:
    """Write samples in the interchange CSV format (LF line endings)."""
    buf = io.StringIO()
    for s in samples:
        buf.write(f"{s.slot},{s.func},{s.latency}\n")
    data = buf.getvalue().encode("utf-8")
    if isinstance(dest, (str, Path)):
        Path(dest).write_bytes(data)
    else:
        dest.write(data)


def create_dcg(samples: Sequence[ProbeSample], cfg: ProbeConfig = ProbeConfig()) -> list[DcgEvent]:
    """Keep exactly the samples whose latency marks a cache hit, in order."""
    return [
        DcgEvent(slot=s.slot, func=s.func, latency=s.latency)
        for s in samples
        if s.latency < cfg.hit_threshold
    ]
