"""Forward model of the blocked GEMM loop nest.

A first conv layer lowered to GEMM multiplies an (m x k) input matrix by a
(k x n) weight matrix, where m is the number of output spatial positions,
k = kernel^2 * in_channels and n = out_channels.  The library blocks the
three dimensions into loops:

* L2 walks m in chunks of P, except that the final two iterations each
  process (P + m mod P) / 2 rows;
* L1 walks k in chunks of Q with the same halved tail, or a single chunk
  when k fits in one block;
* L3 walks n in chunks of 3*UNROLL with a plain remainder tail.

Each L1 iteration emits one packing call for the first m-chunk (itcopy),
then one (oncopy, kernel) pair per L3 chunk, then one (itcopy, kernel)
pair per remaining m-chunk.  The inverse calculation in `dim_inverter`
undoes exactly this schedule, so this module is its ground-truth oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

ITCOPY = "itcopy"
ONCOPY = "oncopy"
KERNEL = "kernel"
MONITORED_FUNCS = (ITCOPY, ONCOPY, KERNEL)


class DegenerateConvolutionError(ValueError):
    """Geometry and input size yield no output positions."""


@dataclass(frozen=True)
class ConvGeometry:
    """First-layer convolution geometry known to the analyst (stride, padding)."""

    kernel: int
    stride: int
    padding: int
    in_channels: int = 3
    out_channels: int = 64

    def __post_init__(self) -> None:
        if self.kernel < 1:
            raise ValueError("kernel must be >= 1")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")
        if self.padding < 0:
            raise ValueError("padding must be >= 0")
        if self.in_channels < 1:
            raise ValueError("in_channels must be >= 1")
        if self.out_channels < 1:
            raise ValueError("out_channels must be >= 1")


@dataclass(frozen=True)
class GemmDims:
    """GEMM problem size: (m x k) times (k x n)."""

    m: int
    k: int
    n: int

    def __post_init__(self) -> None:
        if self.m < 1 or self.k < 1 or self.n < 1:
            raise ValueError("GEMM dimensions must all be >= 1")


@dataclass(frozen=True)
class BlockingConstants:
    """Library blocking parameters. The L3 chunk is 3 * unroll."""

    p: int = 320
    q: int = 320
    unroll: int = 4

    def __post_init__(self) -> None:
        if self.p < 1 or self.q < 1 or self.unroll < 1:
            raise ValueError("blocking constants must all be >= 1")

    @property
    def l3_chunk(self) -> int:
        return 3 * self.unroll


def conv_output_side(geom: ConvGeometry, input_side: int) -> int:
    """Spatial output side of the convolution for a square input."""
    if input_side < 1:
        raise ValueError("input side must be >= 1")
    span = input_side - geom.kernel + 2 * geom.padding
    if span < 0:
        raise DegenerateConvolutionError(
            f"degenerate convolution: side {input_side} with kernel {geom.kernel}, "
            f"padding {geom.padding}"
        )
    return span // geom.stride + 1


def conv_to_gemm(geom: ConvGeometry, input_side: int) -> GemmDims:
    """Map convolution geometry plus input side to the GEMM dimensions."""
    out = conv_output_side(geom, input_side)
    return GemmDims(m=out * out, k=geom.kernel * geom.kernel * geom.in_channels, n=geom.out_channels)


def _halved_tail_chunks(total: int, block: int) -> list[float]:
    """Blocked chunk sizes with the final two iterations sharing the tail.

    For total > 2*block the chunks are (total // block - 1) full blocks
    followed by two chunks of (block + total mod block) / 2, which may be
    half-integral.  Totals at or below two blocks split into two halves.
    """
    if total > 2 * block:
        fulls = total // block - 1
        half = (block + total % block) / 2
        return [float(block)] * fulls + [half, half]
    return [total / 2, total / 2]


def _remainder_chunks(total: int, block: int) -> list[int]:
    count = math.ceil(total / block)
    chunks = [block] * count
    chunks[-1] = total - (count - 1) * block
    return chunks


@dataclass(frozen=True)
class LoopSchedule:
    """Per-loop chunk sizes plus the probe-visible call sequence they imply."""

    l1_chunks: list[float] = field(default_factory=list)
    l2_chunks: list[float] = field(default_factory=list)
    l3_chunks: list[int] = field(default_factory=list)

    @property
    def n_l1(self) -> int:
        return len(self.l1_chunks)

    @property
    def n_l2(self) -> int:
        return len(self.l2_chunks)

    @property
    def n_l3(self) -> int:
        return len(self.l3_chunks)

    def segment_markers(self) -> list[str]:
        """Expected call sequence of one L1 iteration."""
        seq = [ITCOPY]
        for _ in self.l3_chunks:
            seq += [ONCOPY, KERNEL]
        for _ in self.l2_chunks[1:]:
            seq += [ITCOPY, KERNEL]
        return seq

    def marker_sequence(self) -> list[str]:
        """Expected call sequence of the whole GEMM."""
        return self.segment_markers() * self.n_l1


def schedule(dims: GemmDims, consts: BlockingConstants) -> LoopSchedule:
    """Chunk m, k and n the way the blocked library iterates them."""
    if dims.k <= consts.q:
        l1 = [float(dims.k)]
    else:
        l1 = _halved_tail_chunks(dims.k, consts.q)
    return LoopSchedule(
        l1_chunks=l1,
        l2_chunks=_halved_tail_chunks(dims.m, consts.p),
        l3_chunks=_remainder_chunks(dims.n, consts.l3_chunk),
    )
