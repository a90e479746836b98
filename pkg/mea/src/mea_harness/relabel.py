"""Re-labeling: the query path that creates label mismatch.

The adversary stores each query image at the surrogate's side I_S but the
victim answers for the image rendered at its own side I_V, so the training
pair is (image at I_S, victim confidence at I_V).  When I_S differs from
I_V the confidence no longer matches what the stored image shows -- the
label mismatch that degrades size-mismatched surrogates.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch

from mea_harness.data import resize
from mea_harness.models import SmallCnn, confidences


@dataclass(frozen=True)
class ResizeChain:
    """Original, surrogate and victim image sides."""

    i_o: int
    i_s: int
    i_v: int

    def __post_init__(self) -> None:
        if min(self.i_o, self.i_s, self.i_v) < 1:
            raise ValueError("image sides must be >= 1")


@dataclass
class RelabeledSet:
    images: torch.Tensor  # at i_s
    labels: torch.Tensor  # victim confidence vectors, rows sum to 1

    def __len__(self) -> int:
        return len(self.images)


def relabel(query_set: torch.Tensor, victim: SmallCnn, chain: ResizeChain) -> RelabeledSet:
    """Resize i_o -> i_s for storage, then i_s -> i_v for the victim query."""
    if query_set.shape[-1] != chain.i_o:
        raise ValueError(f"query set is side {query_set.shape[-1]}, chain says i_o={chain.i_o}")
    if victim.side != chain.i_v:
        raise ValueError(f"victim expects side {victim.side}, chain says i_v={chain.i_v}")
    if len(query_set) == 0:
        return RelabeledSet(images=resize(query_set, chain.i_s), labels=torch.empty((0, 0)))
    stored = resize(query_set, chain.i_s)
    labels = confidences(victim, resize(stored, chain.i_v))
    return RelabeledSet(images=stored, labels=labels)
