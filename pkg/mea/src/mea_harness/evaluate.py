"""Surrogate evaluation through the two resize paths.

Test 1 routes the original image through the victim's side first
(i_o -> i_v -> i_s), the flattering convention available when the
victim's size is known.  Test 2 resizes directly (i_o -> i_s), the
realistic measurement.  The two coincide exactly when i_s == i_v.
Accuracies are reported relative to the victim's (victim == 1x).
"""

from __future__ import annotations

import torch

from mea_harness.data import resize
from mea_harness.models import SmallCnn, accuracy
from mea_harness.relabel import ResizeChain


def surrogate_inputs(images: torch.Tensor, chain: ResizeChain, mode: str) -> torch.Tensor:
    if mode == "test1":
        return resize(resize(images, chain.i_v), chain.i_s)
    if mode == "test2":
        return resize(images, chain.i_s)
    raise ValueError(f"unknown mode {mode!r}")


def evaluate_relative(
    surrogate: SmallCnn,
    victim: SmallCnn,
    test_images: torch.Tensor,
    test_labels: torch.Tensor,
    chain: ResizeChain,
    mode: str,
) -> dict:
    """Surrogate accuracy on the mode's path, relative to the victim's."""
    victim_acc = accuracy(victim, resize(test_images, chain.i_v), test_labels)
    surrogate_acc = accuracy(surrogate, surrogate_inputs(test_images, chain, mode), test_labels)
    return {
        "mode": mode,
        "victim_acc": victim_acc,
        "surrogate_acc": surrogate_acc,
        "relative": surrogate_acc / victim_acc if victim_acc > 0 else 0.0,
    }
