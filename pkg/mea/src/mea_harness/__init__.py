"""Desk-scale model-extraction harness.

Measures whether knowing a victim classifier's input image size helps an
extraction attack: surrogates trained at the victim's size versus other
sizes, under random (KnockoffNets-style) or uncertainty (ActiveThief-style)
query selection, evaluated through the two resize paths that differ
exactly when the sizes differ.
"""

from mea_harness.relabel import RelabeledSet, ResizeChain, relabel
from mea_harness.strategies import select_random, select_uncertain
from mea_harness.evaluate import evaluate_relative

__all__ = [
    "RelabeledSet",
    "ResizeChain",
    "evaluate_relative",
    "relabel",
    "select_random",
    "select_uncertain",
]
