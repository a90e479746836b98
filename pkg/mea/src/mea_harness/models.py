"""Small CNNs sized for input sides 8/16/32, plus deterministic training.

The reported accuracy of a trained model follows the convention of keeping
the best checkpoint among evaluations run every five epochs.
"""

from __future__ import annotations

import copy
from typing import Callable, Optional

import torch
from torch import nn


class SmallCnn(nn.Module):
    def __init__(self, side: int, num_classes: int = 10):
        super().__init__()
        self.side = side
        self.features = nn.Sequential(
            nn.Conv2d(1, 16, 3, padding=1),
            nn.ReLU(),
            nn.MaxPool2d(2),
            nn.Conv2d(16, 32, 3, padding=1),
            nn.ReLU(),
            nn.AdaptiveAvgPool2d(2),
        )
        self.head = nn.Linear(32 * 4, num_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[-1] != self.side:
            raise ValueError(f"model expects side {self.side}, got {x.shape[-1]}")
        h = self.features(x)
        return self.head(h.flatten(1))


def make_model(side: int, seed: int, num_classes: int = 10) -> SmallCnn:
    torch.manual_seed(seed)
    return SmallCnn(side, num_classes)


def soft_cross_entropy(logits: torch.Tensor, target_probs: torch.Tensor) -> torch.Tensor:
    return -(target_probs * torch.log_softmax(logits, dim=1)).sum(dim=1).mean()


def train(
    model: SmallCnn,
    images: torch.Tensor,
    targets: torch.Tensor,
    *,
    epochs: int = 30,
    lr: float = 1e-3,
    batch_size: int = 128,
    seed: int = 0,
    eval_fn: Optional[Callable[[SmallCnn], float]] = None,
    eval_every: int = 5,
) -> SmallCnn:
    """Train in place; with eval_fn, restore the best checkpoint seen.

    Soft targets (2-D float tensors) use soft cross-entropy; hard integer
    labels use the standard one.
    """
    soft = targets.dtype.is_floating_point
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    gen = torch.Generator().manual_seed(seed)
    best_score, best_state = -1.0, None
    model.train()
    for epoch in range(1, epochs + 1):
        order = torch.randperm(len(images), generator=gen)
        for start in range(0, len(images), batch_size):
            idx = order[start:start + batch_size]
            opt.zero_grad()
            logits = model(images[idx])
            if soft:
                loss = soft_cross_entropy(logits, targets[idx])
            else:
                loss = nn.functional.cross_entropy(logits, targets[idx])
            loss.backward()
            opt.step()
        if eval_fn is not None and (epoch % eval_every == 0 or epoch == epochs):
            score = eval_fn(model)
            model.train()
            if score > best_score:
                best_score = score
                best_state = copy.deepcopy(model.state_dict())
    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    return model


@torch.no_grad()
def confidences(model: SmallCnn, images: torch.Tensor, batch_size: int = 512) -> torch.Tensor:
    """Victim-style query interface: softmax confidence vectors."""
    model.eval()
    outs = [
        torch.softmax(model(images[i:i + batch_size]), dim=1)
        for i in range(0, len(images), batch_size)
    ]
    return torch.cat(outs) if outs else torch.empty((0, model.head.out_features))


@torch.no_grad()
def accuracy(model: SmallCnn, images: torch.Tensor, labels: torch.Tensor) -> float:
    model.eval()
    preds = []
    for i in range(0, len(images), 512):
        preds.append(model(images[i:i + 512]).argmax(dim=1))
    if not preds:
        return 0.0
    return (torch.cat(preds) == labels).float().mean().item()
