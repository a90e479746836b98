"""Query-selection strategies over the attack pool.

`select_random` is the KnockoffNets-style uniform draw.  `select_uncertain`
is the ActiveThief-style pick of the samples the victim is least sure
about, operationalised as the entropy of the victim's confidence vector;
ties break by pool index.  Selection can run as one shot or as a random
seed batch plus fixed-size rounds.
"""

from __future__ import annotations

import torch

from mea_harness.data import resize
from mea_harness.models import SmallCnn, confidences


def select_random(pool_size: int, budget: int, seed: int) -> torch.Tensor:
    """Uniform without replacement; returns sorted pool indices."""
    if budget > pool_size:
        raise ValueError(f"budget {budget} exceeds pool size {pool_size}")
    gen = torch.Generator().manual_seed(seed)
    return torch.randperm(pool_size, generator=gen)[:budget].sort().values


def entropy(probs: torch.Tensor) -> torch.Tensor:
    return -(probs * torch.log(probs.clamp_min(1e-12))).sum(dim=1)


def select_uncertain(
    pool: torch.Tensor,
    budget: int,
    victim: SmallCnn,
    *,
    seed_size: int = 0,
    round_size: int = 0,
    seed: int = 0,
) -> torch.Tensor:
    """Top-budget pool indices by victim-confidence entropy.

    With seed_size > 0, a random seed batch is drawn first and the
    remaining budget is filled in rounds of round_size (defaulting to one
    final round) from the highest-entropy leftovers.
    """
    if budget > len(pool):
        raise ValueError(f"budget {budget} exceeds pool size {len(pool)}")
    queried = resize(pool, victim.side)
    scores = entropy(confidences(victim, queried))
    # stable ranking: entropy descending, index ascending on ties
    order = sorted(range(len(pool)), key=lambda i: (-scores[i].item(), i))

    chosen: list[int] = []
    if seed_size > 0:
        seed_batch = select_random(len(pool), min(seed_size, budget), seed)
        chosen.extend(int(i) for i in seed_batch)
    taken = set(chosen)
    remaining = budget - len(chosen)
    step = round_size if round_size > 0 else remaining
    ranked = [i for i in order if i not in taken]
    while remaining > 0 and ranked:
        take = ranked[:min(step, remaining)]
        chosen.extend(take)
        ranked = ranked[len(take):]
        remaining = budget - len(chosen)
    return torch.tensor(sorted(chosen), dtype=torch.long)
