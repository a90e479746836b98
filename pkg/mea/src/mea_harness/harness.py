"""End-to-end experiment: train a victim, attack it, evaluate the surrogate."""

from __future__ import annotations

from functools import lru_cache

from mea_harness.data import ORIGINAL_SIDE, composition_pool, glyph_dataset, resize
from mea_harness.evaluate import evaluate_relative, surrogate_inputs
from mea_harness.models import accuracy, make_model, train
from mea_harness.relabel import ResizeChain, relabel
from mea_harness.strategies import select_random, select_uncertain

VICTIM_EPOCHS = 60
SURROGATE_EPOCHS = 60
TRAIN_PER_CLASS = 120
TEST_PER_CLASS = 50
POOL_SIZE = 1500


def victim_data(seed: int):
    return glyph_dataset(TRAIN_PER_CLASS, seed=1000 + seed)


def test_data(seed: int):
    return glyph_dataset(TEST_PER_CLASS, seed=2000 + seed)


@lru_cache(maxsize=8)
def trained_victim(victim_id: int, seed: int):
    """Victim classifier at its input side, with its test accuracy."""
    train_x, train_y = victim_data(seed)
    test_x, test_y = test_data(seed)
    victim = make_model(victim_id, seed=seed * 31 + 1)
    vx = resize(train_x, victim_id)
    test_at_iv = resize(test_x, victim_id)
    train(
        victim, vx, train_y,
        epochs=VICTIM_EPOCHS, lr=2e-3, seed=seed * 31 + 2,
        eval_fn=lambda m: accuracy(m, test_at_iv, test_y),
    )
    return victim


def run_experiment(
    victim_id: int,
    surrogate_id: int,
    budget: int,
    strategy: str = "random",
    seed: int = 0,
    pool_size: int = POOL_SIZE,
) -> dict:
    chain = ResizeChain(i_o=ORIGINAL_SIDE, i_s=surrogate_id, i_v=victim_id)
    victim = trained_victim(victim_id, seed)
    test_x, test_y = test_data(seed)

    pool = composition_pool(pool_size, seed=seed * 7 + 5)
    if strategy == "random":
        picked = select_random(len(pool), budget, seed=seed * 7 + 6)
    elif strategy == "uncertainty":
        picked = select_uncertain(
            pool, budget, victim,
            seed_size=max(budget // 5, 1), round_size=max(budget // 5, 1),
            seed=seed * 7 + 6,
        )
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    relabeled = relabel(pool[picked], victim, chain)
    surrogate = make_model(surrogate_id, seed=seed * 7 + 7)
    test2_inputs = surrogate_inputs(test_x, chain, "test2")
    train(
        surrogate, relabeled.images, relabeled.labels,
        epochs=SURROGATE_EPOCHS, lr=2e-3, seed=seed * 7 + 8,
        eval_fn=lambda m: accuracy(m, test2_inputs, test_y),
    )

    results = {
        "victim_id": victim_id,
        "surrogate_id": surrogate_id,
        "strategy": strategy,
        "budget": budget,
        "seed": seed,
    }
    for mode in ("test1", "test2"):
        results[mode] = evaluate_relative(surrogate, victim, test_x, test_y, chain, mode)
    return results


def clear_victim_cache() -> None:
    trained_victim.cache_clear()
