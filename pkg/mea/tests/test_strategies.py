import pytest
import torch

from mea_harness.data import composition_pool, resize
from mea_harness.models import confidences, make_model
from mea_harness.strategies import entropy, select_random, select_uncertain


@pytest.fixture(scope="module")
def pool():
    return composition_pool(100, seed=8)


def constant_victim(side):
    model = make_model(side, seed=0)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    return model


class TestSelectRandom:
    def test_full_budget_is_identity(self):
        assert select_random(10, 10, seed=0).tolist() == list(range(10))

    def test_budget_exceeds_pool(self):
        with pytest.raises(ValueError, match="exceeds pool size"):
            select_random(10, 11, seed=0)

    def test_seeded_determinism(self):
        assert select_random(100, 20, seed=5).tolist() == select_random(100, 20, seed=5).tolist()
        assert select_random(100, 20, seed=5).tolist() != select_random(100, 20, seed=6).tolist()

    def test_no_replacement(self):
        picked = select_random(50, 30, seed=1)
        assert len(set(picked.tolist())) == 30


class TestSelectUncertain:
    def test_full_budget_is_identity(self, pool):
        victim = make_model(16, seed=2)
        picked = select_uncertain(pool, len(pool), victim)
        assert picked.tolist() == list(range(len(pool)))

    def test_uniform_victim_tie_breaks_by_index(self, pool):
        # All-equal confidences: ranking degenerates to pool order.
        victim = constant_victim(16)
        picked = select_uncertain(pool, 10, victim)
        assert picked.tolist() == list(range(10))

    def test_selected_entropy_beats_pool_average(self, pool):
        victim = make_model(16, seed=2)
        scores = entropy(confidences(victim, resize(pool, 16)))
        picked = select_uncertain(pool, 20, victim)
        assert scores[picked].mean() >= scores.mean()

    def test_matches_exhaustive_ranking(self, pool):
        victim = make_model(16, seed=2)
        scores = entropy(confidences(victim, resize(pool, 16)))
        oracle = sorted(
            sorted(range(len(pool)), key=lambda i: (-scores[i].item(), i))[:20]
        )
        assert select_uncertain(pool, 20, victim).tolist() == oracle

    def test_seed_batch_plus_rounds(self, pool):
        victim = make_model(16, seed=2)
        picked = select_uncertain(pool, 30, victim, seed_size=10, round_size=5, seed=3)
        assert len(picked) == 30
        assert len(set(picked.tolist())) == 30

    def test_budget_exceeds_pool(self, pool):
        victim = make_model(16, seed=2)
        with pytest.raises(ValueError, match="exceeds pool size"):
            select_uncertain(pool, len(pool) + 1, victim)
