import dataclasses
import math

import numpy as np
import pytest

from causal_profit.errors import DomainError
from causal_profit.numerics import RngStream
from causal_profit.profit import CostBenefitMatrix
from causal_profit.sim_dirichlet import (
    PREDICTIVE,
    TIE,
    UPLIFT,
    DirichletSimConfig,
    emulate_scores,
    run_comparison,
    run_outcome_sweep,
    run_variance_grid,
    sample_individual,
    sample_population,
)

GRID = [1, 13, 25, 38, 50]
S1_SMALL = (0.48, 0.48, 0.02, 0.02)  # S0 = 0.5, S1 = 0.04
S0_SMALL = (0.48, 0.02, 0.48, 0.02)  # S0 = 0.04, S1 = 0.5


@pytest.fixture(scope="module")
def sweep_rows():
    cfg = DirichletSimConfig()
    mus = [S1_SMALL, S0_SMALL, (0.25, 0.25, 0.25, 0.25)]
    return dict(zip(("s1_small", "s0_small", "uniform"), run_outcome_sweep(cfg, mus, GRID, GRID, threads=4)))


class TestConfig:
    def test_defaults(self):
        cfg = DirichletSimConfig()
        assert cfg.proportions == (0.6, 0.2, 0.1, 0.1)
        assert cfg.cb == CostBenefitMatrix.unitary()
        assert (cfg.n_population, cfg.repetitions, cfg.p_treat) == (10_000, 50, 0.5)

    def test_concentration(self):
        assert DirichletSimConfig(mi_ratio_target=0).resolved_concentration() == 1e5
        assert DirichletSimConfig(concentration=3.0).resolved_concentration() == 3.0
        assert DirichletSimConfig().resolved_concentration() == pytest.approx(81.22, abs=0.05)

    @pytest.mark.parametrize("kwargs", [
        {"proportions": (0.5, 0.5, 0.0, 0.0)}, {"proportions": (0.5, 0.2, 0.2, 0.2)},
        {"n_u": 0}, {"p_treat": 0.0}, {"concentration": -1.0}, {"mi_ratio_target": 1.0},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            DirichletSimConfig(**kwargs)


class TestSampling:
    def test_concentrated_individual(self):
        ind = sample_individual((1e6, 1e-9, 1e-9, 1e-9), RngStream(0, (1,)))
        assert ind.mu.alpha == pytest.approx(1.0, abs=1e-6)
        assert ind.s0 == pytest.approx(0.0, abs=1e-6) and ind.s1 == pytest.approx(0.0, abs=1e-6)
        assert (ind.y0, ind.y1) == (0, 0)

    def test_individual_identities(self):
        rng = RngStream(0, (2,))
        for _ in range(200):
            ind = sample_individual((0.5, 2, 1, 1), rng)
            assert ind.s0 == ind.mu.beta + ind.mu.delta
            assert ind.s1 == ind.mu.gamma + ind.mu.delta

    def test_population_moments(self):
        pop = sample_population((6, 2, 1, 1), 100_000, RngStream(0, (3,)))
        assert pop.s0.mean() == pytest.approx(0.3, abs=0.005)
        assert pop.s1.mean() == pytest.approx(0.2, abs=0.005)
        assert np.mean((pop.y0 == 1) & (pop.y1 == 0)) == pytest.approx(0.2, abs=0.01)
        np.testing.assert_array_equal(pop.s0, pop.mu[:, 1] + pop.mu[:, 3])
        np.testing.assert_array_equal(pop.s1, pop.mu[:, 2] + pop.mu[:, 3])

    def test_observed_outcome(self):
        pop = sample_population((1, 1, 1, 1), 1000, RngStream(0, (4,)))
        np.testing.assert_array_equal(pop.y, np.where(pop.t == 1, pop.y1, pop.y0))
        assert abs(pop.t.mean() - 0.5) < 0.06


class TestEmulation:
    def test_certain_outcome(self):
        s = emulate_scores(np.ones(100), np.zeros(100), 3, 7, RngStream(0, (5,)))
        assert np.all(s.score_p == 1.0)
        assert np.all(s.score_u == 1.0)

    def test_two_bernoulli_arms(self):
        s = emulate_scores(np.full(100_000, 0.5), np.full(100_000, 0.5), 1, 1, RngStream(0, (6,)))
        freq = [np.mean(s.score_u == v) for v in (-1, 0, 1)]
        np.testing.assert_allclose(freq, [0.25, 0.5, 0.25], atol=0.01)

    def test_predictive_variance(self):
        s = emulate_scores(np.full(100_000, 0.3), np.full(100_000, 0.3), 1, 10, RngStream(0, (7,)))
        assert s.score_p.var() == pytest.approx(0.021, abs=0.002)
        assert set(np.unique(s.score_p * 10)).issubset(set(range(11)))

    def test_calibration(self):
        pop = sample_population((3, 1, 1, 1), 50_000, RngStream(0, (8,)))
        s = emulate_scores(pop.s0, pop.s1, 5, 5, RngStream(0, (9,)))
        n = len(pop.s0)
        assert abs(s.score_p.mean() - pop.s0.mean()) <= 4 * s.score_p.std() / math.sqrt(n)
        assert abs(s.score_u.mean() - (pop.s0 - pop.s1).mean()) <= 4 * s.score_u.std() / math.sqrt(n)

    @pytest.mark.parametrize("k", [1, 5, 20])
    def test_variance_ordering(self, k):
        pop = sample_population((3, 1, 1, 1), 50_000, RngStream(0, (10,)))
        s = emulate_scores(pop.s0, pop.s1, k, k, RngStream(0, (11, k)))
        assert np.var(s.score_u - (pop.s0 - pop.s1)) > np.var(s.score_p - pop.s0)


class TestComparison:
    def test_zero_information_ties(self):
        cfg = DirichletSimConfig(mi_ratio_target=0.0)
        winners = [run_comparison(cfg, rep).winner for rep in range(50)]
        assert winners.count(TIE) / len(winners) >= 0.9

    def test_low_variance_uplift_wins(self):
        cfg = DirichletSimConfig(n_u=50, n_p=1)
        winners = [run_comparison(cfg, rep).winner for rep in range(50)]
        assert winners.count(UPLIFT) > 25

    def test_low_variance_predictive_wins(self):
        cfg = DirichletSimConfig(n_u=1, n_p=50)
        winners = [run_comparison(cfg, rep).winner for rep in range(50)]
        assert winners.count(PREDICTIVE) > 25

    def test_reproducible(self):
        cfg = DirichletSimConfig(n_population=2000, master_seed=9)
        assert run_comparison(cfg, 3) == run_comparison(cfg, 3)


class TestVarianceGrid:
    def test_shape_and_order(self):
        cfg = DirichletSimConfig(n_population=500, repetitions=3)
        cells = run_variance_grid(cfg, [1, 2, 3], [4, 5])
        assert [(c.n_u, c.n_p) for c in cells] == [(1, 4), (1, 5), (2, 4), (2, 5), (3, 4), (3, 5)]

    def test_thread_independent(self):
        cfg = DirichletSimConfig(n_population=1000, repetitions=6, master_seed=4)
        assert run_variance_grid(cfg, [1, 9], [2, 30]) == run_variance_grid(cfg, [1, 9], [2, 30], threads=4)

    def test_zero_information(self):
        cfg = DirichletSimConfig(mi_ratio_target=0.0)
        cells = run_variance_grid(cfg, GRID, GRID, threads=4)
        assert np.mean([c.winner == TIE for c in cells]) >= 0.9

    def test_diagonal_favors_uplift(self):
        cfg = DirichletSimConfig(mi_ratio_target=0.5)
        cells = run_variance_grid(cfg, GRID, GRID, threads=4)
        diagonal = [c for c in cells if c.n_u == c.n_p]
        assert np.mean([c.winner == UPLIFT for c in diagonal]) >= 0.5

    def test_empty_range(self):
        with pytest.raises(DomainError):
            run_variance_grid(DirichletSimConfig(), [], [1])


class TestOutcomeSweep:
    def test_keys(self, sweep_rows):
        row = sweep_rows["s1_small"]
        assert (row.s0, row.s1) == pytest.approx((0.5, 0.04))
        assert row.proportions == S1_SMALL

    def test_treated_outcome_rare(self, sweep_rows):
        assert sweep_rows["s1_small"].uplift_win_ratio >= 0.9

    def test_untreated_outcome_rare(self, sweep_rows):
        assert abs(sweep_rows["s0_small"].uplift_win_ratio - 0.5) <= 0.2

    def test_uniform_interior(self, sweep_rows):
        assert 0 < sweep_rows["uniform"].uplift_win_ratio < 1

    def test_rare_outcome_roles(self, sweep_rows):
        # which rare outcome favors the uplift approach, as the simulation shows it
        assert sweep_rows["s0_small"].uplift_win_ratio > sweep_rows["s1_small"].uplift_win_ratio
        assert 0.3 <= sweep_rows["s1_small"].uplift_win_ratio <= 0.7
