"""Dirichlet potential-outcome simulation with emulated estimators.

Each individual gets a joint law ``mu = (alpha, beta, gamma, delta)`` of
``(y0, y1) in {(0,0), (1,0), (0,1), (1,1)}`` drawn from ``Dir(A * proportions)``,
so ``S0 = beta + delta`` and ``S1 = gamma + delta``. Model scores are emulated
with binomial noise: the predictive score is ``Bin(n_p, S0) / n_p`` and the
uplift score ``Bin(n_u, S0) / n_u - Bin(n_u, S1) / n_u``. Larger ``n`` means a
lower-variance estimator.

Streams: the population of repetition ``r`` is drawn from key ``(0, r)`` and
the scores of cell ``(n_u, n_p)`` from ``(1, n_u, n_p, r)``, so every cell of
a grid is evaluated against the same populations.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

import numpy as np

from .curves import RankedDataset, profit_area
from .errors import DomainError
from .information import ZERO_INFO_CONCENTRATION, concentration_for_ratio
from .numerics import (
    RngStream,
    categorical_from_uniform,
    sample_binomial,
    sample_categorical,
    sample_dirichlet,
)
from .profit import CostBenefitMatrix

UPLIFT = "uplift"
PREDICTIVE = "predictive"
TIE = "tie"

# index of the categorical draw -> (y0, y1)
_Y0 = np.array([0, 1, 0, 1], dtype=np.uint8)
_Y1 = np.array([0, 0, 1, 1], dtype=np.uint8)


class PotentialJoint(NamedTuple):
    alpha: float
    beta: float
    gamma: float
    delta: float

    @property
    def s0(self):
        return self.beta + self.delta

    @property
    def s1(self):
        return self.gamma + self.delta


@dataclass(frozen=True)
class DirichletSimConfig:
    """Settings of one simulated comparison.

    ``concentration`` (the Dirichlet total ``A``) overrides
    ``mi_ratio_target``; a target of 0 means ``A = ZERO_INFO_CONCENTRATION``.
    ``tie_tolerance`` is relative to the population's profit scale.
    ``cell_z`` sets the noise band for a grid cell's verdict.
    """

    proportions: tuple = (0.6, 0.2, 0.1, 0.1)
    mi_ratio_target: float = 0.01
    concentration: float = None
    n_population: int = 10_000
    n_u: int = 1
    n_p: int = 1
    cb: CostBenefitMatrix = field(default_factory=CostBenefitMatrix.unitary)
    repetitions: int = 50
    master_seed: int = 0
    p_treat: float = 0.5
    tie_tolerance: float = 1e-4
    cell_z: float = 2.576

    def __post_init__(self):
        p = tuple(float(v) for v in self.proportions)
        if len(p) != 4 or any(v <= 0 for v in p) or abs(sum(p) - 1.0) > 1e-9:
            raise DomainError("proportions must be 4 positive numbers summing to 1")
        object.__setattr__(self, "proportions", p)
        if self.concentration is None:
            if not 0.0 <= self.mi_ratio_target < 1.0:
                raise DomainError(f"mi_ratio_target must lie in [0, 1), got {self.mi_ratio_target!r}")
        elif not self.concentration > 0:
            raise DomainError(f"concentration must be positive, got {self.concentration!r}")
        for name in ("n_population", "n_u", "n_p", "repetitions"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"{name} must be an integer >= 1, got {value!r}")
        if not 0.0 < self.p_treat < 1.0:
            raise DomainError(f"p_treat must lie in (0, 1), got {self.p_treat!r}")
        if self.tie_tolerance < 0 or self.cell_z < 0:
            raise DomainError("tie_tolerance and cell_z must be nonnegative")
        if not 0 <= int(self.master_seed) < 2**64:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    def resolved_concentration(self):
        if self.concentration is not None:
            return float(self.concentration)
        if self.mi_ratio_target == 0:
            return ZERO_INFO_CONCENTRATION
        return concentration_for_ratio(self.proportions, self.mi_ratio_target, outcome=0)

    def dirichlet_parameters(self):
        return self.resolved_concentration() * np.asarray(self.proportions)


class Individual(NamedTuple):
    mu: PotentialJoint
    s0: float
    s1: float
    y0: int
    y1: int


def sample_individual(m, rng):
    """Draw ``mu``, derive ``(S0, S1)`` and one potential-outcome pair."""
    mu = PotentialJoint(*sample_dirichlet(m, rng).tolist())
    cell = sample_categorical(np.asarray(mu), rng)
    return Individual(mu, mu.beta + mu.delta, mu.gamma + mu.delta, int(_Y0[cell]), int(_Y1[cell]))


class SimPopulation(NamedTuple):
    mu: np.ndarray
    s0: np.ndarray
    s1: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    t: np.ndarray

    @property
    def y(self):
        return np.where(self.t == 1, self.y1, self.y0)


def sample_population(m, n, rng, p_treat=0.5):
    """Vectorized draw of ``n`` individuals plus a randomized treatment column."""
    mu = sample_dirichlet(m, rng, size=n)
    gen = rng.generator
    cell = categorical_from_uniform(mu, gen.random(n))
    t = (gen.random(n) < p_treat).astype(np.uint8)
    s0 = mu[:, 1] + mu[:, 3]
    s1 = mu[:, 2] + mu[:, 3]
    return SimPopulation(mu, s0, s1, _Y0[cell], _Y1[cell], t)


class Scores(NamedTuple):
    score_u: object
    score_p: object


def emulate_scores(s0, s1, n_u, n_p, rng):
    """Binomial emulation of the uplift and predictive estimators.

    Works elementwise on arrays; the two uplift arms are independent.
    """
    s0 = np.clip(s0, 0.0, 1.0)
    s1 = np.clip(s1, 0.0, 1.0)
    score_p = sample_binomial(s0, n_p, rng) / n_p
    score_u = (sample_binomial(s0, n_u, rng) - sample_binomial(s1, n_u, rng)) / n_u
    return Scores(score_u, score_p)


class Comparison(NamedTuple):
    aupc_u: float
    aupc_p: float
    winner: str


def _causal_profit_per_individual(s0, s1, cb):
    return cb.cb01 * (1 - s1) + cb.cb11 * s1 - cb.cb00 * (1 - s0) - cb.cb10 * s0


def tie_epsilon(cfg, pop):
    """``tie_tolerance * N * mean |pi(x)|`` (the scale of a raw AUPC)."""
    scale = len(pop.s0) * float(np.mean(np.abs(_causal_profit_per_individual(pop.s0, pop.s1, cfg.cb))))
    return cfg.tie_tolerance * scale


def _verdict(diff, eps):
    if abs(diff) <= eps:
        return TIE
    return UPLIFT if diff > 0 else PREDICTIVE


def compare_on(cfg, pop, rng):
    scores = emulate_scores(pop.s0, pop.s1, cfg.n_u, cfg.n_p, rng)
    y = pop.y
    aupc_u = profit_area(RankedDataset.from_unsorted(y, pop.t, scores.score_u, cfg.cb))
    aupc_p = profit_area(RankedDataset.from_unsorted(y, pop.t, scores.score_p, cfg.cb))
    return Comparison(aupc_u, aupc_p, _verdict(aupc_u - aupc_p, tie_epsilon(cfg, pop)))


def population_stream(cfg, rep):
    return RngStream(cfg.master_seed, (0, rep))


def score_stream(cfg, rep):
    return RngStream(cfg.master_seed, (1, cfg.n_u, cfg.n_p, rep))


def run_comparison(cfg, rep=0, m=None):
    """One repetition: sample a population, score it both ways, compare AUPCs."""
    if m is None:
        m = cfg.dirichlet_parameters()
    pop = sample_population(m, cfg.n_population, population_stream(cfg, rep), cfg.p_treat)
    return compare_on(cfg, pop, score_stream(cfg, rep))


class CellResult(NamedTuple):
    n_u: int
    n_p: int
    win_rate_uplift: float
    win_rate_predictive: float
    mean_aupc_u: float
    mean_aupc_p: float
    winner: str


def summarize_cell(cfg, comparisons):
    """Aggregate repetitions; the cell is a tie when the mean AUPC gap is within
    ``cell_z`` standard errors (or within the per-repetition tie band)."""
    u = np.array([c.aupc_u for c in comparisons])
    p = np.array([c.aupc_p for c in comparisons])
    diff = u - p
    reps = len(diff)
    se = float(diff.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    mean_diff = float(diff.mean())
    winner = TIE if abs(mean_diff) <= cfg.cell_z * se else _verdict(mean_diff, 0.0)
    return CellResult(
        cfg.n_u,
        cfg.n_p,
        sum(c.winner == UPLIFT for c in comparisons) / reps,
        sum(c.winner == PREDICTIVE for c in comparisons) / reps,
        float(u.mean()),
        float(p.mean()),
        winner,
    )


def run_variance_grid(cfg, n_u_range, n_p_range, threads=1):
    """Evaluate every ``(n_u, n_p)`` cell; rows ordered by ``n_u`` then ``n_p``."""
    n_u_range = [int(v) for v in n_u_range]
    n_p_range = [int(v) for v in n_p_range]
    if not n_u_range or not n_p_range:
        raise DomainError("n_u and n_p ranges must be nonempty")
    m = cfg.dirichlet_parameters()
    cells = [replace(cfg, n_u=nu, n_p=np_) for nu in n_u_range for np_ in n_p_range]

    def run_rep(rep):
        pop = sample_population(m, cfg.n_population, population_stream(cfg, rep), cfg.p_treat)
        return [compare_on(cell, pop, score_stream(cell, rep)) for cell in cells]

    reps = range(cfg.repetitions)
    if threads <= 1:
        per_rep = [run_rep(r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_rep = list(pool.map(run_rep, reps))
    return [summarize_cell(cell, [row[i] for row in per_rep]) for i, cell in enumerate(cells)]


class SweepRow(NamedTuple):
    s0: float
    s1: float
    uplift_win_ratio: float
    proportions: tuple


def run_outcome_sweep(base_cfg, mu_grid, n_u_range, n_p_range, threads=1):
    """Share of variance-grid cells won by the uplift approach, per outcome law."""
    rows = []
    for proportions in mu_grid:
        cfg = replace(base_cfg, proportions=tuple(proportions))
        grid = run_variance_grid(cfg, n_u_range, n_p_range, threads=threads)
        ratio = sum(cell.winner == UPLIFT for cell in grid) / len(grid)
        joint = PotentialJoint(*cfg.proportions)
        rows.append(SweepRow(joint.s0, joint.s1, ratio, cfg.proportions))
    return rows
