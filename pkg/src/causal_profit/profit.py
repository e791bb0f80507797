"""Individual and campaign causal profit.

All population expectations are uniform means over the rows of a
:class:`Population`. Targeting is deterministic: rows are ranked by score
(descending) with ties going to the earlier row, and the top
``ceil(N * rho)`` rows are treated.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContractViolation, DomainError


@dataclass(frozen=True)
class CostBenefitMatrix:
    """Monetary value of each (outcome y, treatment t) scenario.

    ``cb<y><t>``: the row index is the outcome, the column the treatment.
    """

    cb00: float
    cb01: float
    cb10: float
    cb11: float

    def __post_init__(self):
        for name in ("cb00", "cb01", "cb10", "cb11"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DomainError(f"cost-benefit entry {name} must be finite")
            object.__setattr__(self, name, value)

    @classmethod
    def unitary(cls):
        """Value 1 when the outcome does not occur, 0 otherwise, free treatment."""
        return cls(1.0, 1.0, 0.0, 0.0)

    @classmethod
    def from_rows(cls, rows):
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    def value(self, y, t):
        return (self.cb00, self.cb01, self.cb10, self.cb11)[2 * int(y) + int(t)]

    def as_matrix(self):
        return np.array([[self.cb00, self.cb01], [self.cb10, self.cb11]])

    def as_flat(self):
        return np.array([self.cb00, self.cb01, self.cb10, self.cb11])


@dataclass(frozen=True)
class IndividualProfile:
    """True outcome probabilities of one unit, its economics and its model score.

    ``s0`` and ``s1`` are P(y=1) without and with treatment; the uplift is
    ``s0 - s1``.
    """

    s0: float
    s1: float
    cb: CostBenefitMatrix
    score: float = 0.0

    def __post_init__(self):
        for name in ("s0", "s1"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)
        object.__setattr__(self, "score", float(self.score))

    @property
    def uplift(self):
        return self.s0 - self.s1


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


class Population:
    """A finite, immutable population of individuals stored column-wise.

    ``cb`` is an ``(N, 4)`` array of ``(cb00, cb01, cb10, cb11)`` rows; a single
    :class:`CostBenefitMatrix` is broadcast to every row.
    """

    __slots__ = ("s0", "s1", "score", "cb")

    def __init__(self, s0, s1, score, cb):
        s0 = _readonly(np.atleast_1d(s0))
        s1 = _readonly(np.atleast_1d(s1))
        score = _readonly(np.atleast_1d(score))
        n = s0.shape[0]
        if n == 0:
            raise DomainError("population must be nonempty")
        if s1.shape != (n,) or score.shape != (n,):
            raise DomainError("s0, s1 and score must be 1-D arrays of equal length")
        if np.any((s0 < 0) | (s0 > 1) | (s1 < 0) | (s1 > 1)):
            raise DomainError("s0 and s1 must lie in [0, 1]")
        if isinstance(cb, CostBenefitMatrix):
            cb = np.broadcast_to(cb.as_flat(), (n, 4))
        cb = _readonly(cb)
        if cb.shape != (n, 4) or not np.all(np.isfinite(cb)):
            raise DomainError("cb must be a CostBenefitMatrix or a finite (N, 4) array")
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "s1", s1)
        object.__setattr__(self, "score", score)
        object.__setattr__(self, "cb", cb)

    def __setattr__(self, name, value):
        raise AttributeError("Population is immutable")

    @classmethod
    def from_profiles(cls, profiles):
        profiles = list(profiles)
        if not profiles:
            raise DomainError("population must be nonempty")
        return cls(
            [p.s0 for p in profiles],
            [p.s1 for p in profiles],
            [p.score for p in profiles],
            np.array([p.cb.as_flat() for p in profiles]),
        )

    def __len__(self):
        return self.s0.shape[0]

    def with_scores(self, score):
        return Population(self.s0, self.s1, score, self.cb)

    def constant_cb(self):
        """The shared cost-benefit matrix, or ``None`` if rows differ."""
        first = self.cb[0]
        if np.all(self.cb == first):
            return CostBenefitMatrix(*first)
        return None


def individual_action_profit(p, t):
    """Expected profit of applying treatment ``t`` to the individual."""
    if t not in (0, 1):
        raise DomainError(f"treatment must be 0 or 1, got {t}")
    s = p.s1 if t else p.s0
    return p.cb.value(0, t) * (1.0 - s) + p.cb.value(1, t) * s


def _collected(cb00, cb01, cb10, cb11, s0, s1):
    # pi_1 - pi_0 with the terms grouped by probability; under the unitary
    # matrix this is a single rounding of s0 - s1
    return (cb01 - cb00) + (cb11 - cb01) * s1 - (cb10 - cb00) * s0


def individual_causal_profit(p):
    """Profit of treating minus profit of not treating."""
    cb = p.cb
    return _collected(cb.cb00, cb.cb01, cb.cb10, cb.cb11, p.s0, p.s1)


def action_profits(pop, t):
    """Vectorized :func:`individual_action_profit` over a population."""
    if t not in (0, 1):
        raise DomainError(f"treatment must be 0 or 1, got {t}")
    s = pop.s1 if t else pop.s0
    return pop.cb[:, t] * (1.0 - s) + pop.cb[:, 2 + t] * s


def causal_profits(pop):
    cb = pop.cb
    return _collected(cb[:, 0], cb[:, 1], cb[:, 2], cb[:, 3], pop.s0, pop.s1)


class Threshold(NamedTuple):
    tau: float
    targeted_count: int


def _check_rate(rho):
    rho = float(rho)
    if not 0.0 < rho < 1.0:
        raise DomainError(f"treatment rate must lie in (0, 1), got {rho}")
    return rho


def targeted_count(n, rho):
    """``ceil(n * rho)``, robust to ``rho`` being a rounded ratio ``c / n``."""
    return min(n, max(1, math.ceil(n * rho - 1e-9)))


def rank_order(scores):
    """Row indices by score descending; ties keep the input order."""
    scores = np.asarray(scores, dtype=float)
    return np.argsort(-scores, kind="stable")


def targeted_mask(scores, count):
    mask = np.zeros(len(scores), dtype=bool)
    mask[rank_order(scores)[:count]] = True
    return mask


def threshold_for_rate(pop, rho):
    """Score threshold and number of individuals targeted at rate ``rho``.

    ``tau`` is the ``targeted_count``-th largest score.
    """
    rho = _check_rate(rho)
    count = targeted_count(len(pop), rho)
    order = rank_order(pop.score)
    return Threshold(float(pop.score[order[count - 1]]), count)


class CampaignProfit(NamedTuple):
    action_profit: float
    baseline_profit: float
    causal_profit: float


def campaign_profits(pop, rho):
    """Action, baseline and causal profit per individual of a campaign.

    The action profit weights the treated and untreated groups by the
    realized rate ``ceil(N * rho) / N``.
    """
    rho = _check_rate(rho)
    n = len(pop)
    count = targeted_count(n, rho)
    mask = targeted_mask(pop.score, count)
    pi0 = action_profits(pop, 0)
    pi1 = action_profits(pop, 1)
    realized = count / n
    treated = pi1[mask].mean()
    untreated = pi0[~mask].mean() if count < n else 0.0
    action = realized * treated + (1.0 - realized) * untreated
    baseline = pi0.mean()
    return CampaignProfit(float(action), float(baseline), float(action - baseline))


def targeted_causal_profit(pop, rho):
    """Campaign causal profit as the mean of ``pi(x) * 1[x targeted]``.

    Same quantity as ``campaign_profits(pop, rho).causal_profit`` computed
    from the individual causal profits of the targeted rows only.
    """
    rho = _check_rate(rho)
    count = targeted_count(len(pop), rho)
    mask = targeted_mask(pop.score, count)
    return float(np.where(mask, causal_profits(pop), 0.0).mean())


def expected_causal_profit(pop, rho, score_draws):
    """Mean campaign causal profit over several score vectors.

    Each row of ``score_draws`` scores the population once, e.g. a model
    refit on an independently drawn training set. Averaging over them
    estimates the causal profit expected over training data.
    """
    draws = np.atleast_2d(np.asarray(score_draws, dtype=float))
    if draws.shape[0] == 0 or draws.shape[1] != len(pop):
        raise DomainError("score_draws must be a nonempty (R, N) array")
    return float(np.mean([campaign_profits(pop.with_scores(s), rho).causal_profit for s in draws]))


def causal_confusion_matrix(pop, tau):
    """Probability-weighted 2x2 matrix of score outcomes against threshold ``tau``.

    Rows are outcomes y, columns treatments t. The ``t=0`` column holds the
    mass *below* ``tau`` and the ``t=1`` column the mass at or above it.
    """
    below = pop.score < tau
    cf = np.zeros((2, 2))
    for t, s in ((0, pop.s0), (1, pop.s1)):
        big_s = s.mean()
        for y, w in ((0, 1.0 - s), (1, s)):
            prior = 1.0 - big_s if y == 0 else big_s
            total = w.sum()
            cdf = w[below].sum() / total if total > 0 else 0.0
            cf[y, t] = prior * cdf if t == 0 else prior * (1.0 - cdf)
    return cf


def verbeke_causal_profit(pop, tau, cb=None):
    """Causal profit through the causal confusion and effect matrices.

    Requires one cost-benefit matrix shared by the whole population; ``cb``
    defaults to it and, when given, must match it.
    """
    shared = pop.constant_cb()
    if shared is None:
        raise ContractViolation("cost-benefit matrix varies across individuals")
    if cb is not None and cb != shared:
        raise ContractViolation("cb does not match the population's cost-benefit matrix")
    cb = shared
    s0_bar = pop.s0.mean()
    cf_inf = np.array([[1.0 - s0_bar, 0.0], [s0_bar, 0.0]])
    effect = causal_confusion_matrix(pop, tau) - cf_inf
    return float(np.sum(effect * cb.as_matrix()))
