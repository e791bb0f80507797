"""Uplift curve, cost-sensitive empirical profit curve and their area (AUPC).

Curves are evaluated on a :class:`RankedDataset`, whose rows are sorted by
model score, descending, with ties kept in input order.

Orientation: the uplift curve follows the churn convention (control
response rate minus treated response rate). The profit curve compares the
observed profit of treated rows against control rows, so that a good
ranking scores high in both curves. Under the unitary cost-benefit matrix
the two coincide.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DomainError
from .profit import CostBenefitMatrix, rank_order


class Normalization(enum.Enum):
    RAW = "raw"
    PER_CAPITA = "per_capita"


@dataclass(frozen=True, eq=False)
class RankedDataset:
    """Observed outcomes, treatments and per-row economics in score order.

    ``cb`` is an ``(N, 4)`` array of ``(cb00, cb01, cb10, cb11)`` rows.
    Build one from unsorted columns with :meth:`from_unsorted`.
    """

    y: np.ndarray
    t: np.ndarray
    score: np.ndarray
    cb: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y)
        t = np.asarray(self.t)
        score = np.asarray(self.score, dtype=float)
        n = score.shape[0]
        if score.ndim != 1 or y.shape != (n,) or t.shape != (n,):
            raise DomainError("y, t and score must be 1-D columns of equal length")
        if not (np.isin(y, (0, 1)).all() and np.isin(t, (0, 1)).all()):
            raise DomainError("y and t must be binary")
        if np.any(np.diff(score) > 0):
            raise DomainError("rows must be sorted by score, descending")
        cb = self.cb
        if isinstance(cb, CostBenefitMatrix):
            cb = np.broadcast_to(cb.as_flat(), (n, 4))
        cb = np.asarray(cb, dtype=float)
        if cb.shape != (n, 4) or not np.all(np.isfinite(cb)):
            raise DomainError("cb must be a CostBenefitMatrix or a finite (N, 4) array")
        object.__setattr__(self, "y", y.astype(np.uint8))
        object.__setattr__(self, "t", t.astype(np.uint8))
        object.__setattr__(self, "score", score)
        object.__setattr__(self, "cb", cb)

    @classmethod
    def from_unsorted(cls, y, t, score, cb=None):
        """Sort columns by score (stable, descending); ``cb=None`` means unitary."""
        score = np.asarray(score, dtype=float)
        order = rank_order(score)
        if cb is None:
            cb = CostBenefitMatrix.unitary()
        if not isinstance(cb, CostBenefitMatrix):
            cb = np.asarray(cb, dtype=float)[order]
        return cls(np.asarray(y)[order], np.asarray(t)[order], score[order], cb)

    def __len__(self):
        return self.score.shape[0]

    def observed_value(self):
        """The cost-benefit entry of each row's observed (y, t) cell."""
        idx = 2 * self.y.astype(np.intp) + self.t.astype(np.intp)
        return self.cb[np.arange(len(self)), idx]


@dataclass(frozen=True, eq=False)
class Curve:
    """Curve values at k = 1..N."""

    values: np.ndarray
    normalization: Normalization = Normalization.RAW

    @property
    def k(self):
        return np.arange(1, len(self.values) + 1)

    @property
    def n(self):
        return len(self.values)

    def points(self):
        return list(zip(self.k.tolist(), self.values.tolist()))

    def per_capita(self):
        if self.normalization is Normalization.PER_CAPITA:
            return self
        return Curve(self.values / self.n, Normalization.PER_CAPITA)

    def raw(self):
        if self.normalization is Normalization.RAW:
            return self
        return Curve(self.values * self.n, Normalization.RAW)

    def at(self, k):
        return float(self.values[k - 1])


def _require_rows(d):
    if len(d) == 0:
        raise DomainError("dataset is empty")


def uplift_curve(d):
    """``(r0(k)/n0(k) - r1(k)/n1(k)) * k`` with an empty arm's rate taken as 0."""
    _require_rows(d)
    return Curve(kernels.prefix_curve(d.t, d.y.astype(np.float64)))


def _profit_kernel_args(d):
    # An arm absent from the prefix is credited with its no-response value.
    return d.t, d.observed_value(), np.ascontiguousarray(d.cb[:, 0]), np.ascontiguousarray(d.cb[:, 1])


def empirical_profit_curve(d):
    """Treated-arm minus control-arm mean observed profit, times k.

    Each row contributes only its observed cell ``cb[y][t]``. When one arm
    has no rows in the prefix, its mean is the prefix mean of its
    no-response value ``cb[0][t]``, the cost-sensitive analogue of the uplift
    curve's zero rate for an empty arm.
    """
    _require_rows(d)
    return Curve(-kernels.prefix_curve(*_profit_kernel_args(d)))


def profit_area(d):
    """AUPC of the empirical profit curve without materializing the curve."""
    _require_rows(d)
    return -kernels.prefix_area(*_profit_kernel_args(d)) / len(d)


def aupc(c):
    """Area under the curve, ``(1/N) * sum_k raw(k)``."""
    if c.n == 0:
        raise DomainError("curve is empty")
    total = math.fsum(c.values.tolist())
    if c.normalization is Normalization.PER_CAPITA:
        return total
    return total / c.n
