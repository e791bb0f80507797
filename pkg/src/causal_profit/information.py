"""Entropy and mutual-information quantities (natural log, nats).

Covers the plug-in mutual information between features and a binary
outcome, and closed-form expected conditional entropies when the joint law
of the potential outcomes ``(y0, y1)`` is drawn from Dir(a, b, c, d).
"""

import math
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .numerics import digamma

# Concentration used for "no information": the ratio is ~1e-5 here.
ZERO_INFO_CONCENTRATION = 1e5


def binary_entropy(p):
    """``-p log p - (1-p) log(1-p)`` with ``0 log 0 = 0``; scalar or array."""
    arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise DomainError("binary entropy argument must lie in [0, 1]")
    q = 1.0 - arr
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -np.where(arr > 0, arr * np.log(arr), 0.0) - np.where(q > 0, q * np.log(q), 0.0)
    return float(h) if h.ndim == 0 else h


def entropy(probs):
    """Shannon entropy of a probability vector, in nats."""
    p = np.asarray(probs, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


class MutualInformation(NamedTuple):
    mi: float
    mi_ratio: float


def empirical_mutual_information(conditional_probs):
    """Plug-in ``I(x; y)`` from per-individual ``P(y=1 | x)`` values.

    The prior is the mean of the inputs; the conditional entropy is the mean
    binary entropy. Returns the information and its share of ``H(y)``.
    """
    s = np.asarray(conditional_probs, dtype=float).ravel()
    if s.size == 0:
        raise DomainError("need at least one conditional probability")
    prior = float(s.mean())
    prior = min(max(prior, 0.0), 1.0)
    h_prior = binary_entropy(prior)
    h_cond = float(np.mean(binary_entropy(s)))
    mi = max(h_prior - h_cond, 0.0)
    ratio = mi / h_prior if h_prior > 0 else 0.0
    return MutualInformation(mi, min(ratio, 1.0))


class EntropyReport(NamedTuple):
    """Expected conditional entropies ``E[H(. | mu)]`` under a Dirichlet prior."""

    joint: float
    marginal_y0: float
    marginal_y1: float


def _check_params(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (4,) or not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise DomainError("Dirichlet parameters a, b, c, d must be finite and > 0")
    return m


def _pair_term(u, v, total):
    return u / total * digamma(u + 1.0) + v / total * digamma(v + 1.0)


def dirichlet_conditional_entropy(a, b, c, d):
    """Expected entropy of ``(y0, y1)``, ``y0`` and ``y1`` given ``mu ~ Dir(a, b, c, d)``.

    ``mu = (alpha, beta, gamma, delta)`` are the probabilities of
    ``(y0, y1) = (0,0), (1,0), (0,1), (1,1)``. Uses
    ``E[-mu_j log mu_j] = (m_j / A) (psi(A + 1) - psi(m_j + 1))``.
    """
    m = _check_params((a, b, c, d))
    a, b, c, d = m
    total = float(m.sum())
    psi_total = digamma(total + 1.0)
    joint = psi_total - float(np.sum(m / total * digamma(m + 1.0)))
    y0 = psi_total - _pair_term(b + d, a + c, total)
    y1 = psi_total - _pair_term(c + d, a + b, total)
    return EntropyReport(float(joint), float(y0), float(y1))


def outcome_probabilities(m):
    """``(S0, S1) = (beta + delta, gamma + delta)`` at the Dirichlet mean."""
    m = np.asarray(m, dtype=float)
    p = m / m.sum()
    return float(p[1] + p[3]), float(p[2] + p[3])


class InformationRatios(NamedTuple):
    joint: float
    y0: float
    y1: float


def dirichlet_information_ratios(m):
    """Share of each unconditional entropy removed by knowing ``mu``.

    ``(H - E[H | mu]) / H`` for the joint outcome and each marginal; 0 when
    the unconditional entropy is 0.
    """
    m = _check_params(m)
    report = dirichlet_conditional_entropy(*m)
    s0, s1 = outcome_probabilities(m)
    unconditional = (entropy(m / m.sum()), binary_entropy(s0), binary_entropy(s1))
    ratios = []
    for h, h_cond in zip(unconditional, report):
        ratios.append(min(max((h - h_cond) / h, 0.0), 1.0) if h > 0 else 0.0)
    return InformationRatios(*ratios)


def _check_proportions(proportions):
    p = np.asarray(proportions, dtype=float)
    if p.shape != (4,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise DomainError("proportions must be 4 nonnegative numbers summing to 1")
    return p


def concentration_for_ratio(proportions, ratio, outcome=0, tol=1e-4,
                            lo=1e-6, hi=ZERO_INFO_CONCENTRATION):
    """Concentration ``A`` such that ``Dir(A * proportions)`` has the given y_t information ratio.

    The ratio ``(H(y_t) - E[H(y_t | mu)]) / H(y_t)`` decreases from 1 to 0 as
    ``A`` grows, so the root is found by bisection on ``log A`` until the
    ratio is within ``tol`` of the target. Ratios at or below the value at
    ``hi`` return ``hi``.
    """
    p = _check_proportions(proportions)
    if outcome not in (0, 1):
        raise DomainError("outcome must be 0 or 1")
    if not 0.0 <= ratio < 1.0:
        raise DomainError(f"information ratio must lie in [0, 1), got {ratio}")
    if np.any(p == 0):
        raise DomainError("proportions must be strictly positive to define a Dirichlet prior")

    def share(total):
        return dirichlet_information_ratios(total * p)[1 + outcome]

    if ratio <= share(hi):
        return float(hi)
    log_lo, log_hi = math.log(lo), math.log(hi)
    if share(lo) < ratio:
        return float(lo)
    for _ in range(200):
        mid = 0.5 * (log_lo + log_hi)
        value = share(math.exp(mid))
        if abs(value - ratio) <= tol and log_hi - log_lo < 1e-6:
            break
        if value > ratio:
            log_lo = mid
        else:
            log_hi = mid
    return math.exp(0.5 * (log_lo + log_hi))
