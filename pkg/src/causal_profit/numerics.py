"""Special functions and reproducible random samplers.

Every random draw in the package flows through an :class:`RngStream`. A
stream is identified by a 64-bit master seed plus a hierarchical key, so a
simulation can hand each repetition (or grid cell) its own stream and the
results do not depend on the order in which work is scheduled.
"""

import math

import numpy as np

from .errors import DomainError

_U64 = 2**64

# Bernoulli-number coefficients of the digamma asymptotic series, terms x^-2 .. x^-12.
_DIGAMMA_SERIES = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    5.0 / 660.0,
    -691.0 / 32760.0,
)
_DIGAMMA_SHIFT = 6.0


class RngStream:
    """A seeded random stream addressed by ``(master_seed, stream_key)``.

    The stream is stateful: successive draws advance it. Two streams built
    from the same seed and key produce bit-identical sequences, and
    :meth:`child` derives sub-streams without consuming the parent.
    """

    __slots__ = ("master_seed", "stream_key", "_gen")

    def __init__(self, master_seed, stream_key=()):
        master_seed = int(master_seed)
        if not 0 <= master_seed < _U64:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {master_seed}")
        key = tuple(int(k) for k in stream_key)
        for k in key:
            if not 0 <= k < _U64:
                raise DomainError(f"stream key elements must be 64-bit unsigned, got {k}")
        self.master_seed = master_seed
        self.stream_key = key
        seq = np.random.SeedSequence(entropy=master_seed, spawn_key=key)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def child(self, *key):
        return RngStream(self.master_seed, self.stream_key + tuple(key))

    @property
    def generator(self):
        """The underlying :class:`numpy.random.Generator` (advances with use)."""
        return self._gen

    def __repr__(self):
        return f"RngStream(master_seed={self.master_seed}, stream_key={self.stream_key})"


def _check_finite(z, name):
    arr = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


_erfc = np.frompyfunc(math.erfc, 1, 1)


def normal_cdf(z):
    """Standard normal CDF, ``0.5 * erfc(-z / sqrt(2))``.

    Uses the C library ``erfc`` (relative error of a few ulp), so the
    symmetry ``normal_cdf(z) + normal_cdf(-z) == 1`` holds to ~1e-16.
    Accepts scalars or arrays.
    """
    arr = _check_finite(z, "z")
    if arr.ndim == 0:
        return 0.5 * math.erfc(-float(arr) / math.sqrt(2.0))
    return 0.5 * _erfc(-arr / math.sqrt(2.0)).astype(float)


def digamma(x):
    """Digamma function for positive arguments.

    Shifts the argument above 6 with ``psi(x) = psi(x + 1) - 1/x`` and then
    evaluates the asymptotic series through the x**-12 term.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("digamma is only defined here for finite x > 0")
    scalar = arr.ndim == 0
    xs = np.atleast_1d(arr).copy()
    acc = np.zeros_like(xs)
    low = xs < _DIGAMMA_SHIFT
    while np.any(low):
        acc[low] -= 1.0 / xs[low]
        xs[low] += 1.0
        low = xs < _DIGAMMA_SHIFT
    inv2 = 1.0 / (xs * xs)
    poly = np.zeros_like(xs)
    for coef in reversed(_DIGAMMA_SERIES):
        poly = (poly + coef) * inv2
    out = acc + np.log(xs) - 0.5 / xs - poly
    return float(out[0]) if scalar else out


def _check_dirichlet_params(m):
    m = np.asarray(m, dtype=float)
    if m.shape != (4,):
        raise DomainError(f"Dirichlet parameter must have 4 components, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m <= 0):
        raise DomainError("Dirichlet parameters must be finite and > 0")
    return m


def sample_dirichlet(m, rng, size=None):
    """Draw from Dir(m) on the 4-simplex.

    Gamma(m_j, 1) variates are normalized by their sum. Shapes below one use
    the boost ``G(a) = G(a + 1) * U**(1/a)``, carried out in log space so
    that tiny shapes underflow to an exact zero component instead of a 0/0.

    Returns an array of shape ``(4,)``, or ``(size, 4)`` when ``size`` is given.
    """
    m = _check_dirichlet_params(m)
    gen = rng.generator
    n = 1 if size is None else int(size)
    boost = m < 1.0
    shape = np.where(boost, m + 1.0, m)
    log_g = np.log(gen.standard_gamma(shape, size=(n, 4)))
    if np.any(boost):
        u = gen.random(size=(n, 4))
        # 1 - u lies in (0, 1], so the log is finite
        log_g = np.where(boost, log_g + np.log1p(-u) / m, log_g)
    log_g -= log_g.max(axis=1, keepdims=True)
    w = np.exp(log_g)
    mu = w / w.sum(axis=1, keepdims=True)
    return mu[0] if size is None else mu


def sample_binomial(p, n, rng, size=None):
    """Binomial(n, p) draws; ``p`` may be an array for per-row probabilities."""
    p_arr = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(p_arr)) or np.any(p_arr < 0) or np.any(p_arr > 1):
        raise DomainError("binomial probability must lie in [0, 1]")
    if int(n) != n or n < 1:
        raise DomainError(f"binomial trial count must be a positive integer, got {n}")
    draw = rng.generator.binomial(int(n), p_arr, size=size)
    if np.ndim(draw) == 0:
        return int(draw)
    return draw


def _check_probs(probs):
    probs = np.asarray(probs, dtype=float)
    if probs.ndim not in (1, 2) or probs.shape[-1] < 1:
        raise DomainError("probability vector must be 1-D (or a 2-D batch of rows)")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise DomainError("probabilities must be finite and nonnegative")
    if np.any(np.abs(probs.sum(axis=-1) - 1.0) > 1e-9):
        raise DomainError("probabilities must sum to 1 within 1e-9")
    return probs


def categorical_from_uniform(probs, u):
    """Map uniforms ``u`` in [0, 1) to category indices by inverse CDF.

    ``probs`` is ``(k,)`` or ``(n, k)``; rounding that pushes ``u`` past the
    last cumulative sum is resolved to the last category with positive mass.
    """
    probs = np.atleast_2d(probs)
    u = np.asarray(u, dtype=float).reshape(-1, 1)
    cum = np.cumsum(probs, axis=1)
    idx = (u >= cum).sum(axis=1)
    k = probs.shape[1]
    last_pos = k - 1 - np.argmax(probs[:, ::-1] > 0, axis=1)
    return np.minimum(idx, last_pos)


def sample_categorical(probs, rng, size=None):
    """Draw category indices with probabilities ``probs``.

    With a 1-D ``probs`` returns an ``int`` (or ``size`` draws). With a 2-D
    batch returns one draw per row.
    """
    probs = _check_probs(probs)
    gen = rng.generator
    if probs.ndim == 2:
        return categorical_from_uniform(probs, gen.random(probs.shape[0]))
    if size is None:
        return int(categorical_from_uniform(probs, gen.random(1))[0])
    return categorical_from_uniform(probs, gen.random(int(size)))
