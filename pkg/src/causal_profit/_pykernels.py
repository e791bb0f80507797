"""Pure-numpy prefix-curve kernels, the fallback for the compiled extension.

Partial sums are taken with ``cumsum`` (strictly sequential), so results
match the compiled loops bit for bit.
"""

import numpy as np


def _base_prefix(base, n):
    if base is None:
        return np.zeros(n)
    return np.cumsum(np.asarray(base, dtype=np.float64))


def prefix_curve(t, reward, base0=None, base1=None):
    t = np.asarray(t, dtype=np.uint8)
    reward = np.asarray(reward, dtype=np.float64)
    n = t.shape[0]
    k = np.arange(1, n + 1, dtype=np.float64)
    treated = t.astype(bool)
    n1 = np.cumsum(treated, dtype=np.int64)
    n0 = np.arange(1, n + 1, dtype=np.int64) - n1
    r1 = np.cumsum(np.where(treated, reward, 0.0))
    r0 = np.cumsum(np.where(treated, 0.0, reward))
    with np.errstate(divide="ignore", invalid="ignore"):
        m0 = np.where(n0 > 0, r0 / n0, _base_prefix(base0, n) / k)
        m1 = np.where(n1 > 0, r1 / n1, _base_prefix(base1, n) / k)
    return (m0 - m1) * k


def prefix_area(t, reward, base0=None, base1=None):
    curve = prefix_curve(t, reward, base0, base1)
    if curve.size == 0:
        return 0.0
    return float(np.cumsum(curve)[-1])
