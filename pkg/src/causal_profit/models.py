"""L2-regularized logistic regression and the predictive / T-learner scorers.

Regularization follows the inverse-strength convention: ``c_reg`` plays the
role of ``C`` and the intercept is not penalized. The objective minimized is

    mean_i NLL_i(w, b) + ||w||^2 / (2 * c_reg * N)

which has the same minimizer as ``0.5 ||w||^2 + C * sum_i NLL_i``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

MAX_ITER = 200
GRAD_TOL = 1e-6


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float

    def decision_function(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.weights.shape[0]:
            raise DomainError(
                f"feature dimension {x.shape[-1]} does not match model dimension {self.weights.shape[0]}"
            )
        return x @ self.weights + self.intercept


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    features: np.ndarray
    y: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.y)
        t = np.asarray(self.t)
        if y.shape != (x.shape[0],) or t.shape != (x.shape[0],):
            raise DomainError("features, y and t must have the same number of rows")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "y", y.astype(np.uint8))
        object.__setattr__(self, "t", t.astype(np.uint8))

    def __len__(self):
        return self.y.shape[0]

    def arm(self, t):
        mask = self.t == t
        return self.features[mask], self.y[mask]


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def objective(params, x, y, c_reg):
    """Regularized mean negative log-likelihood; ``params = [w..., b]``."""
    w, b = params[:-1], params[-1]
    z = x @ w + b
    n = x.shape[0]
    return float(np.mean(_log1pexp(z) - y * z) + (w @ w) / (2.0 * c_reg * n))


def gradient(params, x, y, c_reg):
    w, b = params[:-1], params[-1]
    n = x.shape[0]
    resid = sigmoid(x @ w + b) - y
    g = np.empty_like(params)
    g[:-1] = x.T @ resid / n + w / (c_reg * n)
    g[-1] = resid.mean()
    return g


def hessian(params, x, y, c_reg):
    w, b = params[:-1], params[-1]
    n, d = x.shape
    p = sigmoid(x @ w + b)
    s = p * (1.0 - p)
    xa = np.hstack([x, np.ones((n, 1))])
    h = (xa * s[:, None]).T @ xa / n
    h[np.arange(d), np.arange(d)] += 1.0 / (c_reg * n)
    return h


def train_logistic(features, labels, c_reg, max_iter=MAX_ITER, tol=GRAD_TOL):
    """Fit by damped Newton (IRLS) with an Armijo backtracking line search.

    Falls back to a gradient step when the Newton system cannot be solved or
    does not give a descent direction. Raises :class:`ConvergenceError` if the
    gradient norm is still above ``tol`` after ``max_iter`` iterations.
    """
    x = np.atleast_2d(np.asarray(features, dtype=float))
    y = np.asarray(labels, dtype=float)
    if x.shape[0] < 1 or x.shape[1] < 1:
        raise DomainError("need at least one sample and one feature")
    if y.shape != (x.shape[0],):
        raise DomainError("labels must have one entry per sample")
    if not np.all(np.isfinite(x)):
        raise DomainError("features must be finite")
    if not np.isin(y, (0.0, 1.0)).all():
        raise DomainError("labels must be binary")
    if not c_reg > 0:
        raise DomainError("c_reg must be positive")

    params = np.zeros(x.shape[1] + 1)
    f = objective(params, x, y, c_reg)
    g = gradient(params, x, y, c_reg)
    gnorm = float(np.linalg.norm(g))
    for _ in range(max_iter):
        if gnorm <= tol:
            break
        try:
            step = -np.linalg.solve(hessian(params, x, y, c_reg), g)
            slope = float(g @ step)
            if not np.all(np.isfinite(step)) or slope >= 0:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            step = -g
            slope = -gnorm * gnorm
        alpha = 1.0
        while True:
            candidate = params + alpha * step
            f_new = objective(candidate, x, y, c_reg)
            if f_new <= f + 1e-4 * alpha * slope or alpha < 1e-12:
                break
            alpha *= 0.5
        params, f = candidate, f_new
        g = gradient(params, x, y, c_reg)
        gnorm = float(np.linalg.norm(g))
    if gnorm > tol:
        raise ConvergenceError(
            f"logistic regression did not reach gradient norm {tol} in {max_iter} iterations",
            grad_norm=gnorm,
        )
    return LinearModel(params[:-1].copy(), float(params[-1]))


def predict_proba(model, x):
    """P(y=1) for one feature vector (returns float) or a matrix of rows."""
    z = model.decision_function(x)
    if np.ndim(z) == 0:
        return float(sigmoid(np.array([z]))[0])
    return sigmoid(z)


def predictive_scores(train, test_features, c_reg):
    """Scores from a model of P(y=1 | x, t=0) fit on control rows only."""
    x0, y0 = train.arm(0)
    if len(y0) == 0:
        raise DomainError("training data has no control (t=0) rows")
    return predict_proba(train_logistic(x0, y0, c_reg), np.atleast_2d(test_features))


def uplift_scores(train, test_features, c_reg):
    """T-learner uplift ``P(y=1 | x, t=0) - P(y=1 | x, t=1)``."""
    x0, y0 = train.arm(0)
    x1, y1 = train.arm(1)
    if len(y0) == 0 or len(y1) == 0:
        raise DomainError("T-learner needs both control and treated rows")
    test = np.atleast_2d(test_features)
    control = train_logistic(x0, y0, c_reg)
    treated = train_logistic(x1, y1, c_reg)
    return predict_proba(control, test) - predict_proba(treated, test)
