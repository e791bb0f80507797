import numpy as np
import pytest

from causal_profit.errors import ConvergenceError, DomainError
from causal_profit.models import (
    LabeledDataset,
    LinearModel,
    gradient,
    hessian,
    objective,
    predict_proba,
    predictive_scores,
    sigmoid,
    train_logistic,
    uplift_scores,
)

# Two points x = -1 (y=0), x = +1 (y=1), c_reg = 10: by symmetry b = 0 and
# w solves sigmoid(-w) = w / 20. Root frozen from mpmath.findroot.
TWO_POINT_W = 2.12803451846623
TWO_POINT_P = 0.893598274076689


def logistic_data(gen, n, w, b):
    x = gen.normal(size=(n, len(w)))
    p = sigmoid(x @ w + b)
    return x, (gen.random(n) < p).astype(float), p


class TestObjective:
    def test_gradient_finite_differences(self, np_rng):
        x, y, _ = logistic_data(np_rng, 200, np.array([0.5, -1.0, 2.0]), 0.3)
        h = 1e-5
        for _ in range(10):
            params = np_rng.normal(size=4)
            g = gradient(params, x, y, 10.0)
            fd = np.array([
                (objective(params + h * e, x, y, 10.0) - objective(params - h * e, x, y, 10.0)) / (2 * h)
                for e in np.eye(4)
            ])
            assert np.linalg.norm(g - fd) <= 1e-4 * np.linalg.norm(fd)

    def test_hessian_finite_differences(self, np_rng):
        x, y, _ = logistic_data(np_rng, 100, np.array([1.0, -0.5]), 0.0)
        params = np_rng.normal(size=3)
        h = 1e-6
        fd = np.column_stack([
            (gradient(params + h * e, x, y, 2.0) - gradient(params - h * e, x, y, 2.0)) / (2 * h)
            for e in np.eye(3)
        ])
        np.testing.assert_allclose(hessian(params, x, y, 2.0), fd, atol=1e-7)

    def test_sigmoid_extremes(self):
        out = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        np.testing.assert_array_equal(out, [0.0, 0.5, 1.0])


class TestTrainLogistic:
    def test_two_point_oracle(self):
        model = train_logistic([[-1.0], [1.0]], [0, 1], 10.0)
        assert model.weights[0] == pytest.approx(TWO_POINT_W, abs=1e-4)
        assert model.intercept == pytest.approx(0.0, abs=1e-6)
        assert predict_proba(model, [1.0]) == pytest.approx(TWO_POINT_P, abs=1e-4)
        assert predict_proba(model, [-1.0]) == pytest.approx(1 - TWO_POINT_P, abs=1e-4)

    def test_matches_scipy_optimizer(self, np_rng):
        from scipy.optimize import minimize

        x, y, _ = logistic_data(np_rng, 300, np.array([1.0, -2.0, 0.5]), -0.4)
        model = train_logistic(x, y, 1.0)
        ref = minimize(objective, np.zeros(4), args=(x, y, 1.0), jac=gradient, method="BFGS",
                       options={"gtol": 1e-10})
        np.testing.assert_allclose(np.append(model.weights, model.intercept), ref.x, atol=1e-5)

    def test_separable(self):
        x = np.linspace(-3, 3, 40).reshape(-1, 1)
        model = train_logistic(x, (x[:, 0] > 0).astype(float), 100.0)
        assert predict_proba(model, [2.0]) > 0.9
        assert predict_proba(model, [-2.0]) < 0.1

    def test_constant_labels(self, np_rng):
        x = np_rng.normal(size=(50, 3))
        model = train_logistic(x, np.ones(50), 10.0)
        assert np.all(predict_proba(model, x) > 0.99)
        assert np.linalg.norm(model.weights) < 1e-3

    def test_gradient_tolerance_met(self, np_rng):
        x, y, _ = logistic_data(np_rng, 500, np.array([0.3, 0.7]), 0.1)
        model = train_logistic(x, y, 10.0)
        params = np.append(model.weights, model.intercept)
        assert np.linalg.norm(gradient(params, x, y, 10.0)) <= 1e-6

    def test_regularization_monotone(self, np_rng):
        x, y, _ = logistic_data(np_rng, 300, np.array([1.5, -1.0, 0.5]), 0.0)
        norms = [np.linalg.norm(train_logistic(x, y, c).weights) for c in (0.01, 0.1, 1, 10, 100)]
        assert all(b >= a for a, b in zip(norms, norms[1:]))

    def test_deterministic(self, np_rng):
        x, y, _ = logistic_data(np_rng, 200, np.array([0.5, 0.5]), 0.0)
        a, b = train_logistic(x, y, 10.0), train_logistic(x, y, 10.0)
        assert np.array_equal(a.weights, b.weights) and a.intercept == b.intercept

    def test_convergence_error(self, np_rng):
        x, y, _ = logistic_data(np_rng, 200, np.array([2.0, -2.0]), 0.0)
        with pytest.raises(ConvergenceError) as info:
            train_logistic(x, y, 10.0, max_iter=1)
        assert info.value.grad_norm > 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            train_logistic([[np.nan]], [1], 1.0)
        with pytest.raises(DomainError):
            train_logistic([[1.0]], [2], 1.0)
        with pytest.raises(DomainError):
            train_logistic([[1.0]], [1], 0.0)


class TestPredictProba:
    def test_zero_model(self):
        assert predict_proba(LinearModel(np.zeros(2), 0.0), [3.0, -1.0]) == 0.5

    def test_saturated_intercept(self):
        assert predict_proba(LinearModel(np.zeros(1), 30.0), [0.0]) >= 1 - 1e-9

    def test_reference(self):
        assert abs(predict_proba(LinearModel(np.array([1.0]), 0.0), [0.5]) - 0.6224593) <= 1e-6

    def test_monotone(self):
        model = LinearModel(np.array([2.0]), -1.0)
        p = predict_proba(model, np.linspace(-5, 5, 101).reshape(-1, 1))
        assert np.all(np.diff(p) > 0)

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            predict_proba(LinearModel(np.zeros(2), 0.0), [1.0, 2.0, 3.0])


class TestScorers:
    def make_training(self, gen, n, w0, w1, b0, b1):
        x = gen.normal(size=(n, len(w0)))
        t = (gen.random(n) < 0.5).astype(np.uint8)
        s0, s1 = sigmoid(x @ w0 + b0), sigmoid(x @ w1 + b1)
        y = np.where(t == 1, gen.random(n) < s1, gen.random(n) < s0).astype(np.uint8)
        return LabeledDataset(x, y, t), s0, s1

    def test_predictive_all_zero_control(self, np_rng):
        x = np_rng.normal(size=(100, 2))
        t = np.arange(100) % 2
        data = LabeledDataset(x, np.where(t == 1, 1, 0), t)
        assert np.all(predictive_scores(data, x, 10.0) < 0.05)

    def test_predictive_ignores_treated_rows(self, np_rng):
        data, _, _ = self.make_training(np_rng, 400, np.array([1.0, 0.0]), np.array([0.0, 1.0]), 0, 0)
        flipped = LabeledDataset(data.features, np.where(data.t == 1, 1 - data.y, data.y), data.t)
        test = np_rng.normal(size=(20, 2))
        assert np.array_equal(predictive_scores(data, test, 10.0), predictive_scores(flipped, test, 10.0))

    def test_predictive_recovery(self, np_rng):
        w = np.array([1.0, -0.5, 0.25])
        data, s0, _ = self.make_training(np_rng, 10_000, w, w, -0.5, -0.5)
        assert np.mean(np.abs(predictive_scores(data, data.features, 10.0) - s0)) <= 0.05

    def test_uplift_null_effect(self, np_rng):
        w = np.array([0.8, 0.3])
        data, _, _ = self.make_training(np_rng, 10_000, w, w, 0.2, 0.2)
        assert abs(uplift_scores(data, data.features, 10.0).mean()) <= 0.05

    def test_uplift_sign(self, np_rng):
        x = np_rng.normal(size=(200, 2))
        t = np.arange(200) % 2
        data = LabeledDataset(x, 1 - t, t)
        assert np.all(uplift_scores(data, x, 10.0) > 0.9)

    def test_uplift_recovery(self, np_rng):
        data, s0, s1 = self.make_training(
            np_rng, 10_000, np.array([1.0, -0.5]), np.array([0.2, 0.8]), 0.0, -0.3
        )
        assert np.mean(np.abs(uplift_scores(data, data.features, 10.0) - (s0 - s1))) <= 0.07

    def test_missing_arm(self, np_rng):
        x = np_rng.normal(size=(10, 2))
        data = LabeledDataset(x, np.arange(10) % 2, np.ones(10))
        with pytest.raises(DomainError):
            predictive_scores(data, x, 10.0)
        with pytest.raises(DomainError):
            uplift_scores(data, x, 10.0)
