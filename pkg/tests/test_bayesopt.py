import numpy as np
import pytest

from qaoa_mimo.bayesopt import (
    SquaredExponentialKernel,
    bayes_opt,
    gp_fit,
    gp_predict,
    maximize_acquisition,
    ucb,
)
from qaoa_mimo.errors import ObjectiveEvaluationError

UNIT_1D = np.array([[0.0, 1.0]])
UNIT_2D = np.array([[0.0, 1.0], [0.0, 1.0]])


def direct_prediction(points, values, kernel, x):
    """Textbook GP formulas via a generic dense solve (independent path)."""
    k_matrix = kernel.matrix(points, points) + kernel.noise_variance * np.eye(len(points))
    kstar = kernel.matrix(points, np.atleast_2d(x))[:, 0]
    inv = np.linalg.inv(k_matrix)
    mean = kstar @ inv @ values
    variance = kernel.signal_variance - kstar @ inv @ kstar
    return float(mean), float(variance)


class TestGpFit:
    def test_interpolation_limit(self):
        kernel = SquaredExponentialKernel(noise_variance=1e-10)
        post = gp_fit([[0.4, 0.6]], [2.5], kernel)
        mean, variance = gp_predict(post, [0.4, 0.6])
        assert mean == pytest.approx(2.5, abs=1e-4)
        assert variance >= 0.0

    def test_far_query_reverts_to_prior(self):
        kernel = SquaredExponentialKernel()
        post = gp_fit([[0.0], [0.2]], [3.0, -1.0], kernel)
        mean, variance = gp_predict(post, [100.0 * kernel.length_scale])
        assert mean == pytest.approx(0.0, abs=1e-6)
        assert variance == pytest.approx(kernel.signal_variance, abs=1e-6)

    def test_two_point_hand_inverse(self):
        kernel = SquaredExponentialKernel(noise_variance=1e-6)
        points = np.array([[0.2], [0.8]])
        values = np.array([1.0, -0.5])
        post = gp_fit(points, values, kernel)
        # explicit 2x2 inversion
        k01 = kernel.signal_variance * np.exp(-0.5 * 0.6**2 / kernel.length_scale**2)
        a = d = kernel.signal_variance + kernel.noise_variance
        det = a * d - k01 * k01
        inv = np.array([[d, -k01], [-k01, a]]) / det
        for x in ([0.3], [0.55], [0.9]):
            kstar = np.array(
                [
                    kernel.signal_variance
                    * np.exp(-0.5 * (x[0] - p[0]) ** 2 / kernel.length_scale**2)
                    for p in points
                ]
            )
            mean_ref = kstar @ inv @ values
            var_ref = kernel.signal_variance - kstar @ inv @ kstar
            mean, variance = gp_predict(post, x)
            assert mean == pytest.approx(mean_ref, abs=1e-10)
            assert variance == pytest.approx(var_ref, abs=1e-10)

    def test_refit_reproduces_predictions(self):
        gen = np.random.default_rng(1)
        points = gen.random((4, 3))
        values = gen.normal(size=4)
        a = gp_fit(points, values)
        b = gp_fit(points, values)
        x = gen.random(3)
        assert gp_predict(a, x) == gp_predict(b, x)

    def test_validation(self):
        with pytest.raises(ValueError):
            gp_fit([[0.0], [1.0]], [1.0])
        with pytest.raises(ValueError):
            gp_fit(np.empty((0, 2)), [])
        with pytest.raises(ValueError):
            gp_fit([[0.0]], [1.0], SquaredExponentialKernel(noise_variance=0.0))

    def test_jitter_escalation_on_duplicates(self):
        # exactly repeated points make K singular at negligible jitter
        kernel = SquaredExponentialKernel(noise_variance=1e-18)
        points = np.zeros((6, 2))
        post = gp_fit(points, np.ones(6), kernel)
        assert post.noise_variance > 1e-18
        mean, variance = gp_predict(post, [0.0, 0.0])
        assert np.isfinite(mean) and variance >= 0.0


class TestGpPredict:
    def test_matches_direct_formula_random_sets(self):
        gen = np.random.default_rng(2)
        kernel = SquaredExponentialKernel(noise_variance=1e-6)
        for _ in range(10):
            m = int(gen.integers(1, 6))
            points = gen.random((m, 2))
            values = gen.normal(size=m)
            post = gp_fit(points, values, kernel)
            x = gen.random(2)
            mean_ref, var_ref = direct_prediction(points, values, kernel, x)
            mean, variance = gp_predict(post, x)
            assert mean == pytest.approx(mean_ref, abs=1e-8)
            assert variance == pytest.approx(var_ref, abs=1e-8)

    def test_variance_lower_at_training_point(self):
        post = gp_fit([[0.5]], [1.0])
        _, var_near = gp_predict(post, [0.5])
        _, var_far = gp_predict(post, [50.0])
        assert var_near <= var_far

    def test_permutation_invariance(self):
        gen = np.random.default_rng(3)
        points = gen.random((5, 2))
        values = gen.normal(size=5)
        perm = gen.permutation(5)
        a = gp_fit(points, values)
        b = gp_fit(points[perm], values[perm])
        x = gen.random(2)
        assert gp_predict(a, x)[0] == pytest.approx(gp_predict(b, x)[0], abs=1e-10)
        assert gp_predict(a, x)[1] == pytest.approx(gp_predict(b, x)[1], abs=1e-10)

    def test_dimension_mismatch(self):
        post = gp_fit([[0.1, 0.2]], [1.0])
        with pytest.raises(ValueError):
            gp_predict(post, [0.1])


class TestUcb:
    def test_arithmetic(self):
        assert ucb(0.5, 0.04, 2.0) == pytest.approx(0.9)
        assert ucb(0.0, 1.0, 3.0) == pytest.approx(3.0)

    def test_kappa_zero_is_mean(self):
        assert ucb(-1.25, 0.7, 0.0) == pytest.approx(-1.25)

    def test_rejects_negative_variance(self):
        with pytest.raises(ValueError):
            ucb(0.0, -0.1, 1.0)
        with pytest.raises(ValueError):
            ucb(0.0, 1.0, -1.0)


class TestMaximizeAcquisition:
    def test_exploration_limit_moves_away_from_low_point(self):
        # one poor observation at the center: with a large kappa the
        # acquisition is variance-dominated away from it
        post = gp_fit([[0.5, 0.5]], [-1.0])
        best = maximize_acquisition(post, UNIT_2D, kappa=5.0, seed=0)
        assert np.linalg.norm(best - [0.5, 0.5]) >= 0.25

    def test_exploitation_limit_returns_to_high_point(self):
        post = gp_fit([[0.3, 0.7]], [1.0])
        best = maximize_acquisition(post, UNIT_2D, kappa=0.0, seed=0)
        assert np.linalg.norm(best - [0.3, 0.7]) <= 0.05

    def test_matches_dense_grid_argmax_in_1d(self):
        kernel = SquaredExponentialKernel(length_scale=0.2)
        post = gp_fit([[0.1], [0.45], [0.8]], [0.2, -0.7, 0.9], kernel)
        grid = np.linspace(0.0, 1.0, 2001)
        acq = np.array([ucb(*gp_predict(post, [g]), 2.0) for g in grid])
        best = maximize_acquisition(post, UNIT_1D, kappa=2.0, seed=1)
        assert ucb(*gp_predict(post, best), 2.0) >= acq.max() - 1e-6

    def test_result_within_bounds_and_deterministic(self):
        gen = np.random.default_rng(4)
        post = gp_fit(gen.random((6, 3)), gen.normal(size=6))
        bounds = np.array([[0.0, 1.0], [-2.0, -1.0], [5.0, 5.5]])
        a = maximize_acquisition(post, bounds, kappa=2.0, seed=7)
        b = maximize_acquisition(post, bounds, kappa=2.0, seed=7)
        assert np.array_equal(a, b)
        assert np.all(a >= bounds[:, 0]) and np.all(a <= bounds[:, 1])

    def test_bounds_validation(self):
        post = gp_fit([[0.5]], [0.0])
        with pytest.raises(ValueError):
            maximize_acquisition(post, np.array([[1.0, 0.0]]), kappa=1.0, seed=0)


class TestBayesOpt:
    def test_finds_quadratic_optimum(self):
        history = bayes_opt(
            lambda x: -((x[0] - 0.3) ** 2), UNIT_1D, t_rounds=20, kappa=2.0, seed=0
        )
        assert abs(history.best_point[0] - 0.3) <= 0.1

    def test_history_length_contract(self):
        history = bayes_opt(lambda x: float(x[0]), UNIT_1D, t_rounds=4, n_init=3, seed=1)
        assert len(history.trials) == 7

    def test_deterministic_in_seed(self):
        def objective(x):
            return float(np.sin(5 * x[0]) + x[1])

        a = bayes_opt(objective, UNIT_2D, t_rounds=5, seed=9)
        b = bayes_opt(objective, UNIT_2D, t_rounds=5, seed=9)
        assert len(a.trials) == len(b.trials)
        for (xa, va), (xb, vb) in zip(a.trials, b.trials):
            assert np.array_equal(xa, xb) and va == vb

    def test_best_value_is_running_max_and_consistent(self):
        history = bayes_opt(
            lambda x: float(-np.cos(3 * x[0])), UNIT_1D, t_rounds=6, seed=2
        )
        values = [v for _, v in history.trials]
        assert history.best_value == max(values)
        k = int(np.argmax(values))
        assert np.array_equal(history.best_point, history.trials[k][0])

    def test_all_points_inside_bounds(self):
        bounds = np.array([[-1.0, 2.0], [10.0, 11.0]])
        history = bayes_opt(lambda x: float(-x[0] ** 2), bounds, t_rounds=8, seed=3)
        for x, _ in history.trials:
            assert np.all(x >= bounds[:, 0] - 1e-12)
            assert np.all(x <= bounds[:, 1] + 1e-12)

    def test_constant_objective_does_not_crash(self):
        history = bayes_opt(lambda x: 1.0, UNIT_2D, t_rounds=5, seed=4)
        assert history.best_value == 1.0
        assert len(history.trials) == 10

    def test_objective_failure_attaches_partial_history(self):
        calls = []

        def flaky(x):
            if len(calls) >= 3:
                raise RuntimeError("boom")
            calls.append(1)
            return float(x[0])

        with pytest.raises(ObjectiveEvaluationError) as err:
            bayes_opt(flaky, UNIT_1D, t_rounds=5, n_init=5, seed=5)
        assert len(err.value.history.trials) == 3

    def test_round_and_init_validation(self):
        with pytest.raises(ValueError):
            bayes_opt(lambda x: 0.0, UNIT_1D, t_rounds=0)
        with pytest.raises(ValueError):
            bayes_opt(lambda x: 0.0, UNIT_1D, t_rounds=1, n_init=0)
