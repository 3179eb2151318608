import numpy as np
import pytest

from mtsparse import (
    CappedL1L1,
    Dirty,
    L1,
    L12,
    TaskDataset,
    lipschitz_constant,
    loss_gradient,
    loss_value,
    objective_value,
    penalty_value,
)

from oracles import finite_difference_gradient


def single(X, y):
    return TaskDataset([(np.asarray(X, float), np.asarray(y, float))])


def random_dataset(rng, m=3, n=8, d=5):
    return TaskDataset(
        [(rng.standard_normal((n, d)), rng.standard_normal(n)) for _ in range(m)]
    )


class TestTaskDataset:
    def test_basic_shape(self):
        data = single([[1.0, 0.5]], [2.0])
        assert data.d == 2 and data.m == 1 and data.n_per_task == (1,)

    def test_rejects_zero_column(self):
        with pytest.raises(ValueError, match="all-zero"):
            single([[1.0, 0.0], [2.0, 0.0]], [1.0, 1.0])

    def test_rejects_mismatched_feature_count(self):
        with pytest.raises(ValueError, match="feature count"):
            TaskDataset([(np.ones((2, 2)), np.ones(2)), (np.ones((2, 3)), np.ones(2))])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TaskDataset([])
        with pytest.raises(ValueError):
            single(np.ones((0, 2)), [])

    def test_rejects_bad_response_length(self):
        with pytest.raises(ValueError, match="response length"):
            single(np.ones((3, 2)), [1.0, 2.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            single([[np.nan, 1.0]], [1.0])

    def test_arrays_are_readonly(self):
        data = single([[1.0]], [1.0])
        X, y = data.tasks[0]
        with pytest.raises(ValueError):
            X[0, 0] = 5.0


class TestLossValue:
    def test_miss_by_one(self):
        assert loss_value(single([[1.0]], [1.0]), [[0.0]]) == 1.0

    def test_exact_fit(self):
        assert loss_value(single([[1.0]], [1.0]), [[1.0]]) == 0.0

    def test_two_identity_tasks(self):
        data = TaskDataset([(np.eye(2), np.ones(2)), (np.eye(2), np.ones(2))])
        assert loss_value(data, np.zeros((2, 2))) == 1.0

    def test_nonnegative_and_zero_iff_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            data = random_dataset(rng)
            W = rng.standard_normal((data.d, data.m))
            assert loss_value(data, W) >= 0.0
        X = rng.standard_normal((6, 3))
        w = rng.standard_normal(3)
        fit = TaskDataset([(X, X @ w)])
        assert loss_value(fit, w[:, None]) < 1e-28

    def test_shape_mismatch(self):
        data = single([[1.0, 2.0]], [1.0])
        with pytest.raises(ValueError, match="shape"):
            loss_value(data, np.zeros((3, 1)))


class TestLossGradient:
    def test_scalar_case(self):
        g = loss_gradient(single([[1.0]], [1.0]), [[0.0]])
        assert g.shape == (1, 1) and g[0, 0] == -2.0

    def test_zero_at_exact_fit(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((6, 4))
        w = rng.standard_normal(4)
        data = TaskDataset([(X, X @ w)])
        assert np.abs(loss_gradient(data, w[:, None])).max() < 1e-12

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        data = random_dataset(rng, m=3, n=5, d=5)
        W = rng.standard_normal((5, 3))
        G = loss_gradient(data, W)
        G_fd = finite_difference_gradient(lambda V: loss_value(data, V), W, step=1e-6)
        rel = np.abs(G - G_fd).max() / max(np.abs(G).max(), 1e-12)
        assert rel <= 1e-6

    def test_heterogeneous_sizes_match_stacked_logic(self):
        # per-task loop path vs hand computation
        rng = np.random.default_rng(3)
        X1, X2 = rng.standard_normal((4, 3)), rng.standard_normal((7, 3))
        y1, y2 = rng.standard_normal(4), rng.standard_normal(7)
        data = TaskDataset([(X1, y1), (X2, y2)])
        W = rng.standard_normal((3, 2))
        G = loss_gradient(data, W)
        assert np.allclose(G[:, 0], (2 / (2 * 4)) * X1.T @ (X1 @ W[:, 0] - y1))
        assert np.allclose(G[:, 1], (2 / (2 * 7)) * X2.T @ (X2 @ W[:, 1] - y2))


class TestObjectiveValue:
    def test_capped_rows(self):
        # zero-loss construction: W reproduces y exactly
        X = np.eye(2)
        W = np.array([[0.5], [3.0]])
        data = TaskDataset([(X, X @ W[:, 0])])
        val = objective_value(data, W, CappedL1L1(lam=2.0, theta=1.0))
        assert val == pytest.approx(3.0, abs=1e-12)

    def test_zero_weights_any_reg(self):
        rng = np.random.default_rng(4)
        data = random_dataset(rng)
        W = np.zeros((data.d, data.m))
        for reg in (CappedL1L1(1.0, 1.0), L1(2.0), L12(0.5)):
            assert objective_value(data, W, reg) == pytest.approx(loss_value(data, W))

    def test_row_group_norm(self):
        X = np.eye(2)
        W = np.array([[3.0, 4.0], [0.0, 0.0]])  # rows (3,4) and (0,0)
        data = TaskDataset([(X, X @ W[:, 0]), (X, X @ W[:, 1])])
        assert objective_value(data, W, L12(1.0)) == pytest.approx(5.0, abs=1e-12)

    def test_dirty_requires_split(self):
        data = single([[1.0]], [1.0])
        with pytest.raises(ValueError, match="split"):
            objective_value(data, [[1.0]], Dirty(1.0, 1.0))

    def test_dirty_split_value(self):
        S = np.array([[1.0, -2.0]])
        B = np.array([[0.5, 1.0]])
        val = penalty_value(S + B, Dirty(lam_s=2.0, lam_b=3.0), split=(S, B))
        assert val == pytest.approx(2.0 * 3.0 + 3.0 * 1.0)

    def test_task_permutation_invariance(self):
        rng = np.random.default_rng(5)
        data = random_dataset(rng, m=4, n=6, d=5)
        W = rng.standard_normal((5, 4))
        reg = CappedL1L1(0.7, 1.3)
        perm = rng.permutation(4)
        permuted = TaskDataset([data.tasks[i] for i in perm])
        assert objective_value(permuted, W[:, perm], reg) == pytest.approx(
            objective_value(data, W, reg), rel=1e-12
        )

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            CappedL1L1(0.0, 1.0)
        with pytest.raises(ValueError):
            CappedL1L1(1.0, -1.0)
        with pytest.raises(ValueError):
            L1(0.0)
        with pytest.raises(ValueError):
            Dirty(1.0, 0.0)


class TestLipschitz:
    def test_identity_single_task(self):
        data = TaskDataset([(np.eye(2), np.ones(2))])
        assert lipschitz_constant(data) == pytest.approx(1.0, rel=1e-9)

    def test_identity_two_tasks(self):
        data = TaskDataset([(np.eye(2), np.ones(2)), (np.eye(2), np.ones(2))])
        assert lipschitz_constant(data) == pytest.approx(0.5, rel=1e-9)

    def test_matches_svd(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((10, 4))
        data = TaskDataset([(X, rng.standard_normal(10))])
        expected = 2.0 * np.linalg.svd(X, compute_uv=False)[0] ** 2 / 10
        assert lipschitz_constant(data) == pytest.approx(expected, rel=1e-5)

    def test_bounds_gradient_differences(self):
        rng = np.random.default_rng(7)
        data = random_dataset(rng, m=2, n=9, d=6)
        L = lipschitz_constant(data)
        for _ in range(20):
            W1 = rng.standard_normal((6, 2))
            W2 = rng.standard_normal((6, 2))
            lhs = np.linalg.norm(loss_gradient(data, W1) - loss_gradient(data, W2))
            assert lhs <= L * np.linalg.norm(W1 - W2) * (1 + 1e-9)

    def test_power_iteration_cap_raises(self):
        from mtsparse import NumericalError

        rng = np.random.default_rng(8)
        data = random_dataset(rng, m=1, n=8, d=5)
        with pytest.raises(NumericalError, match="power iteration"):
            lipschitz_constant(data, tol=0.0, max_iter=1)
