import numpy as np
import pytest

from mtsparse import amse, lpq_norm, nmse, param_error_l21


class TestLpqNorm:
    def test_row_21(self):
        M = [[3.0, 4.0], [0.0, 0.0]]
        # rows have l1 norms (7, 0); outer l2 gives sqrt(49)
        assert lpq_norm(M, 2, 1, "rows") == pytest.approx(7.0)

    def test_column_convention_single_column(self):
        assert lpq_norm([[3.0], [4.0]], 1, 2, "columns") == pytest.approx(5.0)

    def test_max_abs(self):
        assert lpq_norm([[-2.0, 1.0], [0.0, 3.0]], np.inf, np.inf) == 3.0

    def test_entrywise_sum(self):
        assert lpq_norm([[1.0, -1.0], [2.0, 0.0]], 1, 1) == 4.0

    def test_invalid_exponent(self):
        with pytest.raises(ValueError):
            lpq_norm([[1.0]], 0.5, 1)
        with pytest.raises(ValueError):
            lpq_norm([[1.0]], 1, 0.0)

    def test_invalid_axis(self):
        with pytest.raises(ValueError):
            lpq_norm([[1.0]], 1, 2, "diagonal")


class TestParamErrorL21:
    def test_zero_at_equality(self):
        W = np.arange(6.0).reshape(3, 2)
        assert param_error_l21(W, W) == 0.0

    def test_single_column(self):
        assert param_error_l21([[3.0], [4.0]], [[0.0], [0.0]]) == pytest.approx(5.0)

    def test_two_unit_columns(self):
        A = np.zeros((3, 2))
        B = np.zeros((3, 2))
        B[0, 0] = 1.0
        B[2, 1] = 1.0
        assert param_error_l21(A, B) == pytest.approx(2.0)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            param_error_l21(np.zeros((2, 2)), np.zeros((3, 2)))

    def test_metric_axioms_on_random_triples(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            A, B, C = (rng.standard_normal((4, 3)) for _ in range(3))
            dab = param_error_l21(A, B)
            assert dab == pytest.approx(param_error_l21(B, A))
            assert dab >= 0.0
            assert (dab == 0.0) == np.array_equal(A, B)
            assert dab <= param_error_l21(A, C) + param_error_l21(C, B) + 1e-12


class TestNmse:
    def test_perfect_predictions(self):
        y = np.array([1.0, 2.0, 3.0, 4.0])
        assert nmse(y, y, [2, 2]) == 0.0

    def test_mean_predictor_scores_one(self):
        rng = np.random.default_rng(1)
        a1 = rng.standard_normal(5)
        a2 = rng.standard_normal(3) + 2
        preds = np.concatenate([np.full(5, a1.mean()), np.full(3, a2.mean())])
        actual = np.concatenate([a1, a2])
        assert nmse(preds, actual, [5, 3]) == pytest.approx(1.0, abs=1e-12)

    def test_worked_two_task_example(self):
        # hand-checkable: task 1 mse 0.25 var 1, task 2 mse 1 var 4
        preds = np.array([1.5, 2.5, 1.0, 5.0])
        actual = np.array([1.0, 3.0, 2.0, 6.0])
        expected = (2 * (0.25 / 1.0) + 2 * (1.0 / 4.0)) / 4
        assert nmse(preds, actual, [2, 2]) == pytest.approx(expected)

    def test_zero_variance_rejected(self):
        with pytest.raises(ValueError, match="variance"):
            nmse([1.0, 1.0], [2.0, 2.0], [2])

    def test_misaligned_sizes_rejected(self):
        with pytest.raises(ValueError):
            nmse([1.0, 2.0], [1.0, 2.0], [3])


class TestAmse:
    def test_perfect_predictions(self):
        y = np.array([1.0, -2.0, 3.0])
        assert amse(y, y, [3]) == 0.0

    def test_zero_predictor_scores_one(self):
        rng = np.random.default_rng(2)
        a = rng.standard_normal(7) + 1
        assert amse(np.zeros(7), a, [7]) == pytest.approx(1.0, abs=1e-12)

    def test_worked_two_task_example(self):
        preds = np.array([1.5, 2.5, 1.0, 5.0])
        actual = np.array([1.0, 3.0, 2.0, 6.0])
        ms1 = (1.0 + 9.0) / 2
        ms2 = (4.0 + 36.0) / 2
        expected = (2 * (0.25 / ms1) + 2 * (1.0 / ms2)) / 4
        assert amse(preds, actual, [2, 2]) == pytest.approx(expected)

    def test_all_zero_targets_rejected(self):
        with pytest.raises(ValueError, match="all zero"):
            amse([1.0], [0.0], [1])
