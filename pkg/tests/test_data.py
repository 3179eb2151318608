import numpy as np
import pytest

from mtsparse import (
    SyntheticSpec,
    generate_synthetic,
    kfold_indices,
    load_csv,
    split_train_test,
)


class TestGenerateSynthetic:
    def test_exact_zero_row_count(self):
        inst = generate_synthetic(SyntheticSpec(m=3, n=12, d=10, sigma=0.1, seed=0))
        zero_rows = int((np.abs(inst.true_weights).sum(axis=1) == 0).sum())
        assert zero_rows == 9  # round(0.9 * 10); survivors keep >= 1 entry here

    def test_within_row_zero_count(self):
        spec = SyntheticSpec(m=5, n=10, d=20, sigma=0.0, seed=1)
        inst = generate_synthetic(spec)
        # 18 rows zeroed, 2 survive; pool of 2 x 5 = 10 entries loses
        # round(0.8 * 10) = 8, so exactly 2 nonzero entries remain
        assert int((inst.true_weights != 0).sum()) == 2

    def test_noiseless_residuals_vanish(self):
        inst = generate_synthetic(SyntheticSpec(m=2, n=8, d=6, sigma=0.0, seed=2))
        for i, (X, y) in enumerate(inst.data.tasks):
            assert np.abs(X @ inst.true_weights[:, i] - y).max() == 0.0

    def test_same_seed_bit_identical(self):
        spec = SyntheticSpec(m=2, n=6, d=5, sigma=0.3, seed=7)
        a = generate_synthetic(spec)
        b = generate_synthetic(spec)
        assert np.array_equal(a.true_weights, b.true_weights)
        for (Xa, ya), (Xb, yb) in zip(a.data.tasks, b.data.tasks):
            assert np.array_equal(Xa, Xb) and np.array_equal(ya, yb)

    def test_different_seeds_differ(self):
        a = generate_synthetic(SyntheticSpec(m=1, n=6, d=5, sigma=0.0, seed=0))
        b = generate_synthetic(SyntheticSpec(m=1, n=6, d=5, sigma=0.0, seed=1))
        assert not np.array_equal(a.data.tasks[0][0], b.data.tasks[0][0])

    def test_unit_column_norms(self):
        inst = generate_synthetic(SyntheticSpec(m=3, n=9, d=7, sigma=0.2, seed=3))
        for X, _ in inst.data.tasks:
            assert np.abs(np.linalg.norm(X, axis=0) - 1.0).max() <= 1e-12

    def test_responses_compose_signal_plus_noise(self):
        inst = generate_synthetic(SyntheticSpec(m=2, n=8, d=6, sigma=0.5, seed=4))
        for i, (X, y) in enumerate(inst.data.tasks):
            assert np.allclose(y, X @ inst.true_weights[:, i] + inst.noise[i])

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SyntheticSpec(m=0, n=5, d=5, sigma=0.1)
        with pytest.raises(ValueError):
            SyntheticSpec(m=1, n=5, d=5, sigma=-0.1)
        with pytest.raises(ValueError):
            SyntheticSpec(m=1, n=5, d=5, sigma=0.1, zero_row_fraction=1.5)
        with pytest.raises(ValueError):
            SyntheticSpec(m=1, n=5, d=5, sigma=0.1, coef_low=2.0, coef_high=1.0)


def write_csv(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadCsv:
    def test_two_task_file(self, tmp_path):
        path = write_csv(
            tmp_path,
            "task,y,x1,x2\n"
            "a,1.0,0.5,1.5\n"
            "a,2.0,1.0,2.0\n"
            "a,3.5,2.5,0.5\n"
            "b,1.5,2.0,1.0\n"
            "b,-2e0,0.25,1.25\n"
            "b,0.5,1.75,2.25\n",
        )
        data = load_csv(path)
        assert data.m == 2 and data.d == 2 and data.n_per_task == (3, 3)
        assert data.tasks[0][1][1] == 2.0
        assert data.tasks[1][1][1] == -2.0

    def test_non_numeric_cell_names_line(self, tmp_path):
        path = write_csv(tmp_path, "task,y,x1\na,1.0,0.5\na,oops,0.5\n")
        with pytest.raises(ValueError, match="line 3"):
            load_csv(path)

    def test_inconsistent_width_names_line(self, tmp_path):
        path = write_csv(tmp_path, "task,y,x1,x2\na,1.0,0.5,0.5\na,1.0,0.5\n")
        with pytest.raises(ValueError, match="line 3"):
            load_csv(path)

    def test_unknown_header(self, tmp_path):
        path = write_csv(tmp_path, "id,y,x1\na,1.0,0.5\n")
        with pytest.raises(ValueError, match="line 1"):
            load_csv(path)

    def test_misnamed_feature_columns(self, tmp_path):
        path = write_csv(tmp_path, "task,y,f1,f2\na,1.0,0.5,0.5\n")
        with pytest.raises(ValueError, match="x1"):
            load_csv(path)

    def test_no_rows(self, tmp_path):
        path = write_csv(tmp_path, "task,y,x1\n")
        with pytest.raises(ValueError, match="no data rows"):
            load_csv(path)

    def test_missing_value_rejected(self, tmp_path):
        path = write_csv(tmp_path, "task,y,x1\na,1.0,\n")
        with pytest.raises(ValueError, match="line 2"):
            load_csv(path)

    def test_scientific_notation_accepted(self, tmp_path):
        path = write_csv(tmp_path, "task,y,x1\na,1e-3,2.5E+1\na,2.0,1.0\n")
        data = load_csv(path)
        assert data.tasks[0][1][0] == 1e-3
        assert data.tasks[0][0][0, 0] == 25.0

    def test_task_order_is_first_appearance(self, tmp_path):
        path = write_csv(
            tmp_path,
            "task,y,x1\nz,1.0,1.0\na,2.0,2.0\nz,3.0,3.0\na,4.0,4.0\n",
        )
        data = load_csv(path)
        assert np.array_equal(data.tasks[0][1], [1.0, 3.0])
        assert np.array_equal(data.tasks[1][1], [2.0, 4.0])


class TestSplitTrainTest:
    def make(self, seed=0, sizes=(100, 40)):
        rng = np.random.default_rng(seed)
        from mtsparse import TaskDataset

        return TaskDataset(
            [(rng.standard_normal((n, 3)), rng.standard_normal(n)) for n in sizes]
        )

    def test_sizes(self):
        train, test = split_train_test(self.make(), 0.15, seed=0)
        assert train.n_per_task == (15, 6)
        assert test.n_per_task == (85, 34)

    def test_two_sample_half_split(self):
        data = self.make(sizes=(2,))
        train, test = split_train_test(data, 0.5, seed=1)
        assert train.n_per_task == (1,) and test.n_per_task == (1,)

    def test_deterministic(self):
        data = self.make()
        a_train, a_test = split_train_test(data, 0.2, seed=3)
        b_train, b_test = split_train_test(data, 0.2, seed=3)
        for (Xa, ya), (Xb, yb) in zip(a_train.tasks, b_train.tasks):
            assert np.array_equal(Xa, Xb) and np.array_equal(ya, yb)

    def test_partition(self):
        data = self.make()
        train, test = split_train_test(data, 0.3, seed=4)
        for (X, y), (Xtr, ytr), (Xte, yte) in zip(data.tasks, train.tasks, test.tasks):
            together = np.sort(np.concatenate([ytr, yte]))
            assert np.array_equal(together, np.sort(y))

    def test_rejects_single_sample_task(self):
        data = self.make(sizes=(5, 1))
        with pytest.raises(ValueError, match="fewer than 2"):
            split_train_test(data, 0.5, seed=0)

    def test_rejects_bad_ratio(self):
        with pytest.raises(ValueError):
            split_train_test(self.make(), 0.0, seed=0)
        with pytest.raises(ValueError):
            split_train_test(self.make(), 1.0, seed=0)


class TestKfoldIndices:
    def test_even_split(self):
        folds = kfold_indices(9, 3, seed=0)
        assert [len(f) for f in folds] == [3, 3, 3]

    def test_uneven_split(self):
        folds = kfold_indices(10, 3, seed=0)
        assert sorted(len(f) for f in folds) == [3, 3, 4]
        assert len(folds[0]) == 4  # the extra sample goes to the first fold

    def test_partition_property(self):
        folds = kfold_indices(17, 4, seed=5)
        merged = np.sort(np.concatenate(folds))
        assert np.array_equal(merged, np.arange(17))

    def test_deterministic(self):
        a = kfold_indices(12, 3, seed=9)
        b = kfold_indices(12, 3, seed=9)
        for fa, fb in zip(a, b):
            assert np.array_equal(fa, fb)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            kfold_indices(2, 3, seed=0)
        with pytest.raises(ValueError):
            kfold_indices(5, 1, seed=0)
