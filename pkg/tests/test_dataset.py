import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mabprune.dataset import (
    Dataset,
    DatasetError,
    SplitSpec,
    SyntheticSpec,
    generate_synthetic,
    load_csv,
    sample_subset,
    save_csv,
    split,
    stratified_folds,
    subset_size,
)

from conftest import make_dataset


def write(tmp_path, text, name="d.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_counts(tmp_path):
    p = write(tmp_path, "a,b,c,y\n" + "\n".join(f"{i},{i * 2},{i % 3},{i % 2}" for i in range(5)) + "\n")
    d = load_csv(p, "y")
    assert len(d) == 5 and d.n_features == 3
    assert d.feature_names == ("a", "b", "c")
    np.testing.assert_array_equal(d.labels, [0, 1, 0, 1, 0])


def test_positive_label_forced_to_one(tmp_path):
    p = write(tmp_path, "x,y\n1,yes\n2,no\n3,no\n")
    np.testing.assert_array_equal(load_csv(p, "y", positive_label="yes").labels, [1, 0, 0])
    # lexicographic order would map "no" -> 0 anyway; force the other way
    np.testing.assert_array_equal(load_csv(p, "y", positive_label="no").labels, [0, 1, 1])


def test_numeric_target_order(tmp_path):
    p = write(tmp_path, "x,y\n1,10\n2,9\n3,10\n")
    d = load_csv(p, "y")
    assert d.class_names == ("9", "10")
    np.testing.assert_array_equal(d.labels, [1, 0, 1])


def test_categorical_feature_encoded(tmp_path):
    p = write(tmp_path, "c,y\nred,0\nblue,1\nred,1\n")
    np.testing.assert_array_equal(load_csv(p, "y").features[:, 0], [0, 1, 0])


def test_arity_error_names_row(tmp_path):
    p = write(tmp_path, "a,b,c,y\n1,2,3,0\n1,2\n")
    with pytest.raises(DatasetError, match="row 3"):
        load_csv(p, "y")


@pytest.mark.parametrize(
    "text, match",
    [
        ("", "empty"),
        ("a,y\n", "no data rows"),
        ("a,y\n1,0\n2,1\n", "'z' not in header"),
        ("a,y\n1,0\n,1\n", "missing value at row 3"),
        ("a,y\n1,0\nfoo,1\n", "row 3"),
        ("a,y\n1,0\n2,0\n", "single class"),
    ],
)
def test_load_errors(tmp_path, text, match):
    target = "z" if "'z'" in match else "y"
    with pytest.raises(DatasetError, match=match):
        load_csv(write(tmp_path, text), target)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_csv(tmp_path / "nope.csv", "y")


def test_positive_label_errors(tmp_path):
    with pytest.raises(DatasetError):
        load_csv(write(tmp_path, "x,y\n1,a\n2,b\n"), "y", positive_label="c")
    with pytest.raises(DatasetError):
        load_csv(write(tmp_path, "x,y\n1,a\n2,b\n3,c\n"), "y", positive_label="a")


def test_csv_round_trip(tmp_path, noisy_data):
    p = tmp_path / "rt.csv"
    save_csv(noisy_data, p)
    back = load_csv(p, "target")
    np.testing.assert_array_equal(back.features, noisy_data.features)
    np.testing.assert_array_equal(back.labels, noisy_data.labels)


def test_dataset_validation_and_immutability():
    d = make_dataset([[1.0], [2.0]], [0, 1])
    with pytest.raises(ValueError):
        d.features[0, 0] = 5
    with pytest.raises(DatasetError):
        Dataset(np.zeros((2, 1)), np.array([0, 2]), ("x",), 2)
    with pytest.raises(DatasetError):
        Dataset(np.zeros((2, 1)), np.array([0]), ("x",), 2)


def test_split_sizes_and_determinism():
    d = make_dataset(np.arange(100.0), [0] * 50 + [1] * 50)
    tr, te = split(d, SplitSpec(0.65, 4))
    assert (len(tr), len(te)) == (65, 35)
    assert te.holdout and not tr.holdout
    tr2, te2 = split(d, SplitSpec(0.65, 4))
    np.testing.assert_array_equal(tr.features, tr2.features)
    np.testing.assert_array_equal(te.features, te2.features)


def test_split_exact_65_35():
    d = make_dataset(np.arange(100.0), [0] * 60 + [1] * 40)
    tr, te = split(d, SplitSpec(0.65, 0))
    assert (len(tr), len(te)) == (65, 35)


@given(n0=st.integers(2, 200), n1=st.integers(2, 200), frac=st.floats(0.1, 0.9), seed=st.integers(0, 1000))
@settings(max_examples=60, deadline=None)
def test_split_is_stratified_partition(n0, n1, frac, seed):
    d = make_dataset(np.arange(n0 + n1, dtype=float), [0] * n0 + [1] * n1)
    tr, te = split(d, SplitSpec(frac, seed))
    # disjoint cover of the input rows
    assert sorted(np.concatenate([tr.features[:, 0], te.features[:, 0]])) == list(range(n0 + n1))
    for c, n in ((0, n0), (1, n1)):
        assert abs(int((tr.labels == c).sum()) - frac * n) <= 1
        assert 1 <= (te.labels == c).sum()


def test_split_rejects_singleton_class():
    with pytest.raises(DatasetError):
        split(make_dataset([1.0, 2.0, 3.0], [0, 0, 1]), SplitSpec())


@pytest.mark.parametrize("n, frac, floor, expected", [(500, 0.02, 30, 30), (5000, 0.02, 30, 100), (20, 0.5, 30, 20)])
def test_subset_size(n, frac, floor, expected):
    assert subset_size(n, frac, floor) == expected


def test_sample_subset_without_replacement(rng, noisy_data):
    s = sample_subset(noisy_data, 0.02, 30, rng)
    assert len(s) == 30
    rows = {tuple(r) for r in s.features}
    assert len(rows) == 30


def test_stratified_folds(rng):
    labels = np.array([0] * 23 + [1] * 12)
    fold = stratified_folds(labels, 5, rng)
    for k in range(5):
        assert abs((labels[fold == k] == 1).sum() - 12 / 5) <= 1
    with pytest.raises(DatasetError):
        stratified_folds(np.array([0] * 10 + [1] * 3), 5, rng)


def test_synthetic_deterministic():
    spec = SyntheticSpec(n_samples=200, class_separation=3.0, label_noise=0.0, seed=7)
    a, b = generate_synthetic(spec), generate_synthetic(spec)
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_synthetic_noise_flip_count():
    n, p = 1000, 0.1
    data, clean = generate_synthetic(SyntheticSpec(n_samples=n, label_noise=p, seed=5), return_clean_labels=True)
    flips = int((data.labels != clean).sum())
    sigma = np.sqrt(n * p * (1 - p))
    assert abs(flips - n * p) <= 3 * sigma


def test_synthetic_separation_carries_signal():
    strong = generate_synthetic(SyntheticSpec(n_samples=2000, n_informative=3, class_separation=3.0, seed=1))
    gap = strong.features[strong.labels == 1, 0].mean() - strong.features[strong.labels == 0, 0].mean()
    assert gap == pytest.approx(3.0, abs=0.2)
    flat = generate_synthetic(SyntheticSpec(n_samples=2000, class_separation=0.0, seed=1))
    gap = flat.features[flat.labels == 1].mean(axis=0) - flat.features[flat.labels == 0].mean(axis=0)
    assert np.all(np.abs(gap) < 0.2)


def test_synthetic_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(n_features=3, n_informative=4)
    with pytest.raises(ValueError):
        SyntheticSpec(label_noise=0.5)
