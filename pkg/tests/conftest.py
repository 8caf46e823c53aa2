import numpy as np
import pytest

from mabprune.dataset import Dataset
from mabprune.tree import DecisionTree, TreeHyperparams

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


def make_dataset(X, y, n_classes=None, holdout=False):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    k = n_classes or max(2, int(y.max()) + 1)
    return Dataset(X, y, tuple(f"x{i}" for i in range(X.shape[1])), k, holdout=holdout)


def perfect_tree(depth, n_classes=2):
    """Complete binary tree in heap order; leaf ``i`` holds one sample of class ``i % n_classes``."""
    size = 2 ** (depth + 1) - 1
    first_leaf = 2**depth - 1
    left = [2 * i + 1 if i < first_leaf else -1 for i in range(size)]
    right = [2 * i + 2 if i < first_leaf else -1 for i in range(size)]
    node_depth = [int(np.floor(np.log2(i + 1))) for i in range(size)]
    counts = np.zeros((size, n_classes), dtype=int)
    for i in range(first_leaf, size):
        counts[i, (i - first_leaf) % n_classes] = 1
    for i in reversed(range(first_leaf)):
        counts[i] = counts[2 * i + 1] + counts[2 * i + 2]
    return DecisionTree(left, right, [0] * size, np.arange(size) * 0.5, node_depth, counts, 1, TreeHyperparams(max(depth, 1), 1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def noisy_data():
    from mabprune.dataset import SyntheticSpec, generate_synthetic

    return generate_synthetic(SyntheticSpec(n_samples=600, n_features=6, n_informative=3, class_separation=1.0, label_noise=0.1, seed=3))
