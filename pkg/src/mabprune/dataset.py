"""Tabular classification data: CSV ingestion, stratified splitting,
evaluation subsets and a synthetic generator."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed input data."""


@dataclass(frozen=True)
class Dataset:
    """Feature matrix with integer class labels in ``[0, n_classes)``.

    ``holdout`` marks a test split. Pruning and model selection refuse to
    evaluate on holdout data; see :func:`mabprune.metrics.evaluate`.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple
    n_classes: int
    class_names: tuple = ()
    holdout: bool = False

    def __post_init__(self):
        features = np.ascontiguousarray(self.features, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if features.ndim != 2:
            raise DatasetError("features must be a 2-d matrix")
        if labels.ndim != 1 or labels.shape[0] != features.shape[0]:
            raise DatasetError(
                f"features have {features.shape[0]} rows but labels has {labels.shape[0]} entries"
            )
        if self.n_classes < 2:
            raise DatasetError("a classification dataset needs at least 2 classes")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise DatasetError(f"labels must lie in [0, {self.n_classes})")
        names = tuple(self.feature_names)
        if len(names) != features.shape[1]:
            raise DatasetError("feature_names does not match the number of columns")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    def __len__(self):
        return self.labels.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def take(self, indices, holdout=None):
        """Row subset as a new Dataset (holdout flag inherited unless given)."""
        indices = np.asarray(indices, dtype=np.int64)
        return Dataset(
            self.features[indices],
            self.labels[indices],
            self.feature_names,
            self.n_classes,
            self.class_names,
            self.holdout if holdout is None else holdout,
        )


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.65
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie strictly between 0 and 1")


@dataclass(frozen=True)
class SyntheticSpec:
    n_samples: int = 1000
    n_features: int = 10
    n_informative: int = 5
    class_separation: float = 1.0
    label_noise: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1 or self.n_features < 1:
            raise ValueError("n_samples and n_features must be positive")
        if not 0 <= self.n_informative <= self.n_features:
            raise ValueError("n_informative must lie in [0, n_features]")
        if self.class_separation < 0:
            raise ValueError("class_separation must be nonnegative")
        if not 0.0 <= self.label_noise < 0.5:
            raise ValueError("label_noise must lie in [0, 0.5)")


def _as_float(text):
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def _class_order(values):
    distinct = set(values)
    numeric = {v: _as_float(v) for v in distinct}
    if all(x is not None for x in numeric.values()):
        return sorted(distinct, key=lambda v: (numeric[v], v))
    return sorted(distinct)


def load_csv(path, target_column, positive_label=None):
    """Read a CSV file with a header row into a :class:`Dataset`.

    A feature column whose first cell parses as a number is numeric and every
    later cell must parse too; otherwise the column is label-encoded in
    first-appearance order. Target classes are ordered numerically when all
    values are numbers, lexicographically otherwise. ``positive_label``
    forces that class to index 1 in a binary problem.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such data file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path}: header present but no data rows")
    if target_column not in header:
        raise DatasetError(f"{path}: target column {target_column!r} not in header {header}")
    width = len(header)
    for lineno, row in enumerate(body, start=2):
        if len(row) != width:
            raise DatasetError(
                f"{path}: row {lineno} has {len(row)} cells, header has {width}"
            )
    target_idx = header.index(target_column)
    feature_idx = [j for j in range(width) if j != target_idx]

    columns = []
    for j in feature_idx:
        cells = [row[j].strip() for row in body]
        for lineno, cell in enumerate(cells, start=2):
            if cell == "":
                raise DatasetError(f"{path}: missing value at row {lineno}, column {header[j]!r}")
        if _as_float(cells[0]) is not None:
            col = []
            for lineno, cell in enumerate(cells, start=2):
                value = _as_float(cell)
                if value is None:
                    raise DatasetError(
                        f"{path}: cannot parse {cell!r} as a number at row {lineno}, column {header[j]!r}"
                    )
                col.append(value)
        else:
            codes = {}
            col = [float(codes.setdefault(cell, len(codes))) for cell in cells]
        columns.append(col)

    targets = [row[target_idx].strip() for row in body]
    for lineno, cell in enumerate(targets, start=2):
        if cell == "":
            raise DatasetError(f"{path}: missing target at row {lineno}")
    classes = _class_order(targets)
    if positive_label is not None:
        positive_label = str(positive_label)
        if positive_label not in classes:
            raise DatasetError(f"{path}: positive_label {positive_label!r} not among classes {classes}")
        if len(classes) != 2:
            raise DatasetError(f"{path}: positive_label requires a binary target, found {len(classes)} classes")
        classes = [c for c in classes if c != positive_label] + [positive_label]
    if len(classes) < 2:
        raise DatasetError(f"{path}: target column {target_column!r} has a single class")
    lookup = {c: i for i, c in enumerate(classes)}

    features = np.array(columns, dtype=np.float64).T.reshape(len(body), len(feature_idx))
    labels = np.array([lookup[t] for t in targets], dtype=np.int64)
    return Dataset(features, labels, tuple(header[j] for j in feature_idx), len(classes), tuple(classes))


def save_csv(data, path, target_column="target"):
    """Write ``data`` as CSV; numeric values use round-trip ``repr`` formatting."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(data.feature_names) + [target_column])
        for x, y in zip(data.features, data.labels):
            writer.writerow([repr(float(v)) for v in x] + [int(y)])


def _allocate(sizes, fraction):
    # round(fraction * n) in total, shared out by largest remainder (ties to lower class)
    quota = np.asarray(sizes, dtype=np.float64) * fraction
    k = np.floor(quota).astype(np.int64)
    short = int(math.floor(fraction * int(np.sum(sizes)) + 0.5)) - int(k.sum())
    order = sorted(range(len(sizes)), key=lambda c: (-(quota[c] - k[c]), c))
    for c in order[:short]:
        k[c] += 1
    return np.clip(k, 1, np.asarray(sizes) - 1)


def split(data, spec, mark_holdout=True):
    """Stratified train/test split; returns ``(train, test)``.

    The training side gets ``round(train_fraction * n)`` samples, shared among
    classes by largest remainder so each class is within one sample of its
    proportional share (and keeps at least one sample per side). The test
    side is flagged holdout unless ``mark_holdout`` is false (for carving
    validation data out of a training split).
    """
    if len(data) == 0:
        raise DatasetError("cannot split an empty dataset")
    rng = np.random.default_rng(spec.seed)
    groups = []
    for c in range(data.n_classes):
        members = np.flatnonzero(data.labels == c)
        if members.size == 0:
            continue
        if members.size < 2:
            raise DatasetError(f"class {c} has {members.size} sample; stratified split needs at least 2")
        groups.append(rng.permutation(members))
    sizes = [g.size for g in groups]
    train_idx, test_idx = [], []
    for members, k in zip(groups, _allocate(sizes, spec.train_fraction)):
        train_idx.append(members[:k])
        test_idx.append(members[k:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    return data.take(train_idx, holdout=False), data.take(test_idx, holdout=mark_holdout)


def subset_size(n, fraction, floor):
    return min(n, max(floor, int(round(fraction * n))))


def sample_subset(data, fraction, floor, rng):
    """Uniform sample without replacement of ``max(floor, round(fraction*n))`` rows, capped at n."""
    if len(data) == 0:
        raise DatasetError("cannot subsample an empty dataset")
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    k = subset_size(len(data), fraction, floor)
    return data.take(np.sort(rng.choice(len(data), size=k, replace=False)))


def stratified_folds(labels, k, rng):
    """Assign every sample to one of ``k`` folds, dealing each class round-robin."""
    labels = np.asarray(labels)
    fold = np.empty(labels.shape[0], dtype=np.int64)
    for c in np.unique(labels):
        members = rng.permutation(np.flatnonzero(labels == c))
        if members.size < k:
            raise DatasetError(f"class {c} has {members.size} samples, fewer than {k} folds")
        fold[members] = np.arange(members.size) % k
    return fold


def generate_synthetic(spec, return_clean_labels=False):
    """Two Gaussian clusters whose informative coordinates have means +-separation/2.

    Non-informative features are standard normal noise. A ``label_noise``
    fraction of labels is flipped independently. With
    ``return_clean_labels`` the pre-noise labels are returned as well.
    """
    rng = np.random.default_rng(spec.seed)
    clean = rng.integers(0, 2, size=spec.n_samples)
    features = rng.standard_normal((spec.n_samples, spec.n_features))
    shift = np.where(clean == 1, 0.5, -0.5) * spec.class_separation
    features[:, : spec.n_informative] += shift[:, None]
    flip = rng.random(spec.n_samples) < spec.label_noise
    labels = np.where(flip, 1 - clean, clean)
    names = tuple(f"x{j}" for j in range(spec.n_features))
    data = Dataset(features, labels, names, 2, ("0", "1"))
    if return_clean_labels:
        return data, clean.astype(np.int64)
    return data
