"""Score-matrix statistics: means, average-tie mean ranks and paired t-tests."""

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._special import betainc


class InsufficientPairsError(ValueError):
    """Fewer than two paired observations."""


class ZeroVarianceError(ValueError):
    """All paired differences are identical; the t statistic is degenerate."""


@dataclass(frozen=True)
class ScoreMatrix:
    datasets: tuple
    methods: tuple
    scores: np.ndarray

    def __post_init__(self):
        scores = np.array(self.scores, dtype=np.float64)
        datasets, methods = tuple(self.datasets), tuple(self.methods)
        if scores.shape != (len(datasets), len(methods)):
            raise ValueError(f"score matrix shape {scores.shape} does not match {len(datasets)}x{len(methods)} names")
        if not np.all(np.isfinite(scores)):
            raise ValueError("score matrix has missing or non-finite entries")
        scores.flags.writeable = False
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "datasets", datasets)
        object.__setattr__(self, "methods", methods)

    def column(self, method):
        return self.scores[:, self.method_index(method)]

    def method_index(self, method):
        lowered = [m.lower() for m in self.methods]
        try:
            return lowered.index(method.lower())
        except ValueError:
            raise KeyError(f"method {method!r} not in {self.methods}") from None

    @classmethod
    def read_csv(cls, path):
        """Rows are datasets, columns are methods; the first column holds dataset names."""
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if len(rows) < 2:
            raise ValueError(f"{path}: need a header and at least one dataset row")
        methods = [h.strip() for h in rows[0][1:]]
        datasets, scores = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if len(row) != len(methods) + 1:
                raise ValueError(f"{path}: row {lineno} has {len(row) - 1} scores, expected {len(methods)}")
            datasets.append(row[0].strip())
            try:
                scores.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise ValueError(f"{path}: row {lineno}: {exc}") from None
        return cls(tuple(datasets), tuple(methods), np.array(scores))

    def write_csv(self, path, digits=None):
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["dataset"] + list(self.methods))
            for name, row in zip(self.datasets, self.scores):
                writer.writerow([name] + [_fmt(v, digits) for v in row])


def _fmt(v, digits):
    return repr(float(v)) if digits is None else f"{v:.{digits}f}"


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    p_value: float
    df: int
    mean_improvement_pct: float
    mean_a: float
    mean_b: float


def student_t_two_tailed_p(t, df):
    """Two-tailed Student-t p-value, ``I_{df/(df+t^2)}(df/2, 1/2)``."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    if t2 < df:
        # complementary form keeps precision when df / (df + t^2) rounds to 1
        p = 1.0 - betainc(0.5, df / 2.0, t2 / (df + t2))
    else:
        p = betainc(df / 2.0, 0.5, df / (df + t2))
    return min(1.0, max(0.0, p))


def paired_t_test(a, b):
    """Paired t-test on ``b - a``; improvement is ``mean(b)/mean(a) - 1`` in percent."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    n = a.shape[0]
    if n < 2:
        raise InsufficientPairsError(f"paired t-test needs at least 2 pairs, got {n}")
    d = b - a
    mean_d = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd <= 1e-12 * max(1.0, abs(mean_d)):
        raise ZeroVarianceError("paired differences have zero variance")
    t = mean_d / (sd / math.sqrt(n))
    mean_a, mean_b = float(a.mean()), float(b.mean())
    return TTestResult(
        t_statistic=t,
        p_value=student_t_two_tailed_p(t, n - 1),
        df=n - 1,
        mean_improvement_pct=(mean_b / mean_a - 1.0) * 100.0,
        mean_a=mean_a,
        mean_b=mean_b,
    )


def average_ranks(values):
    """Rank 1 = largest; tied values share the mean of their positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(-values, kind="stable")
    ranks = np.empty(values.shape[0])
    i = 0
    while i < order.shape[0]:
        j = i
        while j + 1 < order.shape[0] and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def mean_ranks(m, decimals=3):
    """``[(method, mean_rank)]`` ascending; scores are compared after rounding."""
    ranks = np.array([average_ranks(np.round(row, decimals)) for row in m.scores])
    means = ranks.mean(axis=0)
    order = sorted(range(len(m.methods)), key=lambda j: (means[j], j))
    return [(m.methods[j], float(means[j])) for j in order]


def mean_scores(m):
    """``(per_method, per_dataset)`` arithmetic means as name -> value dicts."""
    per_method = dict(zip(m.methods, (float(v) for v in m.scores.mean(axis=0))))
    per_dataset = dict(zip(m.datasets, (float(v) for v in m.scores.mean(axis=1))))
    return per_method, per_dataset


def compare_to_baseline(m, baseline, exclude=()):
    """Paired t-test of every other method against ``baseline``.

    Returns ``[(method, TTestResult or reason-string)]``; degenerate tests are
    reported as "insufficient pairs" or "zero variance".
    """
    skip = {baseline.lower()} | {e.lower() for e in exclude}
    base = m.column(baseline)
    rows = []
    for j, method in enumerate(m.methods):
        if method.lower() in skip:
            continue
        try:
            rows.append((method, paired_t_test(base, m.scores[:, j])))
        except InsufficientPairsError:
            rows.append((method, "insufficient pairs"))
        except ZeroVarianceError:
            rows.append((method, "zero variance"))
    return rows
