"""Classification metrics and the composite score used by every pruning
method: ``alpha * accuracy - beta * scaled_log_loss + gamma * f1``."""

import math
from dataclasses import dataclass

import numpy as np

PROBA_EPS = 1e-15


class LeakError(RuntimeError):
    """A holdout (test) split was evaluated outside the final assessment."""


@dataclass(frozen=True)
class MetricWeights:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 2.5

    def __post_init__(self):
        if not all(math.isfinite(w) for w in (self.alpha, self.beta, self.gamma)):
            raise ValueError("metric weights must be finite")

    @property
    def max_delta(self):
        """Bound on |delta_score| when every metric lies in [0, 1]."""
        return abs(self.alpha) + abs(self.beta) + abs(self.gamma)


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    scaled_log_loss: float
    f1: float

    def __post_init__(self):
        for name in ("accuracy", "scaled_log_loss", "f1"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


def _pair(predictions, labels):
    p = np.asarray(predictions)
    y = np.asarray(labels)
    if p.shape != y.shape:
        raise ValueError(f"length mismatch: {p.shape[0]} predictions vs {y.shape[0]} labels")
    if p.size == 0:
        raise ValueError("metrics need at least one sample")
    return p, y


def accuracy(predictions, labels):
    p, y = _pair(predictions, labels)
    return float(np.mean(p == y))


def scaled_log_loss(probas, labels):
    """Cross-entropy divided by ln K and capped at 1, so a uniform guess scores 1."""
    probas = np.asarray(probas, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if probas.ndim != 2 or probas.shape[0] != y.shape[0]:
        raise ValueError("probas must be an (n, K) matrix matching labels")
    if y.size == 0:
        raise ValueError("metrics need at least one sample")
    if np.any(np.abs(probas.sum(axis=1) - 1.0) > 1e-9):
        raise ValueError("probability rows must sum to 1")
    return _scaled_loss(probas[np.arange(y.shape[0]), y], probas.shape[1])


def _scaled_loss(p_true, n_classes):
    p_true = np.clip(p_true, PROBA_EPS, 1.0 - PROBA_EPS)
    raw = -float(np.mean(np.log(p_true)))
    return min(1.0, max(0.0, raw / math.log(n_classes)))


def _binary_f1(p, y, positive):
    tp = int(np.sum((p == positive) & (y == positive)))
    fp = int(np.sum((p == positive) & (y != positive)))
    fn = int(np.sum((p != positive) & (y == positive)))
    if tp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return 2.0 * precision * recall / (precision + recall)


def f1(predictions, labels, positive_class=1, average="binary"):
    """F1 of ``positive_class``; ``average="weighted"`` gives support-weighted macro F1."""
    p, y = _pair(predictions, labels)
    if average == "binary":
        return _binary_f1(p, y, positive_class)
    if average == "weighted":
        classes, support = np.unique(y, return_counts=True)
        scores = [_binary_f1(p, y, c) for c in classes]
        return float(np.dot(scores, support) / support.sum())
    raise ValueError(f"unknown F1 average {average!r}")


def performance(e, w=MetricWeights()):
    return w.alpha * e.accuracy - w.beta * e.scaled_log_loss + w.gamma * e.f1


def delta_score(before, after, w=MetricWeights()):
    """Weighted change from ``before`` to ``after``; equals the performance difference."""
    return (
        w.alpha * (after.accuracy - before.accuracy)
        + w.gamma * (after.f1 - before.f1)
        - w.beta * (after.scaled_log_loss - before.scaled_log_loss)
    )


def evaluate(tree, data, positive_class=1, average="binary", allow_holdout=False):
    """Accuracy, scaled log loss and F1 of ``tree`` on ``data`` from one routing pass.

    Holdout data raises :class:`LeakError` unless ``allow_holdout`` is set,
    which only the final test-set assessment does.
    """
    if data.holdout and not allow_holdout:
        raise LeakError("refusing to evaluate on the holdout split during training or pruning")
    if len(data) == 0:
        raise ValueError("cannot evaluate on an empty dataset")
    leaves = tree.apply(data.features)
    y = data.labels
    pred = tree.majority[leaves]
    p_true = tree.value[leaves, y]
    return EvalResult(
        accuracy=float(np.mean(pred == y)),
        scaled_log_loss=_scaled_loss(p_true, tree.n_classes),
        f1=f1(pred, y, positive_class, average),
    )
