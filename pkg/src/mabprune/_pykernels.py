"""NumPy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable, and as the
parity reference for it. Signatures and results match ``_kernels.pyx``.
"""

import math

import numpy as np

from ._special import beta_quantile, kl_ucb_bound

NAME = "python"


def route(X, left, right, feature, threshold, root):
    """Leaf id reached by every row of ``X`` (go left iff value <= threshold)."""
    n = X.shape[0]
    node = np.full(n, root, dtype=np.int64)
    rows = np.arange(n)
    active = left[node] >= 0
    while active.any():
        r = rows[active]
        cur = node[r]
        go_left = X[r, feature[cur]] <= threshold[cur]
        node[r] = np.where(go_left, left[cur], right[cur])
        active[r] = left[node[r]] >= 0
    return node


def best_split(X, y, idx, n_classes, min_leaf):
    """Best Gini split of the samples ``idx``.

    Returns ``(feature, threshold, score)`` where score is
    sum_c n_Lc^2 / n_L + sum_c n_Rc^2 / n_R (larger is purer); feature is -1
    when no admissible split exists. Ties keep the lowest feature, then the
    lowest threshold.
    """
    n = idx.shape[0]
    best_f, best_thr, best_score = -1, 0.0, -math.inf
    if n < 2 * min_leaf or n < 2:
        return best_f, best_thr, best_score
    ysub = y[idx]
    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), ysub] = 1
    total = onehot.sum(axis=0)
    n_left = np.arange(1, n, dtype=np.int64)
    n_right = n - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)
    nl = n_left.astype(np.float64)
    nr = n_right.astype(np.float64)
    for f in range(X.shape[1]):
        xs = X[idx, f]
        order = np.argsort(xs, kind="stable")
        xs = xs[order]
        cl = np.cumsum(onehot[order], axis=0)[:-1]
        cr = total - cl
        score = (cl * cl).sum(axis=1) / nl + (cr * cr).sum(axis=1) / nr
        valid = size_ok & (xs[1:] > xs[:-1])
        if not valid.any():
            continue
        score = np.where(valid, score, -math.inf)
        i = int(np.argmax(score))
        if score[i] > best_score:
            a, b = float(xs[i]), float(xs[i + 1])
            thr = (a + b) * 0.5
            if thr >= b:
                thr = a
            best_f, best_thr, best_score = f, thr, float(score[i])
    return best_f, best_thr, best_score


def kl_ucb_batch(means, plays, log_t, tol):
    return np.array(
        [kl_ucb_bound(float(m), float(n), log_t, tol) for m, n in zip(means, plays)],
        dtype=np.float64,
    )


def beta_quantile_batch(a, b, level, tol):
    return np.array(
        [beta_quantile(float(x), float(y), level, tol) for x, y in zip(a, b)],
        dtype=np.float64,
    )
