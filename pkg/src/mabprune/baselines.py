"""Cost-complexity (weakest-link) pruning baseline.

The risk of a node is its training misclassification count divided by the
number of training samples. Effective alphas are compared as exact integer
ratios so tied weakest links collapse together.
"""

from dataclasses import dataclass, field

import numpy as np

from .dataset import stratified_folds
from .metrics import MetricWeights, evaluate, performance
from .tree import TreeHyperparams, fit


@dataclass(frozen=True)
class CcpPathEntry:
    alpha: float
    n_leaves: int
    pruned_node_ids: tuple


@dataclass
class CcpResult:
    tree: object
    alpha: float
    path: list
    candidate_alphas: list = field(default_factory=list)
    cv_scores: list = field(default_factory=list)

    def to_dict(self):
        return {
            "alpha": self.alpha,
            "node_count": self.tree.node_count,
            "n_leaves": self.tree.n_leaves,
            "alpha_path": [
                {"alpha": e.alpha, "n_leaves": e.n_leaves, "pruned_node_ids": list(e.pruned_node_ids)}
                for e in self.path
            ],
            "candidate_alphas": list(self.candidate_alphas),
            "cv_scores": list(self.cv_scores),
        }


def node_counts(tree, data):
    """Per-node class counts of ``data`` routed through the current tree."""
    counts = np.zeros((tree.arena_size, tree.n_classes), dtype=np.int64)
    np.add.at(counts, (tree.apply(data.features), data.labels), 1)
    for node in reversed(tree.preorder()):
        if tree.left[node] >= 0:
            counts[node] = counts[tree.left[node]] + counts[tree.right[node]]
    return counts


def _subtree_stats(tree, errors):
    # misclassifications and leaf count of every reachable node's current subtree
    sub_err = {}
    leaves = {}
    for node in reversed(tree.preorder()):
        if tree.left[node] < 0:
            sub_err[node] = int(errors[node])
            leaves[node] = 1
        else:
            l, r = int(tree.left[node]), int(tree.right[node])
            sub_err[node] = sub_err[l] + sub_err[r]
            leaves[node] = leaves[l] + leaves[r]
    return sub_err, leaves


def _weakest(tree, errors):
    """``(num, den, nodes)``: minimal g = num/den over split nodes and its arg-set."""
    sub_err, leaves = _subtree_stats(tree, errors)
    best = None
    nodes = []
    for node, _ in tree.internal_nodes():
        num, den = int(errors[node]) - sub_err[node], leaves[node] - 1
        if best is None or num * best[1] < best[0] * den:
            best, nodes = (num, den), [node]
        elif num * best[1] == best[0] * den:
            nodes.append(node)
    if best is None:
        return None
    return best[0], best[1], nodes


def ccp_path(tree, train):
    """Weakest-link pruning sequence from the current tree down to the root.

    The first entry (alpha 0) is the input tree. Zero-alpha collapses are
    folded into the first positive step; if they alone reach the root the
    path is the single root entry.
    """
    n = len(train)
    if n == 0:
        raise ValueError("ccp_path needs training data")
    counts = node_counts(tree, train)
    errors = counts.sum(axis=1) - counts.max(axis=1)
    work = tree.clone()
    collapsed = []
    path = [CcpPathEntry(0.0, work.n_leaves, ())]
    while work.left[work.root] >= 0:
        num, den, nodes = _weakest(work, errors)
        while True:
            for node in nodes:
                if work.is_attached(node) and work.left[node] >= 0:
                    work.left[node] = -1
                    work.right[node] = -1
                    collapsed.append(node)
            nxt = _weakest(work, errors)
            if nxt is None or nxt[0] * den != num * nxt[1]:
                break
            nodes = nxt[2]
        active = tuple(sorted(c for c in collapsed if work.is_attached(c)))
        if num == 0:
            if work.left[work.root] < 0:
                path = [CcpPathEntry(0.0, 1, active)]
            continue
        path.append(CcpPathEntry(num / (den * n), work.n_leaves, active))
    return path


def subtree_for_alpha(tree, path, alpha):
    """Tree of the last path entry whose alpha does not exceed ``alpha``."""
    entry = path[0]
    for e in path:
        if e.alpha <= alpha:
            entry = e
    return tree.pruned_copy(entry.pruned_node_ids)


def ccp_select(tree, train, folds=5, weights=MetricWeights(), seed=0, positive_class=1, f1_average="binary"):
    """Choose alpha by stratified k-fold CV on the composite score.

    Candidates are midpoints between consecutive path alphas plus the final
    alpha. The final candidate stands for the root stump, so every fold tree
    is collapsed to its root for it (fold paths end at their own, different,
    root alphas). Ties go to the larger alpha.
    """
    if folds < 2:
        raise ValueError("ccp_select needs at least 2 folds")
    path = ccp_path(tree, train)
    alphas = [e.alpha for e in path]
    if len(path) == 1:
        return CcpResult(tree.pruned_copy(path[0].pruned_node_ids), alphas[0], path, [alphas[0]], [])
    candidates = [(a + b) / 2 for a, b in zip(alphas, alphas[1:])] + [alphas[-1]]
    fold_of = stratified_folds(train.labels, folds, np.random.default_rng(seed))
    hp = tree.hyperparams or TreeHyperparams()
    totals = np.zeros(len(candidates))
    for k in range(folds):
        fit_part = train.take(np.flatnonzero(fold_of != k))
        val_part = train.take(np.flatnonzero(fold_of == k))
        fold_tree = fit(fit_part, hp, seed)
        fold_path = ccp_path(fold_tree, fit_part)
        for j, a in enumerate(candidates):
            sub = subtree_for_alpha(fold_tree, fold_path, a if j < len(candidates) - 1 else np.inf)
            totals[j] += performance(evaluate(sub, val_part, positive_class, f1_average), weights)
    cv_scores = [float(s) for s in totals / folds]
    best = 0
    for j, s in enumerate(cv_scores):
        if s >= cv_scores[best]:
            best = j
    alpha = candidates[best]
    return CcpResult(subtree_for_alpha(tree, path, alpha), alpha, path, candidates, cv_scores)


def ccp_prune(tree, train, folds=5, weights=MetricWeights(), seed=0, positive_class=1, f1_average="binary"):
    return ccp_select(tree, train, folds, weights, seed, positive_class, f1_average).tree
