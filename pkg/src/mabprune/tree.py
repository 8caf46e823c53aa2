"""CART classification trees stored as a node arena, with reversible
branch-to-leaf pruning.

Nodes are addressed by integer ids assigned in preorder at fit time. Pruning a
node only detaches its children (their records stay in the arena), so a
:class:`PruneToken` can reattach them in O(1).
"""

import hashlib
import itertools
import json
from dataclasses import dataclass

import numpy as np

from ._backend import kernels

# Root sits at depth 0; "prune only below level three" means depth > 3.
ROOT_DEPTH = 0

# Relative margin a split's purity score must exceed the parent's by.
_MIN_GAIN = 1e-12

_tree_ids = itertools.count(1)


class TreeError(ValueError):
    """Invalid tree operation (bad node id, stale token, arity mismatch)."""


@dataclass(frozen=True)
class TreeHyperparams:
    max_depth: int = 7
    min_samples_leaf: int = 3
    min_samples_split: int = 3

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")


@dataclass(frozen=True)
class PruneToken:
    node: int
    saved_children: tuple
    tree_id: int
    serial: int


class DecisionTree:
    """Binary classification tree over an arena of nodes.

    Per-node arrays: ``left``/``right`` child ids (-1 for a leaf), split
    ``feature``/``threshold``, ``depth`` and training ``counts`` per class.
    """

    def __init__(self, left, right, feature, threshold, depth, counts, n_features, hyperparams=None):
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.feature = np.array(feature, dtype=np.int64)
        self.threshold = np.array(threshold, dtype=np.float64)
        self.depth = np.array(depth, dtype=np.int64)
        self.counts = np.array(counts, dtype=np.int64)
        if self.counts.ndim != 2 or self.counts.shape[1] < 2:
            raise TreeError("counts must be an (n_nodes, n_classes) matrix with n_classes >= 2")
        self.n_classes = self.counts.shape[1]
        self.n_features = int(n_features)
        self.hyperparams = hyperparams
        self.root = 0
        self.parent = np.full(self.left.shape[0], -1, dtype=np.int64)
        for node in np.flatnonzero(self.left >= 0):
            self.parent[self.left[node]] = node
            self.parent[self.right[node]] = node
        totals = self.counts.sum(axis=1, keepdims=True)
        safe = np.where(totals > 0, totals, 1)
        self.value = np.where(totals > 0, self.counts / safe, 1.0 / self.n_classes)
        self.majority = np.argmax(self.counts, axis=1)
        self._id = next(_tree_ids)
        self._serials = itertools.count()
        self._outstanding = set()

    # -- structure -------------------------------------------------------

    @property
    def arena_size(self):
        return self.left.shape[0]

    def _check_node(self, node):
        if not 0 <= node < self.arena_size:
            raise TreeError(f"unknown node id {node}")

    def is_leaf(self, node):
        self._check_node(node)
        return self.left[node] < 0

    def is_attached(self, node):
        """True if ``node`` is reachable from the root in the current tree."""
        self._check_node(node)
        p = self.parent[node]
        while p >= 0:
            if self.left[p] < 0:
                return False
            p = self.parent[p]
        return node == self.root or self.parent[node] >= 0

    def preorder(self):
        stack = [self.root]
        out = []
        while stack:
            node = stack.pop()
            out.append(node)
            if self.left[node] >= 0:
                stack.append(int(self.right[node]))
                stack.append(int(self.left[node]))
        return out

    def internal_nodes(self):
        """Preorder list of ``(node_id, depth)`` for every reachable split node."""
        return [(n, int(self.depth[n])) for n in self.preorder() if self.left[n] >= 0]

    def leaves(self):
        return [n for n in self.preorder() if self.left[n] < 0]

    @property
    def node_count(self):
        return len(self.preorder())

    @property
    def n_leaves(self):
        return len(self.leaves())

    @property
    def max_depth(self):
        return max(int(self.depth[n]) for n in self.preorder())

    def subtree(self, node):
        """Reachable node ids below and including ``node``, preorder."""
        self._check_node(node)
        stack, out = [node], []
        while stack:
            n = stack.pop()
            out.append(n)
            if self.left[n] >= 0:
                stack.append(int(self.right[n]))
                stack.append(int(self.left[n]))
        return out

    # -- prediction ------------------------------------------------------

    def _matrix(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise TreeError(f"expected rows with {self.n_features} features, got shape {X.shape}")
        return np.ascontiguousarray(X)

    def apply(self, X):
        """Leaf id reached by each row of ``X``."""
        return kernels.route(self._matrix(X), self.left, self.right, self.feature, self.threshold, self.root)

    def predict_proba(self, X):
        """Class distribution of the reached leaf; a 1-d ``X`` gives one vector."""
        single = np.ndim(X) == 1
        proba = self.value[self.apply(X)]
        return proba[0] if single else proba

    def predict(self, X):
        """Most frequent training class of the reached leaf (ties to lower index)."""
        single = np.ndim(X) == 1
        pred = self.majority[self.apply(X)]
        return int(pred[0]) if single else pred

    # -- pruning ---------------------------------------------------------

    def prune_branch(self, node):
        """Turn split node ``node`` into a leaf; returns the token to undo it."""
        self._check_node(node)
        if self.left[node] < 0:
            raise TreeError(f"node {node} is already a leaf")
        token = PruneToken(node, (int(self.left[node]), int(self.right[node])), self._id, next(self._serials))
        self.left[node] = -1
        self.right[node] = -1
        self._outstanding.add(token.serial)
        return token

    def restore(self, token):
        """Reattach the children detached by ``token`` (single use)."""
        if token.tree_id != self._id:
            raise TreeError("prune token belongs to a different tree")
        if token.serial not in self._outstanding:
            raise TreeError("stale prune token (already restored)")
        self._outstanding.discard(token.serial)
        self.left[token.node], self.right[token.node] = token.saved_children

    def clone(self):
        """Independent copy of the current (possibly pruned) structure."""
        return DecisionTree(
            self.left, self.right, self.feature, self.threshold, self.depth,
            self.counts, self.n_features, self.hyperparams,
        )

    def pruned_copy(self, nodes):
        """Clone with every attached split node in ``nodes`` collapsed."""
        out = self.clone()
        for node in nodes:
            if out.is_attached(node) and out.left[node] >= 0:
                out.left[node] = -1
                out.right[node] = -1
        return out

    # -- serialization ---------------------------------------------------

    def to_dict(self):
        nodes = []
        for n in self.preorder():
            rec = {"id": int(n), "depth": int(self.depth[n]), "counts": [int(c) for c in self.counts[n]]}
            if self.left[n] >= 0:
                rec.update(
                    feature=int(self.feature[n]),
                    threshold=float(self.threshold[n]),
                    left=int(self.left[n]),
                    right=int(self.right[n]),
                )
            nodes.append(rec)
        hp = self.hyperparams
        return {
            "n_classes": self.n_classes,
            "n_features": self.n_features,
            "hyperparams": None if hp is None else {
                "max_depth": hp.max_depth,
                "min_samples_leaf": hp.min_samples_leaf,
                "min_samples_split": hp.min_samples_split,
            },
            "nodes": nodes,
        }

    @classmethod
    def from_dict(cls, d):
        nodes = d["nodes"]
        size = max(rec["id"] for rec in nodes) + 1
        k = d["n_classes"]
        left = np.full(size, -1)
        right = np.full(size, -1)
        feature = np.full(size, -1)
        threshold = np.zeros(size)
        depth = np.zeros(size, dtype=np.int64)
        counts = np.zeros((size, k), dtype=np.int64)
        for rec in nodes:
            i = rec["id"]
            depth[i] = rec["depth"]
            counts[i] = rec["counts"]
            if "left" in rec:
                left[i], right[i] = rec["left"], rec["right"]
                feature[i], threshold[i] = rec["feature"], rec["threshold"]
        hp = d.get("hyperparams")
        return cls(left, right, feature, threshold, depth, counts, d["n_features"],
                   None if hp is None else TreeHyperparams(**hp))

    def serialize(self):
        """Canonical JSON text of the reachable tree."""
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def fingerprint(self):
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, DecisionTree):
            return NotImplemented
        return self.serialize() == other.serialize()

    __hash__ = None

    def __repr__(self):
        return f"DecisionTree(nodes={self.node_count}, leaves={self.n_leaves}, n_classes={self.n_classes})"


def fit(train, hp=None, seed=0):
    """Grow a Gini CART tree on ``train``.

    Exhaustive search over features and midpoints between consecutive distinct
    values. Growth stops at ``max_depth``, at pure nodes, below
    ``min_samples_split`` samples, or when no split keeps both children at
    ``min_samples_leaf`` and strictly improves purity. The search has no
    randomness, so ``seed`` is accepted for interface symmetry only.
    """
    hp = hp or TreeHyperparams()
    if len(train) == 0:
        raise TreeError("cannot fit a tree on an empty training set")
    X = np.ascontiguousarray(train.features)
    y = np.ascontiguousarray(train.labels)
    k = train.n_classes
    left, right, feature, threshold, depth, counts = [], [], [], [], [], []
    stack = [(np.arange(len(train), dtype=np.int64), 0, -1, 0)]
    while stack:
        idx, d, parent, side = stack.pop()
        node = len(left)
        c = np.bincount(y[idx], minlength=k)
        left.append(-1)
        right.append(-1)
        feature.append(-1)
        threshold.append(0.0)
        depth.append(d)
        counts.append(c)
        if parent >= 0:
            (left if side == 0 else right)[parent] = node
        n = idx.shape[0]
        if d >= hp.max_depth or c.max() == n or n < hp.min_samples_split:
            continue
        f, thr, score = kernels.best_split(X, y, idx, k, hp.min_samples_leaf)
        parent_score = float((c * c).sum()) / n
        if f < 0 or not score > parent_score * (1.0 + _MIN_GAIN):
            continue
        feature[node] = f
        threshold[node] = thr
        go_left = X[idx, f] <= thr
        stack.append((idx[~go_left], d + 1, node, 1))
        stack.append((idx[go_left], d + 1, node, 0))
    return DecisionTree(left, right, feature, threshold, depth, counts, train.n_features, hp)
