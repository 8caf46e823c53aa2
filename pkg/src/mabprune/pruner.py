"""Bandit-driven pruning of a fitted tree.

Every split node deeper than ``min_prune_depth`` is an arm. Each round draws
a small training subset, trial-prunes the selected arm, scores the change in
composite performance on that subset against the unpruned tree, and restores
the tree. Afterwards the arms are ranked by mean reward and the best
cumulative cut (top-c arms pruned together) is chosen on the full training
set, with the unpruned tree as the incumbent.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .bandit import (
    ArmState,
    BanditPolicy,
    RewardConfig,
    bernoulli_reward,
    continuous_reward,
    select_arm,
    update_arm,
)
from .dataset import sample_subset
from .metrics import MetricWeights, delta_score, evaluate, performance


class PruneInvariantError(RuntimeError):
    """The working tree changed across a prune/restore cycle."""


@dataclass(frozen=True)
class PruneConfig:
    rounds: int = 1100
    min_prune_depth: int = 3
    eval_fraction: float = 0.02
    eval_floor: int = 30
    fixed_subset: bool = False
    weights: MetricWeights = field(default_factory=MetricWeights)
    reward: RewardConfig = None
    policy: BanditPolicy = field(default_factory=BanditPolicy)
    positive_class: int = 1
    f1_average: str = "binary"
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not 0.0 < self.eval_fraction <= 1.0:
            raise ValueError("eval_fraction must lie in (0, 1]")
        if self.eval_floor < 1:
            raise ValueError("eval_floor must be positive")
        if self.min_prune_depth < 0:
            raise ValueError("min_prune_depth must be nonnegative")
        if self.reward is None:
            object.__setattr__(self, "reward", RewardConfig(delta_max=self.weights.max_delta))


@dataclass
class ArmRecord:
    node: int
    plays: int
    mean_reward: float
    wins: int
    losses: int


@dataclass
class PruneOutcome:
    pruned_tree: object
    pruned_node_ids: list
    best_performance: float
    arm_table: list
    rounds_executed: int
    ranking: list = field(default_factory=list)
    chosen_cut: int = 0
    cut_scores: list = field(default_factory=list)
    unpruned_performance: float = None

    def to_dict(self):
        return {
            "rounds_executed": self.rounds_executed,
            "best_performance": self.best_performance,
            "unpruned_performance": self.unpruned_performance,
            "chosen_cut": self.chosen_cut,
            "pruned_node_ids": list(self.pruned_node_ids),
            "ranking": list(self.ranking),
            "cut_scores": list(self.cut_scores),
            "arm_table": [vars(a) for a in self.arm_table],
            "node_count": self.pruned_tree.node_count,
            "n_leaves": self.pruned_tree.n_leaves,
        }


def find_prunable(tree, min_depth=3):
    """Preorder split nodes strictly deeper than ``min_depth``."""
    return [node for node, depth in tree.internal_nodes() if depth > min_depth]


def rank_arms(nodes, arms):
    """Nodes sorted best-to-prune first: mean reward desc, plays desc, node id asc."""
    order = sorted(range(len(nodes)), key=lambda i: (-arms[i].mean_reward, -arms[i].plays, nodes[i]))
    return [nodes[i] for i in order]


def _effective_cut(tree, nodes):
    # Keep only nodes whose ancestors are untouched; an ancestor prune subsumes them.
    work = tree.clone()
    applied = []
    for node in nodes:
        if work.is_attached(node) and not work.is_leaf(node):
            work.left[node] = -1
            work.right[node] = -1
            applied.append(node)
    return work, [n for n in applied if work.is_attached(n)]


def apply_cumulative(tree, ranked_nodes, c):
    """Copy of ``tree`` with the first ``c`` ranked nodes pruned (nested ones skipped)."""
    if not 1 <= c <= len(ranked_nodes):
        raise ValueError(f"cut size {c} outside [1, {len(ranked_nodes)}]")
    return _effective_cut(tree, ranked_nodes[:c])[0]


def mab_prune(tree, train, cfg=PruneConfig()):
    """Prune ``tree`` with the bandit policy in ``cfg``; never touches the input tree."""
    if len(train) == 0:
        raise ValueError("mab_prune needs a non-empty training set")
    w = cfg.weights

    def score(t, data):
        return evaluate(t, data, cfg.positive_class, cfg.f1_average)

    base_perf = performance(score(tree, train), w)
    candidates = find_prunable(tree, cfg.min_prune_depth)
    if not candidates:
        return PruneOutcome(tree.clone(), [], base_perf, [], 0, unpruned_performance=base_perf)

    rng = np.random.default_rng(cfg.seed)
    policy = replace(cfg.policy, last_arm=None, last_won=None)
    bernoulli = policy.kind.bernoulli_rewards
    arms = [ArmState() for _ in candidates]
    work = tree.clone()
    reference_size = work.node_count

    subset = sample_subset(train, cfg.eval_fraction, cfg.eval_floor, rng) if cfg.fixed_subset else None
    fixed_base = score(work, subset) if cfg.fixed_subset else None
    for t in range(1, cfg.rounds + 1):
        if cfg.fixed_subset:
            base = fixed_base
        else:
            subset = sample_subset(train, cfg.eval_fraction, cfg.eval_floor, rng)
            base = score(work, subset)
        i = select_arm(policy, arms, t, rng)
        token = work.prune_branch(candidates[i])
        trial = score(work, subset)
        work.restore(token)
        delta = delta_score(base, trial, w)
        reward = bernoulli_reward(delta) if bernoulli else continuous_reward(delta, cfg.reward)
        update_arm(arms[i], reward, won=delta > 0)
        policy.observe(i, delta > 0)
    if work.node_count != reference_size:
        raise PruneInvariantError("working tree was not restored after the trial rounds")

    ranking = rank_arms(candidates, arms)
    best_perf, best_c = base_perf, 0
    cut_scores = []
    cumulative = tree.clone()
    for c, node in enumerate(ranking, start=1):
        if cumulative.is_attached(node) and not cumulative.is_leaf(node):
            cumulative.left[node] = -1
            cumulative.right[node] = -1
        p_c = performance(score(cumulative, train), w)
        cut_scores.append(p_c)
        if p_c >= best_perf:
            best_perf, best_c = p_c, c

    if best_c == 0:
        pruned, pruned_ids = tree.clone(), []
    else:
        pruned, pruned_ids = _effective_cut(tree, ranking[:best_c])
    table = [ArmRecord(n, a.plays, a.mean_reward, a.wins, a.losses) for n, a in zip(candidates, arms)]
    return PruneOutcome(
        pruned_tree=pruned,
        pruned_node_ids=pruned_ids,
        best_performance=best_perf,
        arm_table=table,
        rounds_executed=cfg.rounds,
        ranking=ranking,
        chosen_cut=best_c,
        cut_scores=cut_scores,
        unpruned_performance=base_perf,
    )
