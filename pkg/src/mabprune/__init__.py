"""Bandit-driven post-pruning of CART decision trees."""

from ._backend import BACKEND
from .bandit import ArmState, BanditPolicy, Policy, RewardConfig, bernoulli_reward, continuous_reward, select_arm
from .baselines import ccp_path, ccp_prune, ccp_select
from .dataset import Dataset, DatasetError, SplitSpec, SyntheticSpec, generate_synthetic, load_csv, split
from .metrics import EvalResult, LeakError, MetricWeights, delta_score, evaluate, performance
from .pruner import PruneConfig, PruneOutcome, find_prunable, mab_prune
from .stats import ScoreMatrix, mean_ranks, paired_t_test
from .tree import DecisionTree, TreeError, TreeHyperparams, fit

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ArmState",
    "BanditPolicy",
    "Policy",
    "RewardConfig",
    "bernoulli_reward",
    "continuous_reward",
    "select_arm",
    "ccp_path",
    "ccp_prune",
    "ccp_select",
    "Dataset",
    "DatasetError",
    "SplitSpec",
    "SyntheticSpec",
    "generate_synthetic",
    "load_csv",
    "split",
    "EvalResult",
    "LeakError",
    "MetricWeights",
    "delta_score",
    "evaluate",
    "performance",
    "PruneConfig",
    "PruneOutcome",
    "find_prunable",
    "mab_prune",
    "ScoreMatrix",
    "mean_ranks",
    "paired_t_test",
    "DecisionTree",
    "TreeError",
    "TreeHyperparams",
    "fit",
]
