"""Arm-selection policies and reward mappings for pruning bandits.

Six policies are supported: UCB1, KL-UCB, Thompson sampling, Bayes-UCB,
Softmax and win-stay/lose-shift. Thompson sampling and Bayes-UCB consume
Bernoulli rewards (strict improvement or not); the others consume the
thresholded continuous reward.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _special
from ._backend import kernels


class Policy(str, Enum):
    UCB1 = "ucb1"
    KL_UCB = "kl_ucb"
    THOMPSON = "thompson"
    BAYES_UCB = "bayes_ucb"
    SOFTMAX = "softmax"
    WSLS = "wsls"

    @property
    def bernoulli_rewards(self):
        return self in (Policy.THOMPSON, Policy.BAYES_UCB)


@dataclass
class ArmState:
    plays: int = 0
    mean_reward: float = 0.0
    wins: int = 0
    losses: int = 0


@dataclass
class BanditPolicy:
    kind: Policy = Policy.UCB1
    temperature: float = 0.2
    kl_tolerance: float = 1e-6
    quantile_tolerance: float = 1e-8
    last_arm: int = None
    last_won: bool = None

    def __post_init__(self):
        self.kind = Policy(self.kind)
        if not self.temperature > 0:
            raise ValueError("softmax temperature must be positive")
        if not self.kl_tolerance > 0 or not self.quantile_tolerance > 0:
            raise ValueError("tolerances must be positive")

    def observe(self, arm, won):
        """Record the outcome of the last pull (consumed by WSLS)."""
        self.last_arm = arm
        self.last_won = bool(won)


@dataclass(frozen=True)
class RewardConfig:
    """Continuous reward ``max(0, threshold + delta) / constant``.

    ``constant`` is fixed to ``threshold + delta_max`` so the reward reaches
    exactly 1 at the largest possible improvement.
    """

    threshold: float = 0.05
    delta_max: float = 4.5
    constant: float = field(init=False)

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("reward threshold must be nonnegative")
        if not self.delta_max > 0:
            raise ValueError("delta_max must be positive")
        object.__setattr__(self, "constant", self.threshold + self.delta_max)


def continuous_reward(delta, rc=RewardConfig()):
    return max(0.0, rc.threshold + delta) / rc.constant


def bernoulli_reward(delta):
    return 1 if delta > 0 else 0


def ucb1_index(arm, t):
    if arm.plays < 1:
        raise ValueError("UCB1 index is undefined for an unplayed arm")
    return arm.mean_reward + math.sqrt(2.0 * math.log(t) / arm.plays)


def kl_ucb_index(arm, t, tol=1e-6):
    if arm.plays < 1:
        raise ValueError("KL-UCB index is undefined for an unplayed arm")
    return _special.kl_ucb_bound(arm.mean_reward, arm.plays, math.log(t), tol)


def thompson_sample(arm, rng):
    return float(rng.beta(1 + arm.wins, 1 + arm.losses))


def bayes_ucb_index(arm, t, tol=1e-8):
    return _special.beta_quantile(1 + arm.wins, 1 + arm.losses, 1.0 - 1.0 / t, tol)


def softmax_probabilities(arms, temperature):
    mu = np.array([a.mean_reward for a in arms], dtype=np.float64) / temperature
    z = np.exp(mu - mu.max())
    return z / z.sum()


def _wsls(policy, n_arms, rng):
    last = policy.last_arm
    if last is None or policy.last_won is None or not 0 <= last < n_arms:
        return int(rng.integers(n_arms))
    if policy.last_won or n_arms == 1:
        return last
    k = int(rng.integers(n_arms - 1))
    return k if k < last else k + 1


def select_arm(policy, arms, t, rng):
    """Index of the arm to pull at round ``t`` (1-based).

    Unplayed arms go first, chosen uniformly at random. Index policies break
    ties toward the lowest arm index.
    """
    n = len(arms)
    if n == 0:
        raise ValueError("select_arm needs at least one arm")
    unplayed = [i for i, a in enumerate(arms) if a.plays == 0]
    if unplayed:
        return unplayed[int(rng.integers(len(unplayed)))]
    kind = policy.kind
    if kind is Policy.WSLS:
        return _wsls(policy, n, rng)
    if kind is Policy.SOFTMAX:
        p = softmax_probabilities(arms, policy.temperature)
        return int(rng.choice(n, p=p))
    if kind is Policy.UCB1:
        mu = np.array([a.mean_reward for a in arms])
        plays = np.array([a.plays for a in arms], dtype=np.float64)
        return int(np.argmax(mu + np.sqrt(2.0 * math.log(t) / plays)))
    if kind is Policy.KL_UCB:
        mu = np.array([a.mean_reward for a in arms], dtype=np.float64)
        plays = np.array([a.plays for a in arms], dtype=np.float64)
        return int(np.argmax(kernels.kl_ucb_batch(mu, plays, math.log(t), policy.kl_tolerance)))
    wins = np.array([1 + a.wins for a in arms], dtype=np.float64)
    losses = np.array([1 + a.losses for a in arms], dtype=np.float64)
    if kind is Policy.THOMPSON:
        return int(np.argmax(rng.beta(wins, losses)))
    if kind is Policy.BAYES_UCB:
        level = 1.0 - 1.0 / t
        return int(np.argmax(kernels.beta_quantile_batch(wins, losses, level, policy.quantile_tolerance)))
    raise ValueError(f"unsupported policy {kind!r}")


def update_arm(arm, reward, won=None):
    """Running-mean update; ``won`` defaults to ``reward == 1``."""
    if not 0.0 <= reward <= 1.0:
        raise ValueError(f"reward {reward} outside [0, 1]")
    arm.plays += 1
    n = arm.plays
    arm.mean_reward = (n - 1) / n * arm.mean_reward + reward / n
    if won is None:
        won = reward == 1
    if won:
        arm.wins += 1
    else:
        arm.losses += 1
