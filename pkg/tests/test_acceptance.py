"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -s`` (the lines are also
printed without ``-s``) or ``python tests/test_acceptance.py``.
"""

import csv
import math
import shutil
import sys
import time

import numpy as np
import pytest

from mabprune.bandit import (
    ArmState,
    BanditPolicy,
    Policy,
    RewardConfig,
    bayes_ucb_index,
    bernoulli_reward,
    continuous_reward,
    kl_ucb_index,
    ucb1_index,
)
from mabprune.baselines import ccp_path, subtree_for_alpha
from mabprune.cli import main
from mabprune.config import MAB_METHODS, parse_config
from mabprune.dataset import SyntheticSpec, generate_synthetic
from mabprune.pipeline import prepare, run_method, summarize
from mabprune.pruner import PruneConfig, apply_cumulative, find_prunable, mab_prune
from mabprune.tree import DecisionTree, TreeHyperparams, fit

from conftest import FIXTURES, make_dataset
from oracles import check_ccp_path, kl_ucb_oracle
from test_bandit import simulate


@pytest.fixture
def report(request, pytestconfig):
    """Collect check results; print one summary line for the criterion."""
    checks = []
    start = time.perf_counter()

    def check(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    yield check
    elapsed = time.perf_counter() - start
    failed = [c for c in checks if not c[1]]
    label = request.node.function.__doc__.strip().splitlines()[0]
    status = "PASS" if checks and not failed else "FAIL"
    line = f"[acceptance] {status} {label} ({len(checks) - len(failed)}/{len(checks)} checks, {elapsed:.2f}s)"
    for name, _, detail in failed:
        line += f"\n    failed: {name} {detail}"
    capman = pytestconfig.pluginmanager.getplugin("capturemanager")
    with capman.global_and_fixture_disabled():
        print("\n" + line)
    assert not failed, line


# -- criterion 1 ----------------------------------------------------------

EXPECTED_RANKS = {"TS": 2.8, "UCB1": 2.9, "WSLS": 3.1, "Bayes-UCB": 3.7, "KL-UCB": 4.4, "Softmax": 4.7, "CCP": 6.7, "Unpruned": 7.7}
# method: (improvement %, t, p)
EXPECTED_VS_UNPRUNED = {
    "UCB1": (5.81, 5.3772, 0.0058),
    "TS": (6.20, 6.7770, 0.0025),
    "Softmax": (4.09, 3.1337, 0.0351),
    "WSLS": (5.77, 3.6315, 0.0221),
    "Bayes-UCB": (5.17, 4.4335, 0.0114),
    "KL-UCB": (4.19, 3.4658, 0.0257),
}
EXPECTED_VS_CCP = {
    "UCB1": (2.85, 3.7278, 0.0203),
    "TS": (3.24, 2.4343, 0.0716),
    "Softmax": (1.18, 0.6770, 0.5355),
    "WSLS": (2.82, 2.0865, 0.1052),
    "Bayes-UCB": (2.24, 4.2988, 0.0127),
    "KL-UCB": (1.28, 1.1359, 0.3195),
}


def _read_rows(path):
    with open(path, newline="") as fh:
        return {r["method"]: r for r in csv.DictReader(fh)}


def test_criterion_1_statistics_pipeline(tmp_path, report, capsys):
    """Criterion 1: report on the reference score matrix reproduces the rank and t-test tables"""
    src = tmp_path / "reference.csv"
    shutil.copy(FIXTURES / "reference_scores.csv", src)
    t0 = time.perf_counter()
    rc = main(["report", str(src), "--out", str(tmp_path / "rep")])
    elapsed = time.perf_counter() - t0
    capsys.readouterr()
    report("exit code 0", rc == 0)
    with open(tmp_path / "rep" / "ranks.csv", newline="") as fh:
        ranks = {r["method"]: float(r["mean_rank"]) for r in csv.DictReader(fh)}
    for m, r in EXPECTED_RANKS.items():
        report(f"rank {m}", abs(ranks[m] - r) < 1e-9, f"got {ranks[m]}, want {r}")
    for baseline, table in (("unpruned", EXPECTED_VS_UNPRUNED), ("ccp", EXPECTED_VS_CCP)):
        rows = _read_rows(tmp_path / "rep" / f"ttest_{baseline}.csv")
        for m, (imp, t, p) in table.items():
            got = rows[m]
            report(f"{baseline}/{m} t", abs(float(got["t_statistic"]) - t) <= 0.005, f"got {got['t_statistic']}, want {t}")
            report(f"{baseline}/{m} p", abs(float(got["p_value"]) - p) <= 0.0005, f"got {got['p_value']}, want {p}")
            report(f"{baseline}/{m} improvement", abs(float(got["improvement_pct"]) - imp) <= 0.01, f"got {got['improvement_pct']}, want {imp}")
    report("runtime < 1 s", elapsed < 1.0, f"{elapsed:.3f}s")


# -- criterion 2 ----------------------------------------------------------

CRITERION_2_CONFIG = """
[run]
methods = unpruned, ccp, ucb1, kl_ucb, thompson, bayes_ucb, softmax, wsls
seeds = 0

[split]
train_fraction = 0.65
prune_holdout = 0.3

[tree]
max_depth = 7

[prune]
rounds = 1100
"""


def test_criterion_2_end_to_end_pruning(report):
    """Criterion 2: six bandit policies vs unpruned (>= 7/10 seeds) and CCP (>= 5/10) on noisy synthetic data"""
    text = CRITERION_2_CONFIG
    for seed in range(10):
        text += (
            f"\n[dataset.noisy{seed}]\nsynthetic = true\nn_samples = 2000\nn_features = 10\n"
            f"n_informative = 5\nclass_separation = 0.5\nlabel_noise = 0.1\nseed = {seed}\n"
        )
    cfg = parse_config(text)
    t0 = time.perf_counter()
    beats_unpruned = {m: 0 for m in MAB_METHODS}
    beats_ccp = {m: 0 for m in MAB_METHODS}
    for seed, ds in enumerate(cfg.datasets):
        prep = prepare(cfg, ds, seed)
        assert prep.tree.max_depth == 7

        def test_perf(method):
            tree, _ = run_method(cfg, prep, method, seed, seed)
            return summarize(tree, prep.test, cfg, allow_holdout=True)["performance"]

        unpruned, ccp = test_perf("unpruned"), test_perf("ccp")
        for m in MAB_METHODS:
            p = test_perf(m)
            beats_unpruned[m] += p >= unpruned
            beats_ccp[m] += p >= ccp
    elapsed = time.perf_counter() - t0
    for m in MAB_METHODS:
        report(f"{m} >= unpruned", beats_unpruned[m] >= 7, f"{beats_unpruned[m]}/10")
        report(f"{m} >= ccp", beats_ccp[m] >= 5, f"{beats_ccp[m]}/10")
    report("runtime < 5 min", elapsed < 300, f"{elapsed:.1f}s")
    print(f"  vs unpruned: {beats_unpruned}\n  vs ccp: {beats_ccp}")


# -- criterion 3 ----------------------------------------------------------


def test_criterion_3_bandit_policies(report):
    """Criterion 3: UCB1 / KL-UCB / Bayes-UCB indexes and best-arm identification"""
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 500))
        mu = float(rng.random())
        t = int(rng.integers(n, 5000))
        worst = max(worst, abs(ucb1_index(ArmState(n, mu), t) - (mu + math.sqrt(2.0 * math.log(t) / n))))
    report("UCB1 closed form to 1e-12", worst <= 1e-12, f"max error {worst:.2e}")

    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 300))
        mu = float(rng.random())
        t = int(rng.integers(2, 5000))
        worst = max(worst, abs(kl_ucb_index(ArmState(n, mu), t) - kl_ucb_oracle(mu, n, math.log(t))))
    report("KL-UCB vs bisection oracle to 1e-6", worst <= 1e-6, f"max error {worst:.2e}")

    worst = 0.0
    for t in (2, 5, 20, 100, 1000, 10**5):
        level = 1 - 1 / t
        worst = max(worst, abs(bayes_ucb_index(ArmState(0, 0, 0, 0), t) - level))
        worst = max(worst, abs(bayes_ucb_index(ArmState(1, 1, 1, 0), t) - math.sqrt(level)))
    report("Bayes-UCB Beta(1,1)/Beta(2,1) quantiles to 1e-6", worst <= 1e-6, f"max error {worst:.2e}")

    for kind in Policy:
        wins = sum(int(np.argmax(simulate(kind, [0.2, 0.5, 0.8], 2000, s)) == 2) for s in range(10))
        report(f"{kind.value} pulls best arm most", wins >= 8, f"{wins}/10 seeds")
    elapsed = time.perf_counter() - t0
    report("runtime < 30 s", elapsed < 30, f"{elapsed:.1f}s")


# -- criterion 4 ----------------------------------------------------------


def test_criterion_4_reward_mappings(report):
    """Criterion 4: continuous and Bernoulli reward mappings"""
    rc = RewardConfig(threshold=0.05, delta_max=4.5)
    r = continuous_reward(-0.03, rc)
    report("threshold 0.05, delta -0.03 gives positive reward", r > 0, f"{r}")
    deltas = np.random.default_rng(4).uniform(-4.5, 4.5, 10**5)
    rewards = np.array([continuous_reward(float(d), rc) for d in deltas])
    report("reward in [0, 1] over 1e5 deltas", rewards.min() >= 0 and rewards.max() <= 1)
    report("bernoulli(0) = 0", bernoulli_reward(0.0) == 0)
    report("bernoulli(+) = 1, bernoulli(-) = 0", bernoulli_reward(1e-9) == 1 and bernoulli_reward(-1e-9) == 0)


# -- criterion 5 ----------------------------------------------------------


def _noisy_tree():
    data = generate_synthetic(SyntheticSpec(900, 8, 4, 0.8, 0.1, seed=5))
    return fit(data, TreeHyperparams(7, 3, 3)), data


def test_criterion_5_pruning_mechanics(report):
    """Criterion 5: prune/restore round trips, play accounting, monotone cuts, identity cases"""
    tree, data = _noisy_tree()
    text = tree.serialize()
    rng = np.random.default_rng(0)
    internal = [n for n, _ in tree.internal_nodes()]
    for _ in range(1000):
        tok = tree.prune_branch(int(rng.choice(internal)))
        tree.restore(tok)
    report("1000 prune/restore cycles leave serialization identical", tree.serialize() == text)

    for kind in Policy:
        out = mab_prune(tree, data, PruneConfig(rounds=1100, policy=BanditPolicy(kind), seed=1))
        total = sum(a.plays for a in out.arm_table)
        report(f"{kind.value}: sum of plays = T", total == 1100, f"{total}")
        sizes = [apply_cumulative(tree, out.ranking, c).node_count for c in range(1, len(out.ranking) + 1)]
        report(f"{kind.value}: cumulative node count monotone", all(a >= b for a, b in zip(sizes, sizes[1:])))

    shallow = fit(data, TreeHyperparams(3, 3, 3))
    out = mab_prune(shallow, data, PruneConfig(rounds=100))
    report("no candidates returns the input tree", not find_prunable(shallow) and out.pruned_tree == shallow)

    rng = np.random.default_rng(0)
    X = rng.random((1200, 6))
    y = np.zeros(1200, dtype=int)
    decided = np.zeros(1200, dtype=bool)
    for j in range(6):
        hit = (X[:, j] > 0.5) & ~decided
        y[hit] = (j + 1) % 2
        decided |= hit
    sep = make_dataset(X, y)
    perfect = fit(sep, TreeHyperparams(7, 3, 3))
    out = mab_prune(perfect, sep, PruneConfig(rounds=1100, seed=0))
    report("unpruned tree wins on separable data", bool(find_prunable(perfect)) and out.pruned_tree == perfect)


# -- criterion 6 ----------------------------------------------------------


def _hand_built_tree():
    # 30 samples on a line; labels chosen so several subtrees tie on error
    x = np.arange(30, dtype=float)
    y = np.array([0, 0, 0, 1, 0, 0, 1, 1, 1, 0, 1, 1, 0, 0, 0, 0, 1, 0, 1, 1, 1, 1, 0, 1, 1, 0, 0, 1, 0, 0])
    data = make_dataset(x, y)
    # explicit splits (heap layout), 11 internal nodes
    splits = {0: 14.5, 1: 5.5, 2: 23.5, 3: 2.5, 4: 9.5, 5: 18.5, 6: 26.5, 9: 7.5, 10: 11.5, 11: 16.5, 13: 24.5}
    size = 2 * max(splits) + 3
    left = [2 * i + 1 if i in splits else -1 for i in range(size)]
    right = [2 * i + 2 if i in splits else -1 for i in range(size)]
    thr = [splits.get(i, 0.0) for i in range(size)]
    depth = [int(math.floor(math.log2(i + 1))) for i in range(size)]
    stub = DecisionTree(left, right, [0] * size, thr, depth, np.zeros((size, 2), dtype=int), 1)
    leaf = stub.apply(data.features)
    counts = np.zeros((size, 2), dtype=int)
    np.add.at(counts, (leaf, y), 1)
    for node in reversed(stub.preorder()):
        if left[node] >= 0:
            counts[node] = counts[left[node]] + counts[right[node]]
    return DecisionTree(left, right, [0] * size, thr, depth, counts, 1), data


def test_criterion_6_ccp_baseline(report):
    """Criterion 6: weakest-link path vs exhaustive subtree oracle"""
    tree, data = _hand_built_tree()
    report("hand-built tree has <= 12 internal nodes", len(tree.internal_nodes()) <= 12, f"{len(tree.internal_nodes())}")
    path = ccp_path(tree, data)
    try:
        n = check_ccp_path(tree, data, path)
        report(f"path matches brute force over {n} subtrees at every alpha", True)
    except AssertionError as exc:
        report("path matches brute force", False, str(exc))
    report("alpha = 0 gives the full tree", subtree_for_alpha(tree, path, 0.0) == tree)
    report("terminal entry is the root stump", path[-1].n_leaves == 1 and subtree_for_alpha(tree, path, path[-1].alpha).node_count == 1)


# -- criterion 7 ----------------------------------------------------------

DETERMINISM_CONFIG = """
[run]
methods = unpruned, ccp, ucb1, kl_ucb, thompson, bayes_ucb, softmax, wsls
seeds = 0, 1

[prune]
rounds = 300

[dataset.a]
synthetic = true
n_samples = 500
n_features = 6
n_informative = 3
label_noise = 0.1
seed = 3

[dataset.b]
synthetic = true
n_samples = 400
n_features = 5
n_informative = 2
class_separation = 0.7
label_noise = 0.05
seed = 4
"""


def test_criterion_7_determinism(tmp_path, report, capsys):
    """Criterion 7: benchmark reruns produce byte-identical report files"""
    cfg = tmp_path / "det.ini"
    cfg.write_text(DETERMINISM_CONFIG)
    outs = []
    for name in ("run1", "run2"):
        report(f"{name} exit code 0", main(["benchmark", "--config", str(cfg), "--out", str(tmp_path / name)]) == 0)
        outs.append(tmp_path / name)
    capsys.readouterr()
    files = sorted(p.relative_to(outs[0]) for p in outs[0].rglob("*") if p.is_file() and p.name != "telemetry.json")
    report("report files present", {"scores.csv", "ranks.csv", "report.md"} <= {f.name for f in files})
    for f in files:
        report(f"{f} identical", (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes())


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
