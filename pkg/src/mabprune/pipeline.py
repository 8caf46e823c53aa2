"""Per-cell experiment execution: split, fit, prune, assess on the test split.

The training split is further divided into a fitting part (grows the tree)
and a pruning part (scores bandit trials and cumulative cuts) when
``prune_holdout`` > 0. The test split is only evaluated in the final
assessment step of :func:`run_cell`.
"""

import csv
import functools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import ccp_select
from .config import METHODS
from .dataset import SplitSpec, split
from .metrics import evaluate, performance
from .pruner import mab_prune
from .report import write_report
from .stats import ScoreMatrix
from .tree import fit


def derive_seed(*parts):
    """Independent 63-bit seed for a job identified by integer ``parts``."""
    return int(np.random.SeedSequence([int(p) for p in parts]).generate_state(1, np.uint64)[0] >> 1)


@functools.lru_cache(maxsize=16)
def _load(ds_cfg):
    return ds_cfg.load()


@dataclass
class Prepared:
    train: object
    test: object
    fit_part: object
    prune_part: object
    tree: object


def prepare(cfg, ds_cfg, seed):
    data = _load(ds_cfg)
    train, test = split(data, cfg.split_spec(seed))
    if cfg.prune_holdout > 0:
        spec = SplitSpec(1.0 - cfg.prune_holdout, derive_seed(seed, 7919))
        fit_part, prune_part = split(train, spec, mark_holdout=False)
    else:
        fit_part = prune_part = train
    return Prepared(train, test, fit_part, prune_part, fit(fit_part, cfg.tree, seed))


def summarize(tree, data, cfg, allow_holdout=False):
    e = evaluate(tree, data, 1, cfg.f1_average, allow_holdout=allow_holdout)
    return {
        "accuracy": e.accuracy,
        "scaled_log_loss": e.scaled_log_loss,
        "f1": e.f1,
        "performance": performance(e, cfg.weights),
    }


def run_method(cfg, prep, method, seed, ds_index):
    """Apply ``method`` to the prepared tree; returns ``(tree, artifact)``.

    The artifact never contains test-split metrics.
    """
    job_seed = derive_seed(seed, ds_index, METHODS.index(method))
    if method == "unpruned":
        return prep.tree.clone(), {"method": method}
    if method == "ccp":
        res = ccp_select(prep.tree, prep.train, cfg.ccp_folds, cfg.weights, job_seed, 1, cfg.f1_average)
        return res.tree, {"method": method, **res.to_dict()}
    out = mab_prune(prep.tree, prep.prune_part, cfg.prune_config(method, job_seed))
    return out.pruned_tree, {"method": method, **out.to_dict()}


def run_cell(cfg, ds_index, seed, method):
    """One (dataset, seed, method) job; failures are returned, not raised."""
    ds_cfg = cfg.datasets[ds_index]
    cell = {"dataset": ds_cfg.name, "seed": seed, "method": method}
    start = time.perf_counter()
    try:
        prep = prepare(cfg, ds_cfg, seed)
        tree, artifact = run_method(cfg, prep, method, seed, ds_index)
        cell.update(summarize(tree, prep.test, cfg, allow_holdout=True))
        cell["node_count"] = tree.node_count
        cell["n_leaves"] = tree.n_leaves
        cell["unpruned_node_count"] = prep.tree.node_count
        cell["artifact"] = artifact
        cell["error"] = None
    except Exception as exc:  # noqa: BLE001 - recorded as an error cell
        cell["error"] = f"{type(exc).__name__}: {exc}"
    cell["runtime_s"] = time.perf_counter() - start
    return cell


def _run_star(args):
    return run_cell(*args)


def run_benchmark(cfg):
    """Run every (dataset, seed, method) cell and write the report files.

    Returns the list of cells. Runtimes go to ``telemetry.json`` only, so all
    other outputs are byte-identical across reruns.
    """
    jobs = [(cfg, i, s, m) for i in range(len(cfg.datasets)) for s in cfg.seeds for m in cfg.methods]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            cells = list(pool.map(_run_star, jobs))
    else:
        cells = [_run_star(j) for j in jobs]

    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    failed = sorted({c["dataset"] for c in cells if c["error"]})
    columns = ["performance", "accuracy", "scaled_log_loss", "f1", "node_count", "n_leaves", "unpruned_node_count"]
    with (out / "cells.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["dataset", "seed", "method"] + columns + ["error"])
        for c in cells:
            values = [""] * len(columns) if c["error"] else [repr(c[k]) for k in columns]
            w.writerow([c["dataset"], c["seed"], c["method"]] + values + [c["error"] or ""])
    artifacts = out / "outcomes"
    artifacts.mkdir(exist_ok=True)
    for c in cells:
        if not c["error"] and c["method"] != "unpruned":
            path = artifacts / f"{c['dataset']}_seed{c['seed']}_{c['method']}.json"
            path.write_text(json.dumps(c["artifact"], indent=1, sort_keys=True) + "\n", encoding="utf-8")
    (out / "errors.json").write_text(
        json.dumps({c["dataset"]: c["error"] for c in cells if c["error"]}, indent=1, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (out / "telemetry.json").write_text(
        json.dumps([{k: c[k] for k in ("dataset", "seed", "method", "runtime_s")} for c in cells], indent=1) + "\n",
        encoding="utf-8",
    )

    good = [d.name for d in cfg.datasets if d.name not in failed]
    if good:
        means = {
            (d, m): float(np.mean([c["performance"] for c in cells if c["dataset"] == d and c["method"] == m]))
            for d in good
            for m in cfg.methods
        }
        matrix = ScoreMatrix(tuple(good), cfg.methods, [[means[d, m] for m in cfg.methods] for d in good])
        write_report(matrix, out)
    return cells
