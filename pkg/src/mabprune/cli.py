"""Command-line interface: ``train``, ``prune``, ``benchmark``, ``report``, ``export``.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import METHODS, ConfigError, load_config
from .dataset import DatasetError
from .pipeline import prepare, run_benchmark, run_method, summarize
from .report import DEFAULT_BASELINES, present_baselines, write_report
from .stats import ScoreMatrix

log = logging.getLogger("mabprune")


class UsageError(Exception):
    pass


def _dump(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def _load(args):
    cfg = load_config(args.config)
    return cfg.with_overrides(seed=args.seed, jobs=getattr(args, "jobs", None), output_dir=args.out)


def _dataset_index(cfg, name):
    names = [d.name for d in cfg.datasets]
    if name not in names:
        raise UsageError(f"unknown dataset {name!r}; configured datasets: {', '.join(names)}")
    return names.index(name)


def cmd_train(args):
    cfg = _load(args)
    i = _dataset_index(cfg, args.dataset)
    seed = cfg.seeds[0]
    prep = prepare(cfg, cfg.datasets[i], seed)
    out = Path(cfg.output_dir) / args.dataset / f"seed{seed}"
    out.mkdir(parents=True, exist_ok=True)
    (out / "tree.json").write_text(prep.tree.serialize(), encoding="utf-8")
    summary = {
        "dataset": args.dataset,
        "seed": seed,
        "node_count": prep.tree.node_count,
        "n_leaves": prep.tree.n_leaves,
        "max_depth": prep.tree.max_depth,
        "n_fit_samples": len(prep.fit_part),
        "train": summarize(prep.tree, prep.fit_part, cfg),
        "test": summarize(prep.tree, prep.test, cfg, allow_holdout=True),
    }
    _dump(out / "summary.json", summary)
    print(json.dumps(summary, indent=1, sort_keys=True))
    return 0


def cmd_prune(args):
    cfg = _load(args)
    i = _dataset_index(cfg, args.dataset)
    if args.method not in METHODS or args.method == "unpruned":
        raise UsageError(f"unknown pruning method {args.method!r}; choose from {', '.join(METHODS[1:])}")
    seed = cfg.seeds[0]
    prep = prepare(cfg, cfg.datasets[i], seed)
    tree, artifact = run_method(cfg, prep, args.method, seed, i)
    artifact.update(
        dataset=args.dataset,
        seed=seed,
        tree=tree.to_dict(),
        pruning_data=summarize(tree, prep.prune_part, cfg),
        unpruned_node_count=prep.tree.node_count,
    )
    path = Path(cfg.output_dir) / args.dataset / f"seed{seed}" / f"prune_{args.method}.json"
    _dump(path, artifact)
    print(f"wrote {path} ({prep.tree.node_count} -> {tree.node_count} nodes)")
    return 0


def cmd_export(args):
    cfg = _load(args)
    i = _dataset_index(cfg, args.dataset)
    if args.method not in METHODS:
        raise UsageError(f"unknown method {args.method!r}; choose from {', '.join(METHODS)}")
    seed = cfg.seeds[0]
    prep = prepare(cfg, cfg.datasets[i], seed)
    tree, _ = run_method(cfg, prep, args.method, seed, i)
    text = tree.serialize()
    if args.file:
        Path(args.file).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_benchmark(args):
    cfg = _load(args)
    cells = run_benchmark(cfg)
    failed = [c for c in cells if c["error"]]
    for c in failed:
        log.error("%s seed %s %s: %s", c["dataset"], c["seed"], c["method"], c["error"])
    print(f"wrote report to {cfg.output_dir} ({len(cells) - len(failed)}/{len(cells)} cells ok)")
    return 1 if failed and len(failed) == len(cells) else 0


def cmd_report(args):
    try:
        matrix = ScoreMatrix.read_csv(args.scores)
    except FileNotFoundError:
        raise UsageError(f"no such score file: {args.scores}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    baselines = args.baseline or present_baselines(matrix, DEFAULT_BASELINES)
    for b in baselines:
        try:
            matrix.method_index(b)
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    out = Path(args.out) if args.out else Path(args.scores).with_suffix("").with_name(Path(args.scores).stem + "_report")
    print(write_report(matrix, out, baselines))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="mabprune", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, jobs=False):
        p.add_argument("--config", required=True, help="INI run configuration")
        p.add_argument("--seed", type=int, help="run a single seed instead of the configured list")
        p.add_argument("--out", help="output directory (overrides [run] output_dir)")
        if jobs:
            p.add_argument("--jobs", type=int, help="worker processes")

    p = sub.add_parser("train", help="fit the tree and write its serialization and metrics")
    common(p)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("prune", help="prune with one method and write the outcome JSON")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("benchmark", help="run every dataset x method x seed and write reports")
    common(p, jobs=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("report", help="rank and t-test tables from a score matrix CSV")
    p.add_argument("scores", help="CSV with datasets as rows and methods as columns")
    p.add_argument("--baseline", action="append", help="baseline column (repeatable)")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("export", help="print the canonical serialization of a (pruned) tree")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", default="unpruned")
    p.add_argument("--file", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"mabprune: error: {exc}", file=sys.stderr)
        return 2
    except (DatasetError, FileNotFoundError, ValueError, RuntimeError) as exc:
        print(f"mabprune: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
