"""INI run configuration.

Sections: ``[run]``, ``[split]``, ``[tree]``, ``[metrics]``, ``[prune]``,
``[prune.<method>]`` overrides, ``[ccp]`` and one ``[dataset.<name>]`` per
dataset. See README.md for every key. ``MABPRUNE_OUTPUT_DIR`` and
``MABPRUNE_JOBS`` override the output directory and worker count.
"""

import configparser
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .bandit import BanditPolicy, Policy, RewardConfig
from .dataset import SplitSpec, SyntheticSpec, generate_synthetic, load_csv
from .metrics import MetricWeights
from .pruner import PruneConfig
from .tree import TreeHyperparams

BASELINE_METHODS = ("unpruned", "ccp")
MAB_METHODS = tuple(p.value for p in Policy)
METHODS = BASELINE_METHODS + MAB_METHODS

_PRUNE_KEYS = {
    "rounds": int,
    "min_prune_depth": int,
    "eval_fraction": float,
    "eval_floor": int,
    "fixed_subset": "bool",
    "threshold": float,
    "temperature": float,
    "kl_tolerance": float,
}


class ConfigError(ValueError):
    """Invalid or unreadable configuration."""


@dataclass(frozen=True)
class DatasetConfig:
    name: str
    path: Path = None
    target: str = None
    positive_label: str = None
    synthetic: SyntheticSpec = None

    def load(self):
        if self.synthetic is not None:
            return generate_synthetic(self.synthetic)
        return load_csv(self.path, self.target, self.positive_label)


@dataclass(frozen=True)
class RunConfig:
    datasets: tuple
    methods: tuple
    seeds: tuple
    output_dir: Path
    jobs: int = 1
    train_fraction: float = 0.65
    prune_holdout: float = 0.3
    tree: TreeHyperparams = field(default_factory=TreeHyperparams)
    weights: MetricWeights = field(default_factory=MetricWeights)
    f1_average: str = "binary"
    prune: dict = field(default_factory=dict)
    prune_overrides: dict = field(default_factory=dict)
    ccp_folds: int = 5

    def dataset(self, name):
        for d in self.datasets:
            if d.name == name:
                return d
        raise KeyError(name)

    def split_spec(self, seed):
        return SplitSpec(self.train_fraction, seed)

    def prune_config(self, method, seed):
        """PruneConfig for a bandit ``method`` with per-method overrides applied."""
        opts = dict(self.prune)
        opts.update(self.prune_overrides.get(method, {}))
        policy = BanditPolicy(
            Policy(method),
            temperature=opts.pop("temperature", 0.2),
            kl_tolerance=opts.pop("kl_tolerance", 1e-6),
        )
        reward = RewardConfig(opts.pop("threshold", 0.05), self.weights.max_delta)
        return PruneConfig(
            weights=self.weights,
            reward=reward,
            policy=policy,
            f1_average=self.f1_average,
            seed=seed,
            **opts,
        )

    def with_overrides(self, seed=None, jobs=None, output_dir=None):
        changes = {}
        if seed is not None:
            changes["seeds"] = (seed,)
        if jobs is not None:
            changes["jobs"] = jobs
        if output_dir is not None:
            changes["output_dir"] = Path(output_dir)
        return replace(self, **changes)


def _get(section, key, kind, default, where):
    if key not in section:
        return default
    raw = section[key]
    try:
        if kind == "bool":
            return section.getboolean(key)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{where}: [{section.name}] {key} = {raw!r} is not a valid {getattr(kind, '__name__', kind)}") from None


def _list(raw):
    return [item.strip() for item in raw.replace("\n", ",").split(",") if item.strip()]


def _prune_options(section, where):
    opts = {}
    for key in section:
        if key not in _PRUNE_KEYS:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section.name}]")
        opts[key] = _get(section, key, _PRUNE_KEYS[key], None, where)
    return opts


def _dataset(name, sec, base, where):
    if sec.get("synthetic", "false").strip().lower() in ("1", "true", "yes", "on"):
        try:
            spec = SyntheticSpec(
                n_samples=_get(sec, "n_samples", int, 1000, where),
                n_features=_get(sec, "n_features", int, 10, where),
                n_informative=_get(sec, "n_informative", int, 5, where),
                class_separation=_get(sec, "class_separation", float, 1.0, where),
                label_noise=_get(sec, "label_noise", float, 0.0, where),
                seed=_get(sec, "seed", int, 0, where),
            )
        except ValueError as exc:
            raise ConfigError(f"{where}: [{sec.name}] {exc}") from None
        return DatasetConfig(name, synthetic=spec)
    if "path" not in sec or "target" not in sec:
        raise ConfigError(f"{where}: [{sec.name}] needs 'path' and 'target' (or synthetic = true)")
    path = Path(sec["path"])
    if not path.is_absolute():
        path = base / path
    return DatasetConfig(name, path, sec["target"], sec.get("positive_label"))


def parse_config(text, where="<config>", base_dir="."):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(where))
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    base = Path(base_dir)

    run = parser["run"] if parser.has_section("run") else parser[parser.default_section]
    methods = tuple(m.lower() for m in _list(run.get("methods", ",".join(METHODS))))
    for m in methods:
        if m not in METHODS:
            raise ConfigError(f"{where}: unknown method {m!r}; expected one of {', '.join(METHODS)}")
    try:
        seeds = tuple(int(s) for s in _list(run.get("seeds", "0")))
    except ValueError:
        raise ConfigError(f"{where}: [run] seeds must be a comma-separated list of integers") from None
    output_dir = Path(os.environ.get("MABPRUNE_OUTPUT_DIR") or run.get("output_dir", "results"))
    if not output_dir.is_absolute() and "MABPRUNE_OUTPUT_DIR" not in os.environ:
        output_dir = base / output_dir
    jobs = int(os.environ.get("MABPRUNE_JOBS") or _get(run, "jobs", int, 1, where))

    datasets = []
    prune_overrides = {}
    for name in parser.sections():
        if name.startswith("dataset."):
            datasets.append(_dataset(name[len("dataset."):], parser[name], base, where))
        elif name.startswith("prune."):
            method = name[len("prune."):].lower()
            if method not in MAB_METHODS:
                raise ConfigError(f"{where}: [{name}] does not name a bandit method")
            prune_overrides[method] = _prune_options(parser[name], where)
    if not datasets:
        raise ConfigError(f"{where}: no [dataset.<name>] sections")
    if not methods or not seeds:
        raise ConfigError(f"{where}: need at least one method and one seed")

    def section(name):
        return parser[name] if parser.has_section(name) else parser[parser.default_section]

    split_sec, tree_sec, met_sec = section("split"), section("tree"), section("metrics")
    try:
        tree = TreeHyperparams(
            _get(tree_sec, "max_depth", int, 7, where),
            _get(tree_sec, "min_samples_leaf", int, 3, where),
            _get(tree_sec, "min_samples_split", int, 3, where),
        )
        weights = MetricWeights(
            _get(met_sec, "alpha", float, 1.0, where),
            _get(met_sec, "beta", float, 1.0, where),
            _get(met_sec, "gamma", float, 2.5, where),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{where}: {exc}") from None
    train_fraction = _get(split_sec, "train_fraction", float, 0.65, where)
    prune_holdout = _get(split_sec, "prune_holdout", float, 0.3, where)
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"{where}: [split] train_fraction must lie in (0, 1)")
    if not 0.0 <= prune_holdout < 1.0:
        raise ConfigError(f"{where}: [split] prune_holdout must lie in [0, 1)")
    f1_average = met_sec.get("f1_average", "binary")
    if f1_average not in ("binary", "weighted"):
        raise ConfigError(f"{where}: [metrics] f1_average must be 'binary' or 'weighted'")
    prune = _prune_options(parser["prune"], where) if parser.has_section("prune") else {}
    folds = _get(section("ccp"), "folds", int, 5, where)

    cfg = RunConfig(
        datasets=tuple(datasets),
        methods=methods,
        seeds=seeds,
        output_dir=output_dir,
        jobs=max(1, jobs),
        train_fraction=train_fraction,
        prune_holdout=prune_holdout,
        tree=tree,
        weights=weights,
        f1_average=f1_average,
        prune=prune,
        prune_overrides=prune_overrides,
        ccp_folds=folds,
    )
    for m in MAB_METHODS:
        try:
            cfg.prune_config(m, 0)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{where}: invalid prune settings for {m}: {exc}") from None
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, where=path, base_dir=path.parent)
