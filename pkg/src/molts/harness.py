"""Experiment runner: rollouts, regret ledgers, aggregation and output files.

Each (instance, algorithm) pair is an independent task. Its random
streams are derived from ``(master_seed, instance, stream)`` through
``numpy.random.SeedSequence`` spawn keys, so results do not depend on
execution order or on the number of worker processes. All algorithms of
an instance see the same hidden parameters, contexts and per-round noise
vectors; only their own selection randomness differs.
"""
from __future__ import annotations

import csv
import logging
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import environment as envmod
from . import pareto
from .environment import ContextMode
from .errors import ArgumentError, ConfigurationError, InvariantViolation, MoltsError
from .linalg import RlsState, elliptical_potential_bound
from .policies import Algorithm, PolicyConfig, regret_bound_curve, select_arm

log = logging.getLogger(__name__)

ENV_STREAM, CONTEXT_STREAM, NOISE_STREAM, POLICY_STREAM = 0, 1, 2, 3
CSV_HEADER = ("round", "algo", "metric", "mean", "std")


def derive_rng(master_seed: int, instance: int, stream: int, label: str | None = None) -> np.random.Generator:
    """Independent generator for one (instance, stream[, label]) triple."""
    key = (int(instance), int(stream))
    if label is not None:
        key += (zlib.crc32(label.encode("utf-8")),)
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=key))


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of an experiment grid.

    ``algorithms`` holds labels: ``mol-ts``, ``mol-ts-m<k>`` (fixed draw
    count k), ``mol-ucb`` and ``eps-greedy``. The policy fields are shared
    by every label; ``num_samples`` applies to plain ``mol-ts``.
    """

    master_seed: int = 0
    num_instances: int = 10
    horizon: int = 10_000
    num_arms: int = 50
    dim: int = 5
    num_objectives: int = 4
    noise_sigma: float = 1.0
    context_mode: ContextMode = ContextMode.PER_ROUND
    algorithms: tuple[str, ...] = ("mol-ts", "mol-ts-m1", "mol-ucb", "eps-greedy")
    regularizer: float = 1.0
    delta: float = 0.05
    noise_bound: float = 1.0
    optimism_p: float = 0.15
    epsilon: float = 0.05
    num_samples: int | str = "auto"
    constant_scale: float | None = None
    out_dir: str = "results"
    emit_plots: bool = False
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "context_mode", ContextMode(self.context_mode))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if self.horizon < 1 or self.num_instances < 1:
            raise ConfigurationError("horizon and num_instances must be >= 1")
        if self.num_arms < 1 or self.dim < 1 or self.num_objectives < 1:
            raise ConfigurationError("num_arms, dim and num_objectives must be >= 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if not self.algorithms:
            raise ConfigurationError("at least one algorithm is required")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ConfigurationError("algorithm labels must be unique")
        for label in self.algorithms:
            self.policy(label)

    def policy(self, label: str) -> PolicyConfig:
        """Policy configuration for an algorithm label."""
        base = dict(regularizer=self.regularizer, delta=self.delta, noise_bound=self.noise_bound,
                    optimism_p=self.optimism_p, epsilon=self.epsilon, horizon=self.horizon,
                    constant_scale=self.constant_scale)
        if label == "mol-ts":
            return PolicyConfig(Algorithm.MOL_TS, num_samples=self.num_samples, **base)
        if label.startswith("mol-ts-m"):
            tail = label[len("mol-ts-m"):]
            if not tail.isdigit() or int(tail) < 1:
                raise ConfigurationError(f"bad sample count in algorithm label {label!r}")
            return PolicyConfig(Algorithm.MOL_TS, num_samples=int(tail), **base)
        if label == "mol-ucb":
            return PolicyConfig(Algorithm.MOL_UCB, **base)
        if label == "eps-greedy":
            return PolicyConfig(Algorithm.EPS_GREEDY, **base)
        raise ConfigurationError(f"unknown algorithm label {label!r}")

    def make_env(self, instance: int) -> envmod.EnvSpec:
        return envmod.gen_env(derive_rng(self.master_seed, instance, ENV_STREAM), self.num_arms,
                              self.dim, self.num_objectives, self.noise_sigma, self.context_mode)


@dataclass
class RegretLedger:
    """Per-round record of one rollout.

    Attributes
    ----------
    arms : ndarray, shape (T,)
    pareto_gaps, effective_gaps : ndarray, shape (T,)
        True gaps of the chosen arm.
    mean_rewards : ndarray, shape (T, L)
        True mean reward vector of the chosen arm.
    potential : ndarray, shape (T,)
        Squared norm of the chosen context in the inverse-Gram metric,
        taken before the update.
    scales : ndarray, shape (T,)
        Sampling scale (Thompson sampling) or confidence width used.
    max_gap : float
        Largest true effective gap over all rounds and arms, or NaN when
        not tracked.
    """

    label: str
    instance: int
    arms: np.ndarray
    pareto_gaps: np.ndarray
    effective_gaps: np.ndarray
    mean_rewards: np.ndarray
    potential: np.ndarray
    scales: np.ndarray
    max_gap: float = math.nan

    @property
    def horizon(self) -> int:
        return self.arms.shape[0]

    @property
    def cumulative_pr(self) -> np.ndarray:
        return np.cumsum(self.pareto_gaps)

    @property
    def cumulative_epr(self) -> np.ndarray:
        return np.cumsum(self.effective_gaps)

    @property
    def cumulative_rewards(self) -> np.ndarray:
        return np.cumsum(self.mean_rewards, axis=0)

    def check(self, dim: int, regularizer: float) -> None:
        """Raise :class:`InvariantViolation` if a ledger law fails."""
        if np.any(self.pareto_gaps < 0) or np.any(self.effective_gaps < 0):
            raise InvariantViolation(f"{self.label}/{self.instance}: negative gap")
        if np.any(self.pareto_gaps > self.effective_gaps):
            raise InvariantViolation(f"{self.label}/{self.instance}: Pareto gap exceeds effective gap")
        if regularizer >= 1:
            total = float(np.sum(self.potential))
            cap = elliptical_potential_bound(dim, self.horizon, regularizer)
            if total > cap:
                raise InvariantViolation(
                    f"{self.label}/{self.instance}: elliptical potential {total} exceeds {cap}")


@dataclass
class RunFailure:
    label: str
    instance: int
    error: str


def run_instance(config: ExperimentConfig, instance: int, label: str,
                 track_max_gap: bool | None = None) -> RegretLedger:
    """Roll out one algorithm on one instance.

    Gaps are measured against the true mean table, with the true Pareto
    front as the mixing support for the effective gap.
    """
    policy = config.policy(label)
    if track_max_gap is None:
        track_max_gap = policy.algorithm is Algorithm.MOL_TS
    env = config.make_env(instance)
    ctx_rng = derive_rng(config.master_seed, instance, CONTEXT_STREAM)
    noise_rng = derive_rng(config.master_seed, instance, NOISE_STREAM)
    pol_rng = derive_rng(config.master_seed, instance, POLICY_STREAM, label)
    state = RlsState(config.dim, config.num_objectives, config.regularizer)

    T, L = config.horizon, config.num_objectives
    arms = np.empty(T, dtype=np.int64)
    pr = np.empty(T)
    epr = np.empty(T)
    rewards = np.empty((T, L))
    potential = np.empty(T)
    scales = np.empty(T)
    max_gap = 0.0 if track_max_gap else math.nan

    for t in range(T):
        outcome = envmod.gen_contexts(env, ctx_rng)
        decision = select_arm(state, outcome.contexts, policy, pol_rng)
        a = decision.arm
        table = outcome.true_table
        front = np.flatnonzero(pareto._pareto_mask(table))
        pr[t] = pareto._clamp(float(np.min(table[front] - table[a], axis=1).max()))
        epr[t] = pareto._effective_gap(table, a, front)
        if track_max_gap:
            max_gap = max(max_gap, pareto.max_effective_gap(table, front))
        x = outcome.contexts[a]
        potential[t] = state.mahalanobis(x) ** 2
        scales[t] = decision.diagnostics.get("scale", math.nan)
        arms[t] = a
        rewards[t] = table[a]
        state.update(x, outcome.pull(a, noise_rng))

    ledger = RegretLedger(label, instance, arms, pr, epr, rewards, potential, scales, max_gap)
    ledger.check(config.dim, config.regularizer)
    return ledger


def _task(args):
    config, instance, label = args
    try:
        return run_instance(config, instance, label)
    except (MoltsError, ArithmeticError, ValueError) as exc:
        return RunFailure(label, instance, f"{type(exc).__name__}: {exc}")


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    ledgers: dict[str, list[RegretLedger]] = field(default_factory=dict)
    failures: list[RunFailure] = field(default_factory=list)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every (instance, algorithm) task, in parallel when ``workers > 1``."""
    tasks = [(config, i, label) for label in config.algorithms for i in range(config.num_instances)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outputs = list(pool.map(_task, tasks))
    else:
        outputs = [_task(t) for t in tasks]
    result = ExperimentResult(config, {label: [] for label in config.algorithms})
    for out in outputs:
        if isinstance(out, RunFailure):
            log.error("instance %d of %s failed: %s", out.instance, out.label, out.error)
            result.failures.append(out)
        else:
            result.ledgers[out.label].append(out)
    return result


@dataclass
class Summary:
    """Per-round mean and standard deviation, keyed by (algorithm, metric)."""

    rounds: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    series: dict[tuple[str, str], tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    @property
    def algorithms(self) -> list[str]:
        return list(dict.fromkeys(algo for algo, _ in self.series))

    def metrics(self, algo: str) -> list[str]:
        return [m for a, m in self.series if a == algo]

    def mean(self, algo: str, metric: str) -> np.ndarray:
        return self.series[(algo, metric)][0]

    def std(self, algo: str, metric: str) -> np.ndarray:
        return self.series[(algo, metric)][1]


def _mean_std(curves):
    stack = np.stack(curves)
    return stack.mean(axis=0), stack.std(axis=0)


def aggregate(ledgers, summary: Summary | None = None, bound: PolicyConfig | None = None,
              dim: int | None = None) -> Summary:
    """Mean and population standard deviation across instances of one algorithm.

    Parameters
    ----------
    ledgers : sequence of RegretLedger
        Rollouts of a single algorithm with equal horizons.
    summary : Summary, optional
        Summary to extend; a new one is created otherwise.
    bound : PolicyConfig, optional
        When given (together with ``dim``), adds the ``bound`` metric built
        from each ledger's ``max_gap``.
    """
    ledgers = list(ledgers)
    summary = summary if summary is not None else Summary()
    if not ledgers:
        raise ArgumentError("aggregate needs at least one ledger")
    horizons = {g.horizon for g in ledgers}
    if len(horizons) != 1:
        raise ArgumentError(f"ledgers have different horizons: {sorted(horizons)}")
    T = horizons.pop()
    if summary.rounds.size and summary.rounds.size != T:
        raise ArgumentError(f"summary horizon {summary.rounds.size} differs from ledger horizon {T}")
    summary.rounds = np.arange(1, T + 1)
    algo = ledgers[0].label
    summary.series[(algo, "pr")] = _mean_std([g.cumulative_pr for g in ledgers])
    summary.series[(algo, "epr")] = _mean_std([g.cumulative_epr for g in ledgers])
    cum = [g.cumulative_rewards for g in ledgers]
    for obj in range(cum[0].shape[1]):
        summary.series[(algo, f"reward_obj_{obj + 1}")] = _mean_std([c[:, obj] for c in cum])
    if bound is not None:
        L = cum[0].shape[1]
        curves = [regret_bound_curve(summary.rounds, bound, dim, L, g.max_gap, horizon=T) for g in ledgers]
        summary.series[(algo, "bound")] = _mean_std(curves)
    return summary


def summarize(result: ExperimentResult) -> Summary:
    """Aggregate every algorithm; bound rows are added for Thompson-sampling labels."""
    summary = Summary()
    cfg = result.config
    for label, ledgers in result.ledgers.items():
        if not ledgers:
            continue
        policy = cfg.policy(label)
        with_bound = policy.algorithm is Algorithm.MOL_TS
        aggregate(ledgers, summary, policy if with_bound else None, cfg.dim)
    return summary


def emit_csv(summary: Summary, path) -> Path:
    """Write ``round,algo,metric,mean,std`` rows; floats use round-trip repr."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for (algo, metric), (mean, std) in summary.series.items():
                for r, mu, sd in zip(summary.rounds, mean, std):
                    writer.writerow((int(r), algo, metric, repr(float(mu)), repr(float(sd))))
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def read_csv(path) -> Summary:
    """Inverse of :func:`emit_csv`."""
    rows: dict[tuple[str, str], list[tuple[int, float, float]]] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise ConfigurationError(f"{path}: unexpected CSV header {header}")
        for rec in reader:
            rows.setdefault((rec[1], rec[2]), []).append((int(rec[0]), float(rec[3]), float(rec[4])))
    summary = Summary()
    for key, recs in rows.items():
        recs.sort()
        summary.rounds = np.array([r for r, _, _ in recs], dtype=np.int64)
        summary.series[key] = (np.array([m for _, m, _ in recs]), np.array([s for _, _, s in recs]))
    return summary


def emit_plots(summary: Summary, out_dir) -> list[Path]:
    """One SVG per metric: a line per algorithm with a shaded one-sigma band."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metrics = list(dict.fromkeys(m for _, m in summary.series))
    written = []
    with matplotlib.rc_context({"svg.hashsalt": "molts", "svg.fonttype": "none"}):
        for metric in metrics:
            fig, ax = plt.subplots(figsize=(6.4, 4.2))
            for algo in summary.algorithms:
                if (algo, metric) not in summary.series:
                    continue
                mean, std = summary.series[(algo, metric)]
                ax.plot(summary.rounds, mean, label=algo, linewidth=1.2)
                ax.fill_between(summary.rounds, mean - std, mean + std, alpha=0.2)
            ax.set_xlabel("round")
            ax.set_ylabel(metric)
            ax.legend(loc="best", fontsize="small")
            ax.grid(alpha=0.3)
            fig.tight_layout()
            path = out_dir / f"{metric}.svg"
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            written.append(path)
    return written


# Flat ``key = value`` config files; '#' starts a comment.
_KEYS = {
    "seed": ("master_seed", int),
    "instances": ("num_instances", int),
    "rounds": ("horizon", int),
    "arms": ("num_arms", int),
    "dim": ("dim", int),
    "objectives": ("num_objectives", int),
    "sigma": ("noise_sigma", float),
    "context_mode": ("context_mode", ContextMode),
    "algorithms": ("algorithms", lambda v: tuple(s.strip() for s in v.split(",") if s.strip())),
    "regularizer": ("regularizer", float),
    "delta": ("delta", float),
    "noise_bound": ("noise_bound", float),
    "optimism_p": ("optimism_p", float),
    "epsilon": ("epsilon", float),
    "num_samples": ("num_samples", lambda v: v if v == "auto" else int(v)),
    "scale": ("constant_scale", lambda v: None if v == "time-varying" else float(v)),
    "out": ("out_dir", str),
    "plots": ("emit_plots", lambda v: _parse_bool(v)),
    "workers": ("workers", int),
}


def _parse_bool(v):
    low = v.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat config text into ExperimentConfig keyword arguments."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value'")
        if key not in _KEYS:
            raise ConfigurationError(f"{source}:{lineno}: unknown key {key!r}")
        name, conv = _KEYS[key]
        try:
            out[name] = conv(value)
        except ValueError as exc:
            raise ConfigurationError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc
    return out


def load_config(path, **overrides) -> ExperimentConfig:
    """Read a config file; keyword overrides that are not None win."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    kwargs = parse_config_text(text, str(path))
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**kwargs)


def config_to_text(config: ExperimentConfig) -> str:
    """Render a config in the flat file format (inverse of :func:`load_config`)."""
    inverse = {name: key for key, (name, _) in _KEYS.items()}
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if f.name == "algorithms":
            value = ",".join(value)
        elif f.name == "constant_scale":
            value = "time-varying" if value is None else repr(value)
        elif isinstance(value, ContextMode):
            value = value.value
        elif isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{inverse[f.name]} = {value}")
    return "\n".join(lines) + "\n"


def write_outputs(result: ExperimentResult, out_dir=None, plots: bool | None = None) -> Summary:
    """Write summary.csv, the resolved config, instance files and optional plots."""
    cfg = result.config
    out = Path(out_dir or cfg.out_dir)
    summary = summarize(result)
    emit_csv(summary, out / "summary.csv")
    (out / "config.cfg").write_text(config_to_text(replace(cfg, out_dir=str(out))))
    envs = out / "instances"
    envs.mkdir(parents=True, exist_ok=True)
    for i in range(cfg.num_instances):
        envmod.save_env(cfg.make_env(i), envs / f"instance_{i:03d}.json")
    if result.failures:
        with (out / "failures.txt").open("w") as fh:
            for f in result.failures:
                fh.write(f"{f.label}\t{f.instance}\t{f.error}\n")
    if cfg.emit_plots if plots is None else plots:
        emit_plots(summary, out / "plots")
    return summary
