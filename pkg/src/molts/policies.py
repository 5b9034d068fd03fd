"""Bandit policies: multi-sample optimistic Thompson sampling and two baselines.

Every policy is a pure function of ``(state, contexts, config, rng)``
returning a :class:`Decision`; the caller feeds the observed reward back
through :meth:`RlsState.update`. Uniform selection from a front always
consumes exactly one ``rng.integers(len(front))`` draw, indexing the
ascending member list.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import pareto
from .errors import ArgumentError, ConfigurationError
from .linalg import RlsState, SampleBlock
from .pareto import FrontKind, FrontSet


class Algorithm(enum.Enum):
    MOL_TS = "mol-ts"
    MOL_UCB = "mol-ucb"
    EPS_GREEDY = "eps-greedy"


@dataclass(frozen=True)
class PolicyConfig:
    """Hyper-parameters shared by all policies.

    Parameters
    ----------
    algorithm : Algorithm
    regularizer : float
        Ridge parameter.
    delta : float
        Confidence level in (0, 1).
    noise_bound : float
        Sub-Gaussian constant of the reward noise.
    num_samples : int or "auto"
        Draws per objective for Thompson sampling; "auto" resolves to
        :func:`min_samples` of the objective count and ``optimism_p``.
    optimism_p : float
        Target per-objective optimism probability in (0, 1).
    constant_scale : float or None
        Fixed sampling scale; ``None`` uses :func:`confidence_radius` of the
        current round.
    epsilon : float
        Exploration rate of epsilon-greedy, in [0, 1].
    horizon : int
        Planned number of rounds (enters only the theoretical radii).
    """

    algorithm: Algorithm = Algorithm.MOL_TS
    regularizer: float = 1.0
    delta: float = 0.05
    noise_bound: float = 1.0
    num_samples: int | str = "auto"
    optimism_p: float = 0.15
    constant_scale: float | None = None
    epsilon: float = 0.05
    horizon: int = 10_000

    def __post_init__(self):
        if not isinstance(self.algorithm, Algorithm):
            object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if not self.regularizer > 0:
            raise ConfigurationError(f"regularizer must be positive, got {self.regularizer}")
        if not 0 < self.delta < 1:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta}")
        if not self.noise_bound > 0:
            raise ConfigurationError(f"noise_bound must be positive, got {self.noise_bound}")
        if not 0 < self.optimism_p < 1:
            raise ConfigurationError(f"optimism_p must lie in (0, 1), got {self.optimism_p}")
        if self.constant_scale is not None and not self.constant_scale >= 0:
            raise ConfigurationError(f"constant_scale must be >= 0, got {self.constant_scale}")
        if not 0 <= self.epsilon <= 1:
            raise ConfigurationError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if int(self.horizon) < 1:
            raise ConfigurationError(f"horizon must be >= 1, got {self.horizon}")
        if self.num_samples != "auto":
            if isinstance(self.num_samples, bool) or int(self.num_samples) != self.num_samples or self.num_samples < 1:
                raise ConfigurationError(f"num_samples must be 'auto' or a positive integer, got {self.num_samples!r}")
            object.__setattr__(self, "num_samples", int(self.num_samples))

    @property
    def time_varying(self) -> bool:
        return self.constant_scale is None

    def resolved_samples(self, num_objectives: int) -> int:
        if self.num_samples == "auto":
            return min_samples(num_objectives, self.optimism_p)
        return int(self.num_samples)

    def resolve(self, num_objectives: int) -> "PolicyConfig":
        """Copy with ``num_samples`` fixed to an integer."""
        return replace(self, num_samples=self.resolved_samples(num_objectives))


@dataclass
class Decision:
    """Arm chosen in one round.

    ``estimated_rewards`` is the table the front was computed from: sampled
    optimistic values, UCB indices, or plug-in estimates.
    """

    arm: int
    front: FrontSet
    estimated_rewards: np.ndarray
    diagnostics: dict[str, Any] = field(default_factory=dict)


def min_samples(num_objectives: int, p: float = 0.15) -> int:
    """Smallest draw count ``ceil(1 - log L / log(1 - p))``, at least 1."""
    if int(num_objectives) < 1:
        raise ArgumentError(f"num_objectives must be >= 1, got {num_objectives}")
    if not 0 < p < 1:
        raise ArgumentError(f"p must lie in (0, 1), got {p}")
    return max(1, math.ceil(1.0 - math.log(num_objectives) / math.log1p(-p)))


def confidence_radius(t: int, config: PolicyConfig, dim: int, num_objectives: int) -> float:
    """Per-objective confidence radius at round ``t`` (1-based).

    ``R sqrt(d log((1 + (t - 1) / (lambda d)) L / delta)) + sqrt(lambda)``.
    """
    if t < 1:
        raise ArgumentError(f"round must be >= 1, got {t}")
    lam = config.regularizer
    inner = (1.0 + (t - 1) / (lam * dim)) * num_objectives / config.delta
    return config.noise_bound * math.sqrt(dim * math.log(inner)) + math.sqrt(lam)


def _sample_log(config, dim, num_objectives, horizon):
    m = config.resolved_samples(num_objectives)
    return math.log(2.0 * num_objectives * m * dim * horizon / config.delta)


def sampling_radius(t: int, config: PolicyConfig, dim: int, num_objectives: int,
                    horizon: int | None = None) -> float:
    """Radius that contains every sampled parameter with high probability."""
    horizon = config.horizon if horizon is None else horizon
    return confidence_radius(t, config, dim, num_objectives) * math.sqrt(
        2.0 * dim * _sample_log(config, dim, num_objectives, horizon))


def total_radius(config: PolicyConfig, dim: int, num_objectives: int, horizon: int | None = None) -> float:
    """Combined radius at the horizon: confidence radius times ``1 + sqrt(2 d log(2LMdT/delta))``."""
    horizon = config.horizon if horizon is None else horizon
    if horizon < 1:
        raise ArgumentError(f"horizon must be >= 1, got {horizon}")
    c = confidence_radius(horizon, config, dim, num_objectives)
    return c * (1.0 + math.sqrt(2.0 * dim * _sample_log(config, dim, num_objectives, horizon)))


def regret_bound_curve(rounds, config: PolicyConfig, dim: int, num_objectives: int,
                       max_gap: float, horizon: int | None = None) -> np.ndarray:
    """High-probability upper bound on cumulative effective Pareto regret.

    ``(1 + 2 / (p - delta / T)) c_tot sqrt(2 t d log(1 + t / lambda)) + 2 delta max_gap``.
    """
    horizon = config.horizon if horizon is None else horizon
    slack = config.optimism_p - config.delta / horizon
    if slack <= 0:
        raise ConfigurationError("optimism_p must exceed delta / horizon for the bound to be finite")
    t = np.asarray(rounds, dtype=np.float64)
    lead = (1.0 + 2.0 / slack) * total_radius(config, dim, num_objectives, horizon)
    return lead * np.sqrt(2.0 * t * dim * np.log1p(t / config.regularizer)) + 2.0 * config.delta * max_gap


def _scale(state: RlsState, config: PolicyConfig) -> float:
    if config.time_varying:
        return confidence_radius(state.rounds_seen + 1, config, state.dim, state.num_objectives)
    return float(config.constant_scale)


def _contexts(state, contexts):
    X = np.asarray(contexts, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] != state.dim:
        raise ArgumentError(f"contexts must have shape (K, {state.dim}), got {X.shape}")
    return X


def _pick(front: FrontSet, rng) -> int:
    return front.members[int(rng.integers(len(front)))]


def mol_ts_step(state: RlsState, contexts, config: PolicyConfig, rng) -> Decision:
    """One round of multi-sample optimistic Thompson sampling.

    Draws M parameters per objective, scores each arm and objective by the
    largest sampled value, and picks uniformly from the effective Pareto
    front of the resulting table.
    """
    X = _contexts(state, contexts)
    scale = _scale(state, config)
    m = config.resolved_samples(state.num_objectives)
    block = state.sample(scale, m, rng)
    optimistic = block.project(X).max(axis=2)
    front = pareto.effective_front(optimistic)
    arm = _pick(front, rng)
    return Decision(arm, front, optimistic, {
        "scale": scale, "num_samples": m, "samples": block,
        "norms": state.mahalanobis_norms(X),
    })


def mol_ucb_step(state: RlsState, contexts, config: PolicyConfig, rng) -> Decision:
    """Per-objective upper confidence indices, uniform over their Pareto front."""
    X = _contexts(state, contexts)
    radius = confidence_radius(state.rounds_seen + 1, config, state.dim, state.num_objectives)
    norms = state.mahalanobis_norms(X)
    index = state.predict(X) + radius * norms[:, None]
    front = pareto.pareto_front(index)
    arm = _pick(front, rng)
    return Decision(arm, front, index, {"scale": radius, "norms": norms})


def eps_greedy_step(state: RlsState, contexts, config: PolicyConfig, rng) -> Decision:
    """Uniform over all arms with probability epsilon, else over the plug-in Pareto front."""
    X = _contexts(state, contexts)
    plug_in = state.predict(X)
    explore = bool(rng.random() < config.epsilon)
    if explore:
        front = FrontSet(tuple(range(X.shape[0])), FrontKind.ALL)
    else:
        front = pareto.pareto_front(plug_in)
    arm = _pick(front, rng)
    return Decision(arm, front, plug_in, {"explore": explore})


_STEPS = {
    Algorithm.MOL_TS: mol_ts_step,
    Algorithm.MOL_UCB: mol_ucb_step,
    Algorithm.EPS_GREEDY: eps_greedy_step,
}


def select_arm(state: RlsState, contexts, config: PolicyConfig, rng) -> Decision:
    """Dispatch to the step function of ``config.algorithm``."""
    return _STEPS[config.algorithm](state, contexts, config, rng)


def optimism_frequency(state: RlsState, context, config: PolicyConfig, trials: int, rng,
                       chunk: int = 10_000) -> float:
    """Monte-Carlo frequency of joint optimism for a single context.

    A trial succeeds when, for every objective, at least one of the M draws
    (at the current time-varying radius) exceeds the estimate along
    ``context`` by at least that radius times the context's norm.
    """
    if int(trials) < 1:
        raise ArgumentError(f"trials must be >= 1, got {trials}")
    x = np.asarray(context, dtype=np.float64).ravel()
    radius = confidence_radius(state.rounds_seen + 1, config, state.dim, state.num_objectives)
    threshold = radius * state.mahalanobis(x)
    m = config.resolved_samples(state.num_objectives)
    # One (n, L, M, d) normal draw consumes the stream exactly like n
    # consecutive sample blocks; only the projection on x is needed.
    direction = radius * (state.cholesky_inv().T @ x)
    hits = 0
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        lift = rng.standard_normal((n, state.num_objectives, m, state.dim)) @ direction
        hits += int(np.count_nonzero(np.all(lift.max(axis=2) >= threshold, axis=1)))
        done += n
    return hits / trials


__all__ = [
    "Algorithm", "PolicyConfig", "Decision", "SampleBlock", "min_samples",
    "confidence_radius", "sampling_radius", "total_radius", "regret_bound_curve",
    "mol_ts_step", "mol_ucb_step", "eps_greedy_step", "select_arm", "optimism_frequency",
]
