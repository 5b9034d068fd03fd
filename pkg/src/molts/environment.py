"""Synthetic multi-objective linear contextual bandit instances.

Hidden parameters are drawn uniformly on the unit sphere, contexts
uniformly in the unit ball, and rewards are linear means plus independent
Gaussian noise per objective. Instances round-trip through a small JSON
document for replay.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ArgumentError, ConfigurationError

SCHEMA_VERSION = 1


class ContextMode(enum.Enum):
    PER_ROUND = "per-round"
    FIXED = "fixed"


@dataclass
class EnvSpec:
    """A problem instance.

    Parameters
    ----------
    num_arms, dim, num_objectives : int
    true_params : ndarray, shape (L, d)
        Unit-norm hidden parameter per objective.
    noise_sigma : float
        Standard deviation of the per-objective Gaussian noise.
    context_mode : ContextMode
        ``FIXED`` reuses the first round's contexts forever.
    """

    num_arms: int
    dim: int
    num_objectives: int
    true_params: np.ndarray
    noise_sigma: float = 1.0
    context_mode: ContextMode = ContextMode.PER_ROUND
    _fixed: np.ndarray | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("num_arms", "dim", "num_objectives"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be a positive integer")
        if not self.noise_sigma >= 0:
            raise ConfigurationError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        self.context_mode = ContextMode(self.context_mode)
        self.true_params = np.asarray(self.true_params, dtype=np.float64)
        if self.true_params.shape != (self.num_objectives, self.dim):
            raise ConfigurationError(
                f"true_params must have shape ({self.num_objectives}, {self.dim}), got {self.true_params.shape}")
        norms = np.linalg.norm(self.true_params, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ConfigurationError("every hidden parameter must have unit norm")


@dataclass(frozen=True)
class RoundOutcome:
    """Contexts of one round and the exact mean-reward table they induce."""

    contexts: np.ndarray
    true_table: np.ndarray
    noise_sigma: float

    def pull(self, arm: int, rng: np.random.Generator) -> np.ndarray:
        """Noisy reward vector of ``arm``; one normal draw per objective."""
        return pull(self, arm, rng)


def _unit_rows(g):
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def gen_env(seed, num_arms: int, dim: int, num_objectives: int, noise_sigma: float = 1.0,
            context_mode: ContextMode | str = ContextMode.PER_ROUND) -> EnvSpec:
    """Draw hidden parameters uniformly on the unit sphere.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if int(dim) < 1 or int(num_objectives) < 1:
        raise ConfigurationError("dim and num_objectives must be positive integers")
    g = rng.standard_normal((int(num_objectives), int(dim)))
    while np.any(np.linalg.norm(g, axis=1) == 0.0):   # measure-zero, but cheap to guard
        g = rng.standard_normal(g.shape)
    return EnvSpec(int(num_arms), int(dim), int(num_objectives), _unit_rows(g),
                   float(noise_sigma), ContextMode(context_mode))


def sample_ball(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """``n`` points uniform in the closed unit ball of R^dim."""
    direction = rng.standard_normal((n, dim))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radius = rng.random((n, 1)) ** (1.0 / dim)
    points = direction / norms * radius
    # Guard against rounding pushing a norm a hair above one.
    over = np.linalg.norm(points, axis=1) > 1.0
    if np.any(over):
        points[over] /= np.linalg.norm(points[over], axis=1, keepdims=True)
    return points


def gen_contexts(env: EnvSpec, rng: np.random.Generator) -> RoundOutcome:
    """Contexts for the next round; fixed mode draws once and caches."""
    if env.context_mode is ContextMode.FIXED:
        if env._fixed is None:
            env._fixed = sample_ball(rng, env.num_arms, env.dim)
        contexts = env._fixed
    else:
        contexts = sample_ball(rng, env.num_arms, env.dim)
    return RoundOutcome(contexts, contexts @ env.true_params.T, env.noise_sigma)


def pull(outcome: RoundOutcome, arm: int, rng: np.random.Generator) -> np.ndarray:
    K = outcome.true_table.shape[0]
    if not 0 <= int(arm) < K:
        raise ArgumentError(f"arm {arm} out of range for {K} arms")
    noise = rng.standard_normal(outcome.true_table.shape[1])
    return outcome.true_table[int(arm)] + outcome.noise_sigma * noise


def env_to_dict(env: EnvSpec) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "num_arms": env.num_arms,
        "dim": env.dim,
        "num_objectives": env.num_objectives,
        "noise_sigma": env.noise_sigma,
        "context_mode": env.context_mode.value,
        "true_params": env.true_params.tolist(),
    }


def env_from_dict(doc: dict) -> EnvSpec:
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigurationError(f"unsupported environment schema {doc.get('schema')!r}")
    try:
        return EnvSpec(int(doc["num_arms"]), int(doc["dim"]), int(doc["num_objectives"]),
                       np.array(doc["true_params"], dtype=np.float64), float(doc["noise_sigma"]),
                       ContextMode(doc["context_mode"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigurationError):
            raise
        raise ConfigurationError(f"malformed environment document: {exc}") from exc


def save_env(env: EnvSpec, path) -> None:
    Path(path).write_text(json.dumps(env_to_dict(env), indent=2) + "\n")


def load_env(path) -> EnvSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read environment file {path}: {exc}") from exc
    return env_from_dict(doc)
