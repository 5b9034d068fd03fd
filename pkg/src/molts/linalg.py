"""Ridge-regression state shared by every policy.

One Gram matrix ``V = lambda I + sum x x^T`` serves all L objectives; each
objective keeps its own moment vector ``Z_l = sum x r_l`` and estimate
``theta_hat_l = V^{-1} Z_l``. The inverse is maintained by rank-one
(Sherman-Morrison) updates and periodically recomputed from ``V`` by a
Cholesky factorization to bound drift.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .errors import ArgumentError, ConfigurationError, NumericalError

REFRESH_EVERY = 512


@dataclass(frozen=True)
class SampleBlock:
    """Parameter draws of shape (L, M, d), objective-major.

    ``samples[l, m]`` is the m-th draw for objective l.
    """

    samples: np.ndarray

    @property
    def num_objectives(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    def project(self, contexts) -> np.ndarray:
        """Values ``x_a @ theta[l, m]`` with shape (K, L, M)."""
        return np.einsum("kd,lmd->klm", np.asarray(contexts, dtype=np.float64), self.samples)


@dataclass
class RlsState:
    """Regularized least-squares sufficient statistics.

    Parameters
    ----------
    dim : int
        Feature dimension d.
    num_objectives : int
        Number of reward coordinates L.
    regularizer : float
        Ridge parameter lambda > 0.
    refresh_every : int
        Recompute the inverse from the Gram matrix after this many updates.
    """

    dim: int
    num_objectives: int
    regularizer: float = 1.0
    refresh_every: int = REFRESH_EVERY
    gram: np.ndarray = field(init=False, repr=False)
    gram_inv: np.ndarray = field(init=False, repr=False)
    moments: np.ndarray = field(init=False, repr=False)
    estimates: np.ndarray = field(init=False, repr=False)
    rounds_seen: int = field(init=False, default=0)
    _chol: np.ndarray | None = field(init=False, default=None, repr=False)

    def __post_init__(self):
        if int(self.dim) < 1 or int(self.num_objectives) < 1:
            raise ConfigurationError("dim and num_objectives must be positive integers")
        if not (self.regularizer > 0 and math.isfinite(self.regularizer)):
            raise ConfigurationError(f"regularizer must be positive, got {self.regularizer}")
        if self.refresh_every < 1:
            raise ConfigurationError("refresh_every must be >= 1")
        d, L = int(self.dim), int(self.num_objectives)
        self.dim, self.num_objectives = d, L
        self.gram = self.regularizer * np.eye(d)
        self.gram_inv = np.eye(d) / self.regularizer
        self.moments = np.zeros((L, d))
        self.estimates = np.zeros((L, d))

    def _vector(self, x, n, name):
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.shape[0] != n:
            raise ArgumentError(f"{name} has length {x.shape[0]}, expected {n}")
        if not np.all(np.isfinite(x)):
            raise ArgumentError(f"{name} contains NaN or Inf")
        return x

    def update(self, context, rewards) -> "RlsState":
        """Absorb one observation ``(x, r)``; mutates and returns ``self``."""
        x = self._vector(context, self.dim, "context")
        r = self._vector(rewards, self.num_objectives, "rewards")
        vx = self.gram_inv @ x
        inv = self.gram_inv - np.outer(vx, vx) / (1.0 + x @ vx)
        self.gram_inv = 0.5 * (inv + inv.T)
        self.gram += np.outer(x, x)
        self.moments += r[:, None] * x[None, :]
        self.rounds_seen += 1
        if self.rounds_seen % self.refresh_every == 0:
            self.refactor()
        self.estimates = self.moments @ self.gram_inv
        self._chol = None
        return self

    def refactor(self):
        """Recompute ``gram_inv`` from ``gram`` by Cholesky factorization."""
        try:
            factor = sla.cho_factor(self.gram, lower=True, check_finite=False)
        except np.linalg.LinAlgError as exc:
            raise NumericalError("Gram matrix lost positive definiteness") from exc
        inv = sla.cho_solve(factor, np.eye(self.dim), check_finite=False)
        self.gram_inv = 0.5 * (inv + inv.T)
        self.estimates = self.moments @ self.gram_inv
        self._chol = None

    def cholesky_inv(self) -> np.ndarray:
        """Lower Cholesky factor of ``gram_inv`` (cached until the next update)."""
        if self._chol is None:
            try:
                self._chol = np.linalg.cholesky(self.gram_inv)
            except np.linalg.LinAlgError as exc:
                raise NumericalError("inverse Gram matrix is not positive definite") from exc
        return self._chol

    def sample(self, scale: float, num_samples: int, rng: np.random.Generator) -> SampleBlock:
        """Draw ``num_samples`` parameters per objective from N(theta_hat, scale^2 V^{-1}).

        Standard-normal draws are consumed objective-major, sample-minor.
        """
        if not (scale >= 0 and math.isfinite(scale)):
            raise ArgumentError(f"scale must be a finite nonnegative number, got {scale}")
        if int(num_samples) < 1:
            raise ArgumentError(f"num_samples must be >= 1, got {num_samples}")
        chol = self.cholesky_inv()
        g = rng.standard_normal((self.num_objectives, int(num_samples), self.dim))
        return SampleBlock(self.estimates[:, None, :] + scale * (g @ chol.T))

    def mahalanobis(self, context) -> float:
        """``||x||`` in the ``V^{-1}`` metric."""
        x = self._vector(context, self.dim, "context")
        return math.sqrt(max(float(x @ self.gram_inv @ x), 0.0))

    def mahalanobis_norms(self, contexts) -> np.ndarray:
        """Row-wise :meth:`mahalanobis` for a (K, d) matrix."""
        X = np.asarray(contexts, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ArgumentError(f"contexts must have shape (K, {self.dim}), got {X.shape}")
        q = np.einsum("kd,de,ke->k", X, self.gram_inv, X)
        return np.sqrt(np.clip(q, 0.0, None))

    def predict(self, contexts) -> np.ndarray:
        """Plug-in reward table ``x_a @ theta_hat_l`` of shape (K, L)."""
        return np.asarray(contexts, dtype=np.float64) @ self.estimates.T


def elliptical_potential_bound(dim: int, horizon: int, regularizer: float) -> float:
    """Upper bound ``2 d log(1 + T / lambda)`` on the summed squared norms.

    Valid for ``regularizer >= 1`` and contexts of norm at most one.
    """
    return 2.0 * dim * math.log1p(horizon / regularizer)
