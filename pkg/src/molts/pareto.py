"""Pareto and effective-Pareto geometry of finite reward tables.

A reward table is a (K, L) array: one row of L mean rewards per arm. Arm
``a`` is *Pareto optimal* when no other row dominates it, and *effective
Pareto optimal* when no convex combination of rows dominates it. The
matching sub-optimality gaps measure the smallest uniform boost that
would make an arm optimal in each sense.

All set-valued results are tuples of arm indices in ascending order.
Strict-dominance decisions treat surpluses at or below ``TOL_DOM`` as
ties, and gaps at or below ``TOL_DOM`` are reported as exactly zero.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import lp
from .errors import ArgumentError

TOL_DOM = 1e-7


class FrontKind(enum.Enum):
    PARETO = "pareto"
    EFFECTIVE = "effective"
    # Every arm; used for the uniform-exploration branch of epsilon-greedy.
    ALL = "all"


@dataclass(frozen=True)
class FrontSet:
    members: tuple[int, ...]
    kind: FrontKind

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, arm):
        return arm in self.members


def as_table(rows) -> np.ndarray:
    """Validate and return a reward table as a float (K, L) array."""
    table = np.asarray(rows, dtype=np.float64)
    if table.ndim == 1:
        table = table[:, None]
    if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
        raise ArgumentError(f"reward table must be (K, L) with K, L >= 1, got shape {table.shape}")
    if not np.all(np.isfinite(table)):
        raise ArgumentError("reward table contains NaN or Inf")
    return table


def _arm_index(table, arm):
    if not 0 <= int(arm) < table.shape[0]:
        raise ArgumentError(f"arm {arm} out of range for {table.shape[0]} arms")
    return int(arm)


def dominates(u, v, tol: float = 0.0) -> bool:
    """True iff ``u`` Pareto-dominates ``v``.

    That is, ``v <= u`` everywhere and ``u - v > tol`` somewhere.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ArgumentError(f"length mismatch: {u.shape} vs {v.shape}")
    diff = u - v
    return bool(np.all(diff >= 0.0) and np.any(diff > tol))


def _pareto_mask(table):
    # With diff[a, b] = mu_b - mu_a per objective, arm a is dominated if some b
    # is >= everywhere and better by more than TOL_DOM somewhere. Looping over
    # the few objectives beats reducing along a short trailing axis.
    K = table.shape[0]
    covers = np.ones((K, K), dtype=bool)
    beats = np.zeros((K, K), dtype=bool)
    for col in table.T:
        diff = col[None, :] - col[:, None]
        covers &= diff >= 0.0
        beats |= diff > TOL_DOM
    return ~np.any(covers & beats, axis=1)


def pareto_front(table) -> FrontSet:
    table = as_table(table)
    members = np.flatnonzero(_pareto_mask(table))
    return FrontSet(tuple(int(a) for a in members), FrontKind.PARETO)


def _is_effective(table, arm, support):
    sol = lp._dominance(table[support].T - table[arm][:, None])
    return not sol.feasible or sol.value <= TOL_DOM


def effective_front(table, support: Sequence[int] | None = None) -> FrontSet:
    """Arms that no convex combination of rows strictly dominates.

    Parameters
    ----------
    table : array_like, shape (K, L)
    support : sequence of int, optional
        Rows allowed in the dominating mixture. Defaults to the Pareto
        front, which yields the same answer as using every row: any mix
        is weakly dominated by a mix of Pareto-optimal rows.

    Notes
    -----
    Only Pareto-optimal arms are tested, so the result is always a subset
    of :func:`pareto_front`. The candidate's own row may sit in the
    support; putting weight on it never creates strict dominance.
    """
    table = as_table(table)
    pareto = np.flatnonzero(_pareto_mask(table))
    cols = pareto if support is None else np.asarray(support, dtype=np.intp)
    if table.shape[1] == 1 or len(pareto) == 1:
        return FrontSet(tuple(int(a) for a in pareto), FrontKind.EFFECTIVE)
    members = tuple(int(a) for a in pareto if _is_effective(table, a, cols))
    return FrontSet(members, FrontKind.EFFECTIVE)


def _clamp(gap):
    return gap if gap > TOL_DOM else 0.0


def pareto_gaps(table, front: Iterable[int] | None = None) -> np.ndarray:
    """Pareto sub-optimality gap of every arm.

    ``gap[a] = max_{b in front} min_l (mu_b - mu_a)_l``, clamped at zero.
    """
    table = as_table(table)
    idx = np.flatnonzero(_pareto_mask(table)) if front is None else np.fromiter(front, dtype=np.intp)
    raw = np.min(table[idx][None, :, :] - table[:, None, :], axis=2).max(axis=1)
    return np.where(raw > TOL_DOM, raw, 0.0)


def pareto_gap(table, arm) -> float:
    table = as_table(table)
    arm = _arm_index(table, arm)
    front = np.flatnonzero(_pareto_mask(table))
    return _clamp(float(np.min(table[front] - table[arm], axis=1).max()))


def effective_gap(table, arm, support: Sequence[int] | None = None) -> float:
    """Effective Pareto sub-optimality gap of ``arm``.

    The clamped value of ``max_{beta in simplex} min_l (sum_b beta_b mu_b - mu_arm)_l``.
    By default ``beta`` ranges over every arm; passing the Pareto or
    effective front as ``support`` gives the same value with a smaller LP.
    """
    table = as_table(table)
    arm = _arm_index(table, arm)
    cols = np.arange(table.shape[0]) if support is None else np.asarray(support, dtype=np.intp)
    return _effective_gap(table, arm, cols)


def _effective_gap(table, arm, cols):
    diff = table[cols] - table[arm]
    # The one-hot mixes are feasible points of the LP; evaluating them
    # exactly keeps the result >= the Pareto gap despite rounding.
    best = float(np.min(diff, axis=1).max())
    if table.shape[1] > 1 and len(cols) > 1:
        best = max(best, lp._maximin(np.ascontiguousarray(diff.T)).value)
    return _clamp(best)


def effective_gaps(table, support: Sequence[int] | None = None) -> np.ndarray:
    """Effective Pareto gap of every arm (support defaults to the Pareto front)."""
    table = as_table(table)
    cols = np.flatnonzero(_pareto_mask(table)) if support is None else np.asarray(support, dtype=np.intp)
    return np.array([_effective_gap(table, a, cols) for a in range(table.shape[0])])


def max_effective_gap(table, support: Sequence[int] | None = None) -> float:
    """Largest effective gap over all arms.

    ``min_l max_b (mu_b - mu_a)_l`` bounds each arm's gap from above, so
    arms are visited in decreasing order of that bound and the scan stops
    once no remaining arm can beat the best gap found.
    """
    table = as_table(table)
    cols = np.flatnonzero(_pareto_mask(table)) if support is None else np.asarray(support, dtype=np.intp)
    upper = np.min(table[cols].max(axis=0)[None, :] - table, axis=1)
    best = 0.0
    for a in np.argsort(-upper, kind="stable"):
        if upper[a] <= best:
            break
        best = max(best, _effective_gap(table, int(a), cols))
    return best


def _check_weights(weights, n):
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.shape[0] != n:
        raise ArgumentError(f"weights have length {w.shape[0]}, expected {n}")
    if not np.all(np.isfinite(w)) or np.any(w < -1e-12) or abs(w.sum() - 1.0) > 1e-9:
        raise ArgumentError("weights must be a nonnegative vector summing to 1")
    return w


def scalarized_argmax(table, weights) -> tuple[int, ...]:
    """All arms maximizing ``weights @ mu_a`` (scores within ``TOL_DOM`` tie)."""
    table = as_table(table)
    w = _check_weights(weights, table.shape[1])
    scores = table @ w
    return tuple(int(a) for a in np.flatnonzero(scores >= scores.max() - TOL_DOM))


def weight_for_arm(table, arm) -> np.ndarray | None:
    """A simplex weight under which ``arm`` attains the scalarized maximum.

    Solves ``max_w min_{b != arm} w @ (mu_arm - mu_b)`` over the L-simplex,
    so the returned weight maximizes the arm's worst-case lead. Returns
    ``None`` when even the best weight leaves the arm behind some other arm
    by more than ``TOL_DOM``.
    """
    table = as_table(table)
    arm = _arm_index(table, arm)
    K, L = table.shape
    if K == 1:
        return np.full(L, 1.0 / L)
    others = np.delete(np.arange(K), arm)
    lead = table[arm] - table[others]          # (K-1, L): rows are "objectives" of the LP
    sol = lp._maximin(np.ascontiguousarray(lead))
    if sol.value < -TOL_DOM:
        return None
    return sol.weights
