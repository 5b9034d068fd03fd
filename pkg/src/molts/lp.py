"""Small dense linear programs over the probability simplex.

Two canonical problems drive the Pareto geometry:

* ``maximin_over_simplex``: ``max_{beta in simplex} min_l (P @ beta)_l``
* ``dominance_margin``: the largest total surplus ``sum_l (P @ beta - y)_l``
  over simplex weights whose mix covers ``y`` componentwise.

Both are special cases of ``solve_dense_lp``, a two-phase tableau simplex with Bland's
anti-cycling rule. The pivot loop runs in a compiled extension when it is
available; set ``MOLTS_PURE_PYTHON=1`` to force the pure-Python kernel.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np

from . import _simplex_py
from .errors import ArgumentError, NumericalError, UnboundedError

try:
    if os.environ.get("MOLTS_PURE_PYTHON"):
        raise ImportError("pure-Python kernel requested")
    from . import _simplex_core as _kernel
    BACKEND = "cython"
except ImportError:
    _kernel = _simplex_py
    BACKEND = "python"

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
MAX_ITER = 100_000


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpSolution:
    """Result of a simplex-constrained LP.

    ``value`` and ``weights`` are ``None`` when the problem is infeasible.
    For the canonical forms ``weights`` is the optimal simplex vector; for
    :func:`solve_dense_lp` it is the primal solution.
    """

    value: float | None
    weights: np.ndarray | None
    status: LpStatus
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def kernels():
    """Return the available pivot kernels keyed by backend name."""
    out = {"python": _simplex_py}
    if BACKEND == "cython":
        out["cython"] = _kernel
    return out


def _finite_matrix(a, name):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ArgumentError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError(f"{name} contains NaN or Inf")
    return a


def solve_dense_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *, kernel=None) -> LpSolution:
    """Maximize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Parameters
    ----------
    c : array_like, shape (n,)
    A_ub, b_ub : array_like, optional
        Inequality rows; right-hand sides may have any sign.
    A_eq, b_eq : array_like, optional
        Equality rows.
    kernel : module, optional
        Pivot kernel override (see :func:`kernels`); defaults to the fastest.

    Returns
    -------
    LpSolution
        ``status`` is OPTIMAL or INFEASIBLE.

    Raises
    ------
    UnboundedError
        If the objective is unbounded above.
    NumericalError
        If the iteration cap is exceeded.
    """
    c = np.asarray(c, dtype=np.float64).ravel()
    n = c.shape[0]
    if A_ub is None:
        A_ub, b_ub = np.zeros((0, n)), np.zeros(0)
    if A_eq is None:
        A_eq, b_eq = np.zeros((0, n)), np.zeros(0)
    A_ub = np.asarray(A_ub, dtype=np.float64).reshape(-1, n)
    A_eq = np.asarray(A_eq, dtype=np.float64).reshape(-1, n)
    b_ub = np.asarray(b_ub, dtype=np.float64).ravel()
    b_eq = np.asarray(b_eq, dtype=np.float64).ravel()
    if A_ub.shape[0] != b_ub.shape[0] or A_eq.shape[0] != b_eq.shape[0]:
        raise ArgumentError("constraint matrix and right-hand side lengths differ")
    for arr in (c, A_ub, A_eq, b_ub, b_eq):
        if not np.all(np.isfinite(arr)):
            raise ArgumentError("LP data contains NaN or Inf")
    return _solve(kernel or _kernel, c, A_ub, b_ub, A_eq, b_eq)


def _solve(kernel, c, A_ub, b_ub, A_eq, b_eq) -> LpSolution:
    status, x, iters = kernel.solve_lp(A_ub, b_ub, A_eq, b_eq, c, OPT_TOL, MAX_ITER)
    if status == _simplex_py.INFEASIBLE:
        return LpSolution(None, None, LpStatus.INFEASIBLE, iters)
    _check_status(status)
    return LpSolution(float(c @ x), x, LpStatus.OPTIMAL, iters)


def maximin_over_simplex(payoff, *, kernel=None) -> LpSolution:
    """Solve ``max_{beta in simplex} min_l (payoff @ beta)_l``.

    ``payoff`` has shape (L, K): rows are the coordinates being minimized,
    columns the points being mixed. Always feasible.
    """
    return _maximin(_finite_matrix(payoff, "payoff"), kernel or _kernel)


def _maximin(P, kernel=_kernel) -> LpSolution:
    # The kernel shifts entries to >= 1 so the auxiliary level variable is
    # nonnegative and the origin is feasible (no phase I); with positive
    # entries the optimum spends the whole simplex budget.
    status, beta, value, iters = kernel.maximin(P, OPT_TOL, MAX_ITER)
    _check_status(status)
    return LpSolution(value, beta, LpStatus.OPTIMAL, iters)


def dominance_margin(payoff, target, *, kernel=None) -> LpSolution:
    """Largest total surplus of a simplex mix of ``payoff`` columns over ``target``.

    Solves ``max sum_l (payoff @ beta - target)_l`` s.t. ``payoff @ beta >= target``.
    A positive value certifies that some convex combination weakly exceeds
    ``target`` everywhere and strictly somewhere; INFEASIBLE means no mix
    covers it.
    """
    P = _finite_matrix(payoff, "payoff")
    y = np.asarray(target, dtype=np.float64).ravel()
    if y.shape[0] != P.shape[0]:
        raise ArgumentError(f"target has length {y.shape[0]}, expected {P.shape[0]}")
    if not np.all(np.isfinite(y)):
        raise ArgumentError("target contains NaN or Inf")
    return _dominance(P - y[:, None], kernel or _kernel)


def _dominance(D, kernel=_kernel) -> LpSolution:
    # On the simplex, P @ beta - y == (P - y 1^T) @ beta == D @ beta.
    status, beta, value, iters = kernel.dominance(D, OPT_TOL, MAX_ITER)
    if status == _simplex_py.INFEASIBLE:
        return LpSolution(None, None, LpStatus.INFEASIBLE, iters)
    _check_status(status)
    return LpSolution(value, beta, LpStatus.OPTIMAL, iters)


def _check_status(status):
    if status == _simplex_py.UNBOUNDED:
        raise UnboundedError("LP objective is unbounded")
    if status == _simplex_py.ITERATION_LIMIT:
        raise NumericalError(f"simplex iteration cap of {MAX_ITER} exceeded")
    if status == _simplex_py.DEGENERATE:
        raise NumericalError("simplex weights collapsed to zero")
    if status != _simplex_py.OPTIMAL:
        raise NumericalError(f"unexpected LP status {status}")
