"""Pure-Python two-phase tableau simplex (fallback for ``_simplex_core``).

Both backends expose ``solve_lp`` with identical semantics and pivot
sequence, so results agree bit-for-bit up to floating-point reassociation.
"""
from __future__ import annotations

import numpy as np

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3
DEGENERATE = 4

_TIE = 1e-12


def _pivot(tab, row, col):
    tab[row] /= tab[row, col]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, tab[row])


def _run(tab, basis, n_eligible, tol, max_iter, iters):
    """Bland's-rule pivot loop; the last tableau row holds reduced costs."""
    m = tab.shape[0] - 1
    while True:
        obj = tab[m, :n_eligible]
        candidates = np.flatnonzero(obj < -tol)
        if candidates.size == 0:
            return OPTIMAL, iters
        if iters >= max_iter:
            return ITERATION_LIMIT, iters
        col = int(candidates[0])
        best_row = -1
        best_ratio = 0.0
        for i in range(m):
            a = tab[i, col]
            if a > tol:
                ratio = tab[i, -1] / a
                if (best_row < 0 or ratio < best_ratio - _TIE
                        or (ratio <= best_ratio + _TIE and basis[i] < basis[best_row])):
                    best_row = i
                    best_ratio = ratio
        if best_row < 0:
            return UNBOUNDED, iters
        _pivot(tab, best_row, col)
        basis[best_row] = col
        iters += 1


def solve_lp(A_ub, b_ub, A_eq, b_eq, c, tol=1e-9, max_iter=100_000):
    """Maximize ``c @ x`` s.t. ``A_ub @ x <= b_ub``, ``A_eq @ x == b_eq``, ``x >= 0``.

    Returns
    -------
    status : int
        One of OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT.
    x : ndarray
        Primal solution (zeros unless status is OPTIMAL).
    iterations : int
        Total pivots over both phases.
    """
    A_ub = np.asarray(A_ub, dtype=np.float64)
    A_eq = np.asarray(A_eq, dtype=np.float64)
    b_ub = np.asarray(b_ub, dtype=np.float64)
    b_eq = np.asarray(b_eq, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    n = c.shape[0]
    m1 = b_ub.shape[0]
    m2 = b_eq.shape[0]
    m = m1 + m2

    art_rows = [i for i in range(m1) if b_ub[i] < 0] + list(range(m1, m))
    n_art = len(art_rows)
    n_struct = n + m1
    width = n_struct + n_art + 1
    tab = np.zeros((m + 1, width))
    basis = np.empty(m, dtype=np.intp)

    if m1:
        tab[:m1, :n] = A_ub
        tab[:m1, n:n + m1] = np.eye(m1)
        tab[:m1, -1] = b_ub
    if m2:
        tab[m1:m, :n] = A_eq
        tab[m1:m, -1] = b_eq
    for i in range(m):
        if tab[i, -1] < 0:
            tab[i] *= -1.0
    basis[:m1] = np.arange(n, n + m1)
    for k, i in enumerate(art_rows):
        tab[i, n_struct + k] = 1.0
        basis[i] = n_struct + k

    iters = 0
    if n_art:
        tab[m] = 0.0
        for i in art_rows:
            tab[m, :n_struct] -= tab[i, :n_struct]
            tab[m, -1] -= tab[i, -1]
        status, iters = _run(tab, basis, width - 1, tol, max_iter, iters)
        if status == ITERATION_LIMIT:
            return status, np.zeros(n), iters
        if -tab[m, -1] > tol:
            return INFEASIBLE, np.zeros(n), iters
        # Drive zero-level artificials out of the basis where possible.
        for i in range(m):
            if basis[i] >= n_struct:
                nz = np.flatnonzero(np.abs(tab[i, :n_struct]) > tol)
                if nz.size:
                    _pivot(tab, i, int(nz[0]))
                    basis[i] = int(nz[0])
                    iters += 1

    tab[m] = 0.0
    tab[m, :n] = -c
    for i in range(m):
        b = basis[i]
        if b < n and tab[m, b] != 0.0:
            tab[m] -= tab[m, b] * tab[i]
    status, iters = _run(tab, basis, n_struct, tol, max_iter, iters)
    if status != OPTIMAL:
        return status, np.zeros(n), iters

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i, -1]
    return OPTIMAL, x, iters


def _normalize(beta):
    beta = np.clip(beta, 0.0, None)
    total = beta.sum()
    return beta / total if total > 0.0 else None


def maximin(P, tol=1e-9, max_iter=100_000):
    """Simplex weights maximizing ``min(P @ beta)``.

    Returns (status, beta, min(P @ beta), iterations).
    """
    P = np.asarray(P, dtype=np.float64)
    L, K = P.shape
    lo = P.min() - 1.0
    A = np.zeros((L + 1, K + 1))
    A[:L, :K] = lo - P
    A[:L, K] = 1.0
    A[L, :K] = 1.0
    b = np.zeros(L + 1)
    b[L] = 1.0
    c = np.zeros(K + 1)
    c[K] = 1.0
    status, x, iters = solve_lp(A, b, np.zeros((0, K + 1)), np.zeros(0), c, tol, max_iter)
    if status != OPTIMAL:
        return status, np.zeros(K), 0.0, iters
    beta = _normalize(x[:K])
    if beta is None:
        return DEGENERATE, np.zeros(K), 0.0, iters
    return OPTIMAL, beta, float(np.min(P @ beta)), iters


def dominance(D, tol=1e-9, max_iter=100_000):
    """Simplex weights maximizing ``sum(D @ beta)`` s.t. ``D @ beta >= 0``.

    Returns (status, beta, sum(D @ beta), iterations).
    """
    D = np.asarray(D, dtype=np.float64)
    L, K = D.shape
    status, x, iters = solve_lp(-D, np.zeros(L), np.ones((1, K)), np.ones(1),
                                D.sum(axis=0), tol, max_iter)
    if status != OPTIMAL:
        return status, np.zeros(K), 0.0, iters
    beta = _normalize(x)
    if beta is None:
        return DEGENERATE, np.zeros(K), 0.0, iters
    return OPTIMAL, beta, float(np.sum(D @ beta)), iters
