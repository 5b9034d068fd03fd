"""Independent brute-force references used by the test suite.

Nothing here calls the package's LP code.
"""
import itertools

import numpy as np


def simplex_grid(k, step):
    """All points of the (k-1)-simplex whose coordinates are multiples of ``step``."""
    n = round(1 / step)
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        i = np.arange(n + 1)
        return np.column_stack([i, n - i]) / n
    pts = np.array([c for c in itertools.product(range(n + 1), repeat=k - 1) if sum(c) <= n],
                   dtype=np.float64)
    return np.column_stack([pts, n - pts.sum(axis=1)]) / n


def _simplex_grid_3(n):
    # Fast path for k=3: enumerate (i, j) with i + j <= n.
    i, j = np.triu_indices(n + 1)
    j = j - i
    pts = np.column_stack([i, j, n - i - j]).astype(np.float64)
    return pts / n


_GRID_CACHE = {}


def weight_grid(L, step=1e-3):
    key = (L, step)
    if key not in _GRID_CACHE:
        n = round(1 / step)
        _GRID_CACHE[key] = _simplex_grid_3(n) if L == 3 else simplex_grid(L, step)
    return _GRID_CACHE[key]


def grid_effective_gaps(table, step=1e-3):
    """Effective gaps of every arm from a weight-simplex grid.

    By the minimax theorem for the bilinear form ``w @ (M beta - mu_a)``,
    the mixing gap ``max_beta min_l`` equals ``min_w max_b w @ (mu_b - mu_a)``.
    The grid minimum over ``w`` is an upper bound that is tight up to the
    lattice resolution; an arm is a member when some lattice weight makes it
    a scalarized maximizer (grid value exactly 0).
    """
    table = np.asarray(table, dtype=np.float64)
    W = weight_grid(table.shape[1], step)
    scores = W @ table.T                          # (N, K)
    lead = scores.max(axis=1, keepdims=True) - scores
    return lead.min(axis=0)


def mixing_grid_gap(table, arm, step):
    """``max_beta min_l (M beta - mu_arm)_l`` over a beta-simplex grid (small K only)."""
    table = np.asarray(table, dtype=np.float64)
    B = simplex_grid(table.shape[0], step)
    return float(np.min(B @ table - table[arm], axis=1).max())


def pairwise_pareto(table):
    """Pareto front by the textbook double loop."""
    table = np.asarray(table, dtype=np.float64)
    K = table.shape[0]
    front = []
    for a in range(K):
        dominated = False
        for b in range(K):
            if b != a and np.all(table[b] >= table[a]) and np.any(table[b] > table[a]):
                dominated = True
                break
        if not dominated:
            front.append(a)
    return tuple(front)


def direct_ridge(contexts, rewards, lam):
    """Ridge estimates and inverse Gram matrix by a dense solve."""
    X = np.asarray(contexts, dtype=np.float64)
    R = np.asarray(rewards, dtype=np.float64)
    d = X.shape[1]
    V = lam * np.eye(d) + X.T @ X
    return np.linalg.solve(V, X.T @ R).T, np.linalg.inv(V)
