# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled two-phase tableau simplex.

Mirrors ``molts._simplex_py`` pivot for pivot; see that module for the
contract of ``solve_lp``, ``maximin`` and ``dominance``.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport calloc, free

cnp.import_array()

cdef double TIE = 1e-12

cdef int OPTIMAL = 0
cdef int INFEASIBLE = 1
cdef int UNBOUNDED = 2
cdef int ITERATION_LIMIT = 3
cdef int DEGENERATE = 4


cdef void _pivot(double* tab, Py_ssize_t rows, Py_ssize_t width,
                 Py_ssize_t row, Py_ssize_t col) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double* prow = tab + row * width
    cdef double* r
    cdef double p = prow[col]
    cdef double f
    for j in range(width):
        prow[j] /= p
    for i in range(rows):
        if i == row:
            continue
        r = tab + i * width
        f = r[col]
        if f != 0.0:
            for j in range(width):
                r[j] -= f * prow[j]


cdef int _run(double* tab, Py_ssize_t* basis, Py_ssize_t m, Py_ssize_t width,
              Py_ssize_t n_eligible, double tol, long max_iter, long* iters) noexcept nogil:
    # Bland's rule; row m holds reduced costs, column width-1 the rhs.
    cdef Py_ssize_t rhs = width - 1
    cdef double* obj = tab + m * width
    cdef Py_ssize_t i, j, col, best_row
    cdef double a, ratio, best_ratio
    while True:
        col = -1
        for j in range(n_eligible):
            if obj[j] < -tol:
                col = j
                break
        if col < 0:
            return OPTIMAL
        if iters[0] >= max_iter:
            return ITERATION_LIMIT
        best_row = -1
        best_ratio = 0.0
        for i in range(m):
            a = tab[i * width + col]
            if a > tol:
                ratio = tab[i * width + rhs] / a
                if (best_row < 0 or ratio < best_ratio - TIE
                        or (ratio <= best_ratio + TIE and basis[i] < basis[best_row])):
                    best_row = i
                    best_ratio = ratio
        if best_row < 0:
            return UNBOUNDED
        _pivot(tab, m + 1, width, best_row, col)
        basis[best_row] = col
        iters[0] += 1


cdef int _two_phase(double* tab, Py_ssize_t* basis, Py_ssize_t m, Py_ssize_t width,
                    double* c, Py_ssize_t n, Py_ssize_t n_struct, Py_ssize_t n_art,
                    double tol, long max_iter, double* x, long* iters) noexcept nogil:
    # Constraint rows arrive with nonnegative rhs, slack/artificial columns
    # and the starting basis in place; row m is overwritten.
    cdef Py_ssize_t rhs = width - 1
    cdef double* obj = tab + m * width
    cdef double* r
    cdef Py_ssize_t i, j, b
    cdef int status
    cdef double f

    for j in range(width):
        obj[j] = 0.0
    if n_art:
        for i in range(m):
            if basis[i] >= n_struct:
                r = tab + i * width
                for j in range(n_struct):
                    obj[j] -= r[j]
                obj[rhs] -= r[rhs]
        status = _run(tab, basis, m, width, width - 1, tol, max_iter, iters)
        if status == ITERATION_LIMIT:
            return status
        if -obj[rhs] > tol:
            return INFEASIBLE
        for i in range(m):
            if basis[i] >= n_struct:
                r = tab + i * width
                for j in range(n_struct):
                    if r[j] > tol or r[j] < -tol:
                        _pivot(tab, m + 1, width, i, j)
                        basis[i] = j
                        iters[0] += 1
                        break

    for j in range(width):
        obj[j] = 0.0
    for j in range(n):
        obj[j] = -c[j]
    for i in range(m):
        b = basis[i]
        if b < n and obj[b] != 0.0:
            f = obj[b]
            r = tab + i * width
            for j in range(width):
                obj[j] -= f * r[j]
    status = _run(tab, basis, m, width, n_struct, tol, max_iter, iters)
    if status != OPTIMAL:
        return status
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i * width + rhs]
    return OPTIMAL


cdef int _normalize(double* beta, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t j
    cdef double total = 0.0
    for j in range(k):
        if beta[j] < 0.0:
            beta[j] = 0.0
        total += beta[j]
    if total <= 0.0:
        return 0
    for j in range(k):
        beta[j] /= total
    return 1


def solve_lp(A_ub, b_ub, A_eq, b_eq, c, double tol=1e-9, long max_iter=100000):
    cdef double[::1] cc = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t n = cc.shape[0]
    cdef double[:, ::1] aub = np.ascontiguousarray(A_ub, dtype=np.float64).reshape(len(b_ub), n)
    cdef double[:, ::1] aeq = np.ascontiguousarray(A_eq, dtype=np.float64).reshape(len(b_eq), n)
    cdef double[::1] bub = np.ascontiguousarray(b_ub, dtype=np.float64)
    cdef double[::1] beq = np.ascontiguousarray(b_eq, dtype=np.float64)
    cdef Py_ssize_t m1 = bub.shape[0]
    cdef Py_ssize_t m2 = beq.shape[0]
    cdef Py_ssize_t m = m1 + m2
    cdef Py_ssize_t i, j, k, n_art = m2
    cdef long iters = 0
    cdef int status
    cdef double* row

    for i in range(m1):
        if bub[i] < 0:
            n_art += 1
    cdef Py_ssize_t n_struct = n + m1
    cdef Py_ssize_t width = n_struct + n_art + 1
    cdef Py_ssize_t rhs = width - 1
    x_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] x = x_arr
    cdef double* tab = <double*> calloc((m + 1) * width, sizeof(double))
    cdef Py_ssize_t* basis = <Py_ssize_t*> calloc(m + 1, sizeof(Py_ssize_t))
    if tab == NULL or basis == NULL:
        free(tab)
        free(basis)
        raise MemoryError()
    try:
        for i in range(m1):
            row = tab + i * width
            for j in range(n):
                row[j] = aub[i, j]
            row[n + i] = 1.0
            row[rhs] = bub[i]
            basis[i] = n + i
        for i in range(m2):
            row = tab + (m1 + i) * width
            for j in range(n):
                row[j] = aeq[i, j]
            row[rhs] = beq[i]
        for i in range(m):
            row = tab + i * width
            if row[rhs] < 0:
                for j in range(width):
                    row[j] = -row[j]
        # Artificial columns: negative-rhs inequality rows first, then equality rows.
        k = 0
        for i in range(m1):
            if bub[i] < 0:
                tab[i * width + n_struct + k] = 1.0
                basis[i] = n_struct + k
                k += 1
        for i in range(m1, m):
            tab[i * width + n_struct + k] = 1.0
            basis[i] = n_struct + k
            k += 1
        status = _two_phase(tab, basis, m, width, &cc[0] if n else NULL, n, n_struct,
                            n_art, tol, max_iter, &x[0] if n else NULL, &iters)
    finally:
        free(tab)
        free(basis)
    if status != OPTIMAL:
        x_arr[:] = 0.0
    return status, x_arr, iters


def maximin(P, double tol=1e-9, long max_iter=100000):
    """Return (status, beta, min(P @ beta), iterations)."""
    cdef double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef Py_ssize_t L = p.shape[0]
    cdef Py_ssize_t K = p.shape[1]
    cdef Py_ssize_t n = K + 1
    cdef Py_ssize_t m = L + 1
    cdef Py_ssize_t width = n + m + 1
    cdef Py_ssize_t rhs = width - 1
    cdef Py_ssize_t i, j
    cdef long iters = 0
    cdef int status
    cdef double lo = p[0, 0]
    cdef double value = 0.0, acc
    cdef double* row
    for i in range(L):
        for j in range(K):
            if p[i, j] < lo:
                lo = p[i, j]
    lo -= 1.0
    beta_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] beta = beta_arr
    cdef double* tab = <double*> calloc((m + 1) * width, sizeof(double))
    cdef Py_ssize_t* basis = <Py_ssize_t*> calloc(m, sizeof(Py_ssize_t))
    cdef double* c = <double*> calloc(2 * n, sizeof(double))
    if tab == NULL or basis == NULL or c == NULL:
        free(tab)
        free(basis)
        free(c)
        raise MemoryError()
    cdef double* x = c + n
    with nogil:
        c[K] = 1.0
        for i in range(L):
            row = tab + i * width
            for j in range(K):
                row[j] = lo - p[i, j]
            row[K] = 1.0
            row[n + i] = 1.0
            basis[i] = n + i
        row = tab + L * width
        for j in range(K):
            row[j] = 1.0
        row[n + L] = 1.0
        row[rhs] = 1.0
        basis[L] = n + L
        status = _two_phase(tab, basis, m, width, c, n, n + m, 0, tol, max_iter, x, &iters)
        if status == OPTIMAL:
            for j in range(K):
                beta[j] = x[j]
            if not _normalize(&beta[0], K):
                status = DEGENERATE
        if status == OPTIMAL:
            for i in range(L):
                acc = 0.0
                for j in range(K):
                    acc += p[i, j] * beta[j]
                if i == 0 or acc < value:
                    value = acc
    free(tab)
    free(basis)
    free(c)
    return status, beta_arr, value, iters


def dominance(D, double tol=1e-9, long max_iter=100000):
    """Return (status, beta, sum(D @ beta), iterations)."""
    cdef double[:, ::1] d = np.ascontiguousarray(D, dtype=np.float64)
    cdef Py_ssize_t L = d.shape[0]
    cdef Py_ssize_t K = d.shape[1]
    cdef Py_ssize_t m = L + 1
    cdef Py_ssize_t n_struct = K + L
    cdef Py_ssize_t width = n_struct + 2
    cdef Py_ssize_t rhs = width - 1
    cdef Py_ssize_t i, j
    cdef long iters = 0
    cdef int status
    cdef double value = 0.0
    cdef double* row
    beta_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] beta = beta_arr
    cdef double* tab = <double*> calloc((m + 1) * width, sizeof(double))
    cdef Py_ssize_t* basis = <Py_ssize_t*> calloc(m, sizeof(Py_ssize_t))
    cdef double* c = <double*> calloc(2 * K, sizeof(double))
    if tab == NULL or basis == NULL or c == NULL:
        free(tab)
        free(basis)
        free(c)
        raise MemoryError()
    cdef double* x = c + K
    with nogil:
        for i in range(L):
            row = tab + i * width
            for j in range(K):
                row[j] = -d[i, j]
                c[j] += d[i, j]
            row[K + i] = 1.0
            basis[i] = K + i
        row = tab + L * width
        for j in range(K):
            row[j] = 1.0
        row[n_struct] = 1.0
        row[rhs] = 1.0
        basis[L] = n_struct
        status = _two_phase(tab, basis, m, width, c, K, n_struct, 1, tol, max_iter, x, &iters)
        if status == OPTIMAL:
            for j in range(K):
                beta[j] = x[j]
            if not _normalize(&beta[0], K):
                status = DEGENERATE
        if status == OPTIMAL:
            for i in range(L):
                for j in range(K):
                    value += d[i, j] * beta[j]
    free(tab)
    free(basis)
    free(c)
    return status, beta_arr, value, iters
