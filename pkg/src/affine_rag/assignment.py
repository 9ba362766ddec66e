"""
Linear assignment and permutation helpers.

A permutation of ``{0..n-1}`` is an integer array ``s``; its matrix has
``S[i, s[i]] = 1``. ``lap_max`` is the workhorse: the Frank-Wolfe direction
inside every QAP trial and the final projection onto Sym(n).
"""
from __future__ import annotations

import itertools
import math

import numba
import numpy as np

from .errors import NonFinite, SizeMismatch, TooLarge

BRUTE_FORCE_MAX = 9


def is_permutation(s) -> bool:
    s = np.asarray(s)
    return s.ndim == 1 and np.array_equal(np.sort(s), np.arange(s.size))


def check_permutation(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.intp)
    if not is_permutation(s):
        raise SizeMismatch("not a permutation of 0..n-1")
    return s


def identity(n: int) -> np.ndarray:
    return np.arange(n, dtype=np.intp)


def inverse(s) -> np.ndarray:
    s = np.asarray(s, dtype=np.intp)
    inv = np.empty_like(s)
    inv[s] = np.arange(s.size, dtype=np.intp)
    return inv


def perm_matrix(s, n_cols: int | None = None) -> np.ndarray:
    """0/1 matrix with ``M[i, s[i]] = 1``; works for injections when ``n_cols`` is given."""
    s = np.asarray(s, dtype=np.intp)
    m = np.zeros((s.size, s.size if n_cols is None else n_cols))
    m[np.arange(s.size), s] = 1.0
    return m


def assignment_value(profit, s) -> float:
    profit = np.asarray(profit, dtype=float)
    return float(profit[np.arange(profit.shape[0]), s].sum())


def _check_square(profit) -> np.ndarray:
    profit = np.asarray(profit, dtype=float)
    if profit.ndim != 2 or profit.shape[0] != profit.shape[1]:
        raise SizeMismatch(f"profit matrix must be square, got {profit.shape}")
    if not np.all(np.isfinite(profit)):
        raise NonFinite("profit matrix has NaN or Inf entries")
    return profit


@numba.njit(cache=True, nogil=True)
def _sap_min(cost, v):
    """Shortest augmenting path LAP (minimization), O(n^3).

    ``v`` are starting column duals; row duals are rebuilt from them so the
    reduced costs are non-negative, and rows whose cheapest column is still
    free are matched greedily before augmenting. Good duals from a nearby
    problem leave little to augment.
    """
    n = cost.shape[0]
    v = v.copy()
    u = np.empty(n)
    col4row = np.full(n, -1, np.int64)
    row4col = np.full(n, -1, np.int64)
    for i in range(n):
        best = np.inf
        bj = 0
        for j in range(n):
            r = cost[i, j] - v[j]
            if r < best:
                best = r
                bj = j
        u[i] = best
        if row4col[bj] == -1:
            row4col[bj] = i
            col4row[i] = bj

    shortest = np.empty(n)
    path = np.empty(n, np.int64)
    in_rows = np.zeros(n, np.bool_)
    in_cols = np.zeros(n, np.bool_)
    remaining = np.empty(n, np.int64)
    for cur in range(n):
        if col4row[cur] != -1:
            continue
        for k in range(n):
            remaining[k] = n - k - 1
        in_rows[:] = False
        in_cols[:] = False
        shortest[:] = np.inf
        n_rem = n
        min_val = 0.0
        i = cur
        sink = -1
        while sink == -1:
            index = -1
            lowest = np.inf
            in_rows[i] = True
            for k in range(n_rem):
                j = remaining[k]
                r = min_val + cost[i, j] - u[i] - v[j]
                if r < shortest[j]:
                    path[j] = i
                    shortest[j] = r
                # prefer a free column on ties: ends the search early
                if shortest[j] < lowest or (shortest[j] == lowest and row4col[j] == -1):
                    lowest = shortest[j]
                    index = k
            min_val = lowest
            j = remaining[index]
            if row4col[j] == -1:
                sink = j
            else:
                i = row4col[j]
            in_cols[j] = True
            n_rem -= 1
            remaining[index] = remaining[n_rem]

        u[cur] += min_val
        for r in range(n):
            if in_rows[r] and r != cur:
                u[r] += min_val - shortest[col4row[r]]
        for c in range(n):
            if in_cols[c]:
                v[c] -= min_val - shortest[c]
        j = sink
        while True:
            i = path[j]
            row4col[j] = i
            k = col4row[i]
            col4row[i] = j
            j = k
            if i == cur:
                break
    return col4row, v


def solve_lap(profit, duals=None):
    """Maximizing LAP that also returns column duals for warm starts.

    Returns ``(s, duals)``; pass ``duals`` back in when solving a similar
    profit matrix (consecutive Frank-Wolfe gradients, say).
    """
    profit = _check_square(profit)
    n = profit.shape[0]
    v = np.zeros(n) if duals is None else np.asarray(duals, dtype=float)
    if v.shape != (n,):
        raise SizeMismatch("duals must have one entry per column")
    s, v = _sap_min(np.ascontiguousarray(-profit), v)
    return s.astype(np.intp), v


def lap_max(profit) -> np.ndarray:
    """Permutation maximizing ``sum_i profit[i, s[i]]``.

    Under ties only the optimal value is guaranteed, not which optimal
    permutation comes back.
    """
    return solve_lap(profit)[0]


def brute_force_lap(profit) -> np.ndarray:
    """Exhaustive maximization over Sym(n), n <= 9.

    ``itertools.permutations`` yields in lexicographic order and only a
    strictly better value replaces the incumbent, so ties go to the
    lexicographically smallest map.
    """
    profit = _check_square(profit)
    n = profit.shape[0]
    if n > BRUTE_FORCE_MAX:
        raise TooLarge(f"brute force limited to n <= {BRUTE_FORCE_MAX}, got {n}")
    rows = np.arange(n)
    best, best_val = None, -math.inf
    for p in itertools.permutations(range(n)):
        val = profit[rows, p].sum()
        if val > best_val:
            best, best_val = p, val
    return np.array(best, dtype=np.intp)
