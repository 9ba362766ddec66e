"""
Indefinite QAP relaxation solved by Frank-Wolfe (FAQ).

We ascend ``f(S) = tr(P_Y S^T P_X S)`` over the Birkhoff polytope. With
``P = V.T @ V`` the objective is ``||V_x S V_y^T||_F^2`` and every
gradient evaluation costs O(n^2 d) instead of O(n^3).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assignment import lap_max, solve_lap
from .errors import NonFinite, SizeMismatch
from .grassmann import Projector

SINKHORN_ROUNDS = 50
SINKHORN_TOL = 1e-9


@dataclass(frozen=True)
class FaqOptions:
    max_iters: int = 30
    tol: float = 1e-6


@dataclass
class QapTrialResult:
    relaxed: np.ndarray
    projected: np.ndarray
    objective: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


def _as_projector(p) -> Projector:
    if isinstance(p, Projector):
        return p
    # dense input: recover a thin factor from the eigendecomposition
    p = np.asarray(p, dtype=float)
    w, v = np.linalg.eigh(p)
    keep = w > 0.5
    return Projector(v[:, keep].T)


def _core(vx: np.ndarray, vy: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``V_x S V_y^T`` for a dense S."""
    return (vx @ s) @ vy.T


def _core_perm(vx: np.ndarray, vy: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``V_x S V_y^T`` for the permutation matrix of index array ``s``."""
    return vx @ vy[:, s].T


def qap_objective(px, py, s) -> float:
    """``tr(P_Y S^T P_X S)`` for a permutation ``s`` (index array)."""
    px, py = _as_projector(px), _as_projector(py)
    s = np.asarray(s, dtype=np.intp)
    if px.size != py.size or s.shape != (px.size,):
        raise SizeMismatch(
            f"projector sizes {px.size}, {py.size} and permutation size {s.size} disagree"
        )
    c = _core_perm(px.basis, py.basis, s)
    return float(np.sum(c * c))


def relaxed_objective(px, py, s) -> float:
    """``tr(P_Y S^T P_X S)`` for a dense (doubly stochastic) S."""
    px, py = _as_projector(px), _as_projector(py)
    c = _core(px.basis, py.basis, np.asarray(s, dtype=float))
    return float(np.sum(c * c))


def sinkhorn(a: np.ndarray, rounds: int = SINKHORN_ROUNDS, tol: float = SINKHORN_TOL) -> np.ndarray:
    """Alternate row and column scaling of a positive matrix."""
    a = np.array(a, dtype=float)
    for _ in range(rounds):
        a /= a.sum(axis=1, keepdims=True)
        a /= a.sum(axis=0, keepdims=True)
        if np.max(np.abs(a.sum(axis=1) - 1.0)) < tol:
            break
    return a


def random_doubly_stochastic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Sinkhorn-balanced ``Uniform(0, 1) + 0.1`` matrix: an interior point of the polytope."""
    if n < 1:
        raise SizeMismatch("n must be positive")
    return sinkhorn(rng.random((n, n)) + 0.1)


def _line_search(a: float, b: float) -> float:
    """Maximizer over [0, 1] of ``b*eta + a*eta**2``."""
    if a < 0:
        return float(min(max(-b / (2 * a), 0.0), 1.0))
    return 1.0 if a + b > 0 else 0.0


def faq_trial(px, py, init, opts: FaqOptions = FaqOptions(), callback=None) -> QapTrialResult:
    """One Frank-Wolfe ascent from ``init`` followed by projection to Sym(n).

    Each iteration takes the gradient ``2 P_X S P_Y``, solves a LAP for the
    best vertex ``Q``, and moves along ``Q - S`` with an exact line search
    on the quadratic ``f(S + eta (Q - S))``. Stops on relative change below
    ``opts.tol`` or after ``opts.max_iters`` iterations. ``callback``, if
    given, sees every iterate (including ``init``).
    """
    px, py = _as_projector(px), _as_projector(py)
    n = px.size
    s = np.array(init, dtype=float)
    if py.size != n or s.shape != (n, n):
        raise SizeMismatch(f"sizes disagree: P_X {n}, P_Y {py.size}, init {s.shape}")
    if not np.all(np.isfinite(s)):
        raise NonFinite("initial matrix has non-finite entries")
    vx, vy = px.basis, py.basis

    core = _core(vx, vy, s)
    f = float(np.sum(core * core))
    history = [f]
    if callback is not None:
        callback(s)
    converged = False
    duals = None
    it = 0
    while it < opts.max_iters:
        it += 1
        grad = 2.0 * (vx.T @ core) @ vy
        q, duals = solve_lap(grad, duals)
        core_q = _core_perm(vx, vy, q)
        core_d = core_q - core
        a = float(np.sum(core_d * core_d))
        b = 2.0 * float(np.sum(core * core_d))
        eta = _line_search(a, b)
        if eta == 0.0:
            converged = True
            break
        if eta == 1.0:
            s = np.zeros((n, n))
            s[np.arange(n), q] = 1.0
            core = core_q
        else:
            s += eta * (np.eye(n)[q] - s)
            core = core + eta * core_d
        f_new = float(np.sum(core * core))
        history.append(f_new)
        if callback is not None:
            callback(s)
        change = abs(f_new - f)
        f = f_new
        if change < opts.tol * max(abs(f), 1e-300):
            converged = True
            break

    projected = lap_max(s)
    return QapTrialResult(
        relaxed=s,
        projected=projected,
        objective=qap_objective(px, py, projected),
        iterations=it,
        converged=converged,
        history=history,
    )
