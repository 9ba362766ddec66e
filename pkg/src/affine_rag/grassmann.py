"""
Grassmannian representation of point clouds.

A point cloud is a ``(d, n)`` array holding one point per column. Its row
space ``ker(X)^perp`` is a point of Gr(d, n); we represent it by the
orthogonal projector ``P = V.T @ V`` where the rows of ``V`` are the top
``d`` right singular vectors of the centered cloud. ``P`` does not change
when the cloud is hit by an invertible linear map.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NonFinite, RankDeficient, SizeMismatch

RANK_TOL = 1e-10


def as_cloud(x) -> np.ndarray:
    """Validate and return ``x`` as a float ``(d, n)`` array with ``n >= d``."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise SizeMismatch(f"point cloud must be 2-D, got shape {x.shape}")
    d, n = x.shape
    if d < 1 or n < d:
        raise SizeMismatch(f"point cloud needs 1 <= d <= n, got d={d}, n={n}")
    if not np.all(np.isfinite(x)):
        raise NonFinite("point cloud has non-finite entries")
    return x


def barycenter(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=float).mean(axis=1)


def center(x) -> np.ndarray:
    """Subtract the barycenter from every point."""
    x = as_cloud(x)
    return x - x.mean(axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector ``basis.T @ basis`` of rank ``basis.shape[0]``.

    ``basis`` has orthonormal rows (zero columns are allowed after padding).
    Keeping the thin factor around lets the QAP code work in O(n^2 d).
    """

    basis: np.ndarray

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    @property
    def size(self) -> int:
        return self.basis.shape[1]

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.basis.T @ self.basis

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def projector(x, rank_tol: float = RANK_TOL) -> Projector:
    """Projector onto the row space of a (centered) cloud.

    Parameters
    ----------
    x : (d, n) array_like
        Point cloud, normally already centered.
    rank_tol : float
        The cloud is rejected when ``s_d <= rank_tol * s_1``.

    Raises
    ------
    RankDeficient
        If the cloud does not have full row rank ``d``.
    """
    x = as_cloud(x)
    _, s, vt = np.linalg.svd(x, full_matrices=False)
    if s[0] == 0.0 or s[-1] <= rank_tol * s[0]:
        raise RankDeficient(
            f"cloud is rank deficient: s_min/s_max = {s[-1] / s[0] if s[0] else 0.0:.3e}"
        )
    return Projector(vt)


def pad_projector(p: Projector, n_target: int) -> Projector:
    """Return ``P (+) 0`` of size ``n_target``: the padded rows/columns are zero."""
    m = p.size
    if n_target < m:
        raise SizeMismatch(f"cannot pad a {m}x{m} projector down to {n_target}")
    if n_target == m:
        return p
    basis = np.zeros((p.rank, n_target))
    basis[:, :m] = p.basis
    return Projector(basis)


def permute_columns(x, s) -> np.ndarray:
    """Compute ``X @ S`` for the permutation matrix of ``s``.

    ``S[i, s[i]] = 1``, so point ``i`` of the input lands in column ``s[i]``
    and ``projector(permute_columns(X, s)) == S.T @ projector(X) @ S``.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s)
    if s.shape != (x.shape[1],):
        raise SizeMismatch(f"permutation of size {s.size} for {x.shape[1]} points")
    out = np.empty_like(x)
    out[:, s] = x
    return out
