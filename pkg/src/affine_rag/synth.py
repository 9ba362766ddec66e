"""Synthetic registration instances: random clouds, conditioned maps, noise, subsampling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BadCondition
from .grassmann import as_cloud, permute_columns


@dataclass(frozen=True)
class ScenarioConfig:
    d: int = 3
    n: int = 100
    cond: float = 3.0
    sigma: float = 0.0
    lambda_: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.cond < 1:
            raise BadCondition(f"condition number must be >= 1, got {self.cond}")
        if not 0.0 < self.lambda_ <= 1.0:
            raise ValueError(f"lambda must lie in (0, 1], got {self.lambda_}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")


@dataclass
class GroundTruth:
    x: np.ndarray            # (d, m) specimen, columns inlier_index of x_full
    x_full: np.ndarray       # (d, n)
    y: np.ndarray            # (d, n) noisy image
    y_clean: np.ndarray      # (d, n) image before noise
    linear_map: np.ndarray
    permutation: np.ndarray  # x_full column i -> y column permutation[i]
    inlier_index: np.ndarray

    @property
    def matching(self) -> np.ndarray:
        """True correspondence of x's columns into y."""
        return self.permutation[self.inlier_index]


def random_cloud(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < d:
        raise ValueError("need n >= d")
    return rng.random((d, n))


def random_orthogonal(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian, R diagonal made positive)."""
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def random_linear(d: int, cond: float, rng: np.random.Generator) -> np.ndarray:
    """``P @ O`` with ``P`` SPD of condition number exactly ``cond`` and ``O`` Haar.

    ``P`` has eigenvalues 1 and ``cond`` plus ``d - 2`` interior ones
    drawn from Uniform(1, cond).
    """
    if cond < 1:
        raise BadCondition(f"condition number must be >= 1, got {cond}")
    q = random_orthogonal(d, rng)
    eig = np.ones(d)
    if d > 1:
        eig[-1] = cond
        eig[1:-1] = rng.uniform(1.0, cond, size=d - 2)
    p = (q * eig) @ q.T
    return p @ random_orthogonal(d, rng)


def apply_noise(y, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Multiply every entry by an independent N(1, sigma^2) factor."""
    y = np.asarray(y, dtype=float)
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return y.copy()
    return y * rng.normal(1.0, sigma, size=y.shape)


def make_scenario(cfg: ScenarioConfig, specimen: Optional[np.ndarray] = None) -> GroundTruth:
    """Build one instance.

    ``specimen`` replaces the random ``X'`` (file-based clouds); its shape
    then overrides ``cfg.d`` and ``cfg.n``. Draw order is fixed: cloud,
    map, permutation, noise, subset.
    """
    rng = np.random.default_rng(cfg.seed)
    if specimen is None:
        x_full = random_cloud(cfg.d, cfg.n, rng)
    else:
        x_full = as_cloud(specimen).copy()
    d, n = x_full.shape
    lin = random_linear(d, cfg.cond, rng)
    perm = rng.permutation(n).astype(np.intp)
    y_clean = permute_columns(lin @ x_full, perm)
    y = apply_noise(y_clean, cfg.sigma, rng)
    m = max(int(math.floor(cfg.lambda_ * n)), d)
    if m == n:
        inliers = np.arange(n, dtype=np.intp)
    else:
        inliers = np.sort(rng.choice(n, size=m, replace=False)).astype(np.intp)
    return GroundTruth(
        x=x_full[:, inliers],
        x_full=x_full,
        y=y,
        y_clean=y_clean,
        linear_map=lin,
        permutation=perm,
        inlier_index=inliers,
    )
