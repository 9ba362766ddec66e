"""Relative error statistics for registration experiments (all spectral-norm based)."""
from __future__ import annotations

import math
from dataclasses import dataclass, astuple, fields
from typing import Optional

import numpy as np

from .errors import Singular, SizeMismatch, ZeroNorm

CSV_COLUMNS = ("sigma", "lambda", "d_sigma", "d_lambda", "delta_L", "delta_Y", "delta_X")


@dataclass
class MetricsRecord:
    sigma: float
    lambda_: float
    d_sigma: float
    d_lambda: float
    delta_L: float
    delta_Y: float
    delta_X: float
    delta_H: Optional[float] = None

    def csv_values(self) -> tuple:
        return astuple(self)[:7]

    @classmethod
    def mean(cls, records) -> "MetricsRecord":
        """Field-wise mean; NaN propagates, ``delta_H`` only if every record has it."""
        records = list(records)
        vals = {}
        for f in fields(cls):
            col = [getattr(r, f.name) for r in records]
            if f.name == "delta_H" and any(v is None for v in col):
                vals[f.name] = None
            else:
                vals[f.name] = float(np.mean(col))
        return cls(**vals)

    @classmethod
    def failed(cls, sigma: float, lambda_: float) -> "MetricsRecord":
        nan = math.nan
        return cls(sigma, lambda_, nan, nan, nan, nan, nan, None)


def _norm2(a) -> float:
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def _relative(num, den) -> float:
    den = _norm2(den)
    if den == 0.0:
        raise ZeroNorm("reference matrix has zero spectral norm")
    return _norm2(num) / den


def delta_L(l_true, l_rec) -> float:
    l_true, l_rec = np.asarray(l_true, float), np.asarray(l_rec, float)
    if l_true.shape != l_rec.shape:
        raise SizeMismatch("maps have different shapes")
    return _relative(l_true - l_rec, l_true)


def delta_Y(l_true, l_rec, x) -> float:
    """Forward image error ``||L X - L0 X|| / ||L X||``."""
    x = np.asarray(x, float)
    lx = np.asarray(l_true, float) @ x
    return _relative(lx - np.asarray(l_rec, float) @ x, lx)


def delta_X(l_rec, y, matching, x) -> float:
    """Pull-back error ``||L0^{-1} Y[:, matching] - X|| / ||X||``.

    Column ``i`` of ``x`` is compared with the preimage of
    ``y[:, matching[i]]``; ``y`` must already be in the frame of ``x``
    (translation removed).
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    matching = np.asarray(matching, dtype=np.intp)
    if matching.shape != (x.shape[1],):
        raise SizeMismatch("matching must have one entry per x column")
    try:
        pre = np.linalg.solve(np.asarray(l_rec, float), y[:, matching])
    except np.linalg.LinAlgError as exc:
        raise Singular("recovered map is not invertible") from exc
    return _relative(pre - x, x)


def delta_H(s_true, s_rec) -> float:
    """``||S - S0||_F^2 / (2n)``, i.e. the fraction of positions where the maps disagree."""
    s_true, s_rec = np.asarray(s_true), np.asarray(s_rec)
    if s_true.shape != s_rec.shape:
        raise SizeMismatch("permutations have different sizes")
    return float(np.count_nonzero(s_true != s_rec)) / s_true.size


def d_sigma(y_clean, y_noisy) -> float:
    y_noisy = np.asarray(y_noisy, float)
    return _relative(np.asarray(y_clean, float) - y_noisy, y_noisy)


def d_lambda(x_full, inliers) -> float:
    """Spectral norm of the dropped columns relative to the kept ones."""
    x_full = np.asarray(x_full, float)
    keep = np.zeros(x_full.shape[1], dtype=bool)
    keep[np.asarray(inliers, dtype=np.intp)] = True
    return _relative(x_full[:, ~keep], x_full[:, keep])
