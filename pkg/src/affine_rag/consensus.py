"""Turn many QAP trial permutations into one matching."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .assignment import lap_max
from .errors import EmptyInput, SizeMismatch

DEFAULT_EPSILON = 1e-6


class Mode(str, enum.Enum):
    BEST = "best"
    WEIGHTED = "weighted"


@dataclass(frozen=True)
class ConsensusOptions:
    mode: Mode = Mode.BEST
    epsilon: float = DEFAULT_EPSILON
    c_override: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.c_override is not None and self.c_override <= 0:
            raise ValueError("C must be positive")

    def c(self, d: int) -> float:
        return self.c_override if self.c_override is not None else default_c(d, self.epsilon)


def default_c(d: int, epsilon: float = DEFAULT_EPSILON) -> float:
    """Smallest sharpness that pushes the worst possible objective (``-d``) to weight ``epsilon``.

    The trace objective lies in ``[-d, d]``, so ``(obj - d)^2 <= 4 d^2``.
    """
    if d < 1 or not 0.0 < epsilon < 1.0:
        raise ValueError("need d >= 1 and 0 < epsilon < 1")
    return math.log(1.0 / epsilon) / (4.0 * d * d)


def weight(objective: float, d: int, c: float) -> float:
    """``exp(-c (objective - d)^2)``; equals 1 exactly at the optimum."""
    if c <= 0:
        raise ValueError("c must be positive")
    return math.exp(-c * (objective - d) ** 2)


def combine(trials: Sequence, px, py, opts: ConsensusOptions = ConsensusOptions()) -> np.ndarray:
    """Merge trial permutations.

    ``trials`` is any sequence of objects with ``projected`` (index array)
    and ``objective`` attributes, e.g. :class:`~affine_rag.qap.QapTrialResult`;
    the objectives are trusted, ``px`` and ``py`` only fix the sizes and
    the target value ``d = rank(P_X)``.

    Best-match mode keeps the trial with the largest trace objective, which
    is the one minimizing ``||P_Y - S^T P_X S||_F``. Weighted mode
    accumulates ``sum_i w(S_i) S_i`` in trial order and projects it back to
    a permutation with one LAP.
    """
    if len(trials) == 0:
        raise EmptyInput("no trials to combine")
    n = px.size
    if py.size != n or any(len(t.projected) != n for t in trials):
        raise SizeMismatch("trial permutations and projectors have different sizes")

    if opts.mode is Mode.BEST:
        objectives = [t.objective for t in trials]
        return np.asarray(trials[int(np.argmax(objectives))].projected, dtype=np.intp)

    d = px.rank
    c = opts.c(d)
    acc = np.zeros((n, n))
    rows = np.arange(n)
    for t in trials:
        acc[rows, t.projected] += weight(t.objective, d, c)
    return lap_max(acc)
