"""
End-to-end affine registration.

Center both clouds, build their projectors (zero-padding the smaller
one), run many seeded FAQ trials, merge them into a single matching and
recover the linear map by least squares on the matched pairs.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .consensus import ConsensusOptions, Mode, combine
from .errors import RankDeficient, SizeMismatch
from .grassmann import RANK_TOL, Projector, as_cloud, barycenter, center, pad_projector, projector
from .qap import FaqOptions, faq_trial, random_doubly_stochastic


@dataclass(frozen=True)
class RagOptions:
    trials: int = 2 ** 10
    master_seed: int = 0
    faq: FaqOptions = FaqOptions()
    consensus: ConsensusOptions = ConsensusOptions()

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")


@dataclass(frozen=True)
class TrialSummary:
    """The part of a FAQ trial kept after it finishes (the relaxed matrix is dropped)."""

    projected: np.ndarray
    objective: float
    iterations: int
    converged: bool


@dataclass
class RegistrationResult:
    linear_map: np.ndarray
    matching: np.ndarray
    translation: np.ndarray
    trial_objectives: list[float]
    best_objective: float
    mode_used: Mode
    elapsed: float
    permutation: np.ndarray = field(repr=False, default=None)

    def transform(self, x) -> np.ndarray:
        """Map raw points of the x-cloud into y coordinates."""
        return self.linear_map @ np.asarray(x, dtype=float) + self.translation[:, None]


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index``; does not depend on scheduling."""
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def recover_linear(x, y, matching) -> np.ndarray:
    """Least-squares ``L`` minimizing ``||L X - Y[:, matching]||_F``.

    ``x`` should be centered; then any translation of ``y`` drops out.
    """
    x = as_cloud(x)
    y = np.asarray(y, dtype=float)
    matching = np.asarray(matching, dtype=np.intp)
    if matching.shape != (x.shape[1],) or y.shape[0] != x.shape[0]:
        raise SizeMismatch("matching must pair every x column with a y column")
    s = np.linalg.svd(x, compute_uv=False)
    if s[-1] <= RANK_TOL * s[0]:
        raise RankDeficient("X X^T is singular")
    sol, *_ = np.linalg.lstsq(x.T, y[:, matching].T, rcond=None)
    return sol.T


@dataclass(frozen=True)
class Problem:
    """Centered clouds and their (padded) projectors."""

    x: np.ndarray
    y: np.ndarray
    px: Projector
    py: Projector
    x_mean: np.ndarray
    y_mean: np.ndarray

    @property
    def m(self) -> int:
        return self.x.shape[1]


def prepare(x, y) -> Problem:
    x, y = as_cloud(x), as_cloud(y)
    if x.shape[0] != y.shape[0]:
        raise SizeMismatch(f"dimensions differ: {x.shape[0]} vs {y.shape[0]}")
    m, n = x.shape[1], y.shape[1]
    if m > n:
        raise SizeMismatch(f"x has more points than y ({m} > {n})")
    xc, yc = center(x), center(y)
    px = pad_projector(projector(xc), n)
    py = projector(yc)
    return Problem(xc, yc, px, py, barycenter(x), barycenter(y))


def _one_trial(problem: Problem, faq: FaqOptions, seed: int, index: int) -> TrialSummary:
    init = random_doubly_stochastic(problem.px.size, trial_rng(seed, index))
    r = faq_trial(problem.px, problem.py, init, faq)
    return TrialSummary(r.projected, r.objective, r.iterations, r.converged)


def run_trials(problem: Problem, count: int, master_seed: int,
               faq: FaqOptions = FaqOptions(), workers: int = 1) -> list[TrialSummary]:
    """Run ``count`` seeded trials; output is ordered by trial index."""
    if workers <= 1:
        return [_one_trial(problem, faq, master_seed, i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: _one_trial(problem, faq, master_seed, i), range(count)))


def finish(problem: Problem, trials: Sequence[TrialSummary],
           consensus: ConsensusOptions = ConsensusOptions(), started: float | None = None
           ) -> RegistrationResult:
    """Combine trials, truncate to the x points and recover the map."""
    s0 = combine(trials, problem.px, problem.py, consensus)
    matching = s0[: problem.m].copy()
    lin = recover_linear(problem.x, problem.y, matching)
    y_raw_matched = problem.y[:, matching] + problem.y_mean[:, None]
    translation = y_raw_matched.mean(axis=1) - lin @ problem.x_mean
    objectives = [t.objective for t in trials]
    return RegistrationResult(
        linear_map=lin,
        matching=matching,
        translation=translation,
        trial_objectives=objectives,
        best_objective=max(objectives),
        mode_used=consensus.mode,
        elapsed=0.0 if started is None else time.perf_counter() - started,
        permutation=s0,
    )


def rag_register(x, y, opts: RagOptions = RagOptions(), workers: int = 1) -> RegistrationResult:
    """Register a ``(d, m)`` cloud ``x`` against a ``(d, n)`` cloud ``y``, ``m <= n``.

    Returns the linear map ``L0``, the injective matching (x column ``i``
    corresponds to y column ``matching[i]``) and the translation such that
    ``y[:, matching] ~ L0 @ x + translation``. Results depend only on the
    inputs and ``opts``; ``workers`` changes speed, never output.
    """
    started = time.perf_counter()
    problem = prepare(x, y)
    trials = run_trials(problem, opts.trials, opts.master_seed, opts.faq, workers)
    return finish(problem, trials, opts.consensus, started)
