"""
Experiment grids: sigma x lambda sweeps and the best-vs-weighted mode study.

Every scenario draws its seeds from ``(master_seed, grid indices)`` so a
grid is reproducible byte for byte, whatever the number of workers, and
adding rows never perturbs existing cells.
"""
from __future__ import annotations

import io
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import metrics
from .consensus import ConsensusOptions, Mode
from .metrics import CSV_COLUMNS, MetricsRecord
from .pipeline import RagOptions, RegistrationResult, finish, prepare, rag_register, run_trials
from .qap import FaqOptions
from .svg import bar_panel, heatmap_panels
from .synth import GroundTruth, ScenarioConfig, make_scenario

log = logging.getLogger(__name__)

PAPER_SIGMAS = (0.0, 0.01, 0.05, 0.1, 0.15, 0.2)
PAPER_LAMBDAS = (1.0, 0.95, 0.90, 0.85, 0.8, 0.7, 0.6, 0.5)
MODE_STUDY_SIGMAS = (0.05, 0.10, 0.15, 0.20, 0.25)
MODE_STUDY_TRIALS = tuple(2 ** k for k in range(5, 11))

Registrar = Callable[[np.ndarray, np.ndarray, RagOptions], RegistrationResult]

def derive_seed(master_seed: int, *key: int) -> int:
    """64-bit seed for the grid position ``key``."""
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])

@dataclass(frozen=True)
class GridSpec:
    sigmas: Sequence[float] = PAPER_SIGMAS
    lambdas: Sequence[float] = PAPER_LAMBDAS
    batch: int = 10
    trials: int = 2 ** 10
    cond: float = 3.0
    d: int = 3
    n: int = 100
    specimen: Optional[np.ndarray] = field(default=None, repr=False)
    master_seed: int = 0
    faq: FaqOptions = FaqOptions()
    consensus: ConsensusOptions = ConsensusOptions()

    def __post_init__(self):
        if self.batch < 1:
            raise ValueError("batch must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

def evaluate(gt: GroundTruth, result: RegistrationResult, sigma: float, lambda_: float) -> MetricsRecord:
    """Error statistics of one registration, measured in the centered frame of ``x``."""
    x_mean = gt.x.mean(axis=1, keepdims=True)
    xc = gt.x - x_mean
    l0 = result.linear_map
    # y expressed in the frame where the recovered map is purely linear
    y_frame = gt.y - result.translation[:, None] - l0 @ x_mean
    return MetricsRecord(
        sigma=sigma,
        lambda_=lambda_,
        d_sigma=metrics.d_sigma(gt.y_clean, gt.y),
        d_lambda=metrics.d_lambda(gt.x_full, gt.inlier_index),
        delta_L=metrics.delta_L(gt.linear_map, l0),
        delta_Y=metrics.delta_Y(gt.linear_map, l0, xc),
        delta_X=metrics.delta_X(l0, y_frame, gt.matching, xc),
        delta_H=metrics.delta_H(gt.matching, result.matching),
    )

def _scenario(grid: GridSpec, sigma: float, lambda_: float, seed: int) -> GroundTruth:
    cfg = ScenarioConfig(d=grid.d, n=grid.n, cond=grid.cond, sigma=sigma, lambda_=lambda_, seed=seed)
    return make_scenario(cfg, grid.specimen)

def _grid_item(grid: GridSpec, registrar: Registrar, i: int, j: int, b: int) -> MetricsRecord:
    sigma, lam = grid.sigmas[i], grid.lambdas[j]
    try:
        gt = _scenario(grid, sigma, lam, derive_seed(grid.master_seed, i, j, b, 0))
        opts = RagOptions(trials=grid.trials, master_seed=derive_seed(grid.master_seed, i, j, b, 1),
                          faq=grid.faq, consensus=grid.consensus)
        return evaluate(gt, registrar(gt.x, gt.y, opts), sigma, lam)
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        log.warning("cell sigma=%g lambda=%g batch %d failed: %s", sigma, lam, b, exc)
        return MetricsRecord.failed(sigma, lam)

def format_csv(records: Sequence[MetricsRecord]) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for r in records:
        buf.write(",".join("%.6f" % v for v in r.csv_values()) + "\n")
    return buf.getvalue()

def run_grid(grid: GridSpec, out=None, workers: int = 1,
             registrar: Registrar = rag_register) -> list[MetricsRecord]:
    """Run every (sigma, lambda) cell ``grid.batch`` times and average.

    ``out`` (a text stream) receives the CSV in grid order. ``registrar``
    is the method under test; any callable with the signature of
    :func:`~affine_rag.pipeline.rag_register` can be benchmarked.
    """
    items = [(i, j, b) for i in range(len(grid.sigmas))
             for j in range(len(grid.lambdas)) for b in range(grid.batch)]

    def work(item):
        return _grid_item(grid, registrar, *item)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(work, items))
    else:
        flat = [work(item) for item in items]

    records = []
    for k in range(0, len(flat), grid.batch):
        cell = flat[k:k + grid.batch]
        rec = MetricsRecord.mean(cell)
        log.info("sigma=%g lambda=%g delta_L=%.4f delta_Y=%.4f delta_X=%.4f",
                 rec.sigma, rec.lambda_, rec.delta_L, rec.delta_Y, rec.delta_X)
        records.append(rec)
    if out is not None:
        out.write(format_csv(records))
    return records

@dataclass
class ModeStudy:
    sigmas: list[float]
    trial_counts: list[int]
    # cells[mode][(sigma, trials)] -> batch-mean record
    cells: dict[Mode, dict[tuple, MetricsRecord]]

    def to_csv(self, mode: Mode) -> str:
        buf = io.StringIO()
        buf.write("sigma,trials,delta_L,delta_Y,delta_X,delta_H\n")
        for s in self.sigmas:
            for t in self.trial_counts:
                r = self.cells[mode][(s, t)]
                buf.write("%.6f,%d,%.6f,%.6f,%.6f,%.6f\n"
                          % (s, t, r.delta_L, r.delta_Y, r.delta_X, r.delta_H))
        return buf.getvalue()

def run_mode_study(n: int = 100, cond: float = 3.0, sigmas: Sequence[float] = MODE_STUDY_SIGMAS,
                   trial_counts: Sequence[int] = MODE_STUDY_TRIALS, batch: int = 100,
                   master_seed: int = 0, d: int = 3, faq: FaqOptions = FaqOptions(),
                   epsilon: float = ConsensusOptions().epsilon, c_override: Optional[float] = None,
                   workers: int = 1) -> ModeStudy:
    """Compare best-match and weighted-sum consensus on identical scenarios.

    Trial ``k`` depends only on its seed, so the first ``N`` trials of a run
    with ``max(trial_counts)`` trials are exactly an ``N``-trial run: each
    scenario is solved once and every (mode, N) pair reads a prefix.
    """
    trial_counts = sorted(trial_counts)
    n_max = trial_counts[-1]
    modes = (Mode.BEST, Mode.WEIGHTED)
    grid = GridSpec(sigmas=list(sigmas), lambdas=[1.0], batch=batch, trials=n_max,
                    cond=cond, d=d, n=n, master_seed=master_seed)

    def work(item):
        i, b = item
        sigma = grid.sigmas[i]
        gt = _scenario(grid, sigma, 1.0, derive_seed(master_seed, i, 0, b, 0))
        problem = prepare(gt.x, gt.y)
        trials = run_trials(problem, n_max, derive_seed(master_seed, i, 0, b, 1), faq)
        out = {}
        for mode in modes:
            copts = ConsensusOptions(mode=mode, epsilon=epsilon, c_override=c_override)
            for t in trial_counts:
                out[(mode, t)] = evaluate(gt, finish(problem, trials[:t], copts), sigma, 1.0)
        return out

    items = [(i, b) for i in range(len(grid.sigmas)) for b in range(batch)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(work, items))
    else:
        flat = [work(it) for it in items]

    cells = {mode: {} for mode in modes}
    for i, sigma in enumerate(grid.sigmas):
        runs = flat[i * batch:(i + 1) * batch]
        for mode in modes:
            for t in trial_counts:
                cells[mode][(sigma, t)] = MetricsRecord.mean(r[(mode, t)] for r in runs)
    return ModeStudy(list(grid.sigmas), trial_counts, cells)

def emit_svg(records, metric: str, path) -> None:
    """Write an SVG figure of ``metric``.

    ``records`` is either a list of :class:`MetricsRecord` from
    :func:`run_grid` (bar panel over sigma and lambda) or a
    :class:`ModeStudy` (one heatmap per consensus mode).
    """
    if isinstance(records, ModeStudy):
        panels = {
            f"{mode.value} match" if mode is Mode.BEST else "weighted sum":
                {key: getattr(rec, metric) for key, rec in cells.items()}
            for mode, cells in records.cells.items()
        }
        heatmap_panels(panels, records.sigmas, records.trial_counts, metric, path)
        return
    records = list(records)
    if not records:
        raise ValueError("nothing to plot")
    sigmas = list(dict.fromkeys(r.sigma for r in records))
    lambdas = list(dict.fromkeys(r.lambda_ for r in records))
    values = {(r.sigma, r.lambda_): getattr(r, metric) for r in records}
    bar_panel(values, sigmas, lambdas, metric, path)

def write_grid_outputs(records: Sequence[MetricsRecord], out_dir, stem: str = "grid") -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = [os.path.join(out_dir, f"{stem}.csv")]
    with open(paths[0], "w", newline="\n") as fh:
        fh.write(format_csv(records))
    for metric in ("delta_L", "delta_Y", "delta_X"):
        p = os.path.join(out_dir, f"{stem}_{metric}.svg")
        emit_svg(records, metric, p)
        paths.append(p)
    return paths

def write_mode_study_outputs(study: ModeStudy, out_dir) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for mode in study.cells:
        p = os.path.join(out_dir, f"mode_study_{mode.value}.csv")
        with open(p, "w", newline="\n") as fh:
            fh.write(study.to_csv(mode))
        paths.append(p)
    for metric in ("delta_L", "delta_Y", "delta_X", "delta_H"):
        p = os.path.join(out_dir, f"mode_study_{metric}.svg")
        emit_svg(study, metric, p)
        paths.append(p)
    return paths
