"""Command line entry point: ``affine-rag {register,grid,mode-study,demo}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import bench
from .cloud_io import load_cloud
from .consensus import ConsensusOptions, Mode
from .errors import EmptyFile, NonFinite, ParseError, RankDeficient, Singular, SizeMismatch
from .pipeline import RagOptions, rag_register
from .qap import FaqOptions
from .synth import ScenarioConfig, make_scenario

log = logging.getLogger("affine_rag")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _ints(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="affine-rag", description="Affine point cloud registration by QAP on Grassmannians.")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--trials", type=int, default=2 ** 10, help="number of FAQ trials N")
    p.add_argument("--threads", type=int, default=1, help="worker threads (output does not depend on it)")
    p.add_argument("--cond", type=float, default=3.0, help="condition number of synthetic maps")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.BEST.value)
    p.add_argument("--epsilon", type=float, default=ConsensusOptions().epsilon)
    p.add_argument("--c", type=float, default=None, help="weight sharpness C (overrides --epsilon)")
    p.add_argument("--faq-iters", type=int, default=FaqOptions().max_iters)
    p.add_argument("--faq-tol", type=float, default=FaqOptions().tol)
    p.add_argument("--out-dir", default="rag_out")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("register", help="register two cloud files (one point per line)")
    r.add_argument("x_file")
    r.add_argument("y_file")

    g = sub.add_parser("grid", help="sigma x lambda error grid, CSV + SVG")
    g.add_argument("--sigmas", type=_floats, default=list(bench.PAPER_SIGMAS))
    g.add_argument("--lambdas", type=_floats, default=list(bench.PAPER_LAMBDAS))
    g.add_argument("--batch", type=int, default=10)
    g.add_argument("--n", type=int, default=100, help="points of random specimens")
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--specimen", default=None, help="cloud file used as X' instead of a random cloud")

    m = sub.add_parser("mode-study", help="best-match vs weighted-sum over (sigma, N)")
    m.add_argument("--n", type=int, default=100)
    m.add_argument("--sigmas", type=_floats, default=list(bench.MODE_STUDY_SIGMAS))
    m.add_argument("--trial-counts", type=_ints, default=list(bench.MODE_STUDY_TRIALS))
    m.add_argument("--batch", type=int, default=100)

    d = sub.add_parser("demo", help="one synthetic registration with ground truth")
    d.add_argument("--n", type=int, default=60)
    d.add_argument("--sigma", type=float, default=0.0)
    d.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    return p


def _options(args) -> tuple[FaqOptions, ConsensusOptions]:
    faq = FaqOptions(max_iters=args.faq_iters, tol=args.faq_tol)
    cons = ConsensusOptions(mode=Mode(args.mode), epsilon=args.epsilon, c_override=args.c)
    return faq, cons


def _cmd_register(args, faq, cons) -> int:
    try:
        x, y = load_cloud(args.x_file), load_cloud(args.y_file)
    except (OSError, ParseError, EmptyFile) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    opts = RagOptions(trials=args.trials, master_seed=args.seed, faq=faq, consensus=cons)
    try:
        res = rag_register(x, y, opts, workers=args.threads)
    except (SizeMismatch, NonFinite) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except (RankDeficient, Singular, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERIC
    out = {
        "linear_map": res.linear_map.tolist(),
        "translation": res.translation.tolist(),
        "matching": res.matching.tolist(),
        "best_objective": res.best_objective,
        "mode": res.mode_used.value,
        "elapsed": res.elapsed,
    }
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_grid(args, faq, cons) -> int:
    specimen = None
    if args.specimen:
        try:
            specimen = load_cloud(args.specimen)
        except (OSError, ParseError, EmptyFile) as exc:
            log.error("%s", exc)
            return EXIT_DATA
    grid = bench.GridSpec(sigmas=args.sigmas, lambdas=args.lambdas, batch=args.batch,
                          trials=args.trials, cond=args.cond, d=args.d, n=args.n,
                          specimen=specimen, master_seed=args.seed, faq=faq, consensus=cons)
    records = bench.run_grid(grid, workers=args.threads)
    for path in bench.write_grid_outputs(records, args.out_dir):
        log.info("wrote %s", path)
    return EXIT_OK


def _cmd_mode_study(args, faq, cons) -> int:
    study = bench.run_mode_study(n=args.n, cond=args.cond, sigmas=args.sigmas,
                                 trial_counts=args.trial_counts, batch=args.batch,
                                 master_seed=args.seed, faq=faq, epsilon=args.epsilon,
                                 c_override=args.c, workers=args.threads)
    for path in bench.write_mode_study_outputs(study, args.out_dir):
        log.info("wrote %s", path)
    return EXIT_OK


def _cmd_demo(args, faq, cons) -> int:
    gt = make_scenario(ScenarioConfig(n=args.n, cond=args.cond, sigma=args.sigma,
                                      lambda_=args.lambda_, seed=args.seed))
    opts = RagOptions(trials=args.trials, master_seed=args.seed, faq=faq, consensus=cons)
    res = rag_register(gt.x, gt.y, opts, workers=args.threads)
    rec = bench.evaluate(gt, res, args.sigma, args.lambda_)
    print(f"points: x {gt.x.shape[1]}, y {gt.y.shape[1]}; trials {args.trials}; {res.elapsed:.1f} s")
    for name in ("d_sigma", "d_lambda", "delta_L", "delta_Y", "delta_X", "delta_H"):
        print(f"{name:>8} = {getattr(rec, name):.6f}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        faq, cons = _options(args)
        if args.trials < 1 or args.threads < 1:
            raise ValueError("--trials and --threads must be positive")
    except ValueError as exc:
        parser.error(str(exc))
    handler = {"register": _cmd_register, "grid": _cmd_grid,
               "mode-study": _cmd_mode_study, "demo": _cmd_demo}[args.command]
    return handler(args, faq, cons)


if __name__ == "__main__":
    sys.exit(main())
