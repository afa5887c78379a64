"""Desk-scale RMSE table for both initialisation modes, plus selected curve points.

Writes the usual results files under ``<out>/<init_mode>/``.
"""

import argparse
import dataclasses
import time
from pathlib import Path

from jcas_track.cli import format_table
from jcas_track.experiment import INIT_MODES, ExperimentConfig, emit_results, run_experiment

STEPS_SHOWN = (0, 1, 2, 5, 10, 15, 20, 40, 60, 91)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-trajectories", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--modes", default=",".join(INIT_MODES))
    p.add_argument("--out", default="results/desk")
    args = p.parse_args()

    for mode in args.modes.split(","):
        cfg = ExperimentConfig(n_trajectories=args.n_trajectories, init_mode=mode,
                               master_seed=args.seed, workers=args.workers)
        t0 = time.perf_counter()
        bundle = run_experiment(cfg)
        emit_results(bundle, Path(args.out) / mode)
        print(f"\n== {mode}: {cfg.n_trajectories} x {cfg.scenario.steps} ({time.perf_counter() - t0:.0f} s)")
        print(format_table(bundle))
        steps = [k for k in STEPS_SHOWN if k < cfg.scenario.steps]
        print("range RMSE per step [m]")
        print(f"{'step':<10}" + "".join(f"{k:>9d}" for k in steps))
        for name in bundle.estimators:
            curve = bundle.curve(name)
            print(f"{name:<10}" + "".join(f"{curve[k]:>9.4f}" for k in steps))


if __name__ == "__main__":
    main()
