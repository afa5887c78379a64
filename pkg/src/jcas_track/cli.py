"""Command-line batch runner.

    jcas-track --n-trajectories 100 --init-mode known_truth --out-dir results

Settings come from the built-in defaults, then an optional flat ``key = value``
file (``--config``), then ``--set key=value`` pairs, then the dedicated flags.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time

from .errors import InvalidArgumentError, NumericalError, ScenarioInfeasibleError
from .experiment import (
    INIT_MODES,
    ExperimentConfig,
    ResultsBundle,
    apply_overrides,
    config_to_text,
    emit_results,
    load_config,
    run_experiment,
)

log = logging.getLogger("jcas_track")

FULL_SCALE = {"n_trajectories": "1000", "steps": "92"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jcas-track",
        description="Monte Carlo range/velocity/AoA tracking benchmark for OFDM sensing.",
    )
    p.add_argument("--config", metavar="FILE", help="flat key = value settings file")
    p.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                   help="override any config key (repeatable)")
    p.add_argument("--n-trajectories", type=int)
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--init-mode", choices=INIT_MODES)
    p.add_argument("--estimators", help="comma-separated subset, e.g. RDM,ZP,KalmanCZT")
    p.add_argument("--out-dir")
    p.add_argument("--noise-off", action="store_true", help="noiseless frames and snapshots")
    p.add_argument("--paper-scale", action="store_true", help="1000 trajectories x 92 steps")
    p.add_argument("--workers", type=int, help="worker processes (results do not depend on it)")
    p.add_argument("--print-config", action="store_true", help="print the resolved config and exit")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.paper_scale:
        overrides.update(FULL_SCALE)
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise InvalidArgumentError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value
    flags = {
        "n_trajectories": args.n_trajectories,
        "master_seed": args.seed,
        "init_mode": args.init_mode,
        "estimators": args.estimators,
        "out_dir": args.out_dir,
        "workers": args.workers,
    }
    overrides.update({k: str(v) for k, v in flags.items() if v is not None})
    if args.noise_off:
        overrides["noise"] = "false"
    return apply_overrides(cfg, overrides)


def format_table(bundle: ResultsBundle) -> str:
    head = f"{'estimator':<10} {'range[m]':>10} {'vel[m/s]':>10} {'aoa[deg]':>10} {'pos[m]':>10} {'flops':>14}"
    lines = [head, "-" * len(head)]
    for name in bundle.estimators:
        m = bundle.summary[name]
        lines.append(
            f"{name:<10} {m.range_rmse:>10.4g} {m.velocity_rmse:>10.4g} "
            f"{math.degrees(m.aoa_rmse):>10.4g} {m.position_err:>10.4g} {bundle.flops[name]:>14,d}"
        )
    b = bundle.bounds
    lines.append(
        f"bounds: range {math.sqrt(b.range_bound):.4g} m, velocity {math.sqrt(b.velocity_bound):.4g} m/s, "
        f"aoa CRB {math.sqrt(b.crb_aoa_avg):.3g} rad"
    )
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(config_to_text(cfg, include_runtime=True))
            return 0
        t0 = time.perf_counter()
        bundle = run_experiment(cfg)
        paths = emit_results(bundle, cfg.out_dir)
    except (ValueError, ScenarioInfeasibleError, NumericalError) as exc:
        print(f"jcas-track: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"jcas-track: error: {exc}", file=sys.stderr)
        return 3
    print(f"{cfg.n_trajectories} trajectories x {cfg.scenario.steps} steps, "
          f"init={cfg.init_mode}, seed={cfg.master_seed} ({time.perf_counter() - t0:.1f} s)")
    print(format_table(bundle))
    print("wrote " + ", ".join(str(p) for p in paths.values()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
