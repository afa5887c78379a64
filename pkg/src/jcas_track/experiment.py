"""Monte Carlo batches over random trajectories for every estimator.

Each trajectory draws from its own random stream, derived from the master seed
and the trajectory index, so results do not depend on how trajectories are
spread over worker processes.
"""

from __future__ import annotations

import configparser
import csv
import dataclasses
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidArgumentError
from .scenario import (
    ESTIMATORS,
    BoundsReport,
    Estimate,
    Metrics,
    ScenarioParams,
    StepRecord,
    bounds_report,
    complexity_table,
    generate_trajectory,
    metrics,
)
from .sensing import FrameAnalysis, czt_window_like_zeropad
from .trackers import (
    SIGMA_MEAS_DIAG,
    SIGMA_PRED_DIAG,
    KalmanConfig,
    ebm_init,
    ebm_step,
    kalman_czt_step,
    kalman_predict,
    kalman_step,
    known_init,
    plan_czt_measurement,
    rdm_init,
)
from .waveform import (
    OfdmConfig,
    bartlett_aoa,
    generate_frame,
    synthesize_array_snapshots,
    synthesize_ratio_matrix,
)

log = logging.getLogger(__name__)

INIT_MODES = ("known_truth", "rdm_estimate")
CURVE_FIELDS = ("range_rmse", "velocity_rmse", "aoa_rmse", "position_err")
CURVE_HEADER = ("step", "estimator") + CURVE_FIELDS
# keys that only affect how a run executes, not what it computes
RUNTIME_KEYS = ("out_dir", "workers")


@dataclass(frozen=True)
class ExperimentConfig:
    ofdm: OfdmConfig = field(default_factory=OfdmConfig)
    scenario: ScenarioParams = field(default_factory=ScenarioParams)
    estimators: tuple[str, ...] = ESTIMATORS
    n_trajectories: int = 100
    init_mode: str = "known_truth"
    master_seed: int = 0
    noise: bool = True
    pad_factor: int = 16
    n_czt: int = 2048
    aoa_grid_step_deg: float = 0.01
    aoa_sector_deg: float = 60.0
    sigma_meas: tuple[float, float, float] = SIGMA_MEAS_DIAG
    sigma_pred: tuple[float, float, float] = SIGMA_PRED_DIAG
    out_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        if self.n_trajectories < 1:
            raise InvalidArgumentError("n_trajectories must be >= 1")
        if not self.estimators:
            raise InvalidArgumentError("at least one estimator must be enabled")
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise InvalidArgumentError(f"unknown estimators: {sorted(unknown)}")
        if self.init_mode not in INIT_MODES:
            raise InvalidArgumentError(f"init_mode must be one of {INIT_MODES}")
        if self.pad_factor < 1 or self.pad_factor & (self.pad_factor - 1):
            raise InvalidArgumentError("pad_factor must be a power of two")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be >= 1")
        # canonical order keeps outputs independent of how the set was spelled
        object.__setattr__(
            self, "estimators", tuple(e for e in ESTIMATORS if e in self.estimators)
        )


# flat key = value config files ------------------------------------------------


def _sections(cfg: ExperimentConfig):
    top = {f.name: getattr(cfg, f.name) for f in dataclasses.fields(cfg)
           if f.name not in ("ofdm", "scenario")}
    return [("ofdm", dataclasses.asdict(cfg.ofdm)),
            ("scenario", dataclasses.asdict(cfg.scenario)),
            ("experiment", top)]


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (tuple, list)):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(text: str, default):
    text = text.strip()
    if isinstance(default, bool):
        low = text.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise InvalidArgumentError(f"not a boolean: {text!r}")
    if isinstance(default, tuple):
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if default and isinstance(default[0], (int, float)):
            return tuple(float(p) for p in parts)
        return tuple(parts)
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def config_to_text(cfg: ExperimentConfig, include_runtime: bool = False) -> str:
    lines = []
    for title, values in _sections(cfg):
        lines.append(f"# {title}")
        for key, value in values.items():
            if key in RUNTIME_KEYS and not include_runtime:
                continue
            lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: ExperimentConfig, values: dict[str, str]) -> ExperimentConfig:
    """Return ``cfg`` with flat ``key -> text`` overrides applied."""
    groups = {name: dict(d) for name, d in _sections(cfg)}
    changes = {"ofdm": {}, "scenario": {}, "experiment": {}}
    for key, text in values.items():
        for group, defaults in groups.items():
            if key in defaults:
                changes[group][key] = _parse_value(text, defaults[key])
                break
        else:
            raise InvalidArgumentError(f"unknown config key {key!r}")
    ofdm = dataclasses.replace(cfg.ofdm, **changes["ofdm"])
    scen = dataclasses.replace(cfg.scenario, **changes["scenario"])
    return dataclasses.replace(cfg, ofdm=ofdm, scenario=scen, **changes["experiment"])


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip()] = value
    return apply_overrides(base or ExperimentConfig(), values)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(), base)


# simulation -------------------------------------------------------------------


def trajectory_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def simulate_trajectory(cfg: ExperimentConfig, index: int) -> list[StepRecord]:
    """Run every enabled estimator over one random trajectory."""
    ofdm = cfg.ofdm
    rng = trajectory_rng(cfg.master_seed, index)
    traj = generate_trajectory(ofdm, cfg.scenario, rng)
    kcfg = KalmanConfig.from_ofdm(ofdm, cfg.sigma_meas, cfg.sigma_pred)
    mt0 = ofdm.frame_interval
    enabled = set(cfg.estimators)
    known = cfg.init_mode == "known_truth"
    grid_step = math.radians(cfg.aoa_grid_step_deg)
    sector = (-math.radians(cfg.aoa_sector_deg), math.radians(cfg.aoa_sector_deg))
    ebm_tol = 1e-6 * ofdm.range_resolution

    kalman = kczt = ebm = None
    czt_center = None
    records = []
    for k in range(traj.steps):
        truth = traj.truth(k)
        frame = generate_frame(ofdm, rng)
        y = synthesize_ratio_matrix(ofdm, truth, frame, rng, noise=cfg.noise)
        snaps = synthesize_array_snapshots(ofdm, truth, rng, noise=cfg.noise)
        aoa = bartlett_aoa(snaps, grid_step, sector)
        fa = FrameAnalysis(y)
        needs_native = k == 0 or enabled & {"RDM", "Kalman", "EBM"}
        native = fa.native_peak() if needs_native else None

        if k == 0:
            if known:
                init = (truth.range, truth.radial_velocity, truth.aoa)
                kalman = kczt = known_init(*init)
            else:
                init = (native.range, native.velocity, aoa)
                kalman = kczt = rdm_init(*init, ofdm)
            ebm = ebm_init(native.range, init[0])

        est = {}
        diag = {}
        if "RDM" in enabled:
            est["RDM"] = Estimate(native.range, native.velocity, aoa)
        if "Kalman" in enabled:
            if k > 0:
                kalman = kalman_step(kalman, (native.range, native.velocity, aoa), kcfg)
            est["Kalman"] = Estimate(*kalman.x)
        if "EBM" in enabled:
            if k == 0:
                est["EBM"] = Estimate(*init)
            else:
                ebm = ebm_step(ebm, native.range, native.velocity, mt0, tol=ebm_tol)
                est["EBM"] = Estimate(ebm.r_ebm, native.velocity, aoa)
        if "ZP" in enabled:
            p = fa.zeropad_peak(cfg.pad_factor)
            est["ZP"] = Estimate(p.range, p.velocity, aoa)
        if "CZT" in enabled:
            if czt_center is None:
                p = native  # the first window has no centre yet
            else:
                p = fa.zoom_peak(czt_window_like_zeropad(czt_center, ofdm, cfg.pad_factor, cfg.n_czt))
            czt_center = p.range
            est["CZT"] = Estimate(p.range, p.velocity, aoa)
        if "KalmanCZT" in enabled:
            if k > 0:
                plan = plan_czt_measurement(kalman_predict(kczt, kcfg), cfg.n_czt)
                diag["czt_resolution"] = plan.resolution
                kczt = kalman_czt_step(kczt, y, aoa, kcfg, ofdm, n_czt_range=cfg.n_czt,
                                       measure=fa.zoom_peak)
            est["KalmanCZT"] = Estimate(*kczt.x)
        records.append(StepRecord(truth, est, step=k, trajectory=index, diagnostics=diag))
    return records


def _simulate_job(args):
    cfg, index = args
    return simulate_trajectory(cfg, index)


@dataclass
class ResultsBundle:
    estimators: tuple[str, ...]
    summary: dict[str, Metrics]
    flops: dict[str, int]
    curves: np.ndarray  # (steps, estimators, len(CURVE_FIELDS))
    bounds: BoundsReport
    config: ExperimentConfig
    version: str = __version__
    records: list[StepRecord] = field(default_factory=list, repr=False)

    def curve(self, estimator: str, quantity: str = "range_rmse") -> np.ndarray:
        return self.curves[:, self.estimators.index(estimator), CURVE_FIELDS.index(quantity)]


def aggregate(cfg: ExperimentConfig, records: list[StepRecord]) -> ResultsBundle:
    steps = cfg.scenario.steps
    by_step = [[] for _ in range(steps)]
    for rec in records:
        by_step[rec.step].append(rec)
    curves = np.zeros((steps, len(cfg.estimators), len(CURVE_FIELDS)))
    for k, group in enumerate(by_step):
        per = metrics(group)
        for j, name in enumerate(cfg.estimators):
            curves[k, j] = per[name]
    flops = complexity_table(cfg.ofdm, cfg.pad_factor)
    return ResultsBundle(
        estimators=cfg.estimators,
        summary=metrics(records),
        flops={name: flops[name] for name in cfg.estimators},
        curves=curves,
        bounds=bounds_report(cfg.ofdm),
        config=cfg,
        records=records,
    )


def run_experiment(cfg: ExperimentConfig) -> ResultsBundle:
    jobs = [(cfg, i) for i in range(cfg.n_trajectories)]
    if cfg.workers == 1:
        per_traj = [_simulate_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            per_traj = list(pool.map(_simulate_job, jobs, chunksize=1))
    records = [rec for recs in per_traj for rec in recs]
    log.info("simulated %d trajectories x %d steps", cfg.n_trajectories, cfg.scenario.steps)
    return aggregate(cfg, records)


# output -----------------------------------------------------------------------


def _g(x: float) -> str:
    return f"{x:.6g}"


def summary_text(bundle: ResultsBundle) -> str:
    cfg = bundle.config
    parser = configparser.ConfigParser(interpolation=None)
    parser["provenance"] = {
        "package_version": bundle.version,
        "master_seed": str(cfg.master_seed),
        "init_mode": cfg.init_mode,
        "n_trajectories": str(cfg.n_trajectories),
        "steps": str(cfg.scenario.steps),
        "noise": _format_value(cfg.noise),
    }
    b = bundle.bounds
    parser["bounds"] = {
        "crb_aoa_avg": _g(b.crb_aoa_avg),
        "crb_aoa_std": _g(math.sqrt(b.crb_aoa_avg)),
        "range_bound": _g(b.range_bound),
        "range_std": _g(math.sqrt(b.range_bound)),
        "velocity_bound": _g(b.velocity_bound),
        "velocity_std": _g(math.sqrt(b.velocity_bound)),
    }
    for name in bundle.estimators:
        m = bundle.summary[name]
        parser[f"estimator {name}"] = {
            "range_rmse": _g(m.range_rmse),
            "velocity_rmse": _g(m.velocity_rmse),
            "aoa_rmse": _g(m.aoa_rmse),
            "aoa_rmse_deg": _g(math.degrees(m.aoa_rmse)),
            "position_err": _g(m.position_err),
            "flops": str(bundle.flops[name]),
        }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def curves_text(bundle: ResultsBundle) -> str:
    if bundle.curves.size == 0:
        raise InvalidArgumentError("no per-step curves to write")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for k in range(bundle.curves.shape[0]):
        for j, name in enumerate(bundle.estimators):
            writer.writerow([k, name] + [_g(v) for v in bundle.curves[k, j]])
    return buf.getvalue()


def emit_results(bundle: ResultsBundle, out_dir) -> dict[str, Path]:
    """Write ``summary.txt``, ``curves.csv`` and ``config.txt`` into ``out_dir``."""
    out_dir = Path(out_dir)
    texts = {
        "summary": ("summary.txt", summary_text(bundle)),
        "curves": ("curves.csv", curves_text(bundle)),
        "config": ("config.txt", config_to_text(bundle.config)),
    }
    paths = {}
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for key, (name, text) in texts.items():
            path = out_dir / name
            with open(path, "w", newline="") as fh:
                fh.write(text)
            paths[key] = path
    except OSError as exc:
        raise OSError(f"cannot write results to {os.fspath(out_dir)}: {exc}") from exc
    return paths


def read_curves(path) -> tuple[tuple[str, ...], np.ndarray]:
    """Parse ``curves.csv`` back into (estimators, array of shape steps x estimators x 4)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != CURVE_HEADER:
        raise InvalidArgumentError(f"unexpected header in {path}: {rows[0]}")
    names = []
    for row in rows[1:]:
        if row[1] not in names:
            names.append(row[1])
    steps = max(int(row[0]) for row in rows[1:]) + 1
    out = np.full((steps, len(names), len(CURVE_FIELDS)), np.nan)
    for row in rows[1:]:
        out[int(row[0]), names.index(row[1])] = [float(v) for v in row[2:]]
    return tuple(names), out


def read_summary(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.read(path)
    return parser
