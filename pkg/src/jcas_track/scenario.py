"""Ground truth trajectories, performance bounds, error metrics and FLOP budgets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InvalidArgumentError, ScenarioInfeasibleError
from .transforms import flops_czt, flops_fft
from .waveform import C0, OfdmConfig, TargetTruth

ESTIMATORS = ("RDM", "Kalman", "EBM", "ZP", "CZT", "KalmanCZT")

KALMAN_FLOPS = 50
EBM_FLOPS = 3


@dataclass(frozen=True)
class ScenarioParams:
    """Constant-velocity 2-D target motion; angles in degrees, distances in metres."""

    steps: int = 92
    initial_range: tuple[float, float] = (30.0, 150.0)
    initial_angle_deg: float = 50.0
    speed: tuple[float, float] = (5.0, 25.0)
    min_range: float = 5.0
    max_range: float = 300.0
    max_angle_deg: float = 60.0
    # "uniform": random heading; "radial": straight inbound towards the array
    heading: str = "uniform"
    max_attempts: int = 1000

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidArgumentError("steps must be >= 1")
        if self.heading not in ("uniform", "radial"):
            raise InvalidArgumentError(f"unknown heading mode {self.heading!r}")
        lo, hi = self.initial_range
        if not 0 < lo <= hi:
            raise InvalidArgumentError("initial_range must satisfy 0 < lo <= hi")


@dataclass
class Trajectory:
    """Per-step ground truth sampled every ``frame_interval`` seconds.

    Radial velocity at step k is the secant ``(r_k - r_{k+1}) / frame_interval``,
    so ``r_{k+1} = r_k - frame_interval * v_k`` holds exactly.
    """

    range: np.ndarray
    radial_velocity: np.ndarray
    aoa: np.ndarray
    position: np.ndarray  # (steps, 2) Cartesian, y along boresight
    frame_interval: float

    @property
    def steps(self) -> int:
        return len(self.range)

    def truth(self, k: int) -> TargetTruth:
        return TargetTruth(float(self.range[k]), float(self.radial_velocity[k]), float(self.aoa[k]))

    def truths(self) -> list[TargetTruth]:
        return [self.truth(k) for k in range(self.steps)]


def polar_to_cartesian(range_, aoa):
    """(x, y) with y along the array boresight and x = r sin(aoa)."""
    range_ = np.asarray(range_, dtype=np.float64)
    aoa = np.asarray(aoa, dtype=np.float64)
    return np.stack([range_ * np.sin(aoa), range_ * np.cos(aoa)], axis=-1)


def trajectory_from_motion(position, velocity, steps: int, frame_interval: float) -> Trajectory:
    """Straight-line motion from ``position`` (x, y) with constant ``velocity`` (vx, vy)."""
    t = frame_interval * np.arange(steps + 1)
    pos = np.asarray(position, dtype=np.float64) + np.outer(t, np.asarray(velocity, dtype=np.float64))
    rng_all = np.hypot(pos[:, 0], pos[:, 1])
    radial = (rng_all[:-1] - rng_all[1:]) / frame_interval
    aoa = np.arctan2(pos[:-1, 0], pos[:-1, 1])
    return Trajectory(rng_all[:-1], radial, aoa, pos[:-1], frame_interval)


def _admissible(traj: Trajectory, params: ScenarioParams, max_range: float) -> bool:
    return bool(
        np.all(traj.range >= params.min_range)
        and np.all(traj.range <= max_range)
        and np.all(np.abs(traj.aoa) <= math.radians(params.max_angle_deg))
    )


def generate_trajectory(cfg: OfdmConfig, scen: ScenarioParams, rng: np.random.Generator) -> Trajectory:
    """Draw a random admissible constant-velocity trajectory.

    Ranges are additionally capped below the cyclic-prefix limit of ``cfg``.
    """
    max_range = min(scen.max_range, cfg.max_cp_range * (1 - 1e-9))
    dt = cfg.frame_interval
    for _ in range(scen.max_attempts):
        r0 = rng.uniform(*scen.initial_range)
        phi0 = math.radians(rng.uniform(-scen.initial_angle_deg, scen.initial_angle_deg))
        speed = rng.uniform(*scen.speed)
        if scen.heading == "radial":
            heading = phi0 + math.pi  # pointing back at the origin
        else:
            heading = rng.uniform(-math.pi, math.pi)
        start = (r0 * math.sin(phi0), r0 * math.cos(phi0))
        vel = (speed * math.sin(heading), speed * math.cos(heading))
        traj = trajectory_from_motion(start, vel, scen.steps, dt)
        if _admissible(traj, scen, max_range):
            return traj
    raise ScenarioInfeasibleError(
        f"no admissible trajectory after {scen.max_attempts} attempts"
    )


# bounds ---------------------------------------------------------------------


def crb_aoa(aoa: float, sigma_s2: float, sigma_ns2: float, k: int, n_win: int) -> float:
    """Angle CRB (rad^2) of a ULA with half-wavelength spacing at angle ``aoa``."""
    return crb_aoa_avg(sigma_s2, sigma_ns2, k, n_win) / (2.0 * math.cos(aoa) ** 2)


def crb_aoa_avg(sigma_s2: float, sigma_ns2: float, k: int, n_win: int) -> float:
    """Angle CRB averaged over cos^2 of the angle (mean 1/2), in rad^2."""
    if k < 2:
        raise InvalidArgumentError("angle CRB needs at least two antennas")
    if min(sigma_s2, sigma_ns2, n_win) <= 0:
        raise InvalidArgumentError("powers and snapshot count must be positive")
    num = 12.0 * sigma_ns2 * (sigma_ns2 + k * sigma_s2)
    den = math.pi**2 * n_win * sigma_s2**2 * k**2 * (k**2 - 1)
    return num / den


def quantization_bounds(cfg: OfdmConfig, n_fft: int, m_fft: int) -> tuple[float, float]:
    """Uniform-quantization variance of range (m^2) and velocity ((m/s)^2) bins."""
    if n_fft < 1 or m_fft < 1:
        raise InvalidArgumentError("transform lengths must be positive")
    range_var = C0**2 / (12.0 * (2.0 * n_fft * cfg.subcarrier_spacing) ** 2)
    velocity_var = C0**2 / (12.0 * (2.0 * cfg.f_c * m_fft * cfg.t0) ** 2)
    return range_var, velocity_var


@dataclass(frozen=True)
class BoundsReport:
    crb_aoa_avg: float  # rad^2
    range_bound: float  # m^2
    velocity_bound: float  # (m/s)^2


def bounds_report(cfg: OfdmConfig) -> BoundsReport:
    rb, vb = quantization_bounds(cfg, cfg.n_subcarriers, cfg.n_symbols)
    crb = crb_aoa_avg(1.0, cfg.noise_variance, cfg.n_antennas, cfg.n_win)
    return BoundsReport(crb, rb, vb)


# metrics --------------------------------------------------------------------


class Estimate(NamedTuple):
    range: float
    velocity: float
    aoa: float


@dataclass
class StepRecord:
    truth: TargetTruth
    estimates: dict[str, Estimate]
    step: int = 0
    trajectory: int = 0
    diagnostics: dict[str, float] = field(default_factory=dict)


class Metrics(NamedTuple):
    range_rmse: float
    velocity_rmse: float
    aoa_rmse: float
    position_err: float  # mean Euclidean distance, m


def metrics(records: Iterable[StepRecord]) -> dict[str, Metrics]:
    """RMSE of range / velocity / AoA and mean position error for every estimator."""
    records = list(records)
    if not records:
        raise InvalidArgumentError("metrics need at least one record")
    names = list(records[0].estimates)
    truth = np.array([(r.truth.range, r.truth.radial_velocity, r.truth.aoa) for r in records])
    true_pos = polar_to_cartesian(truth[:, 0], truth[:, 2])
    out = {}
    for name in names:
        est = np.array([tuple(r.estimates[name]) for r in records], dtype=np.float64)
        err = est - truth
        rmse = np.sqrt(np.mean(err**2, axis=0))
        pos = polar_to_cartesian(est[:, 0], est[:, 2])
        dist = np.hypot(*(pos - true_pos).T)
        out[name] = Metrics(float(rmse[0]), float(rmse[1]), float(rmse[2]), float(np.mean(dist)))
    return out


# complexity -----------------------------------------------------------------


def complexity_table(cfg: OfdmConfig, pad_factor: int = 16) -> dict[str, int]:
    """FLOP count of one frame for each estimator."""
    n, m = cfg.n_subcarriers, cfg.n_symbols
    n_pad = pad_factor * n
    c0 = flops_fft(n * m)
    doppler = int(round(5 * n * m * math.log2(m)))  # row FFTs of the Doppler stage
    czt_total = m * flops_czt(n) + doppler
    return {
        "RDM": c0,
        "Kalman": c0 + KALMAN_FLOPS,
        "EBM": c0 + EBM_FLOPS,
        "ZP": m * flops_fft(n_pad) + doppler,
        "CZT": czt_total,
        "KalmanCZT": czt_total + KALMAN_FLOPS,
    }
