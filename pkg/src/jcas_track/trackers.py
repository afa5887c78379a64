"""Range / radial-velocity / AoA tracking over consecutive sensing frames.

State vector ``x = (range [m], radial velocity [m/s], aoa [rad])`` with a
constant-velocity transition; radial velocity is positive towards the
receiver, so the predicted range is ``r - M*T0 * v``. Measurements observe
the state directly (identity observation matrix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidArgumentError, NumericalError
from .sensing import Peak, ZoomWindow, compute_zoom, detect_peak
from .waveform import OfdmConfig, RatioMatrix

# covariances tuned for the 5 GHz / 25 MHz scenario, in SI units
SIGMA_MEAS_DIAG = (4.4, 0.01, 0.01)
SIGMA_PRED_DIAG = (1.3e-5, 0.8, 0.4)
MIN_CZT_SPAN = 0.01  # m


@dataclass(frozen=True)
class TrackState:
    x: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=np.float64).reshape(3))
        object.__setattr__(self, "cov", np.asarray(self.cov, dtype=np.float64).reshape(3, 3))

    @property
    def range(self) -> float:
        return float(self.x[0])

    @property
    def velocity(self) -> float:
        return float(self.x[1])

    @property
    def aoa(self) -> float:
        return float(self.x[2])


@dataclass(frozen=True)
class KalmanConfig:
    f: np.ndarray
    sigma_meas: np.ndarray
    sigma_pred: np.ndarray
    mt0: float

    def __post_init__(self):
        for name in ("f", "sigma_meas", "sigma_pred"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        if self.f.shape != (3, 3) or not math.isclose(self.f[0, 1], -self.mt0, rel_tol=1e-12):
            raise InvalidArgumentError("transition matrix must be the constant-velocity model")

    @classmethod
    def from_ofdm(cls, ofdm: OfdmConfig, sigma_meas_diag=SIGMA_MEAS_DIAG,
                  sigma_pred_diag=SIGMA_PRED_DIAG) -> "KalmanConfig":
        return cls.from_interval(ofdm.frame_interval, sigma_meas_diag, sigma_pred_diag)

    @classmethod
    def from_interval(cls, mt0: float, sigma_meas_diag=SIGMA_MEAS_DIAG,
                      sigma_pred_diag=SIGMA_PRED_DIAG) -> "KalmanConfig":
        return cls(transition_matrix(mt0), np.diag(sigma_meas_diag), np.diag(sigma_pred_diag), mt0)


def transition_matrix(mt0: float) -> np.ndarray:
    f = np.eye(3)
    f[0, 1] = -mt0
    return f


def known_init(range_: float, velocity: float, aoa: float) -> TrackState:
    """Start from exact ground truth: zero covariance."""
    return TrackState(np.array([range_, velocity, aoa]), np.zeros((3, 3)))


def rdm_init(range_: float, velocity: float, aoa: float, ofdm: OfdmConfig) -> TrackState:
    """Start from a native range-Doppler estimate."""
    cov = np.diag([ofdm.range_resolution, ofdm.velocity_resolution, 0.5])
    return TrackState(np.array([range_, velocity, aoa]), cov)


def kalman_predict(state: TrackState, cfg: KalmanConfig) -> TrackState:
    f = cfg.f
    return TrackState(f @ state.x, f @ state.cov @ f.T + cfg.sigma_pred)


def kalman_update(pred: TrackState, z, sigma_meas) -> TrackState:
    z = np.asarray(z, dtype=np.float64)
    cov = pred.cov
    innovation_cov = cov + np.asarray(sigma_meas, dtype=np.float64)
    if not np.all(np.isfinite(innovation_cov)) or np.linalg.cond(innovation_cov) > 1e15:
        raise NumericalError("innovation covariance is singular")
    # K = cov @ inv(S); S symmetric so solve S K^T = cov^T
    gain = np.linalg.solve(innovation_cov.T, cov.T).T
    x = pred.x + gain @ (z - pred.x)
    post = (np.eye(3) - gain) @ cov
    return TrackState(x, 0.5 * (post + post.T))


@dataclass(frozen=True)
class EbmState:
    r_ebm: float
    prev: float


def ebm_init(rdm_range: float, initial_range: float | None = None) -> EbmState:
    """First step: the output starts at ``initial_range`` (default: the RDM estimate)."""
    start = rdm_range if initial_range is None else initial_range
    return EbmState(float(start), float(rdm_range))


def ebm_step(state: EbmState, rdm_range: float, rdm_velocity: float, mt0: float,
             tol: float = 1e-6) -> EbmState:
    """Event-based range update.

    A bin change of the RDM estimate is trusted and resolved to the midpoint of
    the two bins; otherwise the range is extrapolated with the RDM velocity.
    ``tol`` is the equality tolerance for the bin-quantized ranges.
    """
    if abs(rdm_range - state.prev) > tol:
        r = 0.5 * (rdm_range + state.prev)
    else:
        r = state.r_ebm - mt0 * rdm_velocity
    return EbmState(max(r, 0.0), float(rdm_range))


@dataclass(frozen=True)
class CztMeasurementPlan:
    window: ZoomWindow
    resolution: float  # d_CZT, m
    range_meas_var: float  # d_CZT**2 / 12, m^2


def plan_czt_measurement(pred: TrackState, n_czt_range: int = 2048,
                         n_czt_doppler: int | None = None) -> CztMeasurementPlan:
    """Zoom window from the prediction: span six predicted range std devs, at least 1 cm."""
    span = max(6.0 * math.sqrt(max(pred.cov[0, 0], 0.0)), MIN_CZT_SPAN)
    window = ZoomWindow(pred.range, span, n_czt_range, n_czt_doppler)
    d = window.spacing
    return CztMeasurementPlan(window, d, d * d / 12.0)


def kalman_czt_step(
    state: TrackState,
    y: RatioMatrix,
    aoa_meas: float,
    cfg: KalmanConfig,
    ofdm: OfdmConfig | None = None,
    *,
    n_czt_range: int = 2048,
    n_czt_doppler: int | None = None,
    quantization_noise: bool = True,
    measure: Callable[[ZoomWindow], Peak] | None = None,
) -> TrackState:
    """One KalmanCZT iteration: predict, zoom around the prediction, update.

    ``measure`` replaces the full zoom + peak detection (e.g. with
    :meth:`sensing.FrameAnalysis.zoom_peak`); it must return the same peak.
    With ``quantization_noise=False`` the range measurement variance of ``cfg``
    is used unchanged.
    """
    ofdm = y.cfg if ofdm is None else ofdm
    pred = kalman_predict(state, cfg)
    plan = plan_czt_measurement(pred, n_czt_range, n_czt_doppler)
    if measure is None:
        peak = detect_peak(compute_zoom(y, plan.window, ofdm))
    else:
        peak = measure(plan.window)
    z = np.array([peak.range, peak.velocity, aoa_meas])
    sigma_meas = cfg.sigma_meas.copy()
    if quantization_noise:
        sigma_meas[0, 0] = plan.range_meas_var
    return kalman_update(pred, z, sigma_meas)


def kalman_step(state: TrackState, z, cfg: KalmanConfig) -> TrackState:
    return kalman_update(kalman_predict(state, cfg), z, cfg.sigma_meas)

