"""OFDM sensing observation for a single point target.

The reflection is modelled in the time-frequency domain after CP removal and
matched filtering, so a frame is fully described by the element-wise ratio
``Y = R / X``. Each entry carries a range phase ramp over subcarriers and a
Doppler phase ramp over OFDM symbols:

    Y[n, m] = sigma_s * exp(-j2π n Δf τ) * exp(+j2π f_D m T0) + q[n, m] / X[n, m]

Angle of arrival is estimated separately from per-antenna snapshots of a
uniform linear array with half-wavelength spacing.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError, InvalidArgumentError, OutOfModelError

C0 = 299_792_458.0

_QPSK = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / math.sqrt(2.0)


@dataclass(frozen=True)
class OfdmConfig:
    """Frame geometry and link budget. Defaults are the 5 GHz / 25 MHz set-up."""

    f_c: float = 5e9
    bandwidth: float = 25e6
    n_subcarriers: int = 2048
    n_symbols: int = 259
    n_cp: int = 30
    n_antennas: int = 16
    snr_phi_db: float = 0.0
    n_win: int = 256
    # 3 dB transmit-power loss for the beam share steered at the communication user
    split_beam_penalty: bool = False
    # add 10 log10(K) receive beamforming gain to the range-Doppler path
    rx_array_gain: bool = True

    def __post_init__(self):
        n = self.n_subcarriers
        if n < 1 or n & (n - 1):
            raise InvalidArgumentError(f"n_subcarriers must be a power of two, got {n}")
        if self.n_symbols < 1:
            raise InvalidArgumentError("n_symbols must be >= 1")
        if self.n_cp < 0:
            raise InvalidArgumentError("n_cp must be >= 0")
        if self.bandwidth <= 0 or self.f_c <= 0:
            raise InvalidArgumentError("carrier and bandwidth must be positive")
        if self.n_antennas < 1 or self.n_win < 1:
            raise InvalidArgumentError("n_antennas and n_win must be >= 1")

    @property
    def subcarrier_spacing(self) -> float:
        return self.bandwidth / self.n_subcarriers

    @property
    def sample_duration(self) -> float:
        return 1.0 / self.bandwidth

    @property
    def symbol_duration(self) -> float:
        return self.n_subcarriers / self.bandwidth

    @property
    def cp_duration(self) -> float:
        return self.n_cp / self.bandwidth

    @property
    def t0(self) -> float:
        """OFDM symbol duration including the cyclic prefix."""
        return (self.n_subcarriers + self.n_cp) / self.bandwidth

    @property
    def frame_interval(self) -> float:
        """M * T0, the time between consecutive sensing frames."""
        return self.n_symbols * self.t0

    @property
    def range_resolution(self) -> float:
        return C0 / (2.0 * self.bandwidth)

    @property
    def velocity_resolution(self) -> float:
        return C0 / (2.0 * self.f_c * self.frame_interval)

    @property
    def max_cp_range(self) -> float:
        """Largest range whose round-trip delay still fits inside the cyclic prefix."""
        return C0 * self.cp_duration / 2.0

    @property
    def noise_variance(self) -> float:
        """Per-antenna noise power for unit signal power at ``snr_phi_db``."""
        return 10.0 ** (-self.snr_phi_db / 10.0)

    @property
    def sensing_snr_db(self) -> float:
        """Effective post-beamforming SNR of the ratio matrix."""
        snr = self.snr_phi_db
        if self.rx_array_gain:
            snr += 10.0 * math.log10(self.n_antennas)
        if self.split_beam_penalty:
            snr -= 3.0
        return snr


@dataclass(frozen=True)
class TargetTruth:
    range: float
    radial_velocity: float
    aoa: float

    def __post_init__(self):
        if not self.range >= 0:
            raise InvalidArgumentError(f"range must be >= 0, got {self.range}")
        if not abs(self.aoa) < math.pi / 2:
            raise InvalidArgumentError(f"|aoa| must be < pi/2, got {self.aoa}")

    def delay(self) -> float:
        return 2.0 * self.range / C0

    def doppler(self, f_c: float) -> float:
        return 2.0 * self.radial_velocity * f_c / C0


@dataclass
class RatioMatrix:
    """N x M element-wise ratio ``R / X`` of one frame, with its frame geometry."""

    data: np.ndarray
    cfg: OfdmConfig

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        shape = (self.cfg.n_subcarriers, self.cfg.n_symbols)
        if self.data.shape != shape:
            raise InvalidArgumentError(f"ratio matrix shape {self.data.shape} != {shape}")

    @property
    def shape(self):
        return self.data.shape


@dataclass
class ArraySnapshots:
    data: np.ndarray  # antenna x snapshot

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.ndim != 2:
            raise InvalidArgumentError("snapshots must be a 2-D antenna x snapshot matrix")

    @property
    def n_antennas(self) -> int:
        return self.data.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.data.shape[1]


def _complex_noise(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    shape = tuple(np.atleast_1d(shape))
    # interleaved (re, im) normals viewed as complex128
    q = rng.standard_normal(shape[:-1] + (2 * shape[-1],)).view(np.complex128)
    q *= math.sqrt(variance / 2.0)
    return q


def generate_frame(cfg: OfdmConfig, rng: np.random.Generator) -> np.ndarray:
    """Random N x M QPSK frame with unit-modulus symbols."""
    idx = rng.integers(0, 4, size=(cfg.n_subcarriers, cfg.n_symbols), dtype=np.uint8)
    return _QPSK[idx]


def noiseless_ratio(cfg: OfdmConfig, truth: TargetTruth, sigma_s: float = 1.0) -> np.ndarray:
    if truth.delay() >= cfg.cp_duration:
        raise OutOfModelError(
            f"range {truth.range:.3f} m exceeds the CP-limited range {cfg.max_cp_range:.3f} m"
        )
    n = np.arange(cfg.n_subcarriers)
    m = np.arange(cfg.n_symbols)
    range_phase = np.exp(-2j * np.pi * n * cfg.subcarrier_spacing * truth.delay())
    doppler_phase = np.exp(2j * np.pi * truth.doppler(cfg.f_c) * m * cfg.t0)
    return sigma_s * np.outer(range_phase, doppler_phase)


def synthesize_ratio_matrix(
    cfg: OfdmConfig,
    truth: TargetTruth,
    frame: np.ndarray,
    rng: np.random.Generator,
    *,
    noise: bool = True,
    snr_db: float | None = None,
) -> RatioMatrix:
    """Ratio matrix of one frame for a point target (signal power normalised to 1).

    ``snr_db`` overrides the effective sensing SNR taken from ``cfg``.
    """
    frame = np.asarray(frame)
    if frame.shape != (cfg.n_subcarriers, cfg.n_symbols):
        raise InvalidArgumentError(f"frame shape {frame.shape} does not match config")
    y = noiseless_ratio(cfg, truth)
    if noise:
        snr = cfg.sensing_snr_db if snr_db is None else snr_db
        q = _complex_noise(rng, y.shape, 10.0 ** (-snr / 10.0))
        y = y + q / frame
    return RatioMatrix(y, cfg)


def steering_vector(n_antennas: int, aoa) -> np.ndarray:
    """ULA response ``exp(jπ a sin(aoa))``; shape (K,) or (K, len(aoa))."""
    a = np.arange(n_antennas)
    return np.exp(1j * np.pi * np.multiply.outer(a, np.sin(aoa)))


def synthesize_array_snapshots(
    cfg: OfdmConfig, truth: TargetTruth, rng: np.random.Generator, *, noise: bool = True
) -> ArraySnapshots:
    if cfg.n_antennas < 2:
        raise InvalidArgumentError("angle estimation needs at least two antennas")
    symbols = _QPSK[rng.integers(0, 4, size=cfg.n_win, dtype=np.uint8)]
    data = np.outer(steering_vector(cfg.n_antennas, truth.aoa), symbols)
    if noise:
        data = data + _complex_noise(rng, data.shape, cfg.noise_variance)
    return ArraySnapshots(data)


def angle_grid(grid_step: float, sector: tuple[float, float]) -> np.ndarray:
    lo, hi = sector
    count = int(math.floor((hi - lo) / grid_step + 1e-9)) + 1
    return lo + grid_step * np.arange(count)


@functools.lru_cache(maxsize=8)
def _scan_steering(n_antennas: int, grid_step: float, lo: float, hi: float):
    grid = angle_grid(grid_step, (lo, hi))
    return grid, steering_vector(n_antennas, grid)


def bartlett_spectrum(snapshots: ArraySnapshots, grid: np.ndarray, steer=None) -> np.ndarray:
    """Beamscan power ``a(φ)^H C a(φ)`` over ``grid`` for the sample covariance C."""
    x = snapshots.data
    cov = x @ x.conj().T / x.shape[1]
    if steer is None:
        steer = steering_vector(x.shape[0], grid)
    return np.real(np.einsum("kg,kg->g", steer.conj(), cov @ steer))


def bartlett_aoa(
    snapshots: ArraySnapshots,
    grid_step: float = math.radians(0.01),
    scan_sector: tuple[float, float] = (-math.radians(60.0), math.radians(60.0)),
) -> float:
    """Bartlett beamscan AoA estimate in radians; ties resolve to the smaller angle."""
    if snapshots.n_snapshots < 1:
        raise InvalidArgumentError("need at least one snapshot")
    if not np.any(snapshots.data):
        raise EstimationError("all-zero snapshots: covariance is degenerate")
    grid, steer = _scan_steering(snapshots.n_antennas, float(grid_step),
                                 float(scan_sector[0]), float(scan_sector[1]))
    return float(grid[np.argmax(bartlett_spectrum(snapshots, grid, steer))])
