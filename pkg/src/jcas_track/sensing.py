"""Range-Doppler processing of a ratio matrix.

The native map is ``IFFT`` over subcarriers (columns) of the ``FFT`` over OFDM
symbols (rows); the Doppler axis is fftshifted so zero velocity sits at bin
``M // 2``. Zero padding interpolates the range axis, and the zoom evaluates the
same transform on an arbitrary range grid with chirp-Z transforms:

    Z = conj( CZT_range{ conj( CZT_doppler{Y} ) } )

Range contours are described as ``z_k = A * W**k`` (the form used for the
zoom parameters) and handed to :func:`transforms.czt` as ``a=A, w=1/W``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.fft

from .errors import EstimationError, InvalidArgumentError
from .transforms import CztParams, czt, fft_1d
from .waveform import OfdmConfig, RatioMatrix


@dataclass
class RangeDopplerMap:
    power: np.ndarray  # range bin x Doppler bin
    range_axis: np.ndarray
    velocity_axis: np.ndarray
    source: str = "native"

    def __post_init__(self):
        if self.power.shape != (len(self.range_axis), len(self.velocity_axis)):
            raise InvalidArgumentError("axis lengths do not match the power matrix")

    @property
    def range_spacing(self) -> float:
        return float(self.range_axis[1] - self.range_axis[0]) if len(self.range_axis) > 1 else 0.0


@dataclass(frozen=True)
class ZoomWindow:
    """Range interval ``[center - span/2, center + span/2)`` sampled with ``n_out_range`` bins."""

    center_range: float
    span: float
    n_out_range: int = 2048
    n_out_doppler: int | None = None  # None: one output per OFDM symbol

    def __post_init__(self):
        if not self.span > 1e-12:
            raise InvalidArgumentError(f"zoom span must exceed 1e-12 m, got {self.span}")
        if self.n_out_range < 2 or (self.n_out_doppler is not None and self.n_out_doppler < 2):
            raise InvalidArgumentError("zoom windows need at least two output bins per axis")

    @property
    def spacing(self) -> float:
        return self.span / self.n_out_range

    @property
    def start(self) -> float:
        return max(0.0, self.center_range - self.span / 2.0)


class Peak(NamedTuple):
    range: float
    velocity: float
    power: float


def doppler_start_bin(n_symbols: int) -> int:
    return -(n_symbols // 2)


def velocity_axis(cfg: OfdmConfig, n_out: int | None = None) -> np.ndarray:
    n_out = cfg.n_symbols if n_out is None else n_out
    return (doppler_start_bin(cfg.n_symbols) + np.arange(n_out)) * cfg.velocity_resolution


def doppler_spectrum(y: RatioMatrix) -> np.ndarray:
    """Row FFT of the ratio matrix, fftshifted to put zero Doppler in the centre."""
    return scipy.fft.fftshift(fft_1d(y.data, axis=1), axes=1)


def compute_rdm(y: RatioMatrix) -> RangeDopplerMap:
    cfg = y.cfg
    rdm = fft_1d(doppler_spectrum(y), inverse=True, axis=0)
    return RangeDopplerMap(
        power=np.abs(rdm) ** 2,
        range_axis=np.arange(cfg.n_subcarriers) * cfg.range_resolution,
        velocity_axis=velocity_axis(cfg),
        source="native",
    )


def compute_rdm_zeropad(y: RatioMatrix, pad_factor: int) -> RangeDopplerMap:
    """Range-interpolated map: columns zero-padded to ``pad_factor * N`` before the IFFT."""
    if pad_factor < 1 or pad_factor & (pad_factor - 1):
        raise InvalidArgumentError(f"pad_factor must be a power of two, got {pad_factor}")
    if pad_factor == 1:
        native = compute_rdm(y)
        native.source = "zeropad(1)"
        return native
    cfg = y.cfg
    n_pad = pad_factor * cfg.n_subcarriers
    rdm = scipy.fft.ifft(doppler_spectrum(y), n=n_pad, axis=0)
    return RangeDopplerMap(
        power=np.abs(rdm) ** 2,
        range_axis=np.arange(n_pad) * (cfg.range_resolution / pad_factor),
        velocity_axis=velocity_axis(cfg),
        source=f"zeropad({pad_factor})",
    )


def range_zoom_contour(window: ZoomWindow, cfg: OfdmConfig) -> tuple[complex, complex]:
    """Start ``A_r`` and ratio ``W_r`` (contour ``A_r * W_r**k``) of a range zoom.

    The start is clamped to zero range.
    """
    n_res = cfg.n_subcarriers * cfg.range_resolution
    a_r = np.exp(2j * np.pi * max(0.0, (window.center_range - window.span / 2.0) / n_res))
    w_r = np.exp(2j * np.pi * window.span / (window.n_out_range * n_res))
    return complex(a_r), complex(w_r)


def doppler_contour(cfg: OfdmConfig) -> tuple[complex, complex]:
    """Start and ratio of the Doppler contour; the start equals -1 for even M."""
    m = cfg.n_symbols
    return complex(np.exp(2j * np.pi * doppler_start_bin(m) / m)), complex(np.exp(2j * np.pi / m))


def _range_czt(spectrum: np.ndarray, window: ZoomWindow, cfg: OfdmConfig) -> np.ndarray:
    a_r, w_r = range_zoom_contour(window, cfg)
    params = CztParams(a=a_r, w=1.0 / w_r, m_out=window.n_out_range)
    return np.conj(czt(np.conj(spectrum), params, axis=0)) / cfg.n_subcarriers


def compute_zoom(y: RatioMatrix, window: ZoomWindow, cfg: OfdmConfig | None = None) -> RangeDopplerMap:
    """Zoomed map over ``window``; power is scaled like :func:`compute_rdm` (1/N)."""
    cfg = y.cfg if cfg is None else cfg
    n_dop = cfg.n_symbols if window.n_out_doppler is None else window.n_out_doppler
    a_v, w_v = doppler_contour(cfg)
    spectrum = czt(y.data, CztParams(a=a_v, w=1.0 / w_v, m_out=n_dop), axis=1)
    zoom = _range_czt(spectrum, window, cfg)
    return RangeDopplerMap(
        power=np.abs(zoom) ** 2,
        range_axis=window.start + np.arange(window.n_out_range) * window.spacing,
        velocity_axis=velocity_axis(cfg, n_dop),
        source=f"czt({window.start:.6g}+{window.span:.6g})",
    )


def peak_index(power: np.ndarray) -> tuple[int, int]:
    """Index of the global maximum; ties go to the smallest range bin, then Doppler bin."""
    flat = int(np.argmax(power))
    return divmod(flat, power.shape[1])


def detect_peak(rdm: RangeDopplerMap) -> Peak:
    if rdm.power.size == 0:
        raise InvalidArgumentError("empty range-Doppler map")
    i, j = peak_index(rdm.power)
    value = float(rdm.power[i, j])
    if not value > 0:
        raise EstimationError("no detection: range-Doppler map is all zero")
    return Peak(float(rdm.range_axis[i]), float(rdm.velocity_axis[j]), value)


class FrameAnalysis:
    """Peak searches that share one Doppler spectrum per frame.

    Zero-padded and zoomed peaks are found without forming the full map: the
    power of any range sample in Doppler column ``l`` is at most
    ``(sum_n |D[n, l]| * scale)**2``, so columns are visited in decreasing order
    of that bound and the search stops once the bound drops below the best
    power found. The result equals ``detect_peak`` on the full map.
    """

    def __init__(self, y: RatioMatrix):
        self.y = y
        self.cfg = y.cfg
        self.spectrum = doppler_spectrum(y)
        self._order = None
        self._native = None

    def _columns(self):
        if self._order is None:
            l1 = np.abs(self.spectrum).sum(axis=0)
            self._l1 = l1
            self._order = np.argsort(-l1, kind="stable")
        return self._order, self._l1

    def native_map(self) -> RangeDopplerMap:
        if self._native is None:
            rdm = fft_1d(self.spectrum, inverse=True, axis=0)
            self._native = RangeDopplerMap(
                power=np.abs(rdm) ** 2,
                range_axis=np.arange(self.cfg.n_subcarriers) * self.cfg.range_resolution,
                velocity_axis=velocity_axis(self.cfg),
            )
        return self._native

    def native_peak(self) -> Peak:
        return detect_peak(self.native_map())

    def _pruned_search(self, column_power, scale: float):
        order, l1 = self._columns()
        best = (-1.0, 0, 0)
        for col in order:
            col = int(col)
            if (l1[col] * scale) ** 2 * (1.0 + 1e-9) < best[0]:
                break
            power = column_power(col)
            i = int(np.argmax(power))
            cand = (float(power[i]), i, col)
            if cand[0] > best[0] or (cand[0] == best[0] and (i, col) < best[1:]):
                best = cand
        if not best[0] > 0:
            raise EstimationError("no detection: range-Doppler map is all zero")
        return best

    def zeropad_peak(self, pad_factor: int) -> Peak:
        cfg = self.cfg
        n_pad = pad_factor * cfg.n_subcarriers

        def column_power(col):
            return np.abs(scipy.fft.ifft(self.spectrum[:, col], n=n_pad)) ** 2

        value, i, col = self._pruned_search(column_power, 1.0 / n_pad)
        v_axis = velocity_axis(cfg)
        return Peak(i * cfg.range_resolution / pad_factor, float(v_axis[col]), value)

    def zoom_peak(self, window: ZoomWindow) -> Peak:
        cfg = self.cfg
        if window.n_out_doppler not in (None, cfg.n_symbols):
            return detect_peak(compute_zoom(self.y, window, cfg))

        def column_power(col):
            return np.abs(_range_czt(self.spectrum[:, col], window, cfg)) ** 2

        value, i, col = self._pruned_search(column_power, 1.0 / cfg.n_subcarriers)
        v_axis = velocity_axis(cfg)
        return Peak(window.start + i * window.spacing, float(v_axis[col]), value)


def czt_window_like_zeropad(center: float, cfg: OfdmConfig, pad_factor: int = 16,
                            n_out: int = 2048) -> ZoomWindow:
    """Zoom window whose bin spacing equals ``r_res / pad_factor``."""
    span = n_out * cfg.range_resolution / pad_factor
    return ZoomWindow(center_range=center, span=span, n_out_range=n_out)
