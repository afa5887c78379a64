"""Complex transform kernels: FFT wrappers, the chirp-Z transform and FLOP models.

The chirp-Z transform follows the Rabiner convention

    out[k] = sum_n x[n] * a**(-n) * w**(n*k),   k = 0 .. m_out-1,

so ``a=1, w=exp(-2j*pi/N), m_out=N`` is the forward DFT. It is evaluated with
Bluestein's identity ``n*k = (n**2 + k**2 - (k-n)**2) / 2``, which turns the sum
into a linear convolution computed with three power-of-two FFTs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class CztParams:
    """Spiral contour of a chirp-Z transform: start ``a``, ratio ``w``, ``m_out`` points."""

    a: complex
    w: complex
    m_out: int

    def __post_init__(self):
        if int(self.m_out) < 1:
            raise InvalidArgumentError(f"m_out must be >= 1, got {self.m_out}")
        if abs(self.a) == 0 or abs(self.w) == 0:
            raise InvalidArgumentError("czt contour needs |a| > 0 and |w| > 0")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "w", complex(self.w))
        object.__setattr__(self, "m_out", int(self.m_out))


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def fft_1d(x, inverse: bool = False, axis: int = -1) -> np.ndarray:
    """Forward (``exp(-j2πnk/N)``) or inverse (conjugate kernel, 1/N) DFT along ``axis``."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 0 or x.shape[axis] == 0:
        raise InvalidArgumentError("fft_1d needs a non-empty input")
    if inverse:
        return scipy.fft.ifft(x, axis=axis)
    return scipy.fft.fft(x, axis=axis)


def _chirp(w: complex, idx: np.ndarray) -> np.ndarray:
    # w**(idx**2 / 2) on one fixed branch of log(w); Bluestein only needs consistency.
    log_w = np.log(complex(w))
    sq = idx.astype(np.float64) ** 2 / 2.0
    if log_w.real == 0.0:
        # unit-modulus ratio: reduce the phase modulo 2π before exponentiating
        phase = np.mod(log_w.imag * sq, 2 * np.pi)
        return np.exp(1j * phase)
    return np.exp(log_w * sq)


def czt(x, params: CztParams, axis: int = -1) -> np.ndarray:
    """Chirp-Z transform of ``x`` along ``axis`` via Bluestein convolution.

    The convolution length is the next power of two >= ``len(x) + m_out - 1``.
    """
    if not isinstance(params, CztParams):
        params = CztParams(*params)
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim == 0 or x.shape[axis] == 0:
        raise InvalidArgumentError("czt needs a non-empty input")
    x = np.moveaxis(x, axis, -1)
    n_in = x.shape[-1]
    m_out = params.m_out
    length = next_pow2(n_in + m_out - 1)

    n = np.arange(n_in)
    k = np.arange(m_out)
    a_pow = np.exp(-np.log(params.a) * n)
    u = np.zeros(x.shape[:-1] + (length,), dtype=np.complex128)
    u[..., :n_in] = x * (a_pow * _chirp(params.w, n))

    # inverse chirp on lags -(n_in-1) .. m_out-1, wrapped for circular convolution
    v = np.zeros(length, dtype=np.complex128)
    v[:m_out] = 1.0 / _chirp(params.w, k)
    if n_in > 1:
        lag = np.arange(1, n_in)
        v[length - lag] = 1.0 / _chirp(params.w, lag)

    conv = scipy.fft.ifft(scipy.fft.fft(u, axis=-1) * scipy.fft.fft(v), axis=-1)
    out = conv[..., :m_out] * _chirp(params.w, k)
    return np.moveaxis(out, -1, axis)


def flops_fft(n: int) -> int:
    """FLOP model of one length-``n`` FFT: 5 n log2(n), rounded."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    return int(round(5 * n * math.log2(n)))


def flops_czt(n: int) -> int:
    """FLOP model of one ``n``-in/``n``-out chirp-Z transform: 75 (2n log2(2n)), rounded."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    return int(round(75 * (2 * n * math.log2(2 * n))))
