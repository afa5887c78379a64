import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jcas_track.errors import InvalidArgumentError
from jcas_track.transforms import CztParams, czt, fft_1d, flops_czt, flops_fft, next_pow2

from .oracles import czt_loop, dft_loop


def random_vector(seed, n):
    r = np.random.default_rng(seed)
    return r.standard_normal(n) + 1j * r.standard_normal(n)


def test_impulse_dft():
    np.testing.assert_allclose(fft_1d([1, 0, 0, 0]), [1, 1, 1, 1], atol=1e-15)


def test_round_trip():
    x = random_vector(0, 64)
    back = fft_1d(fft_1d(x), inverse=True)
    assert np.max(np.abs(back - x)) < 1e-12


def test_fft_matches_loop_oracle():
    x = random_vector(1, 64)
    assert np.max(np.abs(fft_1d(x) - dft_loop(x))) < 1e-9
    assert np.max(np.abs(fft_1d(x, inverse=True) - dft_loop(x, inverse=True))) < 1e-9


def test_fft_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        fft_1d([])


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 4096), seed=st.integers(0, 2**32 - 1))
def test_parseval(n, seed):
    x = random_vector(seed, n)
    energy = np.sum(np.abs(x) ** 2)
    assert math.isclose(energy, np.sum(np.abs(fft_1d(x)) ** 2) / n, rel_tol=1e-9)


def test_czt_impulse():
    out = czt([1, 0, 0, 0], CztParams(1.0, cmath.exp(-2j * math.pi / 4), 4))
    np.testing.assert_allclose(out, [1, 1, 1, 1], atol=1e-15)


def test_czt_of_zeros():
    out = czt(np.zeros(37), CztParams(cmath.exp(0.4j), 0.9 * cmath.exp(-0.2j), 11))
    assert np.all(out == 0)


def test_czt_zoom_matches_loop_oracle():
    x = random_vector(2, 64)
    a, w = cmath.exp(0.3j), cmath.exp(-0.01j)
    out = czt(x, CztParams(a, w, 100))
    assert np.max(np.abs(out - czt_loop(x, a, w, 100))) < 1e-9


def test_czt_off_unit_circle():
    x = random_vector(3, 40)
    a, w = 1.05 * cmath.exp(0.2j), 0.995 * cmath.exp(-0.05j)
    out = czt(x, CztParams(a, w, 30))
    ref = czt_loop(x, a, w, 30)
    assert np.max(np.abs(out - ref)) < 1e-9 * max(1.0, np.max(np.abs(ref)))


def test_czt_along_axis_matches_rows():
    x = random_vector(4, 5 * 24).reshape(5, 24)
    p = CztParams(cmath.exp(0.1j), cmath.exp(-0.03j), 17)
    by_axis = czt(x.T, p, axis=0).T
    for row, out in zip(x, by_axis):
        np.testing.assert_allclose(out, czt(row, p), atol=1e-12)


def test_czt_rejects_bad_params():
    with pytest.raises(InvalidArgumentError):
        CztParams(1.0, 1.0, 0)
    with pytest.raises(InvalidArgumentError):
        CztParams(0.0, 1.0, 3)
    with pytest.raises(InvalidArgumentError):
        czt([], CztParams(1.0, 1.0, 3))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 256), seed=st.integers(0, 2**32 - 1))
def test_czt_reduces_to_dft(n, seed):
    x = random_vector(seed, n)
    out = czt(x, CztParams(1.0, cmath.exp(-2j * math.pi / n), n))
    assert np.max(np.abs(out - fft_1d(x))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(1, 128),
    m=st.integers(1, 128),
    seed=st.integers(0, 2**32 - 1),
    alpha=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
    beta=st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
)
def test_czt_linearity(n, m, seed, alpha, beta):
    x, y = random_vector(seed, n), random_vector(seed + 1, n)
    p = CztParams(cmath.exp(0.7j), cmath.exp(-0.02j), m)
    lhs = czt(alpha * x + beta * y, p)
    rhs = alpha * czt(x, p) + beta * czt(y, p)
    assert np.max(np.abs(lhs - rhs)) < 1e-9


def test_bluestein_length_is_power_of_two():
    assert next_pow2(64 + 100 - 1) == 256
    assert next_pow2(1) == 1
    assert next_pow2(4096) == 4096


@pytest.mark.parametrize(
    "n, expected",
    [(1, 0), (2, 10), (1024, 51200), (530432, 50_435_618)],
)
def test_flops_fft(n, expected):
    assert flops_fft(n) == expected


@pytest.mark.parametrize("n, expected", [(1, 150), (4, 1800), (2048, 3_686_400)])
def test_flops_czt(n, expected):
    assert flops_czt(n) == expected


def test_flop_models_reject_zero():
    with pytest.raises(InvalidArgumentError):
        flops_fft(0)
    with pytest.raises(InvalidArgumentError):
        flops_czt(0)
