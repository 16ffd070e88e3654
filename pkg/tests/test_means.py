import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from grusslab import means
from grusslab.errors import NonPositiveInput
from grusslab.means import MeanKind, MeanParams, scalar_mean

mp.mp.dps = 40

pos = st.floats(1e-3, 1e3)
unit = st.floats(0.0, 1.0)


def mp_power_mean(a, b, t, v):
    a, b, t, v = (mp.mpf(z) for z in (a, b, t, v))
    if t == 0:
        return a ** (1 - v) * b**v
    return a * ((1 - v) + v * (b / a) ** t) ** (1 / t)


def test_examples():
    assert scalar_mean(MeanKind.GEOM, 1, 4, MeanParams(v=0.5)) == pytest.approx(2.0)
    assert scalar_mean(MeanKind.HERON, 1, 4, MeanParams(t=1, v=0.5)) == pytest.approx(2.5)
    for t in (-1, -0.3, 0, 0.7, 1):
        assert scalar_mean(MeanKind.POWER, 2, 2, MeanParams(t=t, v=0.4)) == pytest.approx(2.0)
    p = dict(a=1, b=4, v=0.3)
    assert means.power_mean(t=-1, **p) == pytest.approx(1 / (0.7 + 0.3 / 4), rel=1e-14)
    assert means.power_mean(t=-1, **p) == pytest.approx(means.harm(1, 4, 0.3), rel=1e-14)
    assert means.power_mean(t=1, **p) == pytest.approx(1.9, rel=1e-14)


def test_log_mean_examples():
    assert means.log_mean(3.0, 3.0) == 3.0
    assert means.log_mean(1, math.e) == pytest.approx(math.e - 1, rel=1e-14)
    assert means.log_mean(1, 4) == pytest.approx(3 / math.log(4), rel=1e-14)


def test_log_mean_near_diagonal_against_mpmath():
    for eps in (1e-3, 1e-7, 1e-10, 1e-14):
        a, b = 2.0, 2.0 * (1 + eps)
        ref = (mp.mpf(b) - a) / (mp.log(b) - mp.log(a))
        assert means.log_mean(a, b) == pytest.approx(float(ref), rel=1e-14)


def test_deformed_log_examples():
    assert means.deformed_log(1.0, 5.0) == pytest.approx(4.0)
    assert means.deformed_log(0.3, 1.0) == 0.0
    assert means.deformed_log(1e-8, math.e) == pytest.approx(1.0, abs=1e-7)
    assert means.deformed_log(0.0, 7.0) == pytest.approx(math.log(7.0), rel=1e-15)


@pytest.mark.parametrize("s", [1e-9, 1e-7, 5e-7, 2e-6, 0.01, 0.5])
def test_deformed_log_against_mpmath(s):
    for x in (1e-3, 0.5, 3.0, 1e3):
        ref = (mp.mpf(x) ** s - 1) / s
        assert means.deformed_log(s, x) == pytest.approx(float(ref), rel=1e-12)


def test_gamma_factor():
    assert means.gamma_factor(5, 5) == 0.0
    assert means.gamma_factor(1, math.e) == pytest.approx(0.1)
    assert means.gamma_factor(2, 8) == means.gamma_factor(8, 2)
    assert 0 <= means.gamma_factor(1e-9, 1e9) < 0.5


def test_power_mean_stable_for_extreme_ratio():
    for t in (-1.0, -0.5, 0.5, 1.0):
        got = means.power_mean(1.0, 1e6, t, 0.3)
        assert got == pytest.approx(float(mp_power_mean(1.0, 1e6, t, 0.3)), rel=1e-12)


@pytest.mark.parametrize("t", [-1e-5, -1e-6, -5e-7, 0.0, 5e-7, 1e-6, 1e-5])
def test_power_mean_near_zero_against_mpmath(t):
    got = means.power_mean(0.7, 13.0, t, 0.35)
    assert got == pytest.approx(float(mp_power_mean(0.7, 13.0, t, 0.35)), rel=1e-11)


def test_power_mean_limit_to_geometric():
    a, b, v = 1.5, 40.0, 0.6
    g = means.geom(a, b, v)
    for t in (1e-6, -1e-6):
        assert abs(means.power_mean(a, b, t, v) - g) <= 1e-5 * (a + b)


def test_nonpositive_inputs():
    with pytest.raises(NonPositiveInput):
        means.geom(0.0, 1.0)
    with pytest.raises(NonPositiveInput):
        means.log_mean(-1.0, 1.0)
    with pytest.raises(NonPositiveInput):
        means.deformed_log(0.5, 0.0)
    with pytest.raises(NonPositiveInput):
        means.gamma_factor(1.0, -2.0)


def test_params_validation():
    with pytest.raises(ValueError):
        MeanParams(t=1.5)
    with pytest.raises(ValueError):
        MeanParams(v=-0.1)
    with pytest.raises(ValueError):
        scalar_mean(MeanKind.HERON, 1, 2, MeanParams(t=-0.5))
    with pytest.raises(ValueError):
        means.deformed_log(1.5, 2.0)


@given(pos, pos, unit)
def test_mean_ordering(a, b, v):
    h, g, ar = means.harm(a, b, v), means.geom(a, b, v), means.arith(a, b, v)
    slack = 1e-12 * max(a, b)
    assert h <= g + slack and g <= ar + slack
    L = means.log_mean(a, b)
    assert math.sqrt(a * b) <= L + slack <= 0.5 * (a + b) + 2 * slack


@given(pos, pos, st.floats(-1, 1), unit)
def test_means_between_min_and_max(a, b, t, v):
    slack = 1e-12 * max(a, b)
    for kind in MeanKind:
        if kind in (MeanKind.HERON, MeanKind.HEINZ) and t < 0:
            continue
        m = scalar_mean(kind, a, b, MeanParams(t=t, v=v))
        assert min(a, b) - slack <= m <= max(a, b) + slack


@given(pos, st.floats(-1, 1), unit)
def test_fixed_point(a, t, v):
    for kind in MeanKind:
        if kind in (MeanKind.HERON, MeanKind.HEINZ) and t < 0:
            continue
        assert scalar_mean(kind, a, a, MeanParams(t=t, v=v)) == pytest.approx(a, rel=1e-13)


@given(pos, pos, unit)
def test_heron_monotone_heinz_symmetric(a, b, v):
    ts = np.linspace(0, 1, 21)
    vals = means.heron(a, b, ts, v)
    assert np.all(np.diff(vals) >= -1e-12 * max(a, b))
    assert np.allclose(means.heinz(a, b, ts), means.heinz(a, b, 1 - ts), rtol=1e-13)


@given(pos, pos, unit)
def test_power_mean_monotone_in_t(a, b, v):
    ts = np.linspace(-1, 1, 41)
    vals = means.power_mean(a, b, ts, v)
    assert np.all(np.diff(vals) >= -1e-12 * max(a, b))


def test_broadcasting():
    a = np.array([1.0, 2.0, 3.0])
    out = means.power_mean(a, 4.0, np.array([[-1.0], [0.0], [1.0]]), 0.5)
    assert out.shape == (3, 3)
    assert np.allclose(out[1], np.sqrt(a * 4.0))
