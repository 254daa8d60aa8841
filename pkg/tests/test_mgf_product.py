import math
import zlib

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mp_mgf, richardson_derivative
from secduality.errors import SeriesMismatchError, ValidationError
from secduality.fading import FadingModel, ScaledModel, mgf, sample
from secduality.mgf_product import (TiltedMomentSeries, constant_series, factor_series,
                                    log_binomial_table, product_series, sum_series)


@st.composite
def models(draw):
    g = draw(st.floats(0.05, 30.0))
    kind = draw(st.sampled_from(["rayleigh", "nakagami", "rice"]))
    if kind == "rayleigh":
        base = FadingModel.rayleigh(g)
    elif kind == "nakagami":
        base = FadingModel.nakagami(draw(st.floats(0.5, 8.0)), g)
    else:
        base = FadingModel.rice(draw(st.floats(0.0, 12.0)), g)
    if draw(st.booleans()):
        return ScaledModel(base, draw(st.floats(1.0, 5.0)))
    return base


def stable_seed(model):
    return zlib.crc32(repr(model).encode())


def mc_tilted_moments(model, p, n, size=2_000_000, seed=0):
    x = sample(model, np.random.default_rng(seed), size)
    w = np.exp(-p * x)
    out = []
    for j in range(n + 1):
        v = x ** j * w
        out.append((v.mean(), v.std(ddof=1) / math.sqrt(size)))
    return out


def test_log_binomial_table_exact():
    table = log_binomial_table(128)
    for j in (0, 1, 7, 64, 128):
        for a in range(j + 1):
            assert math.exp(table[j, a] - math.log(math.comb(j, a))) == pytest.approx(1.0, abs=1e-14)
    assert table[3, 5] == -np.inf


@given(models(), st.floats(0.01, 20.0))
def test_zeroth_term_is_mgf(model, p):
    s = factor_series(model, p, 4)
    assert s.terms[0] == pytest.approx(mgf(model, -p), rel=1e-13)
    assert 0 < s.terms[0] <= 1


def test_rayleigh_first_tilted_moment():
    s = factor_series(FadingModel.rayleigh(1.0), 1.0, 3)
    assert s.terms[1] == pytest.approx(0.25, rel=1e-14)


@pytest.mark.parametrize("model, p", [
    (FadingModel.rayleigh(2.0), 0.5),
    (FadingModel.nakagami(3.0, 1.5), 1.2),
    (FadingModel.rice(4.0, 1.0), 0.8),
    (ScaledModel(FadingModel.rice(1.0, 0.7), 2.0), 0.6),
])
def test_factor_series_against_monte_carlo(model, p):
    series = factor_series(model, p, 10)
    assert np.all(series.terms >= 0)
    for j, (mean, se) in enumerate(mc_tilted_moments(model, p, 10, seed=stable_seed(model))):
        assert abs(series.terms[j] - mean) <= 4 * se, j


def test_single_factor_unchanged():
    f = factor_series(FadingModel.rice(2.0, 1.0), 0.7, 6)
    out = product_series([f], 6)
    assert np.array_equal(out.log_terms, f.log_terms)


@given(st.floats(0.05, 20.0), st.floats(0.01, 10.0))
def test_two_exponentials_make_erlang(g, p):
    ray = factor_series(FadingModel.rayleigh(g), p, 20)
    two = product_series([ray, ray], 20)
    erlang = factor_series(FadingModel.nakagami(2.0, 2 * g), p, 20)
    np.testing.assert_allclose(two.terms, erlang.terms, rtol=1e-12)


def _mp_product(models, p):
    total = mpmath.mpf(1)
    for mdl in models:
        base, c = (mdl.base, mdl.scale) if isinstance(mdl, ScaledModel) else (mdl, 1.0)
        total *= mp_mgf(base.family.value, base.mean_snr, -c * p, m=base.m, K=base.K)
    return total


def test_mixed_product_against_finite_differences():
    models = [FadingModel.rayleigh(1.0), FadingModel.nakagami(3.0, 2.0), FadingModel.rice(1.0, 0.5)]
    p = 0.8
    series = sum_series(models, p, 4)
    for j in range(5):
        # d^j/dp^j prod Phi_k(-p) = (-1)^j T_j
        fd = richardson_derivative(lambda q: math.prod(mgf(m, -q) for m in models), p, j,
                                   h=0.1, levels=5, ratio=1.4)
        assert (-1) ** j * fd == pytest.approx(series.terms[j], rel=1e-6)
        with mpmath.workdps(50):
            fd_mp = richardson_derivative(lambda q: _mp_product(models, q), mpmath.mpf(p), j,
                                          mpmath.mpf("0.1"), levels=6, ratio=1.5)
        assert (-1) ** j * float(fd_mp) == pytest.approx(series.terms[j], rel=1e-9)


@settings(max_examples=50)
@given(st.lists(models(), min_size=2, max_size=5), st.floats(0.01, 5.0), st.randoms(use_true_random=False))
def test_permutation_invariance_and_nonnegativity(ms, p, rnd):
    n = 12
    a = sum_series(ms, p, n)
    shuffled = list(ms)
    rnd.shuffle(shuffled)
    b = sum_series(shuffled, p, n)
    np.testing.assert_allclose(a.terms, b.terms, rtol=1e-12)
    assert np.all(np.isfinite(a.log_terms))
    assert np.all(a.terms >= 0)


def test_scaled_product_against_monte_carlo():
    c = 2.0
    models = [ScaledModel(FadingModel.rayleigh(1.5), c), ScaledModel(FadingModel.rice(3.0, 1.0), c)]
    p = 0.4
    series = sum_series(models, p, 8)
    rng = np.random.default_rng(99)
    size = 2_000_000
    x = c * (sample(FadingModel.rayleigh(1.5), rng, size) + sample(FadingModel.rice(3.0, 1.0), rng, size))
    w = np.exp(-p * x)
    for j in range(9):
        v = x ** j * w
        assert abs(series.terms[j] - v.mean()) <= 4 * v.std(ddof=1) / math.sqrt(size)


def test_constant_series():
    s = constant_series(1.0, 0.3, 5)
    np.testing.assert_allclose(s.terms, math.exp(-0.3))
    with pytest.raises(ValidationError):
        constant_series(0.0, 0.3, 5)


def test_mismatched_points_rejected():
    a = factor_series(FadingModel.rayleigh(1.0), 0.5, 4)
    b = factor_series(FadingModel.rayleigh(1.0), 0.6, 4)
    with pytest.raises(SeriesMismatchError):
        product_series([a, b], 4)


def test_short_factor_rejected():
    a = factor_series(FadingModel.rayleigh(1.0), 0.5, 4)
    b = factor_series(FadingModel.rayleigh(1.0), 0.5, 2)
    with pytest.raises(SeriesMismatchError):
        product_series([a, b], 4)
    with pytest.raises(ValidationError):
        product_series([], 0)


def test_nonpositive_point_rejected():
    with pytest.raises(ValidationError):
        factor_series(FadingModel.rayleigh(1.0), 0.0, 3)


def test_series_is_immutable():
    s = factor_series(FadingModel.rayleigh(1.0), 0.5, 3)
    with pytest.raises(ValueError):
        s.log_terms[0] = 0.0
    assert isinstance(s, TiltedMomentSeries) and len(s) == 4
