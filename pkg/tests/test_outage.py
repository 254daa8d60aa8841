import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secduality.errors import UnsupportedConfigurationError, ValidationError
from secduality.fading import FadingModel, ScaledModel, sample
from secduality.outage import InterferenceScenario, Probability, op_i, op_n, op_ni

R = FadingModel.rayleigh
N = FadingModel.nakagami


def quad_outage(m, mean_d, L, mean_i, gamma, noise=True):
    """E[P(m, m gamma (noise + X) / mean_d)] for X ~ Gamma(L, mean_i), by quadrature."""
    with mpmath.workdps(40):
        a = mpmath.mpf(m) * gamma / mean_d

        def integrand(x):
            dens = x ** (L - 1) * mpmath.exp(-x / mean_i) / (mpmath.gamma(L) * mpmath.mpf(mean_i) ** L)
            return dens * mpmath.gammainc(m, 0, a * ((1 if noise else 0) + x), regularized=True)

        return float(mpmath.quad(integrand, [0, mean_i, 10 * mean_i, mpmath.inf]))


def mc_probability(event_fn, n, seed):
    hits = event_fn(np.random.default_rng(seed), n)
    p = np.count_nonzero(hits) / n
    return p, math.sqrt(p * (1 - p) / n)


def test_op_n_limits_and_exponential():
    assert op_n(N(2, 1.0), 1e-12) < 1e-20
    assert op_n(N(1, 1.0), 1.0) == pytest.approx(1 - math.exp(-1), rel=1e-14)


def test_op_n_nakagami_against_monte_carlo():
    d = N(3, 10.0)
    p, se = mc_probability(lambda rng, n: sample(d, rng, n) < 2.0, 10_000_000, 1)
    assert abs(op_n(d, 2.0) - p) <= 4 * se


def test_op_ni_vanishing_interference():
    d = N(2, 5.0)
    assert op_ni(InterferenceScenario(d, [R(1e-9)]), 1.5) == pytest.approx(op_n(d, 1.5), abs=1e-6)


def test_op_ni_rayleigh_closed_form():
    value = op_ni(InterferenceScenario(R(10.0), [R(2.0)]), 1.0)
    assert value == pytest.approx(1 - math.exp(-0.1) / 1.2, rel=1e-13)
    assert value == pytest.approx(0.24597, abs=5e-6)


@given(st.floats(0.1, 1e4), st.floats(0.01, 100.0), st.floats(0.01, 10.0))
def test_op_ni_m1_reduction(mean_d, mean_i, gamma):
    # with m = 1 the double sum collapses to 1 - exp(-p) T_0
    with mpmath.workdps(40):
        exact = 1 - mpmath.exp(-gamma / mpmath.mpf(mean_d)) / (1 + gamma * mpmath.mpf(mean_i) / mean_d)
    assert op_ni(InterferenceScenario(R(mean_d), [R(mean_i)]), gamma) == pytest.approx(float(exact), rel=1e-11)


def test_op_ni_three_interferers_against_monte_carlo():
    sc = InterferenceScenario(N(2, 10.0), [R(2.0)] * 3)

    def event(rng, n):
        d = sample(sc.desired, rng, n)
        x = sum(sample(i, rng, n) for i in sc.interferers)
        return d < 1.0 * (x + 1.0)

    p, se = mc_probability(event, 10_000_000, 2)
    assert abs(op_ni(sc, 1.0) - p) <= 4 * se


def test_op_i_closed_forms():
    assert op_i(InterferenceScenario(R(3.0), [R(3.0)]), 1.0) == pytest.approx(0.5, rel=1e-14)
    assert op_i(InterferenceScenario(R(10.0), [R(5.0)]), 1.0) == pytest.approx(1 / 3, rel=1e-14)
    assert op_i(InterferenceScenario(N(2, 10.0), [R(5.0)]), 1.0) == pytest.approx(0.25, rel=1e-14)


@settings(max_examples=40)
@given(st.integers(1, 6), st.floats(-10.0, 60.0), st.integers(1, 4), st.floats(-10.0, 15.0),
       st.floats(0.1, 10.0), st.booleans())
def test_outage_against_quadrature(m, dbd, L, dbi, gamma, noise):
    mean_d, mean_i = 10 ** (dbd / 10), 10 ** (dbi / 10)
    sc = InterferenceScenario(N(m, mean_d), [R(mean_i)] * L)
    value = (op_ni if noise else op_i)(sc, gamma)
    ref = quad_outage(m, mean_d, L, mean_i, gamma, noise)
    assert value == pytest.approx(ref, rel=1e-9, abs=1e-300)


def test_deep_tail_keeps_relative_precision():
    sc = InterferenceScenario(N(4, 1e6), [R(3.0)] * 2)
    ref = quad_outage(4, 1e6, 2, 3.0, 1.0)
    assert ref < 1e-16
    assert op_ni(sc, 1.0) == pytest.approx(ref, rel=1e-9)


def test_underflow_is_flagged():
    sc = InterferenceScenario(N(5, 1e200), [R(1.0)])
    value = op_ni(sc, 1.0)
    assert value == 0.0 and value.underflow
    assert not op_ni(InterferenceScenario(N(5, 10.0), [R(1.0)]), 1.0).underflow


def test_deep_outage_large_p():
    sc = InterferenceScenario(N(3, 1e-3), [R(1.0)] * 2)
    value = op_ni(sc, 1.0)
    assert 0.999 < value <= 1.0
    assert op_i(sc, 1.0) <= value


def test_non_integer_shape_unsupported():
    with pytest.raises(UnsupportedConfigurationError, match="Monte Carlo"):
        op_ni(InterferenceScenario(N(1.5, 1.0), [R(1.0)]), 1.0)
    with pytest.raises(UnsupportedConfigurationError):
        op_i(InterferenceScenario(FadingModel.rice(2.0, 1.0), [R(1.0)]), 1.0)


def test_invalid_inputs():
    with pytest.raises(ValidationError):
        InterferenceScenario(R(1.0), [])
    with pytest.raises(ValidationError):
        op_ni(InterferenceScenario(R(1.0), [R(1.0)]), 0.0)
    with pytest.raises(ValidationError):
        op_n(R(1.0), -1.0)


@st.composite
def scenarios(draw):
    m = draw(st.integers(1, 5))
    mean_d = 10 ** (draw(st.floats(-5.0, 40.0)) / 10)
    branches = []
    for _ in range(draw(st.integers(1, 4))):
        g = 10 ** (draw(st.floats(-10.0, 15.0)) / 10)
        kind = draw(st.sampled_from(["r", "n", "k"]))
        b = R(g) if kind == "r" else N(draw(st.integers(1, 4)), g) if kind == "n" else \
            FadingModel.rice(draw(st.floats(0.0, 10.0)), g)
        if draw(st.booleans()):
            b = ScaledModel(b, draw(st.floats(1.0, 3.0)))
        branches.append(b)
    return InterferenceScenario(N(m, mean_d), branches)


@given(scenarios(), st.floats(0.01, 20.0))
def test_range_and_ordering(sc, gamma):
    a, b = op_i(sc, gamma), op_ni(sc, gamma)
    assert isinstance(a, Probability)
    assert -1e-12 <= a <= 1 + 1e-12 and -1e-12 <= b <= 1 + 1e-12
    assert a <= b * (1 + 1e-12) + 1e-300


@settings(max_examples=30)
@given(scenarios())
def test_monotonicity(sc):
    grid = np.geomspace(0.05, 20.0, 12)
    for f in (op_i, op_ni):
        vals = [f(sc, g) for g in grid]
        assert all(y >= x * (1 - 1e-10) for x, y in zip(vals, vals[1:]))
    nvals = [op_n(sc.desired, g) for g in grid]
    assert all(y >= x for x, y in zip(nvals, nvals[1:]))

    # stronger interferers -> more outage
    boosted = InterferenceScenario(sc.desired, [ScaledModel(b, 1.5) for b in sc.interferers])
    assert op_ni(boosted, 1.0) >= op_ni(sc, 1.0) * (1 - 1e-10)
    # stronger desired link -> less outage
    stronger = InterferenceScenario(sc.desired.with_mean(2 * sc.desired.mean_snr), sc.interferers)
    assert op_ni(stronger, 1.0) <= op_ni(sc, 1.0) * (1 + 1e-10)
    assert op_i(stronger, 1.0) <= op_i(sc, 1.0) * (1 + 1e-10)
