import json
from math import factorial, lgamma, log

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toeplitz_wkb.errors import InsufficientDataError, NonInvertibleGermError
from toeplitz_wkb.series_core import PowerSeries, n_terms
from toeplitz_wkb.symbol_calculus import (
    AnalyticSymbol,
    SymbolClassParams,
    cauchy_product,
    cj_norms,
    critical_c,
    fit_class_params,
    summate,
    symbol_inverse,
    truncation_index,
)


def const_symbol(vals, nvars=1, D=4):
    return AnalyticSymbol.constant(vals, nvars, D)


def random_symbol(rng, K, nvars=2, D=2, R=1.0):
    terms = []
    for k in range(K + 1):
        c = rng.uniform(-1, 1, n_terms(nvars, D)) * (R**k) * factorial(k)
        terms.append(PowerSeries(c, nvars, D))
    terms[0].coeffs[0] = 1.0 + abs(terms[0].coeffs[0])
    return AnalyticSymbol(terms)


def max_coeff_diff(s, t):
    return float(np.max(np.abs(s.coeffs - t.coeffs)))


# -- Cauchy product -------------------------------------------------------------


def test_unit_symbol_is_identity():
    rng = np.random.default_rng(0)
    b = random_symbol(rng, 4)
    unit = AnalyticSymbol.constant([1, 0, 0, 0, 0], 2, 2)
    prod = cauchy_product(unit, b)
    for p, q in zip(prod.terms, b.terms):
        assert max_coeff_diff(p, q) == 0


def test_constant_ones_count():
    prod = cauchy_product(const_symbol([1] * 6), const_symbol([1] * 6))
    assert [p.coeffs[0].real for p in prod.terms] == [1, 2, 3, 4, 5, 6]


def test_cauchy_product_brute_force():
    rng = np.random.default_rng(1)
    a, b = random_symbol(rng, 4), random_symbol(rng, 4)
    prod = cauchy_product(a, b)
    for k in range(5):
        want = PowerSeries.zeros(2, 2)
        for i in range(k + 1):
            want = want + a.terms[i] * b.terms[k - i]
        assert max_coeff_diff(prod.terms[k], want) < 1e-13


def test_cauchy_product_order_is_min():
    prod = cauchy_product(const_symbol([1] * 3), const_symbol([1] * 6))
    assert prod.order == 2


def test_cauchy_product_shape_mismatch():
    with pytest.raises(ValueError):
        cauchy_product(const_symbol([1, 1], nvars=1), const_symbol([1, 1], nvars=2))


def test_terms_must_share_variables():
    with pytest.raises(ValueError):
        AnalyticSymbol([PowerSeries.constant(1, 1, 2), PowerSeries.constant(1, 2, 2)])


# -- inverse -----------------------------------------------------------------------


def test_inverse_constant_geometric():
    c = 0.3
    inv = symbol_inverse(const_symbol([1, c, 0, 0, 0, 0]))
    got = [t.coeffs[0].real for t in inv.terms]
    assert np.allclose(got, [(-c) ** k for k in range(6)], rtol=0, atol=1e-15)


def test_inverse_unit():
    inv = symbol_inverse(const_symbol([1, 0, 0]))
    assert [t.coeffs[0] for t in inv.terms] == [1, 0, 0]


def test_inverse_round_trip_hand_example():
    x = PowerSeries.variable(0, 1, 4)
    a = AnalyticSymbol([1 + x, x * x, PowerSeries.zeros(1, 4), PowerSeries.zeros(1, 4)])
    prod = cauchy_product(a, symbol_inverse(a))
    assert abs(prod.terms[0].coeffs[0] - 1) < 1e-14
    assert np.max(np.abs(prod.terms[0].coeffs[1:])) < 1e-10
    for t in prod.terms[1:]:
        assert t.max_abs() < 1e-10


@settings(max_examples=25)
@given(st.integers(0, 10_000))
def test_inverse_round_trip_random(seed):
    rng = np.random.default_rng(seed)
    a = random_symbol(rng, 5, D=4)
    prod = cauchy_product(a, symbol_inverse(a, check_radius=0))
    unit = PowerSeries.constant(1.0, 2, 4)
    scale = max(1.0, max(t.max_abs() for t in a.terms)) ** 2
    assert max_coeff_diff(prod.terms[0], unit) < 1e-10 * scale
    for t in prod.terms[1:]:
        assert t.max_abs() < 1e-10 * scale


def test_inverse_rejects_vanishing_leading_term():
    x = PowerSeries.variable(0, 1, 4)
    with pytest.raises(NonInvertibleGermError):
        symbol_inverse(AnalyticSymbol([x, x]))
    # nonzero at 0 but vanishing on the sample circle |x| = 1/2
    with pytest.raises(NonInvertibleGermError):
        symbol_inverse(AnalyticSymbol([1 - 2 * x]), check_radius=0.5, samples=4)


# -- summation ---------------------------------------------------------------------


def test_summate_examples():
    u = PowerSeries.from_terms({(1,): 2.0, (2,): -1.0}, 1, 4)
    z = PowerSeries.zeros(1, 4)
    for N in (1, 5, 50):
        assert max_coeff_diff(summate(AnalyticSymbol([u, z, z]), N), u) == 0
    s = summate(const_symbol([1] * 8), 10, c=0.3)
    assert abs(s.coeffs[0] - 1.111) < 1e-15


def test_summate_rejects_nonpositive_rate():
    with pytest.raises(ValueError):
        summate(const_symbol([1, 1]), 10, c=0)
    with pytest.raises(ValueError):
        summate(const_symbol([1, 1]), 10, c=-1.0)


def test_truncation_index():
    assert truncation_index(10, 12, 0.3) == 3
    assert truncation_index(100, 12, 0.3) == 12
    assert truncation_index(10, 12, None) == 12
    assert abs(critical_c(1.0) - np.e / 3) < 1e-15


def test_summate_uses_critical_rate_from_params():
    a = const_symbol([1] * 8)
    a.params = SymbolClassParams(C=1, r=1, R=np.e / 3 / 0.3, m=4)
    assert abs(summate(a, 10).coeffs[0] - 1.111) < 1e-15


def _decay_slope(Ns, vals):
    vals = np.asarray(vals)
    keep = vals > 0
    slope, _ = np.polyfit(np.asarray(Ns)[keep], np.log(vals[keep]), 1)
    return slope


def test_summation_tail_change_decays():
    rng = np.random.default_rng(3)
    R = 10.0
    a = random_symbol(rng, 24, R=R)
    cR = critical_c(R)
    z = np.array([0.2 + 0.1j, -0.1 + 0.05j])
    Ns = list(range(20, 201, 10))
    diffs = [abs(summate(a, N, cR).evaluate(z) - summate(a, N, cR / 2).evaluate(z)) for N in Ns]
    assert _decay_slope(Ns, diffs) < 0


def test_algebra_identity_at_finite_truncation():
    R = 10.0
    cR = critical_c(R)
    Ns = list(range(20, 201, 10))
    pts = [np.array([0.1, -0.2j]), np.array([0.3, 0.05 + 0.1j])]
    for seed in range(3):
        rng = np.random.default_rng(100 + seed)
        a, b = random_symbol(rng, 40, R=R), random_symbol(rng, 40, R=R)
        ab = cauchy_product(a, b)
        mism = []
        for N in Ns:
            lhs, fa, fb = summate(ab, N, cR), summate(a, N, cR), summate(b, N, cR)
            mism.append(max(abs(lhs.evaluate(p) - fa.evaluate(p) * fb.evaluate(p)) for p in pts))
        assert _decay_slope(Ns, mism) < 0


# -- norms and fits ----------------------------------------------------------------


def test_cj_norms_weighting():
    s = PowerSeries.from_terms({(0, 0): -2.0, (2, 0): 1.0, (1, 1): 3.0, (0, 3): 0.5}, 2, 4)
    assert np.allclose(cj_norms(s, 3), [2.0, 0.0, 2.0 + 3.0, 3.0])


def test_fit_factorial_growth():
    # pure k! data: the plain Stirling fit (m = 0) gives R = 1
    p = fit_class_params(None, m=0.0, data=[(0, k, 3.0 * factorial(k)) for k in range(13)])
    assert abs(p.R - 1) < 0.05
    assert not p.r_identified and p.R_identified
    q = fit_class_params(None, m=0.0, data=[(0, k, 2.0**k * factorial(k)) for k in range(13)])
    assert 1.8 <= q.R <= 2.2


def test_fit_recovers_envelope_parameters():
    C, r, R, m = 0.7, 1.5, 2.0, 4.0
    data = []
    for j in range(8):
        for k in range(8):
            env = lgamma(j + k + 1) - m * log(j + k + 1)
            data.append((j, k, C * r**j * R**k * np.exp(env)))
    p = fit_class_params(None, m=m, data=data)
    assert abs(p.r - r) < 1e-8 and abs(p.R - R) < 1e-8 and abs(p.C - C) < 1e-8
    assert p.covers and p.geometric


def test_fit_flags_degenerate_order_direction():
    x = PowerSeries.variable(0, 1, 6)
    z = PowerSeries.zeros(1, 6)
    a = AnalyticSymbol([(1 - 0.5 * x).reciprocal(), z, z])
    p = fit_class_params(a)
    assert not p.R_identified and p.R == 1.0


def test_fit_insufficient_data():
    with pytest.raises(InsufficientDataError):
        fit_class_params(None, data=[(0, 0, 1.0)])


def test_fit_flags_superfactorial_growth():
    data = [(0, k, float(factorial(2 * k))) for k in range(12)]
    p = fit_class_params(None, m=0.0, data=data)
    assert not p.geometric


@settings(max_examples=20)
@given(st.integers(0, 10_000))
def test_fitted_envelope_covers_all_points(seed):
    rng = np.random.default_rng(seed)
    a = random_symbol(rng, 4, D=5)
    p = fit_class_params(a)
    for k, t in enumerate(a.terms):
        for j, v in enumerate(cj_norms(t)):
            if v > 0:
                bound = p.C * p.r**j * p.R**k * factorial(j + k) / (j + k + 1) ** p.m
                assert v <= bound * (1 + 1e-9)


def test_symbol_json_round_trip():
    rng = np.random.default_rng(2)
    a = random_symbol(rng, 3)
    a.params = fit_class_params(a)
    obj = json.loads(json.dumps(a.to_json()))
    b = AnalyticSymbol.from_json(obj)
    assert all(max_coeff_diff(s, t) == 0 for s, t in zip(a.terms, b.terms))
    assert b.params.R == a.params.R
