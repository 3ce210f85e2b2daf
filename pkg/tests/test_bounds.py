import math

import mpmath
import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from entca.bounds import (BoundResult, binom_bounds, d_bound_ec_general, d_bound_lll_classic,
                          d_bound_t2, d_bound_t3, entropy_h, existence_predicate, juxtaposition_d2,
                          l_factor, q_argmin, q_min, q_value, table1_bound, xi, xlogx)
from entca.core import CAParams
from entca.reference import EC_GENERAL, LLL_CLASSIC, OPTIMIZED

mpmath.mp.dps = 40


def mp_entropy(x):
    x = mpmath.mpf(x)
    return -(x * mpmath.log(x, 2) + (1 - x) * mpmath.log(1 - x, 2))


def mp_pow_self(z):
    return mpmath.mpf(1) if z == 0 else z**z


def mp_product_form(v, x):
    """Product form of f_{t,v} at x = (1, x_2, .., x_{t-1}), 40 digits."""
    v = mpmath.mpf(v)
    last = x[-1]
    val = mpmath.log(mp_pow_self(v - last) / (mp_pow_self(v - 1 - last) * mp_pow_self(last)), 2)
    for a, b in zip(x, x[1:]):
        den = mp_pow_self(v - 1 - a + b) * mp_pow_self(a - b) * mp_pow_self(1 - b)
        val += mpmath.log(mp_pow_self(v - a) / den, 2)
    return val


def test_entropy_endpoints_and_peak():
    assert entropy_h(0.5) == 1.0
    assert entropy_h(0.0) == entropy_h(1.0) == 0.0
    with pytest.raises(ValueError):
        entropy_h(1.5)


def test_entropy_matches_high_precision():
    for x in np.linspace(0.001, 0.999, 97):
        assert entropy_h(x) == pytest.approx(float(mp_entropy(x)), rel=1e-13)
    # 0.959419 by 40-digit evaluation (0.959467 is quoted elsewhere, a slip)
    assert entropy_h(0.381966) == pytest.approx(float(mp_entropy("0.381966")), abs=1e-12)
    assert entropy_h(0.381966) == pytest.approx(0.959419, abs=1e-6)


def test_xlogx_convention():
    assert xlogx(0.0) == 0.0
    with pytest.raises(ValueError):
        xlogx(-1.0)


def test_l_of_two():
    ref = mpmath.e ** (mpmath.mpf(15) / 16) / mpmath.sqrt(2 * mpmath.pi) / 2
    assert l_factor(2) == pytest.approx(float(ref), rel=1e-14)
    assert l_factor(2) == pytest.approx(0.50937, abs=1e-5)


def test_binom_bounds_small_example():
    est = binom_bounds(2, 2)
    assert est.lower < 6 < est.upper
    assert est.brackets(6)


def test_binom_bounds_sweep():
    for v in range(2, 11):
        for m in range(2, 51):
            assert binom_bounds(m, v).brackets(math.comb(m * v, m)), (m, v)


def test_binom_bounds_hypotheses():
    with pytest.raises(ValueError):
        binom_bounds(1, 3)


@pytest.mark.parametrize("t", range(2, 7))
@pytest.mark.parametrize("C1", [2.0, 10.0, 1e3])
def test_q_min_matches_numeric(t, C1):
    closed = q_min(C1, t)
    grid = np.linspace(1e-4, 1.0, 10**4)
    i = int(np.argmin(q_value(grid, C1, t)))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(lambda x: q_value(x, C1, t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    assert res.fun == pytest.approx(closed, rel=1e-9)
    assert closed <= res.fun * (1 + 1e-12)


def test_q_min_examples():
    assert q_min(4.0, 2) == pytest.approx(4.0, rel=1e-15)
    assert q_argmin(4.0, 2) == pytest.approx(0.5)
    assert q_min(1.0 + 1e-9, 2) == pytest.approx(2.0, rel=1e-8)
    with pytest.raises(ValueError):
        q_min(1.0, 2)


def test_q_min_stationary_point_inside():
    # x* = ((t-1) C1)^(-1/t) < 1 whenever C1 > 1, so the boundary branch is a guard only
    for t in range(2, 9):
        for C1 in (1.0 + 1e-12, 1.5, 1e6):
            assert q_argmin(C1, t) < 1
            assert q_min(C1, t) <= q_value(1.0, C1, t)


def test_existence_threshold():
    p = CAParams(2, 5, 2, 3)  # |I| = 20, threshold C1 = 400 / 4 = 100
    assert existence_predicate(p, 99)
    assert not existence_predicate(p, 100)
    assert existence_predicate(p, 99.999999)


def test_existence_small_c1():
    assert existence_predicate(CAParams(2, 3, 2, 1), 0.5)


def test_existence_flips_once():
    p = CAParams(3, 6, 3, 2)
    flags = [existence_predicate(p, c) for c in np.geomspace(1, 1e8, 400)]
    assert flags[0] and not flags[-1]
    assert sum(a != b for a, b in zip(flags, flags[1:])) == 1


@pytest.mark.parametrize("v", range(2, 11))
def test_table2_cells(v):
    assert d_bound_lll_classic(2, v).value == pytest.approx(LLL_CLASSIC[2, v], abs=0.01)
    assert d_bound_ec_general(2, v).value == pytest.approx(EC_GENERAL[2, v], abs=0.01)
    assert juxtaposition_d2(v) == math.comb(v, 2)


@pytest.mark.parametrize("v", range(2, 8))
def test_table3_cells(v):
    assert d_bound_lll_classic(6, v).value == pytest.approx(LLL_CLASSIC[6, v], abs=0.01)
    assert d_bound_ec_general(6, v).value == pytest.approx(EC_GENERAL[6, v], abs=0.01)


def test_closed_forms_against_high_precision():
    for t in range(2, 7):
        for v in range(2, 11):
            vt = mpmath.mpf(v) ** t
            lll = (t - 1) / mpmath.log(vt / (vt - 1), 2)
            vt1 = mpmath.mpf(v) ** (t - 1)
            ecg = v * (t - 1) / mpmath.log(vt1 / (vt1 - 1), 2)
            assert d_bound_lll_classic(t, v).value == pytest.approx(float(lll), rel=1e-12)
            assert d_bound_ec_general(t, v).value == pytest.approx(float(ecg), rel=1e-12)


def test_ec_general_t2_v2_is_two():
    assert d_bound_ec_general(2, 2).value == 2.0


@pytest.mark.parametrize("v", range(2, 11))
def test_t2_closed_form(v):
    assert d_bound_t2(v).value == pytest.approx(OPTIMIZED[2, v], abs=0.01)
    if v > 2:
        V = mpmath.mpf(v)
        ref = V / mpmath.log(V**V * (V - 2) ** (V - 2) / (V - 1) ** (2 * V - 2), 2)
        assert d_bound_t2(v).value == pytest.approx(float(ref), rel=1e-12)


@pytest.mark.parametrize("v", range(2, 11))
def test_t3_closed_form(v):
    assert d_bound_t3(v).value == pytest.approx(OPTIMIZED[3, v], abs=0.01)


def test_t3_v2_intermediate_values():
    res = d_bound_t3(2)
    assert res.metadata["xi"] == pytest.approx((3 - math.sqrt(5)) / 2, abs=1e-15)
    x = (3 - mpmath.sqrt(5)) / 2
    f = mp_product_form(2, [mpmath.mpf(1), x])
    assert res.metadata["f0"] == pytest.approx(float(f), abs=1e-12)
    assert res.value == pytest.approx(2 * 2 / (2 * 2 - float(f)), rel=1e-12)
    assert round(res.value, 2) == 7.56


def test_xi_below_one():
    assert all(0 < xi(v) < 1 for v in range(2, 101))


def test_d22_exact():
    res = d_bound_t2(2)
    assert res.value == 1.0 and res.metadata["exact"]


def test_asymptotic_ratio_at_v100():
    for t in range(2, 7):
        v = 100
        approx = (t - 1) * (v**t - v / 2) * math.log(2)
        assert d_bound_ec_general(t, v).value / approx == pytest.approx(1.0, rel=0.01)


@pytest.mark.parametrize("t", [2, 3, 4])
def test_bounds_increase_in_v(t):
    for fn in (d_bound_lll_classic, d_bound_ec_general):
        vals = [fn(t, v).value for v in range(2, 51)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
    if t == 2:
        vals = [d_bound_t2(v).value for v in range(2, 51)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
    if t == 3:
        vals = [d_bound_t3(v).value for v in range(2, 51)]
        assert all(a < b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("t", [2, 6])
def test_table_row_ordering(t):
    vs = range(2, 11) if t == 2 else range(2, 8)
    for v in vs:
        assert table1_bound(t, v).value <= d_bound_ec_general(t, v).value <= \
            d_bound_lll_classic(t, v).value


def test_bound_result_validation():
    with pytest.raises(ValueError):
        BoundResult(1.0, "made-up", 2, 2)
    with pytest.raises(ValueError):
        BoundResult(0.0, "EC-t2", 2, 2)
    with pytest.raises(ValueError):
        d_bound_lll_classic(1, 3)
