import json
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from hypentropy import convexity as cv
from hypentropy.heatkernel import g_function, kernel


def test_gap_examples():
    # the six-digit reference is good to ~2e-6; the exact value is 0.2916057
    assert cv.gap(3, 1.0, 1.0) == pytest.approx(0.291608, abs=5e-6)
    assert cv.gap3_closed(1.0, 1.0) == pytest.approx(0.29160567918, abs=1e-11)
    assert cv.gap(1, 1.0, 2.0) == pytest.approx((2 / math.tanh(2) - 1) / 2, rel=1e-14)
    assert cv.gap(1, 1.0, 2.0) == pytest.approx(0.5373, abs=5e-5)


def test_gap3_closed_against_printed_formula():
    t, r = 0.7, 1.9
    c, s = math.cosh(r), math.sinh(r)
    ref = (r * c / s - 1) / (2 * t) + 1 / s ** 2 + (c / s) ** 2 - 1 / r ** 2 - (c / s) / r
    assert cv.gap3_closed(t, r) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 9))
def test_gap_vanishes_at_origin(n):
    assert abs(cv.gap(n, 1.0, 1e-3)) < 1e-2


def test_gap_matches_mpmath_k3():
    mp.mp.dps = 40
    for t, r in ((0.2, 0.4), (2.0, 3.0)):
        d1, d2 = oracles.log_derivs(oracles.k3, t, r)
        ref = float(d2 - mp.coth(r) * d1)
        assert cv.gap(3, t, r) == pytest.approx(ref, rel=1e-10)
    mp.mp.dps = 30


@given(st.floats(0.1, 10), st.floats(0.1, 10))
def test_gap3_dispatch_matches_closed(t, rho):
    assert cv.gap(3, t, rho) == pytest.approx(cv.gap3_closed(t, rho), rel=1e-8)


@given(st.integers(1, 5), st.floats(0.05, 20), st.floats(0.5, 6))
def test_pre_log_form_agrees_away_from_origin(n, t, rho):
    k = kernel(n, t, rho)
    direct = cv.gap_from_derivatives(k.value, k.d1, k.d2, rho) if k.value > 1e-250 else k.gap
    assert k.gap == pytest.approx(direct, rel=1e-6, abs=1e-8 * (1 + abs(k.d2log)))


def test_gap_input_validation():
    with pytest.raises(ValueError):
        cv.gap(3, 1.0, 0.0)
    with pytest.raises(ValueError):
        cv.gap(3, -1.0, 1.0)


def test_series_lemmas():
    assert 1 / math.tanh(1) - 1 == pytest.approx(0.3130353, abs=5e-8)
    assert g_function(1.0) == pytest.approx(0.186570, abs=5e-6)
    c, s = math.cosh(1.0), math.sinh(1.0)
    assert g_function(1.0) == pytest.approx(1 + c * c - s * s - c * s, rel=1e-14)
    # the l = 1 coefficient vanishes, the rest are positive
    assert 8 + 4 - 12 == 0
    rep = cv.series_lemmas_check(np.linspace(0.01, 20, 2000))
    assert rep.ok and rep.g_min >= 0 and rep.rho_coth_min > 0 and rep.coefficient_min == 0


def test_g_series_branch_continuous():
    below, above = g_function(0.5 - 1e-12), g_function(0.5 + 1e-12)
    assert below == pytest.approx(above, rel=1e-9)
    mp.mp.dps = 50
    r = mp.mpf("0.2")
    ref = 1 + mp.cosh(r) ** 2 - mp.sinh(r) ** 2 / r ** 2 - mp.cosh(r) * mp.sinh(r) / r
    assert g_function(0.2) == pytest.approx(float(ref), rel=1e-12)
    mp.mp.dps = 30


def test_series_check_rejects_bad_grid():
    with pytest.raises(ValueError):
        cv.series_lemmas_check([0.0, 1.0])


@pytest.mark.parametrize("n,tol", [(1, 1e-7), (2, 1e-6), (3, 1e-7)])
def test_scan_sign(n, tol):
    rep = cv.scan(n, (0.01, 100.0), (0.01, 10.0), (40, 100))
    assert rep.min_gap >= -tol and not rep.violations and not rep.errors
    assert len(rep.samples) == 4000
    assert rep.min_gap == min(s.gap for s in rep.samples)


def test_scan_n3_strict_away_from_origin():
    rep = cv.scan(3, (0.01, 100.0), (0.0, 10.0), (40, 100))
    assert min(s.gap for s in rep.samples if s.rho >= 0.1) > 0


def test_scan_deterministic_and_threads_invariant():
    a = cv.scan(4, (0.1, 10.0), (0.0, 5.0), (5, 10))
    b = cv.scan(4, (0.1, 10.0), (0.0, 5.0), (5, 10), threads=3)
    assert a.dumps(True) == b.dumps(True)
    d = json.loads(a.dumps())
    assert set(d) >= {"n", "grid", "min_gap", "argmin", "violations"}
    assert a.to_csv().splitlines()[0] == "n,t,rho,gap,method"
    assert len(a.to_csv().splitlines()) == 51
