import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dampwave.errors import CaseIRangeError, DomainError
from dampwave.model import ModelParams
from dampwave.theory import (
    Region,
    badterm_growth,
    badterm_quadrature,
    badterm_spatial_limit,
    case_i_limit,
    classify,
    region_label,
    mu_pair,
    p_fujita,
    p_subc,
    predict_decay,
)

HALF = F(1, 2)


def test_critical_exponents():
    assert p_subc(3, 0) == 1
    assert p_subc(3, HALF) == F(7, 5)
    assert p_subc(1, HALF) == 3
    assert p_subc(3, 0.5) == pytest.approx(1.4)
    assert p_fujita(2) == 2 and p_fujita(1) == 3
    assert p_fujita(2.5) == pytest.approx(1.8)
    with pytest.raises(DomainError):
        p_subc(1, 1)
    with pytest.raises(DomainError):
        p_fujita(0)


def test_reference_examples():
    pred = predict_decay((3, 0.5, 1.4, 6))
    assert pred.region is Region.II_BRANCH5
    assert (pred.mu, pred.log_power) == (pytest.approx(5.0), 1)
    pred = predict_decay((3, 0.5, 2, 3))
    assert pred.region is Region.II_BRANCH4
    assert (pred.mu, pred.log_power) == (pytest.approx(1.0), 0)
    assert predict_decay((3, HALF, F(7, 5), 6)).mu == 5


def test_lambda_zero_first_branch():
    pred = predict_decay((3, 0.5, 2.0, 0.0))
    assert (pred.mu, pred.log_power) == (0.0, 0)


def test_model_params_input():
    pred = predict_decay(ModelParams(3, 0.5, 1.0, 2.0, lam=3.0))
    assert pred.mu == pytest.approx(1.0)


@pytest.mark.parametrize(
    "p,lam,region,mu,ell",
    [
        (F(6, 5), 1, Region.II_BRANCH1, 1, 0),
        (F(6, 5), 10, Region.II_BRANCH2, 10, 1),
        (F(7, 5), 5, Region.II_BRANCH3, 5, 2),
        (F(8, 5), 8, Region.II_BRANCH4, F(25, 9), 0),
        (F(7, 5), 8, Region.II_BRANCH5, 5, 1),
        (F(6, 5), 12, Region.II_BRANCH6, 10, 0),
        (F(8, 5), F(25, 9), Region.II_BRANCH2, F(25, 9), 1),
    ],
)
def test_six_branches_exact(p, lam, region, mu, ell):
    pred = predict_decay((3, HALF, p, lam))
    assert (pred.region, pred.mu, pred.log_power) == (region, mu, ell)


def test_float_ties_use_tolerance():
    m1, _ = mu_pair(3, 0.5, 1.6)
    assert predict_decay((3, 0.5, 1.6, m1 * (1 + 1e-14))).log_power == 1


def test_companion_l2_rate():
    pred = predict_decay((3, HALF, F(6, 5), 1))
    assert pred.l2_mu == 1 - F(1, 3)


def test_case_i():
    pred = predict_decay((3, 0.5, 2.0, 1.0), "I")
    assert (pred.region, pred.mu, pred.log_power) == (Region.CASE_I, 1.0, 0)
    with pytest.raises(CaseIRangeError):
        predict_decay((3, HALF, 2, case_i_limit(3, HALF)), "I")


def test_saturated_zone():
    # above p_F(n - alpha) = 9/5 the capped case-I rate beats mu1 for large lambda
    pred = classify((3, HALF, F(11, 5), 4))
    assert pred.region is Region.SATURATED
    assert pred.mu == F(5, 3) and pred.delta_loss
    # p = 3 makes mu1 = -1/3; the case-II exponent is clamped at 0
    assert predict_decay((3, HALF, 3, 4)).raw_mu == F(-1, 3)
    assert predict_decay((3, HALF, 3, 4)).mu == 0
    assert classify((3, HALF, 3, 4)).region is Region.SATURATED
    assert classify((3, HALF, F(11, 5), 1)).region is Region.CASE_I


def test_phase_diagram_points():
    # one interior point per labelled region of the (3, 1/2) phase diagram
    points = {
        (F(6, 5), 1): "(1+t)^-lambda",
        (F(6, 5), 12): "(1+t)^-mu2",
        (F(8, 5), 4): "(1+t)^-mu1",
        (F(7, 5), 8): "(1+t)^-mu2 log",
        (F(7, 5), 5): "(1+t)^-lambda log^2",
        (F(11, 5), 4): "(1+t)^-((n-alpha)/(2-alpha))+delta",
    }
    for (p, lam), label in points.items():
        assert region_label((3, HALF, p, lam)) == label


ps = st.fractions(F(101, 100), F(4), max_denominator=100)
lams = st.fractions(F(0), F(15), max_denominator=100)


@settings(max_examples=200, deadline=None)
@given(ps, lams)
def test_partition_total(p, lam):
    pred = predict_decay((3, HALF, p, lam))
    m1, m2 = mu_pair(3, HALF, p)
    assert pred.mu >= 0 and pred.log_power in (0, 1, 2)
    if pred.log_power == 2:
        assert p == p_subc(3, HALF) and lam == m1 == m2
    # exactly one branch: the exponent never exceeds lambda or the caps
    assert pred.mu <= max(lam, 0)
    assert pred.raw_mu <= min(max(m1, m2), lam) or p == p_subc(3, HALF)


@settings(max_examples=100, deadline=None)
@given(ps)
def test_continuity_across_critical_line(p):
    m = min(mu_pair(3, HALF, p))
    if m <= 0:
        return
    eps = F(1, 10**9)
    at = predict_decay((3, HALF, p, m)).mu
    below = predict_decay((3, HALF, p, m - eps)).mu
    above = predict_decay((3, HALF, p, m + eps)).mu
    assert at == m and abs(below - at) <= eps and abs(above - at) <= eps


@settings(max_examples=100, deadline=None)
@given(st.fractions(F(101, 100), F(7, 5) - F(1, 100), max_denominator=100), st.fractions(F(101, 100), F(7, 5) - F(1, 100), max_denominator=100))
def test_mu_non_increasing_in_p_for_large_lambda(p, q):
    lo, hi = sorted((p, q))
    lam = 1000
    assert predict_decay((3, HALF, lo, lam)).mu >= predict_decay((3, HALF, hi, lam)).mu


@settings(max_examples=100, deadline=None)
@given(ps, lams)
def test_case_i_ii_agree_below_min_mu(p, lam):
    m = min(mu_pair(3, HALF, p))
    if lam < case_i_limit(3, HALF) and lam < m:
        one, two = predict_decay((3, HALF, p, lam), "I"), predict_decay((3, HALF, p, lam), "II")
        assert (one.mu, one.log_power) == (two.mu, two.log_power)


def test_badterm_growth_table():
    assert badterm_growth((1, 0.5, 2.0, 5.0)) == (pytest.approx(3.0), 0)
    assert badterm_growth((3, HALF, F(6, 5), 1)) == (0, 0)
    assert badterm_growth((3, HALF, F(6, 5), 10)) == (0, 1)
    assert badterm_growth((3, HALF, F(7, 5), 5)) == (0, 2)
    assert badterm_growth((3, HALF, F(8, 5), 8)) == (8 - F(25, 9), 0)
    assert badterm_growth((3, HALF, F(7, 5), 8)) == (3, 1)


def test_badterm_spatial_divergence():
    p = ModelParams(1, 0.5, 1.0, 2.0, lam=5.0)
    assert badterm_spatial_limit(p) == pytest.approx(10 / 3)
    assert math.isinf(badterm_quadrature(p, 1.0, 10.0))
    assert badterm_growth(p) == (pytest.approx(3.0), 0)


def test_badterm_bounded_first_row():
    p = ModelParams(3, 0.5, 1.0, 2.0, lam=0.0)
    vals = [badterm_quadrature(p, 1.0, t) for t in (1e2, 1e3, 1e4)]
    assert vals[2] / vals[1] < 1.05 and np.all(np.diff(vals) > 0)


@pytest.mark.parametrize("params,expected", [((3, 0.5, 2.0, 1.5), 0.5), ((1, 0.5, 2.0, 3.0), 1.0)])
def test_badterm_quadrature_slope(params, expected):
    n, alpha, p, lam = params
    mp = ModelParams(n, alpha, 1.0, p, lam=lam)
    assert badterm_growth(mp)[0] == pytest.approx(expected)
    ts = np.array([1e2, 1e3, 1e4])
    vals = np.array([badterm_quadrature(mp, 1.0, t) for t in ts])
    slope = np.polyfit(np.log(1.0 + ts), np.log(vals), 1)[0]
    assert abs(slope - expected) < 0.1
