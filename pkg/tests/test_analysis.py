from collections import namedtuple

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dampwave.analysis import Verdict, dyadic_sups, fit_decay, verdict_from_sups, write_scaled_csv
from dampwave.errors import WindowError
from dampwave.theory import predict_decay

Rec = namedtuple("Rec", "t q")
T0 = 10.0


def series(f, T=1000.0, count=2001):
    return [Rec(t, f(t)) for t in np.linspace(0.0, T, count)]


def test_exact_power_law():
    fit = fit_decay(series(lambda t: (T0 + t) ** -2), "q", T0, mu=2)
    assert fit.slope == pytest.approx(-2.0, abs=1e-9)
    assert fit.verdict is Verdict.HOLDS
    assert fit.window == (500.0, 1000.0)


def test_matched_log_form():
    fit = fit_decay(series(lambda t: (T0 + t) ** -1 * np.log(2 + t)), "q", T0, mu=1, log_power=1)
    assert fit.sup_scaled == pytest.approx(1.0)
    assert fit.verdict is Verdict.HOLDS


def test_constructed_violation():
    fit = fit_decay(series(lambda t: (T0 + t) ** -0.5), "q", T0, mu=1)
    assert fit.verdict is Verdict.VIOLATED


def test_prediction_object():
    fit = fit_decay(series(lambda t: (T0 + t) ** -1.0), "q", T0, prediction=predict_decay((3, 0.5, 2.0, 3.0)))
    assert fit.verdict is Verdict.HOLDS


def test_callable_quantity():
    recs = series(lambda t: (T0 + t) ** -1.0)
    fit = fit_decay(recs, lambda r: 2 * r.q, T0, mu=1)
    assert fit.slope == pytest.approx(-1.0, abs=1e-9)


def test_too_few_records_inconclusive():
    fit = fit_decay(series(lambda t: (T0 + t) ** -1.0, count=30), "q", T0, mu=1)
    assert fit.verdict is Verdict.INCONCLUSIVE and np.isnan(fit.slope)


def test_nonpositive_inconclusive():
    fit = fit_decay(series(lambda t: 0.0), "q", T0, mu=1)
    assert fit.verdict is Verdict.INCONCLUSIVE


def test_empty_window():
    with pytest.raises(WindowError):
        fit_decay([], "q", T0)
    with pytest.raises(WindowError):
        fit_decay(series(lambda t: 1.0), "q", T0, window=(2000.0, 3000.0))


def test_verdict_rule():
    assert verdict_from_sups([1.0]) is Verdict.INCONCLUSIVE
    assert verdict_from_sups([8.0, 4.0, 2.0, 1.0]) is Verdict.VIOLATED
    assert verdict_from_sups([1.0, 1.0, 1.0]) is Verdict.HOLDS
    assert verdict_from_sups([4.0, 1.0, 2.0]) is Verdict.INCONCLUSIVE


def test_dyadic_windows():
    t = np.linspace(0, 8, 9)
    assert dyadic_sups(t, t, 8.0) == [8.0, 4.0, 2.0]


exponents = st.floats(0.0, 3.0)
targets = st.floats(0.0, 3.0)
logs = st.integers(0, 2)


@settings(max_examples=60, deadline=None)
@given(exponents, targets, logs, st.floats(1e-6, 1e6))
def test_scale_equivariance(e, mu, ell, c):
    recs = series(lambda t: (T0 + t) ** -e * np.log(2 + t) ** ell)
    base = fit_decay(recs, "q", T0, mu=mu, log_power=ell)
    scaled = fit_decay(recs, lambda r: c * r.q, T0, mu=mu, log_power=ell)
    assert scaled.slope == pytest.approx(base.slope, abs=1e-8)
    assert scaled.intercept == pytest.approx(base.intercept + np.log(c), abs=1e-8)
    assert scaled.verdict is base.verdict


@settings(max_examples=60, deadline=None)
@given(exponents, targets, logs)
def test_subsampling_invariance(e, mu, ell):
    recs = series(lambda t: (T0 + t) ** -e * np.log(2 + t) ** ell)
    full = fit_decay(recs, "q", T0, mu=mu, log_power=ell)
    half = fit_decay(recs[::2], "q", T0, mu=mu, log_power=ell)
    assert half.verdict is full.verdict


def test_scaled_csv(tmp_path):
    path = tmp_path / "s.csv"
    write_scaled_csv(series(lambda t: (T0 + t) ** -1.0, count=5), "q", T0, 1.0, 0, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "t,q,scaled_q" and len(lines) == 6
    assert float(lines[3].split(",")[2]) == pytest.approx(1.0)
