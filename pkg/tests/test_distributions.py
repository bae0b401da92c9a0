"""Catalog distributions: closed-form anchors, boundaries, spec strings.

Reference digits come from scripts/derive_constants.py (mpmath at 60
decimal digits), so the tolerances below are float roundoff, not
modeling slack.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlab import (
    SpecParseError,
    exponential,
    gamma,
    isf_values,
    logistic,
    lognormal,
    parse_dist_spec,
    quantile_values,
    render_dist_spec,
    std_normal,
    uniform01,
    weibull,
)

CATALOG = [
    exponential(1.0), exponential(0.5), uniform01(), weibull(0.7),
    weibull(2.0), gamma(3.0), std_normal(), logistic(), lognormal(),
]


def test_exponential_log_sf_is_linear():
    d = exponential(1.0)
    assert d.log_sf(50.0) == -50.0
    assert d.log_sf(0.0) == 0.0
    assert exponential(2.0).log_sf(3.0) == -6.0


def test_normal_tail_anchors():
    d = std_normal()
    assert d.log_sf(0.0) == pytest.approx(math.log(0.5), rel=1e-15)
    # high-precision erfc reference; note the value sits below -35
    assert d.log_sf(8.0) == pytest.approx(-35.01343715991455, rel=1e-13)
    assert d.log_cdf(-8.0) == pytest.approx(-35.01343715991455, rel=1e-13)


def test_support_boundaries():
    u = uniform01()
    assert u.cdf(-0.5) == 0.0 and u.cdf(1.5) == 1.0
    assert u.log_cdf(-0.5) == -math.inf and u.log_cdf(2.0) == 0.0
    assert u.sf(1.5) == 0.0 and u.log_sf(-1.0) == 0.0
    e = exponential(1.0)
    assert e.pdf(-1.0) == 0.0
    assert e.log_pdf(-1.0) == -math.inf


@pytest.mark.parametrize("dist", CATALOG, ids=render_dist_spec)
def test_quantile_cdf_round_trip(dist):
    for p in (1e-9, 1e-4, 0.1, 0.5, 0.9, 1 - 1e-6):
        x = dist.quantile(p)
        assert dist.cdf(x) == pytest.approx(p, rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("dist", CATALOG, ids=render_dist_spec)
def test_isf_deep_tail_round_trip(dist):
    # near a finite endpoint 1-q stops being representable around 2^-53,
    # so bounded supports only get the moderate part of the grid
    deep = (1e-3, 1e-8) if math.isfinite(dist.support[1]) else (1e-3, 1e-8, 1e-30, 1e-200)
    for q in deep:
        x = dist.isf(q)
        assert math.isfinite(x)
        assert dist.log_sf(x) == pytest.approx(math.log(q), rel=1e-8)


@given(p=st.floats(min_value=1e-6, max_value=1 - 1e-6))
@settings(max_examples=60, deadline=None)
def test_weibull_quantile_matches_closed_form(p):
    d = weibull(2.0)
    assert d.quantile(p) == pytest.approx(math.sqrt(-math.log1p(-p)), rel=1e-10)


@given(x=st.floats(min_value=1e-3, max_value=30.0))
@settings(max_examples=60, deadline=None)
def test_log_cdf_log_sf_are_consistent(x):
    d = gamma(3.0)
    # exp(log_cdf) + exp(log_sf) = 1 wherever both are representable
    assert math.exp(d.log_cdf(x)) + math.exp(d.log_sf(x)) == pytest.approx(1.0, abs=1e-12)


def test_gamma_deep_tail_against_series():
    # Gamma(3): sf(x) = e^-x (1 + x + x^2/2), exact for integer shape
    d = gamma(3.0)
    for x in (1.0, 10.0, 80.0, 500.0):
        ref = -x + math.log(1 + x + x * x / 2)
        assert d.log_sf(x) == pytest.approx(ref, rel=1e-12)


def test_vectorized_helpers_match_scalars():
    d = std_normal()
    ps = [1e-6, 0.2, 0.5, 0.9]
    for v, p in zip(quantile_values(d, ps), ps):
        assert v == pytest.approx(d.quantile(p), rel=1e-12)
    qs = [1e-9, 1e-3, 0.4]
    for v, q in zip(isf_values(d, qs), qs):
        assert v == pytest.approx(d.isf(q), rel=1e-12)
    g = gamma(2.5)
    for v, q in zip(isf_values(g, qs), qs):
        assert v == pytest.approx(g.isf(q), rel=1e-12)


@pytest.mark.parametrize("spec", [
    "exponential:1", "exponential:0.5", "uniform01", "weibull:2",
    "gamma:3", "std_normal", "logistic", "lognormal",
])
def test_spec_round_trip(spec):
    once = render_dist_spec(parse_dist_spec(spec))
    assert render_dist_spec(parse_dist_spec(once)) == once


@pytest.mark.parametrize("bad", [
    "nosuch", "weibull", "weibull:2,3", "exponential:abc",
    "exponential:-1", "weibull:0", "gamma:-2",
])
def test_bad_specs_raise_with_token(bad):
    with pytest.raises(SpecParseError):
        parse_dist_spec(bad)


def test_parse_error_names_the_token():
    with pytest.raises(SpecParseError, match="nosuch"):
        parse_dist_spec("nosuch:1")


def test_catalog_pdf_integrates_near_one():
    # crude trapezoid over the bulk; catches sign or scale slips
    for dist in (exponential(1.0), weibull(2.0), std_normal(), logistic()):
        lo = dist.quantile(1e-9)
        hi = dist.quantile(1 - 1e-9)
        k = 20001
        h = (hi - lo) / (k - 1)
        total = sum(dist.pdf(lo + i * h) for i in range(k))
        total -= (dist.pdf(lo) + dist.pdf(hi)) / 2.0
        assert total * h == pytest.approx(1.0, abs=5e-4)
