"""The five scaled families: exact tails, rates, samplers, spec strings.

Fractions and long decimals are frozen outputs of
scripts/derive_constants.py; nothing here trusts the package to check
itself.
"""

import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdlab import (
    ReplacementParams,
    SpecParseError,
    coupon_cdf_dp,
    coupon_cdf_inclusion_exclusion,
    coupon_tail_bounds,
    coupon_threshold_pair,
    exact_log_lower_tail,
    exact_log_upper_tail,
    exponential,
    lognormal,
    logistic,
    make_gumbel_maxima,
    make_minima,
    make_replacement,
    parse_family_spec,
    power_tail_rate,
    rate_grid_violations,
    render_family_spec,
    sample,
    shift_rate,
    std_normal,
    uniform01,
    weibull,
)
from mdlab.estimators import TrialStream

CANONICAL_SPECS = [
    "classical:sigma=1",
    "minima:exponential:1",
    "gumbel_maxima:weibull:2",
    "coupon",
    "replacement:exponential:1,exponential:2,t=1,beta=0.4",
]


# --- classical Gaussian sums -------------------------------------------------

def test_classical_exact_tail_anchor(fam_classical):
    # P(mean of 400 >= 0.25) = P(Z >= 5), mpmath reference
    assert exact_log_upper_tail(fam_classical, 400, 0.25) == pytest.approx(
        -15.064998393988726, rel=1e-12)


def test_classical_symmetry(fam_classical):
    for n, x in [(10, 0.3), (100, 0.15), (10**4, 0.02)]:
        up = exact_log_upper_tail(fam_classical, n, x)
        lo = exact_log_lower_tail(fam_classical, n, -x)
        assert up == pytest.approx(lo, rel=1e-14)


def test_classical_rate_is_quadratic(fam_classical):
    for x in (-2.0, -0.5, 0.7, 1.5):
        assert fam_classical.rate_ld(x) == pytest.approx(x * x / 2.0, rel=1e-14)
        assert fam_classical.rate_md(x) == pytest.approx(x * x / 2.0, rel=1e-14)
    assert fam_classical.central


def test_classical_sampler_is_quantile_transform(fam_classical):
    from scipy.special import ndtri

    stream = TrialStream(seed=5, trial=0)
    peek = TrialStream(seed=5, trial=0)
    u = peek.uniform()
    assert sample(fam_classical, 25, stream) == pytest.approx(
        float(ndtri(u)) / 5.0, rel=1e-12)


# --- minima ------------------------------------------------------------------

def test_minima_exact_tail_is_n_log_sf(fam_minima_exp):
    for n in (1, 7, 100, 10**5):
        for x in (0.01, 0.4, 2.0):
            assert exact_log_upper_tail(fam_minima_exp, n, x) == -n * x
    assert exact_log_upper_tail(fam_minima_exp, 100, 0.4) == -40.0


def test_minima_below_support(fam_minima_exp):
    assert exact_log_upper_tail(fam_minima_exp, 5, -0.1) == 0.0
    assert exact_log_lower_tail(fam_minima_exp, 5, -0.1) == -math.inf


def test_minima_uniform_tail(fam_minima_uniform):
    for n, x in [(10, 0.3), (100, 0.9)]:
        assert exact_log_upper_tail(fam_minima_uniform, n, x) == pytest.approx(
            n * math.log1p(-x), rel=1e-14)
    # the minimum cannot exceed the right endpoint
    assert exact_log_upper_tail(fam_minima_uniform, 10, 1.5) == -math.inf


def test_minima_rates(fam_minima_exp):
    assert fam_minima_exp.rate_md(0.7) == pytest.approx(0.7, rel=1e-14)
    assert fam_minima_exp.rate_ld(0.7) == pytest.approx(0.7, rel=1e-14)
    assert fam_minima_exp.rate_ld(-0.2) == math.inf
    assert fam_minima_exp.limit_cdf(0.5) == pytest.approx(-math.expm1(-0.5), rel=1e-14)
    assert not fam_minima_exp.central


def test_minima_rejects_unsuitable_sources():
    with pytest.raises(ValueError):
        make_minima(std_normal())  # support extends below zero
    with pytest.raises(ValueError):
        make_minima(lognormal())  # zero density at the left endpoint
    with pytest.raises(ValueError):
        make_minima(logistic())


@given(n=st.integers(min_value=1, max_value=1000),
       x=st.floats(min_value=1e-6, max_value=5.0))
@settings(max_examples=80, deadline=None)
def test_minima_exp_tail_property(n, x):
    fam = make_minima(exponential(1.0))
    assert exact_log_upper_tail(fam, n, x) == pytest.approx(-n * x, rel=1e-12)


# --- gumbel maxima -----------------------------------------------------------

def test_gumbel_deep_tail_anchor(fam_gumbel_weibull2):
    assert exact_log_upper_tail(fam_gumbel_weibull2, 10**6, 3.0) == pytest.approx(
        -207.23265836946411, rel=1e-12)


def test_gumbel_lower_tail_anchor(fam_gumbel_weibull2):
    # P(M_n <= m_n) = (1 - 1/n)^n at x = 0
    assert exact_log_lower_tail(fam_gumbel_weibull2, 100, 0.0) == pytest.approx(
        100.0 * math.log(0.99), rel=1e-12)


def test_gumbel_tail_consistency(fam_gumbel_weibull2):
    # complement identity at moderate depth, where both sides are exact
    for n, x in [(50, 0.2), (1000, 0.1), (100, -0.2)]:
        up = exact_log_upper_tail(fam_gumbel_weibull2, n, x)
        lo = exact_log_lower_tail(fam_gumbel_weibull2, n, x)
        assert math.exp(up) + math.exp(lo) == pytest.approx(1.0, abs=1e-12)


def test_gumbel_rate_ld_is_shifted_power(fam_gumbel_weibull2):
    assert fam_gumbel_weibull2.rate_ld(0.5) == pytest.approx(0.625, rel=1e-12)
    assert fam_gumbel_weibull2.rate_ld(1.0) == pytest.approx(1.5, rel=1e-12)
    assert fam_gumbel_weibull2.rate_ld(0.0) == 0.0
    assert fam_gumbel_weibull2.rate_ld(-1.5) == math.inf
    assert fam_gumbel_weibull2.rate_md(0.3) == 0.3
    assert fam_gumbel_weibull2.rate_md(-0.1) == math.inf


def test_gumbel_speed_tracks_two_log_n(fam_gumbel_weibull2):
    for n in (100, 10**5):
        assert fam_gumbel_weibull2.speed(n) == pytest.approx(2.0 * math.log(n), rel=1e-9)


def test_gumbel_limit_is_gumbel(fam_gumbel_weibull2):
    for x in (-1.0, 0.0, 2.0):
        assert fam_gumbel_weibull2.limit_cdf(x) == pytest.approx(
            math.exp(-math.exp(-x)), rel=1e-14)


def test_gumbel_n_bounds():
    fam = make_gumbel_maxima(std_normal())
    assert fam.least_n == 3
    with pytest.raises(ValueError):
        exact_log_upper_tail(fam, 2, 0.5)
    with pytest.raises(ValueError):
        exact_log_upper_tail(fam, 10**16, 0.5)


def test_gumbel_rejects_bounded_support():
    with pytest.raises(ValueError):
        make_gumbel_maxima(uniform01())


def test_gumbel_two_branch_tail_is_continuous(fam_gumbel_weibull2):
    # the series branch takes over once n * sf is tiny; values on both
    # sides of the switch must agree through the complement identity
    n = 10**6
    for x in (0.5, 1.0, 2.0):
        up = exact_log_upper_tail(fam_gumbel_weibull2, n, x)
        m = weibull(2.0).isf(1.0 / n)
        ref = n * weibull(2.0).log_sf(m * (1.0 + x))  # log(n sf), first order
        assert up == pytest.approx(math.log(n) + ref / n, rel=1e-9)


# --- coupon collector --------------------------------------------------------

FROZEN_COUPON = [
    (2, 2, Fraction(1, 2)),
    (2, 3, Fraction(3, 4)),
    (3, 3, Fraction(2, 9)),
    (3, 4, Fraction(4, 9)),
    (3, 5, Fraction(50, 81)),
    (4, 8, Fraction(5103, 8192)),
    (5, 12, Fraction(1324224, 1953125)),
]


@pytest.mark.parametrize("n,m,prob", FROZEN_COUPON)
def test_coupon_cdf_frozen_fractions(n, m, prob):
    assert coupon_cdf_dp(n, m) == pytest.approx(float(prob), rel=1e-14)
    assert coupon_cdf_inclusion_exclusion(n, m) == pytest.approx(float(prob), rel=1e-15)


def test_coupon_cdf_edge_cases():
    assert coupon_cdf_dp(3, 2) == 0.0
    assert coupon_cdf_dp(1, 1) == 1.0
    assert coupon_cdf_inclusion_exclusion(1, 5) == 1.0
    with pytest.raises(ValueError):
        coupon_cdf_dp(0, 1)
    with pytest.raises(ValueError):
        coupon_cdf_dp(3, 10**9)  # over the cell budget


@given(n=st.integers(min_value=2, max_value=25), k=st.integers(min_value=0, max_value=30))
@settings(max_examples=60, deadline=None)
def test_coupon_dp_matches_inclusion_exclusion(n, k):
    m = n + k
    assert coupon_cdf_dp(n, m) == pytest.approx(
        coupon_cdf_inclusion_exclusion(n, m), rel=1e-9, abs=1e-300)


def test_coupon_log_sf_agrees_with_complement(fam_coupon):
    # n=50 stresses the alternating-series branch against the DP
    for m in (260, 300, 400):
        x = m / (50 * math.log(50)) - 1.0
        ls = exact_log_upper_tail(fam_coupon, 50, x)
        dp = coupon_cdf_dp(50, math.ceil((1.0 + x) * 50 * math.log(50) - 1e-9) - 1)
        assert ls == pytest.approx(math.log1p(-dp), rel=1e-10)


def test_coupon_threshold_pair():
    assert coupon_threshold_pair(10, 0.5) == (34, 35)
    # integer thresholds collapse the pair
    x = 3.0 / (2.0 * math.log(2.0)) - 1.0
    assert coupon_threshold_pair(2, x) == (3, 3)


def test_coupon_exact_tails_use_integer_thresholds(fam_coupon):
    x = 3.0 / (2.0 * math.log(2.0)) - 1.0
    # P(T_2 >= 3) = 1/2, P(T_2 <= 3) = 3/4
    assert exact_log_upper_tail(fam_coupon, 2, x) == pytest.approx(math.log(0.5), rel=1e-14)
    assert exact_log_lower_tail(fam_coupon, 2, x) == pytest.approx(math.log(0.75), rel=1e-14)


def test_coupon_tail_bounds_shapes():
    b = coupon_tail_bounds(10, c=1.5)
    assert b.threshold == pytest.approx(1.5 * 10 * math.log(10), rel=1e-14)
    assert b.upper_bound == pytest.approx(10 ** -0.5, rel=1e-14)
    b2 = coupon_tail_bounds(10, m=34)
    assert b2.lower_bound == pytest.approx(2.0 * (1.0 - math.exp(-3.4)) ** 10, rel=1e-12)
    with pytest.raises(ValueError):
        coupon_tail_bounds(10)
    with pytest.raises(ValueError):
        coupon_tail_bounds(10, c=1.5, m=30)


def test_coupon_tail_bounds_dominate_exact_tail():
    for n in (5, 10, 50):
        for c in (1.25, 1.5, 2.0):
            m = int(c * n * math.log(n))
            sf = -math.expm1(math.log(coupon_cdf_dp(n, m)))
            assert sf <= coupon_tail_bounds(n, c=c).upper_bound
            assert coupon_cdf_dp(n, m) <= coupon_tail_bounds(n, m=m).lower_bound


def test_coupon_needs_two_types(fam_coupon):
    with pytest.raises(ValueError):
        exact_log_upper_tail(fam_coupon, 1, 0.5)


def test_coupon_sampler_matches_dp(fam_coupon):
    # empirical CDF of T_5 at m=12 against the exact 0.678002688
    hits = 0
    trials = 20000
    for trial in range(trials):
        stream = TrialStream(seed=13, trial=trial)
        t = (1.0 + sample(fam_coupon, 5, stream)) * 5 * math.log(5)
        hits += round(t) <= 12
    p_hat = hits / trials
    assert abs(p_hat - 0.678002688) < 4.0 * math.sqrt(0.678 * 0.322 / trials)


# --- replacement model -------------------------------------------------------

def test_replacement_frozen_tails(fam_replacement):
    assert exact_log_lower_tail(fam_replacement, 3, -0.5) == pytest.approx(
        -2.3385216844144751, rel=1e-13)
    assert exact_log_lower_tail(fam_replacement, 10, -0.3) == pytest.approx(
        -3.1929493060871873, rel=1e-13)
    assert exact_log_upper_tail(fam_replacement, 10, 0.5) == pytest.approx(
        -10.510825623765991, rel=1e-13)


def test_replacement_atom_at_zero(fam_replacement):
    for n in (1, 7, 100, 10**4):
        assert exact_log_lower_tail(fam_replacement, n, 0.0) == pytest.approx(
            math.log(0.4), rel=1e-15)


def test_replacement_quantile_anchor(fam_replacement):
    # u = 0.2 < beta lands in the F branch: F^{-1}(0.2 F(1)/0.4) - t
    rng = SimpleNamespace(uniform=lambda: 0.2)
    z = sample(fam_replacement, 1, rng) + 1.0
    assert z == pytest.approx(0.37988549304172248, rel=1e-12)


def test_replacement_rates(fam_replacement):
    assert fam_replacement.rate_ld(0.5) == pytest.approx(1.0, rel=1e-14)
    assert fam_replacement.rate_ld(-0.5) == pytest.approx(0.47407698418010663, rel=1e-13)
    assert fam_replacement.rate_ld(-1.0) == math.inf
    assert fam_replacement.rate_md.right_slope_at_zero == pytest.approx(2.0, abs=1e-9)
    assert fam_replacement.rate_md.left_slope_at_zero == pytest.approx(
        -0.5819767068693265, abs=1e-9)
    assert fam_replacement.md_needs_alogn


def test_replacement_limit_is_two_sided_exponential(fam_replacement):
    assert fam_replacement.limit_cdf(0.0) == pytest.approx(0.4, rel=1e-14)
    assert fam_replacement.limit_cdf(0.3) == pytest.approx(0.6707130183435841, rel=1e-13)
    assert fam_replacement.limit_cdf(-0.4) == pytest.approx(0.31692776091540187, rel=1e-13)


def test_replacement_params_validation():
    F, G = exponential(1.0), exponential(2.0)
    with pytest.raises(ValueError):
        ReplacementParams(F, G, t=0.0, beta=0.4)
    with pytest.raises(ValueError):
        ReplacementParams(F, G, t=1.0, beta=1.0)
    with pytest.raises(ValueError):
        ReplacementParams(F, G, t=1.0, beta=-0.1)
    with pytest.raises(ValueError):
        ReplacementParams(std_normal(), G, t=1.0, beta=0.4)


def test_replacement_sampler_tracks_exact_cdf(fam_replacement):
    trials = 20000
    hits = 0
    for trial in range(trials):
        stream = TrialStream(seed=29, trial=trial)
        hits += sample(fam_replacement, 10, stream) <= -0.3
    exact = math.exp(exact_log_lower_tail(fam_replacement, 10, -0.3))
    assert abs(hits / trials - exact) < 4.0 * math.sqrt(exact * (1 - exact) / trials)


# --- rate function machinery -------------------------------------------------

def test_rate_function_rejects_negative_values():
    r = power_tail_rate(2.0)
    with pytest.raises(ValueError):
        r(float("nan"))
    assert r(1.0) == 0.0
    assert r(0.5) == math.inf  # below the domain wall
    assert r(2.0) == pytest.approx(1.5, rel=1e-14)


def test_shift_rate_moves_the_zero():
    r = shift_rate(power_tail_rate(2.0), 1.0)
    assert r(0.0) == 0.0
    assert r(1.0) == pytest.approx(1.5, rel=1e-12)
    assert r(-1.5) == math.inf


def test_rate_grid_violations_flag_broken_rates():
    from mdlab.families import RateFunction

    ok = RateFunction(fn=lambda x: x * x, domain_note="all reals")
    assert rate_grid_violations(ok, np.linspace(-2, 2, 41)) == []
    shifted = RateFunction(fn=lambda x: abs(x - 0.3), domain_note="all reals")
    assert rate_grid_violations(shifted, np.linspace(-2, 2, 41))
    dipping = RateFunction(fn=lambda x: abs(abs(x) - 1.0), domain_note="w shape")
    assert rate_grid_violations(dipping, np.linspace(-2, 2, 41))


def test_family_rate_grids_are_clean(fam_classical, fam_minima_exp,
                                     fam_gumbel_weibull2, fam_coupon,
                                     fam_replacement):
    grid = np.linspace(-2.0, 2.0, 41)
    for fam in (fam_classical, fam_minima_exp, fam_gumbel_weibull2,
                fam_coupon, fam_replacement):
        assert rate_grid_violations(fam.rate_ld, grid) == [], fam.name
        assert rate_grid_violations(fam.rate_md, grid) == [], fam.name


# --- spec strings ------------------------------------------------------------

@pytest.mark.parametrize("spec", CANONICAL_SPECS)
def test_family_spec_round_trip(spec):
    once = render_family_spec(parse_family_spec(spec))
    again = render_family_spec(parse_family_spec(once))
    assert once == again


@pytest.mark.parametrize("bad", [
    "nosuch", "classical", "classical:1", "minima", "minima:lognormal",
    "gumbel_maxima:uniform01", "coupon:3",
    "replacement:exponential:1,exponential:2,t=1",
    "replacement:exponential:1,exponential:2,beta=0.4,t=0",
])
def test_bad_family_specs(bad):
    with pytest.raises((SpecParseError, ValueError)):
        parse_family_spec(bad)
