import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardy_extremal.geometry import comb_domain, disk, polygon, slit_plane, wedge
from hardy_extremal.harmonic import ZERO, MeasureEstimate
from hardy_extremal.hardy import (EstimateError, HardyEstimate, bergman_membership,
                                  hardy_number_estimate, question_integral_classifier,
                                  starlike_hardy_oracle)
from hardy_extremal.hyperbolic import MetricBracket
from hardy_extremal.profile import LevelSetProfile, ProfileConfig, ProfileRow


def power_law_profile(h, tables, n=16, r0=2.0, q=10 ** 0.25, rel_se=1e-3, delta_full=None):
    """Profile whose extremal measure is exactly (r0/r)^h."""
    r = r0 * q ** np.arange(n)
    rows = []
    for x in r:
        om = (r0 / x) ** h
        est = MeasureEstimate(om, rel_se * om, 100_000)
        dfull = math.nan if delta_full is None else delta_full(x)
        rows.append(ProfileRow(float(x), est, est, float(tables.lambda_star(om)),
                               float(tables.delta_star(om)), dfull, MetricBracket(h * math.log(x)),
                               1, 0))
    return LevelSetProfile(None, r, rows, ProfileConfig())


@pytest.mark.parametrize("h", [0.5, 1.0, 2.0, 4.0])
def test_exact_power_law_recovered(tables, h):
    p = power_law_profile(h, tables)
    assert hardy_number_estimate(p, "omega_star").h_est == pytest.approx(h, rel=1e-9)
    assert hardy_number_estimate(p, "omega_full").h_est == pytest.approx(h, rel=1e-9)
    for tag in ("delta_star", "lambda_star"):
        assert hardy_number_estimate(p, tag).h_est == pytest.approx(h, rel=0.05)


def test_d_bracket_interval(tables):
    est = hardy_number_estimate(power_law_profile(2.0, tables), "d_bracket")
    assert est.h_est == pytest.approx(2.0)
    assert est.interval == pytest.approx((1.0, 4.0))


def test_empty_tail_gives_infinity(tables):
    p = power_law_profile(2.0, tables)
    for row in p.rows[10:]:
        row.omega_star = row.omega_full = ZERO
        row.n_crosscuts = 0
        row.lambda_star = row.delta_star = math.inf
    assert hardy_number_estimate(p).h_est == math.inf


def test_estimate_errors(tables):
    with pytest.raises(EstimateError):
        hardy_number_estimate(power_law_profile(2.0, tables, n=5))
    with pytest.raises(EstimateError):
        hardy_number_estimate(power_law_profile(2.0, tables), "nonsense")


def _est(h, half_width=0.02):
    return HardyEstimate("omega_star", h, [h], [half_width / 2], (1.0, 2.0), half_width)


@pytest.mark.parametrize("p, alpha, verdict", [(1, -1, "member"), (3, -1, "non-member"),
                                               (2, -1, "undecided"), (3, 0, "member"),
                                               (5, 0, "non-member")])
def test_membership_rules(p, alpha, verdict):
    assert bergman_membership(_est(2.0), p, alpha).verdict == verdict


def test_membership_infinite_hardy_number():
    assert bergman_membership(_est(math.inf), 100.0, -1).verdict == "member"


@pytest.mark.parametrize("p, alpha", [(0.0, -1), (1.0, -1.5)])
def test_membership_parameter_checks(p, alpha):
    with pytest.raises(ValueError):
        bergman_membership(_est(2.0), p, alpha)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.01, 20), st.floats(0.01, 20), st.floats(-1, 5))
def test_membership_monotone_in_exponent(h, p1, p2, alpha):
    # a member for some exponent stays a member for every smaller exponent
    lo, hi = min(p1, p2), max(p1, p2)
    if bergman_membership(_est(h), hi, alpha).verdict == "member":
        assert bergman_membership(_est(h), lo, alpha).verdict == "member"


def test_question_integral_diverges_on_slow_growth(tables):
    p = power_law_profile(2.0, tables,
                          delta_full=lambda r: math.log(r) / (2 * math.pi) - 0.05)
    assert question_integral_classifier(p, 1.0, -1.0) == "diverges"


def test_question_integral_converges_on_fast_growth(tables):
    p = power_law_profile(2.0, tables, delta_full=lambda r: 2.0 * math.log(r) / math.pi)
    assert question_integral_classifier(p, 1.0, -1.0) == "converges"


def test_question_integral_needs_delta_values(tables):
    with pytest.raises(EstimateError):
        question_integral_classifier(power_law_profile(2.0, tables), 1.0, -1.0)


@pytest.mark.parametrize("D, h", [(wedge(math.pi / 2), 2.0), (wedge(math.pi / 4), 4.0),
                                  (slit_plane([(1 + 0j, 1 + 0j)]), 0.5),
                                  (comb_domain(2.0, 3), 16.0), (comb_domain(4 * math.pi, 1), 4.0),
                                  (disk(0j, 5.0, 0j), math.inf)])
def test_starlike_oracle(D, h):
    assert starlike_hardy_oracle(D) == pytest.approx(h, rel=1e-3)


def test_starlike_oracle_rejects_other_domains():
    u = polygon([-3 - 1j, 3 - 1j, 3 + 3j, 2 + 3j, 2 + 0j, -2 + 0j, -2 + 3j, -3 + 3j], -0.5j)
    with pytest.raises(ValueError):
        starlike_hardy_oracle(u)
