"""Occupation-time transforms and the ladder exponent."""
import numpy as np
import pytest

from levyme import (LevyModel, PreconditionError, build_me_jump,
                    hyperexp_occupation, ladder_exponent,
                    occupation_identity_residual, occupation_limit,
                    occupation_mgf, occupation_profile, occupation_zero)

from conftest import golden_minus_root


def test_golden_occupation_at_zero(golden):
    # with a single minus root the transform is s/(s+u) times the ratio of
    # the roots at s+u and s, both explicit quadratic surds
    for s, u in ((1.0, 1.0), (0.5, 0.5), (2.0, 0.7)):
        want = s / (s + u) * golden_minus_root(s + u) / golden_minus_root(s)
        assert occupation_zero(golden, s, u) == pytest.approx(want,
                                                              abs=1e-12)
    assert occupation_zero(golden, 1.0, 1.0) == pytest.approx(
        0.5922415440691262, abs=1e-12)


def test_golden_occupation_below_zero(golden):
    # the x <= 0 display collapses to a single exponential term whose
    # coefficient is the root ratio minus one
    r1, r2 = golden_minus_root(1.0), golden_minus_root(2.0)
    for x in (-0.25, -1.0, -3.0):
        want = 0.5 * (1.0 + (r2 / r1 - 1.0) * np.exp(r2 * x))
        assert occupation_mgf(golden, 1.0, 1.0, x) == pytest.approx(
            want, abs=1e-12)
    assert r2 / r1 - 1.0 == pytest.approx(0.18448308813825198, abs=1e-12)


def test_continuity_at_zero(hyperexp_cp):
    d0 = occupation_zero(hyperexp_cp, 1.0, 0.7)
    below = occupation_mgf(hyperexp_cp, 1.0, 0.7, -1e-8)
    above = occupation_mgf(hyperexp_cp, 1.0, 0.7, 1e-8)
    assert below == pytest.approx(d0, abs=1e-6)
    assert above == pytest.approx(d0, abs=1e-6)
    assert occupation_mgf(hyperexp_cp, 1.0, 0.7, 0.0) == d0


@pytest.mark.parametrize("fixture", ["hyperexp_cp", "hyperexp_bm"])
def test_matrix_route_equals_partial_fractions(fixture, request):
    model = request.getfixturevalue(fixture)
    rng = np.random.default_rng(7)
    for _ in range(15):
        s = float(rng.uniform(0.2, 3.0))
        u = float(rng.uniform(0.1, 2.0))
        x = float(rng.uniform(-3.0, 3.0))
        a = occupation_mgf(model, s, u, x)
        b = hyperexp_occupation(model, s, u, x)
        assert abs(a - b) <= 1e-9
        assert 0.0 < a <= 1.0


def test_partial_fractions_need_real_simple_roots(complex_me):
    # the oscillating jump density puts a conjugate root pair in the minus
    # half-plane; the matrix route handles it, the scalar display cannot
    val = occupation_mgf(complex_me, 1.0, 0.8, -0.5)
    assert 0.0 < val < 1.0
    with pytest.raises(PreconditionError, match="real"):
        hyperexp_occupation(complex_me, 1.0, 0.8, -0.5)


def test_passage_route_equals_closed_form(heavy, hyperexp_cp):
    for model, x in ((heavy, 0.7), (hyperexp_cp, 0.4)):
        a = occupation_mgf(model, 1.0, 0.8, x, route="closed_form")
        b = occupation_mgf(model, 1.0, 0.8, x, route="passage")
        assert a == pytest.approx(b, abs=1e-8)


def test_profile_matches_pointwise(hyperexp_cp, general_pos):
    xs = np.array([-1.5, -0.4, 0.0, 0.3, 1.1])
    prof = occupation_profile(hyperexp_cp, 1.0, 0.7, xs)
    point = [occupation_mgf(hyperexp_cp, 1.0, 0.7, float(x)) for x in xs]
    assert np.max(np.abs(prof - point)) <= 1e-12
    xs_neg = np.array([-2.0, -0.7, 0.0])
    prof = occupation_profile(general_pos, 1.0, 0.5, xs_neg)
    point = [occupation_mgf(general_pos, 1.0, 0.5, float(x)) for x in xs_neg]
    assert np.max(np.abs(prof - point)) <= 1e-12


def test_general_side_uses_passage_route(general_pos):
    # no closed x > 0 display without a rational plus side
    with pytest.raises(PreconditionError):
        occupation_mgf(general_pos, 1.0, 0.5, 0.4, route="closed_form")
    val = occupation_mgf(general_pos, 1.0, 0.5, 0.4)
    assert 0.0 < val < 1.0
    assert val == pytest.approx(
        occupation_mgf(general_pos, 1.0, 0.5, 0.4, route="passage"),
        abs=1e-14)


# ------------------------------------------------------------------ #
# s -> 0 limits


def test_limit_matches_small_kill_rate(heavy, hyperexp_cp):
    for model in (heavy, hyperexp_cp):
        for x in (-0.6, 0.0, 0.6):
            lim = occupation_limit(model, 0.8, x)
            small = occupation_mgf(model, 1e-6, 0.8, x)
            assert small == pytest.approx(lim, rel=1e-4)


def test_limit_edge_cases(golden, heavy):
    assert occupation_limit(heavy, 0.0, 0.5) == 1.0
    # positive mean: the time above any level is infinite
    assert occupation_limit(heavy.mirrored(), 0.8, 0.5) == 0.0
    with pytest.raises(PreconditionError):
        occupation_limit(golden, 0.8, 0.5)     # zero mean boundary
    with pytest.raises(PreconditionError):
        occupation_limit(heavy, -0.5, 0.5)
    with pytest.raises(PreconditionError):
        occupation_limit(heavy, 0.8, -0.5, route="passage")


# ------------------------------------------------------------------ #
# ladder exponent


def test_golden_ladder_value(golden):
    # kappa(1/2, 0) = D_0(1/2, 1/2); the golden roots at 1/2 and 1 are 1/2
    # and (sqrt(5)-1)/2, so the value is the golden ratio conjugate
    val = ladder_exponent(golden, 0.5, 0.0)
    assert val == pytest.approx(0.6180339887498949, abs=1e-12)
    assert val == pytest.approx(occupation_zero(golden, 0.5, 0.5), abs=1e-14)


@pytest.mark.parametrize("fixture", ["golden", "hyperexp_cp"])
def test_ladder_routes_agree(fixture, request):
    model = request.getfixturevalue(fixture)
    for s in (0.2, 0.5, 0.9):
        for r in (0.0, 0.4, 1.7, 5.0):
            a = ladder_exponent(model, s, r, route="generic")
            b = ladder_exponent(model, s, r, route="closed_form")
            assert abs(a - b) <= 1e-9


def test_ladder_monotone_in_r(hyperexp_cp):
    rs = np.linspace(0.0, 4.0, 9)
    vals = [ladder_exponent(hyperexp_cp, 0.5, float(r)) for r in rs]
    assert np.all(np.diff(vals) > 0)


def test_ladder_preconditions(golden, general_pos):
    with pytest.raises(PreconditionError):
        ladder_exponent(golden, 1.5, 0.0)
    with pytest.raises(PreconditionError):
        ladder_exponent(golden, 0.0, 0.0)
    with pytest.raises(PreconditionError):
        ladder_exponent(golden, 0.5, -0.2)
    with pytest.raises(PreconditionError):
        ladder_exponent(general_pos, 0.5, 0.3, route="closed_form")


# ------------------------------------------------------------------ #
# independent first-moment identity


def test_expected_occupation_identity(golden, hyperexp_cp, general_pos):
    assert occupation_identity_residual(golden, 1.0, -1.0) <= 1e-6
    for x in (-0.5, 0.4):
        assert occupation_identity_residual(hyperexp_cp, 1.0, x) <= 1e-6
    assert occupation_identity_residual(general_pos, 1.0, -0.5) <= 1e-6


def test_preconditions_and_degenerate_model(golden):
    with pytest.raises(PreconditionError):
        occupation_mgf(golden, 0.0, 1.0, 0.5)
    with pytest.raises(PreconditionError):
        occupation_mgf(golden, 1.0, -1.0, 0.5)
    assert occupation_mgf(golden, 1.0, 0.0, 0.5) == 1.0
    # sigma = 0 with zero drift: paths sit at points between jumps and the
    # half-line occupation time is boundary-sensitive
    still = LevyModel(drift=0.0, sigma=0.0,
                      neg=build_me_jump("-", 1.0, [1.0], [1.0]))
    with pytest.raises(PreconditionError):
        occupation_zero(still, 1.0, 1.0)
