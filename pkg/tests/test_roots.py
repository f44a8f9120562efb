"""Root solver: closed-form quadratic oracles, certificates, limits."""
import numpy as np
import pytest

from levyme import limiting_roots, solve_roots

from conftest import (golden_minus_root, golden_plus_root, rational_cumulant,
                      signed_root)

ALL_PRESETS = ["bm", "spectral_neg_exp", "spectral_neg_exp_heavy",
               "spectral_neg_erlang", "hyperexp_cp", "hyperexp_bm",
               "complex_me", "general_pos"]


def test_golden_roots_match_quadratic(golden):
    for s in (0.5, 1.0, 2.0, 7.0):
        rm = solve_roots(golden, s, "-")
        rp = solve_roots(golden, s, "+")
        assert len(rm) == 1 and len(rp) == 1
        assert rm.r1 == pytest.approx(golden_minus_root(s), abs=1e-12)
        assert rp.r1 == pytest.approx(golden_plus_root(s), abs=1e-12)
    # s = 1 pins the golden ratio conjugate on the minus side
    assert solve_roots(golden, 1.0, "-").r1 == pytest.approx(
        0.6180339887498949, abs=1e-13)
    assert solve_roots(golden, 1.0, "+").r1 == pytest.approx(
        1.6180339887498949, abs=1e-13)
    assert solve_roots(golden, 2.0, "-").r1 == pytest.approx(
        np.sqrt(3.0) - 1.0, abs=1e-13)


def test_heavy_roots_match_quadratic(heavy):
    # k(-r) = s gives r^2 + (1+s) r - s = 0; k(r) = s gives
    # r^2 - (1+s) r + ... the same discriminant pattern
    assert solve_roots(heavy, 1.0, "-").r1 == pytest.approx(
        np.sqrt(2.0) - 1.0, abs=1e-13)
    assert solve_roots(heavy, 1.0, "+").r1 == pytest.approx(
        np.sqrt(2.0) + 1.0, abs=1e-13)


@pytest.mark.parametrize("name", ALL_PRESETS)
@pytest.mark.parametrize("s", [0.5, 1.0, 3.0])
def test_root_certificates(name, s, request):
    fixture = {"bm": "bm", "spectral_neg_exp": "golden",
               "spectral_neg_exp_heavy": "heavy",
               "spectral_neg_erlang": "erlang", "hyperexp_cp": "hyperexp_cp",
               "hyperexp_bm": "hyperexp_bm", "complex_me": "complex_me",
               "general_pos": "general_pos"}[name]
    model = request.getfixturevalue(fixture)
    for side in ("-", "+"):
        if not model.side_is_me(side):
            continue
        rs = solve_roots(model, s, side)
        assert len(rs) == model.root_count(side)
        spec = model.spec(side)
        if spec is not None:
            # the distinguished root sits below the slowest jump rate
            assert 0.0 <= rs.r1 <= spec.min_rate + 1e-12
        else:
            assert rs.r1 >= 0.0
        for root in rs.roots:
            res = abs(rational_cumulant(model, signed_root(side, root)) - s)
            assert res <= 1e-9 * (1.0 + s)
        # the solver's own residual certificates agree
        assert np.max(rs.residuals) <= 1e-9 * (1.0 + s)


def test_conjugate_pairs_adjacent(complex_me):
    rs = solve_roots(complex_me, 1.0, "-")
    assert len(rs) == 3
    tail = rs.roots[1:]
    assert tail[0] == pytest.approx(np.conj(tail[1]), abs=1e-10)
    assert abs(rs.roots[0].imag) < 1e-12


def test_limiting_roots_vanishing_side(heavy, hyperexp_cp):
    for model in (heavy, hyperexp_cp):
        lim = limiting_roots(model, "-")
        assert lim.vanished
        assert lim.slope == pytest.approx(1.0 / abs(model.mean), rel=1e-9)
        assert len(lim.roots) == model.root_count("-") - 1
        # finite difference of the true root at tiny s
        s = 1e-7
        fd = solve_roots(model, s, "-").r1 / s
        assert fd == pytest.approx(lim.slope, rel=1e-4)


def test_limiting_roots_persistent_side(heavy):
    lim = limiting_roots(heavy, "+")
    assert not lim.vanished
    assert len(lim.roots) == 1
    # k(r) = 0 at r = 1 for drift 1 with Exp(1) downs at rate 2
    assert lim.roots[0].real == pytest.approx(1.0, abs=1e-10)
    small = solve_roots(heavy, 1e-7, "+").r1
    assert small == pytest.approx(1.0, rel=1e-6)
