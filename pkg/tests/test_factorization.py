"""Killed-extremum factorization: golden-ratio laws, dual routes, limits."""
import numpy as np
import pytest
from scipy.integrate import quad

from levyme import (PreconditionError, absolute_extremum, absolute_supremum,
                    build_component, infimum_law, limit_minus_quantities,
                    matrix_tail_transform, supremum_law, wiener_hopf_residual)
from levyme._util import as_real

from conftest import golden_minus_root, golden_plus_root, rational_cumulant

PHI_HAT = 0.6180339887498949   # (sqrt(5) - 1) / 2
PHI = 1.6180339887498949       # (sqrt(5) + 1) / 2


# ------------------------------------------------------------------ #
# golden model: everything explicit


def test_golden_supremum_is_exponential(golden):
    law = supremum_law(golden, 1.0)
    assert law.kind == "me"
    assert abs(law.atom) <= 1e-12
    xs = np.linspace(0.0, 8.0, 33)
    assert np.max(np.abs(law.tail(xs) - np.exp(-PHI * xs))) <= 1e-9
    dens = law.density(xs)
    assert np.max(np.abs(dens - PHI * np.exp(-PHI * xs))) <= 1e-9
    for r in (-0.5, -2.0, 1.0):
        assert complex(law.mgf(r)) == pytest.approx(PHI / (PHI - r),
                                                    abs=1e-12)


def test_golden_infimum_density(golden):
    law = infimum_law(golden, 1.0)
    assert law.atom == pytest.approx(PHI_HAT, abs=1e-12)
    xs = np.linspace(-6.0, 0.0, 41)
    want = PHI_HAT * (1.0 - PHI_HAT) * np.exp(PHI_HAT * xs)
    assert np.max(np.abs(law.density(xs) - want)) <= 1e-12
    assert law.tail(-1.0) == pytest.approx(
        (1.0 - PHI_HAT) * np.exp(-PHI_HAT), abs=1e-12)
    assert law.tail(-1.0) == pytest.approx(0.20588085755961374, abs=1e-12)
    # cdf jumps by the atom at 0
    assert law.cdf(-1e-12) == pytest.approx(1.0 - PHI_HAT, abs=1e-9)
    assert law.cdf(0.0) == 1.0


def test_golden_components_across_kill_rates(golden):
    for s in (0.25, 1.0, 4.0):
        rm, rp = golden_minus_root(s), golden_plus_root(s)
        inf = infimum_law(golden, s)
        sup = supremum_law(golden, s)
        assert inf.atom == pytest.approx(rm, abs=1e-12)
        assert sup.tail(1.3) == pytest.approx(np.exp(-1.3 * rp), abs=1e-11)


# ------------------------------------------------------------------ #
# dual routes must agree


@pytest.mark.parametrize("fixture", ["hyperexp_cp", "hyperexp_bm"])
def test_mgf_product_vs_resolvent(fixture, request):
    model = request.getfixturevalue(fixture)
    rs = np.array([0.3j, -0.7 + 0.2j, 1.4j, -0.1 - 2.0j, 0.05])
    for side in ("-", "+"):
        comp = build_component(model, 1.0, side)
        for r in rs:
            a = complex(comp.mgf(r if side == "+" else -r))
            b = complex(comp.mgf_matrix(r if side == "+" else -r))
            assert abs(a - b) <= 1e-12


@pytest.mark.parametrize("fixture", ["hyperexp_cp", "hyperexp_bm"])
def test_matrix_tail_transform_routes(fixture, request):
    model = request.getfixturevalue(fixture)
    for side in ("-", "+"):
        comp = build_component(model, 1.0, side)
        eig = matrix_tail_transform(model, comp, route="eigen")
        qd = matrix_tail_transform(model, comp, route="quadrature")
        assert np.max(np.abs(eig - qd)) <= 1e-9


def test_mgf_matches_density_quadrature(hyperexp_cp):
    # product-form transform against direct integration of the density
    sup = supremum_law(hyperexp_cp, 1.0)
    for r in (-0.5, -1.5):
        direct = quad(lambda x: np.exp(r * x) * float(sup.density(x)),
                      0.0, np.inf, limit=200)[0] + sup.atom
        assert complex(sup.mgf(r)).real == pytest.approx(direct, abs=1e-9)
        assert abs(complex(sup.mgf(r)).imag) <= 1e-12


# ------------------------------------------------------------------ #
# factorization identity, rebuilt from raw ingredients


@pytest.mark.parametrize("fixture",
                         ["golden", "hyperexp_cp", "hyperexp_bm",
                          "complex_me", "general_pos"])
def test_factor_product_reconstructs_resolvent(fixture, request):
    model = request.getfixturevalue(fixture)
    s = 1.0
    sup = supremum_law(model, s)
    inf = infimum_law(model, s)
    for omega in (0.1, 0.9, 4.7, 21.0):
        lhs = s / (s - rational_cumulant(model, 1j * omega))
        rhs = complex(sup.mgf(1j * omega)) * complex(inf.mgf(1j * omega))
        assert abs(lhs - rhs) <= 1e-8


@pytest.mark.parametrize("fixture",
                         ["bm", "golden", "heavy", "erlang", "hyperexp_cp",
                          "hyperexp_bm", "complex_me", "general_pos"])
def test_wiener_hopf_residual_small(fixture, request):
    model = request.getfixturevalue(fixture)
    for omega in (0.1, 1.0, 7.3, 50.0):
        assert wiener_hopf_residual(model, 1.0, 1j * omega) <= 1e-8
    assert wiener_hopf_residual(model, 1.0, 0.0) == 0.0
    with pytest.raises(PreconditionError):
        wiener_hopf_residual(model, 1.0, 0.5 + 1.0j)


# ------------------------------------------------------------------ #
# s -> 0 limits


def test_heavy_absolute_supremum_is_exponential(heavy):
    law = absolute_supremum(heavy)
    assert law.atom == pytest.approx(0.0, abs=1e-12)
    assert law.tail(1.0) == pytest.approx(np.exp(-1.0), abs=1e-12)
    xs = np.linspace(0.0, 5.0, 21)
    assert np.max(np.abs(law.tail(xs) - np.exp(-xs))) <= 1e-10
    assert as_real(law.mgf(0)) == 1.0


def test_absolute_extremum_mirrored(heavy):
    up = heavy.mirrored()           # mean +1, spectrally positive
    law = absolute_extremum(up, "-")
    assert law.tail(-1.0) == pytest.approx(np.exp(-1.0), abs=1e-12)
    assert law.cdf(0.0) == 1.0


def test_absolute_supremum_needs_negative_mean(golden):
    with pytest.raises(PreconditionError):
        absolute_supremum(golden)


@pytest.mark.parametrize("fixture", ["heavy", "hyperexp_cp", "general_pos"])
def test_limit_quantities_match_finite_differences(fixture, request):
    model = request.getfixturevalue(fixture)
    lm = limit_minus_quantities(model)
    s = 1e-6
    comp = build_component(model, s, "-")
    assert comp.p / s == pytest.approx(lm.p_prime, rel=1e-4)
    assert comp.creep / s == pytest.approx(lm.creep_prime, rel=1e-4,
                                           abs=1e-10)
    assert np.allclose(comp.q / s, lm.q_prime, rtol=1e-4)
    # heavy has unit primes: drift 1, mean -1
    if fixture == "heavy":
        assert lm.p_prime == pytest.approx(1.0, rel=1e-10)
        assert lm.creep_prime == pytest.approx(1.0, rel=1e-10)
        assert np.allclose(lm.q_prime, [1.0], rtol=1e-10)


def test_limit_law_consistency_small_s(heavy, hyperexp_cp):
    for model in (heavy, hyperexp_cp):
        sup_s = supremum_law(model, 1e-6)
        sup_0 = absolute_supremum(model)
        xs = np.linspace(0.05, 3.0, 20)
        a = sup_s.tail(xs)
        b = sup_0.tail(xs)
        assert np.max(np.abs(a - b) / np.abs(b)) <= 1e-4


# ------------------------------------------------------------------ #
# law object behavior


def test_law_shape_and_domain_checks(hyperexp_cp):
    sup = supremum_law(hyperexp_cp, 1.0)
    inf = infimum_law(hyperexp_cp, 1.0)
    grid = np.array([[0.5, 1.0], [2.0, 3.0]])
    assert sup.tail(grid).shape == grid.shape
    assert isinstance(sup.tail(0.7), float)
    with pytest.raises(PreconditionError):
        sup.density(-0.5)
    with pytest.raises(PreconditionError):
        inf.tail(0.5)
    with pytest.raises(PreconditionError):
        supremum_law(hyperexp_cp, 0.0)


def test_mgf_is_exactly_one_at_zero(golden, hyperexp_cp, general_pos):
    for model in (golden, hyperexp_cp, general_pos):
        assert as_real(supremum_law(model, 1.0).mgf(0)) == 1.0
        assert as_real(infimum_law(model, 1.0).mgf(0)) == 1.0


def test_inversion_kind_supremum(general_pos):
    # plus side is a callable spec: the law falls back to transform
    # inversion but keeps exact structure at the origin
    sup = supremum_law(general_pos, 1.0)
    assert sup.kind == "inversion"
    assert sup.atom == 0.0          # drift points up
    t1, t2 = float(sup.tail(0.4)), float(sup.tail(1.2))
    assert 0.0 < t2 < t1 < 1.0
