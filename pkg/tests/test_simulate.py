"""Monte Carlo oracle: agreement with closed forms and sampler checks.

Every statistical assertion uses a 4-standard-error bound at a fixed seed,
so failures mean real bias, not noise. Closed-form references are either
explicit golden-ratio formulas or library values that the rest of the
suite pins down independently.
"""
import numpy as np
import pytest
from scipy.integrate import quad

from levyme import (FunctionalRequest, PreconditionError, SimConfig,
                    discounted_overshoot, infimum_law, occupation_mgf,
                    sample_jump, simulate, simulate_killed_path,
                    supremum_law)

from conftest import golden_minus_root, golden_plus_root

PHI_HAT = 0.6180339887498949
PHI = 1.6180339887498949


def run(model, s, kind, paths=80_000, seed=0, **kw):
    req = FunctionalRequest(kind=kind, **kw)
    return simulate(model, s, req, SimConfig(paths=paths, seed=seed))


def check(res, ref, extra=0.0):
    assert res.se > 0.0
    assert abs(res.estimate - ref) <= 4.0 * res.se + extra, \
        f"{res.kind}: {res.estimate} vs {ref} (se {res.se})"


# ------------------------------------------------------------------ #
# golden model: references are explicit formulas


def test_golden_infimum_tail(golden):
    ref = (1.0 - PHI_HAT) * np.exp(-PHI_HAT)     # P{inf < -1}
    check(run(golden, 1.0, "inf_cdf", x=-1.0, seed=1), ref)


def test_golden_infimum_atom(golden):
    check(run(golden, 1.0, "inf_atom", seed=2), PHI_HAT)


def test_golden_supremum_tail(golden):
    check(run(golden, 1.0, "sup_tail", x=1.0, seed=3), np.exp(-PHI))


def test_golden_occupation(golden):
    ref = 0.5 * golden_minus_root(2.0) / golden_minus_root(1.0)
    check(run(golden, 1.0, "occ_mgf", x=0.0, u=1.0, seed=4), ref)


def test_golden_passage(golden):
    ref = np.exp(-0.5 * golden_plus_root(1.0))   # creep over x = 1/2
    check(run(golden, 1.0, "passage_laplace", x=0.5, seed=5), ref)
    check(run(golden, 1.0, "overshoot_atom", x=0.5, seed=5), ref)


def test_no_float_dust_near_zero(golden):
    # paths must start at an exact 0.0 so the infimum atom is clean: with
    # a shared seed, {inf < -1e-12} and {inf = 0} must partition the paths
    a = run(golden, 1.0, "inf_cdf", x=-1e-12, paths=30_000, seed=11)
    b = run(golden, 1.0, "inf_atom", paths=30_000, seed=11)
    assert a.estimate + b.estimate == 1.0


# ------------------------------------------------------------------ #
# two-sided and diffusive models


def test_hyperexp_overshoot_functionals(hyperexp_cp):
    law = discounted_overshoot(hyperexp_cp, 1.0, 0.5)
    check(run(hyperexp_cp, 1.0, "overshoot_atom", x=0.5, seed=6), law.atom)
    bin_mass = quad(lambda v: float(law.density(v)), 0.2, 0.8)[0]
    check(run(hyperexp_cp, 1.0, "overshoot_prob", x=0.5, lo=0.2, hi=0.8,
              seed=7), bin_mass)
    check(run(hyperexp_cp, 1.0, "passage_laplace", x=0.5, seed=8),
          law.expected_mass)


def test_hyperexp_occupation(hyperexp_cp):
    ref = occupation_mgf(hyperexp_cp, 1.0, 0.7, 0.4)
    check(run(hyperexp_cp, 1.0, "occ_mgf", x=0.4, u=0.7, seed=9), ref)


def test_diffusive_supremum(hyperexp_bm):
    ref = float(supremum_law(hyperexp_bm, 1.0).tail(1.0))
    check(run(hyperexp_bm, 1.0, "sup_tail", x=1.0, paths=60_000, seed=10),
          ref)


def test_diffusive_occupation_grid_bias(hyperexp_bm):
    # sigma > 0 occupation uses a time grid; allow its O(h) bias on top of
    # the statistical band
    ref = occupation_mgf(hyperexp_bm, 1.0, 0.7, 0.3)
    res = run(hyperexp_bm, 1.0, "occ_mgf", x=0.3, u=0.7, paths=60_000,
              seed=12)
    check(res, ref, extra=3e-3)


def test_general_side_paths(general_pos):
    inf_ref = float(infimum_law(general_pos, 1.0).tail(-1.0))
    check(run(general_pos, 1.0, "inf_cdf", x=-1.0, paths=60_000, seed=13),
          inf_ref)
    sup_ref = float(supremum_law(general_pos, 1.0).tail(0.8))
    check(run(general_pos, 1.0, "sup_tail", x=0.8, paths=60_000, seed=14),
          sup_ref)


def test_oscillating_jump_paths(complex_me):
    sup_ref = float(supremum_law(complex_me, 1.0).tail(1.0))
    check(run(complex_me, 1.0, "sup_tail", x=1.0, paths=60_000, seed=15),
          sup_ref)


# ------------------------------------------------------------------ #
# jump samplers


def test_exponential_sampler(golden):
    rng = np.random.default_rng(5)
    ys = sample_jump(golden.neg, rng, 200_000)
    assert np.all(ys > 0)
    assert ys.mean() == pytest.approx(1.0, abs=4.0 / np.sqrt(len(ys)))


def test_hypoexponential_sampler(erlang):
    # (2/(2+r))^2 is the sum of two Exp(2): mean 1, variance 1/2
    rng = np.random.default_rng(6)
    ys = sample_jump(erlang.neg, rng, 200_000)
    n = len(ys)
    assert ys.mean() == pytest.approx(1.0, abs=4.0 * np.sqrt(0.5 / n))
    assert ys.var() == pytest.approx(0.5, abs=0.02)


def test_hyperexponential_sampler(hyperexp_cp):
    # plus side is 0.6 Exp(2) + 0.4 Exp(4) in mixture form
    rng = np.random.default_rng(7)
    ys = sample_jump(hyperexp_cp.pos, rng, 200_000)
    n = len(ys)
    assert ys.mean() == pytest.approx(0.4, abs=4.0 * ys.std() / np.sqrt(n))
    tail = 0.6 * np.exp(-1.0) + 0.4 * np.exp(-2.0)
    freq = float(np.mean(ys > 0.5))
    assert freq == pytest.approx(tail, abs=4.0 / np.sqrt(n))


def test_table_sampler_oscillating(complex_me):
    rng = np.random.default_rng(8)
    ys = sample_jump(complex_me.neg, rng, 200_000)
    mean = (3.0 + 4.0 * np.pi ** 2) / (1.0 + 4.0 * np.pi ** 2)
    assert ys.mean() == pytest.approx(mean, abs=0.005)
    # the density vanishes at integers; the table must not pile mass there
    near_one = float(np.mean(np.abs(ys - 1.0) < 0.01))
    assert near_one < 2e-3


def test_table_sampler_bounded(general_pos):
    rng = np.random.default_rng(9)
    ys = sample_jump(general_pos.pos, rng, 200_000)
    n = len(ys)
    assert float(ys.max()) <= 1.0 + 1e-9
    assert ys.mean() == pytest.approx(0.5, abs=4.0 / np.sqrt(12.0 * n))
    assert float(np.mean(ys <= 0.25)) == pytest.approx(
        0.25, abs=4.0 / np.sqrt(n))


# ------------------------------------------------------------------ #
# determinism and mechanics


def test_thread_count_does_not_change_bits(hyperexp_cp):
    req = FunctionalRequest(kind="sup_tail", x=0.7)
    a = simulate(hyperexp_cp, 1.0, req, SimConfig(paths=16_000, seed=21,
                                                  threads=1))
    b = simulate(hyperexp_cp, 1.0, req, SimConfig(paths=16_000, seed=21,
                                                  threads=3))
    assert a.estimate == b.estimate and a.se == b.se
    c = simulate(hyperexp_cp, 1.0, req, SimConfig(paths=16_000, seed=22))
    assert c.estimate != a.estimate


def test_result_metadata(golden):
    res = run(golden, 1.0, "sup_tail", x=1.0, paths=5_000, seed=1)
    assert res.paths == 5_000 and res.kind == "sup_tail"


def test_reference_walker(golden):
    rng = np.random.default_rng(3)
    mins = []
    for _ in range(2000):
        theta, times, values = simulate_killed_path(golden, 1.0, rng)
        assert theta > 0
        assert np.all(np.diff(times) >= 0)
        assert times[0] == 0.0 and values[0] == 0.0
        mins.append(min(values))
    freq = np.mean([m == 0.0 for m in mins])
    assert freq == pytest.approx(PHI_HAT, abs=0.05)


def test_reference_walker_needs_zero_sigma(hyperexp_bm):
    with pytest.raises(PreconditionError):
        simulate_killed_path(hyperexp_bm, 1.0, np.random.default_rng(0))


def test_request_validation(golden):
    with pytest.raises(PreconditionError):
        run(golden, 1.0, "bogus_kind")
    with pytest.raises(PreconditionError):
        run(golden, 0.0, "sup_tail", x=1.0)
    with pytest.raises(PreconditionError):
        simulate(golden, 1.0, FunctionalRequest(kind="sup_tail", x=1.0),
                 SimConfig(paths=1))
