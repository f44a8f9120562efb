"""Shared fixtures and independent reference helpers.

Reference values in these tests are derived from closed-form solutions of
low-degree models (quadratic root formulas, pure-exponential laws) or from
quadrature over raw model ingredients, never from the code paths they
check.
"""
import numpy as np
import numpy.polynomial.polynomial as npoly
import pytest

from levyme import preset
from levyme.cli import main as cli_main


@pytest.fixture(scope="session")
def golden():
    """Drift +1, Exp(1) downward jumps at rate 1: every fluctuation law is
    an explicit function of the golden ratio."""
    return preset("spectral_neg_exp")


@pytest.fixture(scope="session")
def heavy():
    """Drift +1, Exp(1) downward jumps at rate 2: mean -1, so the overall
    supremum is a proper Exp(1) variable."""
    return preset("spectral_neg_exp_heavy")


@pytest.fixture(scope="session")
def erlang():
    return preset("spectral_neg_erlang")


@pytest.fixture(scope="session")
def hyperexp_cp():
    return preset("hyperexp_cp")


@pytest.fixture(scope="session")
def hyperexp_bm():
    return preset("hyperexp_bm")


@pytest.fixture(scope="session")
def complex_me():
    return preset("complex_me")


@pytest.fixture(scope="session")
def general_pos():
    return preset("general_pos")


@pytest.fixture(scope="session")
def bm():
    return preset("bm")


def rational_cumulant(model, r):
    """Levy exponent rebuilt from raw coefficients, valid at any complex r
    off the transform poles.

    Rational jump transforms are evaluated as polynomial ratios, which
    analytically continues them past the convergence strip; that is exactly
    what certifying a root outside the strip requires. General (callable)
    sides contribute sign * r * tail_transform(r) by parts.
    """
    r = complex(r)
    val = model.drift * r + 0.5 * model.sigma ** 2 * r * r
    for side, sign in (("-", -1.0), ("+", 1.0)):
        spec = model.spec(side)
        if spec is None:
            continue
        if hasattr(spec, "den"):
            # magnitude transform: the jump MGF evaluates it at -r on the
            # positive side and +r on the negative side
            arg = -sign * r
            num = npoly.polyval(arg, spec.num)
            den = npoly.polyval(arg, np.append(spec.den, 1.0))
            val += spec.intensity * (num / den - 1.0)
        else:
            # tail transform: integration by parts of the jump MGF
            val += sign * r * spec.transform(r)
    return val


def signed_root(side, root):
    """Roots are stored with positive real part; the cumulant argument is
    the signed location."""
    return -root if side == "-" else root


def run_cli(argv, capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# golden-model root formulas: k(r) = r^2 / (1 + r), so k(-r) = s and
# k(r) = s reduce to quadratics in r with the discriminant s^2 + 4s
def golden_minus_root(s):
    return (-s + np.sqrt(s * s + 4.0 * s)) / 2.0


def golden_plus_root(s):
    return (s + np.sqrt(s * s + 4.0 * s)) / 2.0
