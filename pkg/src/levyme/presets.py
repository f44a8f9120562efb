"""Ready-made example models used by the tests, docs and shipped configs.

Every preset returns a fresh, validated LevyModel. All but `general_pos`
can also be expressed as JSON config files (see the configs/ directory);
`general_pos` carries a callable transform for its positive side and is
only reachable through this module.
"""
from __future__ import annotations

import math

import numpy as np

from .model import GeneralJumpSpec, LevyModel, build_me_jump


def _uniform_tail_transform(r):
    """Tail transform of Uniform(0,1) magnitudes: (e^r - 1 - r) / r^2."""
    r = complex(r)
    if abs(r) < 1e-6:
        return 0.5 + r / 6.0 + r * r / 24.0
    return (np.exp(r) - 1.0 - r) / (r * r)


def _bm() -> LevyModel:
    """Brownian motion with downward drift, no jumps."""
    return LevyModel(drift=-0.3, sigma=1.0)


def _spectral_neg_exp() -> LevyModel:
    """Unit drift up, rate-1 exponential jumps down; mean exactly 0."""
    return LevyModel(drift=1.0, sigma=0.0,
                     neg=build_me_jump("-", 1.0, [1.0], [1.0]))


def _spectral_neg_exp_heavy() -> LevyModel:
    """Unit drift up, twice the exponential jump intensity; mean -1."""
    return LevyModel(drift=1.0, sigma=0.0,
                     neg=build_me_jump("-", 2.0, [1.0], [1.0]))


def _spectral_neg_erlang() -> LevyModel:
    """Drift up, Erlang(2) jumps down with rate 2 per stage; mean -0.5."""
    return LevyModel(drift=0.5, sigma=0.0,
                     neg=build_me_jump("-", 1.0, [4.0], [4.0, 4.0]))


def _hyperexp_cp() -> LevyModel:
    """Bilateral hyperexponential compound Poisson with drift, sigma = 0.

    Negative magnitudes mix Exp(1) and Exp(3), positive ones Exp(2) and
    Exp(4); overall mean is about -0.217, so the limit laws exist.
    """
    return LevyModel(drift=0.25, sigma=0.0,
                     neg=build_me_jump("-", 1.0, [3.0, 2.0], [3.0, 4.0]),
                     pos=build_me_jump("+", 0.5, [8.0, 2.8], [8.0, 6.0]))


def _hyperexp_bm() -> LevyModel:
    """The bilateral hyperexponential model with a Brownian part added."""
    return LevyModel(drift=0.25, sigma=0.5,
                     neg=build_me_jump("-", 1.0, [3.0, 2.0], [3.0, 4.0]),
                     pos=build_me_jump("+", 0.5, [8.0, 2.8], [8.0, 6.0]))


def _complex_me() -> LevyModel:
    """Negative ME jumps with complex rates -1 +/- 2*pi*i.

    The magnitude density is (1 - cos(2 pi y)) e^{-y} up to normalization:
    a genuine matrix-exponential law that is not phase-type.
    """
    c = 1.0 + 4.0 * math.pi ** 2
    return LevyModel(drift=1.0, sigma=0.0,
                     neg=build_me_jump("-", 1.0, [c],
                                       [c, 3.0 + 4.0 * math.pi ** 2, 3.0]))


def _general_pos() -> LevyModel:
    """Exponential jumps down, Uniform(0,1) jumps up given by a transform."""
    pos = GeneralJumpSpec(side="+", intensity=1.0,
                          tail=lambda y: 1.0 - y if 0.0 <= y < 1.0 else 0.0,
                          transform=_uniform_tail_transform,
                          abscissa=math.inf, mean_jump=0.5)
    return LevyModel(drift=0.2, sigma=0.0,
                     neg=build_me_jump("-", 2.0, [1.0], [1.0]), pos=pos)


_BUILDERS = {
    "bm": _bm,
    "spectral_neg_exp": _spectral_neg_exp,
    "spectral_neg_exp_heavy": _spectral_neg_exp_heavy,
    "spectral_neg_erlang": _spectral_neg_erlang,
    "hyperexp_cp": _hyperexp_cp,
    "hyperexp_bm": _hyperexp_bm,
    "complex_me": _complex_me,
    "general_pos": _general_pos,
}

PRESET_NAMES = tuple(sorted(_BUILDERS))


def preset(name: str) -> LevyModel:
    """Build the named example model; KeyError lists valid names."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from "
                       f"{', '.join(PRESET_NAMES)}") from None
    return builder()
