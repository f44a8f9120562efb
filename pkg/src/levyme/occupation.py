"""Occupation-time transforms: E exp(-u * time spent above a level).

Let A_x be the Lebesgue time the path spends above level x before an
independent Exp(s) kill time. The double transform D_x(s, u) = E e^{-u A_x}
is rational in the Wiener-Hopf data at rates s and s + u and evaluates in
closed form on whichever side of the axis carries ME jumps:

    x <= 0:  D_x = s/(s+u) [1 - (P-(s+u)/P-(s))
                             (rho-(s) - rho-(s+u))^T R-(s+u)^{-1} e^{R-(s+u)x} e]
    x >= 0:  D_x = 1 + (P+(s)/P+(s+u))
                             (rho+(s+u) - rho+(s))^T R+(s)^{-1} e^{R+(s)x} e
    x  = 0:  D_0 = s/(s+u) P-(s+u)/P-(s) = P+(s)/P+(s+u)

where rho(s) is the ascending symmetric-function vector of the half-plane
roots at rate s, P(s) their product, and R(s) the companion matrix of the
corresponding factorization component. Both displays exclude the zero-drift
pure-jump case (sigma = 0, drift = 0), where the path sits at points and the
time above an open half-line is not exchangeable with its closure.

For a positive level there is also a first-passage route: split at the
passage time T over x; the time above x is zero if the kill happens first
and restarts from the overshoot otherwise,

    D_x(s,u) = P{kill < T} + atom_T D_0(s,u)
               + integral dens_T(v) D_{-v}(s,u) dv,

which stays available when the positive side is not ME (and serves as an
independent cross-check when it is).

As s -> 0 with negative mean the transforms of the total time above x
survive; the vanished distinguished root turns the prefactor into
|mean| / u times a ratio of root products.

When all roots involved are real and simple the matrix displays collapse to
scalar partial-fraction sums (hyperexponential style); `hyperexp_occupation`
evaluates those by Lagrange products, an arithmetic path disjoint from the
companion-resolvent route.

The ladder-time/ladder-height exponent at bivariate argument (s, r) with
0 < s < 1 follows from D_0(s, 1 - s) divided by the supremum MGF at -r.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import quad
from scipy.linalg import expm

from ._util import as_real, polyval_asc
from .errors import PreconditionError
from .factorization import (FactorizationComponent, _component_from_roots,
                            build_component, infimum_law,
                            limit_minus_quantities, supremum_law)
from .model import LevyModel
from .overshoot import discounted_overshoot, overshoot_limit
from .roots import limiting_roots, solve_roots


def _require_time_split(model: LevyModel) -> None:
    if model.sigma == 0.0 and model.drift == 0.0:
        raise PreconditionError(
            "occupation transforms need sigma > 0 or a nonzero drift; with "
            "neither, the path sits at points and the half-line occupation "
            "time is boundary-sensitive"
        )


def _exp_dot(comp: FactorizationComponent, vec: np.ndarray, xs):
    """vec^T e^{R x} e for the component's companion matrix, vectorized.

    Spectral route through the Vandermonde eigenbasis; expm fallback when
    the roots cluster.
    """
    vec = np.asarray(vec, dtype=complex)
    if not comp.near_multiple:
        V = np.vander(-comp.roots, N=comp.dim, increasing=True).T
        w = -comp.roots if comp.side == "+" else comp.roots
        try:
            coef = (vec @ V) * np.linalg.solve(V, comp.e_vec.astype(complex))
            xv = np.asarray(xs, dtype=float)
            vals = coef @ np.exp(np.outer(w, xv.ravel()))
            vals = as_real(vals, "occupation kernel")
            return vals.reshape(xv.shape)
        except np.linalg.LinAlgError:
            pass
    xv = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.array([float(as_real(vec @ expm(comp.R * t) @ comp.e_vec,
                                  "occupation kernel")) for t in xv])
    return out.reshape(np.shape(xs)) if np.ndim(xs) else out[0]


def _root_product(roots: np.ndarray) -> float:
    if len(roots) == 0:
        return 1.0
    return float(as_real(np.prod(roots), "root product"))


# ------------------------------------------------------------------ #
# killed transforms (s > 0)


def _minus_profile(model: LevyModel, s: float, u: float):
    """D_x(s, u) on x <= 0 as a vectorized callable (minus display)."""
    comp_s = build_component(model, s, "-")
    comp_su = build_component(model, s + u, "-")
    ratio = comp_su.rho_vec[0] / comp_s.rho_vec[0]
    m = (comp_s.rho_vec - comp_su.rho_vec) @ np.linalg.inv(comp_su.R)
    pref = s / (s + u)

    def profile(xs):
        return pref * (1.0 - ratio * _exp_dot(comp_su, m, xs))

    return profile


def _plus_profile(model: LevyModel, s: float, u: float):
    """D_x(s, u) on x >= 0 as a vectorized callable (plus display)."""
    comp_s = build_component(model, s, "+")
    comp_su = build_component(model, s + u, "+")
    ratio = comp_s.rho_vec[0] / comp_su.rho_vec[0]
    m = (comp_su.rho_vec - comp_s.rho_vec) @ np.linalg.inv(comp_s.R)

    def profile(xs):
        return 1.0 + ratio * _exp_dot(comp_s, m, xs)

    return profile


def occupation_zero(model: LevyModel, s: float, u: float) -> float:
    """D_0(s, u): double transform of the time spent positive."""
    _require_time_split(model)
    if s <= 0:
        raise PreconditionError("s must be positive; see occupation_limit")
    if u < 0:
        raise PreconditionError("u must be nonnegative")
    if u == 0:
        return 1.0
    if model.side_is_me("-"):
        p_s = _root_product(solve_roots(model, s, "-").roots)
        p_su = _root_product(solve_roots(model, s + u, "-").roots)
        return s / (s + u) * p_su / p_s
    p_s = _root_product(solve_roots(model, s, "+").roots)
    p_su = _root_product(solve_roots(model, s + u, "+").roots)
    return p_s / p_su


def _passage_value(model: LevyModel, s: float, u: float, x: float) -> float:
    ov = discounted_overshoot(model, s, x)
    prof = _minus_profile(model, s, u)
    d0 = occupation_zero(model, s, u)
    val = (1.0 - ov.expected_mass) + ov.atom * d0
    tail_part, _ = quad(lambda v: float(ov.density(v)) * float(prof(-v)),
                        0.0, np.inf, limit=200)
    return val + tail_part


def occupation_mgf(model: LevyModel, s: float, u: float, x: float,
                   route: str = "auto") -> float:
    """E e^{-u A_x} with A_x the time above x before an Exp(s) kill.

    route 'closed_form' forces the side display for the sign of x,
    'passage' forces the first-passage decomposition (x > 0 only).
    """
    if route not in ("auto", "closed_form", "passage"):
        raise PreconditionError(f"unknown route {route!r}")
    _require_time_split(model)
    if s <= 0:
        raise PreconditionError("s must be positive; see occupation_limit")
    if u < 0:
        raise PreconditionError("u must be nonnegative")
    if u == 0:
        return 1.0
    if x == 0:
        return occupation_zero(model, s, u)
    if x < 0:
        if route == "passage":
            raise PreconditionError("the passage route handles x > 0")
        if not model.side_is_me("-"):
            raise PreconditionError("the x < 0 display needs an ME "
                                    "negative side")
        return float(_minus_profile(model, s, u)(x))
    if route == "closed_form" and not model.side_is_me("+"):
        raise PreconditionError("the x > 0 display needs an ME positive side")
    if route in ("auto", "closed_form") and model.side_is_me("+"):
        return float(_plus_profile(model, s, u)(x))
    if not model.side_is_me("-"):
        raise PreconditionError("the passage route needs an ME negative side")
    return _passage_value(model, s, u, x)


def occupation_profile(model: LevyModel, s: float, u: float, xs) -> np.ndarray:
    """occupation_mgf over a grid of levels, sharing the root solves."""
    _require_time_split(model)
    if s <= 0 or u < 0:
        raise PreconditionError("need s > 0 and u >= 0")
    xv = np.asarray(xs, dtype=float)
    out = np.empty(xv.shape)
    if u == 0:
        out.fill(1.0)
        return out
    neg = xv < 0
    pos = xv > 0
    if np.any(neg):
        if not model.side_is_me("-"):
            raise PreconditionError("the x < 0 display needs an ME "
                                    "negative side")
        out[neg] = _minus_profile(model, s, u)(xv[neg])
    if np.any(pos):
        if model.side_is_me("+"):
            out[pos] = _plus_profile(model, s, u)(xv[pos])
        else:
            out[pos] = [_passage_value(model, s, u, x) for x in xv[pos]]
    if np.any(xv == 0):
        out[xv == 0] = occupation_zero(model, s, u)
    return out


# ------------------------------------------------------------------ #
# s -> 0 limits (negative mean: total time above x is finite)


def _limit_minus_profile(model: LevyModel, u: float):
    """D_x(0, u) on x <= 0; the vanished root leaves a |mean|/u prefactor."""
    lm = limit_minus_quantities(model)
    comp_u = build_component(model, u, "-")
    p2 = _root_product(lm.roots)
    pref = -(abs(model.mean) / u) * comp_u.rho_vec[0] / p2
    m = (lm.rho0_vec - comp_u.rho_vec) @ np.linalg.inv(comp_u.R)

    def profile(xs):
        return pref * _exp_dot(comp_u, m, xs)

    return profile


def _limit_zero(model: LevyModel, u: float) -> float:
    if model.side_is_me("-"):
        lm = limit_minus_quantities(model)
        p_u = _root_product(solve_roots(model, u, "-").roots)
        return abs(model.mean) / u * p_u / _root_product(lm.roots)
    p0 = _root_product(limiting_roots(model, "+").roots)
    p_u = _root_product(solve_roots(model, u, "+").roots)
    return p0 / p_u


def _limit_plus_profile(model: LevyModel, u: float):
    """D_x(0, u) on x >= 0 by the s -> 0 plus display (ME positive side)."""
    lim = limiting_roots(model, "+")
    comp0 = _component_from_roots(model, "+", lim.roots, 0.0,
                                  near_multiple=False)
    comp_u = build_component(model, u, "+")
    ratio = comp0.rho_vec[0] / comp_u.rho_vec[0]
    m = (comp_u.rho_vec - comp0.rho_vec) @ np.linalg.inv(comp0.R)

    def profile(xs):
        return 1.0 + ratio * _exp_dot(comp0, m, xs)

    return profile


def occupation_limit(model: LevyModel, u: float, x: float,
                     route: str = "auto") -> float:
    """E e^{-u A_x} for the total (unkilled) time A_x spent above x.

    Finite only for negative mean; for positive mean the time above any
    level is infinite and the transform is 0. The zero-mean boundary has no
    limiting root data and is rejected.
    """
    if route not in ("auto", "closed_form", "passage"):
        raise PreconditionError(f"unknown route {route!r}")
    _require_time_split(model)
    if u < 0:
        raise PreconditionError("u must be nonnegative")
    if u == 0:
        return 1.0
    mu = model.mean
    if mu is None:
        raise PreconditionError("the model mean is not available")
    if mu > 0:
        return 0.0
    if mu == 0:
        raise PreconditionError("the zero-mean boundary has no limiting "
                                "occupation transform")
    if x == 0:
        return _limit_zero(model, u)
    if x < 0:
        if route == "passage":
            raise PreconditionError("the passage route handles x > 0")
        if not model.side_is_me("-"):
            raise PreconditionError("the x < 0 display needs an ME "
                                    "negative side")
        return float(_limit_minus_profile(model, u)(x))
    if route == "closed_form" and not model.side_is_me("+"):
        raise PreconditionError("the x > 0 display needs an ME positive side")
    if route in ("auto", "closed_form") and model.side_is_me("+"):
        return float(_limit_plus_profile(model, u)(x))
    if not model.side_is_me("-"):
        raise PreconditionError("the passage route needs an ME negative side")
    ov = overshoot_limit(model, x)
    prof = _limit_minus_profile(model, u)
    val = (1.0 - ov.expected_mass) + ov.atom * _limit_zero(model, u)
    tail_part, _ = quad(lambda v: float(ov.density(v)) * float(prof(-v)),
                        0.0, np.inf, limit=200)
    return val + tail_part


# ------------------------------------------------------------------ #
# partial-fraction (hyperexponential) forms


def _simple_real_roots(model: LevyModel, s: float, side: str) -> np.ndarray:
    rs = solve_roots(model, s, side)
    roots = rs.roots
    scale = np.max(np.abs(roots)) + 1e-300
    if np.max(np.abs(roots.imag)) > 1e-9 * scale:
        raise PreconditionError("the partial-fraction route needs real roots")
    real = np.sort(roots.real)
    if len(real) > 1 and np.min(np.diff(real)) <= 1e-7 * scale:
        raise PreconditionError("the partial-fraction route needs simple "
                                "roots")
    return real


def hyperexp_occupation(model: LevyModel, s: float, u: float,
                        x: float) -> float:
    """Occupation transform by scalar partial fractions (real simple roots).

    Evaluates the same D_x(s, u) as `occupation_mgf` but through Lagrange
    root products instead of companion-matrix resolvents; the classical
    hyperexponential displays are the special case of distinct real rates.
    """
    _require_time_split(model)
    if s <= 0:
        raise PreconditionError("s must be positive")
    if u < 0:
        raise PreconditionError("u must be nonnegative")
    if u == 0:
        return 1.0
    if x <= 0:
        if not model.side_is_me("-"):
            raise PreconditionError("the x <= 0 display needs an ME "
                                    "negative side")
        r_s = _simple_real_roots(model, s, "-")
        r_su = _simple_real_roots(model, s + u, "-")
        if x == 0:
            return s / (s + u) * np.prod(r_su) / np.prod(r_s)
        total = 0.0
        for i, ri in enumerate(r_su):
            num = np.prod(r_s - ri)
            den = ri * np.prod(np.delete(r_su, i) - ri)
            total += num / den * np.exp(ri * x)
        return s / (s + u) * (1.0 - np.prod(r_su) / np.prod(r_s) * total)
    if not model.side_is_me("+"):
        raise PreconditionError("the x > 0 display needs an ME positive side")
    r_s = _simple_real_roots(model, s, "+")
    r_su = _simple_real_roots(model, s + u, "+")
    total = 0.0
    for i, ri in enumerate(r_s):
        num = np.prod(r_su - ri)
        den = -ri * np.prod(np.delete(r_s, i) - ri)
        total += num / den * np.exp(-ri * x)
    return 1.0 + np.prod(r_s) / np.prod(r_su) * total


# ------------------------------------------------------------------ #
# ladder exponent


def ladder_exponent(model: LevyModel, s: float, r: float,
                    route: str = "generic") -> float:
    """Bivariate ascending-ladder exponent at (s, r), 0 < s < 1, r >= 0.

    Normalized so the value at r = 0 is D_0(s, 1 - s). The generic route
    divides by the supremum MGF; the closed form expands that MGF as a
    polynomial ratio in the plus-side data.
    """
    if route not in ("generic", "closed_form"):
        raise PreconditionError(f"unknown route {route!r}")
    _require_time_split(model)
    if not 0 < s < 1:
        raise PreconditionError("the ladder argument needs 0 < s < 1")
    if r < 0:
        raise PreconditionError("r must be nonnegative")
    if route == "generic":
        d0 = occupation_zero(model, s, 1.0 - s)
        denom = complex(supremum_law(model, s).mgf(-r))
        return float(as_real(d0 / denom, "ladder exponent"))
    if not model.side_is_me("+"):
        raise PreconditionError("the closed form needs an ME positive side")
    if not model.side_is_me("-"):
        raise PreconditionError("the closed form needs an ME negative side")
    p_min_1 = _root_product(solve_roots(model, 1.0, "-").roots)
    p_min_s = _root_product(solve_roots(model, s, "-").roots)
    comp = build_component(model, s, "+")
    spec = model.spec("+")
    beta_d = spec.den[0] if spec is not None else 1.0
    root_poly = np.append(comp.rho_vec, 1.0)
    den_poly = np.append(spec.den if spec is not None else np.array([]), 1.0)
    val = (s * (p_min_1 / p_min_s) * (beta_d / comp.rho_vec[0])
           * polyval_asc(root_poly, r) / polyval_asc(den_poly, r))
    return float(as_real(val, "ladder exponent"))


# ------------------------------------------------------------------ #
# independent first-moment identity


def occupation_identity_residual(model: LevyModel, s: float,
                                 x: float) -> float:
    """Relative residual of E A_x = P{X_kill > x} / s.

    The left side comes from a one-sided second-order difference of the
    transform in u; the right side convolves the independent supremum and
    infimum laws at rate s. The two paths share no occupation-display code.
    """
    _require_time_split(model)
    if s <= 0:
        raise PreconditionError("s must be positive")
    h = 1e-4 * s
    d1 = occupation_mgf(model, s, h, x)
    d2 = occupation_mgf(model, s, 2 * h, x)
    m1_fd = (3.0 - 4.0 * d1 + d2) / (2.0 * h)

    sup = supremum_law(model, s)
    inf = infimum_law(model, s)

    def inf_exceeds(y: float) -> float:
        # P{infimum > y}; the infimum is never positive
        if y >= 0:
            return 0.0
        return 1.0 - float(inf.tail(y))

    p_above = sup.atom * inf_exceeds(x)
    lo = max(x, 0.0)
    part, _ = quad(lambda w: float(sup.density(w)) * inf_exceeds(x - w),
                   lo, np.inf, limit=200)
    m1_conv = (p_above + part) / s
    return abs(m1_fd - m1_conv) / max(abs(m1_conv), 1e-12)
