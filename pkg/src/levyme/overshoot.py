"""First-passage overshoot laws over a positive level.

For a level x > 0 and kill rate s > 0, the pre-kill passage measure
E[e^{-s tau_x}; X_{tau_x} - x in dv] splits into a smooth-crossing atom at
v = 0 and a density in v > 0:

    atom       = A(s)/s * g_sup(x),
    density(v) = (1/s) [ integral_0^x K(v+y) g_sup(x-y) dy + K(v+x) p_sup ],

where g_sup / p_sup are the density and origin atom of the killed supremum,
A(s) is the creep coefficient of the minus factorization component, and the
kernel K depends on its argument u = v + y only:

    K(u) = p_minus pi(u) + integral_0^infty pi(u+t) D(t) dt,

with pi the positive jump-measure density and D(t) = q e^{-R t} e the killed
drawdown kernel from the minus component. Total mass balances against
P{sup > x}, which the law object records for certification.

Two kernel routes: a closed poly-exponential form when the positive side is
matrix-exponential (vectorized, ~1e-10 accurate), and a rearranged
adaptive-quadrature route for general positive sides: swapping integration
order turns the double integral into pi integrated against a precomputed
one-argument convolution

    H(w) = integral_0^{min(w,x)} D(w - y) g_sup(x - y) dy,

which is splined once, so kinks of pi are met only inside scipy's adaptive
quadrature.

As s -> 0 with negative mean the same structure holds with the primed
minus-side quantities and the overall-supremum law; `overshoot_limit` builds
that law (total mass P{sup_infty > x} < 1). There D(t) tends to a nonzero
constant, handled by an explicit far-tail term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from ._util import as_real
from .errors import PreconditionError
from .factorization import (ExtremumLaw, absolute_supremum, build_component,
                            limit_minus_quantities, supremum_law)
from .model import LevyModel, MEJumpSpec


@dataclass(eq=False)
class OvershootLaw:
    """Discounted (or limiting) law of the overshoot over a level."""

    level: float
    s: float | None            # None marks the s -> 0 limit law
    atom: float                # smooth-crossing mass at overshoot 0
    route: str
    _density: Callable = None
    total_mass: float = 0.0    # atom + integrated density (computed)
    expected_mass: float = 0.0 # P{killed supremum > level} (certificate)

    def density(self, v):
        """Overshoot density at v > 0, vectorized."""
        vv = np.asarray(v, dtype=float)
        if np.any(vv < 0):
            raise PreconditionError("overshoot density lives on v > 0")
        out = np.asarray(self._density(np.atleast_1d(vv).ravel()))
        return out.reshape(vv.shape) if np.ndim(v) else float(out[0])


def _pos_measure_density(model: LevyModel):
    """Vectorized positive jump-measure density."""
    spec = model.spec("+")
    if spec is None:
        return lambda u: np.zeros_like(np.asarray(u, dtype=float))
    if isinstance(spec, MEJumpSpec):
        lam = spec.intensity
        return lambda u: lam * np.asarray(spec.magnitude_density(u))

    def dens(u):
        uu = np.atleast_1d(np.asarray(u, dtype=float))
        vals = np.array([spec.jump_density(t) for t in uu])
        return vals.reshape(np.shape(u)) if np.ndim(u) else vals[0]

    return dens


def _closed_kernel(model: LevyModel, w: np.ndarray, gamma: np.ndarray,
                   p_minus: float):
    """K(u) in closed form for an ME positive side.

    pi(u+t) is a sum of terms lam A_j (u+t)^{j-1} e^{-c(u+t)} / (j-1)!; each
    integrates against gamma_i e^{-w_i t} to a finite binomial sum, leaving
    polynomials in u times decaying exponentials.
    """
    spec = model.spec("+")
    lam = spec.intensity
    pi = _pos_measure_density(model)

    terms = []  # (decay c, power of u, complex coefficient)
    for c, coeffs in spec._clusters:
        for j, a_j in enumerate(coeffs, start=1):
            pref = lam * a_j / math.factorial(j - 1)
            for wi, gi in zip(w, gamma):
                for t in range(j):
                    coef = (pref * gi * math.comb(j - 1, t)
                            * math.factorial(t) / (c + wi) ** (t + 1))
                    terms.append((c, j - 1 - t, coef))

    def kernel(u):
        uu = np.asarray(u, dtype=float)
        acc = np.zeros(uu.shape, dtype=complex)
        for c, k, coef in terms:
            acc += coef * uu ** k * np.exp(-c * uu)
        vals = as_real(acc, "overshoot kernel", tol=1e-7)
        return vals + p_minus * pi(uu)

    return kernel


def _gl_nodes(a: float, b: float, n_panels: int, order: int):
    edges = np.linspace(a, b, n_panels + 1)
    gx, gw = np.polynomial.legendre.leggauss(order)
    nodes = np.concatenate([0.5 * (e1 - e0) * gx + 0.5 * (e0 + e1)
                            for e0, e1 in zip(edges[:-1], edges[1:])])
    weights = np.concatenate([0.5 * (e1 - e0) * gw
                              for e0, e1 in zip(edges[:-1], edges[1:])])
    return nodes, weights


def _build_law(model: LevyModel, x: float, s: float | None,
               sup_law: ExtremumLaw, p_minus: float, creep_coef: float,
               drawdown: Callable, wgamma: tuple | None, decay: float,
               route: str) -> OvershootLaw:
    if x <= 0:
        raise PreconditionError("the passage level must be positive")
    divisor = s if s is not None else 1.0
    spec = model.spec("+")

    atom = 0.0
    if creep_coef != 0.0:
        atom = creep_coef / divisor * float(sup_law.density(x))

    if spec is None:
        # spectrally negative: crossing happens by creeping only
        zero = lambda vv: np.zeros_like(np.asarray(vv, dtype=float))
        law = OvershootLaw(level=x, s=s, atom=atom, route="closed_form",
                           _density=zero)
        law.total_mass = atom
        law.expected_mass = float(sup_law.tail(x))
        return law

    use_closed = (route in ("auto", "closed_form")
                  and isinstance(spec, MEJumpSpec) and spec.polyexp_ok
                  and wgamma is not None)
    if route == "closed_form" and not use_closed:
        raise PreconditionError("closed-form kernel needs an ME positive "
                                "side and a diagonalizable minus component")

    p_sup = sup_law.atom
    pi = _pos_measure_density(model)

    support = None        # density support bound, when finite
    if use_closed:
        w, gamma = wgamma
        kern = _closed_kernel(model, w, gamma, p_minus)
        nodes, weights = _gl_nodes(0.0, x, 12, 16)
        g_nodes = np.asarray(sup_law.density(x - nodes), dtype=float)

        def density(vv):
            vv = np.atleast_1d(np.asarray(vv, dtype=float))
            inner = kern(vv[:, None] + nodes[None, :]) @ (weights * g_nodes)
            return (inner + kern(vv + x) * p_sup) / divisor

        route_used = "closed_form"
    else:
        density, support = _swapped_density(model, x, sup_law, drawdown,
                                            p_minus, p_sup, pi, decay,
                                            divisor)
        route_used = "quadrature"

    law = OvershootLaw(level=x, s=s, atom=atom, route=route_used,
                       _density=lambda vv: density(np.asarray(vv, float)))
    point = lambda v: float(density(np.array([v]))[0])
    if support is None:
        tail_mass, _ = quad(point, 0.0, np.inf, limit=400,
                            epsabs=1e-10, epsrel=1e-9)
    else:
        # integrand kinks where the sliding window hits the support edge
        pts = [p for p in (support - x,) if 0.0 < p < support]
        tail_mass, _ = quad(point, 0.0, support, points=pts or None,
                            limit=400, epsabs=1e-10, epsrel=1e-9)
    law.total_mass = atom + tail_mass
    law.expected_mass = float(sup_law.tail(x))
    return law


def _swapped_density(model, x, sup_law, drawdown, p_minus, p_sup, pi,
                     decay, divisor):
    """Overshoot density with the kernel integral swapped to run over pi.

    density(v) = (1/s) [ p_minus I1(v) + I2(v) + p_minus p_sup pi(v+x) ],
    I1(v) = integral_0^x pi(v+y) g(x-y) dy,
    I2(v) = integral_v^inf pi(t) Mtil(t-v) dt,
    Mtil(w) = H(w) + p_sup D(w-x) 1{w > x},
    H(w)   = integral_0^{min(w,x)} D(w-y) g(x-y) dy.
    """
    # supremum density spline on (0, x]; geometric refinement near 0 where
    # the density can rise steeply toward the creep coefficient
    g_grid = np.concatenate([
        np.geomspace(x * 1e-6, x / 40.0, 140, endpoint=False),
        np.linspace(x / 40.0, x, 380),
    ])
    g_vals = np.array([float(sup_law.density(t)) for t in g_grid])
    g_sp = CubicSpline(g_grid, g_vals)

    horizon = 40.0 / max(decay, 1e-12)
    # D tends to a constant for the limit law; capture it exactly
    d_inf = float(drawdown(np.array([1e8]))[0])
    cdf_mid = max(1.0 - float(sup_law.tail(x)) - p_sup, 0.0)

    # cap the far integral at the jump measure's own support radius, else a
    # compactly supported pi hides between the initial quadrature nodes
    lam_pos = model.intensity("+")
    t_pi = max(x, 1.0)
    while model.measure_tail("+", t_pi) > 1e-16 * lam_pos and t_pi < 1e7:
        t_pi *= 2.0
    # shrink to the edge itself so the window caps fall exactly on the
    # support kink instead of leaving it inside a quadrature interval
    lo_e, hi_e = 0.0, t_pi
    for _ in range(80):
        mid = 0.5 * (lo_e + hi_e)
        if model.measure_tail("+", mid) > 1e-16 * lam_pos:
            lo_e = mid
        else:
            hi_e = mid
    t_pi = hi_e

    def h_of(w_arr):
        out = np.empty(len(w_arr))
        for i, w in enumerate(w_arr):
            hi = min(w, x)
            if hi <= 0:
                out[i] = 0.0
                continue
            ny, wy = _gl_nodes(0.0, hi, 12, 16)
            out[i] = float(np.asarray(drawdown(w - ny)) @ (wy * g_sp(x - ny)))
        return out

    w_lo = np.linspace(0.0, x, 320)
    h_lo = h_of(w_lo)
    sp_lo = CubicSpline(w_lo, h_lo)
    w_hi = x + np.linspace(0.0, horizon, 640)
    mtil_hi = h_of(w_hi) + p_sup * np.asarray(drawdown(w_hi - x))
    sp_hi = CubicSpline(w_hi, mtil_hi)
    mtil_inf = d_inf * (cdf_mid + p_sup)

    def density(vv):
        vv = np.atleast_1d(np.asarray(vv, dtype=float))
        out = np.empty(vv.shape)
        for idx, v in enumerate(vv.ravel()):
            # every t >= t_pi has pi(t) = 0; keep quad off the dead zone
            # fixed panels: the windows are capped at the support edge, so
            # each integrand is smooth and adaptive refinement buys nothing
            i1 = 0.0
            hi1 = min(x, t_pi - v)
            if hi1 > 0:
                ny, wy = _gl_nodes(0.0, hi1, 10, 16)
                i1 = float((np.asarray(pi(v + ny)) * g_sp(x - ny)) @ wy)
            i2a = 0.0
            up_a = min(v + x, t_pi)
            if up_a > v:
                nt, wt = _gl_nodes(v, up_a, 10, 16)
                i2a = float((np.asarray(pi(nt)) * sp_lo(nt - v)) @ wt)
            upper = min(v + x + horizon, t_pi)
            i2b = 0.0
            if upper > v + x:
                nt, wt = _gl_nodes(v + x, upper, 12, 16)
                i2b = float((np.asarray(pi(nt)) * sp_hi(nt - v)) @ wt)
            i2c = 0.0
            if abs(mtil_inf) > 0:
                i2c = mtil_inf * model.measure_tail("+", upper)
            val = p_minus * i1 + i2a + i2b + i2c \
                + p_minus * p_sup * float(pi(v + x))
            out.ravel()[idx] = val / divisor
        return out

    return density, t_pi


def discounted_overshoot(model: LevyModel, s: float, x: float,
                         route: str = "auto") -> OvershootLaw:
    """Discounted overshoot law over level x at kill rate s > 0.

    atom = E[e^{-s tau}; creep over x]; density(v) dv = E[e^{-s tau};
    overshoot in dv]; total mass = P{killed supremum > x}.
    """
    if s <= 0:
        raise PreconditionError("s must be positive; see overshoot_limit")
    if route not in ("auto", "closed_form", "quadrature"):
        raise PreconditionError(f"unknown route {route!r}")
    comp = build_component(model, s, "-")
    sup = supremum_law(model, s)
    w, gamma = comp._eigen()
    wgamma = (w, gamma) if gamma is not None else None
    drawdown = lambda t: np.asarray(comp.exp_kernel(-np.asarray(t, float)))
    decay = float(np.min(comp.roots.real))
    return _build_law(model, x, s, sup, comp.p, comp.creep, drawdown,
                      wgamma, decay, route)


def overshoot_limit(model: LevyModel, x: float,
                    route: str = "auto") -> OvershootLaw:
    """Limiting overshoot law P{X_tau - x in dv, tau < infinity} as the kill
    rate vanishes; requires mean < 0 (total mass P{sup_infty > x})."""
    if route not in ("auto", "closed_form", "quadrature"):
        raise PreconditionError(f"unknown route {route!r}")
    mu = model.mean
    if mu is None or mu >= 0:
        raise PreconditionError("the limiting overshoot law needs mean < 0")
    lm = limit_minus_quantities(model)
    sup = absolute_supremum(model)
    w, V = lm._eigen()
    coef = (lm.q_prime.astype(complex) @ V) * np.linalg.solve(
        V, lm.e_vec.astype(complex))
    drawdown = lambda t: np.asarray(lm.kernel(-np.asarray(t, float),
                                              lm.e_vec))
    nonzero = lm.roots.real[lm.roots.real > 1e-12]
    decay = float(np.min(nonzero)) if len(nonzero) else 1.0
    return _build_law(model, x, None, sup, lm.p_prime, lm.creep_prime,
                      drawdown, (w, coef), decay, route)


def triple_law_density(model: LevyModel, s: float, x: float, y: float,
                       z: float, v: float) -> float:
    """Joint discounted density of (supremum deficit, drawdown at the
    crossing jump, overshoot) for first passage over x.

    The value is (1/s) g_sup(x - y) D(z - y) pi(v + z) on the wedge
    0 <= y <= min(x, z), z > 0, v > 0, and 0 elsewhere; the creep atom and
    the supremum origin atom are separate singular components.
    """
    if s <= 0:
        raise PreconditionError("s must be positive")
    if x <= 0:
        raise PreconditionError("the passage level must be positive")
    if y < 0 or z <= 0 or v <= 0 or y > min(x, z):
        return 0.0
    comp = build_component(model, s, "-")
    sup = supremum_law(model, s)
    if y >= x and sup.kind != "me":
        raise PreconditionError("the y = x slice carries the supremum atom; "
                                "the joint density is not defined there")
    g = float(sup.density(x - y))
    dd = float(comp.exp_kernel(min(y - z, 0.0)))
    pi_vz = model.jump_measure_density(v + z)
    return g * dd * pi_vz / s
