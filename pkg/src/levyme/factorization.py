"""Killed-extremum laws via the two-sided factorization of the killed
exponent.

For an exponential killing time with rate s > 0, the infimum of the killed
path on a matrix-exponential negative side is itself matrix-exponential:

    P{inf < x} = q e^{R x} e  (x < 0),   P{inf = 0} = p,

where R is the companion matrix built from the elementary symmetric
functions of the minus-side roots r_i^-(s), q is a closed-form row vector in
those symmetric functions and the jump-transform denominator coefficients,
and p is the origin atom (nonzero exactly in the step-wise regime). The
supremum mirrors this with plus-side roots. A "creep" coefficient A(s)
carries the smooth-crossing mass: sigma^2/2 * (product of roots over rates)
when sigma > 0, drift * p in the step-wise-toward-the-side regime, else 0.

When one jump side is general (non-ME), the killed extremum on that side is
recovered from the ME side through a one-line transform identity
(`opposite_mgf`), and its distribution function by Laplace inversion.

As s -> 0 with negative mean everything has a limit after dividing the
vanishing quantities by s; `limit_minus_quantities` and `absolute_supremum`
expose the limiting objects (overall-supremum law).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from ._util import (as_real, integrate_decaying_matrix, laplace_invert,
                    poly_from_roots_neg, polyval_asc)
from .errors import NumericsError, PreconditionError
from .model import LevyModel, MEJumpSpec
from .roots import RootSet, limiting_roots, solve_roots


@dataclass(eq=False)
class FactorizationComponent:
    """One side of the killed-extremum factorization at a fixed kill rate."""

    side: str
    s: float
    case: str
    roots: np.ndarray
    rho_vec: np.ndarray        # (rho_N, ..., rho_1): symmetric funcs of roots
    beta_ext: np.ndarray       # (beta_d, ..., beta_1, 1): from the jump den
    q: np.ndarray
    p: float
    creep: float
    R: np.ndarray
    near_multiple: bool = False
    _eig: tuple | None = field(default=None, repr=False)
    _den_full: np.ndarray = field(default=None, repr=False)
    _root_poly: np.ndarray = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.q)

    @property
    def e_vec(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e

    # -------------------------------------------------------------- #
    # exponential kernels

    def _eigen(self):
        """Cache (w, gamma) with q e^{Rx} e = sum gamma_j e^{w_j x}.

        The companion eigenvector for eigenvalue w is (1, z, z^2, ...) with
        z = -root on either side, so V is a Vandermonde matrix in -roots; the
        eigenvalues are +roots (minus side) or -roots (plus side).
        """
        if self._eig is None:
            sign = -1.0 if self.side == "+" else 1.0
            w = sign * self.roots
            if self.near_multiple:
                self._eig = (w, None)
            else:
                V = np.vander(-self.roots, N=self.dim, increasing=True).T
                try:
                    vinv_e = np.linalg.solve(V, self.e_vec.astype(complex))
                    gamma = (self.q.astype(complex) @ V) * vinv_e
                    self._eig = (w, gamma)
                except np.linalg.LinAlgError:
                    self._eig = (w, None)
        return self._eig

    def exp_kernel(self, x):
        """q e^{R x} e, vectorized over x (the extremum density off 0)."""
        w, gamma = self._eigen()
        if gamma is not None:
            xv = np.asarray(x, dtype=float)
            vals = np.sum(gamma[:, None] * np.exp(w[:, None] * xv.ravel()),
                          axis=0).reshape(xv.shape)
            return as_real(vals, "extremum density")
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([float(self.q @ expm(self.R * t) @ self.e_vec)
                        for t in xs])
        return out if np.ndim(x) else float(out[0])

    def exp_kernel_int(self, x):
        """q R^{-1} e^{R x} e, vectorized (antiderivative of exp_kernel)."""
        w, gamma = self._eigen()
        if gamma is not None:
            xv = np.asarray(x, dtype=float)
            vals = np.sum((gamma / w)[:, None] * np.exp(w[:, None] * xv.ravel()),
                          axis=0).reshape(xv.shape)
            return as_real(vals, "extremum cdf")
        r_inv = np.linalg.inv(self.R)
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.array([float(self.q @ r_inv @ expm(self.R * t) @ self.e_vec)
                        for t in xs])
        return out if np.ndim(x) else float(out[0])

    # -------------------------------------------------------------- #

    def mgf(self, r):
        """E e^{r extremum}: prefactor times a rational in r (product form)."""
        if r == 0:
            return 1.0 + 0.0j   # normalized by construction
        pref = self.rho_vec[0] / self.beta_ext[0]
        arg = -r if self.side == "+" else r
        num = polyval_asc(self._den_full, arg)
        den = polyval_asc(self._root_poly, arg)
        return pref * num / den

    def mgf_matrix(self, r):
        """E e^{r extremum} by the resolvent route p +- q (rI + R)^{-1} e."""
        mat = r * np.eye(self.dim) + self.R
        vec = np.linalg.solve(mat.astype(complex), self.e_vec.astype(complex))
        inner = self.q @ vec
        return self.p - inner if self.side == "+" else self.p + inner

    def resolvent_dot(self, r, vec):
        """q (rI + R)^{-1} vec for a given vector."""
        mat = r * np.eye(self.dim) + self.R
        sol = np.linalg.solve(mat.astype(complex), np.asarray(vec, dtype=complex))
        return self.q @ sol


def _companion(rho_vec: np.ndarray, side: str) -> np.ndarray:
    n = len(rho_vec)
    R = np.zeros((n, n))
    off = 1.0 if side == "+" else -1.0
    for i in range(n - 1):
        R[i, i + 1] = off
    R[n - 1, :] = -rho_vec if side == "+" else rho_vec
    return R


def _component_from_roots(model: LevyModel, side: str, roots: np.ndarray,
                          s: float, near_multiple: bool) -> FactorizationComponent:
    spec = model.spec(side)
    case = model.case(side)
    n = len(roots)
    if n == 0:
        raise PreconditionError(
            f"the {side!r} extremum is degenerate at 0 (no roots): step-wise "
            f"side with no jumps"
        )
    root_poly = poly_from_roots_neg(roots)
    rho_vec = as_real(root_poly[:n], "root symmetric functions")
    if isinstance(spec, MEJumpSpec):
        den = spec.den
        d = spec.degree
    else:
        den = np.array([])
        d = 0
    beta_ext = np.append(den, 1.0)
    beta_d = beta_ext[0]

    if case == "NS":
        if n != d + 1:
            raise NumericsError("root count does not match the side regime")
        q = (rho_vec[0] / beta_d) * beta_ext
        p = 0.0
    else:
        if n != d:
            raise NumericsError("root count does not match the side regime")
        q = (rho_vec[0] / beta_d) * (den - rho_vec)
        p = float(rho_vec[0] / beta_d)

    if model.sigma > 0:
        creep = 0.5 * model.sigma ** 2 * rho_vec[0] / beta_d
    else:
        # a p on the minus side, (-a) p on the plus side; p vanishes exactly
        # when the sign would come out negative, so no clamping is needed
        drift_factor = model.drift if side == "-" else -model.drift
        creep = drift_factor * p
    R = _companion(rho_vec, side)
    comp = FactorizationComponent(
        side=side, s=float(s), case=case, roots=roots, rho_vec=rho_vec,
        beta_ext=beta_ext, q=np.asarray(q, dtype=float), p=p, creep=creep,
        R=R, near_multiple=near_multiple,
    )
    comp._den_full = beta_ext
    comp._root_poly = root_poly
    return comp


def build_component(model: LevyModel, s: float, side: str,
                    roots: RootSet | None = None) -> FactorizationComponent:
    """Killed-extremum factorization component for one side, s > 0."""
    if not model.side_is_me(side):
        raise PreconditionError(
            f"side {side!r} must be matrix-exponential to carry a component"
        )
    rs = roots if roots is not None else solve_roots(model, s, side)
    return _component_from_roots(model, side, rs.roots, s, rs.near_multiple)


def matrix_tail_transform(model: LevyModel, comp: FactorizationComponent,
                          route: str = "auto") -> np.ndarray:
    """Opposite-side tail transform evaluated at the matrix argument -R.

    For the minus component this is integral_0^inf e^{-R x} tail_plus(x) dx;
    for the plus component the mirrored integral over the negative axis. Two
    routes: spectral (scalar transform at each eigenvalue of -R) and direct
    quadrature of the matrix-valued integrand.
    """
    opp = "+" if comp.side == "-" else "-"
    if model.spec(opp) is None:
        return np.zeros((comp.dim, comp.dim))
    if route not in ("auto", "eigen", "quadrature"):
        raise PreconditionError(f"unknown route {route!r}")
    use_eigen = route == "eigen" or (route == "auto" and not comp.near_multiple)
    sign = -1.0 if comp.side == "+" else 1.0
    # eigenvalues of R are sign * roots
    if use_eigen:
        w = sign * comp.roots
        base = w if comp.side == "+" else -w
        V = np.vander(base, N=comp.dim, increasing=True).T
        fvals = np.array([model.tail_transform(opp, -z) for z in w])
        M = V @ (fvals[:, None] * np.linalg.solve(V, np.eye(comp.dim,
                                                            dtype=complex)))
        return as_real(M, "matrix tail transform", tol=1e-8)

    decay = 0.9 * float(np.min(comp.roots.real))

    def integrand(t):
        # substitute so the integration runs over the positive axis
        x = t if comp.side == "-" else -t
        return expm(-comp.R * x) * model.measure_tail(opp, t)

    return integrate_decaying_matrix(integrand, decay_rate=decay)


def opposite_mgf(model: LevyModel, s: float, r, target: str = "+",
                 comp: FactorizationComponent | None = None) -> complex:
    """E e^{r extremum} on the side opposite to an ME side.

    target '+' (supremum) uses the minus component: the transform identity

        E e^{r sup} = ( 1 - (r/s) ( A(s) + E e^{r inf} T_plus(r)
                        - q (rI + R)^{-1} T_plus(-R) e ) )^{-1},

    with T_plus the positive jump-measure tail transform; target '-' is the
    mirror image with flipped signs.
    """
    if target not in ("+", "-"):
        raise PreconditionError("target must be '+' or '-'")
    me_side = "-" if target == "+" else "+"
    if not model.side_is_me(me_side):
        raise PreconditionError(
            f"opposite_mgf(target={target!r}) needs an ME {me_side!r} side"
        )
    if r == 0:
        return 1.0 + 0.0j
    if comp is None:
        comp = build_component(model, s, me_side)
    tails = model.tail_transform(target, r)
    M = matrix_tail_transform(model, comp)
    inner = comp.resolvent_dot(r, M @ comp.e_vec)
    bracket = comp.creep + comp.mgf(r) * tails
    if target == "+":
        denom = 1.0 - (r / s) * (bracket - inner)
    else:
        denom = 1.0 + (r / s) * (bracket + inner)
    return 1.0 / denom


# ------------------------------------------------------------------ #
# user-facing extremum laws


@dataclass(eq=False)
class ExtremumLaw:
    """Law of the killed supremum or infimum (or the overall extremum).

    kind 'me': exact matrix-exponential law carried by a factorization
    component; kind 'inversion': characterized by its MGF, distribution
    functions computed by Laplace inversion.
    """

    side: str
    s: float
    atom: float
    kind: str
    comp: FactorizationComponent | None = None
    _mgf: Callable | None = None

    def mgf(self, r):
        """E e^{r X_extremum}; r on the side's convergence half-plane."""
        if self.kind == "me":
            return self.comp.mgf(r)
        if r == 0:
            return 1.0 + 0.0j
        return self._mgf(r)

    def density(self, x):
        """Density of the absolutely continuous part at x (vectorized)."""
        xv = np.asarray(x, dtype=float)
        wrong = xv > 0 if self.side == "-" else xv < 0
        if np.any(wrong):
            raise PreconditionError(
                f"density of the {self.side!r} extremum lives on the "
                f"{'negative' if self.side == '-' else 'positive'} half-axis"
            )
        if self.kind == "me":
            return self.comp.exp_kernel(xv)
        sign = 1.0 if self.side == "+" else -1.0

        def dens_transform(qq):
            return self.mgf(-sign * qq) - self.atom

        flat = np.abs(np.ravel(xv))
        vals = np.array([laplace_invert(dens_transform, t) if t > 0 else
                         np.nan for t in flat])
        return vals.reshape(xv.shape) if np.ndim(x) else float(vals[0])

    def tail(self, x):
        """P{extremum > x} for the supremum side, P{extremum < x} for the
        infimum side (the decaying direction), vectorized."""
        xv = np.asarray(x, dtype=float)
        sign = 1.0 if self.side == "+" else -1.0
        arg = sign * xv
        if np.any(arg < 0):
            raise PreconditionError("x must lie on the extremum's half-axis")
        if self.kind == "me":
            if self.side == "-":
                vals = self.comp.exp_kernel_int(xv)  # P{inf < x}, x <= 0
            else:
                # P{sup > x} = 1 - p - q R^{-1}(e^{Rx} - I) e
                base = self.comp.exp_kernel_int(xv) - self.comp.exp_kernel_int(
                    np.zeros_like(xv))
                vals = 1.0 - self.atom - base
        else:
            def tail_transform(qq):
                return (1.0 - self.mgf(-sign * qq)) / qq

            flat = np.ravel(arg)
            vals = np.array([laplace_invert(tail_transform, t) if t > 0
                             else 1.0 - self.atom for t in flat])
            vals = vals.reshape(xv.shape)
        out = np.clip(vals, 0.0, 1.0) if np.ndim(x) else float(
            min(max(vals, 0.0), 1.0))
        return out

    def cdf(self, x):
        """P{extremum <= x} (full distribution function, any real x)."""
        xv = np.asarray(x, dtype=float)
        if self.side == "+":
            vals = np.where(xv < 0, 0.0,
                            1.0 - self.tail(np.maximum(xv, 0.0)))
        else:
            vals = np.where(xv >= 0, 1.0, self.tail(np.minimum(xv, 0.0)))
        return vals if np.ndim(x) else float(vals)


def extremum_law(model: LevyModel, s: float, side: str) -> ExtremumLaw:
    """Law of the killed supremum (side '+') or infimum (side '-')."""
    if s <= 0:
        raise PreconditionError("s must be positive; use absolute_supremum "
                                "for the overall extremum")
    if model.side_is_me(side):
        comp = build_component(model, s, side)
        return ExtremumLaw(side=side, s=s, atom=comp.p, kind="me", comp=comp)
    me_side = "-" if side == "+" else "+"
    comp = build_component(model, s, me_side)
    spec = model.spec(side)
    # atom at 0: only without diffusion and with drift not pointing to `side`
    drift_toward = model.drift > 0 if side == "+" else model.drift < 0
    if model.sigma > 0 or drift_toward:
        atom = 0.0
    else:
        M = matrix_tail_transform(model, comp)
        inner = float(as_real(comp.q @ (M @ comp.e_vec), "atom inner product"))
        atom = s / (s + spec.intensity * comp.p + inner)

    def mgf(r):
        return opposite_mgf(model, s, r, target=side, comp=comp)

    return ExtremumLaw(side=side, s=s, atom=atom, kind="inversion", comp=None,
                       _mgf=mgf)


def supremum_law(model: LevyModel, s: float) -> ExtremumLaw:
    return extremum_law(model, s, "+")


def infimum_law(model: LevyModel, s: float) -> ExtremumLaw:
    return extremum_law(model, s, "-")


# ------------------------------------------------------------------ #
# s -> 0 limits (negative mean: the overall supremum is finite)


@dataclass(eq=False)
class LimitMinusQuantities:
    """Minus-side factorization data renormalized at s = 0 with mean < 0.

    The infimum becomes infinite, but q(s)/s, p(s)/s and A(s)/s converge;
    these primed limits drive the overall-supremum identities. R0 is the
    companion matrix of the limiting symmetric functions (the vanished root
    sits at 0, so R0 has eigenvalue 0).
    """

    roots: np.ndarray          # surviving roots (distinguished one vanished)
    rho0_vec: np.ndarray       # symmetric functions including the 0 root
    q_prime: np.ndarray
    p_prime: float
    creep_prime: float
    R0: np.ndarray
    _eig: tuple | None = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return len(self.q_prime)

    @property
    def e_vec(self) -> np.ndarray:
        e = np.zeros(self.dim)
        e[-1] = 1.0
        return e

    def _eigen(self):
        if self._eig is None:
            w = np.concatenate([[0.0 + 0.0j], self.roots])  # eigenvalues of R0
            V = np.vander(-w, N=self.dim, increasing=True).T
            self._eig = (w, V)
        return self._eig

    def kernel(self, x, vec):
        """q' e^{R0 x} vec, vectorized over x < 0."""
        w, V = self._eigen()
        coef = (self.q_prime.astype(complex) @ V) * np.linalg.solve(
            V, np.asarray(vec, dtype=complex))
        xv = np.asarray(x, dtype=float)
        vals = np.sum(coef[:, None] * np.exp(w[:, None] * xv.ravel()), axis=0)
        vals = vals.reshape(xv.shape)
        return as_real(vals, "limit kernel")

    def resolvent_dot(self, r, vec):
        mat = r * np.eye(self.dim) + self.R0
        sol = np.linalg.solve(mat.astype(complex), np.asarray(vec, complex))
        return self.q_prime @ sol


def limit_minus_quantities(model: LevyModel) -> LimitMinusQuantities:
    mu = model.mean
    if mu is None or mu >= 0:
        raise PreconditionError("the s -> 0 minus-side limit needs mean < 0")
    if not model.side_is_me("-"):
        raise PreconditionError("the minus side must be matrix-exponential")
    lim = limiting_roots(model, "-")
    roots2 = lim.roots
    spec = model.spec("-")
    den = spec.den if spec is not None else np.array([])
    d = len(den)
    beta_d = den[0] if d else 1.0
    prod2 = float(as_real(np.prod(roots2), "surviving root product")) \
        if len(roots2) else 1.0
    scale = prod2 / (abs(mu) * beta_d)

    full_poly = poly_from_roots_neg(np.concatenate([[0.0 + 0.0j], roots2]))
    n = len(roots2) + 1
    rho0_vec = as_real(full_poly[:n], "limiting symmetric functions")

    case = model.case("-")
    if case == "NS":
        q_prime = scale * np.append(den, 1.0)
        p_prime = 0.0
    else:
        q_prime = scale * (den - rho0_vec)
        p_prime = prod2 / (abs(mu) * beta_d)
    if model.sigma > 0:
        creep_prime = 0.5 * model.sigma ** 2 * scale
    else:
        creep_prime = model.drift * p_prime  # p' = 0 unless drift >= 0
    R0 = _companion(rho0_vec, "-")
    return LimitMinusQuantities(
        roots=roots2, rho0_vec=rho0_vec, q_prime=np.asarray(q_prime, float),
        p_prime=p_prime, creep_prime=creep_prime, R0=R0,
    )


def absolute_supremum(model: LevyModel) -> ExtremumLaw:
    """Law of the overall supremum (requires mean < 0).

    With an ME positive side the law is itself matrix-exponential, carried by
    the plus component built on the limiting plus-side roots. Otherwise the
    MGF identity in the primed minus quantities characterizes it and the
    distribution functions come from Laplace inversion.
    """
    mu = model.mean
    if mu is None or mu >= 0:
        raise PreconditionError("the overall supremum is proper only for "
                                "mean < 0")
    if model.side_is_me("+"):
        lim = limiting_roots(model, "+")
        comp = _component_from_roots(model, "+", lim.roots, 0.0,
                                     near_multiple=False)
        return ExtremumLaw(side="+", s=0.0, atom=comp.p, kind="me", comp=comp)

    lm = limit_minus_quantities(model)
    spec = model.spec("+")
    M0 = _limit_matrix_tail_transform(model, lm)

    def mgf(r):
        if r == 0:
            return 1.0 + 0.0j
        tail_tr = model.tail_transform("+", r)
        vec = (tail_tr * np.eye(lm.dim) - M0) @ lm.e_vec
        inner = lm.resolvent_dot(r, vec)
        denom = 1.0 - r * (lm.creep_prime + lm.p_prime * tail_tr + inner)
        return 1.0 / denom

    if model.sigma > 0 or model.drift > 0:
        atom = 0.0
    else:
        inner0 = float(as_real(lm.q_prime @ (M0 @ lm.e_vec), "atom inner"))
        atom = 1.0 / (1.0 + spec.intensity * lm.p_prime + inner0)
    return ExtremumLaw(side="+", s=0.0, atom=atom, kind="inversion",
                       _mgf=mgf)


def _limit_matrix_tail_transform(model: LevyModel,
                                 lm: LimitMinusQuantities) -> np.ndarray:
    """Positive tail transform at the matrix argument -R0 (spectral route;
    R0 is diagonalizable since the limiting roots are distinct and 0 joins
    them as a separate eigenvalue)."""
    if model.spec("+") is None:
        return np.zeros((lm.dim, lm.dim))
    w, V = lm._eigen()
    fvals = np.array([model.tail_transform("+", -z) for z in w])
    M = V @ (fvals[:, None] * np.linalg.solve(V, np.eye(lm.dim, dtype=complex)))
    return as_real(M, "limit matrix tail transform", tol=1e-8)


def absolute_extremum(model: LevyModel, side: str = "+") -> ExtremumLaw:
    """Overall supremum (side '+', mean < 0) or infimum (side '-', mean > 0)."""
    if side == "+":
        return absolute_supremum(model)
    if side != "-":
        raise PreconditionError("side must be '+' or '-'")
    mirror_law = absolute_supremum(model.mirrored())
    return _flip_law(mirror_law)


def _flip_law(law: ExtremumLaw) -> ExtremumLaw:
    """Reinterpret a supremum law of -X as an infimum law of X."""
    flipped = ExtremumLaw(side="-", s=law.s, atom=law.atom, kind="inversion",
                          _mgf=lambda r: law.mgf(-r))
    if law.kind == "me":
        flipped._mgf = lambda r: law.comp.mgf(-r)
        # distribution functions mirror through the tail
        flipped.density = lambda x: law.density(-np.asarray(x, dtype=float))
        flipped.tail = lambda x: law.tail(-np.asarray(x, dtype=float))
        flipped.cdf = lambda x: np.where(
            np.asarray(x, dtype=float) >= 0, 1.0,
            law.tail(-np.minimum(np.asarray(x, dtype=float), 0.0)))
        flipped.kind = "me-mirrored"
    return flipped


# ------------------------------------------------------------------ #


def wiener_hopf_residual(model: LevyModel, s: float, r) -> float:
    """| E e^{r sup} E e^{r inf} - s / (s - k(r)) | at Re r = 0, r != 0.

    Both extremum transforms are computed by their own best route, so this
    certifies the whole factorization pipeline end to end.
    """
    if s <= 0:
        raise PreconditionError("s must be positive")
    if abs(np.real(r)) > 1e-12 * (1.0 + abs(r)):
        raise PreconditionError("the residual certificate runs on Re r = 0")
    if r == 0:
        return 0.0

    vals = {}
    for side in ("+", "-"):
        if model.side_is_me(side):
            comp = build_component(model, s, side)
            vals[side] = comp.mgf(r)
        else:
            vals[side] = opposite_mgf(model, s, r, target=side)
    lhs = vals["+"] * vals["-"]
    rhs = s / (s - model._cumulant_any(r))
    return float(abs(lhs - rhs))
