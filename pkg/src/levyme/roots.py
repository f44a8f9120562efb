"""Root solvers for the killed-exponent equation k(r) = s.

For a model whose jump sides are both matrix-exponential (or absent), the
equation clears to a polynomial of degree N_plus + N_minus whose roots split
by the sign of their real part: N_plus roots with Re > 0 (written r_i^+) and
N_minus with Re < 0 (negated to r_i^-), where N = d + 1 on a side with
non-step-wise motion and N = d on a step-wise side. When one side is a
general (non-ME) jump law, the roots in the ME side's half-plane are located
by winding-number counting on expanding half-disc contours, followed by a
log-derivative moment extraction and Newton polish.

At s = 0 with nonzero mean drift mu, the root at the origin is deflated
analytically; on the side toward which the process drifts one root vanishes
into the origin linearly with slope 1/|mu|, all other roots stay separated.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from ._util import as_real, polyval_asc
from .errors import NumericsError, PreconditionError
from .model import LevyModel, MEJumpSpec

_RESID_TOL = 1e-9
_NEAR_MULTIPLE_TOL = 1e-7


@dataclass(frozen=True)
class RootSet:
    """Roots of k(r) = s lying in one half-plane, stored with positive real
    part: the killed exponent factors through products over (r + r_i^-) and
    (r_i^+ - r).

    roots[0] is the distinguished real root in [0, slowest rate]; the rest
    sort by (real part, imaginary part), conjugate pairs adjacent.
    """

    side: str
    s: float
    roots: np.ndarray
    residuals: np.ndarray
    near_multiple: bool

    @property
    def r1(self) -> float:
        return float(self.roots[0].real)

    def __len__(self) -> int:
        return len(self.roots)


def cumulant_polynomial(model: LevyModel, s: float) -> np.ndarray:
    """Ascending coefficients of the cleared polynomial for k(r) = s.

    Multiplying k(r) - s by both ME denominators D_plus(-r) D_minus(r) gives

        (a r + sigma^2 r^2/2 - lam_p - lam_m - s) D_p(-r) D_m(r)
          + lam_p N_p(-r) D_m(r) + lam_m N_m(r) D_p(-r),

    a polynomial of degree N_plus + N_minus whose zeros away from the
    denominator roots are exactly the killed-exponent roots.
    """
    if not (model.side_is_me("-") and model.side_is_me("+")):
        raise PreconditionError("both jump sides must be matrix-exponential")

    def side_polys(side):
        spec = model.spec(side)
        if spec is None:
            return np.array([1.0]), np.array([1.0]), 0.0
        num_full = np.zeros(len(spec.den) + 1)
        num_full[: len(spec.num)] = spec.num
        den_full = np.append(spec.den, 1.0)
        if side == "+":  # evaluate at -r: alternate signs
            signs = (-1.0) ** np.arange(len(den_full))
            return num_full * signs, den_full * signs, spec.intensity
        return num_full, den_full, spec.intensity

    num_m, den_m, lam_m = side_polys("-")
    num_p, den_p, lam_p = side_polys("+")

    base = np.array([-lam_p - lam_m - s, model.drift, 0.5 * model.sigma ** 2])
    base = np.trim_zeros(base, "b")
    if len(base) == 0:
        base = np.array([0.0])

    poly = npoly.polymul(npoly.polymul(base, den_p), den_m)
    if lam_p > 0:
        poly = npoly.polyadd(poly, lam_p * npoly.polymul(num_p, den_m))
    if lam_m > 0:
        poly = npoly.polyadd(poly, lam_m * npoly.polymul(num_m, den_p))

    expected = model.root_count("-") + model.root_count("+")
    scale = np.max(np.abs(poly))
    while len(poly) > 1 and abs(poly[-1]) <= 1e-14 * scale:
        poly = poly[:-1]
    if len(poly) - 1 != expected:
        raise NumericsError(
            f"cleared polynomial degree {len(poly) - 1} != expected {expected}"
        )
    return poly


def _newton_polish(model: LevyModel, roots: np.ndarray, s: float) -> np.ndarray:
    out = np.array(roots, dtype=complex)
    for i, r in enumerate(out):
        z = r
        for _ in range(8):
            f = model._cumulant_any(z) - s
            if abs(f) < 1e-14 * (1.0 + abs(s)):
                break
            df = model._cumulant_deriv(z)
            if df == 0:
                break
            step = f / df
            if not np.isfinite(step):
                break
            if abs(step) > 0.5 * (1.0 + abs(z)):
                step *= 0.5 * (1.0 + abs(z)) / abs(step)
            z = z - step
        # keep the polish only if it did not make things worse
        if abs(model._cumulant_any(z) - s) <= abs(model._cumulant_any(r) - s):
            out[i] = z
    return out


def _classify_and_package(model, s, side, half_roots, sign,
                          require_r1: bool = True) -> RootSet:
    """Sort, locate the distinguished real root, and certify residuals.

    half_roots are the roots already mapped to positive real part (r_i^+- as
    magnitudes); sign maps them back to the complex plane (+1 plus side, -1
    minus side). With require_r1=False (vanished-root limits) ordering is
    plain (Re, Im).
    """
    spec = model.spec(side)
    cap = np.inf
    if isinstance(spec, MEJumpSpec):
        cap = spec.min_rate
    roots = np.array(half_roots, dtype=complex)

    if require_r1:
        realish = np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))
        in_range = (roots.real >= -1e-12) & \
                   (roots.real <= cap * (1 + 1e-9) + 1e-12)
        candidates = np.where(realish & in_range)[0]
        if len(candidates) == 0:
            raise NumericsError(
                f"no real root found in [0, {cap}] on side {side!r} at s={s}"
            )
        # the distinguished root is the smallest real root in range
        lead = candidates[np.argmin(roots[candidates].real)]
        rest = np.delete(roots, lead)
        order = np.lexsort((rest.imag, rest.real))
        ordered = np.concatenate([[roots[lead]], rest[order]])
    else:
        order = np.lexsort((roots.imag, roots.real))
        ordered = roots[order]
    realmask = np.abs(ordered.imag) <= 1e-12 * (1.0 + np.abs(ordered))
    ordered[realmask] = ordered[realmask].real

    resid = np.array(
        [abs(model._cumulant_any(sign * z) - s) for z in ordered]
    )
    if np.any(resid > _RESID_TOL * (1.0 + abs(s))):
        raise NumericsError(
            f"root residual {np.max(resid):.3e} exceeds tolerance at s={s}"
        )
    near = False
    if len(ordered) > 1:
        scale = 1.0 + np.max(np.abs(ordered))
        dist = np.abs(ordered[:, None] - ordered[None, :])
        np.fill_diagonal(dist, np.inf)
        near = bool(np.min(dist) < _NEAR_MULTIPLE_TOL * scale)
    return RootSet(side=side, s=float(s), roots=ordered, residuals=resid,
                   near_multiple=near)


def solve_roots(model: LevyModel, s: float, side: str) -> RootSet:
    """All killed-exponent roots in the given side's half-plane, s > 0."""
    if side not in ("-", "+"):
        raise PreconditionError("side must be '-' or '+'")
    if s <= 0:
        raise PreconditionError("s must be positive (use limiting_roots at 0)")
    if not model.side_is_me(side):
        raise PreconditionError(
            f"roots are only defined in half-planes of matrix-exponential "
            f"sides; side {side!r} is general"
        )
    if model.side_is_me("-") and model.side_is_me("+"):
        poly = cumulant_polynomial(model, s)
        allr = npoly.polyroots(poly.astype(complex))
        if np.any(np.abs(allr.real) <= 1e-12 * (1.0 + np.abs(allr))):
            raise NumericsError("cleared polynomial has a root on the axis")
        allr = _newton_polish(model, allr, s)
        sign = 1.0 if side == "+" else -1.0
        half = sign * allr[np.sign(allr.real) == sign]
        if len(half) != model.root_count(side):
            raise NumericsError(
                f"{len(half)} roots with Re {'>' if side == '+' else '<'} 0, "
                f"expected {model.root_count(side)}"
            )
        return _classify_and_package(model, s, side, half, sign)
    return _solve_half_plane(model, s, side)


def _winding_refine(wfun, params, point_of):
    """Adaptively refine contour parameters until every phase step of the
    tracked analytic function is below pi/2, then return samples and steps."""
    params = list(params)
    vals = [wfun(point_of(t)) for t in params]
    for v in vals:
        if v == 0 or not np.isfinite(v):
            raise NumericsError("contour passes through a root")
    max_pts = 1 << 16
    i = 0
    while i < len(params) - 1:
        dphi = np.angle(vals[i + 1] / vals[i])
        if abs(dphi) > 0.5 * np.pi:
            if len(params) >= max_pts:
                raise NumericsError("winding refinement did not converge")
            tm = 0.5 * (params[i] + params[i + 1])
            vm = wfun(point_of(tm))
            if vm == 0 or not np.isfinite(vm):
                raise NumericsError("contour passes through a root")
            params.insert(i + 1, tm)
            vals.insert(i + 1, vm)
            continue
        i += 1
    vals = np.array(vals)
    phases = np.angle(vals[1:] / vals[:-1])
    return np.array(params), vals, phases


def _solve_half_plane(model: LevyModel, s: float, side: str,
                      expected: int | None = None,
                      deflate_origin: bool = False,
                      require_r1: bool = True) -> RootSet:
    """Contour route: count and extract roots in one open half-plane.

    The tracked function is (k(r) - s) cleared of the ME side's poles by its
    denominator, so winding numbers count roots only. With deflate_origin the
    function k(r)/r replaces k(r) - s (used at s = 0, removing the origin
    root).
    """
    spec = model.spec(side)
    if expected is None:
        expected = model.root_count(side)
    if expected == 0:
        return RootSet(side=side, s=float(s), roots=np.array([], dtype=complex),
                       residuals=np.array([]), near_multiple=False)
    sign = 1.0 if side == "+" else -1.0

    if isinstance(spec, MEJumpSpec):
        den_full = np.append(spec.den, 1.0)
        if side == "+":
            den_full = den_full * (-1.0) ** np.arange(len(den_full))
        max_rate = float(np.max(spec.rates.real))
    else:
        den_full = np.array([1.0])
        max_rate = 1.0

    def wfun(r):
        core = (model._cumulant_any(r) / r if deflate_origin
                else model._cumulant_any(r) - s)
        return core * polyval_asc(den_full, r)

    radius = max(1.0, max_rate) + abs(model.drift) + model.sigma ** 2 + s

    for _ in range(14):
        def point_of(t, R=radius):
            # t in [0,2): imaginary-axis segment, enclosed half-disc on the
            # left of travel; t in [2,4]: semicircular arc
            if side == "+":
                if t < 2.0:
                    return 1j * R * (1.0 - t)
                return R * np.exp(1j * (-0.5 + 0.5 * (t - 2.0)) * np.pi)
            if t < 2.0:
                return 1j * R * (t - 1.0)
            return R * np.exp(1j * (0.5 + 0.5 * (t - 2.0)) * np.pi)

        base = np.concatenate([
            np.linspace(0.0, 2.0, 129),
            2.0 + np.linspace(0.0, 2.0, 129)[1:],
        ])
        base[-1] = 4.0 - 1e-9  # close the loop without duplicating t=0
        if deflate_origin:
            base = base[np.abs(base - 1.0) > 1e-9]  # keep off r = 0
        try:
            params, vals, phases = _winding_refine(wfun, base, point_of)
        except NumericsError:
            radius *= 2.0371
            continue
        winding = float(np.sum(phases) / (2.0 * np.pi))
        count = int(round(winding))
        if abs(winding - count) > 0.25 or count < expected:
            radius *= 2.0371
            continue
        if count > expected:
            raise NumericsError(
                f"found {count} roots in the {side!r} half-plane, expected "
                f"{expected}: the model's transforms are inconsistent"
            )

        # log-derivative moments -> Newton identities -> polynomial
        pts = np.array([point_of(t, radius) for t in params])
        mid = 0.5 * (pts[1:] + pts[:-1])
        dlog = np.log(np.abs(vals[1:] / vals[:-1])) + 1j * phases
        n = expected
        p_mom = np.array(
            [np.sum(mid ** k * dlog) / (2j * np.pi) for k in range(1, n + 1)]
        )
        e_sym = np.zeros(n + 1, dtype=complex)
        e_sym[0] = 1.0
        for k in range(1, n + 1):
            acc = 0.0
            for i in range(1, k + 1):
                acc += (-1.0) ** (i - 1) * e_sym[k - i] * p_mom[i - 1]
            e_sym[k] = acc / k
        coeffs = [(-1.0) ** k * e_sym[k] for k in range(n + 1)]  # descending
        raw = np.roots(coeffs)

        polished = _polish_general(model, raw, s, deflate_origin)
        half = sign * polished
        if np.any(half.real <= 0):
            raise NumericsError("extracted root crossed into the wrong half-plane")
        s_eff = 0.0 if deflate_origin else s
        return _classify_and_package(model, s_eff, side, half, sign,
                                     require_r1=require_r1)
    raise NumericsError("half-disc radius grew beyond every cap without "
                        "capturing the expected root count")


def _polish_general(model, roots, s, deflate_origin):
    out = np.array(roots, dtype=complex)

    def f(z):
        if deflate_origin:
            return model._cumulant_any(z) / z
        return model._cumulant_any(z) - s

    for i, r in enumerate(out):
        z = r
        fz = f(z)
        for _ in range(60):
            h = 1e-7 * (1.0 + abs(z))
            df = (f(z + h) - f(z - h)) / (2.0 * h)
            if df == 0 or not np.isfinite(df):
                break
            step = fz / df
            if abs(step) > 0.3 * (1.0 + abs(z)):
                step *= 0.3 * (1.0 + abs(z)) / abs(step)
            z_new = z - step
            f_new = f(z_new)
            if not np.isfinite(f_new):
                break
            z, fz = z_new, f_new
            if abs(fz) < 1e-13 * (1.0 + abs(s)):
                break
        out[i] = z
    return out


@dataclass(frozen=True)
class LimitRoots:
    """Roots at s = 0 in one half-plane, with the vanishing-root data.

    When the mean drifts away from the side (mu < 0 for the minus side,
    mu > 0 for the plus side), the distinguished root tends to 0 linearly in
    s with slope 1/|mu| and is excluded from `roots`; `vanished` marks this
    and `slope` carries d r_1 / d s at 0+.
    """

    side: str
    roots: np.ndarray
    vanished: bool
    slope: float | None


def limiting_roots(model: LevyModel, side: str) -> LimitRoots:
    """Killed-exponent roots at s = 0 for one half-plane; requires mu != 0."""
    if side not in ("-", "+"):
        raise PreconditionError("side must be '-' or '+'")
    mu = model.mean
    if mu is None or mu == 0:
        raise PreconditionError("limiting roots require a nonzero finite mean")
    if not model.side_is_me(side):
        raise PreconditionError("limiting roots need a matrix-exponential side")
    vanishes = (mu < 0 and side == "-") or (mu > 0 and side == "+")
    expected = model.root_count(side) - (1 if vanishes else 0)
    sign = 1.0 if side == "+" else -1.0

    if model.side_is_me("-") and model.side_is_me("+"):
        poly = cumulant_polynomial(model, 0.0)
        scale = np.max(np.abs(poly))
        if abs(poly[0]) > 1e-10 * scale:
            raise NumericsError("cleared polynomial misses its zero constant "
                                "term at s = 0")
        deflated = poly[1:]
        allr = npoly.polyroots(deflated.astype(complex))
        # polish against h(r) = k(r)/r, which removes the origin root
        polished = _polish_general(model, allr, 0.0, deflate_origin=True)
        tiny = np.abs(polished) <= 1e-8 * (1.0 + np.max(np.abs(polished)))
        if np.any(tiny):
            raise NumericsError("a nonzero limiting root collapsed to the origin")
        half = sign * polished[np.sign(polished.real) == sign]
        if len(half) != expected:
            raise NumericsError(
                f"{len(half)} limiting roots on side {side!r}, expected {expected}"
            )
        roots_arr = _classify_and_package_limit(model, side, half, sign,
                                                vanishes)
    else:
        rs = _solve_half_plane(model, 0.0, side, expected=expected,
                               deflate_origin=True,
                               require_r1=not vanishes)
        roots_arr = rs.roots
    slope = (1.0 / abs(mu)) if vanishes else None
    return LimitRoots(side=side, roots=roots_arr, vanished=vanishes,
                      slope=slope)


def _classify_and_package_limit(model, side, half_roots, sign, vanished):
    """Order limiting roots; when the distinguished root survived, keep it
    first, otherwise plain (Re, Im) order."""
    roots = np.array(half_roots, dtype=complex)
    resid = np.array([abs(model._cumulant_any(sign * z)) for z in roots])
    if np.any(resid > _RESID_TOL):
        raise NumericsError(
            f"limiting root residual {np.max(resid):.3e} exceeds tolerance"
        )
    if vanished:
        order = np.lexsort((roots.imag, roots.real))
        return roots[order]
    spec = model.spec(side)
    cap = spec.min_rate if isinstance(spec, MEJumpSpec) else np.inf
    realish = np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))
    in_range = (roots.real >= -1e-12) & (roots.real <= cap * (1 + 1e-9) + 1e-12)
    cand = np.where(realish & in_range)[0]
    if len(cand) == 0:
        raise NumericsError("no surviving real root in the admissible interval")
    lead = cand[np.argmin(roots[cand].real)]
    rest = np.delete(roots, lead)
    order = np.lexsort((rest.imag, rest.real))
    return np.concatenate([[roots[lead]], rest[order]])
