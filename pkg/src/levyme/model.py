"""Model layer: jump specifications and the Levy process model.

A matrix-exponential (ME) jump side is given by a rational transform

    integral e^{-r y} g(y) dy over y > 0  =  N(r) / D(r),

where g is the density of the jump magnitude, N has degree <= d-1 and D is
monic of degree d with all roots in the open left half-plane (the negated
roots are the "rates" b_i, Re b_i > 0). Negative-side jumps use the mirror
convention, so the same (num, den) pair describes either side. Coefficient
arrays are ascending-power (num[k] multiplies r**k); the monic leading
coefficient of D is implied and not stored.

Two equivalent realizations are derived at build time and cross-checked:

* companion realization (beta, R, e): g(y) = beta @ expm(R_pos y) @ e,
* partial-fraction ("poly-exp") form: g(y) = sum_j P_j(y) e^{-b_j y},

the latter enabling fast vectorized density/tail/CDF evaluation.

The Levy process has cumulant

    k(r) = a r + sigma^2 r^2 / 2 + lam_pos (jump_mgf_pos(r) - 1)
                                 + lam_neg (jump_mgf_neg(r) - 1),

finite jump intensity on both sides. Per-side regime labels:

* "NS" (non-step-wise downward/upward motion): sigma > 0, or sigma = 0 with
  drift pointing to that side,
* "S" (step-wise): sigma = 0 and drift zero or pointing away.

For the negative side: "NS" iff sigma > 0 or (sigma == 0 and a < 0); for the
positive side: "NS" iff sigma > 0 or (sigma == 0 and a > 0).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import quad
from scipy.linalg import expm

from ._util import as_real, polyval_asc
from .errors import PreconditionError, ValidationError

_RATE_CLUSTER_TOL = 1e-5  # relative gap under which denominator roots merge


def _polyder(coeffs):
    return npoly.polyder(np.asarray(coeffs, dtype=complex))


def _refine_multiple_root(den_full, center: complex, multiplicity: int) -> complex:
    """Polish a multiplicity-m root as a simple root of the (m-1)th derivative."""
    p = np.asarray(den_full, dtype=complex)
    for _ in range(multiplicity - 1):
        p = _polyder(p)
    dp = _polyder(p)
    z = center
    for _ in range(30):
        pv = npoly.polyval(z, p)
        dv = npoly.polyval(z, dp)
        if dv == 0:
            break
        step = pv / dv
        z -= step
        if abs(step) < 1e-15 * (1.0 + abs(z)):
            break
    return z


@dataclass(eq=False)
class MEJumpSpec:
    """Matrix-exponential jump distribution on one side of the origin.

    Fields
    ------
    side : '+' or '-'
    intensity : total mass of the jump measure on that side (> 0)
    num, den : ascending-power transform coefficients (monic den implied)
    """

    side: str
    intensity: float
    num: np.ndarray
    den: np.ndarray
    # derived, filled by build_me_jump
    degree: int = 0
    rates: np.ndarray = field(default=None, repr=False)
    min_rate: float = 0.0
    beta: np.ndarray = field(default=None, repr=False)
    companion: np.ndarray = field(default=None, repr=False)
    mean_abs: float = 0.0
    _moments: tuple = field(default=(), repr=False)
    _clusters: tuple = field(default=(), repr=False)
    polyexp_ok: bool = True

    # ------------------------------------------------------------------ #
    # transform and moments

    def transform(self, r):
        """N(r)/D(r): Laplace transform of the magnitude density at r."""
        num_v = polyval_asc(self.num, r)
        den_v = polyval_asc(self._den_full, r)
        return num_v / den_v

    @property
    def _den_full(self):
        return np.append(self.den, 1.0)

    def jump_mgf(self, r):
        """E e^{r J} for a jump J of this side (signed)."""
        arg = -r if self.side == "+" else r
        return self.transform(arg)

    def magnitude_density(self, y):
        """Density of |J| at y > 0 (probability scale, vectorized)."""
        y = np.asarray(y, dtype=float)
        if self.polyexp_ok:
            out = np.zeros(y.shape, dtype=complex)
            for center, coeffs in self._clusters:
                poly = np.zeros(y.shape, dtype=complex)
                fact = 1.0
                for k, a_k in enumerate(coeffs):
                    if k > 0:
                        fact *= k
                    poly += a_k * (y ** k) / fact
                out += poly * np.exp(-center * y)
            return as_real(out, "ME density", tol=1e-7)
        return self._matrix_density(y)

    def magnitude_tail(self, y):
        """P{|J| > y} for y >= 0 (probability scale, vectorized)."""
        y = np.asarray(y, dtype=float)
        if self.polyexp_ok:
            out = np.zeros(y.shape, dtype=complex)
            for center, coeffs in self._clusters:
                acc = np.zeros(y.shape, dtype=complex)
                for k, a_k in enumerate(coeffs):
                    # integral_y^inf t^k e^{-b t} dt / k!
                    #   = e^{-b y} sum_{i<=k} y^i / (i! b^{k-i+1})
                    term = np.zeros(y.shape, dtype=complex)
                    fact = 1.0
                    for i in range(k + 1):
                        if i > 0:
                            fact *= i
                        term += (y ** i) / (fact * center ** (k - i + 1))
                    acc += a_k * term
                out += acc * np.exp(-center * y)
            return as_real(out, "ME tail", tol=1e-7)
        return self._matrix_tail(y)

    def _matrix_density(self, y):
        ys = np.atleast_1d(y)
        e = np.zeros(self.degree)
        e[-1] = 1.0
        vals = np.array(
            [float(self.beta @ expm(self._pos_companion * t) @ e) for t in ys]
        )
        return vals if np.ndim(y) else float(vals[0])

    def _matrix_tail(self, y):
        ys = np.atleast_1d(y)
        e = np.zeros(self.degree)
        e[-1] = 1.0
        r_inv = np.linalg.inv(self._pos_companion)
        vals = np.array(
            [float(-self.beta @ r_inv @ expm(self._pos_companion * t) @ e) for t in ys]
        )
        return vals if np.ndim(y) else float(vals[0])

    @property
    def _pos_companion(self):
        """Companion matrix of the magnitude density (eigenvalues -b_i)."""
        d = self.degree
        mat = np.zeros((d, d))
        for i in range(d - 1):
            mat[i, i + 1] = 1.0
        mat[d - 1, :] = -self.den
        return mat

    def flipped(self) -> "MEJumpSpec":
        """Mirror image of this spec on the other side of the origin."""
        return build_me_jump(
            "+" if self.side == "-" else "-",
            self.intensity,
            self.num.copy(),
            self.den.copy(),
            validate=False,  # magnitude law unchanged, already validated
        )


def build_me_jump(side: str, intensity: float, num, den,
                  validate: bool = True) -> MEJumpSpec:
    """Build and validate an ME jump spec from transform coefficients."""
    if side not in ("+", "-"):
        raise ValidationError(f"side must be '+' or '-', got {side!r}")
    num = np.atleast_1d(np.asarray(num, dtype=float))
    den = np.atleast_1d(np.asarray(den, dtype=float))
    d = len(den)
    if d < 1:
        raise ValidationError("denominator must have degree >= 1")
    if len(num) > d:
        raise ValidationError("numerator degree must be < denominator degree")
    if not np.isfinite(intensity) or intensity <= 0:
        raise ValidationError("intensity must be positive and finite")
    if den[0] == 0.0:
        raise ValidationError("transform must be finite and equal 1 at r = 0")
    ratio = num[0] / den[0]
    if abs(ratio - 1.0) > 1e-10:
        raise ValidationError(
            f"transform(0) = {ratio:.12g} != 1: coefficients are inconsistent"
        )
    num = num / ratio  # exact unit mass

    spec = MEJumpSpec(side=side, intensity=float(intensity), num=num, den=den,
                      degree=d)

    den_full = np.append(den, 1.0)
    roots = npoly.polyroots(den_full.astype(complex))
    rates = -roots  # Re > 0 expected
    if np.any(rates.real <= 1e-12):
        raise ValidationError("rate must have positive real part (every "
                              "denominator root must satisfy Re < 0)")
    order = np.argsort(rates.real, kind="stable")
    rates = rates[order]
    spec.rates = rates

    # a real rate must attain the minimal real part (complex rates may share
    # that real part, as for oscillating densities; multiplicity is fine)
    min_re = float(np.min(rates.real))
    is_real = np.abs(rates.imag) <= 1e-9 * (1.0 + np.abs(rates))
    attains = np.abs(rates.real - min_re) <= 1e-9 * (1.0 + abs(min_re))
    if not np.any(is_real & attains):
        raise ValidationError(
            "the slowest decay rate must be attained by a real denominator root"
        )
    spec.min_rate = min_re

    # the representation must be minimal: a shared root would hide a factor
    num_scale = np.max(np.abs(num)) * (1.0 + np.abs(roots)) ** max(len(num) - 1, 0)
    num_at_poles = np.abs(polyval_asc(num, roots))
    if np.any(num_at_poles <= 1e-9 * num_scale):
        raise ValidationError(
            "transform numerator and denominator share a root; reduce the "
            "representation first"
        )

    # companion realization: beta is the ascending numerator padded to length d
    beta = np.zeros(d)
    beta[: len(num)] = num
    spec.beta = beta
    spec.companion = (spec._pos_companion if side == "+"
                      else -spec._pos_companion)

    # magnitude moments m1..m3 from the series of N/D at r = 0:
    # transform(r) = 1 - m1 r + m2 r^2/2 - m3 r^3/6 + O(r^4)
    series = _rational_series(num, den_full, 4)
    m1 = -series[1]
    m2 = 2.0 * series[2]
    m3 = -6.0 * series[3]
    spec.mean_abs = float(as_real(m1, "ME mean"))
    spec._moments = (float(as_real(m1, "m1")), float(as_real(m2, "m2")),
                     float(as_real(m3, "m3")))
    if spec.mean_abs <= 0:
        raise ValidationError("jump magnitude mean must be positive")

    spec._clusters = _partial_fractions(num, den_full, rates)

    # cross-check poly-exp against the companion realization
    grid = np.geomspace(1e-3, 40.0 / spec.min_rate, 25)
    try:
        pe = spec.magnitude_density(grid)
        mat = spec._matrix_density(grid)
        scale = np.max(np.abs(mat)) + 1e-300
        spec.polyexp_ok = bool(np.max(np.abs(pe - mat)) <= 1e-8 * max(1.0, scale))
    except Exception:
        spec.polyexp_ok = False

    if validate:
        _validate_me_density(spec)
    return spec


def _rational_series(num, den_full, n_terms: int):
    """First n_terms Taylor coefficients of N(r)/D(r) at r = 0."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den_full, dtype=complex)
    coeffs = np.zeros(n_terms, dtype=complex)
    for k in range(n_terms):
        acc = num[k] if k < len(num) else 0.0
        for j in range(1, k + 1):
            if j < len(den):
                acc -= den[j] * coeffs[k - j]
        coeffs[k] = acc / den[0]
    return coeffs


def _partial_fractions(num, den_full, rates):
    """Laurent coefficients of N(r)/D(r) grouped by clustered poles.

    Returns ((b, (A_0..A_{m-1})), ...) so that the magnitude density equals
    sum_j sum_k A_{jk} y^k e^{-b_j y} / k!. Coefficients come from Cauchy
    circle integrals around each (possibly multiple) pole cluster, which is
    exact for analytic functions up to trapezoid error (spectrally small).
    """
    # cluster rates
    clusters = []
    used = np.zeros(len(rates), dtype=bool)
    for i, b in enumerate(rates):
        if used[i]:
            continue
        group = [b]
        used[i] = True
        for j in range(i + 1, len(rates)):
            if not used[j] and abs(rates[j] - b) <= _RATE_CLUSTER_TOL * (1 + abs(b)):
                group.append(rates[j])
                used[j] = True
        clusters.append(group)

    centers = []
    for group in clusters:
        m = len(group)
        c = complex(np.mean(group))
        if m > 1:
            c = _refine_multiple_root(den_full, -c, m)
            c = -c
        spread = max((abs(g - c) for g in group), default=0.0)
        centers.append((c, m, spread))

    out = []
    n_nodes = 128
    angles = 2.0 * np.pi * (np.arange(n_nodes) + 0.5) / n_nodes
    unit = np.exp(1j * angles)
    for idx, (b, m, spread) in enumerate(centers):
        dists = [abs(b - b2) for j, (b2, _, _) in enumerate(centers) if j != idx]
        radius = (min(dists) / 3.0) if dists else max(0.5, 0.1 * abs(b))
        # the circle must enclose every numerically split copy of the pole
        radius = max(radius, 4.0 * spread, 1e-6 * (1 + abs(b)))
        z = -b + radius * unit  # contour around the pole at r = -b
        tv = polyval_asc(num, z) / polyval_asc(den_full, z)
        # A_k (coefficient of 1/(r+b)^k) = mean of T(z) * (z+b)^{k-1} * (z+b)
        coeffs = []
        for k in range(1, m + 1):
            vals = tv * (z + b) ** k
            coeffs.append(complex(np.mean(vals)))
        # density term for 1/(r+b)^k is y^{k-1} e^{-b y} / (k-1)!
        out.append((b, tuple(coeffs)))
    return tuple(out)


def _validate_me_density(spec: MEJumpSpec) -> None:
    hi = 40.0 / spec.min_rate
    grid = np.concatenate([[0.0], np.geomspace(1e-8 * hi, hi, 10_000)])
    dens = spec.magnitude_density(grid)
    if np.min(dens) < -1e-12:
        raise ValidationError(
            f"transform does not define a nonnegative density "
            f"(min {np.min(dens):.3e} on the support grid)"
        )
    mass, _ = quad(lambda y: float(spec.magnitude_density(y)), 0.0, np.inf,
                   limit=200)
    if abs(mass - 1.0) > 1e-9:
        raise ValidationError(
            f"magnitude density integrates to {mass:.12g}, expected 1"
        )


@dataclass(eq=False)
class GeneralJumpSpec:
    """Non-ME jump side given by its measure tail and tail transform.

    tail(x): measure of jumps beyond x on this side, evaluated at |x|;
    transform(r): integral of e^{r x} tail(|x|) dx over the side's half-axis;
    abscissa: the transform is analytic for Re r < abscissa (positive side)
    or Re r > -abscissa (negative side); mean_jump: signed mean jump size.
    """

    side: str
    tail: Callable[[float], float]
    transform: Callable[[complex], complex]
    abscissa: float
    mean_jump: float
    intensity: float = 0.0

    def __post_init__(self):
        if self.side not in ("+", "-"):
            raise ValidationError(f"side must be '+' or '-', got {self.side!r}")
        if self.abscissa <= 0:
            raise ValidationError("transform abscissa must be positive")
        lam = float(self.tail(0.0))
        if not np.isfinite(lam) or lam <= 0:
            raise ValidationError("tail(0) must be the (positive) intensity")
        self.intensity = lam
        if self.side == "+" and self.mean_jump <= 0:
            raise ValidationError("positive-side mean jump must be positive")
        if self.side == "-" and self.mean_jump >= 0:
            raise ValidationError("negative-side mean jump must be negative")
        self._spot_check()

    def _spot_check(self):
        """Transform must match the tail by quadrature at a few points."""
        pts = [0.25j, -0.3 + 0.1j if self.side == "+" else 0.3 - 0.1j,
               -0.5 if self.side == "+" else 0.5]
        for r in pts:
            if self.side == "+":
                val, _ = quad(lambda x: np.exp(r * x) * self.tail(x),
                              0.0, np.inf, complex_func=True, limit=200)
            else:
                val, _ = quad(lambda x: np.exp(r * x) * self.tail(-x),
                              -np.inf, 0.0, complex_func=True, limit=200)
            ref = self.transform(r)
            if abs(val - ref) > 1e-6 * (1.0 + abs(ref)):
                raise ValidationError(
                    f"general jump transform disagrees with tail quadrature "
                    f"at r = {r}: {ref} vs {val}"
                )

    def jump_density(self, y: float) -> float:
        """Density of the jump measure at magnitude y (finite difference)."""
        h = 1e-6 * (1.0 + abs(y))
        lo = max(y - h, 0.0)
        return (self.tail(lo) - self.tail(y + h)) / (y + h - lo)

    def flipped(self) -> "GeneralJumpSpec":
        t, tr = self.tail, self.transform
        return GeneralJumpSpec(
            side="+" if self.side == "-" else "-",
            tail=t,
            transform=lambda r: tr(-r),
            abscissa=self.abscissa,
            mean_jump=-self.mean_jump,
        )


JumpSpec = MEJumpSpec | GeneralJumpSpec


@dataclass(eq=False)
class LevyModel:
    """Levy process with drift, Brownian part and two-sided finite-intensity
    jumps, at least one side matrix-exponential (or absent)."""

    drift: float
    sigma: float
    neg: JumpSpec | None = None
    pos: JumpSpec | None = None

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError("sigma must be nonnegative")
        for attr, side in (("neg", "-"), ("pos", "+")):
            spec = getattr(self, attr)
            if spec is not None and spec.side != side:
                raise ValidationError(
                    f"{attr} jump spec has side {spec.side!r}, expected {side!r}"
                )
        if not (self.side_is_me("-") or self.side_is_me("+")):
            raise ValidationError(
                "at least one jump side must be matrix-exponential or absent"
            )

    # ------------------------------------------------------------------ #

    def spec(self, side: str) -> JumpSpec | None:
        return self.neg if side == "-" else self.pos

    def side_is_me(self, side: str) -> bool:
        spec = self.spec(side)
        return spec is None or isinstance(spec, MEJumpSpec)

    def intensity(self, side: str) -> float:
        spec = self.spec(side)
        return 0.0 if spec is None else spec.intensity

    def me_degree(self, side: str) -> int:
        spec = self.spec(side)
        if spec is None:
            return 0
        if not isinstance(spec, MEJumpSpec):
            raise PreconditionError(f"side {side!r} is not matrix-exponential")
        return spec.degree

    def case(self, side: str) -> str:
        """Regime label 'NS' or 'S' for the given side."""
        if self.sigma > 0:
            return "NS"
        if side == "-":
            return "NS" if self.drift < 0 else "S"
        return "NS" if self.drift > 0 else "S"

    def root_count(self, side: str) -> int:
        d = self.me_degree(side)
        return d + 1 if self.case(side) == "NS" else d

    @property
    def mean(self) -> float | None:
        """E X_1 = a + lam_pos mean_pos + lam_neg mean_neg (signed means)."""
        mu = self.drift
        for side, sign in (("-", -1.0), ("+", 1.0)):
            spec = self.spec(side)
            if spec is None:
                continue
            if isinstance(spec, MEJumpSpec):
                mu += spec.intensity * sign * spec.mean_abs
            else:
                if spec.mean_jump is None:
                    return None
                mu += spec.intensity * spec.mean_jump
        return mu

    # ------------------------------------------------------------------ #
    # cumulant

    def strip(self) -> tuple[float, float]:
        """Open strip (lo, hi) of Re r where both jump transforms converge."""
        lo, hi = -math.inf, math.inf
        if self.neg is not None:
            lo = (-self.neg.min_rate if isinstance(self.neg, MEJumpSpec)
                  else -self.neg.abscissa)
        if self.pos is not None:
            hi = (self.pos.min_rate if isinstance(self.pos, MEJumpSpec)
                  else self.pos.abscissa)
        return lo, hi

    def cumulant(self, r):
        """k(r) = log E e^{r X_1}, for Re r inside the transform strip."""
        lo, hi = self.strip()
        re = np.real(r)
        if not (lo < re < hi):
            raise PreconditionError(
                f"Re r = {re} outside the transform strip ({lo}, {hi})"
            )
        return self._cumulant_any(r)

    def _cumulant_any(self, r):
        """Cumulant by rational continuation (ME sides evaluated as N/D)."""
        val = self.drift * r + 0.5 * self.sigma ** 2 * r * r
        for spec in (self.neg, self.pos):
            if spec is None:
                continue
            if isinstance(spec, MEJumpSpec):
                val += spec.intensity * (spec.jump_mgf(r) - 1.0)
            else:
                val += _general_cumulant_term(spec, r)
        return val

    def _cumulant_deriv(self, r):
        """d/dr of the cumulant (analytic for ME parts, FD for general)."""
        val = self.drift + self.sigma ** 2 * r
        for spec in (self.neg, self.pos):
            if spec is None:
                continue
            if isinstance(spec, MEJumpSpec):
                num, den = spec.num, spec._den_full
                arg = -r if spec.side == "+" else r
                sign = -1.0 if spec.side == "+" else 1.0
                n_v = polyval_asc(num, arg)
                d_v = polyval_asc(den, arg)
                n_d = polyval_asc(_polyder(num), arg) if len(num) > 1 else 0.0
                d_d = polyval_asc(_polyder(den), arg)
                val += spec.intensity * sign * (n_d * d_v - n_v * d_d) / d_v ** 2
            else:
                h = 1e-6 * (1.0 + abs(r))
                val += (_general_cumulant_term(spec, r + h)
                        - _general_cumulant_term(spec, r - h)) / (2.0 * h)
        return val

    def tail_transform(self, side: str, r):
        """integral of e^{r x} (jump-measure tail at x) over the side's axis.

        For the positive side this is analytic for Re r < c_1 (smallest
        positive rate); for the negative side for Re r > -b_1.
        """
        spec = self.spec(side)
        if spec is None:
            return 0.0 * r if np.ndim(r) else 0.0
        if isinstance(spec, GeneralJumpSpec):
            re = np.real(r)
            if side == "+" and re >= spec.abscissa:
                raise PreconditionError("r beyond the transform abscissa")
            if side == "-" and re <= -spec.abscissa:
                raise PreconditionError("r beyond the transform abscissa")
            return spec.transform(r)
        re = np.real(r)
        if side == "+" and re >= spec.min_rate:
            raise PreconditionError("Re r must be below the smallest positive rate")
        if side == "-" and re <= -spec.min_rate:
            raise PreconditionError("Re r must exceed minus the smallest rate")
        return _me_tail_transform(spec, r)

    def jump_measure_density(self, x: float) -> float:
        """Density of the jump measure at x != 0."""
        if x > 0:
            spec = self.pos
        elif x < 0:
            spec = self.neg
        else:
            raise PreconditionError("jump measure density undefined at 0")
        if spec is None:
            return 0.0
        if isinstance(spec, MEJumpSpec):
            return spec.intensity * float(spec.magnitude_density(abs(x)))
        return float(spec.jump_density(abs(x)))

    def measure_tail(self, side: str, x: float) -> float:
        """Jump-measure tail beyond |x| on the given side."""
        spec = self.spec(side)
        if spec is None:
            return 0.0
        if isinstance(spec, MEJumpSpec):
            return spec.intensity * float(spec.magnitude_tail(abs(x)))
        return float(spec.tail(abs(x)))

    def mirrored(self) -> "LevyModel":
        """The model of -X (negated drift, mirrored jump sides)."""
        return LevyModel(
            drift=-self.drift,
            sigma=self.sigma,
            neg=self.pos.flipped() if self.pos is not None else None,
            pos=self.neg.flipped() if self.neg is not None else None,
        )


def _general_cumulant_term(spec: GeneralJumpSpec, r):
    """Jump contribution to k(r) for a general side: +- r * tail transform."""
    sign = 1.0 if spec.side == "+" else -1.0
    return sign * r * spec.transform(r)


def _me_tail_transform(spec: MEJumpSpec, r):
    """Tail transform of an ME side from its rational magnitude transform.

    Positive side: lam (T(-r) - 1)/r; negative side: lam (1 - T(r))/r; a
    short series around r = 0 avoids cancellation for tiny |r|.
    """
    lam = spec.intensity
    m1, m2, m3 = spec._moments
    small = abs(r) < 1e-5
    if spec.side == "+":
        if small:
            return lam * (m1 + r * m2 / 2.0 + r * r * m3 / 6.0)
        return lam * (spec.transform(-r) - 1.0) / r
    if small:
        return lam * (m1 - r * m2 / 2.0 + r * r * m3 / 6.0)
    return lam * (1.0 - spec.transform(r)) / r


@dataclass(frozen=True)
class CaseInfo:
    case_neg: str
    case_pos: str
    mean: float | None


def classify_and_mean(model: LevyModel) -> CaseInfo:
    """Side regime labels plus E X_1 (None when a general side lacks a mean)."""
    return CaseInfo(case_neg=model.case("-"), case_pos=model.case("+"),
                    mean=model.mean)


# public aliases matching the operation vocabulary
def me_density(spec: MEJumpSpec, x: float) -> float:
    """Jump-measure density at x (measure scale: intensity * density)."""
    if spec.side == "+" and x <= 0 or spec.side == "-" and x >= 0:
        raise PreconditionError("x must lie in the support half-axis")
    return spec.intensity * float(spec.magnitude_density(abs(x)))


def me_tail(spec: MEJumpSpec, x: float) -> float:
    """Jump-measure tail beyond x on the spec's side (measure scale)."""
    if spec.side == "+" and x < 0 or spec.side == "-" and x > 0:
        raise PreconditionError("x must lie in the support half-axis")
    return spec.intensity * float(spec.magnitude_tail(abs(x)))


def me_transform(spec: MEJumpSpec, r) -> complex:
    """Tail transform of the spec's jump measure at r (strictly inside the
    analyticity region)."""
    re = np.real(r)
    if spec.side == "+" and re >= spec.min_rate:
        raise PreconditionError("Re r must be below the smallest rate")
    if spec.side == "-" and re <= -spec.min_rate:
        raise PreconditionError("Re r must exceed minus the smallest rate")
    return _me_tail_transform(spec, r)
