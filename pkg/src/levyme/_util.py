"""Shared numeric helpers: real coercion, polynomial conventions, quadrature,
and a float64 Laplace-transform inverter.

Polynomial coefficient arrays are ascending-power throughout
(coeffs[k] is the coefficient of r**k), matching numpy.polynomial.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import NumericsError

# Relative imaginary-part budget when coercing analytically-real quantities.
IMAG_TOL = 1e-9


def as_real(value, context: str = "value", tol: float = IMAG_TOL):
    """Drop a negligible imaginary part, or raise.

    Accepts scalars or arrays. The tolerance is relative:
    |Im z| <= tol * (1 + |z|).
    """
    arr = np.asarray(value)
    if not np.iscomplexobj(arr):
        return value
    bound = tol * (1.0 + np.abs(arr))
    bad = np.abs(arr.imag) > bound
    if np.any(bad):
        worst = np.max(np.abs(arr.imag) / (1.0 + np.abs(arr)))
        raise NumericsError(
            f"{context}: spurious imaginary part (relative size {worst:.3e})"
        )
    out = arr.real
    if np.isscalar(value) or arr.ndim == 0:
        return float(out)
    return out


def polyval_asc(coeffs, r):
    """Evaluate an ascending-power polynomial at (possibly complex) r."""
    return npoly.polyval(r, np.asarray(coeffs))


def poly_from_roots_neg(roots) -> np.ndarray:
    """Ascending coefficients of prod_i (r + root_i), i.e. monic with roots
    at -root_i. Empty input gives [1]."""
    coeffs = np.array([1.0 + 0.0j])
    for rt in roots:
        coeffs = npoly.polymul(coeffs, np.array([rt, 1.0 + 0.0j]))
    return coeffs


def elementary_symmetric(values) -> np.ndarray:
    """e_1..e_n of the given values by incremental product expansion.

    Returns a length-n array, e[k-1] = e_k. Complex input allowed; the
    result keeps dtype complex unless input is real.
    """
    values = np.asarray(values)
    n = len(values)
    coeffs = poly_from_roots_neg(values)  # prod (r + v_i), ascending
    if n == 0:
        return np.zeros(0)
    # prod(r + v_i) = r^n + e_1 r^{n-1} + ... + e_n -> coeffs[n-k] = e_k
    e = np.array([coeffs[n - k] for k in range(1, n + 1)])
    if not np.iscomplexobj(values):
        e = as_real(e, "elementary symmetric functions")
    return e


def gauss_legendre_panels(f, a: float, b: float, n_panels: int = 8,
                          order: int = 40):
    """Fixed-panel Gauss-Legendre integration of a vector/matrix-valued f."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    total = None
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        for x, w in zip(nodes, weights):
            val = f(mid + half * x)
            term = (half * w) * np.asarray(val)
            total = term if total is None else total + term
    return total


def integrate_decaying_matrix(f, decay_rate: float, tol: float = 1e-12,
                              order: int = 40):
    """Integrate a matrix-valued f over [0, inf) assuming |f(x)| ~ e^{-decay_rate x}.

    Exponential tilting: integrate on doubling panels [0,L],[L,2L],... until the
    panel contribution falls below tol relative to the running total.
    """
    if decay_rate <= 0:
        raise NumericsError("integrate_decaying_matrix needs a positive decay rate")
    L = max(1.0, 4.0 / decay_rate)
    total = gauss_legendre_panels(f, 0.0, L, n_panels=8, order=order)
    lo = L
    scale = np.max(np.abs(total)) + 1e-300
    for _ in range(60):
        piece = gauss_legendre_panels(f, lo, lo + L, n_panels=4, order=order)
        total = total + piece
        if np.max(np.abs(piece)) < tol * scale:
            return total
        lo += L
    raise NumericsError("semi-infinite quadrature did not converge")


def laplace_invert(transform, t: float, n_terms: int = 21,
                   n_euler: int = 12, shift: float = 18.4) -> float:
    """Invert a Laplace transform at t > 0 (Euler / Abate-Whitt summation).

    transform(q) must be analytic for Re q > 0 and is evaluated on the line
    Re q = shift/(2t); the alternating series is accelerated with binomial
    (Euler) averaging. Accuracy ~ e^{-shift} ~ 1e-8 for smooth originals.
    """
    if t <= 0:
        raise NumericsError("laplace_invert requires t > 0")
    a = shift
    n_total = n_terms + n_euler
    # partial sums s_0..s_{n_total-1}
    terms = np.empty(n_total)
    base = transform(a / (2.0 * t)).real / 2.0
    acc = base
    terms[0] = acc
    for k in range(1, n_total):
        q = (a + 2.0j * np.pi * k) / (2.0 * t)
        acc += ((-1.0) ** k) * transform(q).real
        terms[k] = acc
    # Euler (binomial) average of the last n_euler+1 partial sums
    from math import comb

    weights = np.array([comb(n_euler, j) for j in range(n_euler + 1)], float)
    weights /= 2.0 ** n_euler
    avg = float(np.dot(weights, terms[n_terms - 1:n_terms + n_euler]))
    return (np.exp(a / 2.0) / (2.0 * t)) * 2.0 * avg


def sig17(x) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")
