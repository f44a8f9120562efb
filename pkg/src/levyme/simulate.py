"""Monte Carlo oracle for killed-path functionals.

Simulates the process exactly at jump epochs over one Exp(s) horizon per
path: jump counts are Poisson on the killed horizon, jump epochs uniform,
and between epochs the path is a straight line (sigma = 0) or a Brownian
segment whose running extremes are drawn from the exact bridge law

    M = y0 + (c + sqrt(c^2 - 2 sigma^2 L ln U)) / 2

given the segment increment c over duration L. Everything downstream
(extrema, first passage with creep/jump distinction, piecewise-linear
occupation times) is exact for sigma = 0; for sigma > 0 the occupation time
falls back to a uniform time grid with O(theta/grid) discretization bias —
estimates carry that bias in addition to the reported standard error.

Paths are processed in fixed-size batches, each driven by its own
Philox(key=(seed, batch_index)) stream and reduced in batch order, so
results are bit-identical for a given seed regardless of thread count
(threads come from the config or the ME_LEVY_THREADS environment variable).

Jump magnitudes: exponential, sums of exponentials (scalar numerator, real
rates) and positive hyperexponential mixtures are drawn in closed form;
anything else goes through a tabulated inverse CDF built from the magnitude
tail, which also covers non-ME sides given by a tail function.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .model import GeneralJumpSpec, LevyModel, MEJumpSpec

BATCH = 4096
_SENTINEL = np.int64(2) ** 62


@dataclass
class SimConfig:
    """Simulation controls; `grid` only affects sigma > 0 occupation."""

    paths: int = 100_000
    seed: int = 0
    threads: int | None = None
    grid: int = 1000

    def resolved_threads(self) -> int:
        if self.threads is not None:
            return max(1, int(self.threads))
        env = os.environ.get("ME_LEVY_THREADS", "").strip()
        return max(1, int(env)) if env else 1


@dataclass
class FunctionalRequest:
    """What to estimate.

    kinds: inf_cdf (P{inf < x}), inf_atom (P{inf = 0}), sup_tail
    (P{sup > x}), occ_mgf (E e^{-u * time above x}), passage_laplace
    (P{passage over x before the kill} = E e^{-s tau}), overshoot_atom
    (P{creep over x}), overshoot_prob (P{overshoot in (lo, hi]}).
    """

    kind: str
    x: float = 0.0
    u: float = 0.0
    lo: float = 0.0
    hi: float = math.inf


@dataclass
class SimResult:
    estimate: float
    se: float
    paths: int
    kind: str


# ------------------------------------------------------------------ #
# jump magnitude samplers


def _magnitude_sampler(spec):
    """Callable (rng, n) -> n jump magnitudes for one side."""
    if isinstance(spec, MEJumpSpec):
        rates = spec.rates
        scale = float(np.max(rates.real))
        real_rates = float(np.max(np.abs(rates.imag))) <= 1e-9 * scale
        if len(spec.num) == 1 and real_rates:
            # scalar numerator over real rates: sum of exponentials
            bs = np.sort(rates.real.copy())

            def hypo(rng, n):
                out = np.zeros(n)
                for b in bs:
                    out += rng.exponential(1.0 / b, n)
                return out

            return hypo
        clusters = spec._clusters
        if real_rates and spec.polyexp_ok and all(
                len(coeffs) == 1 for _, coeffs in clusters):
            bs = np.array([complex(c).real for c, _ in clusters])
            amps = np.array([complex(coeffs[0]) for _, coeffs in clusters])
            if np.max(np.abs(amps.imag)) <= 1e-9 * np.max(np.abs(amps)):
                weights = amps.real / bs
                if np.all(weights > 0) and abs(weights.sum() - 1.0) < 1e-9:
                    probs = weights / weights.sum()

                    def hyper(rng, n):
                        comp = rng.choice(len(bs), size=n, p=probs)
                        return rng.exponential(1.0, n) / bs[comp]

                    return hyper
        tail = lambda y: np.asarray(spec.magnitude_tail(y))
        tail_scale = 1.0
    else:
        lam = spec.intensity
        tail = lambda y: np.array([spec.tail(float(t)) for t in
                                   np.atleast_1d(y)])
        tail_scale = lam

    hi = 1.0
    while float(np.max(tail(np.array([hi])))) > 1e-12 * tail_scale \
            and hi < 1e6:
        hi *= 2.0
    ys = np.linspace(0.0, hi, 16385)
    cdf = 1.0 - np.asarray(tail(ys), dtype=float) / tail_scale
    cdf = np.maximum.accumulate(np.clip(cdf, 0.0, 1.0))

    def table(rng, n):
        return np.interp(rng.random(n) * cdf[-1], cdf, ys)

    return table


def sample_jump(spec, rng: np.random.Generator, n: int) -> np.ndarray:
    """n magnitudes of one side's jump distribution."""
    return _magnitude_sampler(spec)(rng, n)


# ------------------------------------------------------------------ #
# event-grid path layout


class _Layout:
    """Flat per-segment arrays for one batch of killed paths.

    Each path is cut at its jump epochs into K+1 segments; `off` holds the
    first flat segment index of each path (length B+1). Values are exact at
    segment boundaries; bridge extremes are sampled on demand.
    """

    __slots__ = ("B", "theta", "off", "y0", "cont", "dur", "trail_jump",
                 "local", "last", "sigma", "pidx_jump", "t_jump", "sizes")

    def __init__(self, model, s, rng, B):
        lam_p = model.intensity("+")
        lam_m = model.intensity("-")
        lam = lam_p + lam_m
        theta = rng.exponential(1.0 / s, B)
        K = (rng.poisson(lam * theta) if lam > 0
             else np.zeros(B, dtype=np.int64))
        total = int(K.sum())
        pidx = np.repeat(np.arange(B), K)
        t_jump = rng.random(total) * theta[pidx]
        order = np.lexsort((t_jump, pidx))
        t_jump = t_jump[order]

        sizes = np.zeros(total)
        if total:
            if lam_p > 0 and lam_m > 0:
                is_pos = rng.random(total) < lam_p / lam
            else:
                is_pos = np.full(total, lam_p > 0)
            n_pos = int(is_pos.sum())
            if n_pos:
                sizes[is_pos] = sample_jump(model.spec("+"), rng, n_pos)
            if total - n_pos:
                sizes[~is_pos] = -sample_jump(model.spec("-"), rng,
                                              total - n_pos)

        nseg = total + B
        off = np.zeros(B + 1, dtype=np.int64)
        np.cumsum(K + 1, out=off[1:])
        seg_start = np.zeros(nseg)
        seg_end = np.empty(nseg)
        # jump j is the end of segment (local j) and start of segment j+1
        joff = np.zeros(B + 1, dtype=np.int64)
        np.cumsum(K, out=joff[1:])
        if total:
            local_j = np.arange(total) - np.repeat(joff[:-1], K)
            slot = np.repeat(off[:-1], K) + local_j
            seg_start[slot + 1] = t_jump
            seg_end[slot] = t_jump
        seg_end[off[1:] - 1] = theta
        dur = seg_end - seg_start

        sigma = model.sigma
        cont = model.drift * dur
        if sigma > 0:
            cont = cont + sigma * np.sqrt(dur) * rng.standard_normal(nseg)
        trail = np.zeros(nseg)
        if total:
            trail[slot] = sizes
        incr = cont + trail
        cs = np.cumsum(incr)
        cs_prev = np.concatenate([[0.0], cs[:-1]])
        base = np.zeros(B)
        base[1:] = cs[off[1:-1] - 1]
        # cs_prev at a path's first segment equals base exactly, so the
        # path-start value is an exact 0.0 and the zero atom survives
        y0 = cs_prev - np.repeat(base, K + 1)

        self.B = B
        self.theta = theta
        self.off = off
        self.y0 = y0
        self.cont = cont
        self.dur = dur
        self.trail_jump = trail
        self.local = np.arange(nseg) - np.repeat(off[:-1], K + 1)
        self.last = np.zeros(nseg, dtype=bool)
        self.last[off[1:] - 1] = True
        self.sigma = sigma
        self.pidx_jump = pidx[order] if total else pidx
        self.t_jump = t_jump
        self.sizes = sizes

    def seg_max(self, rng) -> np.ndarray:
        """Running maximum of each segment (exact; bridge draw if sigma>0)."""
        if self.sigma == 0:
            return self.y0 + np.maximum(self.cont, 0.0)
        lnu = np.log(rng.random(len(self.y0)))
        disc = self.cont ** 2 - 2.0 * self.sigma ** 2 * self.dur * lnu
        return self.y0 + 0.5 * (self.cont + np.sqrt(disc))

    def seg_min(self, rng) -> np.ndarray:
        if self.sigma == 0:
            return self.y0 + np.minimum(self.cont, 0.0)
        lnu = np.log(rng.random(len(self.y0)))
        disc = self.cont ** 2 - 2.0 * self.sigma ** 2 * self.dur * lnu
        return self.y0 + 0.5 * (self.cont - np.sqrt(disc))

    def path_min(self, rng) -> np.ndarray:
        return np.minimum.reduceat(self.seg_min(rng), self.off[:-1])

    def path_max(self, rng) -> np.ndarray:
        return np.maximum.reduceat(self.seg_max(rng), self.off[:-1])

    def occupation_above(self, x: float) -> np.ndarray:
        """Exact time above x per path (sigma = 0 only)."""
        a = self.cont / np.where(self.dur > 0, self.dur, 1.0)
        above = np.where(self.y0 > x, self.dur, 0.0)
        hit = self.dur > 0
        pos = hit & (self.cont > 0)
        neg = hit & (self.cont < 0)
        t_cross = np.zeros_like(self.dur)
        t_cross[pos | neg] = (x - self.y0[pos | neg]) / a[pos | neg]
        above[pos] = np.clip(self.dur[pos] - t_cross[pos], 0.0,
                             self.dur[pos])
        above[neg] = np.clip(t_cross[neg], 0.0, self.dur[neg])
        return np.add.reduceat(above, self.off[:-1])

    def first_passage(self, x: float, rng):
        """(crossed, creep, overshoot) per path for level x > 0.

        Within a segment the continuous part runs before the trailing jump;
        the first flagged event per path is found by a segmented minimum
        over 2 * local_index + type keys.
        """
        m = self.seg_max(rng)
        post = self.y0 + self.cont + self.trail_jump
        creep_flag = m > x
        jump_flag = (post > x) & ~self.last
        key = np.full(len(self.y0), _SENTINEL)
        key[jump_flag] = 2 * self.local[jump_flag] + 1
        key[creep_flag] = 2 * self.local[creep_flag]
        order = np.lexsort((key, np.repeat(np.arange(self.B),
                                           np.diff(self.off))))
        first = order[self.off[:-1]]
        kmin = key[first]
        crossed = kmin < _SENTINEL
        creep = crossed & (kmin % 2 == 0)
        overshoot = np.where(crossed & ~creep, post[first] - x, 0.0)
        return crossed, creep, overshoot


def _grid_occupation(model, s, rng, B, grid, x, u) -> np.ndarray:
    """e^{-u * time above x} with sigma > 0 via a right-endpoint time grid."""
    lay = _Layout(model, s, rng, B)  # consumes the same layout draws
    out = np.empty(B)
    step = 512
    for lo in range(0, B, step):
        hi = min(lo + step, B)
        nb = hi - lo
        theta = lay.theta[lo:hi]
        h = theta / grid
        incr = (model.drift * h[:, None]
                + model.sigma * np.sqrt(h)[:, None]
                * rng.standard_normal((nb, grid)))
        sel = (lay.pidx_jump >= lo) & (lay.pidx_jump < hi)
        if sel.any():
            p = lay.pidx_jump[sel] - lo
            g = np.minimum((lay.t_jump[sel] / h[p]).astype(np.int64),
                           grid - 1)
            np.add.at(incr, (p, g), lay.sizes[sel])
        path = np.cumsum(incr, axis=1)
        occ = h * np.sum(path > x, axis=1)
        out[lo:hi] = np.exp(-u * occ)
    return out


# ------------------------------------------------------------------ #
# driver


def _batch_statistic(model, s, req: FunctionalRequest, rng, B,
                     grid) -> np.ndarray:
    kind = req.kind
    if kind == "occ_mgf" and model.sigma > 0:
        return _grid_occupation(model, s, rng, B, grid, req.x, req.u)
    lay = _Layout(model, s, rng, B)
    if kind == "inf_cdf":
        return (lay.path_min(rng) < req.x).astype(float)
    if kind == "inf_atom":
        return (lay.path_min(rng) == 0.0).astype(float)
    if kind == "sup_tail":
        return (lay.path_max(rng) > req.x).astype(float)
    if kind == "occ_mgf":
        return np.exp(-req.u * lay.occupation_above(req.x))
    if kind in ("passage_laplace", "overshoot_atom", "overshoot_prob"):
        crossed, creep, over = lay.first_passage(req.x, rng)
        if kind == "passage_laplace":
            return crossed.astype(float)
        if kind == "overshoot_atom":
            return (crossed & creep).astype(float)
        sel = crossed & ~creep & (over > req.lo) & (over <= req.hi)
        return sel.astype(float)
    raise PreconditionError(f"unknown request kind {kind!r}")


def simulate(model: LevyModel, s: float, req: FunctionalRequest,
             config: SimConfig | None = None) -> SimResult:
    """Estimate a killed-path functional with its standard error."""
    config = config or SimConfig()
    if s <= 0:
        raise PreconditionError("the kill rate s must be positive")
    if config.paths <= 1:
        raise PreconditionError("need at least 2 paths")
    n_batches = (config.paths + BATCH - 1) // BATCH

    def run(b: int):
        rng = np.random.Generator(np.random.Philox(key=[config.seed, b]))
        size = BATCH if b < n_batches - 1 else \
            config.paths - BATCH * (n_batches - 1)
        vals = _batch_statistic(model, s, req, rng, size, config.grid)
        return float(vals.sum()), float(vals @ vals), len(vals)

    threads = config.resolved_threads()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(run, range(n_batches)))
    else:
        parts = [run(b) for b in range(n_batches)]

    total = sumsq = 0.0
    n = 0
    for ps, pss, pn in parts:   # fixed order: bit-deterministic
        total += ps
        sumsq += pss
        n += pn
    mean = total / n
    var = max(sumsq - n * mean * mean, 0.0) / (n - 1)
    return SimResult(estimate=mean, se=math.sqrt(var / n), paths=n,
                     kind=req.kind)


def simulate_killed_path(model: LevyModel, s: float,
                         rng: np.random.Generator):
    """One exact killed path at its event epochs (reference, sigma = 0).

    Returns (theta, times, values) with values[i] the position right after
    the i-th event; times[0] = 0 with value 0.
    """
    if model.sigma != 0:
        raise PreconditionError("the reference path walker is for sigma = 0")
    theta = rng.exponential(1.0 / s)
    lam_p = model.intensity("+")
    lam_m = model.intensity("-")
    lam = lam_p + lam_m
    k = rng.poisson(lam * theta) if lam > 0 else 0
    times = np.sort(rng.random(k) * theta)
    values = [0.0]
    t_prev = 0.0
    for t in times:
        y = values[-1] + model.drift * (t - t_prev)
        if lam_p > 0 and (lam_m == 0 or rng.random() < lam_p / lam):
            y += float(sample_jump(model.spec("+"), rng, 1)[0])
        else:
            y -= float(sample_jump(model.spec("-"), rng, 1)[0])
        values.append(y)
        t_prev = t
    return theta, np.concatenate([[0.0], times]), np.array(values)
