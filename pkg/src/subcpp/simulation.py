"""Path simulation and Monte Carlo ruin estimation.

Two exact routes exist for finite-activity subordinators:

``representation``
    Epochs of Y at rate psi(lambda), each carrying an exact Z draw.
``warped``
    Jumps of the subordinator are drawn first, base claims are placed on the
    operational clock and mapped back to calendar time. Slow (one path at a
    time) and kept as a cross-validation oracle.

Gamma subordinators have infinite activity; their paths are discretized on
a clock grid of ``GAMMA_DT`` with exact Gamma increments, and all claims of a
cell are booked at the cell's right end.

Replication splits the paths into fixed-size chunks seeded from
``SeedSequence(seed).spawn``. The chunk layout does not depend on the number
of worker threads, so results are bit-identical for any ``workers``.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import IntegratedTailUnavailable
from .distributions import Exponential
from .ruin import RiskModel
from .subordinated import SubordinatedCPP
from .subordinator import GammaJumps

logger = logging.getLogger(__name__)

__all__ = [
    "RuinEstimate",
    "PathOutcome",
    "YSample",
    "GAMMA_DT",
    "CHUNK_PATHS",
    "sample_y_direct",
    "sample_y_warped",
    "claim_epochs",
    "simulate_surplus_path",
    "max_deficits",
    "mc_ruin",
    "tail_horizon_sweep",
    "pk_exact_ruin",
    "pk_closed_form",
    "trajectory",
]

GAMMA_DT = 1e-2
CHUNK_PATHS = 10_000
BLOCK_EPOCHS = 64
PK_CHUNK = 100_000
ROUTES = ("representation", "warped")


@dataclass(frozen=True)
class RuinEstimate:
    point: float
    std_error: float
    n_paths: int
    horizon: float  # math.inf for infinite-horizon estimates
    seed: int
    capital: float = 0.0
    method: str = "mc"

    @classmethod
    def from_hits(cls, hits: int, n: int, **kw) -> RuinEstimate:
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, **kw)


class PathOutcome(NamedTuple):
    ruined: bool
    ruin_time: float | None
    min_surplus: float


class YSample(NamedTuple):
    y: np.ndarray
    epochs: np.ndarray | None  # distinct jump times of Y, None if unknown
    claims: np.ndarray  # number of base claims N_{Lambda_t}


# ---------------------------------------------------------------------------
# Y_t samplers


def sample_y_direct(p: SubordinatedCPP, t: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Y_t as a compound Poisson sum of Z draws at rate psi(lambda)."""
    counts = rng.poisson(p.effective_rate * t, n)
    z = p.sample_z(rng, int(counts.sum()))
    return np.bincount(np.repeat(np.arange(n), counts), weights=z, minlength=n)


def sample_y_warped(p: SubordinatedCPP, t: float, n: int, rng: np.random.Generator) -> YSample:
    """Y_t = C(Lambda_t) built from the subordinator's own jumps."""
    lam = p.rate
    x_law = p.claim_law
    sub = p.sub
    j = sub.jumps
    if isinstance(j, GammaJumps) or j is None:
        clock = np.asarray(sub.sample_increment(t, rng, n), dtype=float)
        claims = rng.poisson(lam * clock)
        epochs = claims if j is None else None
        return YSample(x_law.sample_sums(claims, rng), epochs, claims)
    drift_claims = rng.poisson(lam * sub.drift * t, n)
    y = x_law.sample_sums(drift_claims, rng)
    n_jumps = rng.poisson(j.rate * t, n)
    k = np.asarray(j.jump_law.sample(rng, int(n_jumps.sum())), dtype=float)
    per_jump = rng.poisson(lam * k)
    owner = np.repeat(np.arange(n), n_jumps)
    y = y + np.bincount(owner, weights=x_law.sample_sums(per_jump, rng), minlength=n)
    epochs = drift_claims + np.bincount(owner, weights=per_jump > 0, minlength=n).astype(np.int64)
    claims = drift_claims + np.bincount(owner, weights=per_jump, minlength=n).astype(np.int64)
    return YSample(y, epochs, claims)


# ---------------------------------------------------------------------------
# single paths


def _warped_claims(p: SubordinatedCPP, horizon: float, rng: np.random.Generator):
    """Calendar times, sizes and clock values of the base claims on [0, horizon]."""
    sub = p.sub
    taus, ks = sub.sample_jumps(horizon, rng)
    post = sub.drift * taus + np.cumsum(ks)
    pre = post - ks
    total = sub.drift * horizon + ks.sum()
    n = rng.poisson(p.rate * total)
    theta = np.sort(rng.uniform(0.0, total, n))
    x = np.asarray(p.claim_law.sample(rng, n), dtype=float)
    j = np.searchsorted(post, theta, side="right")
    jc = np.minimum(j, max(taus.size - 1, 0))
    in_jump = (j < taus.size) & (theta >= (pre[jc] if taus.size else 0.0))
    prev_tau = np.where(j > 0, taus[np.maximum(j - 1, 0)] if taus.size else 0.0, 0.0)
    prev_level = np.where(j > 0, post[np.maximum(j - 1, 0)] if taus.size else 0.0, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        drift_time = prev_tau + (theta - prev_level) / sub.drift
    times = np.where(in_jump, taus[jc] if taus.size else 0.0, drift_time)
    return times, x, theta, (taus, ks)


def _gamma_cells(p: SubordinatedCPP, horizon: float, rng: np.random.Generator):
    n_cells = int(math.ceil(horizon / GAMMA_DT - 1e-9))
    ends = np.minimum(np.arange(1, n_cells + 1) * GAMMA_DT, horizon)
    widths = np.diff(np.concatenate(([0.0], ends)))
    j = p.sub.jumps
    clock = p.sub.drift * widths + rng.gamma(j.shape * widths, 1.0 / j.rate)
    counts = rng.poisson(p.rate * clock)
    sizes = p.claim_law.sample_sums(counts, rng)
    hit = counts > 0
    return ends[hit], sizes[hit]


def claim_epochs(m: RiskModel, horizon: float, rng: np.random.Generator, route: str = "representation"):
    """Times and sizes of the jumps of Y on [0, horizon] for one path."""
    p = m.claims
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if not p.sub.finite_activity:
        return _gamma_cells(p, horizon, rng)
    if route == "representation":
        n = rng.poisson(p.effective_rate * horizon)
        times = np.sort(rng.uniform(0.0, horizon, n))
        return times, np.asarray(p.sample_z(rng, n), dtype=float)
    if route == "warped":
        times, x, _, _ = _warped_claims(p, horizon, rng)
        return times, x
    raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")


def simulate_surplus_path(
    m: RiskModel, horizon: float, rng: np.random.Generator, route: str = "representation"
) -> PathOutcome:
    """Exact ruin check of u + c t - Y_t on [0, horizon] at the jump epochs of Y."""
    times, sizes = claim_epochs(m, horizon, rng, route)
    surplus = m.capital + m.premium_rate * times - np.cumsum(sizes)
    below = np.flatnonzero(surplus < 0)
    lowest = min(m.capital, float(surplus.min())) if surplus.size else m.capital
    if below.size:
        return PathOutcome(True, float(times[below[0]]), lowest)
    return PathOutcome(False, None, lowest)


def trajectory(m: RiskModel, horizon: float, rng: np.random.Generator) -> list[tuple[float, float, float]]:
    """Step trajectory ``(t, surplus, clock)`` of one path.

    Every claim epoch contributes two rows at the same t: surplus just before
    and just after the jump. ``clock`` is the subordinator value Lambda_t at
    the row (its left limit on "before" rows), which locates the time jumps
    the clock performs. Endpoints t = 0 and t = horizon are included.
    """
    p = m.claims
    if not p.sub.finite_activity:
        raise ValueError("trajectories are exported for finite-activity subordinators only")
    times, x, theta, (taus, ks) = _warped_claims(p, horizon, rng)
    sub = p.sub

    def clock_at(t, left=False):
        passed = np.searchsorted(taus, t, side="left" if left else "right")
        return sub.drift * t + (ks[:passed].sum() if passed else 0.0)

    rows = [(0.0, m.capital, 0.0)]
    level = m.capital
    c = m.premium_rate
    uniq, first = np.unique(times, return_index=True)
    totals = np.add.reduceat(x, first) if x.size else np.empty(0)
    paid = 0.0
    for t, amount in zip(uniq, totals):
        before = m.capital + c * t - paid
        paid += amount
        rows.append((float(t), float(before), float(clock_at(t, left=True))))
        rows.append((float(t), float(before - amount), float(clock_at(t))))
    level = m.capital + c * horizon - paid
    rows.append((float(horizon), float(level), float(clock_at(horizon))))
    return rows


# ---------------------------------------------------------------------------
# vectorized engine


def _deficit_chunk(
    m: RiskModel, horizon: float, n: int, rng: np.random.Generator, cap: float
) -> np.ndarray:
    """Running maximum of Y_t - c t over claim epochs in [0, horizon], floored at 0.

    A path stops once its deficit exceeds ``cap``; the returned value is then
    only known to be larger than ``cap``. Every block draws the same amount
    of randomness for all paths, so a path's history is a prefix-stable
    function of the chunk seed, independent of ``horizon`` and ``cap``.
    """
    p = m.claims
    c = m.premium_rate
    t = np.zeros(n)
    y = np.zeros(n)
    dmax = np.zeros(n)
    active = np.ones(n, dtype=bool)
    if p.sub.finite_activity:
        psi = p.effective_rate
        while active.any():
            gaps = rng.exponential(1.0 / psi, (n, BLOCK_EPOCHS))
            z = p.sample_z(rng, n * BLOCK_EPOCHS).reshape(n, BLOCK_EPOCHS)
            times = t[:, None] + np.cumsum(gaps, axis=1)
            ys = y[:, None] + np.cumsum(z, axis=1)
            valid = (times <= horizon) & active[:, None]
            d = np.where(valid, ys - c * times, -np.inf)
            dmax = np.maximum(dmax, d.max(axis=1))
            t, y = times[:, -1], ys[:, -1]
            active &= (t <= horizon) & (dmax <= cap)
        return dmax
    j = p.sub.jumps
    block = 128
    n_cells = int(math.ceil(horizon / GAMMA_DT - 1e-9))
    done = 0
    while done < n_cells and active.any():
        k = min(block, n_cells - done)
        ends = np.minimum((done + np.arange(1, k + 1)) * GAMMA_DT, horizon)
        widths = np.diff(np.concatenate(([done * GAMMA_DT], ends)))
        clock = p.sub.drift * widths + rng.gamma(j.shape * widths, 1.0 / j.rate, (n, k))
        counts = rng.poisson(p.rate * clock)
        ys = y[:, None] + np.cumsum(p.claim_law.sample_sums(counts, rng), axis=1)
        d = np.where(active[:, None] & (counts > 0), ys - c * ends, -np.inf)
        dmax = np.maximum(dmax, d.max(axis=1))
        y = ys[:, -1]
        done += k
        active &= dmax <= cap
    return dmax


def _warped_deficits(m: RiskModel, horizon: float, n: int, rng: np.random.Generator) -> np.ndarray:
    out = np.zeros(n)
    for i in range(n):
        times, x = claim_epochs(m, horizon, rng, "warped")
        if x.size:
            out[i] = max(0.0, float(np.max(np.cumsum(x) - m.premium_rate * times)))
    return out


def _chunks(n_paths: int, seed: int, chunk: int):
    n_chunks = -(-n_paths // chunk)
    seqs = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(chunk, n_paths - i * chunk) for i in range(n_chunks)]
    return list(zip(seqs, sizes))


def max_deficits(
    m: RiskModel,
    horizon: float,
    n_paths: int,
    seed: int,
    cap: float = math.inf,
    workers: int = 1,
    route: str = "representation",
) -> np.ndarray:
    """max(0, sup_{t <= horizon} (Y_t - c t)) for ``n_paths`` independent paths.

    Ruin from capital u happens iff the value exceeds u, so one call serves
    a whole capital grid with common random numbers.
    """
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    if not horizon > 0:
        raise ValueError("horizon must be positive")

    def run(item):
        seq, size = item
        rng = np.random.default_rng(seq)
        if route == "warped" and m.claims.sub.finite_activity:
            return _warped_deficits(m, horizon, size, rng)
        return _deficit_chunk(m, horizon, size, rng, cap)

    items = _chunks(n_paths, seed, CHUNK_PATHS)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, items))
    else:
        parts = [run(it) for it in items]
    return np.concatenate(parts)


def mc_ruin(
    m: RiskModel,
    horizon: float,
    n_paths: int,
    seed: int,
    workers: int = 1,
    route: str = "representation",
) -> RuinEstimate:
    """Finite-horizon ruin frequency from capital ``m.capital``."""
    if n_paths < 100:
        raise ValueError("n_paths must be at least 100")
    d = max_deficits(m, horizon, n_paths, seed, cap=m.capital, workers=workers, route=route)
    return RuinEstimate.from_hits(
        int(np.count_nonzero(d > m.capital)), n_paths, horizon=horizon, seed=seed, capital=m.capital
    )


def tail_horizon_sweep(
    m: RiskModel, u_grid, horizon: float, n_paths: int, seed: int, workers: int = 1
) -> list[RuinEstimate]:
    """Finite-horizon ruin estimates over a capital grid, all from the same paths."""
    u_grid = np.asarray(u_grid, dtype=float)
    if u_grid.size == 0 or np.any(np.diff(u_grid) <= 0):
        raise ValueError("capital grid must be nonempty and strictly increasing")
    d = max_deficits(m, horizon, n_paths, seed, cap=float(u_grid[-1]), workers=workers)
    return [
        RuinEstimate.from_hits(int(np.count_nonzero(d > u)), n_paths, horizon=horizon, seed=seed, capital=float(u))
        for u in u_grid
    ]


# ---------------------------------------------------------------------------
# infinite horizon


def pk_closed_form(m: RiskModel, u):
    """(lambda / (c mu)) exp(-(mu - lambda / c) u) for exponential claims, identity clock."""
    p = m.claims
    x = p.claim_law
    if not (p.sub.is_pure_drift and p.sub.drift == 1.0 and isinstance(x, Exponential)):
        raise ValueError("closed form needs exponential claims and the identity time change")
    m.require_net_profit()
    lam, c, mu = p.rate, m.premium_rate, x.rate
    return (lam / (c * mu) * np.exp(-(mu - lam / c) * np.asarray(u, dtype=float)))[()]


def _pk_chunk(p: SubordinatedCPP, load: float, n: int, rng: np.random.Generator) -> np.ndarray:
    ladders = rng.geometric(1.0 - load, n) - 1
    total = int(ladders.sum())
    heights = rng.random(total) * p.sample_z_size_biased(rng, total)
    return np.bincount(np.repeat(np.arange(n), ladders), weights=heights, minlength=n)


def pk_exact_ruin(m: RiskModel, n_geom: int, seed: int, capital=None, workers: int = 1):
    """Infinite-horizon ruin probability via the Pollaczeck-Khinchine representation.

    Psi(u) = P[L_1 + ... + L_G > u] with G geometric, P[G = n] = (1 - q) q**n,
    q = E[Y_1] / c, and L_i drawn from the integrated tail of Z as U * Z_sb
    (U uniform, Z_sb size-biased). ``capital`` may be a grid, in which case a
    list of estimates sharing the same draws is returned.
    """
    m.require_net_profit()
    p = m.claims
    load = p.expected_claims() / m.premium_rate
    grid = np.atleast_1d(np.asarray(m.capital if capital is None else capital, dtype=float))
    try:
        p.claim_law.size_biased()
        if p.sub.jumps is not None and p.sub.finite_activity:
            p.sub.jumps.jump_law.size_biased()
    except IntegratedTailUnavailable as exc:
        warnings.warn(f"integrated tail unavailable ({exc}); falling back to mc_ruin with horizon 1e3")
        out = [mc_ruin(m.with_capital(u), 1e3, n_geom, seed) for u in grid]
        return out if np.ndim(capital) else out[0]

    def run(item):
        seq, size = item
        return _pk_chunk(p, load, size, np.random.default_rng(seq))

    items = _chunks(n_geom, seed, PK_CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            sums = np.concatenate(list(pool.map(run, items)))
    else:
        sums = np.concatenate([run(it) for it in items])
    out = [
        RuinEstimate.from_hits(
            int(np.count_nonzero(sums > u)), n_geom, horizon=math.inf, seed=seed, capital=float(u), method="pk"
        )
        for u in grid
    ]
    return out if np.ndim(capital) else out[0]
