"""Levy subordinators: drift plus an optional compound Poisson or Gamma jump part."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from . import distributions
from .distributions import ClaimDistribution
from .errors import InfiniteActivityError, NotNormalizableError, NotNormalizedError

__all__ = [
    "CompoundPoissonJumps",
    "GammaJumps",
    "Subordinator",
    "NORMALIZATION_TOL",
]

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class CompoundPoissonJumps:
    """Jumps arriving at ``rate`` per unit time with sizes drawn from ``jump_law``."""

    rate: float
    jump_law: ClaimDistribution

    def __post_init__(self):
        rate = float(self.rate)
        if not (rate > 0 and math.isfinite(rate)):
            raise ValueError(f"jump rate must be positive, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)


@dataclass(frozen=True)
class GammaJumps:
    """Gamma subordinator: Lambda_t ~ Gamma(shape * t, rate), Levy density a e^{-bx}/x."""

    shape: float
    rate: float

    def __post_init__(self):
        for name in ("shape", "rate"):
            v = float(getattr(self, name))
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"gamma subordinator {name} must be positive, got {v!r}")
            object.__setattr__(self, name, v)


JumpPart = Union[None, CompoundPoissonJumps, GammaJumps]


@dataclass(frozen=True)
class Subordinator:
    drift: float = 1.0
    jumps: JumpPart = None

    def __post_init__(self):
        drift = float(self.drift)
        if not (drift >= 0 and math.isfinite(drift)):
            raise ValueError(f"drift must be a finite nonnegative number, got {self.drift!r}")
        object.__setattr__(self, "drift", drift)
        if self.jumps is None and drift == 0.0:
            raise ValueError("zero drift without jumps is the null process, not a time change")

    # constructors -----------------------------------------------------

    @classmethod
    def identity(cls) -> Subordinator:
        return cls(1.0, None)

    @classmethod
    def compound_poisson(cls, drift: float, rate: float, jump_law: ClaimDistribution) -> Subordinator:
        return cls(drift, CompoundPoissonJumps(rate, jump_law))

    @classmethod
    def gamma(cls, shape: float, rate: float, drift: float = 0.0) -> Subordinator:
        return cls(drift, GammaJumps(shape, rate))

    # structure --------------------------------------------------------

    @property
    def is_pure_drift(self) -> bool:
        return self.jumps is None

    @property
    def finite_activity(self) -> bool:
        return not isinstance(self.jumps, GammaJumps)

    def jump_mean_contribution(self) -> float:
        """Integral of x against the Levy measure."""
        j = self.jumps
        if j is None:
            return 0.0
        if isinstance(j, CompoundPoissonJumps):
            return j.rate * j.jump_law.mean()
        return j.shape / j.rate

    def mean(self) -> float:
        """E[Lambda_1]; ``inf`` when the jump law has no finite mean."""
        return self.drift + self.jump_mean_contribution()

    def variance(self) -> float:
        j = self.jumps
        if j is None:
            return 0.0
        if isinstance(j, CompoundPoissonJumps):
            return j.rate * j.jump_law.second_moment()
        return j.shape / j.rate**2

    def check_time_normalized(self, tol: float = NORMALIZATION_TOL) -> tuple[bool, float]:
        """Return ``(|E[Lambda_1] - 1| <= tol, |E[Lambda_1] - 1|)``.

        Raises NotNormalizableError when E[Lambda_1] is infinite.
        """
        m = self.mean()
        if not math.isfinite(m):
            raise NotNormalizableError(
                "subordinator is not normalizable: its jump law has an infinite mean"
            )
        dev = abs(m - 1.0)
        return dev <= tol, dev

    def require_time_normalized(self) -> None:
        ok, dev = self.check_time_normalized()
        if not ok:
            raise NotNormalizedError(f"E[Lambda_1] deviates from 1 by {dev:.3e}")

    def laplace_domain_inf(self) -> float:
        """Infimum of the arguments u at which the Laplace exponent is finite."""
        j = self.jumps
        if j is None:
            return -math.inf
        if isinstance(j, CompoundPoissonJumps):
            return -j.jump_law.mgf_sup()
        return -j.rate

    def is_heavy_tailed(self) -> bool:
        """Whether Lambda_1 has no positive exponential moment."""
        return self.laplace_domain_inf() == 0.0

    # Laplace exponent -------------------------------------------------

    def laplace_exponent(self, u):
        """psi(u) with E[exp(-u Lambda_t)] = exp(-t psi(u)).

        Defined on the whole real line; returns ``-inf`` where the exponential
        moment diverges (u at or below ``laplace_domain_inf()``).
        """
        u_arr = np.asarray(u, dtype=float)
        out = self.drift * u_arr
        j = self.jumps
        if isinstance(j, CompoundPoissonJumps):
            # inf from the jump law mgf becomes -inf here
            out = out + j.rate * (1.0 - j.jump_law.laplace(u_arr))
        elif isinstance(j, GammaJumps):
            arg = 1.0 + u_arr / j.rate
            with np.errstate(divide="ignore", invalid="ignore"):
                out = out + np.where(arg > 0, j.shape * np.log(np.where(arg > 0, arg, 1.0)), -np.inf)
        out = np.asarray(out, dtype=float)
        return out[()] if out.ndim == 0 else out

    # sampling ---------------------------------------------------------

    def sample_increment(self, dt: float, rng: np.random.Generator, size=None):
        """Exact draw(s) of Lambda_{t+dt} - Lambda_t."""
        if not dt > 0:
            raise ValueError("dt must be positive")
        base = self.drift * dt
        j = self.jumps
        if j is None:
            return base if size is None else np.full(size, base)
        if isinstance(j, GammaJumps):
            return base + rng.gamma(j.shape * dt, 1.0 / j.rate, size)
        counts = rng.poisson(j.rate * dt, size)
        return base + j.jump_law.sample_sums(counts, rng)[()]

    def sample_jumps(self, horizon: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
        """Jump epochs (sorted) and sizes on [0, horizon]."""
        if not horizon > 0:
            raise ValueError("horizon must be positive")
        j = self.jumps
        if j is None:
            return np.empty(0), np.empty(0)
        if isinstance(j, GammaJumps):
            raise InfiniteActivityError(
                "Gamma subordinator has infinite activity: discretized paths only"
            )
        n = rng.poisson(j.rate * horizon)
        times = np.sort(rng.uniform(0.0, horizon, n))
        sizes = np.asarray(j.jump_law.sample(rng, n), dtype=float)
        return times, sizes

    def sample_cluster_durations(self, intensity: float, size: int, rng: np.random.Generator):
        """Draw t from the law proportional to (1 - exp(-intensity t)) nu(dt).

        Rejection from the jump law with acceptance probability
        1 - exp(-intensity t). Returns ``(durations, proposals)``.
        """
        j = self.jumps
        if not isinstance(j, CompoundPoissonJumps):
            raise InfiniteActivityError("cluster durations need a compound Poisson jump part")
        out = np.empty(size)
        filled = 0
        proposals = 0
        while filled < size:
            need = size - filled
            batch = max(need + need // 2, 16)
            k = np.asarray(j.jump_law.sample(rng, batch), dtype=float)
            u = rng.random(batch)
            acc = k[u < -np.expm1(-intensity * k)]
            take = min(acc.size, need)
            out[filled : filled + take] = acc[:take]
            filled += take
            proposals += batch
        return out, proposals

    # config -----------------------------------------------------------

    def to_record(self) -> dict[str, Any]:
        j = self.jumps
        if j is None:
            jumps: dict[str, Any] = {"kind": "none"}
        elif isinstance(j, CompoundPoissonJumps):
            jumps = {"kind": "compound_poisson", "rate": j.rate, "jump_law": j.jump_law.to_record()}
        else:
            jumps = {"kind": "gamma", "shape": j.shape, "rate": j.rate}
        return {"drift": self.drift, "jumps": jumps}

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> Subordinator:
        drift = record.get("drift", 0.0)
        jumps = record.get("jumps") or {"kind": "none"}
        kind = jumps.get("kind", "none")
        if kind == "none":
            return cls(drift, None)
        if kind == "compound_poisson":
            return cls(drift, CompoundPoissonJumps(jumps["rate"], distributions.from_record(jumps["jump_law"])))
        if kind == "gamma":
            return cls(drift, GammaJumps(jumps["shape"], jumps["rate"]))
        raise ValueError(f"unknown jump kind {kind!r}; expected none, compound_poisson or gamma")
