"""The subordinated claims process Y = C(Lambda_t) in its compound Poisson form.

Y jumps at rate psi(lambda), where psi is the Laplace exponent of the
subordinator. Its jump size Z is a mixture of a single base claim X (weight
drift * lambda / psi(lambda)) and a cluster: the sum of N >= 1 base claims
collected while the clock jumps over an interval of length t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import distributions
from .distributions import ClaimDistribution
from .errors import InfiniteActivityError
from .subordinator import Subordinator

__all__ = ["BaseCPP", "SubordinatedCPP", "TailClass", "conditioned_poisson"]


@dataclass(frozen=True)
class BaseCPP:
    """Compound Poisson claims process with ``rate`` claims per unit time."""

    rate: float
    claim_law: ClaimDistribution

    def __post_init__(self):
        rate = float(self.rate)
        if not (rate > 0 and math.isfinite(rate)):
            raise ValueError(f"claim rate must be positive, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)

    def expected_claims(self) -> float:
        return self.rate * self.claim_law.mean()


@dataclass(frozen=True)
class TailClass:
    heavy: bool
    reason: str

    @property
    def label(self) -> str:
        return "heavy" if self.heavy else "light"


def conditioned_poisson(mean, rng: np.random.Generator) -> np.ndarray:
    """Exact draws of N ~ Poisson(mean) conditioned on N >= 1.

    The first epoch of a unit-interval Poisson process with intensity
    ``mean``, given that one occurs, is drawn by inverting its truncated
    exponential CDF; the remaining count on the rest of the interval is an
    unconditioned Poisson variable. No retry loop is involved.
    """
    mean = np.asarray(mean, dtype=float)
    u = rng.random(mean.shape)
    p_any = -np.expm1(-mean)
    first = -np.log1p(-u * p_any) / mean
    first = np.minimum(first, 1.0)
    return 1 + rng.poisson(mean * (1.0 - first))


@dataclass(frozen=True)
class SubordinatedCPP:
    base: BaseCPP
    sub: Subordinator = field(default_factory=Subordinator.identity)

    @property
    def rate(self) -> float:
        """Intensity lambda of the base process."""
        return self.base.rate

    @property
    def claim_law(self) -> ClaimDistribution:
        return self.base.claim_law

    @property
    def effective_rate(self) -> float:
        """psi(lambda): jumps of Y per unit time."""
        return float(self.sub.laplace_exponent(self.base.rate))

    def expected_claims(self) -> float:
        """E[Y_1] = lambda E[X] E[Lambda_1]."""
        return self.base.expected_claims() * self.sub.mean()

    def mean_z(self) -> float:
        return self.expected_claims() / self.effective_rate

    def z_mixture_weights(self) -> tuple[float, float]:
        """(w_single, w_cluster) of the mixture defining Z."""
        psi = self.effective_rate
        w_single = self.sub.drift * self.base.rate / psi
        return w_single, 1.0 - w_single

    # sampling ---------------------------------------------------------

    def sample_z(self, rng: np.random.Generator, size: int | None = None, diagnostics: dict | None = None):
        """Exact draws from the jump law of Y.

        ``diagnostics``, if given, accumulates ``proposals`` and ``accepted``
        counts of the cluster-duration rejection step.
        """
        if not self.sub.finite_activity:
            raise InfiniteActivityError(
                "exact Z sampling needs a finite-activity subordinator; use path simulation"
            )
        scalar = size is None
        n = 1 if scalar else int(size)
        x_law = self.base.claim_law
        w_single, w_cluster = self.z_mixture_weights()
        if w_cluster <= 0.0:
            out = np.asarray(x_law.sample(rng, n), dtype=float)
            return float(out[0]) if scalar else out
        out = np.empty(n)
        single = rng.random(n) < w_single
        n_single = int(single.sum())
        out[single] = x_law.sample(rng, n_single)
        n_cluster = n - n_single
        if n_cluster:
            t, proposals = self.sub.sample_cluster_durations(self.base.rate, n_cluster, rng)
            if diagnostics is not None:
                diagnostics["proposals"] = diagnostics.get("proposals", 0) + proposals
                diagnostics["accepted"] = diagnostics.get("accepted", 0) + n_cluster
            counts = conditioned_poisson(self.base.rate * t, rng)
            out[~single] = x_law.sample_sums(counts, rng)
        return float(out[0]) if scalar else out

    def sample_z_size_biased(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draws from the size-biased jump law x P_Z(dx) / E[Z].

        Single claims are picked with probability drift / E[Lambda_1]; a
        cluster then uses a size-biased duration t and one size-biased claim
        plus Poisson(lambda t) ordinary claims.
        """
        x_law = self.base.claim_law
        xs = x_law.size_biased()
        j = self.sub.jumps
        p_single = self.sub.drift / self.sub.mean()
        out = np.empty(size)
        if j is None:
            return np.asarray(xs.sample(rng, size), dtype=float)
        single = rng.random(size) < p_single
        m = size - int(single.sum())
        out[single] = xs.sample(rng, size - m)
        if m:
            if self.sub.finite_activity:
                t = np.asarray(j.jump_law.size_biased().sample(rng, m), dtype=float)
            else:
                # t nu(dt) = a exp(-b t) dt for the Gamma subordinator
                t = rng.exponential(1.0 / j.rate, m)
            extra = rng.poisson(self.base.rate * t)
            out[~single] = np.asarray(xs.sample(rng, m), dtype=float) + x_law.sample_sums(extra, rng)
        return out

    # transforms -------------------------------------------------------

    def mgf_z(self, r):
        """M_Z(r) = 1 - psi(lambda (1 - M_X(r))) / psi(lambda), ``inf`` off-domain."""
        r_arr = np.asarray(r, dtype=float)
        mx = np.asarray(self.base.claim_law.mgf(r_arr), dtype=float)
        arg = self.base.rate * (1.0 - mx)
        with np.errstate(invalid="ignore"):
            psi_arg = np.where(np.isfinite(arg), self.sub.laplace_exponent(np.where(np.isfinite(arg), arg, 0.0)), -np.inf)
            out = 1.0 - psi_arg / self.effective_rate
        out = np.where(np.isfinite(out), out, np.inf)
        return out[()] if out.ndim == 0 else out

    def laplace_y1(self, u):
        """E[exp(-u Y_1)] = exp(-psi(lambda (1 - E[exp(-uX)])))."""
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise ValueError("laplace_y1 needs u >= 0; use mgf_z for exponential moments")
        arg = self.base.rate * (1.0 - self.base.claim_law.laplace(u))
        return np.exp(-self.sub.laplace_exponent(arg))[()]

    def tail_z_mc(self, x, n: int, rng: np.random.Generator, chunk: int = 1_000_000):
        """Empirical P[Z > x] from ``n`` exact draws, with binomial standard errors.

        ``x`` may be an array; all points share the same draws.
        """
        if n < 1:
            raise ValueError("n must be >= 1")
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        order = np.argsort(x_arr)
        hits = np.zeros(x_arr.size, dtype=np.int64)
        done = 0
        while done < n:
            m = min(chunk, n - done)
            z = np.sort(self.sample_z(rng, m))
            hits += m - np.searchsorted(z, x_arr[order], side="right")[np.argsort(order)]
            done += m
        p = hits / n
        se = np.sqrt(p * (1.0 - p) / n)
        if np.ndim(x) == 0:
            return float(p[0]), float(se[0])
        return p, se

    def classify_y_tail(self) -> TailClass:
        x_heavy = self.base.claim_law.is_heavy_tailed()
        s_heavy = self.sub.is_heavy_tailed()
        if x_heavy and s_heavy:
            return TailClass(True, "claims and subordinator")
        if x_heavy:
            return TailClass(True, "claims")
        if s_heavy:
            return TailClass(True, "subordinator")
        return TailClass(False, "claims and subordinator light-tailed")

    # config -----------------------------------------------------------

    def to_record(self) -> dict[str, Any]:
        return {
            "base": {"rate": self.base.rate, "claim_law": self.base.claim_law.to_record()},
            "subordinator": self.sub.to_record(),
        }

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> SubordinatedCPP:
        base = record["base"]
        sub = record.get("subordinator")
        return cls(
            BaseCPP(base["rate"], distributions.from_record(base["claim_law"])),
            Subordinator.identity() if sub is None else Subordinator.from_record(sub),
        )
