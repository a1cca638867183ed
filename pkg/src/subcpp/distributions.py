"""Positive jump-size laws used for claims and for subordinator jumps.

Every law exposes sampling, the right tail, the mean and the moment
generating function together with the supremum of its finite domain.
Divergent moments are reported as ``math.inf`` (an extended real value),
never as an exception, so heavy-tail classification stays a plain
comparison: a law is heavy-tailed iff ``mgf_sup() == 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from scipy import special

from .errors import IntegratedTailUnavailable

__all__ = [
    "ClaimDistribution",
    "Exponential",
    "Gamma",
    "Pareto",
    "Deterministic",
    "from_record",
]


def _check_positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise ValueError(f"{name} must be a finite positive number, got {value!r}")
    return value


class ClaimDistribution:
    """Common interface of the positive jump-size laws.

    Subclasses are frozen dataclasses, so instances are hashable and safe to
    share between threads. Randomness always comes from a caller-owned
    ``numpy.random.Generator``.
    """

    kind: ClassVar[str] = ""
    # Membership in the subexponential class cannot be tested numerically;
    # it is a declared attribute of the law.
    subexponential: ClassVar[bool] = False

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def tail(self, x):
        """P[X > x]."""
        raise NotImplementedError

    def cdf(self, x):
        return 1.0 - self.tail(x)

    def pdf(self, x):
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def second_moment(self) -> float:
        raise NotImplementedError

    def mgf_sup(self) -> float:
        """Supremum of the set of r where E[exp(rX)] is finite."""
        raise NotImplementedError

    def _mgf_inside(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mgf(self, r):
        """E[exp(rX)], with ``inf`` for every nonzero r at or beyond ``mgf_sup()``."""
        r_arr = np.asarray(r, dtype=float)
        inside = (r_arr < self.mgf_sup()) | (r_arr == 0.0)
        out = np.full(r_arr.shape, np.inf)
        if np.any(inside):
            out[inside] = self._mgf_inside(r_arr[inside])
        return out[()] if out.ndim == 0 else out

    def laplace(self, s):
        """E[exp(-sX)]; finite for every s >= 0."""
        return self.mgf(-np.asarray(s, dtype=float))

    def is_heavy_tailed(self) -> bool:
        return self.mgf_sup() == 0.0

    def size_biased(self) -> ClaimDistribution:
        """Law with density proportional to x times the density of this law."""
        raise IntegratedTailUnavailable(f"no size-biased form for {self!r}")

    def sample_sums(self, counts, rng: np.random.Generator) -> np.ndarray:
        """Draw ``sum_{i<=n} X_i`` for every entry n of ``counts`` (0 gives 0)."""
        counts = np.asarray(counts, dtype=np.int64)
        out = np.zeros(counts.shape)
        total = int(counts.sum())
        if total == 0:
            return out
        draws = np.asarray(self.sample(rng, total), dtype=float)
        flat = counts.ravel()
        owner = np.repeat(np.arange(flat.size), flat)
        out.ravel()[:] = np.bincount(owner, weights=draws, minlength=flat.size)
        return out

    def to_record(self) -> dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class Exponential(ClaimDistribution):
    rate: float

    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "rate", _check_positive("rate", self.rate))

    def sample(self, rng, size=None):
        return rng.exponential(1.0 / self.rate, size)

    def sample_sums(self, counts, rng):
        counts = np.asarray(counts, dtype=np.int64)
        out = np.zeros(counts.shape)
        pos = counts > 0
        out[pos] = rng.gamma(counts[pos], 1.0 / self.rate)
        return out

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= 0, 1.0, np.exp(-self.rate * np.maximum(x, 0.0)))[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)))[()]

    def mean(self):
        return 1.0 / self.rate

    def second_moment(self):
        return 2.0 / self.rate**2

    def mgf_sup(self):
        return self.rate

    def _mgf_inside(self, r):
        return self.rate / (self.rate - r)

    def size_biased(self):
        return Gamma(2.0, self.rate)

    def to_record(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class Gamma(ClaimDistribution):
    shape: float
    rate: float

    kind: ClassVar[str] = "gamma"

    def __post_init__(self):
        object.__setattr__(self, "shape", _check_positive("shape", self.shape))
        object.__setattr__(self, "rate", _check_positive("rate", self.rate))

    def sample(self, rng, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    def sample_sums(self, counts, rng):
        counts = np.asarray(counts, dtype=np.int64)
        out = np.zeros(counts.shape)
        pos = counts > 0
        out[pos] = rng.gamma(counts[pos] * self.shape, 1.0 / self.rate)
        return out

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return special.gammaincc(self.shape, self.rate * np.maximum(x, 0.0))[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        xp = np.maximum(x, 0.0)
        dens = np.exp(
            self.shape * math.log(self.rate)
            + special.xlogy(self.shape - 1.0, xp)
            - self.rate * xp
            - special.gammaln(self.shape)
        )
        return np.where(x <= 0, 0.0, dens)[()]

    def mean(self):
        return self.shape / self.rate

    def second_moment(self):
        return self.shape * (self.shape + 1.0) / self.rate**2

    def mgf_sup(self):
        return self.rate

    def _mgf_inside(self, r):
        return (self.rate / (self.rate - r)) ** self.shape

    def size_biased(self):
        return Gamma(self.shape + 1.0, self.rate)

    def to_record(self):
        return {"kind": self.kind, "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class Deterministic(ClaimDistribution):
    value: float

    kind: ClassVar[str] = "deterministic"

    def __post_init__(self):
        object.__setattr__(self, "value", _check_positive("value", self.value))

    def sample(self, rng, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def sample_sums(self, counts, rng):
        return np.asarray(counts, dtype=np.int64) * self.value

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.value, 1.0, 0.0)[()]

    def mean(self):
        return self.value

    def second_moment(self):
        return self.value**2

    def mgf_sup(self):
        return math.inf

    def _mgf_inside(self, r):
        return np.exp(r * self.value)

    def size_biased(self):
        return self

    def to_record(self):
        return {"kind": self.kind, "value": self.value}


def _scaled_upper_gamma_cf(s: float, z: np.ndarray, max_iter: int = 500) -> np.ndarray:
    """exp(z) z**-s Gamma(s, z) from the Legendre continued fraction (modified Lentz).

    Converges quickly for z >= 1 and s <= 0, and avoids the cancellation the
    downward recurrence suffers when z is large.
    """
    tiny = 1e-300
    b = z + 1.0 - s
    c = np.full_like(z, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def _scaled_upper_gamma_small(s: float, z: np.ndarray) -> np.ndarray:
    """z**-s Gamma(s, z) for s <= 0 and 0 < z < 1.

    Lifts s to a nonnegative argument with the scaled recurrence
    G(s) = (z G(s + 1) - exp(-z)) / s, where G(s) = z**-s Gamma(s, z).
    """
    k = math.ceil(-s)
    top = s + k
    if top == 0.0:
        val = special.exp1(z)
    else:
        val = special.gammaincc(top, z) * special.gamma(top) * z ** (-top)
    for j in range(k - 1, -1, -1):
        val = (z * val - np.exp(-z)) / (s + j)
    return val


@dataclass(frozen=True)
class Pareto(ClaimDistribution):
    """Pareto law with support [scale, inf) and tail (scale / x) ** shape."""

    scale: float
    shape: float

    kind: ClassVar[str] = "pareto"
    subexponential: ClassVar[bool] = True

    def __post_init__(self):
        object.__setattr__(self, "scale", _check_positive("scale", self.scale))
        object.__setattr__(self, "shape", _check_positive("shape", self.shape))

    def sample(self, rng, size=None):
        # numpy's pareto is the Lomax law on [0, inf)
        return self.scale * (1.0 + rng.pareto(self.shape, size))

    def tail(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.maximum(x, self.scale)
        return np.where(x < self.scale, 1.0, (self.scale / safe) ** self.shape)[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.maximum(x, self.scale)
        dens = self.shape * self.scale**self.shape / safe ** (self.shape + 1.0)
        return np.where(x < self.scale, 0.0, dens)[()]

    def mean(self):
        if self.shape <= 1.0:
            return math.inf
        return self.scale * self.shape / (self.shape - 1.0)

    def second_moment(self):
        if self.shape <= 2.0:
            return math.inf
        return self.scale**2 * self.shape / (self.shape - 2.0)

    def mgf_sup(self):
        return 0.0

    def _mgf_inside(self, r):
        # r < 0 here. E[e^{rX}] = a * z**a * Gamma(-a, z) with z = -r * scale.
        out = np.ones_like(r)
        neg = r < 0
        z = -r[neg] * self.scale
        a = self.shape
        val = np.empty_like(z)
        zero = z < 1e-200  # 1 - E[exp(-zY)] is below double resolution here
        small = (z < 1.0) & ~zero
        val[zero] = 1.0
        val[small] = a * _scaled_upper_gamma_small(-a, z[small])
        big = z >= 1.0
        val[big] = a * np.exp(-z[big]) * _scaled_upper_gamma_cf(-a, z[big])
        out[neg] = val
        return out

    def size_biased(self):
        if self.shape <= 1.0:
            raise IntegratedTailUnavailable("Pareto law with shape <= 1 has no finite mean")
        return Pareto(self.scale, self.shape - 1.0)

    def to_record(self):
        return {"kind": self.kind, "scale": self.scale, "shape": self.shape}


_KINDS: dict[str, tuple[type[ClaimDistribution], tuple[str, ...]]] = {
    "exponential": (Exponential, ("rate",)),
    "gamma": (Gamma, ("shape", "rate")),
    "deterministic": (Deterministic, ("value",)),
    "pareto": (Pareto, ("scale", "shape")),
}


def from_record(record: dict[str, Any]) -> ClaimDistribution:
    """Build a law from a tagged record such as ``{"kind": "exponential", "rate": 1.0}``.

    Raises ``KeyError``/``ValueError`` on unknown kinds, missing or extra
    fields and invalid parameter values.
    """
    kind = record.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown distribution kind {kind!r}; expected one of {sorted(_KINDS)}")
    cls, fields = _KINDS[kind]
    extra = set(record) - set(fields) - {"kind"}
    if extra:
        raise ValueError(f"unexpected field(s) {sorted(extra)} for kind {kind!r}")
    missing = [f for f in fields if f not in record]
    if missing:
        raise ValueError(f"missing field(s) {missing} for kind {kind!r}")
    return cls(*(record[f] for f in fields))
