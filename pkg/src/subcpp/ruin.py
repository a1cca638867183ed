"""Adjustment coefficients and asymptotic ruin probabilities.

Light tails: the adjustment function
    Theta(r) = -psi(lambda (1 - M_X(r))) - c r
is convex with Theta(0) = 0 and Theta'(0) = E[Y_1] - c < 0, so its first
positive sign change is the adjustment coefficient. With the identity
subordinator it reduces to the classical lambda (M_X(r) - 1) - c r.

Heavy tails: closed-form tail and ruin asymptotics for regularly varying
subordinators with constant slowly varying part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from .errors import HeavyTailError, NetProfitViolated, NoRootError, PreconditionError
from .subordinated import SubordinatedCPP
from .subordinator import CompoundPoissonJumps, Subordinator
from .distributions import Pareto

__all__ = [
    "RiskModel",
    "AdjustmentResult",
    "RegularVariationSpec",
    "adjustment_function",
    "solve_adjustment",
    "cl_asymptotic_ruin",
    "subexp_tail_equivalence",
    "regular_variation_of",
    "rv_tail_formula",
    "rv_tail_of_z",
    "karamata_ruin_asymptotic",
    "adjustment_curves",
]

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class RiskModel:
    """Surplus process u + c t - Y_t."""

    premium_rate: float
    claims: SubordinatedCPP
    capital: float = 0.0

    def __post_init__(self):
        c = float(self.premium_rate)
        if not (c > 0 and math.isfinite(c)):
            raise ValueError(f"premium rate must be positive, got {self.premium_rate!r}")
        u = float(self.capital)
        if not (u >= 0 and math.isfinite(u)):
            raise ValueError(f"capital must be a finite nonnegative number, got {self.capital!r}")
        object.__setattr__(self, "premium_rate", c)
        object.__setattr__(self, "capital", u)

    @property
    def safety_margin(self) -> float:
        """c - E[Y_1]."""
        return self.premium_rate - self.claims.expected_claims()

    def net_profit(self) -> bool:
        return self.safety_margin > 0

    def require_net_profit(self) -> None:
        if not self.net_profit():
            raise NetProfitViolated(
                f"premium rate {self.premium_rate} does not exceed expected claims "
                f"{self.claims.expected_claims()} per unit time"
            )

    def base_model(self) -> RiskModel:
        """The same model with the identity time change."""
        return replace(self, claims=replace(self.claims, sub=Subordinator.identity()))

    def with_capital(self, capital: float) -> RiskModel:
        return replace(self, capital=capital)


@dataclass(frozen=True)
class AdjustmentResult:
    coefficient: float
    bracket: tuple[float, float]
    residual: float
    # None when the mgf derivative is infinite at the root
    asymptotic_prefactor: float | None
    iterations: int = 0


@dataclass(frozen=True)
class RegularVariationSpec:
    """Tail x**-index * constant."""

    index: float
    constant: float

    def __post_init__(self):
        if not self.index > 1:
            raise ValueError("regular-variation index must exceed 1 for a finite mean")
        if not self.constant > 0:
            raise ValueError("slowly varying constant must be positive")


def adjustment_function(m: RiskModel, r):
    """Theta(r) for the subordinated model; ``inf`` outside the domain."""
    p = m.claims
    r_arr = np.asarray(r, dtype=float)
    mx = np.asarray(p.claim_law.mgf(r_arr), dtype=float)
    arg = p.rate * (1.0 - mx)
    finite = np.isfinite(arg)
    psi = np.where(finite, p.sub.laplace_exponent(np.where(finite, arg, 0.0)), -np.inf)
    out = -psi - m.premium_rate * r_arr
    return out[()] if out.ndim == 0 else out


def _theta(m: RiskModel, r: float) -> float:
    return float(adjustment_function(m, r))


def solve_adjustment(m: RiskModel, start: float = 1e-8, boundary_tol: float = 1e-12) -> AdjustmentResult:
    """Non-trivial root of the adjustment function plus the Cramer-Lundberg prefactor.

    The bracket grows geometrically from ``start`` until the function turns
    positive; if it diverges first, the domain boundary is located by
    bisection and NoRootError is raised when no positive value lies before it.
    """
    m.require_net_profit()
    cls = m.claims.classify_y_tail()
    if cls.heavy:
        raise HeavyTailError(f"heavy-tailed claims process ({cls.reason}); no adjustment coefficient")

    lo = start
    if not _theta(m, lo) < 0:
        raise PreconditionError(f"adjustment function is not negative at the bracket start {lo}")
    hi = 2.0 * lo
    while True:
        v = _theta(m, hi)
        if not math.isfinite(v):
            lo, hi = _locate_boundary(m, lo, hi, boundary_tol)
            break
        if v > 0:
            break
        lo, hi = hi, 2.0 * hi
        if hi > 1e12:
            raise NoRootError("adjustment function stays negative on (0, 1e12)")

    root, info = optimize.brentq(lambda r: _theta(m, r), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, full_output=True)
    residual = _theta(m, root)
    if abs(residual) >= RESIDUAL_TOL:
        raise NoRootError(f"root refinement stalled with residual {residual:.3e}")
    return AdjustmentResult(root, (lo, hi), residual, _prefactor(m, root), info.iterations)


def _locate_boundary(m: RiskModel, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Shrink [lo, hi] (finite-negative, divergent) to a sign-change bracket."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        v = _theta(m, mid)
        if not math.isfinite(v):
            hi = mid
        elif v > 0:
            return lo, mid
        else:
            lo = mid
    raise NoRootError(
        f"adjustment coefficient does not exist: the function stays negative up to the "
        f"domain boundary near r = {hi:.12g}"
    )


def _prefactor(m: RiskModel, root: float) -> float | None:
    p = m.claims
    h = 1e-6 * root
    up, down = float(p.mgf_z(root + h)), float(p.mgf_z(root - h))
    if not (math.isfinite(up) and math.isfinite(down)):
        return None
    deriv = (up - down) / (2.0 * h)
    denom = p.effective_rate * deriv - m.premium_rate
    if not denom > 0:
        return None
    return m.safety_margin / denom


def cl_asymptotic_ruin(m: RiskModel, a: AdjustmentResult, u):
    """prefactor * exp(-R u)."""
    if a.asymptotic_prefactor is None:
        raise PreconditionError("asymptotic prefactor undefined: M_Z' is infinite at the root")
    return (a.asymptotic_prefactor * np.exp(-a.coefficient * np.asarray(u, dtype=float)))[()]


def subexp_tail_equivalence(p: SubordinatedCPP, x):
    """(lambda / psi(lambda)) P[X > x], the large-x equivalent of P[Z > x]."""
    if p.sub.is_heavy_tailed():
        raise PreconditionError("tail equivalence needs a light-tailed subordinator")
    p.sub.require_time_normalized()
    if not p.claim_law.subexponential:
        raise PreconditionError(f"claim law {p.claim_law!r} is not declared subexponential")
    return (p.rate / p.effective_rate * p.claim_law.tail(x))[()]


def regular_variation_of(sub: Subordinator) -> RegularVariationSpec:
    """Tail of Lambda_1 for a compound Poisson subordinator with Pareto jumps.

    P[Lambda_1 > x] ~ rate * P[K > x] = rate * scale**shape * x**-shape.
    """
    j = sub.jumps
    if not (isinstance(j, CompoundPoissonJumps) and isinstance(j.jump_law, Pareto)):
        raise PreconditionError("regular variation is only derived for Pareto subordinator jumps")
    k = j.jump_law
    return RegularVariationSpec(k.shape, j.rate * k.scale**k.shape)


def _check_rv_preconditions(p: SubordinatedCPP, spec: RegularVariationSpec) -> None:
    p.sub.require_time_normalized()
    j = p.sub.jumps
    if not p.sub.is_heavy_tailed():
        raise PreconditionError("subordinator is light-tailed; its tail is not regularly varying")
    if isinstance(j, CompoundPoissonJumps) and isinstance(j.jump_law, Pareto):
        if not math.isclose(j.jump_law.shape, spec.index, rel_tol=1e-12):
            raise PreconditionError(
                f"spec index {spec.index} disagrees with the subordinator tail index {j.jump_law.shape}"
            )
    x = p.claim_law
    if x.is_heavy_tailed():
        if not (isinstance(x, Pareto) and x.shape > spec.index):
            raise PreconditionError("claim tail must be o(x**-index): light or Pareto with a larger shape")


def rv_tail_formula(effective_rate: float, mean_claims: float, spec: RegularVariationSpec, z):
    """(1 / psi) (lambda E[X])**rho z**-rho L."""
    z = np.asarray(z, dtype=float)
    return (mean_claims**spec.index * spec.constant * z ** (-spec.index) / effective_rate)[()]


def rv_tail_of_z(p: SubordinatedCPP, spec: RegularVariationSpec, z):
    """Regularly varying equivalent of P[Z > z] inherited from the subordinator."""
    _check_rv_preconditions(p, spec)
    return rv_tail_formula(p.effective_rate, p.base.expected_claims(), spec, z)


def karamata_ruin_asymptotic(m: RiskModel, spec: RegularVariationSpec, u):
    """(1/(c - lambda E[X])) (1/(rho - 1)) (lambda E[X])**rho u**(1 - rho) L."""
    m.require_net_profit()
    _check_rv_preconditions(m.claims, spec)
    le = m.claims.base.expected_claims()
    u = np.asarray(u, dtype=float)
    rho = spec.index
    return (le**rho * spec.constant * u ** (1.0 - rho) / ((m.premium_rate - le) * (rho - 1.0)))[()]


def adjustment_curves(base: RiskModel, subordinators, r_grid):
    """Curve table for the base model and each subordinator, plus per-model roots.

    Returns ``(columns, rows, roots)``; each roots entry is
    ``(label, AdjustmentResult | None, error message | None)``.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    models = [("base", base.base_model())]
    for i, sub in enumerate(subordinators):
        models.append((f"sub{i}", replace(base, claims=replace(base.claims, sub=sub))))
    columns = ["r"] + [f"theta_{label}" for label, _ in models]
    values = [r_grid] + [np.asarray(adjustment_function(mm, r_grid), dtype=float) for _, mm in models]
    rows = [tuple(float(col[i]) for col in values) for i in range(r_grid.size)]
    roots = []
    for label, mm in models:
        try:
            roots.append((label, solve_adjustment(mm), None))
        except PreconditionError as exc:
            roots.append((label, None, f"{type(exc).__name__}: {exc}"))
    return columns, rows, roots
