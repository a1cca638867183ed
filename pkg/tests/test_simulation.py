import math
import warnings
from dataclasses import dataclass

import numpy as np
import pytest
from scipy import stats

from subcpp import (
    Exponential,
    Gamma,
    NetProfitViolated,
    RiskModel,
    Subordinator,
    mc_ruin,
    pk_closed_form,
    pk_exact_ruin,
    simulate_surplus_path,
    solve_adjustment,
    tail_horizon_sweep,
)
from subcpp.distributions import ClaimDistribution
from subcpp.simulation import RuinEstimate, claim_epochs, max_deficits, trajectory

from conftest import cpp, clustered_sub, expjump_sub


@dataclass(frozen=True)
class Uniform(ClaimDistribution):
    """Claim law without a size-biased sampler."""

    kind = "uniform"
    low: float
    high: float

    def sample(self, rng, size=None):
        return rng.uniform(self.low, self.high, size)

    def mean(self):
        return 0.5 * (self.low + self.high)

    def mgf_sup(self):
        return math.inf

    def _mgf_inside(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r == 0, 1.0, r)
        val = (np.exp(safe * self.high) - np.exp(safe * self.low)) / (safe * (self.high - self.low))
        return np.where(r == 0, 1.0, val)


def exp_model(c=2.0, u=0.0, sub=None):
    return RiskModel(c, cpp(1.0, Exponential(1.0), sub), u)


def test_no_ruin_with_huge_capital(rng):
    m = exp_model(u=1e6)
    assert not any(simulate_surplus_path(m, 10.0, rng).ruined for _ in range(1000))


def test_negative_drift_ruins_almost_surely():
    est = mc_ruin(exp_model(c=0.9, u=1.0), 1e3, 10**4, seed=3)
    assert est.point > 0.99


def test_single_path_outcome(rng):
    m = exp_model(c=1.5, u=2.0, sub=clustered_sub())
    for _ in range(200):
        out = simulate_surplus_path(m, 50.0, rng)
        assert out.min_surplus <= 2.0
        assert out.ruined == (out.min_surplus < 0)
        assert (out.ruin_time is None) == (not out.ruined)
        if out.ruined:
            assert 0 < out.ruin_time <= 50.0


def test_pure_drift_subordinator_reproduces_base_paths():
    a = max_deficits(exp_model(u=1.0), 100.0, 2000, seed=8)
    b = max_deficits(exp_model(u=1.0, sub=Subordinator(1.0)), 100.0, 2000, seed=8)
    np.testing.assert_array_equal(a, b)
    assert mc_ruin(exp_model(u=1.0), 100.0, 2000, 8) == mc_ruin(exp_model(u=1.0, sub=Subordinator(1.0)), 100.0, 2000, 8)


def test_reproducible_across_workers():
    m = exp_model(c=1.5, u=3.0, sub=clustered_sub())
    a = mc_ruin(m, 100.0, 25_000, seed=11)
    b = mc_ruin(m, 100.0, 25_000, seed=11, workers=3)
    c = mc_ruin(m, 100.0, 25_000, seed=11)
    assert a == b == c
    assert mc_ruin(m, 100.0, 25_000, seed=12) != a


def test_estimate_fields():
    est = mc_ruin(exp_model(u=1.0), 200.0, 4000, seed=2)
    assert 0 <= est.point <= 1
    assert est.std_error == pytest.approx(math.sqrt(est.point * (1 - est.point) / 4000), rel=1e-15)
    assert (est.n_paths, est.horizon, est.seed, est.capital) == (4000, 200.0, 2, 1.0)
    with pytest.raises(ValueError):
        mc_ruin(exp_model(), 10.0, 99, seed=1)
    with pytest.raises(ValueError):
        mc_ruin(exp_model(), 10.0, 1000, seed=1, route="bogus")


def test_standard_error_scaling():
    m = exp_model(u=1.0)
    ratios = [
        mc_ruin(m, 50.0, 4000, seed=s).std_error / mc_ruin(m, 50.0, 2000, seed=1000 + s).std_error for s in range(20)
    ]
    assert 0.69 <= np.mean(ratios) <= 0.72


def test_event_driven_matches_dense_grid():
    m = exp_model(c=2.0, u=1.0, sub=expjump_sub(0.5))
    horizon, step = 30.0, 1e-3
    grid = np.arange(0.0, horizon + step / 2, step)
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(1000):
        times, sizes = claim_epochs(m, horizon, rng)
        surplus = m.capital + m.premium_rate * times - np.cumsum(sizes)
        event = bool(np.any(surplus < 0))
        paid = np.concatenate(([0.0], np.cumsum(sizes)))[np.searchsorted(times, grid, side="right")]
        dense = bool(np.any(m.capital + m.premium_rate * grid - paid < 0))
        assert event or not dense  # the grid can only miss ruin, never invent it
        mismatches += event != dense
    assert mismatches <= 20


def test_monotone_in_horizon_and_bounded_by_pk():
    m = exp_model(c=1.5, u=2.0, sub=clustered_sub())
    pts = [mc_ruin(m, t, 20_000, seed=5).point for t in (5.0, 50.0, 500.0)]
    assert pts[0] <= pts[1] <= pts[2]
    pk = pk_exact_ruin(m, 200_000, seed=6)
    assert pts[2] <= pk.point + 4 * pk.std_error + 4 * math.sqrt(pts[2] * (1 - pts[2]) / 20_000)


def test_routes_agree_on_minimum_surplus():
    m = exp_model(c=1.5, u=5.0, sub=clustered_sub())
    rng = np.random.default_rng(21)
    a = [simulate_surplus_path(m, 20.0, rng).min_surplus for _ in range(10**4)]
    b = [simulate_surplus_path(m, 20.0, rng, route="warped").min_surplus for _ in range(10**4)]
    assert stats.ks_2samp(a, b).pvalue > 1e-3


def test_warped_engine_matches_representation_engine():
    m = exp_model(c=1.5, u=3.0, sub=clustered_sub())
    a = mc_ruin(m, 50.0, 10**4, seed=1)
    b = mc_ruin(m, 50.0, 10**4, seed=2, route="warped")
    assert abs(a.point - b.point) < 4 * math.hypot(a.std_error, b.std_error)


def test_pk_closed_form():
    m = exp_model()
    u = np.array([0.0, 1.0, 3.0, 5.0])
    np.testing.assert_allclose(pk_closed_form(m, u), 0.5 * np.exp(-0.5 * u), rtol=1e-12)
    m2 = RiskModel(2.5, cpp(2.0, Exponential(2.0)))
    assert pk_closed_form(m2, 1.0) == pytest.approx(0.4 * math.exp(-1.2), rel=1e-14)
    with pytest.raises(ValueError):
        pk_closed_form(exp_model(sub=clustered_sub()), 1.0)


def test_pk_exact_matches_closed_form():
    m = exp_model()
    grid = [0.0, 1.0, 3.0, 5.0]
    ests = pk_exact_ruin(m, 4 * 10**5, seed=9, capital=grid)
    for est, u in zip(ests, grid):
        assert est.horizon == math.inf and est.method == "pk"
        assert abs(est.point - pk_closed_form(m, u)) < 4 * est.std_error
    assert all(a.point >= b.point for a, b in zip(ests, ests[1:]))
    assert pk_exact_ruin(m.with_capital(1.0), 10**4, seed=9) == pk_exact_ruin(m, 10**4, seed=9, capital=[1.0])[0]


def test_pk_ruin_at_zero_capital_subordinated():
    m = RiskModel(2.5, cpp(2.0, Gamma(2.0, 4.0), expjump_sub(0.5)))
    est = pk_exact_ruin(m, 2 * 10**5, seed=1)
    assert abs(est.point - 2.0 * 0.5 / 2.5) < 4 * est.std_error


def test_pk_rejects_net_loss():
    with pytest.raises(NetProfitViolated):
        pk_exact_ruin(exp_model(c=0.9), 1000, seed=1)


def test_pk_falls_back_with_warning():
    m = RiskModel(1.5, cpp(1.0, Uniform(0.5, 1.5)), 1.0)
    with pytest.warns(UserWarning, match="falling back"):
        est = pk_exact_ruin(m, 2000, seed=3)
    assert est.horizon == 1e3 and est.method == "mc"


def test_gamma_clock_mc_agrees_with_pk():
    m = RiskModel(1.5, cpp(1.0, Exponential(1.0), Subordinator.gamma(2.0, 2.0)), 2.0)
    mc = mc_ruin(m, 100.0, 10_000, seed=4)
    pk = pk_exact_ruin(m, 200_000, seed=4)
    assert abs(mc.point - pk.point) < 4 * math.hypot(mc.std_error, pk.std_error) + 0.01


def test_sweep_decay_rates():
    base = RiskModel(2.5, cpp(2.0, Exponential(2.0)))
    sub = RiskModel(2.5, cpp(2.0, Exponential(2.0), expjump_sub(0.5)))
    u = np.linspace(0.0, 5.0, 11)
    slopes = []
    for m in (base, sub):
        rows = tail_horizon_sweep(m, u, 300.0, 40_000, seed=13)
        pts = np.array([r.point for r in rows])
        se = np.array([r.std_error for r in rows])
        assert np.all(np.diff(pts) <= 4 * se[1:])
        assert [r.capital for r in rows] == list(u)
        mid = (u >= 1.0) & (u <= 4.0)
        slopes.append(np.polyfit(u[mid], np.log(pts[mid]), 1)[0])
    r = solve_adjustment(base).coefficient
    assert abs(slopes[0] + r) < 0.15 * r
    assert abs(slopes[1]) < abs(slopes[0])


def test_sweep_validates_grid():
    with pytest.raises(ValueError):
        tail_horizon_sweep(exp_model(), [2.0, 1.0], 10.0, 1000, seed=1)
    with pytest.raises(ValueError):
        tail_horizon_sweep(exp_model(), [], 10.0, 1000, seed=1)


def test_trajectory_rows(rng):
    m = exp_model(c=1.5, u=5.0, sub=clustered_sub())
    rows = trajectory(m, 30.0, rng)
    t = np.array([r[0] for r in rows])
    assert rows[0] == (0.0, 5.0, 0.0) and t[-1] == 30.0
    assert np.all(np.diff(t) >= 0)
    clock = np.array([r[2] for r in rows])
    assert np.all(np.diff(clock) >= -1e-12)
    for before, after in zip(rows[1:-1:2], rows[2:-1:2]):
        assert before[0] == after[0] and after[1] < before[1]
    with pytest.raises(ValueError):
        trajectory(exp_model(sub=Subordinator.gamma(1.0, 1.0)), 5.0, rng)


def test_ruin_estimate_from_hits():
    est = RuinEstimate.from_hits(25, 100, horizon=10.0, seed=1)
    assert est.point == 0.25 and est.std_error == pytest.approx(math.sqrt(0.25 * 0.75 / 100))
