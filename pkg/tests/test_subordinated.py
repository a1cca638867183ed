import math

import numpy as np
import pytest
from scipy import stats

from subcpp import Exponential, Gamma, InfiniteActivityError, Pareto, Subordinator, SubordinatedCPP
from subcpp.simulation import sample_y_direct, sample_y_warped
from subcpp.subordinated import conditioned_poisson

from conftest import pareto_sub, cpp, drifted_sub, clustered_sub, expjump_sub


def test_effective_rate(drifted, clustered):
    assert drifted.effective_rate == pytest.approx(1.5 - math.exp(-0.5), abs=1e-15)
    assert clustered.effective_rate == pytest.approx(0.2727272727272727, abs=1e-15)
    assert cpp(3.0).effective_rate == 3.0
    for p in (drifted, clustered, cpp(2.0, sub=expjump_sub(0.25))):
        assert p.effective_rate <= p.rate


def test_mixture_weights(drifted, clustered):
    assert cpp(2.0).z_mixture_weights() == (1.0, 0.0)
    assert clustered.z_mixture_weights()[0] == pytest.approx(0.7333333333, abs=1e-9)
    assert drifted.z_mixture_weights()[0] == pytest.approx(0.559617, abs=1e-6)
    w = drifted.z_mixture_weights()
    assert sum(w) == pytest.approx(1.0, abs=1e-15)
    assert cpp(2.0, sub=expjump_sub(0.5)).z_mixture_weights()[0] == 0.0


def test_pure_drift_z_is_x(rng):
    p = cpp(1.0, Gamma(2.0, 1.5))
    z = p.sample_z(rng, 10**5)
    assert stats.kstest(z, Gamma(2.0, 1.5).cdf).statistic < 0.013


def test_drifted_z_mean(drifted, rng):
    z = drifted.sample_z(rng, 10**6)
    assert abs(z.mean() - 1.119235) < 0.005
    assert np.all(z > 0)
    assert drifted.mean_z() == pytest.approx(1 / 0.8934693403, rel=1e-9)


def test_scalar_z_draw(clustered, rng):
    assert isinstance(clustered.sample_z(rng), float)


def test_gamma_subordinator_has_no_exact_z(rng):
    p = cpp(1.0, sub=Subordinator.gamma(2.0, 2.0))
    with pytest.raises(InfiniteActivityError):
        p.sample_z(rng, 10)


def test_rejection_diagnostics(clustered, rng):
    diag = {}
    clustered.sample_z(rng, 10**4, diagnostics=diag)
    assert 0 < diag["accepted"] <= diag["proposals"]


@pytest.mark.parametrize("mean", [1e-6, 0.05, 1.0, 30.0])
def test_conditioned_poisson_law(mean, rng):
    n = conditioned_poisson(np.full(4 * 10**5, mean), rng)
    assert n.min() >= 1
    p_any = -math.expm1(-mean)
    m1, m2 = mean / p_any, (mean + mean**2) / p_any
    assert abs(n.mean() - m1) < 4 * math.sqrt((m2 - m1**2) / n.size) + 1e-12
    # chi-square goodness of fit, pooling the upper tail into cells of expected count >= 5
    ks = np.arange(1, n.max() + 1)
    expected = n.size * stats.poisson.pmf(ks, mean) / p_any
    observed = np.bincount(n, minlength=ks.size + 1)[1:].astype(float)
    cut = max(1, int(np.argmax(expected < 5))) if np.any(expected < 5) else ks.size
    obs = np.append(observed[:cut], observed[cut:].sum())
    exp = np.append(expected[:cut], n.size - expected[:cut].sum())
    keep = exp > 0
    if keep.sum() > 1:
        assert stats.chisquare(obs[keep], exp[keep]).pvalue > 1e-4


def test_mgf_z_values(drifted):
    assert drifted.mgf_z(0.0) == 1.0
    assert drifted.mgf_z(0.5) == pytest.approx(2.285687, abs=1e-6)
    assert drifted.mgf_z(0.5) == pytest.approx(1 + (math.exp(0.5) - 0.5) / (1.5 - math.exp(-0.5)), rel=1e-14)
    assert drifted.mgf_z(1.0) == math.inf
    p = cpp(1.0, Exponential(2.0))
    r = np.array([-1.0, 0.3, 1.5])
    np.testing.assert_allclose(p.mgf_z(r), Exponential(2.0).mgf(r), rtol=1e-15)


def test_mgf_z_domain_from_subordinator():
    # lambda (M_X(r) - 1) must stay below the jump-law mgf bound 0.5
    p = cpp(2.0, Exponential(2.0), expjump_sub(0.5))
    assert math.isfinite(p.mgf_z(0.39))
    assert p.mgf_z(0.4) == math.inf
    assert p.mgf_z(0.6) == math.inf


def test_mgf_z_monte_carlo(drifted, rng):
    z = drifted.sample_z(rng, 10**6)
    for r in (0.1, 0.25, 0.4):
        e = np.exp(r * z)
        assert abs(e.mean() - drifted.mgf_z(r)) < 4 * e.std(ddof=1) / math.sqrt(z.size)


def test_size_biased_z_mean(clustered, drifted, rng):
    for p in (clustered, drifted, cpp(2.0, Gamma(2.0, 3.0), expjump_sub(0.5))):
        # E[Z^2] from Var[Y_1] = psi E[Z^2] = lambda E[X^2] + lambda^2 E[X]^2 Var[Lambda_1]
        lam, x = p.rate, p.claim_law
        ez2 = (lam * x.second_moment() + lam**2 * x.mean() ** 2 * p.sub.variance()) / p.effective_rate
        sb = p.sample_z_size_biased(rng, 4 * 10**5)
        assert abs(sb.mean() - ez2 / p.mean_z()) < 4 * sb.std() / math.sqrt(sb.size)


def test_tail_z_mc(clustered, rng):
    p, se = clustered.tail_z_mc(0.0, 1000, rng)
    assert p == 1.0 and se == 0.0
    x = np.array([5.0, 0.5, 2.0])
    p, se = clustered.tail_z_mc(x, 10**5, rng, chunk=30_000)
    assert p.shape == (3,) and p[1] > p[2] > p[0]
    assert np.all(p >= Exponential(1.0).tail(x) - 4 * se)


def test_tail_z_mc_rejects_empty(clustered, rng):
    with pytest.raises(ValueError):
        clustered.tail_z_mc(1.0, 0, rng)


def test_classification():
    assert not cpp(1.0, Exponential(1.0), expjump_sub(0.5)).classify_y_tail().heavy
    c = cpp(1.0, Pareto(1.0, 3.0), clustered_sub()).classify_y_tail()
    assert c.heavy and c.reason == "claims"
    c = cpp(1.0, Exponential(1.0), pareto_sub(1.0)).classify_y_tail()
    assert c.heavy and c.reason == "subordinator" and c.label == "heavy"
    c = cpp(1.0, Pareto(1.0, 3.0), pareto_sub(1.0)).classify_y_tail()
    assert c.heavy and "claims" in c.reason and "subordinator" in c.reason


def test_laplace_y1_values(drifted):
    assert drifted.laplace_y1(0.0) == 1.0
    # psi(0.5) = 0.25 + 1 - exp(-0.25)
    assert drifted.laplace_y1(1.0) == pytest.approx(math.exp(-(1.25 - math.exp(-0.25))), rel=1e-14)
    assert drifted.laplace_y1(1.0) == pytest.approx(0.624253, abs=1e-6)
    p = cpp(2.0, Exponential(3.0))
    assert p.laplace_y1(0.7) == pytest.approx(math.exp(2.0 * (3.0 / 3.7 - 1.0)), rel=1e-14)
    with pytest.raises(ValueError):
        p.laplace_y1(-1.0)


def test_laplace_y1_monte_carlo(drifted, rng):
    y = sample_y_warped(drifted, 1.0, 10**6, rng).y
    e = np.exp(-y)
    assert abs(e.mean() - drifted.laplace_y1(1.0)) < 4 * e.std(ddof=1) / math.sqrt(y.size)


def test_count_variance_identity(drifted, rng):
    counts = sample_y_warped(drifted, 1.0, 10**6, rng).claims
    assert abs(counts.var() - 1.25) < 0.02


def test_representation_routes_agree(clustered, rng):
    a = sample_y_direct(clustered, 1.0, 10**5, rng)
    b = sample_y_warped(clustered, 1.0, 10**5, rng).y
    assert stats.ks_2samp(a, b).statistic < 0.013


def test_warped_epoch_rate(clustered, rng):
    epochs = sample_y_warped(clustered, 1.0, 10**5, rng).epochs
    se = epochs.std(ddof=1) / math.sqrt(epochs.size)
    assert abs(epochs.mean() - clustered.effective_rate) < 4 * se


@pytest.mark.parametrize("sub", [drifted_sub(), clustered_sub(), Subordinator.gamma(2.0, 2.0)], ids=["drifted", "clustered", "gamma"])
def test_expectation_invariance(sub, rng):
    p = cpp(1.0, Exponential(1.0), sub)
    y = sample_y_warped(p, 1.0, 10**5, rng).y
    assert abs(y.mean() - 1.0) < 4 * y.std(ddof=1) / math.sqrt(y.size)


@pytest.mark.parametrize("p", [cpp(1.0, Exponential(1.0), clustered_sub()), cpp(0.5, Pareto(0.05, 2.5), pareto_sub(1.0))])
def test_record_round_trip(p):
    assert SubordinatedCPP.from_record(p.to_record()) == p


def test_subexponential_tail_ratio_with_pareto_claims():
    law = Pareto(1.0, 1.5)
    p = cpp(1.0, law, clustered_sub())
    target = p.rate / p.effective_rate
    tail, se = p.tail_z_mc(1e3, 10**7, np.random.default_rng(3))
    assert abs(tail / law.tail(1e3) - target) < 0.15 * target + 4 * se / law.tail(1e3)
