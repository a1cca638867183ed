# %% [markdown]
# # A heavy-tailed clock
#
# Light claims X ~ Exp(1) on a clock 0.9 t + compound Poisson(1) with
# Pareto(0.1 eps / (1 + eps), 1 + eps) jumps. The clock has mean one but
# no exponential moments, so the claims process inherits a power tail and
# ruin decays like u**-eps.

# %%
import numpy as np

from subcpp import BaseCPP, Exponential, Pareto, RiskModel, Subordinator, SubordinatedCPP
from subcpp import karamata_ruin_asymptotic, pk_exact_ruin, regular_variation_of

for eps in (0.5, 1.0, 2.0):
    clock = Subordinator.compound_poisson(0.9, 1.0, Pareto(0.1 * eps / (1 + eps), 1 + eps))
    m = RiskModel(2.0, SubordinatedCPP(BaseCPP(1.0, Exponential(1.0)), clock))
    spec = regular_variation_of(clock)
    print(f"eps={eps}: tail index {-spec.index}, classification {m.claims.classify_y_tail()}")
    for u in (10.0, 100.0, 1000.0):
        print(f"   u={u:6.0f}  asymptote {karamata_ruin_asymptotic(m, spec, u):.3e}")

# %% [markdown]
# The geometric-sum estimator still works here because the ladder heights
# are sampled exactly. At moderate capital the asymptote is not yet sharp.

# %%
clock = Subordinator.compound_poisson(0.9, 1.0, Pareto(0.05, 2.0))
m = RiskModel(2.0, SubordinatedCPP(BaseCPP(1.0, Exponential(1.0)), clock))
spec = regular_variation_of(clock)
grid = [10.0, 30.0, 100.0]
for est in pk_exact_ruin(m, 2 * 10**6, seed=5, capital=grid, workers=4):
    print(f"u={est.capital:5.0f}  pk {est.point:.2e} +- {est.std_error:.1e}   asymptote {karamata_ruin_asymptotic(m, spec, est.capital):.2e}")
