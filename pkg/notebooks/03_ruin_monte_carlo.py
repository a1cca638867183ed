# %% [markdown]
# # Ruin probabilities by simulation
#
# Three estimators of the same quantity for lambda = 1, X ~ Exp(1), c = 2:
# the exact formula 0.5 exp(-u/2), the Pollaczeck-Khinchine geometric sum
# (infinite horizon, unbiased) and crude path simulation up to T = 1000.

# %%
import math

import numpy as np

from subcpp import BaseCPP, Exponential, RiskModel, Subordinator, SubordinatedCPP
from subcpp import mc_ruin, pk_closed_form, pk_exact_ruin, tail_horizon_sweep

m = RiskModel(2.0, SubordinatedCPP(BaseCPP(1.0, Exponential(1.0))))
grid = [0.0, 1.0, 3.0, 5.0]
pk = pk_exact_ruin(m, 10**6, seed=1, capital=grid, workers=4)
for u, est in zip(grid, pk):
    mc = mc_ruin(m.with_capital(u), 1e3, 50_000, seed=2, workers=4)
    print(f"u={u:3.0f}  exact {pk_closed_form(m, u):.5f}  pk {est.point:.5f}+-{est.std_error:.5f}  mc {mc.point:.5f}+-{mc.std_error:.5f}")

# %% [markdown]
# Random clocks make ruin decay more slowly in the initial capital. The
# sweep reuses the same simulated paths for every u.

# %%
u = np.linspace(0, 8, 9)
models = {
    "identity clock": Subordinator.identity(),
    "Exp(0.5) clock jumps": Subordinator.compound_poisson(0.0, 0.5, Exponential(0.5)),
}
for name, clock in models.items():
    mm = RiskModel(2.5, SubordinatedCPP(BaseCPP(2.0, Exponential(2.0)), clock))
    rows = tail_horizon_sweep(mm, u, 500.0, 20_000, seed=3, workers=4)
    pts = np.array([r.point for r in rows])
    slope = np.polyfit(u[1:6], np.log(pts[1:6]), 1)[0]
    print(f"{name:22s} slope {slope:+.3f}  ", " ".join(f"{v:.4f}" for v in pts))
