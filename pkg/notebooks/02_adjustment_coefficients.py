# %% [markdown]
# # Adjustment functions under time changes
#
# lambda = 2, X ~ Exp(2), premium c = 2.5. The clocks are pure-jump
# compound Poisson processes with Exp(a) jumps at intensity a, so each has
# mean one. Smaller a means rarer, longer clock jumps.

# %%
from pathlib import Path

import numpy as np

from subcpp import BaseCPP, Exponential, RiskModel, Subordinator, SubordinatedCPP, solve_adjustment
from subcpp.ruin import adjustment_curves

base = RiskModel(2.5, SubordinatedCPP(BaseCPP(2.0, Exponential(2.0))))
rates = [0.25, 0.5, 1.0]
clocks = [Subordinator.compound_poisson(0.0, a, Exponential(a)) for a in rates]
r_grid = np.linspace(0.0, 1.3, 131)
columns, rows, roots = adjustment_curves(base, clocks, r_grid)

for label, res, err in roots:
    print(f"{label:5s}", "root" if res else err, f"{res.coefficient:.10f}" if res else "")

# %% [markdown]
# For the clock with a = 0.5 the composed function simplifies to
# r / (1 - 2.5 r) - 2.5 r, whose positive root is 0.24.

# %%
m = RiskModel(2.5, SubordinatedCPP(BaseCPP(2.0, Exponential(2.0)), clocks[1]))
a = solve_adjustment(m)
print(a)
print("closed form at the root:", a.coefficient / (1 - 2.5 * a.coefficient) - 2.5 * a.coefficient)

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    out = Path(__file__).with_name("output")
    out.mkdir(exist_ok=True)
    table = np.array(rows)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for j, name in enumerate(columns[1:], start=1):
        vals = np.where(np.isfinite(table[:, j]), table[:, j], np.nan)
        ax.plot(table[:, 0], vals, label=name)
    ax.axhline(0, color="k", lw=0.5)
    ax.set_ylim(-1, 1)
    ax.set_xlabel("r")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "adjustment_functions.png", dpi=120)
    print("saved", out / "adjustment_functions.png")
