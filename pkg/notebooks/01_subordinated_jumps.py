# %% [markdown]
# # Jump sizes after a random time change
#
# A compound Poisson claims process run on a random clock is again compound
# Poisson. It jumps less often, at rate psi(lambda), but its jumps are
# larger: a jump of the clock collects every base claim that falls into the
# skipped stretch of time.
#
# Setup: lambda = 1, X ~ Exp(1), clock = 0.2 t + compound Poisson(0.08)
# with Exp(0.1) jumps, so E[Lambda_1] = 0.2 + 0.08 * 10 = 1.

# %%
from pathlib import Path

import numpy as np

from subcpp import BaseCPP, Exponential, Subordinator, SubordinatedCPP
from subcpp.simulation import sample_y_direct, sample_y_warped

clock = Subordinator.compound_poisson(0.2, 0.08, Exponential(0.1))
p = SubordinatedCPP(BaseCPP(1.0, Exponential(1.0)), clock)
print("time normalized:", clock.check_time_normalized())
print("psi(lambda) =", p.effective_rate)
print("mixture weights (single, cluster) =", p.z_mixture_weights())

# %% [markdown]
# Draw Z exactly and compare its quantiles with those of X. Every quantile of
# Z sits above the matching one of X.

# %%
rng = np.random.default_rng(2024)
z = p.sample_z(rng, 200_000)
x = Exponential(1.0).sample(rng, 200_000)
for q in (0.5, 0.9, 0.99, 0.999):
    print(f"q={q:<6} Z {np.quantile(z, q):8.3f}   X {np.quantile(x, q):6.3f}")
print("mean Z:", z.mean(), " theory:", p.mean_z())

# %% [markdown]
# The two ways of building Y_1 (sum of Z draws at rate psi, or base claims
# on the warped clock) give the same law.

# %%
a = sample_y_direct(p, 1.0, 100_000, rng)
b = sample_y_warped(p, 1.0, 100_000, rng).y
print("means:", a.mean(), b.mean(), " P[Y_1 = 0]:", (a == 0).mean(), (b == 0).mean())

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
    bins = np.linspace(0, 40, 81)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist(x, bins=bins, density=True, alpha=0.5, label="X")
    ax.hist(z, bins=bins, density=True, alpha=0.5, label="Z")
    ax.set_yscale("log")
    ax.set_xlabel("jump size")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "jump_sizes.png", dpi=120)
    print("saved", out / "jump_sizes.png")
