# %% [markdown]
# # Sampling trajectories
#
# Every trial runs real state-vector rounds: a charge-detector draw, then
# either two spin measurements or the failure recovery. Results depend only
# on the seed.

# %%
import numpy as np

from spinconc.analysis import iterated_yield, monte_carlo
from spinconc.protocol import PairSpec, run_trajectory

rng = np.random.default_rng(3)
for record in run_trajectory(PairSpec(0.8, 0.6), 5, rng):
    print(record.round_index, record.outcome.result.value, record.rng_draws)

# %%
for s0 in (0.5, 0.64):
    mc = monte_carlo(s0, 20_000, 3, seed=42)
    exact = iterated_yield(s0, 3).total_yield
    z = (mc.estimated_yield - exact) / mc.standard_error
    print(f"s0={s0}: counts {mc.success_counts_per_round}, unresolved {mc.unresolved}")
    print(f"   MC {mc.estimated_yield:.5f} +- {mc.standard_error:.5f}   exact {exact:.5f}   z = {z:+.2f}")
