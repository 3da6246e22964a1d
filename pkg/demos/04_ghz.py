# %% [markdown]
# # More parties
#
# With n parties sharing two copies of an n-electron GHZ-like state, Bob runs
# the same beam splitter and detector; the other parties measure their second
# electrons. The success probability does not depend on n.

# %%
import numpy as np

from spinconc.protocol import GhzSpec, run_ghz_round

for n in (2, 3, 4):
    rng = np.random.default_rng(n)
    outs = [run_ghz_round(GhzSpec(n, 0.8, 0.6), rng) for _ in range(200)]
    wins = [o for o in outs if o.succeeded]
    worst = min(o.fidelity for o in wins)
    print(f"n={n}: P(success) = {outs[0].success_probability:.4f}, "
          f"observed {len(wins) / len(outs):.3f}, worst fidelity {worst:.12f}")

# %% [markdown]
# A failed GHZ round again leaves a less balanced GHZ state on the kept
# electrons, with the same map s -> s^2 / (s^2 + (1 - s)^2).

# %%
rng = np.random.default_rng(0)
out = run_ghz_round(GhzSpec(3, 0.8, 0.6), rng)
while out.succeeded:
    out = run_ghz_round(GhzSpec(3, 0.8, 0.6), rng)
print(out.failure_spec, f"s' = {abs(out.failure_spec.alpha) ** 2:.6f}")
