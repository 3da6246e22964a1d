# %% [markdown]
# # One concentration round, step by step
#
# Alice holds a1, a2 and Bob holds b1, b2 of two copies of
# alpha|up up> + beta|down down>. Bob's second electron is rotated, both of
# his electrons meet on a polarizing beam splitter, and a charge detector
# watches output c1.

# %%
import numpy as np

from spinconc.protocol import (
    A1, A3, C1, C2, PairSpec, measure_and_correct, phi_plus, prepare_round, run_round,
)
from spinconc.statevec import ChargeReading, charge_detect_branch, electron_in, fidelity

spec = PairSpec(0.8, 0.6)
prepared = prepare_round(spec)
print(prepared.state.pretty())

# %% [markdown]
# The state after the beam splitter has four terms. The detector sees exactly
# one electron in c1 with probability 2 s (1 - s), where s = |alpha|^2.

# %%
p_one, heralded = charge_detect_branch(prepared.state, C1, ChargeReading.ONE)
print(f"P(one) = {p_one:.6f}   expected {2 * 0.64 * 0.36:.6f}")
print(heralded.pretty())

# %% [markdown]
# Measuring the a3 and c2 electrons in the X basis leaves a1 and c1 in a
# Bell pair, up to a phase flip when the two outcomes differ.

# %%
a3, c2 = electron_in(heralded, A3), electron_in(heralded, C2)
for outcomes in [(0, 0), (0, 1), (1, 0), (1, 1)]:
    herald = measure_and_correct(heralded, (a3, c2), electron_in(heralded, A1), outcomes=outcomes)
    target = phi_plus((electron_in(herald.state, A1), electron_in(herald.state, C1)))
    print(outcomes, herald.correction.value, f"F = {fidelity(herald.state, target):.12f}")

# %% [markdown]
# The same thing in one call, with a seeded generator deciding every random
# outcome.

# %%
for seed in range(4):
    out = run_round(spec, np.random.default_rng(seed))
    extra = f"F = {out.fidelity:.6f}" if out.succeeded else f"next pair {out.failure_spec}"
    print(seed, out.result.value, extra)
