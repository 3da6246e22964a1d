import numpy as np

from spinconc.statevec import Mode, PureState, Spin, new_electron_ids

GRID = [round(0.05 * k, 2) for k in range(1, 20)]


def random_state(gen, modes, n_terms=None):
    """Random normalized state, one electron per mode, random complex amplitudes."""
    ids = new_electron_ids(len(modes))
    configs = [tuple(zip(modes, spins)) for spins in np.ndindex(*(2,) * len(modes))]
    configs = [tuple((m, Spin(int(s))) for m, s in c) for c in configs]
    if n_terms is None:
        n_terms = int(gen.integers(1, len(configs) + 1))
    chosen = gen.choice(len(configs), size=n_terms, replace=False)
    amps = gen.normal(size=n_terms) + 1j * gen.normal(size=n_terms)
    amps /= np.linalg.norm(amps)
    return PureState(ids, {configs[i]: a for i, a in zip(chosen, amps)})


MODE_POOL = [Mode("b1", "bob"), Mode("b3", "bob"), Mode("a1", "alice"), Mode("a3", "alice")]
