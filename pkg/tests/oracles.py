"""Independent reference computations shared by the test modules."""

import itertools

import numpy as np

from nvqst.states import random_density_matrix


def simplex_projection_oracle(v):
    """Exhaustive KKT search: try every support set and keep the feasible minimizer."""
    v = np.asarray(v, float)
    best, best_cost = None, np.inf
    for k in range(1, v.size + 1):
        for support in itertools.combinations(range(v.size), k):
            s = list(support)
            tau = (1 - v[s].sum()) / k
            x = np.zeros_like(v)
            x[s] = v[s] + tau
            if np.any(x[s] < -1e-15):
                continue
            cost = np.sum((x - v) ** 2)
            if cost < best_cost:
                best, best_cost = x, cost
    return best


def perturbed_state(rng, n, scale=0.3):
    """Random state plus a traceless Hermitian kick, usually leaving the PSD cone."""
    rho = random_density_matrix(n, rng)
    g = rng.normal(size=rho.shape) + 1j * rng.normal(size=rho.shape)
    h = (g + g.conj().T) / 2
    h -= np.trace(h) / h.shape[0] * np.eye(h.shape[0])
    return rho + scale * h
