"""Shared helpers for the test suite."""

import numpy as np
import pytest
import scipy.sparse as sp

from fwsvm import (
    Dataset,
    LossFamily,
    LossSpec,
    default_rho,
    direction_find,
    init_state,
    recompute_weights,
)


def make_all_specs(m, k=3):
    """One spec per family, sized for m classes."""
    return {
        "mh": LossSpec(LossFamily.MAX_HINGE, m=m),
        "utk": LossSpec(LossFamily.TOP_K, m=m, k=k),
        "uu": LossSpec(LossFamily.USUNIER, m=m, k=k),
        "wtk": LossSpec(LossFamily.WEIGHTED_TOP_K, m=m, rho=default_rho(m)),
        "wu": LossSpec(LossFamily.WEIGHTED_USUNIER, m=m, rho=default_rho(m)),
    }


def micro_dataset():
    """One example, one feature, two classes: the hand-solved instance."""
    X = sp.csr_matrix(np.array([[1.0]]))
    return Dataset(X=X, y=np.array([0]), labels=(1, 2))


def random_dataset(rng, n=30, d0=6, m=4):
    X = sp.csr_matrix(rng.standard_normal((n, d0)))
    y = rng.integers(0, m, size=n)
    y[:m] = np.arange(m)  # every class present
    return Dataset(X=X, y=y, labels=tuple(range(1, m + 1)))


def random_feasible_state(data, spec, lam, gamma_sm, rng, n_warm=5):
    """A reachable dual state: a few direction steps with random mixing."""
    state = init_state(data)
    for _ in range(n_warm):
        U = direction_find(state, data, spec, gamma_sm)
        state.alpha += rng.uniform(0.0, 1.0) * (U - state.alpha)
    recompute_weights(state, data, lam)
    return state


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
