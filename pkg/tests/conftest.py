"""Shared fixtures and independent oracles used across the test suite.

The enumeration oracle here deliberately avoids the library's vectorized
paths: probabilities come from an explicit loop over all sign vectors with
energies computed off a dense matrix, so library results are checked
against an independent implementation of the same definitions.
"""
import itertools

import numpy as np
import pytest

from ising_robust import EnsembleSpec, InteractionMatrix, build_ensemble


def dense_symmetric(J):
    return J.toarray()


def oracle_table(J, beta):
    """Exact model probabilities over bit-coded configurations, independently.

    Index c encodes x_i = +1 iff bit i of c is set, matching the library's
    enumeration order.
    """
    n = J.n
    Jd = dense_symmetric(J)
    energies = []
    for c in range(1 << n):
        x = np.array([1.0 if (c >> i) & 1 else -1.0 for i in range(n)])
        energies.append(0.5 * x @ Jd @ x)
    energies = np.asarray(energies)
    w = beta * energies
    w = w - w.max()
    p = np.exp(w)
    return p / p.sum(), energies


def oracle_configs(n):
    out = []
    for c in range(1 << n):
        out.append(np.array([1 if (c >> i) & 1 else -1 for i in range(n)], dtype=np.int8))
    return out


def all_sign_vectors(n):
    return [np.array(bits, dtype=np.int8) for bits in itertools.product((-1, 1), repeat=n)]


@pytest.fixture
def path3():
    """1-D path on three nodes with the built-in average-degree scaling."""
    return build_ensemble(EnsembleSpec(kind="path_lattice_1d", n=3))


@pytest.fixture
def path3_raw():
    return InteractionMatrix(3, [0, 1], [1, 2], [1.0, 1.0])


@pytest.fixture
def single_edge():
    return InteractionMatrix(2, [0], [1], [1.0])


@pytest.fixture
def cycle4_half():
    """4-cycle with weights 1/2 (average degree 2)."""
    return InteractionMatrix(4, [0, 1, 2, 3], [1, 2, 3, 0], [0.5] * 4)


def random_raw_graph(seed, n, p=0.4, weight_scale=1.0):
    """Random symmetric instance with continuous weights, canonical storage."""
    rng = np.random.default_rng(seed)
    rows, cols, weights = [], [], []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                rows.append(i)
                cols.append(j)
                weights.append(weight_scale * rng.normal())
    if not rows:
        rows, cols, weights = [0], [1], [weight_scale]
    return InteractionMatrix(n, rows, cols, weights)


def random_spins(seed, n):
    rng = np.random.default_rng(seed)
    return np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
