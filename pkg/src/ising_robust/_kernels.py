"""Numba kernels for the inner sampling loop.

Kept in one module so the JIT cache warms once. The sweep kernel consumes
pre-drawn uniforms (one per site per sweep, row-major) so the random stream
is owned by numpy generators and stays reproducible.
"""
import math

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def run_sweeps(indptr, indices, data, x, m, beta, uniforms):
    """Systematic-scan heat-bath sweeps, updating spins and local fields in place.

    Site i flips to +1 when its uniform falls below (1 + tanh(beta*m_i))/2;
    a changed spin propagates to neighbors' fields in O(degree).
    """
    n = x.shape[0]
    for s in range(uniforms.shape[0]):
        for i in range(n):
            p_plus = 0.5 * (1.0 + math.tanh(beta * m[i]))
            new = 1 if uniforms[s, i] < p_plus else -1
            if new != x[i]:
                delta = 2.0 * new
                for k in range(indptr[i], indptr[i + 1]):
                    m[indices[k]] += data[k] * delta
                x[i] = np.int8(new)
