"""Numba kernel for the Monte Carlo non-domination probability."""

from __future__ import annotations

import math

import numba as nb
import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


@nb.njit(cache=True, nogil=True)
def _splitmix(x):
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return x ^ (x >> np.uint64(31))


@nb.njit(cache=True, nogil=True)
def stream_seed(seed, iteration, candidate):
    h = _splitmix(np.uint64(seed))
    h = _splitmix(h ^ np.uint64(iteration))
    h = _splitmix(h ^ np.uint64(candidate))
    return np.uint32(h & np.uint64(0xFFFFFFFF))


@nb.njit(cache=True, nogil=True)
def non_dominated_fraction(mean, sd, frontier, ids, seed, iteration, n_samples):
    m, D = mean.shape
    nf = frontier.shape[0]
    out = np.empty(m)
    # Y_d <= f_d  <=>  U_d <= Phi((f_d - mu_d) / sigma_d) with U_d uniform
    thr = np.empty((nf, D))
    z = np.empty(D)
    for i in range(m):
        for f in range(nf):
            for d in range(D):
                t = (frontier[f, d] - mean[i, d]) / sd[i, d]
                thr[f, d] = 0.5 * math.erfc(-t / math.sqrt(2.0))
        np.random.seed(stream_seed(seed, iteration, ids[i]))
        free = 0
        for s in range(n_samples):
            for d in range(D):
                z[d] = np.random.random()
            dominated = False
            for f in range(nf):
                below = True
                for d in range(D):
                    if z[d] > thr[f, d]:
                        below = False
                        break
                if below:
                    dominated = True
                    break
            if not dominated:
                free += 1
        out[i] = free / n_samples
    return out
