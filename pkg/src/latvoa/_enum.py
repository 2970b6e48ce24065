"""Compiled Fincke–Pohst kernel for norm/pairing histograms.

The search tree is pruned with floating-point bounds that are widened by a
safety margin, so no vector is ever missed; every leaf is then accepted or
rejected with an exact int64 norm, so the counts are exact.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _histogram_kernel(gram, d, mu, max_norm, w, pmax):
    n = gram.shape[0]
    counts = np.zeros((max_norm + 1, 2 * pmax + 1), dtype=np.int64)
    overflow = 0
    x = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    center = np.zeros(n)
    fpart = np.zeros(n + 1)
    epart = np.zeros(n + 1, dtype=np.int64)
    ppart = np.zeros(n + 1, dtype=np.int64)
    srow = np.zeros(n, dtype=np.int64)
    # only vectors whose last nonzero coordinate is positive are visited;
    # the negatives are added by symmetry
    flat = np.zeros(n + 1, dtype=np.bool_)
    flat[n] = True
    bound = max_norm + 1e-7 * (1.0 + max_norm)

    i = n - 1
    descend = True
    while True:
        if descend:
            c = 0.0
            s = 0
            for j in range(i + 1, n):
                c -= mu[i, j] * x[j]
                s += gram[i, j] * x[j]
            center[i] = c
            srow[i] = s
            rem = bound - fpart[i + 1]
            if rem < 0.0:
                rem = 0.0
            r = np.sqrt(rem / d[i])
            x[i] = np.int64(np.ceil(c - r))
            if flat[i + 1] and x[i] < 0:
                x[i] = 0
            hi[i] = np.int64(np.floor(c + r))
        else:
            x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i == n:
                break
            descend = False
            continue
        t = x[i] - center[i]
        fpart[i] = fpart[i + 1] + d[i] * t * t
        epart[i] = epart[i + 1] + 2 * x[i] * srow[i] + gram[i, i] * x[i] * x[i]
        ppart[i] = ppart[i + 1] + w[i] * x[i]
        flat[i] = flat[i + 1] and x[i] == 0
        if i == 0:
            nrm = epart[0]
            if nrm <= max_norm:
                p = ppart[0]
                if -pmax <= p <= pmax:
                    counts[nrm, p + pmax] += 1
                    if nrm > 0:
                        counts[nrm, pmax - p] += 1
                else:
                    overflow += 1
            descend = False
        else:
            i -= 1
            descend = True
    return counts, overflow


def histogram(gram, d, mu, max_norm: int, w, pmax: int):
    """Counts indexed by [norm, scaled pairing + pmax]; includes the zero vector."""
    counts, overflow = _histogram_kernel(
        np.asarray(gram, dtype=np.int64), np.asarray(d, dtype=np.float64),
        np.asarray(mu, dtype=np.float64), int(max_norm),
        np.asarray(w, dtype=np.int64), int(pmax))
    if overflow:
        raise ArithmeticError("pairing window too small")
    return counts
