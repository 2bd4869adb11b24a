"""Pure-numpy fallback kernels, bit-for-bit equivalent to the compiled core.

``np.bincount`` accumulates its weights in a single in-order C loop, so the
float result matches the compiled kernel's sequential loop exactly.
"""

import numpy as np


def accumulate(x, tgt, src, n):
    if len(tgt) == 0:
        return np.zeros(n, dtype=np.float64)
    return np.bincount(tgt, weights=x[src], minlength=n)


def greedy_decode(order, indptr, nbrs):
    n = len(order)
    chosen = np.zeros(n, dtype=np.uint8)
    for u in order:
        seg = nbrs[indptr[u]:indptr[u + 1]]
        if not chosen[seg].any():
            chosen[u] = 1
    return chosen


def repair(mask, eu, ev, deg):
    # Only edges conflicting at entry can ever conflict (removals never re-add),
    # so one ordered pass over the initial conflict list settles the set.
    conflicts = np.flatnonzero(mask[eu] & mask[ev])
    for k in conflicts:
        i = eu[k]
        j = ev[k]
        if mask[i] and mask[j]:
            if deg[i] > deg[j]:
                mask[i] = 0
            else:
                mask[j] = 0
