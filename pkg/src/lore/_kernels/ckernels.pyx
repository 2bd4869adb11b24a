# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels: directed-message accumulation, greedy decode, repair.

Each function is the exact sequential counterpart of the numpy fallback in
``pykernels``; the two backends must stay bit-for-bit interchangeable, so any
change to accumulation or visit order here has to be mirrored there.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def accumulate(const cnp.float64_t[::1] x, const cnp.int64_t[::1] tgt,
               const cnp.int64_t[::1] src, Py_ssize_t n):
    """out[tgt[d]] += x[src[d]] for d ascending; returns the length-n sum array."""
    out_arr = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] out = out_arr
    cdef Py_ssize_t d, count = tgt.shape[0]
    for d in range(count):
        out[tgt[d]] += x[src[d]]
    return out_arr


def greedy_decode(const cnp.int64_t[::1] order, const cnp.int64_t[::1] indptr,
                  const cnp.int64_t[::1] nbrs):
    """Visit nodes in ``order``; keep a node iff none of its neighbors is kept."""
    cdef Py_ssize_t n = order.shape[0]
    chosen_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] chosen = chosen_arr
    cdef Py_ssize_t i, p, u
    cdef bint blocked
    for i in range(n):
        u = order[i]
        blocked = False
        for p in range(indptr[u], indptr[u + 1]):
            if chosen[nbrs[p]]:
                blocked = True
                break
        if not blocked:
            chosen[u] = 1
    return chosen_arr


def repair(cnp.uint8_t[::1] mask, const cnp.int64_t[::1] eu,
           const cnp.int64_t[::1] ev, const cnp.int64_t[::1] deg):
    """Scan edges ascending; drop the higher-degree endpoint of any kept conflict.

    Degree ties drop the higher index (ev, since edges are stored u < v).
    Mutates ``mask`` in place. A single pass settles: removals never re-add.
    """
    cdef Py_ssize_t k, m = eu.shape[0]
    cdef cnp.int64_t i, j
    for k in range(m):
        i = eu[k]
        j = ev[k]
        if mask[i] and mask[j]:
            if deg[i] > deg[j]:
                mask[i] = 0
            else:
                mask[j] = 0
