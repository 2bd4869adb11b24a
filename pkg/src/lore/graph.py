"""Immutable undirected graphs, random-family generators, and structural bounds.

A :class:`Graph` stores a canonical lexicographically sorted edge array plus a
CSR-style adjacency. Edge k of the sorted array has stable EdgeId k; the
adjacency keeps, for every directed entry, the owning node, the neighbor, and
the undirected EdgeId, which is what the routing and step kernels consume.
"""

from __future__ import annotations

import numpy as np

from ._kernels import accumulate
from .errors import GraphParseError, ParameterError

#: PRNG identity recorded in run metadata; instance seeds are derived with
#: numpy's SeedSequence from (master seed, stream label ints).
PRNG_ID = "numpy.random.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master_seed: int, *stream: int) -> int:
    """Stable per-instance seed from a master seed and integer stream labels."""
    ss = np.random.SeedSequence([int(master_seed), *[int(s) for s in stream]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class Graph:
    """Undirected simple graph with a stable sorted edge array.

    Invariants enforced at construction: no self-loops, no duplicate edges,
    endpoints in range, edges sorted lexicographically with u < v.
    """

    __slots__ = ("n", "edges", "eu", "ev", "indptr", "nbrs", "nbr_eid",
                 "adj_tgt", "degrees")

    def __init__(self, n: int, pairs) -> None:
        if n < 0:
            raise ParameterError(f"node count must be >= 0, got {n}")
        edges = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if np.any(lo == hi):
                raise ParameterError("self-loops are not allowed")
            if lo.min() < 0 or hi.max() >= n:
                raise ParameterError("edge endpoint out of range")
            order = np.lexsort((hi, lo))
            edges = np.column_stack((lo[order], hi[order]))
            dup = np.all(edges[1:] == edges[:-1], axis=1)
            if dup.any():
                raise ParameterError("duplicate edges are not allowed")
        self.n = int(n)
        self.edges = edges
        self.eu = np.ascontiguousarray(edges[:, 0])
        self.ev = np.ascontiguousarray(edges[:, 1])

        m = len(edges)
        eid = np.arange(m, dtype=np.int64)
        tgt = np.concatenate((edges[:, 0], edges[:, 1]))
        src = np.concatenate((edges[:, 1], edges[:, 0]))
        eid2 = np.concatenate((eid, eid))
        order = np.lexsort((src, tgt))
        self.adj_tgt = tgt[order]
        self.nbrs = src[order]
        self.nbr_eid = eid2[order]
        self.degrees = np.bincount(tgt, minlength=n).astype(np.int64)
        self.indptr = np.concatenate(
            ([0], np.cumsum(self.degrees))).astype(np.int64)
        for arr in (self.edges, self.eu, self.ev, self.indptr, self.nbrs,
                    self.nbr_eid, self.adj_tgt, self.degrees):
            arr.setflags(write=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def neighbors(self, i: int) -> np.ndarray:
        """Sorted neighbor list of node i (a read-only view)."""
        return self.nbrs[self.indptr[i]:self.indptr[i + 1]]

    def adjacency_matvec(self, x: np.ndarray) -> np.ndarray:
        return accumulate(np.ascontiguousarray(x, dtype=np.float64),
                          self.adj_tgt, self.nbrs, self.n)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.edges, other.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


# ---------------------------------------------------------------------------
# Random families
# ---------------------------------------------------------------------------

def gen_er(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p): each unordered pair present independently."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must be in [0, 1], got {p}")
    rng = make_rng(seed)
    pairs = []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - 1 - i) < p) + i + 1
        if len(hits):
            pairs.append(np.column_stack((np.full(len(hits), i, dtype=np.int64), hits)))
    stacked = np.concatenate(pairs) if pairs else np.empty((0, 2), dtype=np.int64)
    return Graph(n, stacked)


def gen_ba(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert: seed clique on m+1 nodes, then m degree-proportional
    attachments per new node, sampled without duplicates."""
    if not 1 <= m < n:
        raise ParameterError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = make_rng(seed)
    pairs = [(i, j) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # each clique node starts with degree m
    repeated = [v for v in range(m + 1) for _ in range(m)]
    for source in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[rng.integers(len(repeated))])
        for t in sorted(targets):
            pairs.append((t, source))
            repeated.append(t)
        repeated.extend([source] * m)
    return Graph(n, np.asarray(pairs, dtype=np.int64))


def gen_ws(n: int, k: int, rewire: float, seed: int) -> Graph:
    """Watts-Strogatz: ring lattice joined to k nearest neighbors, each edge
    rewired with probability ``rewire`` avoiding self-loops and duplicates."""
    if not 0 < k < n:
        raise ParameterError(f"need 0 < k < n, got k={k}, n={n}")
    if k % 2 != 0:
        raise ParameterError(f"k must be even, got {k}")
    if not 0.0 <= rewire <= 1.0:
        raise ParameterError(f"rewire must be in [0, 1], got {rewire}")
    rng = make_rng(seed)
    edge_set = set()
    for d in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + d) % n
            edge_set.add((min(i, j), max(i, j)))
    degree = np.full(n, k, dtype=np.int64)
    for d in range(1, k // 2 + 1):
        for i in range(n):
            j = (i + d) % n
            if rng.random() >= rewire:
                continue
            if degree[i] >= n - 1:
                continue  # node saturated, no legal rewiring target
            key = (min(i, j), max(i, j))
            if key not in edge_set:
                continue  # already rewired away by an earlier pass
            w = int(rng.integers(n))
            while w == i or (min(i, w), max(i, w)) in edge_set:
                w = int(rng.integers(n))
            edge_set.remove(key)
            edge_set.add((min(i, w), max(i, w)))
            degree[j] -= 1
            degree[w] += 1
    return Graph(n, np.asarray(sorted(edge_set), dtype=np.int64))


# ---------------------------------------------------------------------------
# Edge-list text format: line 1 "n m", then m lines "i j" with i < j, ascending
# ---------------------------------------------------------------------------

def save_edge_list(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{graph.n} {graph.num_edges}\n")
        for u, v in graph.edges:
            fh.write(f"{u} {v}\n")


def load_edge_list(path) -> Graph:
    with open(path) as fh:
        header = fh.readline()
        parts = header.split()
        if len(parts) != 2:
            raise GraphParseError("expected header 'n m'", line=1)
        try:
            n, m = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphParseError(f"non-integer header {header.strip()!r}", line=1)
        pairs = np.empty((m, 2), dtype=np.int64)
        seen = set()
        for k in range(m):
            lineno = k + 2
            parts = fh.readline().split()
            if len(parts) != 2:
                raise GraphParseError("expected 'i j'", line=lineno)
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(f"non-integer endpoint in {parts!r}", line=lineno)
            if i == j:
                raise GraphParseError(f"self-loop {i} {j}", line=lineno)
            if not (0 <= i < n and 0 <= j < n):
                raise GraphParseError(f"endpoint out of range in '{i} {j}'", line=lineno)
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphParseError(f"duplicate edge {i} {j}", line=lineno)
            seen.add(key)
            pairs[k, 0] = i
            pairs[k, 1] = j
    return Graph(n, pairs)


# ---------------------------------------------------------------------------
# Structural bounds
# ---------------------------------------------------------------------------

def max_degree(graph: Graph) -> int:
    if graph.n == 0 or graph.num_edges == 0:
        return 0
    return int(graph.degrees.max())


def spectral_norm_upper(graph: Graph, tol: float = 1e-6, max_iter: int = 10_000) -> float:
    """Certified upper estimate of the adjacency spectral norm.

    Power iteration on A^2 (positive semidefinite, so no bipartite sign
    oscillation); the Rayleigh quotient under-estimates, so the result is
    inflated by (1 + tol) and capped at the always-valid Delta_max bound.
    """
    if graph.num_edges == 0:
        return 0.0
    dmax = float(max_degree(graph))
    n = graph.n
    # deterministic start, non-uniform so it is not orthogonal to the top space
    v = 1.0 + 0.001 * (np.arange(n, dtype=np.float64) % 7.0)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = graph.adjacency_matvec(v)  # A v
        new_est = float(np.linalg.norm(w))  # sqrt(v' A^2 v) = ||A v||
        v = graph.adjacency_matvec(w)  # A^2 v
        norm = np.linalg.norm(v)
        if norm == 0.0:
            break
        v /= norm
        if abs(new_est - est) <= 1e-13 * max(new_est, 1.0):
            est = new_est
            break
        est = new_est
    return min(est * (1.0 + tol), dmax)
