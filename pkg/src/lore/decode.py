"""Greedy decoding of the relaxed state into a feasible independent set, and
the degree-greedy repair pass. Both are fixed operators, identical across all
compared routing strategies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import greedy_decode as _decode_kernel
from ._kernels import repair as _repair_kernel
from .dynamics import SolverState
from .graph import Graph


@dataclass
class NodeSet:
    members: np.ndarray  # sorted node indices

    @property
    def size(self) -> int:
        return len(self.members)


def is_independent(members, graph: Graph) -> bool:
    """Full-edge-scan independence check."""
    mask = np.zeros(graph.n, dtype=bool)
    mask[np.asarray(members, dtype=np.int64)] = True
    if graph.num_edges == 0:
        return True
    return not np.any(mask[graph.eu] & mask[graph.ev])


def greedy_decode(state: SolverState, graph: Graph) -> NodeSet:
    """Visit nodes in descending x (ties toward ascending index); keep a node
    iff no already-kept neighbor. The output is always an independent set."""
    order = np.argsort(-state.x, kind="stable").astype(np.int64)
    chosen = _decode_kernel(order, graph.indptr, graph.nbrs)
    return NodeSet(members=np.flatnonzero(chosen).astype(np.int64))


def repair_and_validate(node_set: NodeSet, graph: Graph) -> NodeSet:
    """Remove the higher-degree endpoint of every violated edge (degree tie:
    higher index) until the set is independent; feasible inputs pass through
    unchanged."""
    mask = np.zeros(graph.n, dtype=np.uint8)
    mask[node_set.members] = 1
    if graph.num_edges:
        _repair_kernel(mask, graph.eu, graph.ev, graph.degrees)
    members = np.flatnonzero(mask).astype(np.int64)
    assert is_independent(members, graph), "repair left a conflicting edge"
    return NodeSet(members=members)
