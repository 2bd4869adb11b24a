"""Optional global recall: cached omitted-neighbor pressure plus the
coverage-weighted blend that reconnects the routed cluster to the rest of
the graph.

The cache holds one tensor of omitted-neighbor pressure s_hat captured at the
last refresh, per-node coverage alpha, and the degree rescale needed to
extrapolate the stale pressure to full-neighborhood magnitude. Between
refreshes the cache is reused unchanged; the error-bound module charges that
staleness to the recall residual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import accumulate
from .dynamics import DynamicsConfig, SolverState
from .errors import UsageError
from .graph import Graph
from .routing import ActiveSet


@dataclass
class BathCache:
    s_hat: np.ndarray       # omitted-neighbor pressure at the last refresh
    alpha: np.ndarray       # fraction of each node's edges evaluated exactly
    scale: np.ndarray       # d_i / max(d_i - d_i(M_t), 1), extrapolation factor
    refreshed_at: int


def refresh_bath_cache(state: SolverState, graph: Graph,
                       active_set: ActiveSet) -> BathCache:
    """Capture s_hat_i = sum of x_j over omitted neighbors, and coverage."""
    if graph.num_edges:
        omitted = ~active_set.mask[graph.nbr_eid]
    else:
        omitted = np.zeros(0, dtype=bool)
    s_hat = accumulate(state.x, graph.adj_tgt[omitted], graph.nbrs[omitted],
                       graph.n)
    deg = graph.degrees
    alpha = np.where(deg > 0, active_set.active_deg / np.maximum(deg, 1), 1.0)
    scale = deg / np.maximum(deg - active_set.active_deg, 1)
    return BathCache(s_hat=s_hat, alpha=alpha, scale=scale,
                     refreshed_at=state.t)


def apply_recall(cluster_update: np.ndarray, state: SolverState,
                 cache: BathCache, cfg: DynamicsConfig) -> np.ndarray:
    """Coverage-weighted interpolation between the routed update and the
    bath-driven signal g = clip(x + eta * (1 - beta * s_hat * scale))."""
    if cluster_update.shape != state.x.shape or cache.alpha.shape != state.x.shape:
        raise UsageError("cluster update / cache shape mismatch with state")
    g = np.clip(state.x + cfg.eta * (1.0 - cfg.beta * cache.s_hat * cache.scale),
                0.0, 1.0)
    out = cache.alpha * cluster_update + (1.0 - cache.alpha) * g
    return np.clip(out, 0.0, 1.0)
