"""Runtime error-bound instrumentation: paired full/budgeted trajectories,
the per-step recursion e_{t+1} <= L e_t + ||delta_t||, the residual split
into omitted-message mass and recall residual, and cluster/bath activity.

The budgeted trajectory is primary (routing reads its state); the full
trajectory is the reference oracle. All norms are Euclidean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import accumulate
from .dynamics import (DynamicsConfig, SolverState, budgeted_step,
                       full_step, init_state)
from .graph import Graph, derive_seed, make_rng, max_degree, spectral_norm_upper
from .recall import refresh_bath_cache
from .routing import ActiveSet, BudgetConfig, build_active_set, node_uncertainty

RECURSION_TOL = 1e-9


def lipschitz_bound(graph: Graph, cfg: DynamicsConfig) -> float:
    """Certified Lipschitz constant of the full step map.

    The pre-clip map x -> x + eta (1 - beta A x) is affine with linear part
    I - eta beta A, and clip is 1-Lipschitz, so
    L <= 1 + eta beta ||A||_2 <= 1 + eta beta Delta_max.
    """
    snu = spectral_norm_upper(graph)
    return min(1.0 + cfg.eta * cfg.beta * snu,
               1.0 + cfg.eta * cfg.beta * max_degree(graph))


def omitted_mass(state: SolverState, graph: Graph, active_set: ActiveSet,
                 cfg: DynamicsConfig) -> float:
    """eta beta times the l2 norm of the per-node omitted-neighbor pressure:
    the interaction contribution dropped by restricting the step to M_t."""
    s_full = accumulate(state.x, graph.adj_tgt, graph.nbrs, graph.n)
    s_act = accumulate(state.x, active_set.tgt, active_set.src, graph.n)
    return float(cfg.eta * cfg.beta * np.linalg.norm(s_full - s_act))


@dataclass
class BoundReport:
    e: np.ndarray            # trajectory error, length steps+1, e[0] = 0
    delta: np.ndarray        # per-step truncation residual, length steps
    eps_rho: np.ndarray      # omitted-message mass, length steps
    r: np.ndarray            # recall residual (zeros when recall is off)
    lipschitz: float
    violated_steps: list[int]
    rho: float
    strategy: str
    seed: int
    steps: int
    recall: bool

    def unrolled_bound(self) -> float:
        """Geometric-series bound on e_T: sum_k L^(T-1-k) ||delta_k||."""
        T = self.steps
        powers = self.lipschitz ** np.arange(T - 1, -1, -1, dtype=np.float64)
        return float(np.sum(powers * self.delta))

    def to_dict(self) -> dict:
        return {
            "lipschitz": self.lipschitz,
            "rho": self.rho,
            "strategy": self.strategy,
            "seed": self.seed,
            "steps": self.steps,
            "recall": self.recall,
            "e": self.e.tolist(),
            "delta": self.delta.tolist(),
            "eps_rho": self.eps_rho.tolist(),
            "r": self.r.tolist(),
            "violated_steps": self.violated_steps,
            "final_error": float(self.e[-1]),
            "unrolled_bound": self.unrolled_bound(),
        }


@dataclass
class ActivityStats:
    cluster_mean_u: float | None
    bath_mean_u: float | None  # absent (None) when the bath is empty
    step: int


def activity_stats(state: SolverState, active_set: ActiveSet,
                   graph: Graph) -> ActivityStats:
    """Mean endpoint-uncertainty product over the routed and omitted edges."""
    u = node_uncertainty(state.x)
    prod = u[graph.eu] * u[graph.ev]
    in_set = active_set.mask
    cluster = float(prod[in_set].mean()) if in_set.any() else None
    bath = float(prod[~in_set].mean()) if (~in_set).any() else None
    return ActivityStats(cluster_mean_u=cluster, bath_mean_u=bath, step=state.t)


def paired_trajectory_report(graph: Graph, cfg: DynamicsConfig,
                             budget_cfg: BudgetConfig, seed: int) -> BoundReport:
    """Advance full and budgeted trajectories in lockstep from one shared
    initialization, measuring the error recursion quantities at every step."""
    T = cfg.steps
    L = lipschitz_bound(graph, cfg)
    full = init_state(graph.n, seed)
    bud = init_state(graph.n, seed)
    rng = make_rng(derive_seed(seed, 0xB0))  # routing rng (Random strategy)

    e = np.zeros(T + 1)
    delta = np.zeros(T)
    eps = np.zeros(T)
    r = np.zeros(T)
    violated: list[int] = []

    active = None
    cache = None
    for t in range(T):
        active = build_active_set(budget_cfg.strategy, bud, graph, budget_cfg,
                                  prev_set=active, t=t, rng=rng)
        refreshed = active.created_at == t
        if cfg.recall_enabled and (cache is None or refreshed):
            cache = refresh_bath_cache(bud, graph, active)

        eps[t] = omitted_mass(bud, graph, active, cfg)
        full_at_bud = full_step(bud, graph, cfg)
        bud_next = budgeted_step(bud, graph, active, cfg, bath_cache=cache)
        delta[t] = float(np.linalg.norm(bud_next.x - full_at_bud.x))
        if cfg.recall_enabled:
            # residual remaining after the recall correction
            r[t] = delta[t]

        full = full_step(full, graph, cfg)
        bud = bud_next
        e[t + 1] = float(np.linalg.norm(bud.x - full.x))
        if e[t + 1] > L * e[t] + delta[t] + RECURSION_TOL:
            violated.append(t)

    return BoundReport(e=e, delta=delta, eps_rho=eps, r=r, lipschitz=L,
                       violated_steps=violated, rho=budget_cfg.rho,
                       strategy=str(budget_cfg.strategy.value), seed=seed,
                       steps=T, recall=cfg.recall_enabled)
