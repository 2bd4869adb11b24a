"""Per-step construction of the routed edge subset M_t under a hard budget.

Six selection strategies are implemented behind one entry point,
:func:`build_active_set`. Dynamic strategies recompute the set at steps
t = 0, R, 2R, ...; static ones only at t = 0 and return the previous set
unchanged in between. Every top-k breaks ties by ascending EdgeId.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dynamics import EvalCounter, SolverState
from .errors import ParameterError, UndefinedValueError, UsageError
from .graph import Graph


class Strategy(str, Enum):
    LORE = "lore"
    GREEDY_CONFLICT = "greedy_conflict"
    GREEDY_DEG_DYN = "greedy_deg_dyn"
    LORE_STATIC = "lore_static"
    GREEDY_DEGREE = "greedy_degree"
    RANDOM = "random"

    @property
    def dynamic(self) -> bool:
        """Whether the strategy refreshes its set every R steps."""
        return self in (Strategy.LORE, Strategy.GREEDY_CONFLICT,
                        Strategy.GREEDY_DEG_DYN, Strategy.RANDOM)


@dataclass(frozen=True)
class BudgetConfig:
    rho: float = 0.08
    gamma: float = 0.05
    refresh: int = 10
    lambda_stab: float = 0.5
    strategy: Strategy = Strategy.LORE

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ParameterError(f"rho must be in (0, 1], got {self.rho}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.refresh < 1:
            raise ParameterError(f"refresh must be >= 1, got {self.refresh}")
        if self.lambda_stab < 0.0:
            raise ParameterError(
                f"lambda_stab must be >= 0, got {self.lambda_stab}")


def budget_size(graph: Graph, rho: float) -> int:
    """B = floor(rho * |E|), floored at 1 on non-empty graphs so strategies
    stay distinguishable at desk scale, and capped at |E|."""
    m = graph.num_edges
    if m == 0:
        return 0
    return min(max(int(np.floor(rho * m)), 1), m)


@dataclass
class ActiveSet:
    """Routed edge subset with its directed restriction precomputed.

    ``tgt``/``src`` are the adjacency entries whose edge lies in the set, in
    CSR order (sorted by target then source), ready for the step kernel.
    """

    edge_ids: np.ndarray
    skeleton_ids: np.ndarray
    created_at: int
    mask: np.ndarray
    tgt: np.ndarray
    src: np.ndarray
    active_deg: np.ndarray

    @classmethod
    def build(cls, graph: Graph, edge_ids: np.ndarray,
              skeleton_ids: np.ndarray, created_at: int) -> "ActiveSet":
        edge_ids = np.sort(np.asarray(edge_ids, dtype=np.int64))
        mask = np.zeros(graph.num_edges, dtype=bool)
        mask[edge_ids] = True
        sel = mask[graph.nbr_eid] if graph.num_edges else np.zeros(0, dtype=bool)
        tgt = graph.adj_tgt[sel]
        src = graph.nbrs[sel]
        return cls(
            edge_ids=edge_ids,
            skeleton_ids=np.sort(np.asarray(skeleton_ids, dtype=np.int64)),
            created_at=created_at,
            mask=mask,
            tgt=tgt,
            src=src,
            active_deg=np.bincount(tgt, minlength=graph.n).astype(np.int64),
        )

    @property
    def size(self) -> int:
        return len(self.edge_ids)


def node_uncertainty(x):
    """u = 1 - |2x - 1|, maximal at x = 1/2. Works on scalars and arrays."""
    return 1.0 - np.abs(2.0 * x - 1.0)


def edge_scores(state: SolverState, graph: Graph, lambda_stab: float) -> np.ndarray:
    """Routing score for every edge: endpoint-uncertainty product plus a
    stability-weighted temporal-movement term."""
    u = node_uncertainty(state.x)
    move = np.abs(state.x - state.x_prev)
    return (u[graph.eu] * u[graph.ev]
            + lambda_stab * (move[graph.eu] + move[graph.ev]))


def edge_score(state: SolverState, graph: Graph, edge_id: int,
               lambda_stab: float) -> float:
    i, j = graph.edges[edge_id]
    u = node_uncertainty(state.x)
    move = np.abs(state.x - state.x_prev)
    return float(u[i] * u[j] + lambda_stab * (move[i] + move[j]))


def _top_k(scores: np.ndarray, k: int, candidate_ids: np.ndarray | None = None) -> np.ndarray:
    """Indices of the k largest scores; ties resolved toward ascending EdgeId.

    ``scores`` is indexed by candidate position; ``candidate_ids`` maps
    positions back to EdgeIds (identity when None). Candidates must be listed
    in ascending EdgeId order for the stable sort to implement the tie rule.
    """
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-scores, kind="stable")[:k]
    if candidate_ids is None:
        return np.sort(order.astype(np.int64))
    return np.sort(candidate_ids[order])


def select_skeleton(graph: Graph, gamma: float, budget: int) -> np.ndarray:
    """The floor(gamma * B) edges of largest endpoint-degree sum."""
    if budget > graph.num_edges:
        raise UsageError("budget exceeds edge count")
    k = int(np.floor(gamma * budget))
    if k == 0:
        return np.empty(0, dtype=np.int64)
    sums = (graph.degrees[graph.eu] + graph.degrees[graph.ev]).astype(np.float64)
    return _top_k(sums, k)


def build_active_set(strategy: Strategy, state: SolverState, graph: Graph,
                     cfg: BudgetConfig, prev_set: ActiveSet | None = None,
                     t: int = 0, rng: np.random.Generator | None = None,
                     counter: EvalCounter | None = None) -> ActiveSet:
    """Return M_t: a fresh selection on refresh steps, ``prev_set`` otherwise.

    Refresh steps are t = 0 (all strategies) and t = 0 mod R (dynamic ones).
    ``rng`` is required by the Random strategy; ``counter`` is charged with
    the number of per-edge proxy-score evaluations the refresh performs
    (the one-off degree-sum skeleton precompute is not charged).
    """
    if not isinstance(strategy, Strategy):
        try:
            strategy = Strategy(strategy)
        except ValueError:
            raise ParameterError(f"unknown strategy {strategy!r}")
    is_refresh = t == 0 or (strategy.dynamic and t % cfg.refresh == 0)
    if not is_refresh:
        if prev_set is None:
            raise UsageError(f"step {t} is not a refresh step but no previous "
                             "active set was supplied")
        return prev_set

    m = graph.num_edges
    B = budget_size(graph, cfg.rho)
    empty = np.empty(0, dtype=np.int64)
    if B == 0:
        return ActiveSet.build(graph, empty, empty, t)

    if strategy in (Strategy.LORE, Strategy.LORE_STATIC):
        if prev_set is not None and len(prev_set.skeleton_ids):
            skel = prev_set.skeleton_ids  # fixed across refreshes by contract
        else:
            skel = select_skeleton(graph, cfg.gamma, B)
        in_skel = np.zeros(m, dtype=bool)
        in_skel[skel] = True
        pool = np.flatnonzero(~in_skel).astype(np.int64)
        scores = edge_scores(state, graph, cfg.lambda_stab)[pool]
        hot = _top_k(scores, B - len(skel), pool)
        ids = np.concatenate((skel, hot))
        if counter is not None:
            counter.score_evals += len(pool)
        return ActiveSet.build(graph, ids, skel, t)

    if strategy == Strategy.GREEDY_CONFLICT:
        scores = state.x[graph.eu] * state.x[graph.ev]
    elif strategy == Strategy.GREEDY_DEG_DYN:
        scores = ((graph.degrees[graph.eu] + graph.degrees[graph.ev])
                  * (state.x[graph.eu] + state.x[graph.ev]))
    elif strategy == Strategy.GREEDY_DEGREE:
        scores = (graph.degrees[graph.eu] + graph.degrees[graph.ev]).astype(np.float64)
    elif strategy == Strategy.RANDOM:
        if rng is None:
            raise UsageError("Random strategy needs the run's seeded generator")
        ids = np.sort(rng.choice(m, size=B, replace=False).astype(np.int64))
        return ActiveSet.build(graph, ids, empty, t)
    else:  # pragma: no cover - exhaustive above
        raise ParameterError(f"unknown strategy {strategy!r}")

    if counter is not None:
        counter.score_evals += m
    ids = _top_k(np.asarray(scores, dtype=np.float64), B)
    return ActiveSet.build(graph, ids, empty, t)


def overlap_fraction(set_a, set_b) -> float:
    """|A intersect B| / |A| for two edge-id sets (or ActiveSets)."""
    a = set_a.edge_ids if isinstance(set_a, ActiveSet) else np.asarray(set_a)
    b = set_b.edge_ids if isinstance(set_b, ActiveSet) else np.asarray(set_b)
    if len(a) == 0:
        raise UndefinedValueError("overlap fraction undefined for empty set_a")
    return len(np.intersect1d(a, b)) / len(a)
