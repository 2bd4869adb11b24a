"""Full and budgeted step maps of the conflict-descent relaxation.

The update is projected gradient ascent on sum(x) - beta * C(x):

    x_i <- clip_[0,1]( x_i + eta * (1 - beta * sum_{j in N(i)} x_j) )

The budgeted variant restricts the neighbor sum to the routed edge subset.
Both variants share one accumulation kernel over directed (target, source)
arrays sorted by (target, source), so per-node summation runs in ascending
neighbor order and the full-support case reproduces the full step exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import accumulate
from .errors import ParameterError, UsageError
from .graph import Graph, make_rng

#: Version tag for the step/decode operator chain, recorded per run so the
#: harness can audit that all compared strategies ran the same operators.
OPERATOR_VERSION = "conflict-descent.v1+greedy-decode.v1+degree-repair.v1"


@dataclass(frozen=True)
class DynamicsConfig:
    # eta is calibrated so an unrouted node drifts across the unit range in
    # ~1/eta steps, slower than the refresh cadence; at eta >= 0.05 the state
    # saturates faster than any routing can track and every selection rule
    # degenerates to the same mush.
    eta: float = 0.01
    beta: float = 2.0
    steps: int = 100
    recall_enabled: bool = False

    def __post_init__(self):
        if self.eta <= 0:
            raise ParameterError(f"eta must be > 0, got {self.eta}")
        if self.beta <= 0:
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        if self.steps < 1:
            raise ParameterError(f"steps must be >= 1, got {self.steps}")


@dataclass
class SolverState:
    """Relaxed indicator vector, its previous-step snapshot, and step index."""

    x: np.ndarray
    x_prev: np.ndarray
    t: int = 0

    def validate(self, graph: Graph) -> None:
        if self.x.shape != (graph.n,) or self.x_prev.shape != (graph.n,):
            raise UsageError(
                f"state length {self.x.shape} does not match graph n={graph.n}")
        for arr in (self.x, self.x_prev):
            if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
                raise UsageError("state entries must lie in [0, 1]")


@dataclass
class EvalCounter:
    """Hardware-independent cost ledger (counts, not wall-clock)."""

    node_evals: int = 0
    msg_evals: int = 0
    score_evals: int = 0


def init_state(n: int, seed: int) -> SolverState:
    """i.i.d. Uniform(0.25, 0.75) start, deterministic per seed."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    x = rng.uniform(0.25, 0.75, size=n)
    return SolverState(x=x, x_prev=x.copy(), t=0)


def _apply_update(x: np.ndarray, s: np.ndarray, cfg: DynamicsConfig) -> np.ndarray:
    return np.clip(x + cfg.eta * (1.0 - cfg.beta * s), 0.0, 1.0)


def full_step(state: SolverState, graph: Graph, cfg: DynamicsConfig,
              counter: EvalCounter | None = None) -> SolverState:
    """One step with the neighbor sum over the full edge set."""
    s = accumulate(state.x, graph.adj_tgt, graph.nbrs, graph.n)
    x_new = _apply_update(state.x, s, cfg)
    if counter is not None:
        counter.node_evals += graph.n
        counter.msg_evals += 2 * graph.num_edges
    return SolverState(x=x_new, x_prev=state.x, t=state.t + 1)


def budgeted_step(state: SolverState, graph: Graph, active_set,
                  cfg: DynamicsConfig, bath_cache=None,
                  counter: EvalCounter | None = None) -> SolverState:
    """One step with the neighbor sum restricted to the routed subset M_t."""
    if cfg.recall_enabled and bath_cache is None:
        raise UsageError("recall is enabled but no bath cache was supplied")
    s = accumulate(state.x, active_set.tgt, active_set.src, graph.n)
    x_new = _apply_update(state.x, s, cfg)
    if cfg.recall_enabled:
        from .recall import apply_recall
        x_new = apply_recall(x_new, state, bath_cache, cfg)
    if counter is not None:
        counter.node_evals += graph.n
        counter.msg_evals += 2 * active_set.size
    return SolverState(x=x_new, x_prev=state.x, t=state.t + 1)


def conflict_energy(state: SolverState, graph: Graph) -> float:
    """Full-graph soft conflict energy C(x) = sum over edges of x_i * x_j.

    Always evaluated over the full edge set; this is the evaluation metric,
    not the budgeted operator.
    """
    if graph.num_edges == 0:
        return 0.0
    return float(np.sum(state.x[graph.eu] * state.x[graph.ev]))


def objective(state: SolverState) -> float:
    return float(np.sum(state.x))
