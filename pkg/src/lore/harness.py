"""Experiment orchestration: the controlled routing ablation, parameter
sweeps with full-support references, cost accounting, and trace emission.

Costs are reported in interaction-evaluation counts (the hardware-independent
analogue of a per-step compute envelope); wall-clock is logged to the run
metadata only and carries no acceptance weight. Every output byte is a pure
function of (spec, master seed).
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _kernels
from .bounds import activity_stats
from .decode import greedy_decode, repair_and_validate
from .dynamics import (OPERATOR_VERSION, DynamicsConfig, EvalCounter,
                       SolverState, budgeted_step, conflict_energy, init_state,
                       objective)
from .errors import ParameterError
from .graph import PRNG_ID, Graph, derive_seed, gen_ba, gen_er, gen_ws, make_rng
from .recall import refresh_bath_cache
from .routing import BudgetConfig, Strategy, build_active_set, overlap_fraction

REFRESH_CONVENTION = "steps-elapsed (refresh at t = 0, R, 2R, ...)"
RECALL_BLEND = "alpha-weighted routed update vs bath-extrapolated signal"

STRATEGY_ORDER = list(Strategy)


@dataclass(frozen=True)
class GraphSpec:
    family: str
    n: int
    count: int = 1
    p: float | None = None
    m: int | None = None
    k: int | None = None
    rewire: float | None = None

    def __post_init__(self):
        if self.family not in ("er", "ba", "ws"):
            raise ParameterError(f"unknown graph family {self.family!r}")
        if self.count < 1:
            raise ParameterError("count must be >= 1")

    def generate(self, seed: int) -> Graph:
        if self.family == "er":
            return gen_er(self.n, self.p if self.p is not None else 0.05, seed)
        if self.family == "ba":
            return gen_ba(self.n, self.m if self.m is not None else 3, seed)
        return gen_ws(self.n, self.k if self.k is not None else 4,
                      self.rewire if self.rewire is not None else 0.1, seed)

    def label(self) -> str:
        if self.family == "er":
            return f"er-n{self.n}-p{self.p if self.p is not None else 0.05}"
        if self.family == "ba":
            return f"ba-n{self.n}-m{self.m if self.m is not None else 3}"
        return (f"ws-n{self.n}-k{self.k if self.k is not None else 4}"
                f"-r{self.rewire if self.rewire is not None else 0.1}")

    def to_dict(self) -> dict:
        d = {"family": self.family, "n": self.n, "count": self.count}
        for key in ("p", "m", "k", "rewire"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        return d


@dataclass
class ExperimentSpec:
    graphs: list[GraphSpec]
    dynamics: DynamicsConfig = field(default_factory=DynamicsConfig)
    budget: BudgetConfig = field(default_factory=BudgetConfig)
    strategies: list[Strategy] = field(default_factory=lambda: list(STRATEGY_ORDER))
    master_seed: int = 0
    label: str = "experiment"

    def __post_init__(self):
        if not self.graphs:
            raise ParameterError("at least one graph spec is required")
        if not self.strategies:
            raise ParameterError("at least one strategy is required")
        self.strategies = [Strategy(s) for s in self.strategies]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "master_seed": self.master_seed,
            "graphs": [g.to_dict() for g in self.graphs],
            "dynamics": {"eta": self.dynamics.eta, "beta": self.dynamics.beta,
                         "steps": self.dynamics.steps,
                         "recall": self.dynamics.recall_enabled},
            "budget": {"rho": self.budget.rho, "gamma": self.budget.gamma,
                       "refresh": self.budget.refresh,
                       "lambda_stab": self.budget.lambda_stab,
                       "strategy": self.budget.strategy.value},
            "strategies": [s.value for s in self.strategies],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        dyn = dict(d.get("dynamics", {}))
        if "recall" in dyn:
            dyn["recall_enabled"] = bool(dyn.pop("recall"))
        bud = dict(d.get("budget", {}))
        if "strategy" in bud:
            bud["strategy"] = Strategy(bud["strategy"])
        return cls(
            graphs=[GraphSpec(**g) for g in d["graphs"]],
            dynamics=DynamicsConfig(**dyn),
            budget=BudgetConfig(**bud),
            strategies=[Strategy(s) for s in d.get(
                "strategies", [s.value for s in STRATEGY_ORDER])],
            master_seed=d.get("master_seed", 0),
            label=d.get("label", "experiment"),
        )


def default_ablation_spec(master_seed: int = 20240) -> ExperimentSpec:
    """The controlled routing ablation suite: 20 ER (p=0.05) and 20 BA (m=3)
    graphs split over n in {500, 1000}, all six strategies."""
    return ExperimentSpec(
        graphs=[
            GraphSpec("er", 500, count=10, p=0.05),
            GraphSpec("er", 1000, count=10, p=0.05),
            GraphSpec("ba", 500, count=10, m=3),
            GraphSpec("ba", 1000, count=10, m=3),
        ],
        dynamics=DynamicsConfig(steps=100),
        budget=BudgetConfig(rho=0.08),
        strategies=list(STRATEGY_ORDER),
        master_seed=master_seed,
        label="routing-ablation",
    )


def default_sweep_spec(master_seed: int = 71) -> ExperimentSpec:
    return ExperimentSpec(
        graphs=[GraphSpec("er", 500, count=3, p=0.05)],
        dynamics=DynamicsConfig(steps=100),
        budget=BudgetConfig(rho=0.08),
        strategies=[Strategy.LORE],
        master_seed=master_seed,
        label="sensitivity-sweep",
    )


@dataclass
class RunRecord:
    run_id: str
    graph_id: str
    strategy: str
    n: int
    m_edges: int
    init_seed: int
    rho: float
    gamma: float
    refresh: int
    lambda_stab: float
    eta: float
    beta: float
    steps: int
    recall: bool
    energy: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    legal_size: list = field(default_factory=list)
    m_size: list = field(default_factory=list)
    msg_evals: list = field(default_factory=list)
    overlap: dict = field(default_factory=dict)  # step -> fraction
    activity: list = field(default_factory=list)  # optional ActivityStats
    final_size: int = 0
    total_msg_evals: int = 0
    total_node_evals: int = 0
    total_score_evals: int = 0
    grid_param: str | None = None
    grid_value: float | None = None
    reference_id: str | None = None
    retention: float | None = None
    operator_version: str = OPERATOR_VERSION
    prng_id: str = PRNG_ID
    config_hash: str = ""
    wall_s: float = 0.0  # metadata only, never in deterministic outputs
    failed: bool = False
    error: str | None = None

    def initial_x(self) -> np.ndarray:
        return init_state(self.n, self.init_seed).x

    def run_config_hash(self) -> str:
        params = {"rho": self.rho, "gamma": self.gamma, "refresh": self.refresh,
                  "lambda_stab": self.lambda_stab, "eta": self.eta,
                  "beta": self.beta, "steps": self.steps, "recall": self.recall,
                  "strategy": self.strategy, "init_seed": self.init_seed}
        return config_hash(params)


def solve_instance(graph: Graph, dyn_cfg: DynamicsConfig,
                   budget_cfg: BudgetConfig, init_seed: int, route_seed: int,
                   run_id: str = "run", graph_id: str = "graph",
                   collect_activity: bool = False) -> RunRecord:
    """Run one budgeted trajectory and record the full per-step trace.

    The anytime legal size decodes and repairs a copy of the state at every
    step; decode never mutates the trajectory.
    """
    started = time.perf_counter()
    rec = RunRecord(
        run_id=run_id, graph_id=graph_id, strategy=budget_cfg.strategy.value,
        n=graph.n, m_edges=graph.num_edges, init_seed=init_seed,
        rho=budget_cfg.rho, gamma=budget_cfg.gamma, refresh=budget_cfg.refresh,
        lambda_stab=budget_cfg.lambda_stab, eta=dyn_cfg.eta, beta=dyn_cfg.beta,
        steps=dyn_cfg.steps, recall=dyn_cfg.recall_enabled)

    rec.config_hash = rec.run_config_hash()
    counter = EvalCounter()
    state = init_state(graph.n, init_seed)
    rng = make_rng(route_seed)

    def legal(s: SolverState) -> int:
        return repair_and_validate(greedy_decode(s, graph), graph).size

    rec.energy.append(conflict_energy(state, graph))
    rec.objective.append(objective(state))
    rec.legal_size.append(legal(state))
    rec.m_size.append(0)
    rec.msg_evals.append(0)

    active = None
    cache = None
    prev_refresh_ids = None
    for t in range(dyn_cfg.steps):
        active = build_active_set(budget_cfg.strategy, state, graph,
                                  budget_cfg, prev_set=active, t=t, rng=rng,
                                  counter=counter)
        if active.created_at == t:
            if prev_refresh_ids is not None and len(prev_refresh_ids):
                rec.overlap[t] = overlap_fraction(prev_refresh_ids,
                                                  active.edge_ids)
            prev_refresh_ids = active.edge_ids
            if dyn_cfg.recall_enabled:
                cache = refresh_bath_cache(state, graph, active)
        if collect_activity:
            rec.activity.append(activity_stats(state, active, graph))
        state = budgeted_step(state, graph, active, dyn_cfg, bath_cache=cache,
                              counter=counter)
        rec.energy.append(conflict_energy(state, graph))
        rec.objective.append(objective(state))
        rec.legal_size.append(legal(state))
        rec.m_size.append(active.size)
        rec.msg_evals.append(counter.msg_evals)

    rec.final_size = rec.legal_size[-1]
    rec.total_msg_evals = counter.msg_evals
    rec.total_node_evals = counter.node_evals
    rec.total_score_evals = counter.score_evals
    rec.wall_s = time.perf_counter() - started
    return rec


# ---------------------------------------------------------------------------
# Ablation and sweep drivers
# ---------------------------------------------------------------------------

_GRAPH_STREAM, _INIT_STREAM, _ROUTE_STREAM = 1, 2, 3


@dataclass(frozen=True)
class _InstanceTask:
    spec: ExperimentSpec
    graph_spec: GraphSpec
    g_idx: int
    sweep_param: str | None = None
    sweep_grid: tuple = ()


def _instance_graph(task: _InstanceTask) -> tuple[str, Graph, int]:
    seed = derive_seed(task.spec.master_seed, _GRAPH_STREAM, task.g_idx)
    graph = task.graph_spec.generate(seed)
    graph_id = f"{task.graph_spec.label()}-i{task.g_idx:03d}"
    return graph_id, graph, seed


def _budget_with(budget: BudgetConfig, param: str, value) -> BudgetConfig:
    if param not in ("rho", "gamma", "refresh", "lambda_stab"):
        raise ParameterError(f"unknown sweep parameter {param!r}")
    value = int(value) if param == "refresh" else float(value)
    return replace(budget, **{param: value})


def _run_ablation_instance(task: _InstanceTask) -> list[RunRecord]:
    spec = task.spec
    graph_id, graph, _ = _instance_graph(task)
    init_seed = derive_seed(spec.master_seed, _INIT_STREAM, task.g_idx)
    records = []
    for strategy in spec.strategies:
        s_idx = STRATEGY_ORDER.index(strategy)
        route_seed = derive_seed(spec.master_seed, _ROUTE_STREAM, task.g_idx, s_idx)
        budget = replace(spec.budget, strategy=strategy)
        run_id = f"{graph_id}__{strategy.value}"
        try:
            records.append(solve_instance(graph, spec.dynamics, budget,
                                          init_seed, route_seed,
                                          run_id=run_id, graph_id=graph_id))
        except Exception as exc:  # cell-level failure: record and continue
            records.append(RunRecord(
                run_id=run_id, graph_id=graph_id, strategy=strategy.value,
                n=graph.n, m_edges=graph.num_edges, init_seed=init_seed,
                rho=budget.rho, gamma=budget.gamma, refresh=budget.refresh,
                lambda_stab=budget.lambda_stab, eta=spec.dynamics.eta,
                beta=spec.dynamics.beta, steps=spec.dynamics.steps,
                recall=spec.dynamics.recall_enabled,
                failed=True, error=f"{type(exc).__name__}: {exc}"))
    return records


def _run_sweep_instance(task: _InstanceTask) -> list[RunRecord]:
    spec = task.spec
    graph_id, graph, _ = _instance_graph(task)
    init_seed = derive_seed(spec.master_seed, _INIT_STREAM, task.g_idx)
    route_seed = derive_seed(spec.master_seed, _ROUTE_STREAM, task.g_idx, 0)
    strategy = spec.budget.strategy

    ref_budget = replace(spec.budget, rho=1.0, strategy=strategy)
    ref_id = f"{graph_id}__{strategy.value}__reference"
    reference = solve_instance(graph, spec.dynamics, ref_budget, init_seed,
                               route_seed, run_id=ref_id, graph_id=graph_id)
    reference.grid_param = task.sweep_param
    records = [reference]
    for value in task.sweep_grid:
        budget = _budget_with(spec.budget, task.sweep_param, value)
        run_id = f"{graph_id}__{strategy.value}__{task.sweep_param}={value:g}"
        rec = solve_instance(graph, spec.dynamics, budget, init_seed,
                             route_seed, run_id=run_id, graph_id=graph_id)
        rec.grid_param = task.sweep_param
        rec.grid_value = float(value)
        rec.reference_id = ref_id
        if reference.final_size > 0:
            rec.retention = rec.final_size / reference.final_size
        records.append(rec)
    return records


def _run_tasks(tasks, worker, jobs: int) -> list[RunRecord]:
    if jobs <= 1:
        chunks = [worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(worker, tasks))
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.graph_id, r.strategy,
                                r.grid_value if r.grid_value is not None else -1.0,
                                r.run_id))
    return records


def _instance_tasks(spec: ExperimentSpec, sweep_param=None, sweep_grid=()):
    tasks = []
    g_idx = 0
    for gspec in spec.graphs:
        for _ in range(gspec.count):
            tasks.append(_InstanceTask(spec, gspec, g_idx, sweep_param,
                                       tuple(sweep_grid)))
            g_idx += 1
    return tasks


def run_ablation(spec: ExperimentSpec, jobs: int = 1) -> list[RunRecord]:
    """One RunRecord per (graph instance, strategy); the initial state is
    generated once per instance seed and shared verbatim across strategies."""
    return _run_tasks(_instance_tasks(spec), _run_ablation_instance, jobs)


def run_sweep(spec: ExperimentSpec, param: str, grid, jobs: int = 1) -> list[RunRecord]:
    """Cartesian (graphs x grid) runs, each paired with a full-support
    (rho = 1) reference on the same seed; retention = final size ratio."""
    if not len(grid):
        raise ParameterError("sweep grid must be non-empty")
    _budget_with(BudgetConfig(), param, grid[0])  # validate param early
    tasks = _instance_tasks(spec, sweep_param=param, sweep_grid=grid)
    return _run_tasks(tasks, _run_sweep_instance, jobs)


def sweep_retention_by_value(records) -> dict[float, float]:
    """Mean retention per grid value (reference runs excluded)."""
    by_value: dict[float, list[float]] = {}
    for r in records:
        if r.grid_value is not None and r.retention is not None:
            by_value.setdefault(r.grid_value, []).append(r.retention)
    return {v: float(np.mean(vals)) for v, vals in sorted(by_value.items())}


def retention_range_pp(records) -> float:
    """Spread of per-grid-value mean retention, in percentage points."""
    means = list(sweep_retention_by_value(records).values())
    if not means:
        return 0.0
    return (max(means) - min(means)) * 100.0


# ---------------------------------------------------------------------------
# Output emission
# ---------------------------------------------------------------------------

SUMMARY_FIELDS = [
    "run", "graph", "strategy", "n", "m_edges", "init_seed", "rho", "gamma",
    "refresh", "lambda_stab", "eta", "beta", "steps", "recall", "grid_param",
    "grid_value", "final_size", "final_energy", "total_msg_evals",
    "total_node_evals", "total_score_evals", "retention", "config_hash",
    "operator_version", "failed",
]


def config_hash(spec_echo: dict) -> str:
    blob = json.dumps(spec_echo, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def prepare_out_dir(path) -> Path:
    """Validate the output location up front, before any run starts."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write-probe"
    probe.write_text("ok")
    probe.unlink()
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_outputs(records, out_dir, spec_echo: dict, extra_meta: dict | None = None):
    """Write trace.jsonl, summary.csv and metadata.json.

    The JSONL/CSV bytes are a pure function of the records; wall-clock and
    environment details go to metadata.json only.
    """
    out = prepare_out_dir(out_dir)

    trace_path = out / "trace.jsonl"
    with open(trace_path, "w") as fh:
        for rec in records:
            if rec.failed:
                continue
            for t in range(len(rec.energy)):
                row = {
                    "run": rec.run_id,
                    "t": t,
                    "energy": rec.energy[t],
                    "objective": rec.objective[t],
                    "legal_size": rec.legal_size[t],
                    "m_size": rec.m_size[t],
                    "overlap": rec.overlap.get(t),
                    "msg_evals": rec.msg_evals[t],
                }
                fh.write(json.dumps(row, separators=(",", ":")) + "\n")

    summary_path = out / "summary.csv"
    with open(summary_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_FIELDS)
        for rec in records:
            writer.writerow([_fmt(v) for v in (
                rec.run_id, rec.graph_id, rec.strategy, rec.n, rec.m_edges,
                rec.init_seed, rec.rho, rec.gamma, rec.refresh,
                rec.lambda_stab, rec.eta, rec.beta, rec.steps, rec.recall,
                rec.grid_param, rec.grid_value, rec.final_size,
                rec.energy[-1] if rec.energy else None,
                rec.total_msg_evals, rec.total_node_evals,
                rec.total_score_evals, rec.retention, rec.config_hash,
                rec.operator_version, rec.failed)])

    meta = {
        "config_hash": config_hash(spec_echo),
        "spec": spec_echo,
        "prng": PRNG_ID,
        "operator_version": OPERATOR_VERSION,
        "kernel_backend": _kernels.BACKEND,
        "numpy_version": np.__version__,
        "refresh_convention": REFRESH_CONVENTION,
        "recall_blend": RECALL_BLEND,
        "wall_s": {rec.run_id: rec.wall_s for rec in records},
        "errors": {rec.run_id: rec.error for rec in records if rec.failed},
    }
    meta.update(extra_meta or {})
    with open(out / "metadata.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return trace_path, summary_path, out / "metadata.json"
