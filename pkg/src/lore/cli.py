"""Command-line interface.

Subcommands: gen, solve, ablate, sweep, bound-check. Every flag has a
config-file equivalent (JSON, via --config); explicit CLI flags override
config values.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .bounds import paired_trajectory_report
from .dynamics import DynamicsConfig
from .errors import ParameterError
from .graph import (derive_seed, gen_ba, gen_er, gen_ws, load_edge_list,
                    save_edge_list)
from .harness import (ExperimentSpec, default_ablation_spec,
                      default_sweep_spec, emit_outputs, prepare_out_dir,
                      run_ablation, run_sweep, retention_range_pp,
                      solve_instance, sweep_retention_by_value)
from .routing import BudgetConfig, Strategy


def _load_config(path):
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _merged(args, config, key, default):
    """CLI flag > config value > default."""
    val = getattr(args, key.replace("-", "_"), None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _dynamics_from(args, config) -> DynamicsConfig:
    recall = _merged(args, config, "recall", "off")
    return DynamicsConfig(
        eta=float(_merged(args, config, "eta", 0.01)),
        beta=float(_merged(args, config, "beta", 2.0)),
        steps=int(_merged(args, config, "steps", 100)),
        recall_enabled=(recall in (True, "on")),
    )


def _budget_from(args, config) -> BudgetConfig:
    return BudgetConfig(
        rho=float(_merged(args, config, "rho", 0.08)),
        gamma=float(_merged(args, config, "gamma", 0.05)),
        refresh=int(_merged(args, config, "refresh", 10)),
        lambda_stab=float(_merged(args, config, "lambda_stab", 0.5)),
        strategy=Strategy(_merged(args, config, "strategy", "lore")),
    )


def _add_dynamics_flags(p):
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--recall", choices=["on", "off"], default=None)


def _add_budget_flags(p):
    p.add_argument("--strategy", choices=[s.value for s in Strategy],
                   default=None)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--refresh", type=int, default=None)
    p.add_argument("--lambda-stab", type=float, default=None, dest="lambda_stab")


def cmd_gen(args) -> int:
    config = _load_config(args.config)
    family = _merged(args, config, "family", None)
    n = _merged(args, config, "n", None)
    seed = int(_merged(args, config, "seed", 0))
    output = _merged(args, config, "output", None)
    if family is None or n is None or output is None:
        raise ParameterError("--family, --n and -o are required")
    n = int(n)
    if family == "er":
        p = _merged(args, config, "p", None)
        if p is None:
            raise ParameterError("--p is required for the ER family")
        g = gen_er(n, float(p), seed)
    elif family == "ba":
        m = _merged(args, config, "m", None)
        if m is None:
            raise ParameterError("--m is required for the BA family")
        g = gen_ba(n, int(m), seed)
    elif family == "ws":
        g = gen_ws(n, int(_merged(args, config, "k", 4)),
                   float(_merged(args, config, "rewire", 0.1)), seed)
    else:
        raise ParameterError(f"unknown family {family!r}")
    save_edge_list(g, output)
    print(f"wrote {g.n} nodes, {g.num_edges} edges to {output}")
    return 0


def cmd_solve(args) -> int:
    config = _load_config(args.config)
    graph_path = _merged(args, config, "graph", None)
    if graph_path is None:
        raise ParameterError("--graph is required")
    out_dir = _merged(args, config, "out", None)
    if out_dir is not None:
        prepare_out_dir(out_dir)
    graph = load_edge_list(graph_path)
    dyn = _dynamics_from(args, config)
    budget = _budget_from(args, config)
    seed = int(_merged(args, config, "seed", 0))
    rec = solve_instance(
        graph, dyn, budget,
        init_seed=derive_seed(seed, 2, 0),
        route_seed=derive_seed(seed, 3, 0, 0),
        run_id=f"solve__{budget.strategy.value}", graph_id=str(graph_path))
    print(f"strategy={rec.strategy} final_size={rec.final_size} "
          f"final_energy={rec.energy[-1]:.6f} msg_evals={rec.total_msg_evals}")
    if out_dir is not None:
        spec_echo = {"command": "solve", "graph": str(graph_path),
                     "seed": seed, "dynamics": vars(dyn).copy(),
                     "budget": {**vars(budget), "strategy": budget.strategy.value}}
        emit_outputs([rec], out_dir, spec_echo)
        print(f"outputs in {out_dir}")
    return 0


def _spec_from(args, config, default_spec) -> ExperimentSpec:
    spec = (ExperimentSpec.from_dict(config) if "graphs" in config
            else default_spec)
    if args.seed is not None:
        spec.master_seed = args.seed
    # overlay explicit CLI flags on the experiment spec's values
    dyn = spec.dynamics
    spec.dynamics = _dynamics_from(args, {
        "eta": dyn.eta, "beta": dyn.beta, "steps": dyn.steps,
        "recall": "on" if dyn.recall_enabled else "off"})
    bud = spec.budget
    spec.budget = _budget_from(args, {
        "rho": bud.rho, "gamma": bud.gamma, "refresh": bud.refresh,
        "lambda_stab": bud.lambda_stab, "strategy": bud.strategy.value})
    return spec


def cmd_ablate(args) -> int:
    config = _load_config(args.config)
    spec = _spec_from(args, config, default_ablation_spec())
    out_dir = prepare_out_dir(args.out)
    started = time.perf_counter()
    records = run_ablation(spec, jobs=args.jobs)
    wall = time.perf_counter() - started
    emit_outputs(records, out_dir, spec.to_dict(),
                 extra_meta={"total_wall_s": wall})
    ok = sum(1 for r in records if not r.failed)
    print(f"{ok}/{len(records)} runs complete in {wall:.1f}s; "
          f"outputs in {out_dir}")
    return 0 if ok == len(records) else 1


def cmd_sweep(args) -> int:
    config = _load_config(args.config)
    spec = _spec_from(args, config, default_sweep_spec())
    grid = [float(v) for v in args.grid.split(",")]
    out_dir = prepare_out_dir(args.out)
    started = time.perf_counter()
    records = run_sweep(spec, args.param, grid, jobs=args.jobs)
    wall = time.perf_counter() - started
    emit_outputs(records, out_dir, {**spec.to_dict(),
                                    "sweep": {"param": args.param, "grid": grid}},
                 extra_meta={"total_wall_s": wall})
    means = sweep_retention_by_value(records)
    for value, mean in means.items():
        print(f"{args.param}={value:g}: mean retention {mean:.4f}")
    print(f"retention range: {retention_range_pp(records):.2f} pp; "
          f"outputs in {out_dir}")
    return 0


def cmd_bound_check(args) -> int:
    config = _load_config(args.config)
    graph = load_edge_list(_merged(args, config, "graph", None))
    dyn = _dynamics_from(args, config)
    budget = _budget_from(args, config)
    seed = int(_merged(args, config, "seed", 0))
    report = paired_trajectory_report(graph, dyn, budget, seed)
    doc = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(doc + "\n")
        print(f"wrote bound report to {args.out} "
              f"(violations: {len(report.violated_steps)})")
    else:
        print(doc)
    return 0 if not report.violated_steps else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lore",
        description="Budgeted interaction-evaluation routing for a "
                    "conflict-descent MIS solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random graph")
    p.add_argument("--family", choices=["er", "ba", "ws"], default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=float, default=None, help="ER edge probability")
    p.add_argument("--m", type=int, default=None, help="BA attachment count")
    p.add_argument("--k", type=int, default=None, help="WS ring degree")
    p.add_argument("--rewire", type=float, default=None, help="WS rewire probability")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run one budgeted trajectory on a graph file")
    p.add_argument("--graph", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    _add_dynamics_flags(p)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("ablate", help="run the controlled routing ablation")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_dynamics_flags(p)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("sweep", help="run a hyperparameter sensitivity sweep")
    p.add_argument("--param", required=True,
                   choices=["rho", "gamma", "refresh", "lambda_stab"])
    p.add_argument("--grid", required=True,
                   help="comma-separated grid values, e.g. 0,0.25,0.5")
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    _add_dynamics_flags(p)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bound-check", help="paired trajectory error-bound report")
    p.add_argument("--graph", default=None)
    p.add_argument("--config", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    _add_dynamics_flags(p)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_bound_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
