"""Budgeted interaction-evaluation routing for an iterative conflict-descent
maximum-independent-set solver, with routing-strategy ablation, optional
global recall, and a runtime error-bound checker."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .bounds import (ActivityStats, BoundReport, activity_stats,
                     lipschitz_bound, omitted_mass, paired_trajectory_report)
from .decode import NodeSet, greedy_decode, is_independent, repair_and_validate
from .dynamics import (OPERATOR_VERSION, DynamicsConfig, EvalCounter,
                       SolverState, budgeted_step, conflict_energy, full_step,
                       init_state, objective)
from .errors import (GraphParseError, ParameterError, UndefinedValueError,
                     UsageError)
from .graph import (PRNG_ID, Graph, derive_seed, gen_ba, gen_er, gen_ws,
                    load_edge_list, make_rng, max_degree, save_edge_list,
                    spectral_norm_upper)
from .harness import (ExperimentSpec, GraphSpec, RunRecord,
                      default_ablation_spec, default_sweep_spec, emit_outputs,
                      retention_range_pp, run_ablation, run_sweep,
                      solve_instance, sweep_retention_by_value)
from .recall import BathCache, apply_recall, refresh_bath_cache
from .routing import (ActiveSet, BudgetConfig, Strategy, budget_size,
                      build_active_set, edge_score, edge_scores,
                      node_uncertainty, overlap_fraction, select_skeleton)

__version__ = "0.1.0"
