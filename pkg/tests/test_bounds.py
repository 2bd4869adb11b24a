import math

import numpy as np
import pytest

from lore import (BudgetConfig, DynamicsConfig, Graph, Strategy,
                  activity_stats, gen_er, init_state, lipschitz_bound,
                  omitted_mass, paired_trajectory_report)
from lore.dynamics import SolverState
from lore.routing import ActiveSet, build_active_set


def test_lipschitz_empty_graph():
    assert lipschitz_bound(Graph(4, []), DynamicsConfig(eta=0.1, beta=2.0)) == 1.0


def test_lipschitz_star_uses_spectral_bound():
    g = Graph(4, [(0, 1), (0, 2), (0, 3)])
    cfg = DynamicsConfig(eta=0.1, beta=2.0)
    L = lipschitz_bound(g, cfg)
    spectral = 1 + 0.2 * math.sqrt(3)
    fallback = 1 + 0.2 * 3
    assert L == pytest.approx(spectral, abs=1e-5)
    assert L <= fallback
    assert fallback >= spectral  # the Delta_max fallback always dominates


def test_full_budget_report_is_all_zero():
    g = gen_er(60, 0.1, seed=2)
    cfg = DynamicsConfig(eta=0.05, steps=30)
    rep = paired_trajectory_report(g, cfg, BudgetConfig(rho=1.0), seed=3)
    assert rep.e.max() == 0.0
    assert rep.delta.max() == 0.0
    assert rep.eps_rho.max() == 0.0
    assert rep.r.max() == 0.0
    assert not rep.violated_steps
    assert rep.lipschitz > 1.0


def test_recursion_and_residual_split_hold():
    g = gen_er(100, 0.08, seed=4)
    cfg = DynamicsConfig(eta=0.05, steps=50)
    rep = paired_trajectory_report(g, cfg, BudgetConfig(rho=0.1), seed=7)
    assert not rep.violated_steps
    assert np.all(rep.delta <= rep.eps_rho + rep.r + 1e-9)
    # unrolled geometric-series bound on the final error
    assert rep.e[-1] <= rep.unrolled_bound() + 1e-9
    assert rep.e[0] == 0.0


def test_report_with_recall_enabled():
    g = gen_er(80, 0.1, seed=5)
    cfg = DynamicsConfig(eta=0.05, steps=40, recall_enabled=True)
    rep = paired_trajectory_report(g, cfg, BudgetConfig(rho=0.1), seed=1)
    assert not rep.violated_steps
    assert np.array_equal(rep.r, rep.delta)  # post-correction residual
    assert np.all(rep.delta <= rep.eps_rho + rep.r + 1e-9)


def test_omitted_mass_monotone_in_budget():
    g = gen_er(200, 0.05, seed=9)
    cfg = DynamicsConfig(eta=0.05)
    st = init_state(g.n, 11)
    masses = []
    for rho in (0.05, 0.2, 0.8):
        aset = build_active_set(Strategy.LORE, st, g, BudgetConfig(rho=rho), t=0)
        masses.append(omitted_mass(st, g, aset, cfg))
    assert masses[0] >= masses[1] >= masses[2]


def test_lore_sets_nested_across_budgets():
    g = gen_er(150, 0.06, seed=3)
    st = init_state(g.n, 5)
    prev = None
    for rho in (0.05, 0.2, 0.8, 1.0):
        ids = set(build_active_set(Strategy.LORE, st, g,
                                   BudgetConfig(rho=rho), t=0).edge_ids)
        if prev is not None:
            assert prev <= ids
        prev = ids


def test_activity_full_support_has_no_bath():
    g = gen_er(40, 0.2, seed=1)
    st = init_state(40, 2)
    aset = ActiveSet.build(g, np.arange(g.num_edges), [], 0)
    stats = activity_stats(st, aset, g)
    assert stats.bath_mean_u is None
    assert stats.cluster_mean_u is not None


def test_activity_uniform_half_state():
    g = gen_er(40, 0.2, seed=1)
    x = np.full(40, 0.5)
    st = SolverState(x=x, x_prev=x.copy(), t=0)
    aset = ActiveSet.build(g, np.arange(0, g.num_edges, 2), [], 0)
    stats = activity_stats(st, aset, g)
    assert stats.cluster_mean_u == pytest.approx(1.0)
    assert stats.bath_mean_u == pytest.approx(1.0)


def test_activity_empty_support_on_nonempty_graph():
    g = gen_er(20, 0.3, seed=3)
    st = init_state(20, 1)
    stats = activity_stats(st, ActiveSet.build(g, [], [], 0), g)
    assert stats.cluster_mean_u is None
    assert stats.bath_mean_u is not None


def test_paired_report_random_strategy():
    g = gen_er(80, 0.1, seed=6)
    rep = paired_trajectory_report(
        g, DynamicsConfig(eta=0.05, steps=30),
        BudgetConfig(rho=0.1, strategy=Strategy.RANDOM), seed=2)
    assert not rep.violated_steps
    assert np.all(rep.delta <= rep.eps_rho + rep.r + 1e-9)


def test_report_json_document_shape():
    g = gen_er(30, 0.15, seed=2)
    cfg = DynamicsConfig(eta=0.05, steps=10)
    rep = paired_trajectory_report(g, cfg, BudgetConfig(rho=0.3), seed=4)
    doc = rep.to_dict()
    assert len(doc["e"]) == 11
    assert len(doc["delta"]) == len(doc["eps_rho"]) == len(doc["r"]) == 10
    assert doc["violated_steps"] == []
    assert doc["final_error"] == rep.e[-1]
