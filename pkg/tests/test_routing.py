import numpy as np
import pytest
from hypothesis import given, strategies as st

from lore import (BudgetConfig, Graph, ParameterError, SolverState, Strategy,
                  UndefinedValueError, UsageError, budget_size,
                  build_active_set, edge_score, gen_er, init_state, make_rng,
                  node_uncertainty, overlap_fraction, select_skeleton)


def p4():
    # path 0-1-2-3: edge ids 0:(0,1) 1:(1,2) 2:(2,3); degree sums 3, 4, 3
    return Graph(4, [(0, 1), (1, 2), (2, 3)])


def state_of(x, x_prev=None):
    x = np.asarray(x, dtype=np.float64)
    prev = x.copy() if x_prev is None else np.asarray(x_prev, dtype=np.float64)
    return SolverState(x=x, x_prev=prev, t=0)


# ----------------------------------------------------------------- scores

def test_score_maximal_at_half():
    g = Graph(2, [(0, 1)])
    assert edge_score(state_of([0.5, 0.5]), g, 0, 0.5) == pytest.approx(1.0)


def test_score_vanishes_at_endpoints():
    g = Graph(2, [(0, 1)])
    for x in ([0.0, 1.0], [1.0, 1.0], [0.0, 0.0]):
        assert edge_score(state_of(x), g, 0, 0.5) == 0.0


def test_score_hand_case():
    g = Graph(2, [(0, 1)])
    st = state_of([0.8, 0.5], x_prev=[0.7, 0.6])
    # u = 0.4, 1.0; both moved 0.1; lambda = 0.5
    assert edge_score(st, g, 0, 0.5) == pytest.approx(0.4 * 1.0 + 0.5 * 0.2)


def test_uncertainty_shape():
    assert node_uncertainty(0.5) == 1.0
    assert node_uncertainty(0.0) == 0.0
    assert node_uncertainty(1.0) == 0.0


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 0.5))
def test_score_monotone_toward_half(xi, xj, shift):
    # with lambda = 0, moving an endpoint strictly closer to 1/2 cannot
    # decrease the score
    g = Graph(2, [(0, 1)])
    closer = xi + shift * (0.5 - xi) * 2.0
    base = edge_score(state_of([xi, xj]), g, 0, 0.0)
    moved = edge_score(state_of([closer, xj]), g, 0, 0.0)
    assert moved >= base - 1e-12


# --------------------------------------------------------------- skeleton

def test_skeleton_p4_top_one():
    assert list(select_skeleton(p4(), gamma=0.5, budget=3)) == [1]


def test_skeleton_p4_tie_breaks_to_lower_edge_id():
    assert list(select_skeleton(p4(), gamma=2 / 3, budget=3)) == [0, 1]


def test_skeleton_floor_zero_is_empty():
    assert select_skeleton(p4(), gamma=0.1, budget=3).size == 0


# ----------------------------------------------------------------- budget

def test_budget_floor_and_cap():
    g = p4()
    assert budget_size(g, 0.01) == 1   # floor(0.03) = 0, floored at 1
    assert budget_size(g, 1.0) == 3
    assert budget_size(Graph(3, []), 0.5) == 0


@pytest.mark.parametrize("strategy", list(Strategy))
def test_budget_invariant_every_strategy(strategy):
    g = gen_er(60, 0.1, seed=3)
    cfg = BudgetConfig(rho=0.08, strategy=strategy)
    st = init_state(60, 1)
    rng = make_rng(0)
    B = budget_size(g, cfg.rho)
    aset = build_active_set(strategy, st, g, cfg, t=0, rng=rng)
    assert aset.size == min(max(int(0.08 * g.num_edges), 1), g.num_edges) == B
    assert np.all(np.diff(aset.edge_ids) > 0)  # sorted, unique
    assert set(aset.skeleton_ids) <= set(aset.edge_ids)


def test_lore_full_budget_takes_every_edge():
    g = gen_er(40, 0.2, seed=9)
    st = init_state(40, 2)
    aset = build_active_set(Strategy.LORE, st, g, BudgetConfig(rho=1.0), t=0)
    assert np.array_equal(aset.edge_ids, np.arange(g.num_edges))


# ---------------------------------------------------------------- refresh

def test_static_strategy_returns_previous_set():
    g = gen_er(50, 0.15, seed=4)
    cfg = BudgetConfig(strategy=Strategy.LORE_STATIC)
    st = init_state(50, 3)
    s0 = build_active_set(Strategy.LORE_STATIC, st, g, cfg, t=0)
    s37 = build_active_set(Strategy.LORE_STATIC, st, g, cfg, prev_set=s0, t=37)
    assert s37 is s0


def test_between_refreshes_set_identical():
    g = gen_er(50, 0.15, seed=4)
    cfg = BudgetConfig(refresh=10)
    st = init_state(50, 3)
    s0 = build_active_set(Strategy.LORE, st, g, cfg, t=0)
    for t in range(1, 10):
        assert build_active_set(Strategy.LORE, st, g, cfg, prev_set=s0, t=t) is s0
    s10 = build_active_set(Strategy.LORE, st, g, cfg, prev_set=s0, t=10)
    assert s10.created_at == 10


def test_skeleton_persists_across_refreshes():
    g = gen_er(80, 0.1, seed=5)
    cfg = BudgetConfig(rho=0.3, gamma=0.2)
    st = init_state(80, 1)
    s0 = build_active_set(Strategy.LORE, st, g, cfg, t=0)
    st2 = SolverState(x=np.clip(st.x + 0.1, 0, 1), x_prev=st.x, t=10)
    s10 = build_active_set(Strategy.LORE, st2, g, cfg, prev_set=s0, t=10)
    assert np.array_equal(s0.skeleton_ids, s10.skeleton_ids)


def test_missing_prev_set_raises():
    g = p4()
    with pytest.raises(UsageError):
        build_active_set(Strategy.LORE, state_of([0.5] * 4), g,
                         BudgetConfig(), t=3)


def test_random_deterministic_per_seed():
    g = gen_er(60, 0.1, seed=3)
    st = init_state(60, 1)
    cfg = BudgetConfig(strategy=Strategy.RANDOM)
    a = build_active_set(Strategy.RANDOM, st, g, cfg, t=0, rng=make_rng(42))
    b = build_active_set(Strategy.RANDOM, st, g, cfg, t=0, rng=make_rng(42))
    assert np.array_equal(a.edge_ids, b.edge_ids)


def test_unknown_strategy_rejected():
    g = p4()
    with pytest.raises(ParameterError):
        build_active_set("nonsense", state_of([0.5] * 4), g, BudgetConfig(), t=0)


def test_config_validation():
    with pytest.raises(ParameterError):
        BudgetConfig(rho=0.0)
    with pytest.raises(ParameterError):
        BudgetConfig(gamma=1.5)
    with pytest.raises(ParameterError):
        BudgetConfig(refresh=0)
    with pytest.raises(ParameterError):
        BudgetConfig(lambda_stab=-1.0)


# ---------------------------------------------------------------- overlap

def test_overlap_identical_sets():
    assert overlap_fraction([1, 2, 3], [1, 2, 3]) == 1.0


def test_overlap_disjoint():
    assert overlap_fraction([1, 2], [3, 4]) == 0.0


def test_overlap_fraction_value():
    a = list(range(8))
    b = [0, 1, 2, 100, 101, 102, 103, 104]
    assert overlap_fraction(a, b) == pytest.approx(0.375)


def test_overlap_empty_first_set():
    with pytest.raises(UndefinedValueError):
        overlap_fraction([], [1])


def test_overlap_accepts_active_sets():
    g = gen_er(30, 0.2, seed=1)
    st = init_state(30, 1)
    a = build_active_set(Strategy.LORE, st, g, BudgetConfig(rho=0.3), t=0)
    assert overlap_fraction(a, a) == 1.0


def test_vectorized_scores_match_scalar():
    from lore import edge_scores
    g = gen_er(25, 0.3, seed=2)
    st = init_state(25, 3)
    st = SolverState(x=st.x, x_prev=np.clip(st.x - 0.05, 0, 1), t=1)
    vec = edge_scores(st, g, 0.5)
    for eid in range(g.num_edges):
        assert vec[eid] == pytest.approx(edge_score(st, g, eid, 0.5))
