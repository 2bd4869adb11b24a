import numpy as np
import pytest
from hypothesis import given, strategies as st

from lore import (DynamicsConfig, Graph, SolverState, UsageError, apply_recall,
                  budgeted_step, full_step, gen_er, init_state,
                  refresh_bath_cache)
from lore.recall import BathCache
from lore.routing import ActiveSet


def star3():
    return Graph(4, [(0, 1), (0, 2), (0, 3)])


def state_of(x):
    x = np.asarray(x, dtype=np.float64)
    return SolverState(x=x, x_prev=x.copy(), t=0)


def test_full_support_cache_is_trivial():
    g = gen_er(30, 0.2, seed=1)
    st = init_state(30, 2)
    aset = ActiveSet.build(g, np.arange(g.num_edges), [], 0)
    cache = refresh_bath_cache(st, g, aset)
    assert np.all(cache.s_hat == 0.0)
    assert np.all(cache.alpha == 1.0)


def test_empty_support_cache_holds_full_pressure():
    g = gen_er(30, 0.2, seed=1)
    st = init_state(30, 2)
    cache = refresh_bath_cache(st, g, ActiveSet.build(g, [], [], 0))
    expected = g.adjacency_matvec(st.x)
    assert np.allclose(cache.s_hat, expected)
    assert np.all(cache.alpha[g.degrees > 0] == 0.0)
    assert np.all(cache.alpha[g.degrees == 0] == 1.0)


def test_star_hand_case():
    g = star3()
    st = state_of([0.5, 0.4, 0.6, 0.8])
    aset = ActiveSet.build(g, [0], [], 0)  # center-leaf1 only
    cache = refresh_bath_cache(st, g, aset)
    assert cache.s_hat[0] == pytest.approx(1.4)
    assert cache.alpha[0] == pytest.approx(1 / 3)


def test_full_coverage_passes_cluster_update_through():
    n = 16
    g = gen_er(n, 0.3, seed=4)
    st = init_state(n, 5)
    aset = ActiveSet.build(g, np.arange(g.num_edges), [], 0)
    cache = refresh_bath_cache(st, g, aset)
    cluster = np.linspace(0.0, 1.0, n)
    out = apply_recall(cluster, st, cache, DynamicsConfig(recall_enabled=True))
    assert np.array_equal(out, cluster)


def test_zero_coverage_returns_bath_signal():
    g = star3()
    st = state_of([0.5, 0.4, 0.6, 0.8])
    cfg = DynamicsConfig(eta=0.1, beta=2.0, recall_enabled=True)
    cache = refresh_bath_cache(st, g, ActiveSet.build(g, [], [], 0))
    cluster = np.full(4, 0.123)
    out = apply_recall(cluster, st, cache, cfg)
    g_sig = np.clip(st.x + cfg.eta * (1 - cfg.beta * cache.s_hat * cache.scale),
                    0, 1)
    assert np.array_equal(out, g_sig)


def test_blend_midpoint():
    st = state_of([0.4])
    cache = BathCache(s_hat=np.array([3.0]), alpha=np.array([0.5]),
                      scale=np.array([1.0]), refreshed_at=0)
    cfg = DynamicsConfig(eta=0.1, beta=2.0, recall_enabled=True)
    # g = clip(0.4 + 0.1(1 - 6)) = 0.0 -> replace cache so g = 0.4 exactly:
    cache = BathCache(s_hat=np.array([0.5]), alpha=np.array([0.5]),
                      scale=np.array([1.0]), refreshed_at=0)
    g_val = np.clip(0.4 + 0.1 * (1 - 2.0 * 0.5), 0, 1)[()]
    out = apply_recall(np.array([0.6]), st, cache, cfg)
    assert out[0] == pytest.approx(0.5 * 0.6 + 0.5 * g_val)


def test_shape_mismatch_rejected():
    st = state_of([0.5, 0.5])
    cache = BathCache(s_hat=np.zeros(2), alpha=np.ones(2), scale=np.ones(2),
                      refreshed_at=0)
    with pytest.raises(UsageError):
        apply_recall(np.zeros(3), st, cache, DynamicsConfig())


@given(st.integers(0, 2**31 - 1))
def test_blend_interpolates(seed):
    rng = np.random.default_rng(seed)
    n = 12
    x = rng.uniform(0, 1, n)
    st = state_of(x)
    cache = BathCache(s_hat=rng.uniform(0, 3, n), alpha=rng.uniform(0, 1, n),
                      scale=rng.uniform(1, 2, n), refreshed_at=0)
    cfg = DynamicsConfig(eta=0.1, beta=2.0, recall_enabled=True)
    cluster = rng.uniform(0, 1, n)
    g_sig = np.clip(x + cfg.eta * (1 - cfg.beta * cache.s_hat * cache.scale), 0, 1)
    out = apply_recall(cluster, st, cache, cfg)
    assert np.all(out >= np.minimum(cluster, g_sig) - 1e-12)
    assert np.all(out <= np.maximum(cluster, g_sig) + 1e-12)


def test_degenerate_equivalence_full_support_with_recall():
    g = gen_er(40, 0.15, seed=7)
    cfg_on = DynamicsConfig(eta=0.05, beta=2.0, recall_enabled=True)
    cfg_off = DynamicsConfig(eta=0.05, beta=2.0)
    st = init_state(40, 9)
    aset = ActiveSet.build(g, np.arange(g.num_edges), [], 0)
    cache = refresh_bath_cache(st, g, aset)
    with_recall = budgeted_step(st, g, aset, cfg_on, bath_cache=cache)
    without = budgeted_step(st, g, aset, cfg_off)
    full = full_step(st, g, cfg_off)
    assert np.array_equal(with_recall.x, without.x)
    assert np.array_equal(with_recall.x, full.x)
