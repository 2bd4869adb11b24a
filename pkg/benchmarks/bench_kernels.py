#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the pure-numpy fallback.

Times the three hot kernels (message accumulation, greedy decode, repair)
and one end-to-end budgeted solve, verifying on the way that both backends
produce bit-identical results.

Usage: python benchmarks/bench_kernels.py [--n 2000] [--p 0.02] [--steps 100]
"""

import argparse
import time

import numpy as np

from lore import BudgetConfig, DynamicsConfig, gen_er, init_state
from lore._kernels import pykernels

try:
    from lore._kernels import ckernels
except ImportError:
    ckernels = None


def timeit(fn, repeats=5):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench_kernels(n, p, steps):
    g = gen_er(n, p, seed=1)
    x = init_state(n, 2).x
    order = np.argsort(-x, kind="stable").astype(np.int64)
    rng = np.random.default_rng(3)
    mask0 = (rng.random(n) < 0.5).astype(np.uint8)

    rows = []

    def add(name, c_fn, p_fn, check=np.array_equal):
        t_py, r_py = timeit(p_fn)
        if ckernels is None:
            rows.append((name, None, t_py, None))
            return
        t_cy, r_cy = timeit(c_fn)
        assert check(r_cy, r_py), f"backend mismatch in {name}"
        rows.append((name, t_cy, t_py, t_py / t_cy))

    add("accumulate (2|E| msgs)",
        lambda: ckernels.accumulate(x, g.adj_tgt, g.nbrs, g.n),
        lambda: pykernels.accumulate(x, g.adj_tgt, g.nbrs, g.n))

    add("greedy_decode",
        lambda: ckernels.greedy_decode(order, g.indptr, g.nbrs),
        lambda: pykernels.greedy_decode(order, g.indptr, g.nbrs))

    def run_repair(impl):
        m = mask0.copy()
        impl.repair(m, g.eu, g.ev, g.degrees)
        return m

    add("repair", lambda: run_repair(ckernels), lambda: run_repair(pykernels))

    def solve(backend):
        impl = ckernels if backend == "cython" else pykernels
        from lore.routing import Strategy, build_active_set
        dyn = DynamicsConfig(steps=steps)
        bud = BudgetConfig(rho=0.08)
        st = init_state(n, 4)
        active = None
        for t in range(steps):
            active = build_active_set(Strategy.LORE, st, g, bud,
                                      prev_set=active, t=t)
            s = impl.accumulate(st.x, active.tgt, active.src, g.n)
            x_new = np.clip(st.x + dyn.eta * (1.0 - dyn.beta * s), 0.0, 1.0)
            o = np.argsort(-x_new, kind="stable").astype(np.int64)
            chosen = impl.greedy_decode(o, g.indptr, g.nbrs)
            impl.repair(chosen, g.eu, g.ev, g.degrees)
            st = type(st)(x=x_new, x_prev=st.x, t=st.t + 1)
        return st.x

    add(f"solve loop ({steps} steps, decode each)",
        lambda: solve("cython"), lambda: solve("python"))

    print(f"\ngraph: ER n={n} p={p} |E|={g.num_edges}; repeats: best of 5")
    print(f"{'kernel':<38}{'cython':>12}{'python':>12}{'speedup':>10}")
    for name, t_cy, t_py, speedup in rows:
        cy = f"{t_cy*1e3:9.2f}ms" if t_cy is not None else "   (n/a)"
        sp = f"{speedup:9.1f}x" if speedup is not None else "       -"
        print(f"{name:<38}{cy:>12}{t_py*1e3:>10.2f}ms{sp:>10}")
    if ckernels is None:
        print("\ncompiled kernels unavailable; showing fallback timings only")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--p", type=float, default=0.02)
    ap.add_argument("--steps", type=int, default=100)
    args = ap.parse_args()
    bench_kernels(args.n, args.p, args.steps)
