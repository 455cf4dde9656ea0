"""Numba vs numpy timings for the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends must produce identical results; the script checks that before
printing times.
"""
import argparse
import time

import numpy as np

from streamcsp import _accel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_accumulate(rows, updates, repeat):
    rng = np.random.default_rng(0)
    idx = rng.integers(0, 10**6, updates)
    val = rng.integers(-5, 6, updates)

    def run(backend):
        acc = np.zeros(rows, dtype=np.int64)
        _accel.accumulate(acc, 1234, idx, val, backend=backend)
        return acc

    run("numba")  # compile outside the timed region
    t_nb, a = best_of(lambda: run("numba"), repeat)
    t_np, b = best_of(lambda: run("numpy"), repeat)
    assert np.array_equal(a, b), "accumulate backends disagree"
    return t_nb, t_np


def bench_brute(n, m, repeat):
    rng = np.random.default_rng(1)
    idx = np.array([rng.choice(n, 3, replace=False) for _ in range(m)], dtype=np.int64)
    sgn = rng.choice(np.array([-1, 1]), size=(m, 3)).astype(np.int64)
    w = rng.integers(1, 4, m).astype(np.int64)
    table = np.array([0, 0, 0, 1, 0, 1, 1, 1], dtype=np.int64)

    _accel.brute_force(4, idx[:1] % 4, sgn[:1], w[:1], table, backend="numba")
    t_nb, a = best_of(lambda: _accel.brute_force(n, idx, sgn, w, table, backend="numba"), repeat)
    t_np, b = best_of(lambda: _accel.brute_force(n, idx, sgn, w, table, backend="numpy"), repeat)
    assert a[0] == b[0], "brute-force backends disagree"
    return t_nb, t_np


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'kernel':<34}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for rows, updates in [(192, 2000), (1200, 2000), (4800, 500)]:
        t_nb, t_np = bench_accumulate(rows, updates, args.repeat)
        label = f"accumulate r={rows} updates={updates}"
        print(f"{label:<34}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}")
    for n, m in [(14, 60), (18, 80), (20, 100)]:
        t_nb, t_np = bench_brute(n, m, args.repeat)
        label = f"brute force n={n} m={m}"
        print(f"{label:<34}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
