"""Hot numeric kernels: numba-compiled with a pure-numpy fallback.

Set ``STREAMCSP_NO_NUMBA=1`` to force the numpy path.  Both paths share the
same counter-based hash, so sketch accumulators agree across backends.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("STREAMCSP_NO_NUMBA", "").lower() not in (
    "1", "true", "yes")

# fixed-point scale for Cauchy variates, and the clamp applied before scaling
FIXED_SHIFT = 16
FIXED_SCALE = float(1 << FIXED_SHIFT)
CAUCHY_CLAMP = float(1 << 30)

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_ROWMUL = np.uint64(0xD1B54A32D192ED03)

# Taylor coefficients of sin(t)/t and cos(t) in z = t^2, highest degree first.
# libm tan differs between numpy and numba in the last ulp, so both backends
# evaluate tan(pi*x) through these with the same operation order instead.
_SIN_C = tuple((-1.0) ** n / float(np.prod(np.arange(1, 2 * n + 2, dtype=np.float64)))
               for n in range(10, -1, -1))
_COS_C = tuple((-1.0) ** n / float(np.prod(np.arange(1, 2 * n + 1, dtype=np.float64)))
               for n in range(10, -1, -1))
_SIN_A = np.array(_SIN_C)
_COS_A = np.array(_COS_C)


def _mix_np(z):
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def column_key_np(seed: int, index: int) -> np.uint64:
    with np.errstate(over="ignore"):
        s = _mix_np(np.array([seed], dtype=np.uint64) + _GOLDEN)
        return _mix_np(s ^ np.uint64(index))[0]


def tan_pi_np(x):
    """tan(pi * x) for |x| < 1/2, folded so the series argument is at most pi/4."""
    a = np.abs(x)
    outer = a > 0.25
    y = np.where(outer, 0.5 - a, a)
    t = np.pi * y
    z = t * t
    s = np.zeros_like(z)
    c = np.zeros_like(z)
    for j in range(_SIN_A.shape[0]):
        s = s * z + _SIN_A[j]
        c = c * z + _COS_A[j]
    s = s * t
    with np.errstate(divide="ignore"):
        r = np.where(outer, c / s, s / c)
    return np.where(x < 0, -r, r)


def cauchy_fixed_np(key, rows: int) -> np.ndarray:
    """Fixed-point standard Cauchy variates for rows ``0..rows-1`` of one column."""
    r = np.arange(rows, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _mix_np(np.uint64(key) ^ (r * _ROWMUL))
    u = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
    c = tan_pi_np(u - 0.5)
    c = np.clip(c, -CAUCHY_CLAMP, CAUCHY_CLAMP)
    return np.rint(c * FIXED_SCALE).astype(np.int64)


def accumulate_np(acc, seed, indices, values):
    rows = acc.shape[0]
    with np.errstate(over="ignore"):
        for i, v in zip(indices.tolist(), values.tolist()):
            if v:
                col = cauchy_fixed_np(column_key_np(seed, i), rows)
                acc += col * np.int64(v)


def brute_force_np(n, idx, sgn, w, table):
    m, k = idx.shape
    total = 1 << n
    chunk = 1 << min(n, 16)
    shifts = np.arange(n, dtype=np.int64)
    weights = (1 << np.arange(k - 1, -1, -1)).astype(np.int64)
    best, best_code = -1, 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (codes[:, None] >> shifts) & 1
        score = np.zeros(codes.shape[0], dtype=np.int64)
        for c in range(m):
            lit = (2 * bits[:, idx[c]] - 1) * sgn[c]
            t = ((lit > 0).astype(np.int64) * weights).sum(axis=1)
            score += table[t] * w[c]
        j = int(np.argmax(score))
        if score[j] > best:
            best, best_code = int(score[j]), int(codes[j])
    return best, best_code


if HAVE_NUMBA:

    @njit(cache=True)
    def _mix_nb(z):
        z = z ^ (z >> np.uint64(30))
        z = z * np.uint64(0xBF58476D1CE4E5B9)
        z = z ^ (z >> np.uint64(27))
        z = z * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @njit(cache=True)
    def _tan_pi_nb(x, sin_c, cos_c):
        a = abs(x)
        outer = a > 0.25
        y = 0.5 - a if outer else a
        t = np.pi * y
        z = t * t
        s = 0.0
        c = 0.0
        for j in range(sin_c.shape[0]):
            s = s * z + sin_c[j]
            c = c * z + cos_c[j]
        s = s * t
        r = c / s if outer else s / c
        return -r if x < 0 else r

    @njit(cache=True)
    def _accumulate_nb(acc, seed, indices, values, sin_c, cos_c):
        rows = acc.shape[0]
        s = _mix_nb(np.uint64(seed) + np.uint64(0x9E3779B97F4A7C15))
        scale = 1.0 / 9007199254740992.0
        for t in range(indices.shape[0]):
            v = values[t]
            if v == 0:
                continue
            key = _mix_nb(s ^ np.uint64(indices[t]))
            for r in range(rows):
                h = _mix_nb(key ^ (np.uint64(r) * np.uint64(0xD1B54A32D192ED03)))
                u = (np.float64(h >> np.uint64(11)) + 0.5) * scale
                c = _tan_pi_nb(u - 0.5, sin_c, cos_c)
                if c > 1073741824.0:
                    c = 1073741824.0
                elif c < -1073741824.0:
                    c = -1073741824.0
                acc[r] += np.int64(np.rint(c * 65536.0)) * v

    @njit(cache=True)
    def _brute_force_nb(n, idx, sgn, w, table, adj_ptr, adj):
        m, k = idx.shape
        sigma = -np.ones(n, dtype=np.int64)
        sat = np.zeros(m, dtype=np.int64)
        total = 0
        for c in range(m):
            t = 0
            for p in range(k):
                t = 2 * t + (1 if sgn[c, p] * sigma[idx[c, p]] > 0 else 0)
            sat[c] = table[t]
            total += w[c] * sat[c]
        best = total
        best_code = 0
        code = 0
        for g in range(1, 1 << n):
            bit = 0
            while ((g >> bit) & 1) == 0:
                bit += 1
            sigma[bit] = -sigma[bit]
            code ^= 1 << bit
            for q in range(adj_ptr[bit], adj_ptr[bit + 1]):
                c = adj[q]
                t = 0
                for p in range(k):
                    t = 2 * t + (1 if sgn[c, p] * sigma[idx[c, p]] > 0 else 0)
                new = table[t]
                if new != sat[c]:
                    total += w[c] * (new - sat[c])
                    sat[c] = new
            if total > best:
                best = total
                best_code = code
        return best, best_code


def accumulate(acc: np.ndarray, seed: int, indices: np.ndarray, values: np.ndarray,
               backend: str | None = None) -> None:
    """``acc[r] += C(seed, i, r) * v`` for every update ``(i, v)``, in place.

    ``acc`` is int64; arithmetic wraps modulo 2^64, which keeps the
    accumulator exactly linear in the updates.
    """
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    values = np.ascontiguousarray(values, dtype=np.int64)
    if _pick(backend) == "numba":
        _accumulate_nb(acc, np.uint64(seed & 0xFFFFFFFFFFFFFFFF), indices, values,
                       _SIN_A, _COS_A)
    else:
        accumulate_np(acc, seed & 0xFFFFFFFFFFFFFFFF, indices, values)


def brute_force(n, idx, sgn, w, table, backend: str | None = None):
    """Maximum of ``sum_c w_c * table[pattern_c(sigma)]`` over all 2^n sign vectors.

    Returns ``(best, code)`` where bit ``v`` of ``code`` set means ``sigma_v = +1``.
    """
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    sgn = np.ascontiguousarray(sgn, dtype=np.int64)
    w = np.ascontiguousarray(w, dtype=np.int64)
    table = np.ascontiguousarray(table, dtype=np.int64)
    if _pick(backend) == "numba":
        m = idx.shape[0]
        counts = np.zeros(n + 1, dtype=np.int64)
        for c in range(m):
            for v in set(idx[c].tolist()):
                counts[v + 1] += 1
        adj_ptr = np.cumsum(counts)
        adj = np.zeros(adj_ptr[-1], dtype=np.int64)
        fill = adj_ptr[:-1].copy()
        for c in range(m):
            for v in set(idx[c].tolist()):
                adj[fill[v]] = c
                fill[v] += 1
        best, code = _brute_force_nb(n, idx, sgn, w, table, adj_ptr, adj)
        return int(best), int(code)
    return brute_force_np(n, idx, sgn, w, table)


def _pick(backend):
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend
