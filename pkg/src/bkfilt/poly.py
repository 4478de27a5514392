"""Truncated polynomial and matrix arithmetic over GF(q)[[u]] on numpy arrays.

A series is a 1-D int array (index = u-degree); a matrix of series has shape (r, c, K).
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .coeffs import GF


def trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    return a[: nz[-1] + 1] if nz.size else a[:0]


def trim_all(a: np.ndarray) -> np.ndarray:
    """Drop trailing u-degrees that vanish in every entry (keeps at least one)."""
    nz = np.flatnonzero(a.reshape(-1, a.shape[-1]).any(axis=0))
    n = nz[-1] + 1 if nz.size else 1
    return a[..., :n]


def val(a: np.ndarray) -> int | None:
    nz = np.flatnonzero(a)
    return int(nz[0]) if nz.size else None


def pad(a: np.ndarray, K: int) -> np.ndarray:
    out = np.zeros(a.shape[:-1] + (K,), dtype=np.int64)
    n = min(K, a.shape[-1])
    out[..., :n] = a[..., :n]
    return out


def padd(F: GF, a, b) -> np.ndarray:
    n = max(a.shape[-1], b.shape[-1])
    return F.vadd(pad(a, n), pad(b, n)) if F.m > 1 else (pad(a, n) + pad(b, n)) % F.p


def psub(F: GF, a, b) -> np.ndarray:
    n = max(a.shape[-1], b.shape[-1])
    return F.vsub(pad(a, n), pad(b, n)) if F.m > 1 else (pad(a, n) - pad(b, n)) % F.p


def pscale(F: GF, c: int, a) -> np.ndarray:
    return F.vmul(np.int64(c), a) if F.m > 1 else (c * a) % F.p


def pmul(F: GF, a, b, K: int | None = None) -> np.ndarray:
    la, lb = a.shape[-1], b.shape[-1]
    n = la + lb - 1 if la and lb else 0
    if K is None:
        K = n
    if la == 0 or lb == 0:
        return np.zeros(K, dtype=np.int64)
    if F.m == 1:
        return pad(np.convolve(a, b) % F.p, K)
    out = np.zeros(max(K, 0), dtype=np.int64)
    for i in np.flatnonzero(a):
        if i >= K:
            break
        seg = F.vmul(np.int64(a[i]), b[: K - i])
        out[i: i + seg.size] = F.vadd(out[i: i + seg.size], seg)
    return out


def pinv(F: GF, a, K: int) -> np.ndarray:
    """Inverse of a unit series modulo u^K."""
    if a.shape[-1] == 0 or a[0] == 0:
        raise ZeroDivisionError("series is not a unit")
    c0 = F.inv(int(a[0]))
    out = np.zeros(K, dtype=np.int64)
    out[0] = c0
    a = pad(a, K)
    for n in range(1, K):
        acc = 0
        for i in range(1, n + 1):
            if a[i] and out[n - i]:
                acc = F.add(acc, F.mul(int(a[i]), int(out[n - i])))
        out[n] = F.neg(F.mul(acc, c0))
    return out


def shift(a: np.ndarray, k: int, K: int) -> np.ndarray:
    """u^k * a restricted to degrees [0, K); k may be negative (dropping low terms is an error)."""
    out = np.zeros(a.shape[:-1] + (K,), dtype=np.int64)
    if k >= 0:
        n = min(a.shape[-1], max(K - k, 0))
        out[..., k: k + n] = a[..., :n]
    else:
        if a[..., : -k].any():
            raise ValueError("negative shift drops nonzero terms")
        src = a[..., -k:]
        n = min(src.shape[-1], K)
        out[..., :n] = src[..., :n]
    return out


def subst_p(a: np.ndarray, p: int, K: int) -> np.ndarray:
    """a(u^p) truncated to degree < K."""
    out = np.zeros(a.shape[:-1] + (K,), dtype=np.int64)
    n = min(a.shape[-1], (K + p - 1) // p)
    out[..., 0: p * n: p] = a[..., :n]
    return out


def mmul(F: GF, A, B, K: int) -> np.ndarray:
    r, k1 = A.shape[:2]
    k2, c = B.shape[:2]
    assert k1 == k2
    out = np.zeros((r, c, K), dtype=np.int64)
    for i in range(r):
        for j in range(c):
            acc = np.zeros(K, dtype=np.int64)
            for t in range(k1):
                if A[i, t].any() and B[t, j].any():
                    acc = padd(F, acc, pmul(F, A[i, t], B[t, j], K))
            out[i, j] = acc
    return out


def mdet_adj(F: GF, A) -> tuple[np.ndarray, np.ndarray]:
    """Exact determinant and adjugate of a square matrix of polynomials."""
    d = A.shape[0]
    D = A.shape[2] if A.ndim == 3 else 1
    deg = max(d * D, 1)
    if d == 0:
        return np.ones(1, dtype=np.int64), np.zeros((0, 0, 1), dtype=np.int64)
    memo: dict = {}

    def minor(rows: tuple, cols: tuple) -> np.ndarray:
        key = (rows, cols)
        if key in memo:
            return memo[key]
        if not rows:
            res = np.zeros(deg, dtype=np.int64)
            res[0] = 1
        else:
            r0 = rows[0]
            res = np.zeros(deg, dtype=np.int64)
            for idx, c in enumerate(cols):
                if not A[r0, c].any():
                    continue
                sub = minor(rows[1:], cols[:idx] + cols[idx + 1:])
                term = pmul(F, A[r0, c], sub, deg)
                res = padd(F, res, term) if idx % 2 == 0 else psub(F, res, term)
        memo[key] = res
        return res

    allr = tuple(range(d))
    det = minor(allr, allr)
    adj = np.zeros((d, d, deg), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            m = minor(tuple(r for r in allr if r != j), tuple(c for c in allr if c != i))
            adj[i, j] = m if (i + j) % 2 == 0 else psub(F, np.zeros(1, dtype=np.int64), m)[:deg]
    return det, adj


def scaled_inverse(F: GF, A, N: int, K: int) -> np.ndarray:
    """B with A B = u^N I modulo u^K; raises if u^N A^{-1} is not integral."""
    d = A.shape[0]
    det, adj = mdet_adj(F, A)
    v = val(det)
    if v is None:
        raise ZeroDivisionError("singular Frobenius matrix")
    wden = det[v:]
    extra = max(v - N, 0)
    Kw = K + extra
    winv = pinv(F, wden, Kw)
    out = np.zeros((d, d, K), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            t = pmul(F, adj[i, j], winv, Kw)
            out[i, j] = shift(t, N - v, K)
    return out


def random_unit_matrix(F: GF, d: int, deg: int, rng) -> np.ndarray:
    """A random element of GL_d(F[u]) of degree < deg (invertible constant term)."""
    while True:
        A = rng.integers(0, F.q, size=(d, d, max(deg, 1)), dtype=np.int64)
        from .linalg import rank
        if rank(F, A[:, :, 0]) == d:
            return A


def col_valuation(a: np.ndarray) -> int | None:
    nz = np.flatnonzero(a.reshape(-1, a.shape[-1]).any(axis=0))
    return int(nz[0]) if nz.size else None


def subsets(n: int, k: int):
    return combinations(range(n), k)
