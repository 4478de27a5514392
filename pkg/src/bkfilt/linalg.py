"""Row-convention linear algebra over GF(q) on integer numpy arrays.

A linear map is a matrix whose rows are the images of basis vectors, so images are
row spaces and kernels are left kernels.
"""
from __future__ import annotations

import numpy as np

from . import _kernels
from .coeffs import GF

_INV: dict = {}


def _inv_table(F: GF) -> np.ndarray:
    if F not in _INV:
        t = np.zeros(F.q, dtype=np.int64)
        for a in range(1, F.q):
            t[a] = F.inv(a)
        _INV[F] = t
    return _INV[F]


def _axpy(F: GF, rows: np.ndarray, factors: np.ndarray, piv: np.ndarray) -> np.ndarray:
    # rows - factors[:, None] * piv[None, :]
    if F.m == 1:
        return (rows - factors[:, None] * piv[None, :]) % F.p
    return F.vsub(rows, F.vmul(factors[:, None], piv[None, :]))


def _scale(F: GF, row: np.ndarray, c: int) -> np.ndarray:
    if F.m == 1:
        return (row * c) % F.p
    return F.vmul(np.int64(c), row)


def rref(F: GF, A, ncols: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    A = np.array(A, dtype=np.int64)
    if A.ndim == 1:
        A = A.reshape(1, -1) if A.size else np.zeros((0, ncols or 0), dtype=np.int64)
    A = np.ascontiguousarray(A)
    nr, nc = A.shape
    if nr and nc and (F.m == 1 or F.tables):
        if F.m == 1:
            r, piv = _kernels.rref_prime(A, F.p)
        else:
            r, piv = _kernels.rref_table(A, F.addt, F.mult, _inv_table(F), F.negt)
        return A[:r], [int(c) for c in piv]
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        col = A[r:, c]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            A[[r, k]] = A[[k, r]]
        A[r] = _scale(F, A[r], F.inv(int(A[r, c])))
        others = np.flatnonzero(A[:, c])
        others = others[others != r]
        if others.size:
            A[others] = _axpy(F, A[others], A[others, c].copy(), A[r])
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(F: GF, A) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(rref(F, A)[1])


def row_basis(F: GF, A, ncols: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64).reshape(-1, ncols)
    if A.shape[0] == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    return rref(F, A)[0]


def left_kernel(F: GF, A, nrows: int | None = None) -> np.ndarray:
    """Basis (as rows) of {x : x A = 0}."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0] if nrows is None else nrows
    A = A.reshape(n, -1)
    m = A.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=np.int64)
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(F, aug)
    keep = [i for i, c in enumerate(piv) if c >= m]
    out = R[keep, m:]
    return out


def solve_left(F: GF, A, b) -> np.ndarray | None:
    """Some x with x A = b, or None."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    n, m = A.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    aug = np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1)
    R, piv = rref(F, aug)
    x = np.zeros(n, dtype=np.int64)
    resid = b.copy()
    for row, c in zip(R, piv):
        if c >= m:
            break
        coef = int(resid[c])
        if coef:
            resid = _axpy(F, resid[None, :], np.array([coef]), row[:m])[0]
            x = F.vadd(x, _scale(F, row[m:], coef)) if F.m > 1 else (x + coef * row[m:]) % F.p
    if resid.any():
        return None
    return x


def in_span(F: GF, U, v) -> bool:
    U = np.asarray(U, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64).reshape(1, -1)
    if U.size == 0:
        return not v.any()
    return rank(F, np.vstack([U, v])) == rank(F, U)


def span_contains(F: GF, U, V) -> bool:
    """Row space of U contains row space of V."""
    U = np.asarray(U, dtype=np.int64)
    V = np.asarray(V, dtype=np.int64)
    if V.size == 0 or not V.any():
        return True
    if U.size == 0:
        return False
    return rank(F, np.vstack([U, V])) == rank(F, U)


def span_equal(F: GF, U, V) -> bool:
    return span_contains(F, U, V) and span_contains(F, V, U)


def span_sum(F: GF, U, V, ncols: int) -> np.ndarray:
    U = np.asarray(U, dtype=np.int64).reshape(-1, ncols)
    V = np.asarray(V, dtype=np.int64).reshape(-1, ncols)
    return row_basis(F, np.vstack([U, V]), ncols)


def intersect(F: GF, U, V, ncols: int) -> np.ndarray:
    U = row_basis(F, U, ncols)
    V = row_basis(F, V, ncols)
    if U.shape[0] == 0 or V.shape[0] == 0:
        return np.zeros((0, ncols), dtype=np.int64)
    K = left_kernel(F, np.vstack([U, V]))
    a = K[:, : U.shape[0]]
    return row_basis(F, matmul(F, a, U), ncols)


def matmul(F: GF, A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.shape[0] == 0 or B.shape[1] == 0 or A.shape[1] == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    if F.m == 1:
        return (A @ B) % F.p
    if F.tables:
        return _kernels.matmul_table(np.ascontiguousarray(A), np.ascontiguousarray(B), F.addt, F.mult)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        col = A[:, k]
        if col.any():
            out = F.vadd(out, F.vmul(col[:, None], B[k][None, :]))
    return out


def quotient_dim(F: GF, big, small) -> int:
    big = np.asarray(big)
    small = np.asarray(small)
    if small.size == 0:
        return rank(F, big)
    return rank(F, np.vstack([big, small])) - rank(F, small)


def random_vector(F: GF, n: int, rng) -> np.ndarray:
    return rng.integers(0, F.q, size=n, dtype=np.int64)
