"""Compiled Gaussian elimination over GF(q) (numba)."""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def rref_prime(A, p):
    nr, nc = A.shape
    piv = np.empty(min(nr, nc), dtype=np.int64)
    r = 0
    for c in range(nc):
        if r == nr:
            break
        k = -1
        for i in range(r, nr):
            if A[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(nc):
                t = A[r, j]
                A[r, j] = A[k, j]
                A[k, j] = t
        # inverse by Fermat
        a = A[r, c]
        inv = 1
        e = p - 2
        b = a
        while e > 0:
            if e & 1:
                inv = (inv * b) % p
            b = (b * b) % p
            e >>= 1
        if inv != 1:
            for j in range(c, nc):
                A[r, j] = (A[r, j] * inv) % p
        for i in range(nr):
            if i != r:
                fct = A[i, c]
                if fct != 0:
                    m = p - fct
                    for j in range(c, nc):
                        if A[r, j] != 0:
                            A[i, j] = (A[i, j] + m * A[r, j]) % p
        piv[r] = c
        r += 1
    return r, piv[:r]


@njit(cache=True)
def rref_table(A, addt, mult, inv, neg):
    nr, nc = A.shape
    piv = np.empty(min(nr, nc), dtype=np.int64)
    r = 0
    for c in range(nc):
        if r == nr:
            break
        k = -1
        for i in range(r, nr):
            if A[i, c] != 0:
                k = i
                break
        if k < 0:
            continue
        if k != r:
            for j in range(nc):
                t = A[r, j]
                A[r, j] = A[k, j]
                A[k, j] = t
        s = inv[A[r, c]]
        if s != 1:
            for j in range(c, nc):
                A[r, j] = mult[s, A[r, j]]
        for i in range(nr):
            if i != r:
                fct = A[i, c]
                if fct != 0:
                    m = neg[fct]
                    for j in range(c, nc):
                        if A[r, j] != 0:
                            A[i, j] = addt[A[i, j], mult[m, A[r, j]]]
        piv[r] = c
        r += 1
    return r, piv[:r]


@njit(cache=True)
def matmul_table(A, B, addt, mult):
    n, m = A.shape
    k = B.shape[1]
    out = np.zeros((n, k), dtype=np.int64)
    for i in range(n):
        for t in range(m):
            a = A[i, t]
            if a != 0:
                for j in range(k):
                    b = B[t, j]
                    if b != 0:
                        out[i, j] = addt[out[i, j], mult[a, b]]
    return out
