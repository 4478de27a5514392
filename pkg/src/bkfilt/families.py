"""Explicit test objects: the rank-one family R(r; s_1..s_{e-1}) and unit objects."""
from __future__ import annotations

from itertools import product

import numpy as np

from .coeffs import CoefficientRing
from .modf import FilteredBKModule


def power_subspace(obj_Q, s: int) -> np.ndarray:
    """Q-image of u^s M."""
    a = np.zeros((obj_Q.f, obj_Q.d, obj_Q.N, obj_Q.f, obj_Q.d, obj_Q.N), dtype=np.int64)
    for c in range(obj_Q.f):
        for b in range(obj_Q.d):
            for k in range(s, obj_Q.N):
                a[c, b, k, c, b, k] = 1
    return obj_Q.basis(a.reshape(obj_Q.dim, obj_Q.dim))


def rank_one(ring: CoefficientRing, r, s=()) -> FilteredBKModule:
    """frob = (u^r) on every component (or u^(r_c) if r is a sequence), F^j = u^(s_j) M."""
    rs = [r] * ring.f if isinstance(r, int) else list(r)
    D = max(rs) + 1
    frob = np.zeros((ring.f, 1, 1, D), dtype=np.int64)
    for c, rc in enumerate(rs):
        frob[c, 0, 0, rc] = 1
    obj = FilteredBKModule(ring, 1, frob, ())
    middle = [power_subspace(obj.Q, sj) for sj in s]
    return FilteredBKModule.build(ring, frob, middle)


def rank_one_family(p: int, e: int):
    """All (r, s) with r <= s_1 <= r + p, s_(j-1) <= s_j <= s_(j-1) + 1, s_e = e + p - 1."""
    N = e + p - 1
    out = []
    for r in range(N + 1):
        for s in product(range(N + 1), repeat=e - 1):
            chain = (r,) + s + (N,)
            if chain[1] < r or chain[1] > r + p:
                continue
            if any(chain[j] < chain[j - 1] or chain[j] > chain[j - 1] + 1 for j in range(2, e + 1)):
                continue
            out.append((r, s))
    return out


def unit_object(ring: CoefficientRing, d: int = 1) -> FilteredBKModule:
    """Identity Frobenius with the minimal chain F^i = u^(p+i-1) M for i >= 1."""
    frob = np.zeros((ring.f, d, d, 1), dtype=np.int64)
    for c in range(ring.f):
        frob[c, :, :, 0] = np.eye(d, dtype=np.int64)
    obj = FilteredBKModule(ring, d, frob, ())
    middle = [power_subspace(obj.Q, ring.p + i - 1) for i in range(1, ring.e)]
    return FilteredBKModule.build(ring, frob, middle)
