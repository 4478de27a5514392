"""Seeded random objects of Mod_F."""
from __future__ import annotations

import numpy as np

from . import linalg as la
from . import poly
from .coeffs import CoefficientRing
from .families import power_subspace
from .modf import FilteredBKModule
from .lattice import QSpace


class ResampleLimit(RuntimeError):
    pass


def _unimodular(F, d: int, rng, deg: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """(a, a^{-1}) with polynomial entries: a product of unit triangular matrices and a constant."""
    K = max(1, deg + 1)
    L = np.zeros((d, d, K), dtype=np.int64)
    U = np.zeros((d, d, K), dtype=np.int64)
    for i in range(d):
        L[i, i, 0] = U[i, i, 0] = 1
        for j in range(i):
            L[i, j] = rng.integers(0, F.q, size=K)
            U[j, i] = rng.integers(0, F.q, size=K)
    D = poly.random_unit_matrix(F, d, 1, rng)
    a = poly.mmul(F, poly.mmul(F, L, U, 2 * K), D, 2 * K)
    # inverses of unit triangular matrices are polynomial of degree < d K
    Kinv = 2 * d * K + 2
    Li = _tri_inverse(F, L, Kinv, lower=True)
    Ui = _tri_inverse(F, U, Kinv, lower=False)
    det, adj = poly.mdet_adj(F, D)
    c0 = F.inv(int(det[0]))
    Di = poly.pscale(F, c0, poly.pad(adj, 1))
    ainv = poly.mmul(F, poly.mmul(F, Di, Ui, Kinv), Li, Kinv)
    return poly.trim_all(a), poly.trim_all(ainv)


def _tri_inverse(F, T: np.ndarray, K: int, lower: bool) -> np.ndarray:
    d = T.shape[0]
    X = poly.pad(T, K).copy()
    I = np.zeros((d, d, K), dtype=np.int64)
    for i in range(d):
        I[i, i, 0] = 1
    Nil = poly.psub(F, I, X)  # nilpotent part with sign: T = I - Nil
    out = I.copy()
    term = I.copy()
    for _ in range(d):
        term = poly.mmul(F, term, Nil, K)
        out = poly.padd(F, out, term)
    return out


def _random_constant_unit(F, d, rng, deg=2):
    return poly.random_unit_matrix(F, d, deg, rng)


def _fil_rest(obj: FilteredBKModule, F1: np.ndarray, rng) -> list[np.ndarray]:
    """F^2..F^(e-1): F^i = u F^(i-1) + u-span of random vectors of F^(i-1) meet u^(p+i-1) M."""
    Q, p, e = obj.Q, obj.ring.p, obj.ring.e
    chain = [F1]
    for i in range(2, e):
        prev = chain[-1]
        cap = la.intersect(obj.F, prev, power_subspace(Q, p + i - 1), Q.dim)
        extra = _random_u_span(Q, cap, rng)
        chain.append(Q.basis(np.vstack([Q.ushift(prev), extra])) if len(extra) else Q.ushift(prev))
    return chain


def _random_u_span(Q: QSpace, space: np.ndarray, rng) -> np.ndarray:
    if len(space) == 0:
        return Q.zero()
    n = int(rng.integers(0, Q.d + 1)) * Q.f
    if n == 0:
        return Q.zero()
    coef = rng.integers(0, Q.F.q, size=(n, len(space)), dtype=np.int64)
    vecs = la.matmul(Q.F, coef, space)
    vecs = Q.split_basis(vecs)
    rows = [vecs]
    cur = vecs
    for _ in range(Q.N):
        cur = Q.ushift(cur)
        if len(cur) == 0:
            break
        rows.append(cur)
    return Q.basis(np.vstack(rows))


def gen_random_sd(ring: CoefficientRing, d: int, rng, max_tries: int = 20) -> FilteredBKModule:
    """A = X diag(u^(c_i)) phi(a)^{-1}, F^1 generated by u^(r_i) A phi(a_i)."""
    F, f, p, N, e = ring.F, ring.f, ring.p, ring.N, ring.e
    for _ in range(max_tries):
        cs = [[int(rng.integers(0, (p if e == 1 else N) + 1)) for _ in range(d)] for _ in range(f)]
        X = [_random_constant_unit(F, d, rng) for _ in range(f)]
        pairs = [_unimodular(F, d, rng) for _ in range(f)]
        mats = []
        for c in range(f):
            Dg = np.zeros((d, d, N + 1), dtype=np.int64)
            for i, ci in enumerate(cs[c]):
                Dg[i, i, ci] = 1
            ainv = pairs[(c + 1) % f][1]
            K = X[c].shape[-1] + N + p * ainv.shape[-1] + 1
            phi_ainv = poly.subst_p(ainv, p, K)
            mats.append(poly.mmul(F, poly.mmul(F, poly.pad(X[c], K), poly.pad(Dg, K), K), phi_ainv, K))
        D = max(m.shape[-1] for m in mats)
        frob = poly.trim_all(np.stack([poly.pad(m, D) for m in mats]))
        obj = FilteredBKModule(ring, d, frob, ())
        Q = obj.Q
        # e_i = A phi(a_i) = u^(c_i) x_i on component c
        rows = []
        for c in range(f):
            Xc = poly.pad(X[c], N)
            for i, ci in enumerate(cs[c]):
                lo = max(0, p - ci)
                r = p - ci if e == 1 else int(rng.integers(lo, p + 1))
                s = r + ci
                for k in range(s, N):
                    v = np.zeros((f, d, N), dtype=np.int64)
                    v[c, :, k:] = Xc[:, i, : N - k]
                    rows.append(v.reshape(-1))
        F1 = Q.basis(np.array(rows)) if rows else Q.zero()
        chain = _fil_rest(obj, F1, rng)
        out = FilteredBKModule.build(ring, frob, chain[: e - 1])
        from .modf import validate
        if validate(out).ok:
            return out
    raise ResampleLimit("could not sample a valid strongly divisible object")


def gen_random_valid(ring: CoefficientRing, d: int, rng, max_tries: int = 20) -> FilteredBKModule:
    """A = X diag(u^(c_i)) Y and a random u-stable F^1 between u^p M^phi and M^phi meet u^p M."""
    F, f, p, N, e = ring.F, ring.f, ring.p, ring.N, ring.e
    from .modf import validate
    for _ in range(max_tries):
        mats = []
        for c in range(f):
            ci = [int(rng.integers(0, (p if e == 1 else N) + 1)) for _ in range(d)]
            Dg = np.zeros((d, d, N + 1), dtype=np.int64)
            for i, x in enumerate(ci):
                Dg[i, i, x] = 1
            X, Y = _random_constant_unit(F, d, rng), _random_constant_unit(F, d, rng)
            K = X.shape[-1] + Y.shape[-1] + N + 1
            mats.append(poly.mmul(F, poly.mmul(F, poly.pad(X, K), poly.pad(Dg, K), K), poly.pad(Y, K), K))
        frob = poly.trim_all(np.stack(mats))
        obj = FilteredBKModule(ring, d, frob, ())
        Q = obj.Q
        F0 = obj.mphi_Q
        base = Q.ushift(F0, p)
        if e == 1:
            F1 = base
        else:
            cap = la.intersect(F, F0, power_subspace(Q, p), Q.dim)
            extra = _random_u_span(Q, cap, rng)
            F1 = Q.basis(np.vstack([base, extra])) if len(extra) else base
        chain = _fil_rest(obj, F1, rng)
        out = FilteredBKModule.build(ring, frob, chain[: e - 1])
        if validate(out).ok:
            return out
    raise ResampleLimit("could not sample a valid object")
