"""Lattices L with u^N M ⊆ L ⊆ M, stored as subspaces of Q = M / u^N M.

Q coordinates are ordered (component c, basis index b, u-power k) with flat index
``(c * d + b) * N + k``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .coeffs import GF


@dataclass(frozen=True)
class QSpace:
    F: GF
    f: int
    d: int
    N: int

    @property
    def dim(self) -> int:
        return self.f * self.d * self.N

    def flat(self, arr: np.ndarray) -> np.ndarray:
        """(…, f, d, N) -> (…, dim)."""
        return arr.reshape(arr.shape[:-3] + (self.dim,))

    def unflat(self, v: np.ndarray) -> np.ndarray:
        return v.reshape(v.shape[:-1] + (self.f, self.d, self.N))

    def basis(self, rows) -> np.ndarray:
        if self.dim == 0:
            return np.zeros((0, 0), dtype=np.int64)
        return la.row_basis(self.F, np.asarray(rows, dtype=np.int64).reshape(-1, self.dim), self.dim)

    def full(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.int64)

    def zero(self) -> np.ndarray:
        return np.zeros((0, self.dim), dtype=np.int64)

    def ushift(self, S: np.ndarray, k: int = 1) -> np.ndarray:
        a = self.unflat(np.asarray(S, dtype=np.int64).reshape(-1, self.dim))
        out = np.zeros_like(a)
        if k < self.N:
            out[..., k:] = a[..., : self.N - k]
        return self.basis(self.flat(out))

    def u_closure(self, rows) -> np.ndarray:
        """Basis of the S-span (u-stable span) of the given rows."""
        cur = self.basis(rows)
        acc = cur
        for _ in range(self.N):
            cur = self.ushift(cur)
            if len(cur) == 0 or la.span_contains(self.F, acc, cur):
                break
            acc = self.basis(np.vstack([acc, cur]))
        return acc

    def components(self, S: np.ndarray) -> list[np.ndarray]:
        """Project each row onto each component."""
        a = self.unflat(np.asarray(S, dtype=np.int64).reshape(-1, self.dim))
        parts = []
        for c in range(self.f):
            b = np.zeros_like(a)
            b[:, c] = a[:, c]
            parts.append(self.flat(b))
        return parts

    def split_basis(self, S: np.ndarray) -> np.ndarray:
        return self.basis(np.vstack(self.components(S))) if len(S) else self.zero()

    def is_u_stable(self, S) -> bool:
        return la.span_contains(self.F, S, self.ushift(S))

    def is_component_stable(self, S) -> bool:
        return all(la.span_contains(self.F, S, P) for P in self.components(S))

    def dim_component(self, S: np.ndarray, c: int) -> int:
        """dim of the c-th component of a component-stable subspace."""
        return la.rank(self.F, self.components(S)[c]) if len(S) else 0

    def generators(self, S: np.ndarray) -> list[tuple[int, np.ndarray]]:
        """S-module generators of the lattice S + u^N M as (component, (d, N) polynomial) pairs.

        Elements u^N e_b are returned with the flag polynomial of length N + 1.
        """
        S = self.split_basis(S) if len(S) else self.zero()
        gens: list[tuple[int, np.ndarray]] = []
        uS = self.ushift(S) if len(S) else self.zero()
        cur = uS
        for row in S:
            if not la.in_span(self.F, cur, row):
                cur = np.vstack([cur, row])
                a = self.unflat(row)
                c = int(np.flatnonzero(a.reshape(self.f, -1).any(axis=1))[0])
                gens.append((c, a[c]))
        for c in range(self.f):
            for b in range(self.d):
                g = np.zeros((self.d, self.N + 1), dtype=np.int64)
                g[b, self.N] = 1
                gens.append((c, g))
        return gens

    def quotient_projector(self, T: np.ndarray) -> np.ndarray:
        """Matrix P with v in span(T) iff v P = 0."""
        if len(T) == 0:
            return np.eye(self.dim, dtype=np.int64)
        R, piv = la.rref(self.F, T)
        nonpiv = [j for j in range(self.dim) if j not in set(piv)]
        P = np.eye(self.dim, dtype=np.int64)
        # v - sum_i v[piv_i] R_i
        for i, c in enumerate(piv):
            P[c] = self.F.vneg(R[i]) if self.F.m > 1 else (-R[i]) % self.F.p
            P[c, c] = 0
        return P[:, nonpiv]


def hom_apply(src: QSpace, tgt: QSpace, lo: int, W: int, c: int, g: np.ndarray, bot: int) -> np.ndarray:
    """Coefficients of h(g) in degrees [bot, N) as a (nh, d_tgt, N - bot) array over h coordinates."""
    f, dP, dM, N = src.f, src.d, tgt.d, src.N
    span = N - bot
    out = np.zeros((f, dM, dP, W, dM, span), dtype=np.int64)
    ar = np.arange(dM)
    for j in range(dP):
        gj = g[j]
        for t in np.flatnonzero(gj):
            for k in range(W):
                deg = lo + k + int(t)
                if deg >= N:
                    break
                if deg >= bot:
                    out[c, ar, j, k, ar, deg - bot] = gj[t]
    return out.reshape(f * dM * dP * W, dM, span)


def hom_conditions(
    F: GF,
    src: QSpace,
    tgt: QSpace,
    lo: int,
    W: int,
    S_src: np.ndarray,
    T_tgt: np.ndarray,
    shift: int = 0,
) -> np.ndarray:
    """Linear conditions for u^shift * h to map S_src + u^N P into T_tgt + u^N M.

    h ranges over Laurent maps sum_{k<W} h_k u^(lo+k) with coordinates
    (c, i, j, k) over (f, d_tgt, d_src, W). Returns the matrix whose left kernel
    is the admissible set.
    """
    f, dM, N = src.f, tgt.d, src.N
    nh = f * dM * src.d * W
    P = tgt.quotient_projector(T_tgt)
    bot = min(lo + shift, 0)
    blocks = []
    for c, g in src.generators(S_src):
        out = hom_apply(src, tgt, lo + shift, W, c, g, bot)
        blocks.append(out[:, :, : -bot].reshape(nh, -1))
        qpart = np.zeros((nh, f, dM, N), dtype=np.int64)
        qpart[:, c] = out[:, :, -bot:]
        blocks.append(la.matmul(F, qpart.reshape(nh, -1), P))
    if not blocks:
        return np.zeros((nh, 0), dtype=np.int64)
    return np.concatenate(blocks, axis=1)
