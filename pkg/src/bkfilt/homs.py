"""Laurent windows of Hom(P, M) and the semilinear operator Phi(H) = A_M phi(H) A_P^{-1}.

A window (lo, W) holds maps sum_{k<W} H_k u^(lo+k); coordinates are (c, i, j, k) over
(f, d_M, d_P, W), i indexing the target basis and j the source basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from . import poly
from .modf import FilteredBKModule


@dataclass(frozen=True)
class Window:
    lo: int
    W: int

    @property
    def hi(self) -> int:
        return self.lo + self.W


def nh(P: FilteredBKModule, M: FilteredBKModule, W: int) -> int:
    return P.f * M.d * P.d * W


def embed(P, M, src: Window, dst: Window) -> np.ndarray:
    """Inclusion of window src into window dst (terms outside dst are dropped)."""
    f, dM, dP = P.f, M.d, P.d
    out = np.zeros((f, dM, dP, src.W, f, dM, dP, dst.W), dtype=np.int64)
    for k in range(src.W):
        kk = src.lo + k - dst.lo
        if 0 <= kk < dst.W:
            for c in range(f):
                for i in range(dM):
                    for j in range(dP):
                        out[c, i, j, k, c, i, j, kk] = 1
    return out.reshape(nh(P, M, src.W), nh(P, M, dst.W))


def phi_matrix(P: FilteredBKModule, M: FilteredBKModule, src: Window, dst: Window) -> np.ndarray:
    """Matrix of H -> Phi(H) = u^-N A_M phi(H) B_P from window src to window dst.

    B_P = u^N A_P^{-1}. Raises if the image has terms below dst.lo.
    """
    F, f, p, N = P.F, P.f, P.ring.p, P.N
    dM, dP = M.d, P.d
    if p * src.lo - N < dst.lo:
        raise ValueError("Phi image leaves the target window")
    L = max(dst.hi - (p * src.lo - N), 1)
    A = M.frob_series(L)
    B = P.binv(L)
    out = np.zeros((f, dM, dP, src.W, f, dM, dP, dst.W), dtype=np.int64)
    for c in range(f):
        cp = (c + 1) % f
        for i in range(dM):
            for j in range(dP):
                # product A[:, i] * B[j, :] as (dM, dP, L)
                prod = np.zeros((dM, dP, L), dtype=np.int64)
                for i2 in range(dM):
                    if not A[c, i2, i].any():
                        continue
                    for j2 in range(dP):
                        if B[c, j, j2].any():
                            prod[i2, j2] = poly.pmul(F, A[c, i2, i], B[c, j, j2], L)
                if not prod.any():
                    continue
                for k in range(src.W):
                    s = p * (src.lo + k) - N - dst.lo
                    if s >= dst.W:
                        break
                    n = min(L, dst.W - s)
                    out[cp, i, j, k, c, :, :, s: s + n] = prod[:, :, :n]
    return out.reshape(nh(P, M, src.W), nh(P, M, dst.W))


def to_array(P, M, v: np.ndarray, W: int) -> np.ndarray:
    return np.asarray(v, dtype=np.int64).reshape(P.f, M.d, P.d, W)


def from_array(H: np.ndarray) -> np.ndarray:
    return H.reshape(-1)


def valuation_profile(F, basis: np.ndarray, P, M, win: Window) -> list[int]:
    """Valuations realised by nonzero elements of the span (degree-major echelon)."""
    if len(basis) == 0:
        return []
    f, dM, dP = P.f, M.d, P.d
    arr = basis.reshape(-1, f, dM, dP, win.W)
    deg_major = np.moveaxis(arr, 4, 1).reshape(len(basis), -1)
    _, piv = la.rref(F, deg_major)
    block = f * dM * dP
    return sorted({win.lo + c // block for c in piv})
