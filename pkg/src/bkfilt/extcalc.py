"""The complex C_SD for a pair (P, M), its cohomology and the extension dictionary.

Cochains are stored through H = phi^{-1}(h_1), so the Frobenius entry of d is exact:

    C^0 = {(H, h_2, ..., h_{e-1})},   d(H, h_2, ..., h_{e-1}) = (h_2 - Phi(H), ..., H - h_{e-1})

with Phi(H) = A_M phi(H) A_P^{-1}; for e <= 2 this is the single slot H - Phi(H).
Every tuple of maps divisible by u^L0, L0 = max(N, floor(N/(p-1)) + 1), is a coboundary,
so all cohomology is computed exactly in the Laurent window [-N, top) for top >= L0.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field as dfield
from functools import cached_property

import numpy as np

from . import homs
from . import linalg as la
from . import poly
from .hodge import d_pair
from .homs import Window
from .lattice import hom_conditions
from .modf import (ExactSequence, FilteredBKModule, ModFMorphism, extension_object,
                   standard_sequence)
from .sd import (NotStronglyDivisible, _affine_solve, graph_conditions, hodge_type,
                 pole_free_conditions, sd_check_criterion, split_surjection)


class NoStabilization(RuntimeError):
    pass


class HypothesisFailed(ValueError):
    pass


class InadmissibleCocycle(ValueError):
    pass


def contraction_level(N: int, p: int) -> int:
    return max(N, N // (p - 1) + 1)


def valuation_bound(N: int, p: int) -> int:
    return N // (p - 1)


def _block_diag(F, mats: list[np.ndarray]) -> np.ndarray:
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in mats:
        out[r: r + m.shape[0], c: c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def _neg(F, A):
    return F.vneg(A) if F.m > 1 else (-A) % F.p


def _add(F, A, B):
    return F.vadd(A, B) if F.m > 1 else (A + B) % F.p


@dataclass
class Complex:
    P: FilteredBKModule
    M: FilteredBKModule
    top: int

    def __post_init__(self):
        if self.P.ring != self.M.ring:
            raise ValueError("objects live over different rings")
        self.F = self.P.F
        self.N = self.P.N
        self.e = self.P.ring.e
        self.p = self.P.ring.p
        self.slot = Window(-self.N, self.top + self.N)
        self.hwin = Window(0, self.top)
        self.nslots = max(self.e - 1, 1)

    @property
    def r(self) -> int:
        return self.P.f * self.P.d * self.M.d

    def _cond(self, win: Window, S, T, shift=0):
        return hom_conditions(self.F, self.P.Q, self.M.Q, win.lo, win.W, S, T, shift)

    # C^1

    @cached_property
    def c1_conditions(self) -> np.ndarray:
        P, M = self.P, self.M
        if self.e == 1:
            return self._cond(self.slot, P.Q.full(), M.Q.full())
        blocks = []
        for i in range(1, self.e):
            a = self._cond(self.slot, P.fil[i + 1], M.fil[i])
            b = self._cond(self.slot, P.fil[i], M.fil[i + 1], shift=1)
            blocks.append(np.concatenate([a, b], axis=1))
        return _block_diag(self.F, blocks)

    @cached_property
    def c1_basis(self) -> np.ndarray:
        return la.left_kernel(self.F, self.c1_conditions)

    # C^0

    @cached_property
    def phi(self) -> np.ndarray:
        return homs.phi_matrix(self.P, self.M, self.hwin, self.slot)

    @cached_property
    def c0_conditions(self) -> np.ndarray:
        P, M = self.P, self.M
        Hc = la.matmul(self.F, self.phi, self._cond(self.slot, P.fil[1], M.fil[1]))
        Hp = self._cond(self.hwin, P.Q.full(), M.Q.full())
        blocks = [np.concatenate([Hc, Hp], axis=1)]
        for i in range(2, self.e):
            blocks.append(self._cond(self.slot, P.fil[i], M.fil[i]))
        return _block_diag(self.F, blocks)

    @cached_property
    def c0_basis(self) -> np.ndarray:
        return la.left_kernel(self.F, self.c0_conditions)

    @cached_property
    def d_matrix(self) -> np.ndarray:
        F, nh = self.F, homs.nh(self.P, self.M, self.slot.W)
        E = homs.embed(self.P, self.M, self.hwin, self.slot)
        mPhi = _neg(F, self.phi)
        if self.e <= 2:
            return _add(F, E, mPhi)
        k = self.e - 2  # number of h_i
        n0 = E.shape[0] + k * nh
        out = np.zeros((n0, (self.e - 1) * nh), dtype=np.int64)
        nH = E.shape[0]
        I = np.eye(nh, dtype=np.int64)
        out[:nH, :nh] = mPhi
        out[:nH, (self.e - 2) * nh:] = _add(F, out[:nH, (self.e - 2) * nh:], E)
        for idx in range(k):  # h_{idx+2}
            r0 = nH + idx * nh
            out[r0: r0 + nh, idx * nh: (idx + 1) * nh] = _add(F, out[r0: r0 + nh, idx * nh: (idx + 1) * nh], I)
            out[r0: r0 + nh, (idx + 1) * nh: (idx + 2) * nh] = _neg(F, I)
        return out

    @cached_property
    def image(self) -> np.ndarray:
        if len(self.c0_basis) == 0:
            return np.zeros((0, self.d_matrix.shape[1]), dtype=np.int64)
        return la.row_basis(self.F, la.matmul(self.F, self.c0_basis, self.d_matrix), self.d_matrix.shape[1])

    @property
    def h1(self) -> int:
        return len(self.c1_basis) - len(self.image)

    @property
    def kernel_dim(self) -> int:
        return len(self.c0_basis) - len(self.image)

    def in_image(self, g: np.ndarray) -> bool:
        return la.in_span(self.F, self.image, g)

    def cocycle_vector(self, slots: list[np.ndarray], lo: int) -> np.ndarray:
        """Flatten Laurent maps (each (f, dM, dP, W) starting at lo) into the C^1 window."""
        f, dM, dP = self.P.f, self.M.d, self.P.d
        out = np.zeros((self.nslots, f, dM, dP, self.slot.W), dtype=np.int64)
        for s, g in enumerate(slots):
            for k in range(g.shape[-1]):
                kk = lo + k - self.slot.lo
                if 0 <= kk < self.slot.W:
                    out[s, ..., kk] = g[..., k]
                elif kk < 0 and g[..., k].any():
                    raise InadmissibleCocycle("pole order exceeds N")
        return out.reshape(-1)

    def is_cocycle(self, g: np.ndarray) -> bool:
        return not la.matmul(self.F, g[None, :], self.c1_conditions).any()


def _env_precision() -> int | None:
    v = os.environ.get("BKFILT_PRECISION")
    return int(v) if v else None


@dataclass
class H1Result:
    value: int
    tops: list
    values: list
    h0_kernel: int


def h1_dim(P: FilteredBKModule, M: FilteredBKModule, precision: int | None = None,
           max_doublings: int = 3) -> H1Result:
    """Cokernel dimension on windows [-N, top), doubling top until two values agree."""
    N, p = P.N, P.ring.p
    L0 = contraction_level(N, p)
    top = precision or _env_precision() or (L0 + N)
    top = max(top, L0)
    tops, values = [], []
    kern = None
    for _ in range(max_doublings + 1):
        cx = Complex(P, M, top)
        tops.append(top)
        values.append(cx.h1)
        if kern is None:
            kern = cx.kernel_dim
        if len(values) >= 2 and values[-1] == values[-2]:
            return H1Result(values[-1], tops, values, kern)
        top *= 2
    raise NoStabilization(f"h1 values {values} at truncations {tops}")


def _fixed_point_system(P, M, v: int):
    F = P.F
    win = Window(0, v)
    out = Window(-P.N, v + P.N)
    Phi = homs.phi_matrix(P, M, win, out)
    E = homs.embed(P, M, win, out)
    eq = _add(F, Phi, _neg(F, E))
    conds = [eq]
    for i in range(1, P.ring.e):
        conds.append(hom_conditions(F, P.Q, M.Q, 0, v, P.fil[i], M.fil[i]))
    return win, np.concatenate(conds, axis=1)


def h0_solutions(P: FilteredBKModule, M: FilteredBKModule, v: int | None = None):
    """Basis of {H mod u^v : Phi(H) = H mod u^v, H(G^i) in E^i}; exact for v >= L0."""
    L0 = contraction_level(P.N, P.ring.p)
    v = max(v or L0, L0)
    win, cond = _fixed_point_system(P, M, v)
    return win, la.left_kernel(P.F, cond)


def h0_dim(P: FilteredBKModule, M: FilteredBKModule) -> int:
    return len(h0_solutions(P, M)[1])


def h0_valuations(P: FilteredBKModule, M: FilteredBKModule) -> dict:
    """Valuations of nonzero fixed homomorphisms, solved well beyond the contraction level."""
    L0 = contraction_level(P.N, P.ring.p)
    v = 2 * L0 + P.ring.p
    win, sol = h0_solutions(P, M, v)
    vals = homs.valuation_profile(P.F, sol, P, M, win)
    bound = valuation_bound(P.N, P.ring.p)
    return {"dim": len(sol), "valuations": vals, "bound": bound,
            "ok": all(x <= bound for x in vals), "precision": v}


# Hom_k and the Euler characteristic

def _fi_dim(P, M, i: int) -> tuple[int, np.ndarray]:
    F, N, p = P.F, P.N, P.ring.p
    K = max(1, -(-(2 * N + i) // p))
    hw = Window(0, K)
    ow = Window(-N, max(2 * N + i, N + 1))
    Phi = homs.phi_matrix(P, M, hw, ow)
    cond = la.matmul(F, Phi, hom_conditions(F, P.Q, M.Q, ow.lo, ow.W, P.fil[1], M.fil[1], shift=-i))
    sol = la.left_kernel(F, cond)
    if len(sol) == 0:
        return 0, sol
    const = sol.reshape(len(sol), P.f, M.d, P.d, K)[..., 0].reshape(len(sol), -1)
    basis = la.row_basis(F, const, const.shape[1])
    return len(basis), basis


@dataclass
class HomKProfile:
    dims: dict  # i -> dim F^i(Hom_k)
    gr: dict
    total: int
    f0: int
    hypothesis: bool

    def to_json(self) -> dict:
        return {"F": {str(k): v for k, v in sorted(self.dims.items())},
                "gr": {str(k): v for k, v in sorted(self.gr.items()) if v},
                "dim_Hom_k": self.total, "dim_F0": self.f0, "hypothesis": self.hypothesis}


def hom_k_profile(P: FilteredBKModule, M: FilteredBKModule) -> HomKProfile:
    p, N = P.ring.p, P.N
    r = P.f * P.d * M.d
    dims = {}
    i = -p - 1
    cap = 4 * N + 2 * p
    while True:
        dims[i] = _fi_dim(P, M, i)[0]
        if dims[i] == 0 or i > cap:
            break
        i += 1
    gr = {k: dims[k] - dims.get(k + 1, 0) for k in dims}
    hyp = dims[-p] == r
    return HomKProfile(dims, gr, r, dims.get(0, 0), hyp)


def graded_step_dim(obj: FilteredBKModule, i: int, c: int) -> int:
    """dim over component c of F^(i+1) / u F^i."""
    Q = obj.Q
    return Q.dim_component(obj.fil[i + 1], c) - Q.dim_component(obj.fil[i], c) + obj.d


def successive_dim(obj: FilteredBKModule, i: int, c: int) -> int:
    """dim over component c of F^i / F^(i+1)."""
    Q = obj.Q
    return Q.dim_component(obj.fil[i], c) - Q.dim_component(obj.fil[i + 1], c)


def chi_formula(P: FilteredBKModule, M: FilteredBKModule, profile: HomKProfile | None = None) -> int:
    prof = profile or hom_k_profile(P, M)
    if not prof.hypothesis:
        raise HypothesisFailed("gr^i(Hom_k) is nonzero for some i < -p")
    val = prof.total - prof.f0
    for i in range(1, P.ring.e):
        for c in range(P.f):
            val += graded_step_dim(P, i, c) * successive_dim(M, i, c)
    return val


def verify_niceform(P: FilteredBKModule, M: FilteredBKModule, precision: int | None = None) -> dict:
    h1 = h1_dim(P, M, precision)
    h0 = h0_dim(P, M)
    dmu = d_pair(hodge_type(P), hodge_type(M))
    prof = hom_k_profile(P, M)
    chi = chi_formula(P, M, prof) if prof.hypothesis else None
    return {"h0": h0, "h1": h1.value, "chi_formula": chi, "d_mu": dmu,
            "equal": h1.value == h0 + dmu, "h0_kernel": h1.h0_kernel,
            "precision_used": h1.tops, "h1_values": h1.values}


def verify_extdim(P: FilteredBKModule, M: FilteredBKModule, precision: int | None = None) -> dict:
    prof = hom_k_profile(P, M)
    h1 = h1_dim(P, M, precision)
    h0 = h0_dim(P, M)
    chi = chi_formula(P, M, prof) if prof.hypothesis else None
    return {"h0": h0, "h1": h1.value, "chi_formula": chi, "hypothesis": prof.hypothesis,
            "equal": chi is not None and h1.value - h0 == chi, "h0_kernel": h1.h0_kernel,
            "precision_used": h1.tops, "h1_values": h1.values}


# extensions

@dataclass
class Cocycle:
    """g = (g_1, ..., g_{e-1}) (one slot for e = 1) as Laurent maps starting at degree lo."""
    slots: list
    lo: int

    def total(self, F) -> np.ndarray:
        acc = np.zeros_like(self.slots[0])
        for g in self.slots:
            acc = _add(F, acc, g)
        return acc


def _split_vector(P, M, v: np.ndarray, nslots: int, win: Window) -> Cocycle:
    arr = v.reshape(nslots, P.f, M.d, P.d, win.W)
    return Cocycle([arr[s] for s in range(nslots)], win.lo)


def random_cocycle(P: FilteredBKModule, M: FilteredBKModule, rng) -> Cocycle:
    """Uniform element of the cocycles in window [-N, N) whose slot sum has no poles."""
    N = P.N
    cx = Complex(P, M, N)
    B = cx.c1_basis
    nh = homs.nh(P, M, cx.slot.W)
    # pole-free condition on the sum of slots
    S = np.zeros((cx.nslots * nh, nh), dtype=np.int64)
    for s in range(cx.nslots):
        S[s * nh: (s + 1) * nh] = np.eye(nh, dtype=np.int64)
    Z = pole_free_conditions(P, M, cx.slot)
    cond = la.matmul(P.F, la.matmul(P.F, B, S), Z) if len(B) else np.zeros((0, Z.shape[1]), dtype=np.int64)
    ker = la.left_kernel(P.F, cond) if len(B) else np.zeros((0, 0), dtype=np.int64)
    if len(ker) == 0:
        v = np.zeros(cx.nslots * nh, dtype=np.int64)
    else:
        coef = rng.integers(0, P.F.q, size=(1, len(ker)), dtype=np.int64)
        v = la.matmul(P.F, la.matmul(P.F, coef, ker), B)[0]
    return _split_vector(P, M, v, cx.nslots, cx.slot)


def _laurent_times_gens(F, QP, t_lo: int, t: np.ndarray, gens_rows: np.ndarray, N: int):
    """Rows (t x mod u^N, x) for generators x of a lattice in Q_P, t Laurent from degree t_lo."""
    f, dM, dP, W = t.shape
    bot = min(t_lo, 0)
    out = []
    for c, g in QP.generators(gens_rows):
        g = poly.pad(g, N + 1)
        y = np.zeros((dM, N - bot), dtype=np.int64)
        for j in range(dP):
            for tt in np.flatnonzero(g[j]):
                for k in range(W):
                    deg = t_lo + k + int(tt)
                    if deg >= N:
                        break
                    y[:, deg - bot] = _add(F, y[:, deg - bot], poly.pscale(F, int(g[j, tt]), t[c, :, j, k]))
        if y[:, : -bot].any():
            raise InadmissibleCocycle("graph map has poles on the lattice")
        v = np.zeros((f, dM + dP, N), dtype=np.int64)
        v[c, :dM] = y[:, -bot:]
        v[c, dM:] = g[:, :N]
        out.append(v.reshape(-1))
    return np.array(out)


def extension_from_cocycle(P: FilteredBKModule, M: FilteredBKModule, g: Cocycle):
    """N = M + P with Frobenius [[A_M, -A_M phi(G)], [0, A_P]], G = sum g_i, and graph filtrations."""
    F, f, p, N, e = P.F, P.f, P.ring.p, P.N, P.ring.e
    G = g.total(F)
    lo = g.lo
    if lo < 0:
        if G[..., : -lo].any():
            raise InadmissibleCocycle("sum of the cocycle has poles")
        G = G[..., -lo:]
        lo = 0
    G = poly.shift(G, lo, G.shape[-1] + lo) if lo else G
    D = max(M.frob.shape[-1], 1) + p * G.shape[-1]
    C = np.zeros((f, M.d, P.d, D), dtype=np.int64)
    for c in range(f):
        phiG = poly.subst_p(G[(c + 1) % f], p, D)
        C[c] = _neg(F, poly.mmul(F, poly.pad(M.frob[c], D), phiG, D))
    C = poly.trim_all(C)
    dN = M.d + P.d
    proto = FilteredBKModule(P.ring, dN, np.zeros((f, dN, dN, 1), dtype=np.int64), ())
    QN = proto.Q
    middle = []
    t = np.zeros_like(g.slots[0])
    for i in range(1, e):
        if i >= 2:
            t = _add(F, t, g.slots[i - 2])
        E = np.zeros((len(M.fil[i]), f, dN, N), dtype=np.int64)
        if len(M.fil[i]):
            E[:, :, : M.d] = M.fil[i].reshape(-1, f, M.d, N)
        graph = _laurent_times_gens(F, P.Q, g.lo, t, P.fil[i], N)
        middle.append(QN.u_closure(np.vstack([E.reshape(-1, QN.dim), graph])))
    Nobj = extension_object(M, P, C, middle)
    return Nobj, standard_sequence(M, Nobj, P)


def _solve_graph_map(seq: ExactSequence, level: int, win: Window) -> np.ndarray:
    F = seq.middle.F
    G, g0 = graph_conditions(seq, win, level)
    w = _affine_solve(F, G, g0)
    if w is None:
        raise NotStronglyDivisible(f"no graph splitting at level {level}")
    return w.reshape(seq.quotient.f, seq.sub.d, seq.quotient.d, win.W)


def cocycle_from_extension(seq: ExactSequence) -> Cocycle:
    """g = (t_2 - t_1, ..., W - t_{e-1}) from splittings s_i = (t_i, id) of F^i_N -> G^i."""
    P, M = seq.quotient, seq.sub
    F, N, e = P.F, P.N, P.ring.e
    top = contraction_level(N, P.ring.p)
    s = split_surjection(seq, top)
    win = Window(-N, top + N)
    t1 = np.zeros((P.f, M.d, P.d, win.W), dtype=np.int64)
    t1[..., N:] = s.t
    Wfull = np.zeros_like(t1)
    k = min(s.W.shape[-1], top)
    Wfull[..., N:N + k] = s.W[..., :k]
    ts = [t1] + [_solve_graph_map(seq, i, win) for i in range(2, e)]
    ts.append(Wfull)
    if e == 1:
        slots = [_add(F, Wfull, _neg(F, t1))]
    else:
        slots = [_add(F, ts[i + 1], _neg(F, ts[i])) for i in range(e - 1)]
    return Cocycle(slots, win.lo)


def cocycle_difference_in_image(P, M, g1: Cocycle, g2: Cocycle, top: int | None = None) -> bool:
    F = P.F
    top = top or contraction_level(P.N, P.ring.p)
    cx = Complex(P, M, top)
    v1 = cx.cocycle_vector(g1.slots, g1.lo)
    v2 = cx.cocycle_vector(g2.slots, g2.lo)
    diff = _add(F, v1, _neg(F, v2))
    if not cx.is_cocycle(diff):
        return False
    return cx.in_image(diff)


def d_sd(P, M, H: np.ndarray, hs: list[np.ndarray], top: int | None = None) -> Cocycle:
    """Apply d to H (pole-free, window [0, top)) and h_2..h_{e-1} (window [-N, top))."""
    top = top or contraction_level(P.N, P.ring.p)
    cx = Complex(P, M, top)
    vec = np.concatenate([H.reshape(-1)] + [h.reshape(-1) for h in hs])
    out = la.matmul(P.F, vec[None, :], cx.d_matrix)[0]
    return _split_vector(P, M, out, cx.nslots, cx.slot)
