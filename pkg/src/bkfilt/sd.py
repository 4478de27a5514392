"""Strong divisibility.

M-bar is identified with F^(f d) through A b -> b(0). For t in [0, p]:

* Fil^t(M-bar) = {b(0) : u^t A b in F^1}, computed over all b;
* W_t = {phi(a)(0) : u^t A phi(a) in F^1}, the image of the phi(M)-part.

Jumps are effective: a basis vector with jump r lies in Fil^t exactly for t >= r.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import homs
from . import linalg as la
from . import poly
from .hodge import HodgeType
from .lattice import hom_apply
from .modf import ExactSequence, FilteredBKModule, is_exact


class NotStronglyDivisible(Exception):
    pass


def _lin_rows(obj: FilteredBKModule, t: int) -> np.ndarray:
    """Rows u^t A b mod u^N in Q for b over the basis (c, j, k), k < N."""
    f, d, N = obj.f, obj.d, obj.N
    A = obj.frob_series(N)
    out = np.zeros((f, d, N, f, d, N), dtype=np.int64)
    for c in range(f):
        for j in range(d):
            for k in range(N - t):
                s = t + k
                out[c, j, k, c, :, s:] = A[c, :, j, : N - s]
    return out.reshape(f * d * N, f * d * N)


def _solutions(obj: FilteredBKModule, rows: np.ndarray, S: np.ndarray) -> np.ndarray:
    return la.left_kernel(obj.F, la.matmul(obj.F, rows, obj.Q.quotient_projector(S)))


def fil_bar(obj: FilteredBKModule, t: int) -> np.ndarray:
    """Fil^t(M-bar) as rows over (c, j)."""
    f, d, N = obj.f, obj.d, obj.N
    sol = _solutions(obj, _lin_rows(obj, t), obj.fil[1])
    if len(sol) == 0:
        return np.zeros((0, f * d), dtype=np.int64)
    const = sol.reshape(-1, f, d, N)[..., 0].reshape(-1, f * d)
    return la.row_basis(obj.F, const, f * d)


def _phi_K(obj) -> int:
    return max(1, -(-obj.N // obj.ring.p))


def w_space(obj: FilteredBKModule, t: int, with_preimages: bool = False):
    """W_t as rows over (c, j); optionally the solution vectors a as well."""
    f, d = obj.f, obj.d
    K = _phi_K(obj)
    sol = _solutions(obj, obj.phi_image_rows(K, t), obj.fil[1])
    if len(sol) == 0:
        const = np.zeros((0, f * d), dtype=np.int64)
    else:
        a0 = sol.reshape(-1, f, d, K)[..., 0]
        const = np.roll(a0, -1, axis=1).reshape(-1, f * d)  # phi(a)^(c) = a^(c+1)(u^p)
    if with_preimages:
        return const, sol
    return la.row_basis(obj.F, const, f * d)


def _component_dim(obj, rows: np.ndarray, c: int) -> int:
    if len(rows) == 0:
        return 0
    r = rows.reshape(-1, obj.f, obj.d)[:, c]
    return la.rank(obj.F, r)


def sd_check_criterion(obj: FilteredBKModule) -> bool:
    if obj.d == 0:
        return True
    F = obj.F
    for t in range(obj.ring.p + 1):
        if not la.span_equal(F, w_space(obj, t), fil_bar(obj, t)):
            return False
    return True


def elementary_divisors(obj: FilteredBKModule) -> list[list[int]]:
    """Per component, the exponents r_i with A^{-1} F^1 = sum u^(r_i) S f_i."""
    f, d, N, p = obj.f, obj.d, obj.N, obj.ring.p
    F = obj.F
    sol = _solutions(obj, _lin_rows(obj, 0), obj.fil[1])
    L = sol.reshape(-1, f, d, N)
    out = []
    for c in range(f):
        Lc = L[:, c].reshape(len(L), -1) if len(L) else np.zeros((0, d * N), dtype=np.int64)
        Lc = la.row_basis(F, Lc, d * N)
        counts = []
        for t in range(N):
            # elements of L divisible by u^t, read at degree t
            arr = Lc.reshape(-1, d, N)
            if len(arr):
                low = arr[:, :, :t].reshape(len(arr), -1)
                ker = la.left_kernel(F, low) if t else np.eye(len(arr), dtype=np.int64)
                sub = la.matmul(F, ker, arr.reshape(len(arr), -1)).reshape(-1, d, N) if len(ker) else arr[:0]
                counts.append(la.rank(F, sub[:, :, t]) if len(sub) else 0)
            else:
                counts.append(0)
        rs = []
        prev = 0
        for t, n in enumerate(counts):
            rs += [t] * (n - prev)
            prev = n
        if len(rs) < d:
            # remaining divisors are >= N
            rs += [N] * (d - len(rs))
        out.append(rs)
    return out


def sd_check_definition(obj: FilteredBKModule) -> bool:
    """Search for a basis of phi(M) with jumps in [0, p] generating F^1."""
    if obj.d == 0:
        return True
    p = obj.ring.p
    divs = elementary_divisors(obj)
    if any(r > p for rs in divs for r in rs):
        return False
    return _greedy_basis(obj, divs) is not None


@dataclass
class SDBasis:
    components: list  # component index per vector
    vectors: np.ndarray  # (n, d, N): e_i = A phi(a_i) restricted to its component, mod u^N
    jumps: list

    def to_json(self) -> dict:
        return {"components": list(self.components), "jumps": list(self.jumps),
                "vectors": self.vectors.tolist()}


def _greedy_basis(obj: FilteredBKModule, divs) -> SDBasis | None:
    F, f, d, N = obj.F, obj.f, obj.d, obj.N
    K = _phi_K(obj)
    A = obj.frob_series(N)
    comps, vecs, jumps = [], [], []
    chosen = [np.zeros((0, d), dtype=np.int64) for _ in range(f)]
    for t in range(obj.ring.p + 1):
        const, sol = w_space(obj, t, with_preimages=True)
        if len(sol) == 0:
            if any(sum(1 for r in divs[c] if r <= t) > len(chosen[c]) for c in range(f)):
                return None
            continue
        const = const.reshape(-1, f, d)
        a = sol.reshape(-1, f, d, K)
        for c in range(f):
            need = sum(1 for r in divs[c] if r <= t) - len(chosen[c])
            for idx in range(len(const)):
                if need <= 0:
                    break
                v = const[idx, c]
                if not v.any() or la.in_span(F, chosen[c], v):
                    continue
                chosen[c] = np.vstack([chosen[c], v])
                b = poly.subst_p(a[idx, (c + 1) % f], obj.ring.p, N)  # phi(a)^(c)
                e = np.zeros((d, N), dtype=np.int64)
                for j in range(d):
                    if b[j].any():
                        for i in range(d):
                            e[i] = poly.padd(F, e[i], poly.pmul(F, A[c, i, j], b[j], N))
                comps.append(c)
                vecs.append(e)
                jumps.append(t)
                need -= 1
            if need > 0:
                return None
    if any(len(ch) != d for ch in chosen):
        return None
    order = sorted(range(len(jumps)), key=lambda i: (comps[i], -jumps[i]))
    return SDBasis([comps[i] for i in order], np.array([vecs[i] for i in order]).reshape(-1, d, N),
                   [jumps[i] for i in order])


def basis_lattice(obj: FilteredBKModule, basis: SDBasis) -> np.ndarray:
    """Q-image of the S-lattice generated by u^(r_i) e_i."""
    f, d, N = obj.f, obj.d, obj.N
    rows = []
    for c, e, r in zip(basis.components, basis.vectors, basis.jumps):
        for k in range(r, N):
            v = np.zeros((f, d, N), dtype=np.int64)
            v[c, :, k:] = e[:, : N - k]
            rows.append(v.reshape(-1))
    return obj.Q.basis(np.array(rows)) if rows else obj.Q.zero()


def sd_basis(obj: FilteredBKModule) -> SDBasis:
    if not sd_check_criterion(obj):
        raise NotStronglyDivisible("strong divisibility criterion fails")
    divs = elementary_divisors(obj)
    basis = _greedy_basis(obj, divs)
    if basis is None or not la.span_equal(obj.F, basis_lattice(obj, basis), obj.fil[1]):
        raise NotStronglyDivisible("no adapted basis found")
    return basis


def graded_profile(obj: FilteredBKModule) -> dict:
    """Slot-1 jump multiplicities per component and slot-j codimensions."""
    f, d, p, e = obj.f, obj.d, obj.ring.p, obj.ring.e
    fil_dims = [[_component_dim(obj, fil_bar(obj, t), c) for t in range(p + 1)] for c in range(f)]
    gr = [[fil_dims[c][t] - (fil_dims[c][t - 1] if t else 0) for t in range(p + 1)] for c in range(f)]
    Q = obj.Q
    steps = []
    for c in range(f):
        row = []
        for j in range(2, e + 1):
            quot = Q.dim_component(obj.fil[j], c) - Q.dim_component(obj.fil[j - 1], c) + d
            row.append(quot)  # dim of F^j / u F^(j-1), i.e. Fil^1 of the (j-1)-th reduction
        steps.append(row)
    return {"fil_dims": fil_dims, "gr": gr, "fil1_steps": steps}


def hodge_type(obj: FilteredBKModule, check: bool = True) -> HodgeType:
    if check and not sd_check_criterion(obj):
        raise NotStronglyDivisible("Hodge type needs a strongly divisible object")
    prof = graded_profile(obj)
    d, e = obj.d, obj.ring.e
    rows = []
    for c in range(obj.f):
        slot1 = [t for t, n in enumerate(prof["gr"][c]) for _ in range(n)]
        row = [slot1]
        for j in range(2, e + 1):
            fil1 = prof["fil1_steps"][c][j - 2]
            row.append([1] * (d - fil1) + [0] * fil1)
        rows.append(row)
    return HodgeType(rows)


def _seq_standard(seq: ExactSequence):
    if not seq.is_standard():
        raise ValueError("only standard-form sequences (M -> M + P -> P) are supported")


def sub_quotient_sd(seq: ExactSequence) -> dict:
    mid = seq.middle
    mid_sd = sd_check_criterion(mid)
    report = {"middle_sd": mid_sd, "exact": is_exact(seq)}
    if not mid_sd:
        report.update({"sub_sd": None, "quotient_sd": None, "additive": None})
        return report
    sub_sd, quo_sd = sd_check_criterion(seq.sub), sd_check_criterion(seq.quotient)
    gm, gs, gq = (graded_profile(x) for x in (mid, seq.sub, seq.quotient))
    additive = all(
        gm[key][c][t] == gs[key][c][t] + gq[key][c][t]
        for key in ("gr", "fil1_steps")
        for c in range(mid.f)
        for t in range(len(gm[key][c]))
    )
    report.update({"sub_sd": sub_sd, "quotient_sd": quo_sd, "additive": additive,
                   "graded": {"middle": gm["gr"], "sub": gs["gr"], "quotient": gq["gr"]}})
    return report


@dataclass
class Splitting:
    t: np.ndarray  # (f, d_M, d_P, N): s(x) = (t x, x)
    W: np.ndarray  # (f, d_M, d_P, K): s(A_P y) = phi_N((W y, y))
    fil1_ok: bool
    phi_ok: bool


def _kappa(seq: ExactSequence, win: homs.Window) -> np.ndarray:
    """C A_P^{-1} = u^-N C B_P on the window, flattened."""
    Nobj, P, M = seq.middle, seq.quotient, seq.sub
    F, f, N = P.F, P.f, P.N
    dM = M.d
    L = win.hi + N
    C = poly.pad(Nobj.frob[:, :dM, dM:, :], L)
    B = P.binv(L)
    out = np.zeros((f, dM, P.d, win.W), dtype=np.int64)
    for c in range(f):
        prod = poly.mmul(F, C[c], B[c], L)
        out[c] = poly.pad(prod, win.hi + N)[..., win.lo + N: win.hi + N]
    return out.reshape(-1)


def graph_conditions(seq: ExactSequence, win: homs.Window, level: int):
    """Affine conditions on t (window win) for (t x, x) in F^level_N, x in G^level.

    Returns (matrix, constant): admissible t satisfy t . matrix + constant = 0.
    The window must start at -N so that every pole is inspected; poles beyond N fail.
    """
    Nobj, P, M = seq.middle, seq.quotient, seq.sub
    F, f, N = P.F, P.f, P.N
    dM, dP = M.d, P.d
    QN, QP, QM = Nobj.Q, P.Q, M.Q
    proj = QN.quotient_projector(Nobj.fil[level])
    nt = f * dM * dP * win.W
    mats, consts = [], []
    bot = min(win.lo, 0)
    for c, g in QP.generators(P.fil[level]):
        out = hom_apply(QP, QM, win.lo, win.W, c, g, bot)
        mats.append(out[:, :, : -bot].reshape(nt, -1))
        consts.append(np.zeros(out[:, :, : -bot].reshape(nt, -1).shape[1], dtype=np.int64))
        q = np.zeros((nt, f, Nobj.d, N), dtype=np.int64)
        q[:, c, :dM] = out[:, :, -bot:]
        mats.append(la.matmul(F, q.reshape(nt, -1), proj))
        x = np.zeros((1, f, Nobj.d, N), dtype=np.int64)
        x[0, c, dM:] = poly.pad(g, N)
        consts.append(la.matmul(F, x.reshape(1, -1), proj)[0])
    return np.concatenate(mats, axis=1), np.concatenate(consts)


def pole_free_conditions(P, M, win: homs.Window) -> np.ndarray:
    """Columns selecting the negative-degree coefficients."""
    n = -win.lo if win.lo < 0 else 0
    E = np.zeros((P.f, M.d, P.d, win.W, P.f, M.d, P.d, n), dtype=np.int64)
    for k in range(n):
        E[:, :, :, k, :, :, :, k] = np.eye(P.f * M.d * P.d, dtype=np.int64).reshape(
            P.f, M.d, P.d, P.f, M.d, P.d)
    return E.reshape(homs.nh(P, M, win.W), -1)


def _affine_solve(F, mat: np.ndarray, const: np.ndarray) -> np.ndarray | None:
    rhs = F.vneg(const) if F.m > 1 else (-const) % F.p
    return la.solve_left(F, mat, rhs)


def split_surjection(seq: ExactSequence, top: int | None = None) -> Splitting:
    """Section s(x) = (t x, x), t = C A_P^{-1} + Phi(W), with s(G^1) in F^1_N.

    t is returned modulo u^top (default N) and W modulo u^K with Phi(u^K) beyond top.
    """
    _seq_standard(seq)
    Nobj, P, M = seq.middle, seq.quotient, seq.sub
    if not sd_check_criterion(Nobj):
        raise NotStronglyDivisible("middle term is not strongly divisible")
    F, N, p = P.F, P.N, P.ring.p
    top = max(top or N, N)
    twin = homs.Window(-N, top + N)
    K = max(1, -(-(top + N) // p))
    wwin = homs.Window(0, K)
    Phi = homs.phi_matrix(P, M, wwin, twin)
    kappa = _kappa(seq, twin)
    G, g0 = graph_conditions(seq, twin, 1)
    Z = pole_free_conditions(P, M, twin)
    big = np.concatenate([G, Z], axis=1)
    const = np.concatenate([g0, np.zeros(Z.shape[1], dtype=np.int64)])
    # t = kappa + w Phi: (kappa + w Phi) big + const = 0
    c_total = la.matmul(F, kappa[None, :], big)[0]
    c_total = poly.padd(F, c_total, const)
    w = _affine_solve(F, la.matmul(F, Phi, big), c_total)
    if w is None:
        raise NotStronglyDivisible("no splitting compatible with F^1")
    t = poly.padd(F, kappa, la.matmul(F, w[None, :], Phi)[0])
    tarr = t.reshape(P.f, M.d, P.d, twin.W)[..., N:]
    warr = w.reshape(P.f, M.d, P.d, K)
    fil1_ok = not poly.padd(F, la.matmul(F, t[None, :], big)[0], const).any()
    phi_ok = _check_phi_compat(seq, tarr, warr)
    return Splitting(tarr, warr, fil1_ok, phi_ok)


def _check_phi_compat(seq: ExactSequence, t: np.ndarray, W: np.ndarray) -> bool:
    """t A_P = A_M phi(W) + C modulo u^N, i.e. s(A_P e_j) = phi_N(W e_j, e_j)."""
    Nobj, P, M = seq.middle, seq.quotient, seq.sub
    F, f, N, p = P.F, P.f, P.N, P.ring.p
    dM = M.d
    AP, AM = P.frob_series(N), M.frob_series(N)
    C = poly.pad(Nobj.frob[:, :dM, dM:, :], N)
    for c in range(f):
        lhs = poly.mmul(F, poly.pad(t[c], N), AP[c], N)
        rhs = poly.padd(F, poly.mmul(F, AM[c], poly.subst_p(W[(c + 1) % f], p, N), N), C[c])
        if not np.array_equal(lhs, rhs):
            return False
    return True
