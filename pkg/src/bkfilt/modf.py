"""Objects and morphisms of the category of filtered mod-p Breuil-Kisin modules.

Conventions:

* ``frob`` has shape (f, d, d, D): component c of the Frobenius matrix, with
  phi(sum_j a_j e_j) = sum_j phi(a_j) A[:, j] and phi(a)^(c) = a^(c+1)(u^p).
* ``fil[i]`` is a basis (rows) of the image of F^i in Q = M / u^N M, N = e + p - 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield
from functools import cached_property

import numpy as np

from . import linalg as la
from . import poly
from .coeffs import CoefficientRing
from .lattice import QSpace


class NotFree(Exception):
    pass


class ContextMismatch(ValueError):
    pass


def _to_int_array(x) -> np.ndarray:
    return np.asarray(x, dtype=np.int64)


def q_map(F, X: np.ndarray, src: QSpace, tgt: QSpace, semilinear_shift: int = 0) -> np.ndarray:
    """Matrix of the S-linear map with component matrices X (f, d_tgt, d_src, K) on Q."""
    f, N = src.f, src.N
    rows = np.zeros((f, src.d, N, f, tgt.d, N), dtype=np.int64)
    K = X.shape[-1]
    for c in range(f):
        for b in range(src.d):
            col = poly.pad(X[c, :, b, :], N)
            for k in range(N):
                rows[c, b, k, c, :, k:] = col[:, : N - k]
    return rows.reshape(src.dim, tgt.dim)


@dataclass(frozen=True, eq=False)
class FilteredBKModule:
    ring: CoefficientRing
    d: int
    frob: np.ndarray
    fil: tuple = dfield(default=())

    # construction

    @classmethod
    def build(cls, ring: CoefficientRing, frob, middle=()) -> "FilteredBKModule":
        """Object with F^1..F^{e-1} given by ``middle``; F^0 and F^e are determined."""
        frob = _to_int_array(frob)
        if frob.ndim == 3:
            frob = frob[None]
        d = frob.shape[1]
        obj = cls(ring, d, frob, ())
        Q = obj.Q
        middle = list(middle)
        if len(middle) != ring.e - 1:
            raise ValueError(f"expected {ring.e - 1} intermediate filtration steps, got {len(middle)}")
        fil = [obj.mphi_Q] + [Q.basis(S) for S in middle] + [Q.zero()]
        object.__setattr__(obj, "fil", tuple(fil))
        return obj

    @classmethod
    def from_lattices(cls, ring: CoefficientRing, frob, full_chain) -> "FilteredBKModule":
        """Take all of F^0..F^e as given (used by validation tests)."""
        frob = _to_int_array(frob)
        if frob.ndim == 3:
            frob = frob[None]
        obj = cls(ring, frob.shape[1], frob, ())
        object.__setattr__(obj, "fil", tuple(obj.Q.basis(S) for S in full_chain))
        return obj

    # basic data

    @property
    def F(self):
        return self.ring.F

    @property
    def N(self) -> int:
        return self.ring.N

    @property
    def f(self) -> int:
        return self.ring.f

    @cached_property
    def Q(self) -> QSpace:
        return QSpace(self.F, self.ring.f, self.d, self.N)

    def frob_series(self, K: int) -> np.ndarray:
        return poly.pad(self.frob, K)

    @cached_property
    def mphi_Q(self) -> np.ndarray:
        """Image of M^phi = S-span of the columns of the Frobenius matrix."""
        if self.d == 0:
            return self.Q.zero()
        Q = self.Q
        A = self.frob_series(Q.N)
        return Q.basis(q_map(self.F, A, Q, Q))

    def binv(self, K: int) -> np.ndarray:
        """u^N A^{-1} per component, shape (f, d, d, K)."""
        cache = self.__dict__.setdefault("_binv", {})
        if K not in cache:
            cache[K] = np.stack([poly.scaled_inverse(self.F, self.frob[c], self.N, K) for c in range(self.f)])
        return cache[K]

    def phi_image_rows(self, K: int, t: int = 0) -> np.ndarray:
        """Rows: u^t A phi(a) mod u^N for a running over (c', b, k), k < K."""
        f, d, N, p = self.f, self.d, self.N, self.ring.p
        A = self.frob_series(N)
        out = np.zeros((f, d, K, f, d, N), dtype=np.int64)
        for cp in range(f):
            c = (cp - 1) % f
            for b in range(d):
                col = A[c, :, b, :]
                for k in range(K):
                    s = p * k + t
                    if s >= N:
                        break
                    out[cp, b, k, c, :, s:] = col[:, : N - s]
        return out.reshape(f * d * K, f * d * N)

    @property
    def colength(self) -> int:
        return self.Q.dim - len(self.mphi_Q)

    def det_valuations(self) -> list[int]:
        vals = []
        for c in range(self.f):
            det, _ = poly.mdet_adj(self.F, self.frob[c])
            v = poly.val(det)
            vals.append(-1 if v is None else v)
        return vals

    # serialization

    def to_json(self) -> dict:
        F = self.F
        frob = []
        for i in range(self.d):
            row = []
            for j in range(self.d):
                terms = []
                for n in range(self.frob.shape[-1]):
                    comps = self.frob[:, i, j, n]
                    if comps.any():
                        terms.append([n, [F.to_str(int(a)) for a in comps]])
                row.append(terms)
            frob.append(row)
        chain = [[[F.to_str(int(a)) for a in r] for r in self.fil[i]] for i in range(self.ring.e, -1, -1)]
        return {"ring": self.ring.to_json(), "rank": self.d, "frob": frob, "chain": chain}

    @classmethod
    def from_json(cls, data: dict) -> "FilteredBKModule":
        ring = CoefficientRing.from_json(data["ring"])
        F = ring.F
        d = int(data["rank"])
        D = 1
        for row in data["frob"]:
            for terms in row:
                for n, _ in terms:
                    D = max(D, int(n) + 1)
        frob = np.zeros((ring.f, d, d, D), dtype=np.int64)
        for i, row in enumerate(data["frob"]):
            for j, terms in enumerate(row):
                for n, comps in terms:
                    frob[:, i, j, int(n)] = [F.from_str(s) for s in comps]
        Qdim = ring.f * d * ring.N
        chain = data["chain"]
        if len(chain) != ring.e + 1:
            raise ValueError(f"chain must list F^e..F^0 ({ring.e + 1} entries), got {len(chain)}")
        mats = []
        for m in reversed(chain):
            rows = [[F.from_str(s) for s in r] for r in m]
            if any(len(r) != Qdim for r in rows):
                raise ValueError(f"chain rows must have {Qdim} Q-coordinates")
            mats.append(np.array(rows, dtype=np.int64).reshape(-1, Qdim))
        return cls.from_lattices(ring, frob, mats)

    def __repr__(self) -> str:
        return f"FilteredBKModule(p={self.ring.p}, f={self.f}, e={self.ring.e}, d={self.d})"


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"valid": self.ok, "violations": list(self.violations)}


def validate(obj: FilteredBKModule) -> ValidationReport:
    v: list[str] = []
    if obj.d == 0:
        return ValidationReport([])
    F, Q, e, p = obj.F, obj.Q, obj.ring.e, obj.ring.p
    if obj.frob.shape[:3] != (obj.f, obj.d, obj.d):
        return ValidationReport(["frob shape does not match (f, d, d)"])
    if np.any(obj.frob < 0) or np.any(obj.frob >= F.q):
        return ValidationReport(["frob entries are not field elements"])
    try:
        obj.binv(1)
    except ZeroDivisionError:
        v.append("cokernel: Frobenius matrix is singular")
    except ValueError:
        v.append("cokernel: u^(e+p-1) does not kill M / M^phi")
    if len(obj.fil) != e + 1:
        return ValidationReport(v + [f"chain must have {e + 1} steps"])
    for i, S in enumerate(obj.fil):
        if S.size and (np.any(S < 0) or np.any(S >= F.q)):
            v.append(f"F^{i}: entries are not field elements")
            return ValidationReport(v)
        if not Q.is_component_stable(S):
            v.append(f"F^{i}: not stable under k (x) F")
        if not Q.is_u_stable(S):
            v.append(f"F^{i}: not u-stable")
    if len(obj.fil[e]):
        v.append(f"F^{e}: must equal u^(e+p-1) M (zero in Q)")
    if not la.span_equal(F, obj.fil[0], obj.mphi_Q):
        v.append("F^0: must equal M^phi")
    f0, f1 = obj.fil[0], obj.fil[1]
    if e >= 1:
        if not la.span_contains(F, f1, Q.ushift(f0, p)):
            v.append("F^1: does not contain u^p F^0")
        if not la.span_contains(F, f0, f1):
            v.append("F^1: not contained in F^0")
    for i in range(2, e + 1):
        if not la.span_contains(F, obj.fil[i], Q.ushift(obj.fil[i - 1])):
            v.append(f"F^{i}: does not contain u F^{i - 1}")
        if not la.span_contains(F, obj.fil[i - 1], obj.fil[i]):
            v.append(f"F^{i}: not contained in F^{i - 1}")
    return ValidationReport(v)


def frobenius_image(obj: FilteredBKModule) -> dict:
    """M^phi (column lattice, Q-image) and phi(M) (its F-span inside the truncation)."""
    K = -(-obj.N // obj.ring.p)
    return {
        "mphi_columns": obj.frob,
        "mphi_Q": obj.mphi_Q,
        "phiM_Q": obj.Q.basis(obj.phi_image_rows(K)) if obj.d else obj.Q.zero(),
        "colength": obj.colength,
    }


def _embed_rows(S: np.ndarray, Qsrc: QSpace, Qtgt: QSpace, offset: int) -> np.ndarray:
    if Qsrc.dim == 0 or S.size == 0:
        return np.zeros((0, Qtgt.dim), dtype=np.int64)
    a = Qsrc.unflat(S.reshape(-1, Qsrc.dim))
    out = np.zeros((a.shape[0], Qtgt.f, Qtgt.d, Qtgt.N), dtype=np.int64)
    out[:, :, offset: offset + Qsrc.d] = a
    return out.reshape(-1, Qtgt.dim)


def block_frob(A: np.ndarray, B: np.ndarray, C: np.ndarray | None = None) -> np.ndarray:
    f, da, _, Da = A.shape
    db, Db = B.shape[1], B.shape[3]
    D = max(Da, Db, 1 if C is None else C.shape[-1])
    out = np.zeros((f, da + db, da + db, D), dtype=np.int64)
    out[:, :da, :da, :Da] = A
    out[:, da:, da:, :Db] = B
    if C is not None:
        out[:, :da, da:, : C.shape[-1]] = C
    return out


def direct_sum(a: FilteredBKModule, b: FilteredBKModule) -> FilteredBKModule:
    if a.ring != b.ring:
        raise ContextMismatch("direct sum needs a common ring context")
    frob = block_frob(a.frob, b.frob)
    out = FilteredBKModule(a.ring, a.d + b.d, frob, ())
    Q = out.Q
    fil = []
    for Sa, Sb in zip(a.fil, b.fil):
        fil.append(Q.basis(np.vstack([_embed_rows(Sa, a.Q, Q, 0), _embed_rows(Sb, b.Q, Q, a.d)])))
    object.__setattr__(out, "fil", tuple(fil))
    return out


def zero_object(ring: CoefficientRing) -> FilteredBKModule:
    return FilteredBKModule.build(ring, np.zeros((ring.f, 0, 0, 1), dtype=np.int64), [np.zeros((0, 0))] * (ring.e - 1))


# morphisms

@dataclass(frozen=True, eq=False)
class ModFMorphism:
    source: FilteredBKModule
    target: FilteredBKModule
    matrix: np.ndarray  # (f, d_target, d_source, K), pole-free

    def q_matrix(self) -> np.ndarray:
        return q_map(self.source.F, self.matrix, self.source.Q, self.target.Q)

    def equivariance_defect(self, K: int | None = None) -> np.ndarray:
        """H A_src - A_tgt phi(H) modulo u^K, per component."""
        src, tgt = self.source, self.target
        F, p = src.F, src.ring.p
        K = K or 2 * src.N + self.matrix.shape[-1]
        H = poly.pad(self.matrix, K)
        out = np.zeros((src.f, tgt.d, src.d, K), dtype=np.int64)
        for c in range(src.f):
            lhs = poly.mmul(F, H[c], src.frob_series(K)[c], K)
            phiH = poly.subst_p(H[(c + 1) % src.f], p, K)
            rhs = poly.mmul(F, tgt.frob_series(K)[c], phiH, K)
            out[c] = poly.psub(F, lhs, rhs)
        return out

    def is_equivariant(self, K: int | None = None) -> bool:
        return not self.equivariance_defect(K).any()

    def preserves_filtrations(self) -> bool:
        M = self.q_matrix()
        F = self.source.F
        for S, T in zip(self.source.fil, self.target.fil):
            if len(S) and not la.span_contains(F, T, la.matmul(F, S, M)):
                return False
        return True

    def is_morphism(self) -> bool:
        return self.is_equivariant() and self.preserves_filtrations()

    def compose(self, other: "ModFMorphism") -> "ModFMorphism":
        """self ∘ other."""
        F = self.source.F
        K = max(self.matrix.shape[-1], other.matrix.shape[-1])
        mat = np.stack([poly.mmul(F, poly.pad(self.matrix[c], K), poly.pad(other.matrix[c], K), K)
                        for c in range(self.source.f)])
        return ModFMorphism(other.source, self.target, mat)


def identity(obj: FilteredBKModule) -> ModFMorphism:
    I = np.zeros((obj.f, obj.d, obj.d, 1), dtype=np.int64)
    for c in range(obj.f):
        I[c, :, :, 0] = np.eye(obj.d, dtype=np.int64)
    return ModFMorphism(obj, obj, I)


def _const_block(f: int, rows: int, cols: int, r0: int, c0: int, n: int) -> np.ndarray:
    X = np.zeros((f, rows, cols, 1), dtype=np.int64)
    for c in range(f):
        for t in range(n):
            X[c, r0 + t, c0 + t, 0] = 1
    return X


@dataclass(frozen=True, eq=False)
class ExactSequence:
    iota: ModFMorphism
    pi: ModFMorphism

    @property
    def sub(self) -> FilteredBKModule:
        return self.iota.source

    @property
    def middle(self) -> FilteredBKModule:
        return self.iota.target

    @property
    def quotient(self) -> FilteredBKModule:
        return self.pi.target

    def is_standard(self) -> bool:
        M, N_, P = self.sub, self.middle, self.quotient
        if N_.d != M.d + P.d:
            return False
        i_std = _const_block(M.f, N_.d, M.d, 0, 0, M.d)
        p_std = _const_block(M.f, P.d, N_.d, 0, M.d, P.d)
        return (np.array_equal(poly.trim_all(self.iota.matrix), poly.trim_all(i_std))
                and np.array_equal(poly.trim_all(self.pi.matrix), poly.trim_all(p_std)))


def standard_sequence(M: FilteredBKModule, Nobj: FilteredBKModule, P: FilteredBKModule) -> ExactSequence:
    f = M.f
    return ExactSequence(
        ModFMorphism(M, Nobj, _const_block(f, Nobj.d, M.d, 0, 0, M.d)),
        ModFMorphism(Nobj, P, _const_block(f, P.d, Nobj.d, 0, M.d, P.d)),
    )


def is_exact(seq: ExactSequence) -> bool:
    iota, pi = seq.iota, seq.pi
    M, Nobj, P = seq.sub, seq.middle, seq.quotient
    F = M.F
    if Nobj.d != M.d + P.d or M.ring != Nobj.ring or P.ring != Nobj.ring:
        return False
    # saturation: iota injective and pi surjective modulo u, pi iota = 0
    for c in range(M.f):
        if la.rank(F, poly.pad(iota.matrix[c], 1)[:, :, 0]) != M.d:
            return False
        if la.rank(F, poly.pad(pi.matrix[c], 1)[:, :, 0]) != P.d:
            return False
    comp = pi.compose(iota)
    if comp.matrix.any():
        return False
    Iq, Pq = iota.q_matrix(), pi.q_matrix()
    for i in range(M.ring.e + 1):
        E, Fi, G = M.fil[i], Nobj.fil[i], P.fil[i]
        image = la.matmul(F, Fi, Pq) if len(Fi) else P.Q.zero()
        if not la.span_equal(F, image, G):
            return False
        # iota^{-1}(F^i) = E^i
        proj = Nobj.Q.quotient_projector(Fi)
        pre = la.left_kernel(F, la.matmul(F, Iq, proj)) if M.Q.dim else M.Q.zero()
        if not la.span_equal(F, pre, E):
            return False
    return True


def extension_object(M: FilteredBKModule, P: FilteredBKModule, C: np.ndarray, middle) -> FilteredBKModule:
    """M ⊕ P with Frobenius [[A_M, C], [0, A_P]] and given F^1..F^{e-1}."""
    frob = block_frob(M.frob, P.frob, C)
    return FilteredBKModule.build(M.ring, frob, middle)


def _upper_block(Nobj: FilteredBKModule, dM: int) -> np.ndarray:
    return Nobj.frob[:, :dM, dM:, :]


def pullback(f_mor: ModFMorphism, g_mor: ModFMorphism) -> tuple[FilteredBKModule, ModFMorphism, ModFMorphism]:
    """Kernel of f - g for g the projection of a standard-form extension M ⊕ P -> P.

    Returns (object, projection to source of f, projection to source of g).
    """
    Nobj, A = g_mor.source, f_mor.source
    P = g_mor.target
    if f_mor.target is not P and f_mor.target.d != P.d:
        raise ContextMismatch("f and g must share a target")
    dM = Nobj.d - P.d
    p_std = _const_block(Nobj.f, P.d, Nobj.d, 0, dM, P.d)
    if not np.array_equal(poly.trim_all(g_mor.matrix), poly.trim_all(p_std)):
        raise NotFree("pullback is only certified along a standard extension projection")
    F, p, f = Nobj.F, Nobj.ring.p, Nobj.f
    Fm = f_mor.matrix
    C = _upper_block(Nobj, dM)
    D = C.shape[-1] + p * Fm.shape[-1]
    Cn = np.stack([poly.mmul(F, poly.pad(C[c], D), poly.subst_p(Fm[(c + 1) % f], p, D), D) for c in range(f)])
    Mfrob = Nobj.frob[:, :dM, :dM, :]
    out = FilteredBKModule(Nobj.ring, dM + A.d, block_frob(Mfrob, A.frob, Cn), ())
    Qo, Qn, Qa = out.Q, Nobj.Q, A.Q
    # (m, a) -> ((m, f a), a)
    X = np.zeros((f, Nobj.d, out.d, Fm.shape[-1]), dtype=np.int64)
    X[:, :dM, :dM, 0] = np.eye(dM, dtype=np.int64)
    X[:, dM:, dM:, :] = Fm
    Y = _const_block(f, A.d, out.d, 0, dM, A.d)
    mapN, mapA = q_map(F, X, Qo, Qn), q_map(F, Y, Qo, Qa)
    fil = []
    for i in range(Nobj.ring.e + 1):
        big = np.concatenate([la.matmul(F, mapN, Qn.quotient_projector(Nobj.fil[i])),
                              la.matmul(F, mapA, Qa.quotient_projector(A.fil[i]))], axis=1)
        fil.append(Qo.basis(la.left_kernel(F, big)))
    fil[0] = out.mphi_Q
    object.__setattr__(out, "fil", tuple(fil))
    return out, ModFMorphism(out, A, Y), ModFMorphism(out, Nobj, X)


def pushout(f_mor: ModFMorphism, g_mor: ModFMorphism) -> tuple[FilteredBKModule, ModFMorphism, ModFMorphism]:
    """Cokernel of (f, -g) for g the inclusion M -> M ⊕ P of a standard-form extension."""
    Nobj, B = g_mor.target, f_mor.target
    M = g_mor.source
    dM = M.d
    i_std = _const_block(Nobj.f, Nobj.d, dM, 0, 0, dM)
    if not np.array_equal(poly.trim_all(g_mor.matrix), poly.trim_all(i_std)):
        raise NotFree("pushout is only certified along a standard extension inclusion")
    F, f = Nobj.F, Nobj.f
    G = f_mor.matrix
    C = _upper_block(Nobj, dM)
    D = C.shape[-1] + G.shape[-1]
    Cn = np.stack([poly.mmul(F, poly.pad(G[c], D), poly.pad(C[c], D), D) for c in range(f)])
    Pfrob = Nobj.frob[:, dM:, dM:, :]
    dP = Nobj.d - dM
    out = FilteredBKModule(Nobj.ring, B.d + dP, block_frob(B.frob, Pfrob, Cn), ())
    Qo = out.Q
    # (m, x) -> (G m, x) and b -> (b, 0)
    X = np.zeros((f, out.d, Nobj.d, G.shape[-1]), dtype=np.int64)
    X[:, : B.d, :dM, :] = G
    X[:, B.d:, dM:, 0] = np.eye(dP, dtype=np.int64)
    Y = _const_block(f, out.d, B.d, 0, 0, B.d)
    mapN, mapB = q_map(F, X, Nobj.Q, Qo), q_map(F, Y, B.Q, Qo)
    fil = []
    for i in range(Nobj.ring.e + 1):
        parts = []
        if len(Nobj.fil[i]):
            parts.append(la.matmul(F, Nobj.fil[i], mapN))
        if len(B.fil[i]):
            parts.append(la.matmul(F, B.fil[i], mapB))
        fil.append(Qo.basis(np.vstack(parts)) if parts else Qo.zero())
    fil[0] = out.mphi_Q
    object.__setattr__(out, "fil", tuple(fil))
    return out, ModFMorphism(B, out, Y), ModFMorphism(Nobj, out, X)
