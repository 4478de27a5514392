import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bkfilt.coeffs import CoefficientRing
from bkfilt.extcalc import extension_from_cocycle, random_cocycle
from bkfilt.families import power_subspace, rank_one, unit_object
from bkfilt.generate import gen_random_sd, gen_random_valid
from bkfilt.modf import (ContextMismatch, FilteredBKModule, ModFMorphism, NotFree, direct_sum, frobenius_image,
                         identity, is_exact, pullback, pushout, standard_sequence, validate, zero_object)
from bkfilt import linalg as la

R21 = CoefficientRing(2, 1, 1, 1)
GRID = [CoefficientRing(p, f, f, e) for p in (2, 3) for f in (1, 2) for e in (1, 2, 3)]


def _u_line(ring, r):
    frob = np.zeros((1, 1, 1, r + 1), dtype=np.int64)
    frob[0, 0, 0, r] = 1
    return frob


def test_validate_examples():
    frob = _u_line(R21, 1)
    base = FilteredBKModule(R21, 1, frob, ())
    Q = base.Q
    good = FilteredBKModule.from_lattices(R21, frob, [base.mphi_Q, Q.zero()])
    # N = 2 for (p, e) = (2, 1), so u^2 M is already zero in Q
    assert validate(good).ok
    bad = FilteredBKModule.from_lattices(R21, frob, [base.mphi_Q, power_subspace(Q, 0)])
    rep = validate(bad)
    assert not rep.ok and any("F^1" in s for s in rep.violations)
    for ring in GRID:
        assert validate(unit_object(ring, 2)).ok


def test_singular_frobenius_rejected():
    frob = np.zeros((1, 1, 1, 1), dtype=np.int64)
    obj = FilteredBKModule(R21, 1, frob, ())
    assert not validate(FilteredBKModule.from_lattices(R21, frob, [obj.Q.zero(), obj.Q.zero()])).ok


@pytest.mark.parametrize("ring", GRID[:6])
def test_rank_one_colength(ring):
    for r in range(ring.N + 1):
        obj = rank_one(ring, r, [min(ring.N, r + ring.p + j) for j in range(ring.e - 1)])
        img = frobenius_image(obj)
        assert img["colength"] == r * ring.f
        assert la.rank(ring.F, img["mphi_Q"]) == obj.Q.dim - r * ring.f


def test_diagonal_frobenius_image():
    ring = CoefficientRing(3, 1, 1, 1)
    frob = np.zeros((1, 2, 2, 3), dtype=np.int64)
    frob[0, 0, 0, 1] = frob[0, 1, 1, 2] = 1
    obj = FilteredBKModule.build(ring, frob, [])
    assert obj.det_valuations() == [3]
    assert obj.colength == 3


def test_zero_object_and_sums():
    ring = CoefficientRing(2, 2, 2, 2)
    z = zero_object(ring)
    assert validate(z).ok and z.d == 0
    a = unit_object(ring, 1)
    s = direct_sum(z, a)
    assert s.d == 1 and np.array_equal(s.frob, a.frob)
    with pytest.raises(ContextMismatch):
        direct_sum(a, unit_object(CoefficientRing(2, 2, 2, 1)))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(GRID), st.integers(1, 2), st.integers(0, 2 ** 32 - 1))
def test_random_objects_invariants(ring, d, seed):
    rng = np.random.default_rng(seed)
    a, b = gen_random_valid(ring, d, rng), gen_random_sd(ring, 1, rng)
    for x in (a, b):
        assert validate(x).ok
        assert x.colength == sum(x.det_valuations())
        assert 0 <= x.colength <= x.Q.dim
        assert x.Q.ushift(x.Q.basis(np.eye(x.Q.dim, dtype=np.int64)), x.N).size == 0
    s = direct_sum(a, b)
    assert validate(s).ok and s.d == a.d + b.d
    assert s.colength == a.colength + b.colength
    assert is_exact(standard_sequence(a, s, b))


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 2 ** 32 - 1))
def test_json_round_trip(ring, seed):
    obj = gen_random_valid(ring, 2, np.random.default_rng(seed))
    back = FilteredBKModule.from_json(obj.to_json())
    assert back.ring == obj.ring and np.array_equal(back.frob, obj.frob)
    assert all(la.span_equal(ring.F, x, y) for x, y in zip(back.fil, obj.fil))


def test_identity_and_composition():
    rng = np.random.default_rng(5)
    obj = gen_random_valid(CoefficientRing(3, 2, 2, 2), 2, rng)
    i = identity(obj)
    assert i.is_morphism()
    assert np.array_equal(i.compose(i).matrix, i.matrix)


def test_non_injective_sequence_not_exact():
    ring = CoefficientRing(2, 1, 1, 2)
    a = unit_object(ring)
    s = direct_sum(a, a)
    seq = standard_sequence(a, s, a)
    broken = ModFMorphism(a, s, np.zeros_like(seq.iota.matrix))
    assert not is_exact(type(seq)(broken, seq.pi))


def _extension(ring, seed):
    rng = np.random.default_rng(seed)
    P, M = gen_random_sd(ring, 1, rng), gen_random_sd(ring, 1, rng)
    g = random_cocycle(P, M, rng)
    return extension_from_cocycle(P, M, g)


@pytest.mark.parametrize("ring", [CoefficientRing(2, 1, 1, 2), CoefficientRing(3, 1, 1, 1), CoefficientRing(2, 2, 2, 3)])
def test_pullback_pushout(ring):
    Nobj, seq = _extension(ring, 11)
    M, P = seq.sub, seq.quotient
    assert validate(Nobj).ok and is_exact(seq)
    # along identities the constructions return the extension itself
    out, to_a, to_n = pullback(identity(P), seq.pi)
    assert np.array_equal(out.frob[..., : Nobj.frob.shape[-1]], Nobj.frob)
    assert validate(out).ok and to_a.is_morphism() and to_n.is_morphism()
    assert is_exact(standard_sequence(M, out, P))
    out2, from_b, from_n = pushout(identity(M), seq.iota)
    assert validate(out2).ok and from_b.is_morphism() and from_n.is_morphism()
    assert is_exact(standard_sequence(M, out2, P))
    # along zero maps the extension splits
    zp = ModFMorphism(P, P, np.zeros((ring.f, P.d, P.d, 1), dtype=np.int64))
    split, _, _ = pullback(zp, seq.pi)
    assert not split.frob[:, : M.d, M.d:].any()
    with pytest.raises(NotFree):
        pullback(identity(P), ModFMorphism(Nobj, P, np.zeros_like(seq.pi.matrix)))
