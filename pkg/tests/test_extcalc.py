import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bkfilt import linalg as la
from bkfilt.coeffs import CoefficientRing
from bkfilt.extcalc import (Complex, Cocycle, HypothesisFailed, NoStabilization, chi_formula, cocycle_difference_in_image,
                            cocycle_from_extension, contraction_level, d_sd, extension_from_cocycle, h0_dim,
                            h0_valuations, h1_dim, hom_k_profile, random_cocycle, valuation_bound, verify_extdim,
                            verify_niceform)
from bkfilt.families import rank_one, unit_object
from bkfilt.generate import gen_random_sd, gen_random_valid
from bkfilt.hodge import d_pair
from bkfilt.modf import direct_sum, standard_sequence, validate, is_exact
from bkfilt.sd import hodge_type

R21 = CoefficientRing(2, 1, 1, 1)
R32 = CoefficientRing(3, 1, 1, 2)
GRID = [CoefficientRing(p, f, f, e) for p in (2, 3) for f in (1, 2) for e in (1, 2, 3)]


def test_end_rank_one_p2():
    R = rank_one(R21, 1)
    assert h0_dim(R, R) == 1
    assert h1_dim(R, R).value == 1
    assert chi_formula(R, R) == 0


def test_rank_one_pairs_p3_e2():
    a, b = rank_one(R32, 1, [3]), rank_one(R32, 3, [3])
    assert (h0_dim(a, a), h1_dim(a, a).value) == (1, 1)
    assert (h0_dim(b, a), h1_dim(b, a).value) == (1, 2)
    rep = verify_niceform(b, a)
    assert rep["d_mu"] == 1 and rep["equal"] and rep["chi_formula"] == 1


def test_rank_one_divisibility_obstruction():
    R = CoefficientRing(3, 1, 1, 1)
    # (p - 1) = 2 does not divide 1 - 0
    assert h0_dim(rank_one(R, 0), rank_one(R, 1)) == 0
    assert h0_dim(rank_one(R, 1), rank_one(R, 0)) == 0


def test_trivial_pair():
    for ring in GRID:
        u = unit_object(ring)
        prof = hom_k_profile(u, u)
        assert prof.total == ring.f and prof.hypothesis
        assert h0_dim(u, u) >= 1


def test_bounds():
    assert contraction_level(2, 2) == 3 and valuation_bound(2, 2) == 2
    assert contraction_level(4, 3) == 4 and valuation_bound(4, 3) == 2


def test_no_stabilization_is_reported(monkeypatch):
    calls = iter(range(100))
    monkeypatch.setattr(Complex, "h1", property(lambda self: next(calls)))
    R = rank_one(R21, 1)
    with pytest.raises(NoStabilization):
        h1_dim(R, R, max_doublings=2)


def _pair(ring, seed, sd=True, d=(1, 1)):
    rng = np.random.default_rng(seed)
    gen = gen_random_sd if sd else gen_random_valid
    return gen(ring, d[0], rng), gen(ring, d[1], rng), rng


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 2 ** 32 - 1))
def test_kernel_dim_matches_fixed_points(ring, seed):
    P, M, _ = _pair(ring, seed, sd=False)
    res = h1_dim(P, M)
    assert res.h0_kernel == h0_dim(P, M)
    v = h0_valuations(P, M)
    assert v["ok"] and v["dim"] == res.h0_kernel


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 2 ** 32 - 1))
def test_high_degree_cocycles_are_coboundaries(ring, seed):
    P, M, rng = _pair(ring, seed, sd=False)
    L0 = contraction_level(ring.N, ring.p)
    cx = Complex(P, M, L0 + ring.N)
    g = np.zeros((cx.nslots, ring.f, M.d, P.d, cx.slot.W), dtype=np.int64)
    start = L0 - cx.slot.lo
    g[..., start:] = rng.integers(0, ring.F.q, size=g[..., start:].shape)
    g = g.reshape(-1)
    assert cx.is_cocycle(g) and cx.in_image(g)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 2 ** 32 - 1))
def test_coboundaries_are_cocycles(ring, seed):
    P, M, rng = _pair(ring, seed, sd=False)
    top = contraction_level(ring.N, ring.p)
    cx = Complex(P, M, top)
    if len(cx.c0_basis) == 0:
        return
    coef = rng.integers(0, ring.F.q, size=(1, len(cx.c0_basis)), dtype=np.int64)
    vec = la.matmul(ring.F, coef, cx.c0_basis)[0]
    nH = cx.phi.shape[0]
    nh = vec[nH:].size // max(ring.e - 2, 1) if ring.e > 2 else 0
    H = vec[:nH]
    hs = [vec[nH + i * nh: nH + (i + 1) * nh] for i in range(ring.e - 2)]
    g = d_sd(P, M, H, hs, top)
    flat = cx.cocycle_vector(g.slots, g.lo)
    assert cx.is_cocycle(flat) and cx.in_image(flat)
    zero = d_sd(P, M, np.zeros_like(H), [np.zeros_like(h) for h in hs], top)
    assert not any(s.any() for s in zero.slots)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 2 ** 32 - 1))
def test_chi_additive(ring, seed):
    rng = np.random.default_rng(seed)
    P, P2, M = (gen_random_sd(ring, 1, rng) for _ in range(3))
    S = direct_sum(P, P2)
    assert chi_formula(S, M) == chi_formula(P, M) + chi_formula(P2, M)
    assert chi_formula(S, M) == d_pair(hodge_type(S), hodge_type(M))


def test_hypothesis_failure_raises():
    prof = hom_k_profile(*_pair(R21, 0)[:2])
    prof.hypothesis = False
    P, M, _ = _pair(R21, 0)
    with pytest.raises(HypothesisFailed):
        chi_formula(P, M, prof)


@pytest.mark.parametrize("ring", GRID[::2])
def test_extension_round_trip(ring):
    P, M, rng = _pair(ring, 4)
    g = random_cocycle(P, M, rng)
    Nobj, seq = extension_from_cocycle(P, M, g)
    assert validate(Nobj).ok and is_exact(seq)
    assert cocycle_difference_in_image(P, M, cocycle_from_extension(seq), g)


def test_zero_cocycle_gives_direct_sum():
    P, M, _ = _pair(R32, 9)
    z = Cocycle([np.zeros((1, M.d, P.d, 2 * R32.N), dtype=np.int64)], -R32.N)
    Nobj, seq = extension_from_cocycle(P, M, z)
    assert not Nobj.frob[:, : M.d, M.d:].any()
    split = standard_sequence(M, direct_sum(M, P), P)
    g = cocycle_from_extension(split)
    assert cocycle_difference_in_image(P, M, g, z)


def test_nonsplit_rank_one_extension():
    P, M = rank_one(R21, 1), rank_one(R21, 1)
    cx = Complex(P, M, contraction_level(R21.N, R21.p))
    assert cx.h1 == 1
    rng = np.random.default_rng(1)
    while True:
        g = random_cocycle(P, M, rng)
        if not cx.in_image(cx.cocycle_vector(g.slots, g.lo)):
            break
    Nobj, seq = extension_from_cocycle(P, M, g)
    assert is_exact(seq) and validate(Nobj).ok


def test_reports():
    P, M, _ = _pair(CoefficientRing(2, 2, 2, 2), 13, d=(1, 2))
    a, b = verify_niceform(P, M), verify_extdim(P, M)
    assert a["equal"] and b["equal"] and a["h1"] == b["h1"]
