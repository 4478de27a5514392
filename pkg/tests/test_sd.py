import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bkfilt.coeffs import CoefficientRing
from bkfilt.extcalc import extension_from_cocycle, random_cocycle
from bkfilt.families import rank_one, rank_one_family, unit_object
from bkfilt.generate import gen_random_sd, gen_random_valid
from bkfilt.hodge import HodgeType
from bkfilt.modf import FilteredBKModule, direct_sum, standard_sequence
from bkfilt.sd import (NotStronglyDivisible, basis_lattice, elementary_divisors, graded_profile, hodge_type,
                       sd_basis, sd_check_criterion, sd_check_definition, split_surjection, sub_quotient_sd)
from bkfilt import linalg as la

from oracles import literal_sd

# rank 2, p = 2, e = 2 object with no adapted basis (no basis exists by the literal search)
NON_SD = {"ring": {"p": 2, "f": 1, "m": 1, "e": 2}, "rank": 2,
          "frob": [[[[1, ["1"]], [2, ["1"]], [3, ["1"]]], [[0, ["1"]], [1, ["1"]]]], [[[2, ["1"]]], []]],
          "chain": [[], [["0", "0", "1", "0", "0", "0"], ["0", "0", "0", "0", "0", "1"]],
                    [["1", "0", "0", "0", "0", "0"], ["0", "1", "0", "0", "0", "0"],
                     ["0", "0", "1", "0", "0", "0"], ["0", "0", "0", "0", "0", "1"]]]}


def test_non_sd_example():
    obj = FilteredBKModule.from_json(NON_SD)
    assert literal_sd(obj) is False
    assert not sd_check_criterion(obj) and not sd_check_definition(obj)
    with pytest.raises(NotStronglyDivisible):
        sd_basis(obj)
    with pytest.raises(NotStronglyDivisible):
        hodge_type(obj)


@pytest.mark.parametrize("p,e", [(2, 1), (2, 2), (3, 2), (3, 1)])
def test_rank_one_always_sd(p, e):
    ring = CoefficientRing(p, 1, 1, e)
    for r, s in rank_one_family(p, e):
        obj = rank_one(ring, r, s)
        assert sd_check_criterion(obj) and sd_check_definition(obj)
        jump = (s[0] if s else ring.N) - r
        assert sd_basis(obj).jumps == [jump]
        mu = hodge_type(obj)
        assert sum(sum(ms) for ms in mu.entries[0]) == ring.N - r
        assert obj.colength == r


def test_hodge_examples():
    ring = CoefficientRing(3, 1, 1, 2)
    assert hodge_type(rank_one(ring, 1, [3])) == HodgeType([[[2], [1]]])
    assert hodge_type(rank_one(ring, 3, [3])) == HodgeType([[[0], [1]]])
    unit = unit_object(CoefficientRing(2, 1, 1, 1), 2)
    assert hodge_type(unit) == HodgeType([[[2, 2]]])


GRID = [CoefficientRing(p, f, f, e) for p in (2, 3) for f in (1, 2) for e in (1, 2, 3)]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(GRID), st.integers(1, 2), st.integers(0, 2 ** 32 - 1))
def test_procedures_agree_and_basis_verifies(ring, d, seed):
    obj = gen_random_valid(ring, d, np.random.default_rng(seed))
    crit = sd_check_criterion(obj)
    assert sd_check_definition(obj) == crit
    if crit:
        b = sd_basis(obj)
        assert la.span_equal(ring.F, basis_lattice(obj, b), obj.fil[1])
        assert all(0 <= r <= ring.p for r in b.jumps)
        assert sorted(b.jumps) == sorted(r for row in elementary_divisors(obj) for r in row)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(GRID), st.integers(0, 2 ** 32 - 1))
def test_sum_of_sd(ring, seed):
    rng = np.random.default_rng(seed)
    a, b = gen_random_sd(ring, 1, rng), gen_random_sd(ring, 1, rng)
    s = direct_sum(a, b)
    assert sd_check_criterion(s) and sd_check_definition(s)
    assert hodge_type(s) == hodge_type(a).union(hodge_type(b))
    assert sorted(sd_basis(s).jumps) == sorted(sd_basis(a).jumps + sd_basis(b).jumps)
    mu = hodge_type(s)
    for row in mu.entries:
        assert all(0 <= r <= ring.p for r in row[0])
        assert all(r in (0, 1) for ms in row[1:] for r in ms)


def test_graded_dims_sum_to_rank():
    rng = np.random.default_rng(3)
    for ring in GRID:
        obj = gen_random_sd(ring, 2, rng)
        prof = graded_profile(obj)
        assert all(sum(g) == obj.d for g in prof["gr"])


def test_split_sequence_reports():
    ring = CoefficientRing(2, 2, 2, 2)
    rng = np.random.default_rng(8)
    a, b = gen_random_sd(ring, 1, rng), gen_random_sd(ring, 2, rng)
    seq = standard_sequence(a, direct_sum(a, b), b)
    rep = sub_quotient_sd(seq)
    assert rep["middle_sd"] and rep["sub_sd"] and rep["quotient_sd"] and rep["additive"]
    sp = split_surjection(seq)
    assert sp.fil1_ok and sp.phi_ok
    assert not sp.t.any()


@pytest.mark.parametrize("ring", [CoefficientRing(2, 1, 1, 1), CoefficientRing(3, 1, 1, 2), CoefficientRing(2, 2, 2, 3)])
def test_extension_splitting(ring):
    rng = np.random.default_rng(21)
    for _ in range(3):
        P, M = gen_random_sd(ring, 1, rng), gen_random_sd(ring, 1, rng)
        Nobj, seq = extension_from_cocycle(P, M, random_cocycle(P, M, rng))
        rep = sub_quotient_sd(seq)
        assert rep["exact"] and rep["middle_sd"] and rep["sub_sd"] and rep["quotient_sd"] and rep["additive"]
        sp = split_surjection(seq)
        assert sp.fil1_ok and sp.phi_ok


def test_non_sd_middle_is_report_only():
    obj = FilteredBKModule.from_json(NON_SD)
    z = CoefficientRing(2, 1, 1, 2)
    from bkfilt.modf import zero_object
    rep = sub_quotient_sd(standard_sequence(zero_object(z), obj, obj))
    assert rep["middle_sd"] is False and rep["sub_sd"] is None
