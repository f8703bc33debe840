import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from homotopykit import NotAComplex, build_t3, subdivide
from homotopykit.homology import (HomologySummary, betti_numbers, complex_homology,
                                  coordinate_pairing, dump_abstract_complex, elementary_divisors,
                                  homology, load_abstract_complex, rp2_boundaries,
                                  smith_normal_form, two_cycle_basis)
from oracles import determinantal_divisors, rank_mod_p


def _diag(D):
    return [int(D[i, i]) for i in range(min(D.shape)) if D[i, i] != 0]


def _check_snf(A):
    A = np.asarray(A, dtype=object)
    U, D, V = smith_normal_form(A)
    assert np.array_equal(U.dot(A).dot(V), D)
    off = D.copy()
    for i in range(min(D.shape)):
        off[i, i] = 0
    assert not np.any(off != 0)
    d = _diag(D)
    assert all(x > 0 for x in d)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))
    # unimodular transforms
    for M in (U, V):
        _, Dm, _ = smith_normal_form(M)
        assert _diag(Dm) == [1] * M.shape[0]
    return d


def test_snf_small_example():
    U, D, V = smith_normal_form([[2, 4], [6, 8]])
    assert _diag(D) == [2, 4]
    assert np.array_equal(U.dot(np.array([[2, 4], [6, 8]], dtype=object)).dot(V), D)


def test_snf_random_batch():
    rng = np.random.default_rng(0)
    for _ in range(100):
        m, n = rng.integers(1, 41, size=2)
        A = rng.integers(-3, 4, size=(m, n)) * (rng.random((m, n)) < 0.3)
        d = _check_snf(A)
        assert d == elementary_divisors(sp.csr_matrix(A))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_snf_matches_determinantal_divisors(seed, m, n):
    rng = np.random.default_rng(seed)
    A = rng.integers(-6, 7, size=(m, n))
    d = _check_snf(A)
    assert d == determinantal_divisors(A)


def test_snf_large_entries_exact():
    A = np.array([[2**70, 0], [0, 3 * 2**70]], dtype=object)
    assert _diag(smith_normal_form(A)[1]) == [2**70, 3 * 2**70]


def test_summary_validation():
    with pytest.raises(ValueError):
        HomologySummary(0, (3, 2))
    with pytest.raises(ValueError):
        HomologySummary(0, (1,))


def test_rp2_torsion_and_mod_p_ranks():
    d1, d2 = rp2_boundaries()
    hs = complex_homology([d1, d2])
    assert [h.betti for h in hs] == [1, 0, 0]
    assert hs[1].torsion == (2,) and hs[0].torsion == () and hs[2].torsion == ()
    # over GF(2) the Betti numbers jump by one in degrees 1 and 2
    nv, ne, nf = 6, d1.shape[1], d2.shape[1]
    r1, r2 = rank_mod_p(d1, 2), rank_mod_p(d2, 2)
    assert (nv - r1, ne - r1 - r2, nf - r2) == (1, 1, 1)
    r1, r2 = rank_mod_p(d1, 3), rank_mod_p(d2, 3)
    assert (nv - r1, ne - r1 - r2, nf - r2) == (1, 0, 0)


def test_not_a_complex():
    d1 = np.array([[1, 1]])
    d2 = np.array([[1], [0]])
    with pytest.raises(NotAComplex):
        homology(d2, d1)
    with pytest.raises(NotAComplex):
        homology(np.ones((3, 1), dtype=int), d1)


def test_abstract_round_trip():
    mats = rp2_boundaries()
    back = load_abstract_complex(dump_abstract_complex(mats))
    assert all(np.array_equal(np.asarray(a, dtype=object), b) for a, b in zip(mats, back))
    # triplet-only form with inferred shapes
    trip = [[[0, 0, -1], [1, 0, 1]]]
    (M,) = load_abstract_complex(trip)
    assert M.shape == (2, 1)
    with pytest.raises(ValueError):
        load_abstract_complex([[[0, 0]]])


@pytest.mark.parametrize("level", [0, 1, 2])
def test_s3_betti(level, s3_meshes):
    assert betti_numbers(s3_meshes[level]) == (1, 0, 0, 1)
    assert two_cycle_basis(s3_meshes[level]) == []


@pytest.mark.parametrize("n", [2, 3, 4])
def test_t3_betti(n):
    c = build_t3(n)
    assert betti_numbers(c) == (1, 3, 3, 1)
    hs = complex_homology([c.boundary_matrix(k) for k in (1, 2, 3)], sizes=c.counts)
    assert all(h.torsion == () for h in hs)


def test_t3_cycles_pair_to_identity_and_survive_subdivision():
    for c in (build_t3(3), subdivide(build_t3(2)), build_t3(8)):
        cycles = two_cycle_basis(c)
        assert len(cycles) == 3
        d2 = c.boundary_matrix(2)
        for z in cycles:
            assert not np.any(d2 @ z.as_array(c.counts[2]))
        P = coordinate_pairing(c, [z.as_array(c.counts[2]) for z in cycles])
        assert np.array_equal(P.astype(int), np.eye(3, dtype=int))
