import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from symtate.algebra import (FgAbGroup, HomologyData, IntMatrix, LaurentPoly, RatMatrix, Ring,
                             homology_of_pair, induced_map_on_homology, laurent_add,
                             laurent_multiply, laurent_shift, smith_normal_form)
from symtate.errors import CompositionNonzero, NotChainMap

from oracles import random_pair, rank_mod

int_matrices = st.integers(0, 5).flatmap(
    lambda r: st.integers(0, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c),
                           min_size=r, max_size=r).map(lambda rows: IntMatrix(rows, r, c))))


def test_ring_parse():
    assert Ring.parse("z") is Ring.INT
    assert Ring.parse("Q") is Ring.RAT
    assert Ring.parse(Ring.RAT) is Ring.RAT
    with pytest.raises(ValueError):
        Ring.parse("r")


def test_snf_examples():
    assert smith_normal_form(IntMatrix([[2, 4], [6, 8]])).invariantFactors == (2, 4)
    assert smith_normal_form(IntMatrix([[2, 0], [0, 3]])).invariantFactors == (1, 6)
    assert smith_normal_form(IntMatrix([[0, 0], [0, 0]])).invariantFactors == ()
    assert smith_normal_form(IntMatrix([[4, 6, 10]])).invariantFactors == (2,)


@given(int_matrices)
@settings(max_examples=150)
def test_snf_decomposition(A):
    s = smith_normal_form(A)
    assert s.U @ A @ s.V == s.S
    assert abs(s.U.det()) == 1 and abs(s.V.det()) == 1
    assert s.U @ s.Uinv == IntMatrix.identity(A.rows)
    assert s.V @ s.Vinv == IntMatrix.identity(A.cols)
    f = s.invariantFactors
    assert all(d > 0 for d in f)
    assert all(b % a == 0 for a, b in zip(f, f[1:]))
    for i in range(A.rows):
        for j in range(A.cols):
            assert s.S[i, j] == (f[i] if i == j and i < len(f) else 0)
    assert len(f) == rank_mod(A.tolist())


def test_fg_group_canonical():
    assert FgAbGroup(0, (6, 2)).torsion == (2, 6)
    assert FgAbGroup(0, (2, 3)).torsion == (6,)
    assert FgAbGroup.from_orders([0, 4, 1, 0]) == FgAbGroup(2, (4,))
    assert str(FgAbGroup(1, (2,))) == "Z + Z/2"
    assert FgAbGroup().is_zero


def test_homology_of_pair_small():
    # Z --2--> Z --0--> 0 has homology Z/2
    g, reps = homology_of_pair(IntMatrix([[2]]), IntMatrix.zeros(0, 1))
    assert g == FgAbGroup(0, (2,))
    assert reps == [[1]]
    g, _ = homology_of_pair(IntMatrix([[2]]), IntMatrix.zeros(0, 1), Ring.RAT)
    assert g.is_zero
    with pytest.raises(CompositionNonzero):
        HomologyData(IntMatrix([[1]]), IntMatrix([[1]]))


def test_coords_and_boundaries():
    h = HomologyData(IntMatrix([[2], [0]]), IntMatrix.zeros(0, 2))
    assert h.group == FgAbGroup(1, (2,))
    assert h.is_boundary([2, 0])
    assert not h.is_boundary([1, 0])
    assert h.coords([3, 0]) == h.coords([1, 0])


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=200)
def test_homology_oracle(seed):
    # free rank from ranks over Q; the number of p-divisible torsion factors
    # from the drop in rank of dIn over F_p
    dIn, dOut = random_pair(random.Random(seed))
    h = HomologyData(dIn, dOut)
    n = dIn.rows
    rq_in, rq_out = rank_mod(dIn.tolist()), rank_mod(dOut.tolist())
    assert h.group.freeRank == n - rq_in - rq_out
    for p in (2, 3, 5, 7):
        want = rq_in - rank_mod(dIn.tolist(), p)
        assert sum(1 for t in h.group.torsion if t % p == 0) == want
    hq = HomologyData(dIn, dOut, Ring.RAT)
    assert hq.group.freeRank == h.group.freeRank and not hq.group.torsion


def _homotopic_scalar(rng, dIn, dOut, lam):
    """``lam * id + dIn s1 + s0 dOut`` on the middle group, chain homotopic to ``lam``."""
    n = dIn.rows
    s1 = IntMatrix([[rng.randint(-2, 2) for _ in range(n)] for _ in range(dIn.cols)],
                   dIn.cols, n)
    s0 = IntMatrix([[rng.randint(-2, 2) for _ in range(dOut.rows)] for _ in range(n)],
                   n, dOut.rows)
    return IntMatrix.identity(n).scale(lam) + dIn @ s1 + s0 @ dOut


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=50)
def test_functoriality(seed):
    rng = random.Random(seed)
    dIn, dOut = random_pair(rng)
    h = HomologyData(dIn, dOut)
    lam, mu = rng.randint(-3, 3), rng.randint(-3, 3)
    f = _homotopic_scalar(rng, dIn, dOut, lam)
    g = _homotopic_scalar(rng, dIn, dOut, mu)
    Hf = induced_map_on_homology(f, h, h)
    Hg = induced_map_on_homology(g, h, h)
    Hfg = induced_map_on_homology(f @ g, h, h)
    assert Hfg == Hf @ Hg
    scalar = induced_map_on_homology(IntMatrix.identity(h.dim).scale(lam * mu), h, h)
    assert Hfg == scalar


def test_induced_map_rejects_non_chain_maps():
    h = HomologyData(IntMatrix.zeros(2, 0), IntMatrix([[1, 0]]))
    with pytest.raises(NotChainMap):
        induced_map_on_homology(IntMatrix([[0, 1], [0, 0]]), h, h)


def test_inclusion_projection_compose_to_zero():
    # C = (Z -> 0), D = (Z -2-> Z); C -> C + D -> D
    dIn = IntMatrix([[0], [2]])
    h_sum = HomologyData(dIn, IntMatrix.zeros(0, 2))
    h_c = HomologyData(IntMatrix.zeros(1, 0), IntMatrix.zeros(0, 1))
    h_d = HomologyData(IntMatrix([[2]]), IntMatrix.zeros(0, 1))
    inc = induced_map_on_homology(IntMatrix([[1], [0]]), h_c, h_sum)
    pr = induced_map_on_homology(IntMatrix([[0, 1]]), h_sum, h_d)
    assert (pr @ inc).is_zero()
    assert inc.is_injective() and pr.is_surjective()


def test_rational_matrices():
    m = RatMatrix([[1, 2], [3, 4]])
    assert m.inverse() @ m == RatMatrix.identity(2)
    assert m.det() == -2
    assert RatMatrix([[Fraction(1, 2), 1], [1, 2]]).rank() == 1


def test_laurent():
    u = LaurentPoly.u()
    assert (1 + u) * (1 - u) == 1 - u * u
    assert laurent_shift(LaurentPoly.const(3), -2) == LaurentPoly({-2: 3})
    assert laurent_add(u, -u).is_zero()
    assert laurent_multiply(u, LaurentPoly.u(-1)) == 1
    assert str(LaurentPoly({-1: 2, 0: -1})) == "2u^-1 - 1"


@given(st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=4),
       st.dictionaries(st.integers(-4, 4), st.integers(-5, 5), max_size=4),
       st.integers(-3, 3))
def test_laurent_ring_laws(a, b, k):
    p, q = LaurentPoly(a), LaurentPoly(b)
    assert p * q == q * p
    assert (p + q).shift(k) == p.shift(k) + q.shift(k)
    assert (p * q).shift(k) == p.shift(k) * q
