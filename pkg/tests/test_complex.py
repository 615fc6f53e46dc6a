import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from symtate.algebra import IntMatrix, Ring
from symtate.complex import (BaseGenerator, BoundaryTerm, EquivariantComplex, TruncationSpec,
                             WindowComplex, comparison_map, instantiate_window, reduce_complex,
                             u_shift, validate)
from symtate.errors import InvalidComplex, NonInvertiblePivot, WindowMismatch
from symtate.homology import homology
from symtate.models import all_bundles, cn_complex, t_star_s2

BUNDLES = all_bundles(4)


def _kinds(c):
    return sorted({v.kind for v in validate(c)})


def test_examples_are_valid():
    for b in BUNDLES:
        assert validate(b.complex) == [], b.name


def test_validation_reports_every_violation():
    gens = [BaseGenerator("a", 1, 0, 1), BaseGenerator("b", 0, 1, 2), BaseGenerator("a", 3, 0)]
    bd = {"a": [BoundaryTerm(1, 0, "b"), BoundaryTerm(0, 0, "b"), BoundaryTerm(1, 0, "zz")],
          "ghost": [BoundaryTerm(1, 0, "a")]}
    kinds = _kinds(EquivariantComplex(gens, bd))
    for k in ("duplicate-id", "unknown-source", "zero-coefficient", "unknown-target",
              "mu-monotone", "h-monotone"):
        assert k in kinds
    bad_degree = EquivariantComplex([BaseGenerator("x", 2, 0), BaseGenerator("y", 0, 0)],
                                    {"x": [BoundaryTerm(1, 0, "y")]})
    assert _kinds(bad_degree) == ["degree"]
    # x -> y -> z with both coefficients 1 gives d^2 != 0
    chain = EquivariantComplex(
        [BaseGenerator("x", 2, 0), BaseGenerator("y", 1, 0), BaseGenerator("z", 0, 0)],
        {"x": [BoundaryTerm(1, 0, "y")], "y": [BoundaryTerm(1, 0, "z")]})
    assert _kinds(chain) == ["d-squared"]
    shift = EquivariantComplex([BaseGenerator("x", 1, 0), BaseGenerator("y", -2, 0)],
                               {"x": [BoundaryTerm(1, 1, "y")]})
    assert "single-level-shift" in _kinds(shift)


def test_invalid_complex_is_not_instantiated():
    c = EquivariantComplex([BaseGenerator("x", 1, 0), BaseGenerator("y", 0, 0)],
                           {"x": [BoundaryTerm(1, 0, "q")]})
    with pytest.raises(InvalidComplex):
        instantiate_window(c, TruncationSpec(0, None))


def test_json_round_trip():
    for b in BUNDLES:
        c = b.complex
        assert EquivariantComplex.from_json(c.to_json()) == c


def test_truncation_spec_shift():
    s = TruncationSpec(1, Fraction(3, 2), (0, 4), muUpper=3)
    t = s.shifted(2)
    assert (t.aMuLevel, t.bAction, t.degreeWindow, t.muUpper) == (3, Fraction(3, 2), (4, 8), 5)
    with pytest.raises(ValueError):
        TruncationSpec(0, None, (3, 1))


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=500)
def test_d_squared_after_truncation(seed):
    rng = random.Random(seed)
    b = rng.choice(BUNDLES)
    acts = sorted({g.hAction for g in b.complex.generators})
    lo = rng.randint(-4, 4)
    a = rng.choice([None, rng.randint(-4, 4)])
    bb = rng.choice([None] + acts)
    top = rng.choice([None, rng.randint(-2, 6)])
    spec = TruncationSpec(a, bb, (lo, lo + rng.randint(0, 6)), top)
    w = instantiate_window(b.complex, spec)
    assert w.check_d_squared()
    for d in range(w.dLow + 1, w.dHigh + 2):
        assert (w.d(d - 1) @ w.d(d)).is_zero()


def test_u_shift():
    c = cn_complex(2, 4).complex
    w = instantiate_window(c, TruncationSpec(0, 3, (0, 6)))
    s = u_shift(w)
    assert s.intertwines()
    assert s.target.spec == w.spec.shifted(1)
    back = s.inverse()
    assert back.intertwines()
    for d in range(w.dLow - 1, w.dHigh + 2):
        assert back(d + 2) @ s(d) == IntMatrix.identity(w.rank(d))
    assert homology(w).groups() == {d - 2: g for d, g in homology(s.target).groups().items()}
    other = instantiate_window(c, TruncationSpec(0, 3, (0, 6)))
    with pytest.raises(WindowMismatch):
        u_shift(w, other)
    with pytest.raises(WindowMismatch):
        u_shift(WindowComplex({0: []}, {}, 0, 0))


def _random_window(rng: random.Random):
    """Random integer complex in degrees 0..3, with unit pairs mixed in by a basis change."""
    pieces = {k: [] for k in range(4)}
    bd = {k: [] for k in range(1, 4)}
    for k in range(4):
        for _ in range(rng.randint(0, 2)):
            pieces[k].append(("free", None))
    for k in range(1, 4):
        for _ in range(rng.randint(1, 3)):
            bd[k].append((len(pieces[k]), len(pieces[k - 1]), rng.choice((1, -1, 2, 3))))
            pieces[k].append(("src", None))
            pieces[k - 1].append(("tgt", None))
    n = {k: len(pieces[k]) for k in range(4)}
    mats = {}
    for k in range(1, 4):
        m = [[0] * n[k] for _ in range(n[k - 1])]
        for j, i, c in bd[k]:
            m[i][j] = c
        mats[k] = IntMatrix(m, n[k - 1], n[k])
    # conjugate by random unimodular changes of basis G_k
    G, Ginv = {}, {}
    for k in range(4):
        g = IntMatrix.identity(n[k])
        gi = IntMatrix.identity(n[k])
        for _ in range(3 * n[k]):
            if n[k] < 2:
                break
            i, j = rng.sample(range(n[k]), 2)
            c = rng.choice((-1, 1))
            e = IntMatrix([[int(r == s) + (c if (r, s) == (i, j) else 0) for s in range(n[k])]
                           for r in range(n[k])], n[k], n[k])
            ei = IntMatrix([[int(r == s) - (c if (r, s) == (i, j) else 0) for s in range(n[k])]
                            for r in range(n[k])], n[k], n[k])
            g, gi = e @ g, gi @ ei
        G[k], Ginv[k] = g, gi
    boundary = {k: G[k - 1] @ mats[k] @ Ginv[k] for k in range(1, 4)}
    gens = {k: [(f"g{k}", i) for i in range(n[k])] for k in range(4)}
    return WindowComplex(gens, boundary, 1, 2)


def _unit_pairs(w: WindowComplex, ring):
    for d in range(w.dLow, w.dHigh + 2):
        m = w.d(d)
        for i in range(m.rows):
            for j in range(m.cols):
                v = m[i, j]
                if (v in (1, -1)) if ring is Ring.INT else v != 0:
                    yield (w.gens[d][j], w.gens[d - 1][i])


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([Ring.INT, Ring.RAT]))
@settings(max_examples=100)
def test_reduce_complex_preserves_homology(seed, ring):
    rng = random.Random(seed)
    w = _random_window(rng)
    before = homology(w, ring).groups()
    steps = 0
    cur = w
    while steps < 4:
        pairs = list(_unit_pairs(cur, ring))
        if not pairs:
            break
        nxt = reduce_complex(cur, [rng.choice(pairs)], ring)
        assert nxt.total_rank() == cur.total_rank() - 2
        assert nxt.check_d_squared()
        assert homology(nxt, ring).groups() == before
        cur, steps = nxt, steps + 1
    # all at once from the original window
    pairs, probe = [], w
    for _ in range(steps):
        cand = list(_unit_pairs(probe, ring))
        if not cand:
            break
        pairs.append(cand[0])
        probe = reduce_complex(probe, [cand[0]], ring)
    assert homology(reduce_complex(w, pairs, ring), ring).groups() == before


def test_reduce_complex_needs_a_unit():
    gens = {-1: [], 0: [("x", 0)], 1: [("y", 0)], 2: []}
    w = WindowComplex(gens, {1: IntMatrix([[2]]), 2: IntMatrix.zeros(1, 0)}, 0, 1)
    with pytest.raises(NonInvertiblePivot):
        reduce_complex(w, [(("y", 0), ("x", 0))], Ring.INT)
    r = reduce_complex(w, [(("y", 0), ("x", 0))], Ring.RAT)
    assert r.total_rank() == 0
    with pytest.raises(NonInvertiblePivot):
        reduce_complex(w, [(("x", 0), ("y", 0))], Ring.INT)


def test_nested_windows_commute_at_chain_level():
    c = t_star_s2(3).complex
    dw = (0, 6)
    for a1, a2 in ((-3, -1), (-1, 0), (-2, 1)):
        for b1, b2 in ((Fraction(1, 2), 1), (1, Fraction(5, 2)), (Fraction(1, 2), 3)):
            w11 = instantiate_window(c, TruncationSpec(a1, b1, dw))
            w12 = instantiate_window(c, TruncationSpec(a1, b2, dw))
            w21 = instantiate_window(c, TruncationSpec(a2, b1, dw))
            w22 = instantiate_window(c, TruncationSpec(a2, b2, dw))
            for d in range(dw[0] - 1, dw[1] + 2):
                lhs = comparison_map(w12, w22, d) @ comparison_map(w11, w12, d)
                rhs = comparison_map(w21, w22, d) @ comparison_map(w11, w21, d)
                assert lhs == rhs
                # both composites are chain maps
                if d > dw[0] - 1:
                    assert w22.d(d) @ comparison_map(w11, w22, d) == \
                        comparison_map(w11, w22, d - 1) @ w11.d(d)
