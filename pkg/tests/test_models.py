from math import gcd

import pytest

from symtate.algebra import FgAbGroup, HomologyData, IntMatrix, Ring
from symtate.complex import EquivariantComplex, TruncationSpec, instantiate_window, reduce_complex
from symtate.errors import (BadParams, BadParity, InvalidWeights, NonInvertiblePivot,
                            RequiresRationalCoefficients)
from symtate.homology import homology
from symtate.models import (all_bundles, cn_complex, cn_weights, local_orbit, rabinowitz_C,
                            t_star_s2, torus, xn_rank_report)


def test_all_bundles_valid():
    names = set()
    for b in all_bundles(4):
        assert b.is_valid(), b.name
        names.add(b.name)
    assert {"rabinowitz-C", "cn-1", "t-star-s2", "torus-2"} <= names


def test_cn_weights():
    assert cn_weights(1, 4) == [1, 2, 3, 4]
    assert cn_weights(2, 6) == [1, 1, 2, 2, 3, 3]
    assert cn_weights(3, 7) == [1, 1, 1, 2, 2, 2, 3]


def test_cn_builder_and_params():
    b = cn_complex(2, 4)
    assert b.horizon == 4 and b.params == {"n": 2, "K": 4}
    assert len(b.complex.generators) == 1 + 2 * 4
    assert b.at_horizon(6).horizon == 6
    with pytest.raises(BadParams):
        cn_complex(0, 4)
    with pytest.raises(BadParams):
        rabinowitz_C().at_horizon(3)


def test_t_star_s2_weights():
    with pytest.raises(InvalidWeights):
        t_star_s2(3, [2, 3, 2])
    with pytest.raises(InvalidWeights):
        t_star_s2(3, [2, 0, 2])
    with pytest.raises(InvalidWeights):
        t_star_s2(3, [4, 2, 2])
    with pytest.raises(InvalidWeights):
        t_star_s2(3, [2, 2])
    assert t_star_s2(3, [2, -4, 6]).expected["weights"] == [2, -4, 6]
    assert t_star_s2(2, [2, 4]).at_horizon(4).expected["weights"] == [2, 4, 4, 4]


@pytest.mark.parametrize("c", [1, 2, 3, 4, -5, 6])
def test_weight_parity_subcomplex(c):
    # d y = 2 w + c x on the generators {x, w, y}: homology Z + Z/gcd(2, c) at the bottom
    h = HomologyData(IntMatrix([[2], [c]]), IntMatrix.zeros(0, 2))
    assert h.group == FgAbGroup(1, (gcd(2, c),) if gcd(2, c) > 1 else ())


def test_t_star_s2_loop_homology():
    for c in (None, [2, 4, 4, 4]):
        b = t_star_s2(4, c)
        lo, hi = b.expected["loop_degrees"]
        # the level-0 window kills every term with a u-shift
        h = homology(instantiate_window(b.complex, TruncationSpec(0, None, (lo, hi), 0)))
        for d in range(lo, hi + 1):
            want = FgAbGroup(1) if d == 0 or d % 2 else FgAbGroup(1, (2,))
            assert h[d] == want == b.expected["loop_homology"](d)


def test_t_star_s2_cancel_pairs_over_q():
    b = t_star_s2(3)
    w = instantiate_window(b.complex, TruncationSpec(-4, None, (0, 6)))
    pairs = [b.expected["cancel_pairs"][k] for k in (1, 2, 3)]
    # u^(1-k) r_k- sits in degree 1 and u^-k r_k+ in degree 0
    assert all(y in w.gens[1] and x in w.gens[0] for y, x in pairs)
    r = reduce_complex(w, pairs, Ring.RAT)
    assert r.total_rank() == w.total_rank() - 6
    assert homology(r, Ring.RAT).groups() == homology(w, Ring.RAT).groups()
    with pytest.raises(NonInvertiblePivot):
        # k = 2 gives the coefficient 2, which is not a unit over Z
        reduce_complex(w, [pairs[1]], Ring.INT)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("shift", [0, 1])
def test_local_orbit_good(n, shift):
    b = local_orbit(n, "good", shift)
    h = homology(instantiate_window(b.complex, TruncationSpec(None, None, (-4, 6))))
    for d in range(-4, 7):
        want = FgAbGroup(0, (n,)) if n > 1 and (d - shift - 1) % 2 == 0 else FgAbGroup()
        assert h[d] == want == b.expected["homology"](d)


@pytest.mark.parametrize("n", [2, 4])
def test_local_orbit_bad(n):
    b = local_orbit(n, "bad", 1)
    h = homology(instantiate_window(b.complex, TruncationSpec(None, None, (-4, 6))))
    for d in range(-4, 7):
        want = FgAbGroup(0, (2,)) if (d - 1) % 2 == 0 else FgAbGroup()
        assert h[d] == want
    with pytest.raises(BadParity):
        local_orbit(3, "bad")
    with pytest.raises(BadParams):
        local_orbit(2, "ugly")


def test_torus_rational_only():
    with pytest.raises(RequiresRationalCoefficients):
        torus(2, 1, Ring.INT)
    for n in (1, 2):
        b = torus(n, 1)
        h = homology(instantiate_window(b.complex, TruncationSpec(None, None, (-2, 4))),
                     Ring.RAT)
        for d in range(-2, 5):
            assert h.dim(d) == 2 ** (n - 1) == b.expected["Rat"]["rank"]
    assert len(torus(2, 1).expected["classes"]) == 8


def test_xn_rank_report():
    for n in range(1, 11):
        r = xn_rank_report(n)
        assert r.d == n * n + n + 2 and r.two_n == 2 ** n
    assert xn_rank_report(3).verdict == "not injective"
    assert xn_rank_report(5).verdict == "no verdict from ranks"
    assert xn_rank_report(7).to_dict()["kappa_surjective"] is False
    with pytest.raises(BadParams):
        xn_rank_report(0)


def test_export_round_trip(tmp_path):
    for b in all_bundles(3):
        p = tmp_path / (b.name + ".json")
        text = b.export(p)
        assert EquivariantComplex.from_json(p.read_text()) == b.complex
        assert EquivariantComplex.from_json(text) == b.complex
