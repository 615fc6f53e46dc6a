from fractions import Fraction

import pytest

from symtate.algebra import FgAbGroup, HomologyMorphism, RatMatrix, Ring
from symtate.errors import GridTooSmall
from symtate.limits import (BidirectGrid, GridSpec, HorizonProbe, backwards_split,
                            default_grid, four_tate_groups, localize_module,
                            sh_equivariant_module, sigma_surjectivity, u_periodic)
from symtate.models import all_bundles, cn_complex, rabinowitz_C, t_star_s2
from symtate.towers import (NotDetected, Periodic, StableFrom, Tower, TowerColimit,
                            direct_limit, inverse_limit, multiplier_rule)

Z = FgAbGroup(1)


def _mul(c, src=Z, tgt=Z, ring=Ring.INT):
    return HomologyMorphism(src, tgt, ((c,),), ring)


def test_direct_tower_stabilizes():
    t = Tower([FgAbGroup(), Z, Z, Z], [HomologyMorphism.zero(FgAbGroup(), Z), _mul(1), _mul(-1)])
    assert t.stabilization() == StableFrom(1)
    r = direct_limit(t)
    assert r.status == "stable" and r.value == Z


def test_periodic_and_undetected():
    t = Tower([Z] * 4, [_mul(2)] * 3)
    assert isinstance(t.stabilization(), Periodic)
    r = direct_limit(t)
    assert r.status == "periodic"
    col = r.value
    assert col.divisible((0, [1]), 2, 10) and not col.divisible((0, [1]), 3, 10)
    t = Tower([Z] * 3, [_mul(2), _mul(3)])
    assert isinstance(t.stabilization(), NotDetected)
    assert direct_limit(t).status == "undecided"


def test_inverse_limit_over_q_uses_eventual_images():
    # Q^2 <- Q^2 <- ... along a rank one idempotent: the limit is Q
    g = FgAbGroup(2)
    e = HomologyMorphism(g, g, ((1, 0), (0, 0)), Ring.RAT)
    r = inverse_limit(Tower([g] * 5, [e] * 4, "inverse", Ring.RAT))
    assert r.decided and r.value == FgAbGroup(1)
    # nilpotent transitions give 0
    n = HomologyMorphism(g, g, ((0, 1), (0, 0)), Ring.RAT)
    r = inverse_limit(Tower([g] * 6, [n] * 5, "inverse", Ring.RAT))
    assert r.value == FgAbGroup()
    # over Z, multiplication by 2 is not eventually an isomorphism
    r = inverse_limit(Tower([Z] * 4, [_mul(2)] * 3, "inverse"))
    assert not r.decided and "Mittag-Leffler" in r.value.reason


def test_successor_colimit_is_q():
    rule = multiplier_rule(lambda k: k + 2)
    col = TowerColimit([Z] * 3, [rule(0), rule(1)], rule=rule)
    q = col.q_criterion(97, 120)
    assert q["holds"] and q["rank"] == 1 and q["torsion_free"]
    two = multiplier_rule(lambda k: 2)
    col = TowerColimit([Z] * 3, [two(0), two(1)], rule=two)
    q = col.q_criterion(7, 40)
    assert not q["holds"] and {p for _, _, p in q["failures"]} == {3, 5, 7}


def test_torsion_dies_in_colimit():
    z2 = FgAbGroup(0, (2,))
    kill = HomologyMorphism(z2, z2, ((0,),))
    col = TowerColimit([z2, z2], [kill], periodic=(z2, kill))
    assert col.torsion_free(5)
    assert col.is_zero((0, [1]), 1)
    assert col.rank(4) == 0
    ident = HomologyMorphism.identity(z2)
    assert not TowerColimit([z2, z2], [ident], periodic=(z2, ident)).torsion_free(5)


@pytest.fixture(scope="module")
def c1_rat():
    b = cn_complex(1, 4)
    return four_tate_groups(b.complex, Ring.RAT, (-2, 6),
                            horizonProbe=HorizonProbe(b.builder, (4, 6)))


def test_c1_rational_diagram(c1_rat):
    dg = c1_rat
    for d in range(-2, 7):
        even = int(d % 2 == 0)
        assert dg.ranks("top")[d] == even and dg.ranks("jp")[d] == even
        assert dg.ranks("gw")[d] == 0 and dg.ranks("bottom")[d] == 0
    assert dg.rho_iso() and dg.commutes()
    assert all(dg.horizon["stable"].values())
    assert all(sigma_surjectivity(dg).values())
    assert u_periodic(dg)
    assert "commutes" in dg.table()
    assert dg.to_dict()["degrees"]["0"]["kappa"]["surjective"] is True


def test_complete_complex_without_probe():
    dg = four_tate_groups(rabinowitz_C().complex, Ring.INT, (-2, 4))
    for d in range(-2, 5):
        e = dg[d]
        for w in ("top", "jp", "bottom", "gw"):
            assert getattr(e, w).value == FgAbGroup(), (d, w)
        assert e.commutes


def test_grid_too_small():
    c = cn_complex(1, 3).complex
    with pytest.raises(GridTooSmall):
        four_tate_groups(c, Ring.RAT, (0, 2), gridSpec=GridSpec((0,), (1, 2)))
    with pytest.raises(GridTooSmall):
        # the level cuts do not reach below every generator
        four_tate_groups(c, Ring.RAT, (0, 2), gridSpec=GridSpec((0, 1, 2, 3), (1, 2, 3)))


def test_squares_commute_on_all_grids():
    for b in all_bundles(3):
        for ring in (Ring.INT, Ring.RAT):
            if ring is Ring.INT and b.coefficientScope == "Rat":
                continue
            grid = BidirectGrid(b.complex, ring, default_grid(b.complex, (-1, 4)), (-1, 4))
            assert grid.squares_commute(), (b.name, ring)


def test_localize_module():
    dims = {0: 2, 2: 2, 4: 2, 6: 2, 8: 2}
    ident = RatMatrix.identity(2)
    m = localize_module(dims, {0: ident, 2: ident, 4: ident, 6: ident})
    assert all(m.rank(d) == 2 for d in (0, 2, 4, 6))
    # nothing above the top degree
    assert m.status[8] == "undecided" and not m.decided()
    nil = RatMatrix([[0, 1], [0, 0]])
    m = localize_module(dims, {0: nil, 2: nil, 4: nil, 6: nil})
    assert m.rank(0) == 0
    m = localize_module({0: 1}, {})
    assert m.rank(0) is None


def test_one_sided_module_of_circle():
    # levels >= 0 of the equivariant circle: Q u^k in degree 2k, T is an iso
    dims, T = sh_equivariant_module(rabinowitz_C(True).complex, (0, 6))
    assert [dims[d] for d in range(0, 7)] == [1, 0, 1, 0, 1, 0, 1]
    m = localize_module(dims, T)
    assert all(m.rank(d) == (1 if d % 2 == 0 else 0) for d in range(0, 5))


def test_backwards_split():
    for b in (cn_complex(1, 4), t_star_s2(3)):
        rep = backwards_split(b.complex, (-2, 6))
        assert rep.exact
        assert all(rep.rho_iso.values())
        assert set(rep.to_dict()) == {"exact", "rho_iso", "groups"}


def test_t_star_s2_small_horizon():
    b = t_star_s2(4)
    dg = four_tate_groups(b.complex, Ring.RAT, (0, 4),
                          horizonProbe=HorizonProbe(b.builder, (4,)))
    for d in range(0, 5):
        even = d % 2 == 0
        assert dg.ranks("top")[d] == (2 if even else 0)
        assert dg.ranks("bottom")[d] == (1 if even else 0)
    assert dg.commutes() and dg.rho_iso()
