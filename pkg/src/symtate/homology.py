"""Graded homology of window complexes and maps between them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (FgAbGroup, HomologyData, HomologyMorphism, IntMatrix, RatMatrix, Ring,
                      induced_map_on_homology, solve)
from .complex import WindowComplex, comparison_map
from .errors import NotChainMap, NotExactAtChainLevel


class GradedHomology:
    """Homology of a window in each interior degree, with representatives."""

    def __init__(self, window: WindowComplex, ring: Ring, data: dict):
        self.window = window
        self.ring = ring
        self.data = data

    @property
    def degrees(self):
        return sorted(self.data)

    def __getitem__(self, d: int) -> FgAbGroup:
        return self.data[d].group

    def groups(self) -> dict:
        return {d: h.group for d, h in self.data.items()}

    def representatives(self, d: int) -> list:
        return self.data[d].generators

    def dim(self, d: int) -> int:
        """Rank of the free part (the dimension over a field)."""
        return self.data[d].group.freeRank

    def is_zero(self) -> bool:
        return all(h.group.is_zero for h in self.data.values())

    def __repr__(self):
        body = ", ".join(f"{d}: {h.group}" for d, h in sorted(self.data.items()))
        return f"GradedHomology({{{body}}})"


def homology(w: WindowComplex, ring=Ring.INT) -> GradedHomology:
    """Per-degree homology over the interior degrees of the window."""
    ring = Ring.parse(ring)
    data = {d: HomologyData(w.d(d + 1), w.d(d), ring) for d in w.interior}
    return GradedHomology(w, ring, data)


@dataclass
class HomologyMap:
    """Map of graded homology, one matrix per degree."""

    source: GradedHomology
    target: GradedHomology
    maps: dict = field(default_factory=dict)

    def __getitem__(self, d: int) -> HomologyMorphism:
        return self.maps[d]

    @property
    def injective(self) -> dict:
        return {d: m.is_injective() for d, m in self.maps.items()}

    @property
    def surjective(self) -> dict:
        return {d: m.is_surjective() for d, m in self.maps.items()}

    def is_iso(self) -> bool:
        return all(m.is_iso() for m in self.maps.values())

    def compose(self, first: "HomologyMap") -> "HomologyMap":
        """``self`` after ``first``."""
        return HomologyMap(first.source, self.target,
                           {d: self.maps[d] @ first.maps[d] for d in self.maps if d in first.maps})


def check_chain_map(src: WindowComplex, tgt: WindowComplex, chain: dict) -> None:
    """Raise :class:`NotChainMap` unless ``chain`` commutes with both boundaries."""
    for d in range(src.dLow, src.dHigh + 2):
        if d in chain and d - 1 in chain:
            if tgt.d(d) @ chain[d] != chain[d - 1] @ src.d(d):
                raise NotChainMap(f"square fails to commute in degree {d}")


def induced_map(src: WindowComplex, tgt: WindowComplex, chain: dict, ring=Ring.INT,
                hsrc: GradedHomology | None = None,
                htgt: GradedHomology | None = None) -> HomologyMap:
    """Map on homology induced by a chain map given per degree."""
    ring = Ring.parse(ring)
    check_chain_map(src, tgt, chain)
    hsrc = hsrc or homology(src, ring)
    htgt = htgt or homology(tgt, ring)
    maps = {d: induced_map_on_homology(chain[d], hsrc.data[d], htgt.data[d], ring, check=False)
            for d in src.interior if d in htgt.data}
    return HomologyMap(hsrc, htgt, maps)


def comparison_chain(src: WindowComplex, tgt: WindowComplex) -> dict:
    return {d: comparison_map(src, tgt, d) for d in range(src.dLow - 1, src.dHigh + 2)}


def _same_source(w1: WindowComplex, w2: WindowComplex):
    if w1.source is None or w2.source is None or not (w1.source is w2.source
                                                      or w1.source == w2.source):
        raise NotChainMap("windows come from different complexes")
    if w1.spec.degreeWindow != w2.spec.degreeWindow:
        raise NotChainMap("windows cover different degrees")


def induced_inclusion(w1: WindowComplex, w2: WindowComplex, ring=Ring.INT, h1=None,
                      h2=None) -> HomologyMap:
    """Map induced by enlarging the action cut ``b1 <= b2`` at fixed level cut."""
    _same_source(w1, w2)
    s1, s2 = w1.spec, w2.spec
    if s1.aMuLevel != s2.aMuLevel or s1.muUpper != s2.muUpper:
        raise NotChainMap("inclusion needs equal level cuts")
    if s2.bAction is not None and (s1.bAction is None or s1.bAction > s2.bAction):
        raise NotChainMap("inclusion needs b1 <= b2")
    return induced_map(w1, w2, comparison_chain(w1, w2), ring, h1, h2)


def induced_projection(w1: WindowComplex, w2: WindowComplex, ring=Ring.INT, h1=None,
                       h2=None) -> HomologyMap:
    """Map induced by raising the level cut ``a1 <= a2`` at fixed action cut."""
    _same_source(w1, w2)
    s1, s2 = w1.spec, w2.spec
    if s1.bAction != s2.bAction or s1.muUpper != s2.muUpper:
        raise NotChainMap("projection needs equal action cuts")
    if s1.aMuLevel is not None and (s2.aMuLevel is None or s2.aMuLevel < s1.aMuLevel):
        raise NotChainMap("projection needs a1 <= a2")
    return induced_map(w1, w2, comparison_chain(w1, w2), ring, h1, h2)


# ---------------------------------------------------------------------------
# long exact sequences


@dataclass
class LesNode:
    name: str
    degree: int
    dim: int
    exact: bool


@dataclass
class LesReport:
    nodes: list
    connecting: dict
    dims: dict

    @property
    def exact(self) -> bool:
        return all(n.exact for n in self.nodes)

    def failures(self) -> list:
        return [n for n in self.nodes if not n.exact]


def _rat(m) -> RatMatrix:
    if isinstance(m, HomologyMorphism):
        return RatMatrix(m.matrix, m.rows, m.cols)
    return m.to_rational()


def les_check(A: WindowComplex, B: WindowComplex, C: WindowComplex, i_maps: dict,
              p_maps: dict) -> LesReport:
    """Long exact sequence of ``0 -> A -> B -> C -> 0`` over the rationals.

    ``i_maps`` and ``p_maps`` give the chain maps per degree.  The connecting
    map is computed by the usual zig-zag on representatives.
    """
    degrees = range(B.dLow - 1, B.dHigh + 2)
    for d in degrees:
        i, p = i_maps[d], p_maps[d]
        a, b, c = A.rank(d), B.rank(d), C.rank(d)
        if i.shape != (b, a) or p.shape != (c, b):
            raise NotExactAtChainLevel(f"map shapes do not fit in degree {d}")
        if i.rank() != a or p.rank() != c or not (p @ i).is_zero() or b != a + c:
            raise NotExactAtChainLevel(f"sequence is not short exact in degree {d}")
    try:
        check_chain_map(A, B, i_maps)
        check_chain_map(B, C, p_maps)
    except NotChainMap as exc:
        raise NotExactAtChainLevel(str(exc)) from exc
    ring = Ring.RAT
    hA, hB, hC = homology(A, ring), homology(B, ring), homology(C, ring)
    Hi = {d: induced_map_on_homology(i_maps[d], hA.data[d], hB.data[d], ring) for d in B.interior}
    Hp = {d: induced_map_on_homology(p_maps[d], hB.data[d], hC.data[d], ring) for d in B.interior}
    delta = {}
    for d in range(B.dLow + 1, B.dHigh + 1):
        cols = []
        for z in hC.representatives(d):
            lift = solve(p_maps[d], RatMatrix.from_columns([z], C.rank(d)))
            bvec = lift.col(0)
            db = B.d(d).apply(bvec)
            pre = solve(i_maps[d - 1], RatMatrix.from_columns([db], B.rank(d - 1)))
            if pre is None:
                raise NotExactAtChainLevel(f"zig-zag fails in degree {d}")
            cols.append(hA.data[d - 1].coords(pre.col(0)))
        tgt = hA[d - 1]
        mat = tuple(tuple(Fraction(c[r]) for c in cols) for r in range(tgt.ngens()))
        delta[d] = HomologyMorphism(hC[d], tgt, mat, ring)

    def exact_at(dim, incoming, outgoing):
        rin = _rat(incoming).rank() if incoming is not None else 0
        if outgoing is None:
            return True
        rout = _rat(outgoing).rank()
        comp_zero = incoming is None or (_rat(outgoing) @ _rat(incoming)).is_zero()
        if incoming is None:
            return True
        return comp_zero and rin + rout == dim

    nodes = []
    for d in sorted(B.interior, reverse=True):
        nodes.append(LesNode("B", d, hB.dim(d), exact_at(hB.dim(d), Hi[d], Hp[d])))
        if d in delta:
            nodes.append(LesNode("C", d, hC.dim(d), exact_at(hC.dim(d), Hp[d], delta[d])))
        if d + 1 in delta:
            nodes.append(LesNode("A", d, hA.dim(d), exact_at(hA.dim(d), delta[d + 1], Hi[d])))
    dims = {d: (hA.dim(d), hB.dim(d), hC.dim(d)) for d in B.interior}
    return LesReport(nodes, delta, dims)
