"""Bidirect grids of window homologies and the four Tate groups.

A grid holds ``HT_a^b`` for finitely many level cuts ``a`` and action cuts
``b``, together with the projections (raising ``a``) and the inclusions
(raising ``b``).  From it :func:`four_tate_groups` computes, per degree:

* ``top``    homology of the chain-level direct limit of the inverse limits,
* ``jp``     direct limit over ``b`` of inverse limits over ``a`` of homology,
* ``bottom`` homology of the chain-level inverse limit of direct limits,
* ``gw``     inverse limit over ``a`` of direct limits over ``b`` of homology,

plus the maps ``rho: top -> jp``, ``kappa: jp -> gw``, ``sigma: bottom -> gw``
and ``hk: top -> bottom``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import FgAbGroup, HomologyMorphism, RatMatrix, Ring, column_space, solve
from .complex import EquivariantComplex, TruncationSpec, instantiate_window
from .errors import GridTooSmall
from .homology import GradedHomology, homology, induced_map, comparison_chain
from .towers import (LimitResult, Tower, TowerColimit, Undecided, direct_limit, inverse_limit)


# ---------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class GridSpec:
    aValues: tuple
    bValues: tuple

    def __post_init__(self):
        object.__setattr__(self, "aValues", tuple(sorted(int(a) for a in self.aValues)))
        object.__setattr__(self, "bValues", tuple(sorted(Fraction(b) for b in self.bValues)))


def level_range(c: EquivariantComplex, degreeWindow) -> tuple:
    """Smallest and largest level of a chain generator in the padded degree window."""
    lo, hi = degreeWindow
    levels = [g.muLevel + (d - g.degree) // 2
              for g in c.generators for d in range(lo - 1, hi + 2) if (d - g.degree) % 2 == 0]
    if not levels:
        return (0, 0)
    return (min(levels), max(levels))


def default_grid(c: EquivariantComplex, degreeWindow=(-2, 8), horizon: bool = False,
                 extra: int = 2) -> GridSpec:
    """Every level cut that changes a window, plus one more on each side.

    Action cuts are the action values of the generators; for a complete
    (non-horizon) complex ``extra`` larger cuts are appended so that the
    stabilization in ``b`` is visible.
    """
    lo, hi = level_range(c, degreeWindow)
    a_values = range(lo - 1, hi + 2)
    b_values = sorted({g.hAction for g in c.generators})
    if not horizon:
        top = b_values[-1] if b_values else Fraction(0)
        b_values += [top + i for i in range(1, extra + 1)]
    return GridSpec(tuple(a_values), tuple(b_values))


class BidirectGrid:
    """Lazily computed ``HT_a^b`` with the two families of induced maps.

    ``None`` as ``a`` (or ``b``) stands for the chain-level limit window with
    no cut on that side.
    """

    def __init__(self, c: EquivariantComplex, ring=Ring.INT, spec: GridSpec | None = None,
                 degreeWindow=(-2, 8)):
        self.complex = c
        self.ring = Ring.parse(ring)
        self.degreeWindow = tuple(degreeWindow)
        self.spec = spec or default_grid(c, degreeWindow)
        self._windows = {}
        self._cells = {}
        self._maps = {}

    @property
    def a_values(self):
        return self.spec.aValues

    @property
    def b_values(self):
        return self.spec.bValues

    def window(self, a, b):
        key = (a, b)
        if key not in self._windows:
            self._windows[key] = instantiate_window(
                self.complex, TruncationSpec(a, b, self.degreeWindow))
        return self._windows[key]

    def cell(self, a, b):
        key = (a, b)
        if key not in self._cells:
            w = self.window(a, b)
            self._cells[key] = (w, homology(w, self.ring))
        return self._cells[key]

    def homology(self, a, b) -> GradedHomology:
        return self.cell(a, b)[1]

    def map(self, src, tgt):
        """Induced map between two cells ``(a, b)``, by the comparison chain map."""
        key = (src, tgt)
        if key not in self._maps:
            w1, h1 = self.cell(*src)
            w2, h2 = self.cell(*tgt)
            self._maps[key] = induced_map(w1, w2, comparison_chain(w1, w2), self.ring, h1, h2)
        return self._maps[key]

    def pi(self, i: int, j: int):
        """Projection ``HT_{a_i}^{b_j} -> HT_{a_(i+1)}^{b_j}``."""
        return self.map((self.a_values[i], self.b_values[j]),
                        (self.a_values[i + 1], self.b_values[j]))

    def iota(self, i: int, j: int):
        """Inclusion ``HT_{a_i}^{b_j} -> HT_{a_i}^{b_(j+1)}``."""
        return self.map((self.a_values[i], self.b_values[j]),
                        (self.a_values[i], self.b_values[j + 1]))

    def squares_commute(self) -> bool:
        for i in range(len(self.a_values) - 1):
            for j in range(len(self.b_values) - 1):
                p, q = self.pi(i, j), self.iota(i + 1, j)
                r, s = self.iota(i, j), self.pi(i, j + 1)
                for d in p.maps:
                    if q[d] @ p[d] != s[d] @ r[d]:
                        return False
        return True

    def chain_gens(self, a, b) -> dict:
        return self.window(a, b).gens


# ---------------------------------------------------------------------------
# diagram


@dataclass
class MapVerdict:
    name: str
    injective: bool | None
    surjective: bool | None
    matrices: dict = field(default_factory=dict)
    note: str = ""

    @property
    def iso(self) -> bool | None:
        if self.injective is False or self.surjective is False:
            return False
        if self.injective is None or self.surjective is None:
            return None
        return True

    def verdict(self) -> str:
        if self.iso:
            return "iso"
        parts = []
        for word, v in (("injective", self.injective), ("surjective", self.surjective)):
            parts.append(word if v else ("not " + word if v is False else word + "?"))
        return ", ".join(parts)

    def to_dict(self):
        return {"injective": self.injective, "surjective": self.surjective,
                "verdict": self.verdict(), "note": self.note}


@dataclass
class DegreeDiagram:
    degree: int
    top: LimitResult
    jp: LimitResult
    bottom: LimitResult
    gw: LimitResult
    rho: MapVerdict
    kappa: MapVerdict
    sigma: MapVerdict
    hk: MapVerdict
    commutes: bool | None

    def group_summary(self, which: str) -> str:
        return describe_limit(getattr(self, which))

    def to_dict(self):
        return {"degree": self.degree,
                **{k: limit_to_dict(getattr(self, k)) for k in ("top", "jp", "bottom", "gw")},
                **{k: getattr(self, k).to_dict() for k in ("rho", "kappa", "sigma", "hk")},
                "commutes": self.commutes}


def describe_limit(r: LimitResult) -> str:
    v = r.value
    rat = r.tower is not None and r.tower.ring is Ring.RAT
    if isinstance(v, FgAbGroup):
        return str(v).replace("Z", "Q") if rat else str(v)
    if isinstance(v, TowerColimit):
        return "colimit(" + ", ".join(str(g) for g in v.prefix_groups[-2:]) + ", ...)"
    return "undecided"


def limit_to_dict(r: LimitResult) -> dict:
    v = r.value
    out = {"status": r.status, "summary": describe_limit(r)}
    if isinstance(v, FgAbGroup):
        out["group"] = v.to_dict()
    elif isinstance(v, TowerColimit):
        out["colimit"] = {"levels": [g.to_dict() for g in v.prefix_groups]}
    elif isinstance(v, Undecided):
        out["reason"] = v.reason
    return out


@dataclass
class TateDiagram:
    ring: Ring
    degreeWindow: tuple
    degrees: dict
    horizon: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    grid: BidirectGrid | None = None

    def __getitem__(self, d: int) -> DegreeDiagram:
        return self.degrees[d]

    def ranks(self, which: str) -> dict:
        """Rank over the rationals of one of the four groups, per degree."""
        out = {}
        for d, e in self.degrees.items():
            v = getattr(e, which).value
            if isinstance(v, FgAbGroup):
                out[d] = v.freeRank
            elif isinstance(v, TowerColimit):
                out[d] = v.rank(min(40, v.computed_levels + 20))
            else:
                out[d] = None
        return out

    def rho_iso(self) -> bool:
        return all(e.rho.iso for e in self.degrees.values())

    def commutes(self) -> bool:
        return all(e.commutes for e in self.degrees.values())

    def to_dict(self) -> dict:
        return {"ring": self.ring.value, "degreeWindow": list(self.degreeWindow),
                "degrees": {str(d): e.to_dict() for d, e in sorted(self.degrees.items())},
                "horizon": self.horizon, "notes": list(self.notes)}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def table(self) -> str:
        head = ["deg", "top", "jp", "bottom", "gw", "rho", "kappa", "sigma", "square"]
        rows = []
        for d, e in sorted(self.degrees.items()):
            sq = {True: "commutes", False: "FAILS", None: "n/a"}[e.commutes]
            rows.append([str(d)] + [describe_limit(getattr(e, w))
                                    for w in ("top", "jp", "bottom", "gw")]
                        + [getattr(e, m).verdict() for m in ("rho", "kappa", "sigma")] + [sq])
        widths = [max(len(r[i]) for r in rows + [head]) for i in range(len(head))]
        lines = ["  ".join(c.rjust(w) if i == 0 else c.ljust(w)
                           for i, (c, w) in enumerate(zip(r, widths))).rstrip()
                 for r in [head] + rows]
        for n in self.notes:
            lines.append("note: " + n)
        return "\n".join(lines)


@dataclass
class HorizonProbe:
    """How to rebuild the complex at other horizons.

    ``rule(d, j)`` optionally continues the top-row tower in degree ``d``
    beyond the computed levels, as the map from level ``j`` to ``j + 1``.
    """

    builder: Callable
    horizons: tuple = (4, 6, 8)
    rule: Callable | None = None
    reference_offset: int = 2


def _restrict(m: HomologyMorphism, src_basis, tgt: LimitResult | None, tgt_basis, ring):
    """Matrix of ``m`` on chosen bases (``None`` meaning all generators)."""
    if src_basis is None and tgt_basis is None:
        return m
    cols = []
    src_vecs = src_basis if src_basis is not None else [
        [int(i == j) for i in range(m.cols)] for j in range(m.cols)]
    for s in src_vecs:
        img = [sum(Fraction(m.matrix[i][k]) * s[k] for k in range(m.cols)) for i in range(m.rows)]
        if tgt_basis is None:
            cols.append(img)
        else:
            mat = RatMatrix.from_columns(tgt_basis, m.rows)
            x = solve(mat, RatMatrix.from_columns([img], m.rows))
            if x is None:
                raise ValueError("image leaves the limit subspace")
            cols.append(x.col(0))
    src = m.source if src_basis is None else FgAbGroup(len(src_vecs))
    tgt_g = m.target if tgt_basis is None else FgAbGroup(len(tgt_basis))
    mat = tuple(tuple(c[r] for c in cols) for r in range(tgt_g.ngens()))
    return HomologyMorphism(src, tgt_g, mat, ring)


def _inverse_basis(r: LimitResult, i: int):
    """Basis of the inverse limit inside level ``i``, or ``None`` for the whole group.

    Returns ``False`` when level ``i`` does not represent the limit.
    """
    if r.status == "stable":
        return None if i >= r.index else False
    if r.status == "eventual":
        top = r.top if r.top is not None else len(r.tower) - 1 - _margin_of(r)
        if i >= top or i < r.index:
            return False
        if i == r.index:
            return r.basis
        a = r.tower.composite(len(r.tower) - 1, i)
        m = RatMatrix(a.matrix, a.rows, a.cols)
        return column_space(m).columns() if a.rows and a.cols and m.rank() else []
    return False


def _margin_of(r: LimitResult) -> int:
    return getattr(r, "_margin", 1)


def _choose_level(results) -> int | None:
    n = min(len(r.tower) for r in results)
    for i in range(n - 1, -1, -1):
        if all(_inverse_basis(r, i) is not False for r in results):
            return i
    return None


def _verdict_from_levels(name, mats: dict, src: LimitResult, tgt_zero: bool,
                         note="") -> MapVerdict:
    """Injectivity and surjectivity of a map out of a direct limit.

    ``mats[j]`` is the map on level ``j``.  A stable source is judged on its
    last level.  For a colimit source the last computed level gives
    surjectivity; injectivity is only decided against a zero target.
    """
    if not mats:
        return MapVerdict(name, None, None, {}, note or "not computed")
    last = max(mats)
    m = mats[last]
    if src.status == "stable":
        return MapVerdict(name, m.is_injective(), m.is_surjective(), mats, note)
    if tgt_zero:
        src_zero = isinstance(src.value, FgAbGroup) and src.value.is_zero
        if isinstance(src.value, TowerColimit):
            src_zero = src.value.rank(src.value.computed_levels + 5) == 0 and not any(
                g.torsion for g in src.value.prefix_groups)
        return MapVerdict(name, src_zero, True, mats, note)
    return MapVerdict(name, None, True if m.is_surjective() else None, mats, note)


def _levelwise_iso(name, mats: dict, note="") -> MapVerdict:
    ok = bool(mats) and all(m.is_iso() for m in mats.values())
    if ok:
        return MapVerdict(name, True, True, mats, note or "isomorphism on every level")
    return MapVerdict(name, None, None, mats, note or "not an isomorphism on some level")


def _rule_matches(t: Tower, rule, d) -> bool:
    for j, m in enumerate(t.maps):
        r = rule(d, j)
        if r.source != m.source or r.target != m.target:
            return False
        if any(abs(x) != abs(y) for ra, rb in zip(r.matrix, m.matrix) for x, y in zip(ra, rb)):
            return False
    return True


def _with_margin(r: LimitResult, margin: int) -> LimitResult:
    r._margin = margin
    return r


def four_tate_groups(c: EquivariantComplex, ring=Ring.RAT, degreeWindow=(-2, 8),
                     gridSpec: GridSpec | None = None, horizonProbe: HorizonProbe | None = None,
                     margin: int = 1, _probe: bool = True) -> TateDiagram:
    """The four limit orderings of Tate homology with the canonical maps, per degree.

    Without ``horizonProbe`` the complex is taken to be complete.  With it,
    ``c`` is read as a horizon truncation: level cuts whose windows are not
    fully inside the horizon are excluded from the inverse limits, and the
    computation is repeated at the probe horizons.
    """
    ring = Ring.parse(ring)
    lo_d, hi_d = degreeWindow
    # one extra degree on top so that the degree above each reported one is available
    inner = (lo_d, hi_d + 1)
    horizon = horizonProbe is not None
    spec = gridSpec or default_grid(c, inner, horizon=horizon)
    grid = BidirectGrid(c, ring, spec, inner)
    A, B = spec.aValues, spec.bValues
    if len(A) < 2 or not B:
        raise GridTooSmall("grid needs at least two level cuts and one action cut")
    a_min = A[0]
    notes = []

    # chain-level stabilization, checked rather than assumed
    for b in B:
        if grid.chain_gens(a_min, b) != grid.chain_gens(None, b):
            raise GridTooSmall(f"chain groups at b={b} have not stabilized at a={a_min}")
        if grid.chain_gens(A[-1], b) != {d: [] for d in grid.chain_gens(A[-1], b)}:
            raise GridTooSmall(f"window at the top level cut a={A[-1]} is not empty")
    b_top = B[-1]
    if not horizon:
        for a in A:
            if grid.chain_gens(a, b_top) != grid.chain_gens(a, None):
                raise GridTooSmall(f"chain groups at a={a} have not stabilized at b={b_top}")

    # level cuts whose b-limit window is inside the horizon
    # (level cut, degree) pairs whose b-limit window is inside the horizon
    covered = {(a, d): True for a in A for d in range(lo_d, hi_d + 2)}
    if horizon:
        K = max(g.hAction for g in c.generators)
        reference = horizonProbe.builder(int(K) + horizonProbe.reference_offset)
        rc = reference.complex if hasattr(reference, "complex") else reference
        for a in A:
            ref = instantiate_window(rc, TruncationSpec(a, None, inner)).gens
            own = grid.chain_gens(a, None)
            for d in range(lo_d, hi_d + 2):
                covered[(a, d)] = all(ref[e] == own[e] for e in (d - 1, d, d + 1))

    degrees = {}
    for d in range(lo_d, hi_d + 1):
        degrees[d] = _degree_diagram(grid, d, covered, margin, horizonProbe, notes)

    diagram = TateDiagram(ring, tuple(degreeWindow), degrees, {}, notes, grid)
    if horizon:
        diagram.horizon = _horizon_record(diagram, c, ring, degreeWindow, horizonProbe,
                                          margin, _probe)
    return diagram


def _degree_diagram(grid: BidirectGrid, d: int, covered: dict, margin: int,
                    probe: HorizonProbe | None, notes: list) -> DegreeDiagram:
    ring = grid.ring
    A, B = grid.a_values, grid.b_values
    na, nb = len(A), len(B)
    a_min = A[0]

    # inverse limits over a at each b, then the direct limit over b
    for j in range(nb):
        groups = [grid.homology(A[i], B[j])[d] for i in range(na - 1, -1, -1)]
        maps = [grid.pi(i, j)[d] for i in range(na - 2, -1, -1)]
        res = inverse_limit(Tower(groups, maps, "inverse", ring), margin)
        if res.status != "stable":
            raise GridTooSmall(f"inverse limit over a at b={B[j]} not stable in degree {d}")
    jp_groups = [grid.homology(a_min, b)[d] for b in B]
    jp_maps = [grid.iota(0, j)[d] for j in range(nb - 1)]
    jp_tower = Tower(jp_groups, jp_maps, "direct", ring, labels=list(B))
    rule = None
    if probe is not None and probe.rule is not None:
        if _rule_matches(jp_tower, probe.rule, d):
            rule = (lambda j, _d=d: probe.rule(_d, j))
        else:
            notes.append(f"degree {d}: continuation rule does not match the computed tower")
    jp = _direct(jp_tower, margin, rule)

    # chain-first top row: homology of the windows with no level cut
    top_groups = [grid.homology(None, b)[d] for b in B]
    top_maps = [grid.map((None, B[j]), (None, B[j + 1]))[d] for j in range(nb - 1)]
    top = _direct(Tower(top_groups, top_maps, "direct", ring, labels=list(B)), margin, rule)

    rho_m = {j: grid.map((None, B[j]), (a_min, B[j]))[d] for j in range(nb)}
    rho = _levelwise_iso("rho", rho_m)

    # direct limits over b at each a; decided cuts form the range of the inverse limit
    decided = []
    for i in range(na - 1, -1, -1):
        a = A[i]
        if not covered[(a, d)]:
            break
        groups = [grid.homology(a, b)[d] for b in B]
        maps = [grid.iota(i, j)[d] for j in range(nb - 1)]
        res = direct_limit(Tower(groups, maps, "direct", ring), margin)
        if res.status != "stable":
            break
        decided.append(i)
    b_top = B[-1]
    if len(decided) < margin + 1:
        und = LimitResult("undecided", Undecided("too few decided level cuts"),
                          Tower([], [], "inverse", ring))
        empty = MapVerdict("", None, None, {}, "limit undecided")
        return DegreeDiagram(d, top, jp, und, und, rho,
                             _named(empty, "kappa"), _named(empty, "sigma"),
                             _named(empty, "hk"), None)
    gw_groups = [grid.homology(A[i], b_top)[d] for i in decided]
    gw_maps = [grid.pi(i, nb - 1)[d] for i in decided[1:]]
    gw = _with_margin(inverse_limit(Tower(gw_groups, gw_maps, "inverse", ring,
                                          labels=[A[i] for i in decided]), margin), margin)
    bot_groups = [grid.homology(A[i], None)[d] for i in decided]
    bot_maps = [grid.map((A[i], None), (A[i + 1], None))[d] for i in decided[1:]]
    bottom = _with_margin(inverse_limit(Tower(bot_groups, bot_maps, "inverse", ring,
                                              labels=[A[i] for i in decided]), margin), margin)
    if ring is Ring.INT and bottom.decided:
        # lim^1 of the tower one degree up vanishes under Mittag-Leffler
        up_idx = []
        for i in decided:
            if not covered[(A[i], d + 1)]:
                break
            up_idx.append(i)
        up_groups = [grid.homology(A[i], None)[d + 1] for i in up_idx]
        up_maps = [grid.map((A[i], None), (A[i + 1], None))[d + 1] for i in up_idx[1:]]
        finite = all(g.freeRank == 0 for g in up_groups)
        up = inverse_limit(Tower(up_groups, up_maps, "inverse", ring), margin)
        if len(up_idx) < margin + 1 or (up.status != "stable" and not finite):
            bottom = LimitResult("undecided", Undecided(
                "Mittag-Leffler not verified one degree up"), bottom.tower)
    lvl = _choose_level([gw, bottom]) if gw.decided and bottom.decided else None
    if lvl is None:
        empty = MapVerdict("", None, None, {}, "limit undecided")
        return DegreeDiagram(d, top, jp, bottom, gw, rho, _named(empty, "kappa"),
                             _named(empty, "sigma"), _named(empty, "hk"), None)
    a_rep = A[decided[lvl]]
    gw_basis = _inverse_basis(gw, lvl)
    bot_basis = _inverse_basis(bottom, lvl)
    gw_zero = isinstance(gw.value, FgAbGroup) and gw.value.is_zero
    bot_zero = isinstance(bottom.value, FgAbGroup) and bottom.value.is_zero

    kappa_m, hk_m, comm = {}, {}, True
    sig = grid.map((a_rep, None), (a_rep, b_top))[d]
    sigma_m = _restrict(sig, bot_basis, gw, gw_basis, ring)
    for j, b in enumerate(B):
        # kappa: project to the representing level, then include up to the top action
        k1 = grid.map((a_min, b), (a_rep, b))[d]
        k2 = grid.map((a_rep, b), (a_rep, b_top))[d]
        kappa_m[j] = _restrict(k2 @ k1, None, gw, gw_basis, ring)
        # hk: the chain-level canonical map, in one step
        hk_m[j] = _restrict(grid.map((None, b), (a_rep, None))[d], None, bottom, bot_basis, ring)
        lhs = sigma_m @ hk_m[j]
        rhs = kappa_m[j] @ rho_m[j]
        if lhs != rhs:
            comm = False
    kappa = _verdict_from_levels("kappa", kappa_m, jp, gw_zero)
    hk = _verdict_from_levels("hk", hk_m, top, bot_zero)
    sigma = MapVerdict("sigma", sigma_m.is_injective(), sigma_m.is_surjective(),
                       {0: sigma_m})
    return DegreeDiagram(d, top, jp, bottom, gw, rho, kappa, sigma, hk, comm)


def _named(v: MapVerdict, name: str) -> MapVerdict:
    return MapVerdict(name, v.injective, v.surjective, {}, v.note)


def _direct(t: Tower, margin: int, rule) -> LimitResult:
    st = direct_limit(t, margin)
    if st.status == "stable" or rule is None:
        return st
    return direct_limit(t, margin, rule=rule) if st.status == "undecided" else \
        LimitResult("colimit", TowerColimit(t.groups, t.maps, t.ring, rule=rule), t)


def _horizon_record(diagram: TateDiagram, c, ring, degreeWindow, probe: HorizonProbe,
                    margin, recurse) -> dict:
    record = {"horizons": list(probe.horizons), "rule": probe.rule is not None}
    if not recurse:
        return record
    summaries = {}
    for K in probe.horizons:
        other = probe.builder(K)
        oc = other.complex if hasattr(other, "complex") else other
        dg = four_tate_groups(oc, ring, degreeWindow, None, probe, margin, _probe=False)
        summaries[K] = {d: tuple(describe_limit(getattr(e, w))
                                 for w in ("top", "jp", "bottom", "gw"))
                        for d, e in dg.degrees.items()}
    first = summaries[probe.horizons[0]]
    stable = {d: all(s[d] == first[d] for s in summaries.values()) for d in first}
    colim = {d: any(isinstance(diagram.degrees[d].jp.value, TowerColimit) for _ in [0])
             for d in diagram.degrees}
    record["stable"] = {str(d): v for d, v in stable.items()}
    record["colimit_in_K"] = {str(d): v for d, v in colim.items()}
    record["summaries"] = {str(K): {str(d): list(v) for d, v in s.items()}
                           for K, s in summaries.items()}
    record["caveat"] = ("the inverse limits over level cuts use only cuts inside the horizon; "
                        "their values are horizon-truncated")
    return record


def sigma_surjectivity(diagram: TateDiagram) -> dict:
    """Per-degree surjectivity of sigma (``None`` where undecided)."""
    return {d: e.sigma.surjective for d, e in diagram.degrees.items()}


def u_periodic(diagram: TateDiagram) -> bool:
    """The report in degree ``d`` matches the one in degree ``d + 2``."""
    ds = sorted(diagram.degrees)
    for d in ds:
        if d + 2 not in diagram.degrees:
            continue
        e, f = diagram.degrees[d], diagram.degrees[d + 2]
        for w in ("top", "jp", "bottom", "gw"):
            if describe_limit(getattr(e, w)) != describe_limit(getattr(f, w)):
                return False
        for w in ("rho", "kappa", "sigma", "hk"):
            if getattr(e, w).verdict() != getattr(f, w).verdict():
                return False
    return True


# ---------------------------------------------------------------------------
# localization of a graded module


@dataclass
class LocalizedModule:
    """Per-degree eventual image of a degree ``-2`` endomorphism."""

    dims: dict
    depth: dict
    status: dict

    def rank(self, d: int):
        return self.dims.get(d)

    def decided(self) -> bool:
        return all(s == "stable" for s in self.status.values())


def localize_module(dims: dict, T: dict, probeDepth: int = 6, margin: int = 1) -> LocalizedModule:
    """Localization of a graded module along a degree ``-2`` endomorphism, over a field.

    ``dims[d]`` is the dimension in degree ``d`` and ``T[d]`` the matrix of
    ``H_{d+2} -> H_d``.  In degree ``d`` the localization is the inverse
    limit of ``H_d <- H_{d+2} <- H_{d+4} <- ...``, computed from the eventual
    images of the available part of the tower (at most ``probeDepth`` steps).
    """
    out, depth, status = {}, {}, {}
    for d in sorted(dims):
        groups = [FgAbGroup(dims[d])]
        maps = []
        for j in range(1, probeDepth + 1):
            src = d + 2 * j
            if src not in dims or src - 2 not in T:
                break
            groups.append(FgAbGroup(dims[src]))
            m = T[src - 2]
            maps.append(HomologyMorphism(groups[-1], groups[-2],
                                         tuple(tuple(r) for r in m.tolist()), Ring.RAT))
        res = inverse_limit(Tower(groups, maps, "inverse", Ring.RAT), margin)
        if res.decided:
            out[d], depth[d], status[d] = res.value.freeRank, res.index, "stable"
        else:
            out[d], depth[d], status[d] = None, None, "undecided"
    return LocalizedModule(out, depth, status)


def _rank(m, rows, cols) -> int:
    if rows == 0 or cols == 0:
        return 0
    return RatMatrix(m.tolist() if hasattr(m, "tolist") else m, rows, cols).rank()


def sh_equivariant_module(c: EquivariantComplex, degreeWindow=(-2, 8), b=None,
                          level: int = 0):
    """One-sided homology at a level cut with its degree ``-2`` operator, over Q.

    Returns ``(dims, T)`` where ``T[d]`` is the projection to the next level
    cut followed by the inverse u-shift, as a map ``H_{d+2} -> H_d``.
    """
    from .complex import u_shift
    lo, hi = degreeWindow
    big = (lo, hi + 2)
    w0 = instantiate_window(c, TruncationSpec(level, b, big))
    w1 = instantiate_window(c, TruncationSpec(level + 1, b, big))
    h0 = homology(w0, Ring.RAT)
    h1 = homology(w1, Ring.RAT)
    shift = u_shift(w1, steps=-1)
    wb = shift.target
    hb = homology(wb, Ring.RAT)
    proj = induced_map(w0, w1, comparison_chain(w0, w1), Ring.RAT, h0, h1)
    back = induced_map(wb, w0, comparison_chain(wb, w0), Ring.RAT, hb, h0)
    dims = {d: h0.dim(d) for d in range(lo, hi + 1)}
    T = {}
    from .algebra import induced_map_on_homology
    for d in range(lo, hi + 1):
        if d + 2 > hi + 2:
            continue
        sh = induced_map_on_homology(shift(d + 2), h1.data[d + 2], hb.data[d], Ring.RAT,
                                     check=False)
        m = back[d] @ sh @ proj[d + 2]
        T[d] = RatMatrix(m.matrix, m.rows, m.cols) if m.rows and m.cols else \
            RatMatrix.zeros(m.rows, m.cols)
    dims.update({d: h0.dim(d) for d in range(hi + 1, hi + 3)})
    return dims, T


# ---------------------------------------------------------------------------
# backwards homology


@dataclass
class BackwardsReport:
    les: dict
    rho_iso: dict
    groups: dict
    exact: bool

    def to_dict(self):
        return {"exact": self.exact, "rho_iso": {str(k): v for k, v in self.rho_iso.items()},
                "groups": {str(d): list(v) for d, v in self.groups.items()}}


def backwards_split(c: EquivariantComplex, degreeWindow=(-2, 8), a: int | None = None,
                    bValues=None) -> BackwardsReport:
    """Split off the part at level ``<= 0`` and check the long exact sequence.

    The subcomplex keeps levels ``a .. 0``, the quotient keeps levels ``>= 1``
    (isomorphic to the level ``>= 0`` window by a u-shift).  Coefficients are
    rational.
    """
    from .homology import les_check
    lo, _ = level_range(c, degreeWindow)
    a = lo - 1 if a is None else a
    if bValues is None:
        bValues = sorted({g.hAction for g in c.generators})
    les, rho, groups = {}, {}, {}
    exact = True
    for b in bValues:
        sub = instantiate_window(c, TruncationSpec(a, b, degreeWindow, muUpper=0))
        full = instantiate_window(c, TruncationSpec(a, b, degreeWindow))
        quot = instantiate_window(c, TruncationSpec(max(a, 1), b, degreeWindow))
        i_maps = comparison_chain(sub, full)
        p_maps = comparison_chain(full, quot)
        rep = les_check(sub, full, quot, i_maps, p_maps)
        les[b] = rep
        exact = exact and rep.exact
        # chain-first against homology-first: the level cut is already past every generator
        for name, spec in (("B", TruncationSpec(None, b, degreeWindow, muUpper=0)),
                           ("T", TruncationSpec(None, b, degreeWindow))):
            w_inf = instantiate_window(c, spec)
            w_a = sub if name == "B" else full
            m = induced_map(w_inf, w_a, comparison_chain(w_inf, w_a), Ring.RAT)
            rho[(name, b)] = m.is_iso()
        groups = {d: v for d, v in rep.dims.items()}
    return BackwardsReport(les, rho, groups, exact)
