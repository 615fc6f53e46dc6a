"""u-equivariant doubly filtered chain complexes and their finite windows.

A complex is given by finitely many base generators ``g``.  The actual chain
groups are spanned by the formal products ``u^k g`` (k any integer), where
``u^k g`` has degree ``degree(g) + 2k`` and level ``muLevel(g) + k``.  The
boundary is u-linear, so it suffices to store ``d g`` for each base ``g``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .algebra import IntMatrix, RatMatrix, Ring, _Matrix
from .errors import InvalidComplex, NonInvertiblePivot, WindowMismatch


@dataclass(frozen=True)
class BaseGenerator:
    id: str
    degree: int
    muLevel: int
    hAction: Fraction = Fraction(0)
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "hAction", Fraction(self.hAction))


@dataclass(frozen=True)
class BoundaryTerm:
    coeff: int
    uShift: int
    target: str


@dataclass(frozen=True)
class Violation:
    kind: str
    source: str
    detail: str

    def __str__(self):
        return f"{self.kind} at {self.source}: {self.detail}"


class EquivariantComplex:
    """Base generators plus the boundary of each one, as u-shifted terms."""

    def __init__(self, generators: Iterable[BaseGenerator], boundary=None, name: str = ""):
        self.generators = tuple(generators)
        boundary = boundary or {}
        self.boundary = {g.id: tuple(boundary.get(g.id, ())) for g in self.generators}
        for key in boundary:
            if key not in self.boundary:
                self.boundary[key] = tuple(boundary[key])
        self._by_id = {}
        for g in self.generators:
            self._by_id.setdefault(g.id, g)
        self.name = name
        self._report = None

    def gen(self, gid: str) -> BaseGenerator:
        return self._by_id[gid]

    def __contains__(self, gid):
        return gid in self._by_id

    def terms(self, gid: str):
        return self.boundary.get(gid, ())

    def validation_report(self):
        if self._report is None:
            self._report = validate(self)
        return self._report

    # serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "generators": [
                {"id": g.id, "degree": g.degree, "muLevel": g.muLevel,
                 "hAction": f"{g.hAction.numerator}/{g.hAction.denominator}", "label": g.label}
                for g in self.generators
            ],
            "boundary": {
                gid: [{"coeff": t.coeff, "uShift": t.uShift, "target": t.target} for t in ts]
                for gid, ts in self.boundary.items() if ts
            },
        }

    @classmethod
    def from_dict(cls, doc: dict, name: str = "") -> "EquivariantComplex":
        gens = [BaseGenerator(str(g["id"]), int(g["degree"]), int(g["muLevel"]),
                              Fraction(str(g.get("hAction", "0"))), g.get("label", ""))
                for g in doc["generators"]]
        bd = {str(k): [BoundaryTerm(int(t["coeff"]), int(t["uShift"]), str(t["target"]))
                       for t in v]
              for k, v in doc.get("boundary", {}).items()}
        return cls(gens, bd, name=name)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str, name: str = "") -> "EquivariantComplex":
        return cls.from_dict(json.loads(text), name=name)

    def __eq__(self, other):
        if not isinstance(other, EquivariantComplex):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"EquivariantComplex({self.name or ''!s}, {len(self.generators)} generators)"


def _boundary_squared(c: EquivariantComplex, gid: str) -> dict:
    out = {}
    for t in c.terms(gid):
        if t.target not in c:
            continue
        for s in c.terms(t.target):
            key = (s.target, t.uShift + s.uShift)
            out[key] = out.get(key, 0) + t.coeff * s.coeff
    return {k: v for k, v in out.items() if v}


def validate(c: EquivariantComplex) -> list:
    """List of every violated invariant; empty iff the complex is valid."""
    report = []
    seen = set()
    for g in c.generators:
        if g.id in seen:
            report.append(Violation("duplicate-id", g.id, "id used more than once"))
        seen.add(g.id)
    for gid in c.boundary:
        if gid not in seen:
            report.append(Violation("unknown-source", gid, "boundary given for unknown id"))
    single_level = len({g.muLevel for g in c.generators}) <= 1
    for g in c.generators:
        for t in c.terms(g.id):
            where = f"{g.id} -> u^{t.uShift} {t.target}"
            if t.coeff == 0:
                report.append(Violation("zero-coefficient", g.id, where))
            if t.target not in c:
                report.append(Violation("unknown-target", g.id, where))
                continue
            h = c.gen(t.target)
            if h.degree + 2 * t.uShift != g.degree - 1:
                report.append(Violation(
                    "degree", g.id,
                    f"{where}: {h.degree} + 2*{t.uShift} != {g.degree} - 1"))
            if h.muLevel + t.uShift > g.muLevel:
                report.append(Violation("mu-monotone", g.id, f"{where} raises the level"))
            if h.hAction > g.hAction:
                report.append(Violation("h-monotone", g.id, f"{where} raises the action"))
            if single_level and t.uShift > 0:
                report.append(Violation("single-level-shift", g.id,
                                        f"{where} has positive shift"))
        for (tid, k), v in sorted(_boundary_squared(c, g.id).items()):
            report.append(Violation("d-squared", g.id, f"coefficient {v} on u^{k} {tid}"))
    return report


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class TruncationSpec:
    """Window ``muLevel + k >= aMuLevel``, ``hAction <= bAction``, degrees in a range.

    ``None`` stands for an infinite cut on either side.  ``muUpper`` adds an
    optional upper cut on the level, which also gives a subcomplex.
    """

    aMuLevel: int | None
    bAction: Fraction | None
    degreeWindow: tuple = (-2, 8)
    muUpper: int | None = None

    def __post_init__(self):
        lo, hi = self.degreeWindow
        if lo > hi:
            raise ValueError("empty degree window")
        object.__setattr__(self, "degreeWindow", (int(lo), int(hi)))
        if self.bAction is not None:
            object.__setattr__(self, "bAction", Fraction(self.bAction))

    def keeps(self, g: BaseGenerator, k: int) -> bool:
        if self.aMuLevel is not None and g.muLevel + k < self.aMuLevel:
            return False
        if self.muUpper is not None and g.muLevel + k > self.muUpper:
            return False
        return self.bAction is None or g.hAction <= self.bAction

    def shifted(self, steps: int = 1) -> "TruncationSpec":
        a = None if self.aMuLevel is None else self.aMuLevel + steps
        top = None if self.muUpper is None else self.muUpper + steps
        lo, hi = self.degreeWindow
        return TruncationSpec(a, self.bAction, (lo + 2 * steps, hi + 2 * steps), top)


class WindowComplex:
    """Finite chain complex over the degrees ``dLow-1 .. dHigh+1``.

    ``gens[d]`` lists generator keys ``(base id, k)``; ``boundary[d]`` is the
    matrix of ``C_d -> C_{d-1}`` for ``d`` in ``dLow .. dHigh+1``.
    """

    def __init__(self, gens: dict, boundary: dict, dLow: int, dHigh: int, source=None,
                 spec: TruncationSpec | None = None, note: str = ""):
        self.gens = {d: list(v) for d, v in gens.items()}
        self.boundary = dict(boundary)
        self.dLow = dLow
        self.dHigh = dHigh
        self.source = source
        self.spec = spec
        self.note = note
        self.index = {d: {key: i for i, key in enumerate(v)} for d, v in self.gens.items()}

    @property
    def interior(self) -> range:
        return range(self.dLow, self.dHigh + 1)

    def rank(self, d: int) -> int:
        return len(self.gens.get(d, ()))

    def d(self, deg: int) -> _Matrix:
        """Boundary ``C_deg -> C_{deg-1}`` (zero matrix outside the stored range)."""
        m = self.boundary.get(deg)
        if m is None:
            return IntMatrix.zeros(self.rank(deg - 1), self.rank(deg))
        return m

    def check_d_squared(self) -> bool:
        return all((self.d(k - 1) @ self.d(k)).is_zero()
                   for k in range(self.dLow + 1, self.dHigh + 2))

    def total_rank(self) -> int:
        return sum(len(v) for v in self.gens.values())

    def __repr__(self):
        ranks = {d: self.rank(d) for d in sorted(self.gens)}
        return f"WindowComplex({ranks})"


def instantiate_window(c: EquivariantComplex, spec: TruncationSpec) -> WindowComplex:
    """Quotient by the part below ``aMuLevel`` of the subcomplex below ``bAction``."""
    bad = c.validation_report()
    if bad:
        raise InvalidComplex("; ".join(str(v) for v in bad[:5]))
    lo, hi = spec.degreeWindow
    gens = {}
    for deg in range(lo - 1, hi + 2):
        keys = []
        for g in c.generators:
            if (deg - g.degree) % 2:
                continue
            k = (deg - g.degree) // 2
            if spec.keeps(g, k):
                keys.append((g.id, k))
        gens[deg] = keys
    index = {d: {key: i for i, key in enumerate(v)} for d, v in gens.items()}
    boundary = {}
    for deg in range(lo, hi + 2):
        rows = [[0] * len(gens[deg]) for _ in gens[deg - 1]]
        for j, (gid, k) in enumerate(gens[deg]):
            for t in c.terms(gid):
                key = (t.target, k + t.uShift)
                i = index[deg - 1].get(key)
                if i is not None:
                    rows[i][j] += t.coeff
                    continue
                h = c.gen(t.target)
                if spec.bAction is not None and h.hAction > spec.bAction:
                    raise InvalidComplex(f"term {gid} -> {key} leaves the action window")
                if spec.muUpper is not None and h.muLevel + key[1] > spec.muUpper:
                    raise InvalidComplex(f"term {gid} -> {key} leaves the level window")
                # otherwise the term lies below the level cut and is quotiented out
        boundary[deg] = IntMatrix(rows, len(gens[deg - 1]), len(gens[deg]))
    w = WindowComplex(gens, boundary, lo, hi, source=c, spec=spec)
    if not w.check_d_squared():
        raise InvalidComplex("instantiated window fails d^2 = 0")
    return w


def comparison_map(src: WindowComplex, tgt: WindowComplex, deg: int) -> IntMatrix:
    """Matrix sending each generator of ``src`` to the same generator of ``tgt`` or to 0.

    Between windows of one complex this is the inclusion (growing b) or the
    projection (growing a); whether it is a chain map is checked by callers.
    """
    rows = [[0] * src.rank(deg) for _ in range(tgt.rank(deg))]
    for j, key in enumerate(src.gens.get(deg, ())):
        i = tgt.index.get(deg, {}).get(key)
        if i is not None:
            rows[i][j] = 1
    return IntMatrix(rows, tgt.rank(deg), src.rank(deg))


@dataclass
class UShift:
    """Chain isomorphism ``(g, k) -> (g, k + steps)`` between two windows."""

    source: WindowComplex
    target: WindowComplex
    steps: int
    maps: dict = field(default_factory=dict)

    def inverse(self) -> "UShift":
        inv = {d + 2 * self.steps: m.T for d, m in self.maps.items()}
        return UShift(self.target, self.source, -self.steps, inv)

    def __call__(self, deg: int) -> IntMatrix:
        return self.maps[deg]

    def intertwines(self) -> bool:
        s = self.source
        t = self.target
        return all(
            t.d(deg + 2 * self.steps) @ self.maps[deg]
            == self.maps[deg - 1] @ s.d(deg)
            for deg in range(s.dLow, s.dHigh + 2))


def u_shift(w: WindowComplex, target: WindowComplex | None = None, steps: int = 1) -> UShift:
    """Multiplication by ``u^steps`` as an isomorphism of windows."""
    if w.source is None or w.spec is None:
        raise WindowMismatch("window carries no source complex")
    want = w.spec.shifted(steps)
    if target is None:
        target = instantiate_window(w.source, want)
    if target.source is not w.source and target.source != w.source:
        raise WindowMismatch("windows come from different complexes")
    if target.spec != want:
        raise WindowMismatch(f"target window {target.spec} is not the shift {want}")
    maps = {}
    for deg in range(w.dLow - 1, w.dHigh + 2):
        src = w.gens[deg]
        tgt = target.gens[deg + 2 * steps]
        if len(src) != len(tgt):
            raise WindowMismatch(f"generator counts differ in degree {deg}")
        rows = [[0] * len(src) for _ in tgt]
        for j, (gid, k) in enumerate(src):
            i = target.index[deg + 2 * steps].get((gid, k + steps))
            if i is None:
                raise WindowMismatch(f"no image for {(gid, k)}")
            rows[i][j] = 1
        maps[deg] = IntMatrix(rows, len(tgt), len(src))
    shift = UShift(w, target, steps, maps)
    if not shift.intertwines():
        raise WindowMismatch("shift does not intertwine the boundaries")
    return shift


def _is_unit(x, ring: Ring) -> bool:
    if ring is Ring.RAT:
        return x != 0
    return x in (1, -1)


def reduce_complex(w: WindowComplex, pairs: Sequence, ring=Ring.INT) -> WindowComplex:
    """Cancel acyclic pairs ``(y, x)`` with ``<dy, x>`` a unit.

    ``y`` and ``x`` are generator keys in adjacent degrees.  The result has the
    same homology as ``w`` in every interior degree.
    """
    ring = Ring.parse(ring)
    gens = {d: list(v) for d, v in w.gens.items()}
    mats = {d: [list(r) for r in w.d(d).tolist()] for d in range(w.dLow, w.dHigh + 2)}

    def mat(d):
        return mats.get(d)

    for y, x in pairs:
        dy = next((d for d, v in gens.items() if y in v), None)
        if dy is None or x not in gens.get(dy - 1, ()):
            raise NonInvertiblePivot(f"pair {y}, {x} is not in adjacent degrees")
        if dy not in mats:
            raise NonInvertiblePivot(f"pair {y}, {x} sits at the window edge")
        jy = gens[dy].index(y)
        ix = gens[dy - 1].index(x)
        m = mats[dy]
        c = m[ix][jy]
        if not _is_unit(c, ring):
            raise NonInvertiblePivot(f"coefficient {c} of {x} in d{y} is not a unit")
        c = Fraction(c) if ring is Ring.RAT else c
        # d'(z) = d(z) - <dz, x>/c * d(y) on the remaining generators of degree dy
        col_y = [r[jy] for r in m]
        row_x = list(m[ix])
        for i in range(len(m)):
            for j in range(len(row_x)):
                if row_x[j] and col_y[i]:
                    f = col_y[i] * row_x[j]
                    m[i][j] -= f / c if ring is Ring.RAT else f * c
        for r in m:
            del r[jy]
        del m[ix]
        if mat(dy + 1) is not None:
            del mats[dy + 1][jy]
        if mat(dy - 1) is not None:
            for r in mats[dy - 1]:
                del r[ix]
        gens[dy].pop(jy)
        gens[dy - 1].pop(ix)
    kind = RatMatrix if ring is Ring.RAT else IntMatrix
    bd = {d: kind(m, len(gens.get(d - 1, ())), len(gens.get(d, ()))) for d, m in mats.items()}
    out = WindowComplex(gens, bd, w.dLow, w.dHigh, source=w.source, spec=w.spec,
                        note=f"reduced by {len(pairs)} pairs")
    return out
