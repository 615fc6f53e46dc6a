"""Towers of finitely generated groups and their limits.

A direct tower has ``maps[i]: G_i -> G_(i+1)``; an inverse tower has
``maps[i]: G_(i+1) -> G_i``.  In both cases a larger index is further along
towards the limit.  Limits are only returned when stabilization is detected;
otherwise the result is :class:`Undecided`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable

from .algebra import FgAbGroup, HomologyMorphism, RatMatrix, Ring, column_space, rref, solve


@dataclass(frozen=True)
class NotDetected:
    reason: str = ""


@dataclass(frozen=True)
class StableFrom:
    index: int


@dataclass(frozen=True)
class Periodic:
    group: FgAbGroup
    f: HomologyMorphism
    index: int


@dataclass
class Undecided:
    reason: str
    diagnostics: dict = field(default_factory=dict)

    def __str__(self):
        return f"undecided ({self.reason})"


class Tower:
    def __init__(self, groups, maps, direction: str = "direct", ring=Ring.INT, labels=None):
        if direction not in ("direct", "inverse"):
            raise ValueError("direction is 'direct' or 'inverse'")
        if len(maps) != max(len(groups) - 1, 0):
            raise ValueError("need one map between consecutive groups")
        self.groups = list(groups)
        self.maps = list(maps)
        self.direction = direction
        self.ring = Ring.parse(ring)
        self.labels = list(labels) if labels is not None else list(range(len(groups)))

    def __len__(self):
        return len(self.groups)

    def composite(self, i: int, j: int) -> HomologyMorphism:
        """Map between levels; ``i <= j`` for direct towers, ``i >= j`` for inverse."""
        out = HomologyMorphism.identity(self.groups[i], self.ring)
        if self.direction == "direct":
            for k in range(i, j):
                out = self.maps[k] @ out
        else:
            for k in range(i - 1, j - 1, -1):
                out = self.maps[k] @ out
        return out

    def stabilization(self, margin: int = 1):
        j = _iso_tail(self.maps, margin)
        if j is not None:
            return StableFrom(j)
        tail = self.maps[-(margin + 1):] if len(self.maps) >= margin + 1 else []
        if tail and all(m == tail[0] for m in tail) and tail[0].source == tail[0].target:
            return Periodic(tail[0].source, tail[0], len(self.maps) - len(tail))
        return NotDetected("transitions do not become isomorphisms")


def _iso_tail(maps, margin):
    j = len(maps)
    while j > 0 and maps[j - 1].is_iso():
        j -= 1
    if len(maps) - j >= margin:
        return j
    return None


@dataclass
class LimitResult:
    """Outcome of a limit computation.

    ``index`` is the level used to represent the limit; ``basis`` (field case
    only) spans the limit inside that level, ``None`` meaning the whole group.
    ``top`` (eventual images only) is the first level that no longer
    represents the limit.
    """

    status: str
    value: object
    tower: Tower
    index: int | None = None
    basis: list | None = None
    top: int | None = None

    @property
    def decided(self) -> bool:
        return self.status != "undecided"

    @property
    def group(self):
        return self.value if isinstance(self.value, FgAbGroup) else None

    def rep_coords(self, vec) -> list:
        """Coordinates of a vector of the representing level in the limit."""
        if self.basis is None:
            return list(vec)
        m = RatMatrix.from_columns(self.basis, len(vec))
        x = solve(m, RatMatrix.from_columns([list(vec)], len(vec)))
        if x is None:
            raise ValueError("vector does not lie in the limit")
        return x.col(0)

    def describe(self) -> str:
        if isinstance(self.value, TowerColimit):
            return self.value.describe()
        return str(self.value)


def direct_limit(t: Tower, margin: int = 1, rule: Callable | None = None) -> LimitResult:
    """Direct limit under detected stabilization, as a group or a :class:`TowerColimit`."""
    if t.direction != "direct":
        raise ValueError("tower is not a direct system")
    if not t.groups:
        return LimitResult("undecided", Undecided("empty tower"), t)
    st = t.stabilization(margin)
    if isinstance(st, StableFrom):
        n = len(t) - 1
        return LimitResult("stable", t.groups[n], t, index=n)
    if isinstance(st, Periodic):
        return LimitResult("periodic", TowerColimit(t.groups, t.maps, t.ring,
                                                    periodic=(st.group, st.f)), t)
    if rule is not None:
        return LimitResult("colimit", TowerColimit(t.groups, t.maps, t.ring, rule=rule), t)
    return LimitResult("undecided", Undecided(st.reason, {"groups": [str(g) for g in t.groups]}),
                       t)


def inverse_limit(t: Tower, margin: int = 1) -> LimitResult:
    """Inverse limit under detected stabilization.

    Over the rationals the eventual images are used (they stabilize for
    finite-dimensional towers).  Over the integers only towers whose
    transitions become isomorphisms are resolved.
    """
    if t.direction != "inverse":
        raise ValueError("tower is not an inverse system")
    if not t.groups:
        return LimitResult("undecided", Undecided("empty tower"), t)
    j = _iso_tail(t.maps, margin)
    if j is not None:
        return LimitResult("stable", t.groups[j], t, index=j)
    if t.ring is Ring.RAT:
        res = _eventual_inverse(t, margin)
        if res is not None:
            return res
        return LimitResult("undecided", Undecided("eventual images did not stabilize"), t)
    dims = [t.composite(len(t) - 1, i) for i in range(len(t))]
    return LimitResult("undecided", Undecided(
        "transitions are not eventually isomorphisms (Mittag-Leffler not verified)",
        {"groups": [str(g) for g in t.groups],
         "deep_images": [_image_rank(m) for m in dims]}), t)


def _mat(m: HomologyMorphism) -> RatMatrix:
    return RatMatrix(m.matrix, m.rows, m.cols)


def _image_rank(m: HomologyMorphism) -> int:
    return _mat(m).rank() if m.rows and m.cols else 0


def _eventual_inverse(t: Tower, margin: int):
    # the image of the deepest level in level i is the eventual image once it
    # agrees with the image of a level ``margin`` higher; this holds on a
    # prefix of levels.  The limit is represented at the lowest level from
    # which the images form a tower of isomorphisms up to the end of that prefix.
    n = len(t) - 1
    top = n - margin
    if top < 1:
        return None
    img = {}
    for i in range(top):
        a = _mat(t.composite(n, i))
        b = _mat(t.composite(top, i))
        ra = a.rank() if a.rows and a.cols else 0
        rb = b.rank() if b.rows and b.cols else 0
        if ra != rb:
            break
        img[i] = column_space(a).columns() if ra else []
    if len(img) < margin:
        return None
    start = len(img) - 1
    while start > 0:
        i = start - 1
        f = _mat(t.maps[i])
        src = img[i + 1]
        if len(src) != len(img[i]):
            break
        if src and (f @ RatMatrix.from_columns(src, f.cols)).rank() != len(src):
            break
        start = i
    res = LimitResult("eventual", FgAbGroup(len(img[start])), t, index=start,
                      basis=img[start])
    res.top = len(img)
    return res


# ---------------------------------------------------------------------------
# colimits with a known continuation


class TowerColimit:
    """Colimit of a tower given by a computed prefix plus a continuation.

    The continuation is either a repeating pair ``(G, f)`` or a rule
    ``k -> HomologyMorphism`` for the map from level ``k`` to ``k+1``.
    Elements are pairs ``(level, coordinate vector)``.
    """

    def __init__(self, groups, maps, ring=Ring.INT, periodic=None, rule=None):
        self.prefix_groups = list(groups)
        self.prefix_maps = list(maps)
        self.ring = Ring.parse(ring)
        self.periodic = periodic
        self.rule = rule
        self._cache = {}

    @property
    def computed_levels(self) -> int:
        return len(self.prefix_groups)

    def transition(self, k: int) -> HomologyMorphism:
        if k < len(self.prefix_maps):
            return self.prefix_maps[k]
        if self.periodic is not None:
            return self.periodic[1]
        if self.rule is not None:
            if k not in self._cache:
                self._cache[k] = self.rule(k)
            return self._cache[k]
        raise IndexError("no continuation beyond the computed prefix")

    def group(self, k: int) -> FgAbGroup:
        if k < len(self.prefix_groups):
            return self.prefix_groups[k]
        return self.transition(k - 1).target

    def _reduce(self, vec, k):
        orders = self.group(k).order_list
        return [v % d if d else v for v, d in zip(vec, orders)]

    def push(self, vec, k: int, m: int) -> list:
        """Image of the element ``vec`` of level ``k`` at level ``m >= k``."""
        v = list(vec)
        for j in range(k, m):
            f = self.transition(j)
            v = [sum(f.matrix[i][c] * v[c] for c in range(f.cols)) for i in range(f.rows)]
            v = self._reduce(v, j + 1)
        return v

    def generator(self, k: int, i: int):
        n = self.group(k).ngens()
        return (k, [int(i == j) for j in range(n)])

    def is_zero(self, x, depth: int) -> bool:
        k, v = x
        return not any(self.push(v, k, max(depth, k)))

    def add(self, x, y):
        k = max(x[0], y[0])
        a = self.push(x[1], x[0], k)
        b = self.push(y[1], y[0], k)
        return (k, self._reduce([p + q for p, q in zip(a, b)], k))

    def neg(self, x):
        return (x[0], self._reduce([-v for v in x[1]], x[0]))

    def equal(self, x, y, depth: int) -> bool:
        return self.is_zero(self.add(x, self.neg(y)), depth)

    def divisible(self, x, n: int, depth: int) -> bool:
        """Whether ``x`` is divisible by ``n`` at some level up to ``depth``."""
        k, v = x
        for m in range(k, max(depth, k) + 1):
            w = self.push(v, k, m) if m > k else list(v)
            orders = self.group(m).order_list
            if all((val % gcd(n, d) == 0) if d else (val % n == 0) for val, d in zip(w, orders)):
                return True
            v, k = w, m
        return False

    def torsion_free(self, depth: int) -> bool:
        """Every torsion generator up to level ``depth`` dies by level ``2 * depth``."""
        for k in range(depth + 1):
            g = self.group(k)
            for i in range(len(g.torsion)):
                if not self.is_zero(self.generator(k, i), 2 * depth):
                    return False
        return True

    def rank(self, depth: int) -> int:
        """Rank over the rationals, read off the composite into level ``depth``."""
        best = 0
        for k in range(min(self.computed_levels, depth) + 1):
            g = self.group(k)
            free = range(len(g.torsion), g.ngens())
            cols = [self.push(self.generator(k, i)[1], k, depth) for i in free]
            tgt = self.group(depth)
            rows = range(len(tgt.torsion), tgt.ngens())
            if cols:
                m = RatMatrix([[c[r] for c in cols] for r in rows], len(rows), len(cols))
                best = max(best, m.rank() if len(rows) else 0)
        return best

    def q_criterion(self, primes_upto: int = 97, depth: int = 250) -> dict:
        """Torsion-free, rank one, and every generator divisible by every small prime."""
        primes = [p for p in range(2, primes_upto + 1) if all(p % q for q in range(2, p))]
        tf = self.torsion_free(depth)
        rk = self.rank(depth)
        failures = []
        for k in range(self.computed_levels):
            g = self.group(k)
            for i in range(g.ngens()):
                x = self.generator(k, i)
                if self.is_zero(x, depth):
                    continue
                for p in primes:
                    if not self.divisible(x, p, depth):
                        failures.append((k, i, p))
        return {"torsion_free": tf, "rank": rk, "divisible": not failures,
                "failures": failures[:10], "holds": tf and rk == 1 and not failures,
                "depth": depth}

    def describe(self) -> str:
        kind = "periodic" if self.periodic is not None else "rule"
        return (f"colimit of {self.computed_levels} computed levels "
                f"({', '.join(str(g) for g in self.prefix_groups[-3:])}) + {kind} continuation")

    def to_dict(self):
        return {"kind": "colimit", "levels": [g.to_dict() for g in self.prefix_groups],
                "maps": [m.to_dict() for m in self.prefix_maps],
                "continuation": "periodic" if self.periodic is not None else "rule"}


def multiplier_rule(multipliers: Callable[[int], int]) -> Callable:
    """Rule for a tower ``Z -> Z`` whose ``k``-th map multiplies by ``multipliers(k)``."""
    z = FgAbGroup(1)

    def rule(k):
        return HomologyMorphism(z, z, ((multipliers(k),),))

    return rule
