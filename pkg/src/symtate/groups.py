"""The groups ``G_a = <x_1, x_2, ... | x_k - a_k x_(k+1)>`` and presentations of Q.

Every element of ``G_a`` is a single term ``d * x_k``; two terms are
compared by pushing both to a common level, which is valid because ``G_a``
is torsion-free.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Callable

from .errors import DensityUnverified, Inconclusive
from .towers import TowerColimit, multiplier_rule
from .algebra import FgAbGroup, Ring


class IntSequence:
    """Positive integer sequence ``a_1, a_2, ...`` given by a prefix and a rule.

    Indices start at 1.  Beyond the prefix the rule is used; without a rule
    the sequence continues with ones.
    """

    def __init__(self, prefix=(), rule: Callable[[int], int] | None = None, name: str = ""):
        self.prefix = tuple(int(x) for x in prefix)
        self.rule = rule
        self.name = name or (f"prefix {self.prefix}" if rule is None else "rule")
        if any(x < 1 for x in self.prefix):
            raise ValueError("terms must be positive integers")

    def __getitem__(self, k: int) -> int:
        if k < 1:
            raise IndexError("indices start at 1")
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.rule is None:
            return 1
        v = int(self.rule(k))
        if v < 1:
            raise ValueError(f"term {k} is not positive")
        return v

    def take(self, n: int) -> list:
        return [self[k] for k in range(1, n + 1)]

    def product(self, start: int, stop: int) -> int:
        """``a_start * ... * a_(stop-1)``."""
        return prod(self[j] for j in range(start, stop))

    def __repr__(self):
        return f"IntSequence({self.name})"

    @classmethod
    def successor(cls) -> "IntSequence":
        """``a_k = k + 1``."""
        return cls(rule=lambda k: k + 1, name="k+1")

    @classmethod
    def periodic(cls, values) -> "IntSequence":
        vals = tuple(values)
        return cls(rule=lambda k: vals[(k - 1) % len(vals)], name=f"periodic {vals}")

    @classmethod
    def repeated(cls, n: int) -> "IntSequence":
        """Each integer ``m >= 2`` repeated ``n`` times: ``2,..,2,3,..,3,...``."""
        return cls(rule=lambda k: (k - 1) // n + 2, name=f"{n}-fold repetition")


def factorize(n: int) -> list:
    """Prime factors of ``n`` in nondecreasing order, by trial division."""
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@dataclass
class PrimeExpansion:
    primes: list
    start: dict
    scanned: int
    verified: bool

    def sequence(self) -> IntSequence:
        return IntSequence(self.primes, name="prime expansion")


def prime_expand(a: IntSequence, upto: int, scan: int | None = None) -> PrimeExpansion:
    """First ``upto`` terms of the prime sequence ``a'`` of ``a``.

    ``start[k]`` is the index in ``a'`` where the factors of ``a_k`` begin, so
    ``x_k -> x'_start[k]`` relabels generators.  The relations are checked on
    the scanned range.  ``scan`` bounds how many terms of ``a`` are read.
    """
    if not isinstance(a, IntSequence):
        a = IntSequence(a)
    scan = scan if scan is not None else max(len(a.prefix), 50 * max(upto, 1))
    primes, start = [], {}
    k = 0
    while len(primes) < upto and k < scan:
        k += 1
        start[k] = len(primes) + 1
        primes.extend(factorize(a[k]))
    start[k + 1] = len(primes) + 1
    ok = all(prod(primes[start[j] - 1:start[j + 1] - 1]) == a[j] for j in range(1, k + 1))
    return PrimeExpansion(primes[:upto], start, k, ok)


# ---------------------------------------------------------------------------
# elements


@dataclass(frozen=True)
class GaElement:
    """``coeff * x_level``."""

    coeff: int
    level: int = 1

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("levels start at 1")

    def __str__(self):
        return f"{self.coeff}*x_{self.level}"


def ga_push(u: GaElement, level: int, a: IntSequence) -> GaElement:
    """Rewrite ``u`` at a level ``>= u.level`` using ``x_k = a_k x_(k+1)``."""
    if level < u.level:
        raise ValueError("can only push to a higher level")
    return GaElement(u.coeff * a.product(u.level, level), level)


def ga_canonical(u: GaElement, a: IntSequence) -> GaElement:
    """Representative of minimal level."""
    if u.coeff == 0:
        return GaElement(0, 1)
    d, k = u.coeff, u.level
    while k > 1 and d % a[k - 1] == 0:
        d //= a[k - 1]
        k -= 1
    return GaElement(d, k)


def ga_equal(u: GaElement, v: GaElement, a: IntSequence) -> bool:
    k = max(u.level, v.level)
    return ga_push(u, k, a).coeff == ga_push(v, k, a).coeff


def ga_add(u: GaElement, v: GaElement, a: IntSequence) -> GaElement:
    k = max(u.level, v.level)
    return ga_canonical(GaElement(ga_push(u, k, a).coeff + ga_push(v, k, a).coeff, k), a)


def ga_neg(u: GaElement) -> GaElement:
    return GaElement(-u.coeff, u.level)


def divisible(u: GaElement, n: int, a: IntSequence, probeDepth: int = 200):
    """``True`` if ``n | d * a_k ... a_(l-1)`` for some ``l <= probeDepth``, else ``None``.

    ``None`` means no witness was found within the probe depth.
    """
    if n == 0:
        raise ValueError("n must be nonzero")
    d = u.coeff
    for l in range(u.level, max(probeDepth, u.level) + 1):
        if d % n == 0:
            return True
        d *= a[l]
    return None


def as_colimit(a: IntSequence, levels: int = 3) -> TowerColimit:
    """``G_a`` as the colimit of ``Z --a_1--> Z --a_2--> ...``; level ``i`` holds ``x_(i+1)``."""
    rule = multiplier_rule(lambda k: a[k + 1])
    z = FgAbGroup(1)
    return TowerColimit([z] * levels, [rule(k) for k in range(levels - 1)], Ring.INT, rule=rule)


# ---------------------------------------------------------------------------
# the isomorphism G_a -> G_b


class IsoData:
    """The map ``h(x_k) = c_k y_m(k)``; ``m`` and ``c`` are extended on demand."""

    def __init__(self, a: IntSequence, b: IntSequence, probeDepth: int = 2000):
        self.a, self.b = a, b
        self.probeDepth = probeDepth
        self.m, self.c = {1: 1}, {1: 1}
        self._A, self._B, self._nu = 1, 1, 1
        self.relations = self.injective = self.surjective = False
        self.preimages = {}

    def _extend(self, k: int):
        # m(k) is the least nu with a_1...a_(k-1) | b_1...b_(nu-1)
        while max(self.m) < k:
            j = max(self.m) + 1
            self._A *= self.a[j - 1]
            while self._B % self._A:
                if self._nu >= self.probeDepth:
                    raise DensityUnverified(f"no nu <= {self.probeDepth} for k = {j}")
                self._B *= self.b[self._nu]
                self._nu += 1
            self.m[j], self.c[j] = self._nu, self._B // self._A

    def h(self, u: GaElement) -> GaElement:
        self._extend(u.level)
        return ga_canonical(GaElement(u.coeff * self.c[u.level], self.m[u.level]), self.b)

    @property
    def verified(self) -> bool:
        return self.relations and self.injective and self.surjective

    def report(self) -> dict:
        return {"m": dict(self.m), "c": dict(self.c), "relations": self.relations,
                "injective": self.injective, "surjective": self.surjective}


def iso_h(a: IntSequence, b: IntSequence, K: int = 20, probeDepth: int = 2000,
          samples: int = 100, seed: int = 0) -> IsoData:
    """Build ``h(x_k) = c_k y_m(k)`` for ``k <= K`` and check it.

    Both sequences should consist of primes.  Checks: the relations
    ``a_k h(x_(k+1)) = h(x_k)``, injectivity on random pairs, and explicit
    preimages of each ``y_m(k)``.
    """
    data = IsoData(a, b, probeDepth)
    data._extend(K + 1)
    m, c = data.m, data.c
    data.relations = all(
        ga_equal(GaElement(a[k] * c[k + 1], m[k + 1]), GaElement(c[k], m[k]), b)
        for k in range(1, K + 1))
    rng = random.Random(seed)
    inj = True
    for _ in range(samples):
        u = GaElement(rng.randint(-30, 30), rng.randint(1, K))
        v = GaElement(rng.randint(-30, 30), rng.randint(1, K))
        if rng.random() < 0.3:
            v = ga_push(u, rng.randint(u.level, K), a)
        inj = inj and ga_equal(u, v, a) == ga_equal(data.h(u), data.h(v), b)
    data.injective = inj
    surj = True
    for k in range(1, K + 1):
        # find l > k with c_k | a_k ... a_l; then (a_k...a_l / c_k) x_(l+1) maps to y_m(k)
        p, l = a[k], k
        while True:
            l += 1
            p *= a[l]
            if p % c[k] == 0:
                break
            if l > probeDepth:
                raise Inconclusive(f"no preimage of y_{m[k]} found up to level {probeDepth}")
        pre = GaElement(p // c[k], l + 1)
        data.preimages[k] = pre
        surj = surj and ga_equal(data.h(pre), GaElement(1, m[k]), b)
    data.surjective = surj
    return data


# ---------------------------------------------------------------------------
# Q as G_(k+1)


def _factorial_level(q: int) -> int:
    """Least ``m`` with ``q | m!``."""
    m, f = 1, 1
    while f % q:
        m += 1
        f *= m
    return m


def phi_Q(p: int, q: int, level: int | None = None) -> GaElement:
    """``p/q -> p (q-1)! x_q`` in ``G_(k+1)``.

    Since ``x_1 = m! x_m`` this equals ``p (m!/q) x_m`` for every ``m`` with
    ``q | m!``; by default the least such ``m`` is used.  ``level=q`` gives
    the formula literally.
    """
    if q < 1:
        raise ValueError("q must be positive")
    m = _factorial_level(q) if level is None else level
    if factorial(m) % q:
        raise ValueError(f"q = {q} does not divide {m}!")
    return ga_canonical(GaElement(p * (factorial(m) // q), m), IntSequence.successor())


def phi_inverse(u: GaElement) -> Fraction:
    """``d x_q -> d / q!``."""
    return Fraction(u.coeff, factorial(u.level))


def phi_check(grid: int = 6, hits: int = 5) -> dict:
    """Checks of ``phi_Q`` on the fractions ``p/q`` with ``|p|, q <= grid``.

    ``formula``: the least level agrees with the literal level ``q``.
    ``injective`` compares canonical forms, which are unique.
    ``hits_generators``: ``x_q`` is hit for ``q <= hits``.
    """
    a = IntSequence.successor()
    fr = [(p, q) for p in range(-grid, grid + 1) for q in range(1, grid + 1)]
    images = {(p, q): phi_Q(p, q) for p, q in fr}
    formula = all(images[p, q] == phi_Q(p, q, level=q) for p, q in fr)
    well = all(ga_equal(images[p, q], phi_Q(p * r, q * r), a) for p, q in fr for r in (2, 3))
    add = True
    for p, q in fr:
        for p2, q2 in fr[:: max(len(fr) // 40, 1)]:
            s = Fraction(p, q) + Fraction(p2, q2)
            add = add and ga_equal(ga_add(images[p, q], images[p2, q2], a),
                                   phi_Q(s.numerator, s.denominator), a)
    seen = {}
    for p, q in fr:
        seen.setdefault(images[p, q], set()).add(Fraction(p, q))
    inj = all(len(v) == 1 for v in seen.values())
    hit = all(phi_Q(1, factorial(q)) == GaElement(1, q) for q in range(1, hits + 1))
    back = all(phi_inverse(images[p, q]) == Fraction(p, q) for p, q in fr)
    return {"formula": formula, "well_defined": well, "additive": add, "injective": inj,
            "hits_generators": hit, "inverse": back}
