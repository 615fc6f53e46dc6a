"""Builders for the worked example complexes, with their expected results.

Every builder returns an :class:`ExampleBundle`.  ``expected`` holds the
values the engine should reproduce; keys are short descriptive names.
Action values (``hAction``) are synthetic: only their order matters.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import FgAbGroup, HomologyMorphism, Ring
from .complex import BaseGenerator, BoundaryTerm, EquivariantComplex, validate
from .errors import BadParams, BadParity, InvalidWeights, RequiresRationalCoefficients


@dataclass
class ExampleBundle:
    name: str
    complex: EquivariantComplex
    expected: dict
    coefficientScope: str = "both"
    horizon: int | None = None
    builder: Callable | None = None
    params: dict = field(default_factory=dict)

    def at_horizon(self, K: int) -> "ExampleBundle":
        """The same example rebuilt at another horizon."""
        if self.builder is None:
            raise BadParams(f"{self.name} has no horizon parameter")
        return self.builder(K)

    def is_valid(self) -> bool:
        return not validate(self.complex)

    def export(self, path=None) -> str:
        """The complex in the JSON file format read by the command line tool."""
        text = self.complex.to_json(indent=1)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def _term(coeff, shift, target):
    return BoundaryTerm(coeff, shift, target)


# ---------------------------------------------------------------------------
# Rabinowitz complex on C


def rabinowitz_C(equivariant: bool = False) -> ExampleBundle:
    """Rabinowitz complex of the unit circle in C.

    Non-equivariant: ``w+`` (degree 1) and ``w-`` (degree 0) with
    ``d w- = u^-1 w+``; ``u^n w+-`` are the generators at level ``n``.
    Equivariant: one generator of degree 0 and zero boundary.
    """
    if equivariant:
        gens = [BaseGenerator("w", 0, 0, 0, "circle")]
        c = EquivariantComplex(gens, {}, name="rabinowitz-C-equivariant")
        expected = {
            # window m <= level <= n, then the one-sided windows
            "window": lambda m, n, d: FgAbGroup(1) if d % 2 == 0 and m <= d // 2 <= n
            else FgAbGroup(),
            "upper": lambda n, d: FgAbGroup(1) if d % 2 == 0 and d // 2 <= n else FgAbGroup(),
            "lower": lambda m, d: FgAbGroup(1) if d % 2 == 0 and d // 2 >= m else FgAbGroup(),
        }
        return ExampleBundle("rabinowitz-C-equivariant", c, expected, "Int")
    gens = [BaseGenerator("w+", 1, 0, 0, "maximum"), BaseGenerator("w-", 0, 0, 0, "minimum")]
    c = EquivariantComplex(gens, {"w-": [_term(1, -1, "w+")]}, name="rabinowitz-C")

    def window(m, n, d):
        # Z w+^(n) in degree 2n+1 and Z w-^(m) in degree 2m
        return FgAbGroup(int(d == 2 * n + 1) + int(d == 2 * m))

    expected = {
        "window": window,
        "upper": lambda n, d: FgAbGroup(int(d == 2 * n + 1)),
        "lower": lambda m, d: FgAbGroup(int(d == 2 * m)),
        "full": lambda d: FgAbGroup(),
    }
    return ExampleBundle("rabinowitz-C", c, expected, "Int")


# ---------------------------------------------------------------------------
# C^n staircase


def cn_weights(n: int, count: int) -> list:
    """Weights ``a_1, a_2, ...``: each natural number repeated ``n`` times."""
    return [k // n + 1 for k in range(count)]


def _cn_rule(n: int):
    """Continuation of the top-row tower: level ``j -> j+1`` multiplies by ``a_(j+1)``."""
    z, zero = FgAbGroup(1), FgAbGroup()

    def rule(d, j):
        if d % 2:
            return HomologyMorphism(zero, zero, ())
        return HomologyMorphism(z, z, ((j // n + 1,),))

    return rule


def cn_complex(n: int, K: int) -> ExampleBundle:
    """Staircase complex of C^n up to horizon ``K``.

    Generators ``w0+`` and ``wk+`` (degree 2k), ``wk-`` (degree 2k-1) for
    ``1 <= k <= K`` with ``d w(k+1)- = wk+ + a_(k+1) u^-1 w(k+1)+``.
    """
    if n < 1 or K < 2:
        raise BadParams("need n >= 1 and K >= 2")
    a = cn_weights(n, K)
    gens = [BaseGenerator("w0+", 0, 0, 0, "minimum")]
    bd = {}
    for k in range(1, K + 1):
        gens.append(BaseGenerator(f"w{k}+", 2 * k, 0, k, f"orbit {k} max"))
        gens.append(BaseGenerator(f"w{k}-", 2 * k - 1, 0, k, f"orbit {k} min"))
        bd[f"w{k}-"] = [_term(1, 0, f"w{k - 1}+"), _term(a[k - 1], -1, f"w{k}+")]
    c = EquivariantComplex(gens, bd, name=f"cn-{n}-K{K}")
    # x_k = (-1)^k u^-k wk+, y_k = (-1)^(k+1) u^(-k+1) wk-
    basis = {
        "x": {k: ((-1) ** k, f"w{k}+", -k) for k in range(0, K + 1)},
        "y": {k: ((-1) ** (k + 1), f"w{k}-", -k + 1) for k in range(1, K + 1)},
    }
    expected = {
        "Int": {"top": "Q (x) Lambda", "jp": "Q (x) Lambda", "gw": 0, "bottom": 0},
        "Rat": {"top": 1, "jp": 1, "gw": 0, "bottom": 0},
        "weights": a,
        "change_of_basis": basis,
        "jp_rule": _cn_rule(n),
    }
    return ExampleBundle(f"cn-{n}", c, expected, "both", K,
                         lambda KK: cn_complex(n, KK), {"n": n, "K": K})


# ---------------------------------------------------------------------------
# cotangent bundle of S^2


def t_star_s2(K: int, cSeq=None) -> ExampleBundle:
    """Tate complex of T*S^2 up to horizon ``K``.

    Constants ``min`` (degree 0) and ``max`` (degree 2, also ``d0+``) and for
    each ``k`` the generators ``rk-, rk+, dk-, dk+`` of degrees
    ``2k-1, 2k, 2k+1, 2k+2``.  ``cSeq`` gives the weights ``c_k``; they must be
    even and nonzero with ``c_1 = 2``.
    """
    if K < 1:
        raise BadParams("need K >= 1")
    c = list(cSeq) if cSeq is not None else [2] * K
    if len(c) < K:
        raise InvalidWeights(f"need {K} weights, got {len(c)}")
    c = c[:K]
    if any(ck == 0 or ck % 2 for ck in c):
        raise InvalidWeights("weights must be even and nonzero")
    if c[0] != 2:
        raise InvalidWeights("the first weight must be 2")
    gens = [BaseGenerator("min", 0, 0, 0, "constant min"),
            BaseGenerator("max", 2, 0, 0, "constant max")]
    bd = {}

    def d_plus(k):
        return "max" if k == 0 else f"d{k}+"

    for k in range(1, K + 1):
        r_act = Fraction(2 * k - 1, 2)
        gens += [BaseGenerator(f"r{k}-", 2 * k - 1, 0, r_act, f"r{k} min"),
                 BaseGenerator(f"r{k}+", 2 * k, 0, r_act, f"r{k} max"),
                 BaseGenerator(f"d{k}-", 2 * k + 1, 0, k, f"d{k} min"),
                 BaseGenerator(f"d{k}+", 2 * k + 2, 0, k, f"d{k} max")]
        bd[f"r{k}-"] = [_term(k, -1, f"r{k}+")]
        bd[f"d{k}-"] = [_term(2, 0, f"r{k}+"), _term(c[k - 1], 0, d_plus(k - 1)),
                        _term(k, -1, f"d{k}+")]
    cx = EquivariantComplex(gens, bd, name=f"t-star-s2-K{K}")

    def loop_homology(d):
        if d == 0 or d % 2:
            return FgAbGroup(1)
        return FgAbGroup(1, (2,))

    # z_k = u^(-k+1) rk-, w_k = u^-k rk+; these pairs cancel over Q
    cancel = {k: ((f"r{k}-", -k + 1), (f"r{k}+", -k)) for k in range(1, K + 1)}
    expected = {
        "loop_homology": loop_homology,
        "loop_degrees": (0, 2 * K),
        "Rat": {"top": 2, "jp": 2, "gw": 1, "bottom": 1},
        "weights": c,
        "cancel_pairs": cancel,
    }
    return ExampleBundle("t-star-s2", cx, expected, "Rat", K,
                         lambda KK: t_star_s2(KK, _extend(c, KK)), {"K": K, "c": c})


def _extend(c, K):
    c = list(c)
    while len(c) < K:
        c.append(c[-1])
    return c


# ---------------------------------------------------------------------------
# local complex of a multiply covered circle


def local_orbit(n: int, parity: str = "good", shift: int = 0, prefix: str = "",
                hAction=0) -> ExampleBundle:
    """Local complex of a circle with covering number ``n``.

    ``w+`` has degree ``shift + 1`` and ``w-`` degree ``shift``.  Good:
    ``d w- = n u^-1 w+``.  Bad (``n`` even): ``d w+ = 2 w-``.
    """
    if n < 1:
        raise BadParams("covering number must be positive")
    if parity not in ("good", "bad"):
        raise BadParams("parity must be 'good' or 'bad'")
    if parity == "bad" and n % 2:
        raise BadParity("a bad orbit has even covering number")
    wp, wm = prefix + "w+", prefix + "w-"
    gens = [BaseGenerator(wp, shift + 1, 0, hAction, f"covering {n} max"),
            BaseGenerator(wm, shift, 0, hAction, f"covering {n} min")]
    if parity == "good":
        bd = {wm: [_term(n, -1, wp)]}
    else:
        bd = {wp: [_term(2, 0, wm)]}
    c = EquivariantComplex(gens, bd, name=f"local-{parity}-{n}")

    def local_homology(d):
        if parity == "good":
            if n == 1 or (d - shift - 1) % 2:
                return FgAbGroup()
            return FgAbGroup(0, (n,))
        return FgAbGroup(0, (2,)) if (d - shift) % 2 == 0 else FgAbGroup()

    return ExampleBundle(f"local-{parity}-{n}", c, {"homology": local_homology}, "Int",
                         params={"n": n, "parity": parity, "shift": shift})


# ---------------------------------------------------------------------------
# cotangent bundle of a torus


def torus(n: int, classBound: int, ring=Ring.RAT) -> ExampleBundle:
    """Model for T*T^n: constants plus one local circle per nonzero class.

    Each class ``v`` with ``max|v_i| <= classBound`` contributes a good local
    orbit with covering number ``gcd(v)``.  Only meaningful over Q.
    """
    if Ring.parse(ring) is not Ring.RAT:
        raise RequiresRationalCoefficients("the torus model is only valid over Q")
    if n < 1 or classBound < 0:
        raise BadParams("need n >= 1 and classBound >= 0")
    gens = []
    for r in range(n + 1):
        for S in itertools.combinations(range(n), r):
            gens.append(BaseGenerator("c" + "".join(map(str, S)) or "c", r, 0, 0,
                                      f"cell {S}"))
    bd = {}
    classes = []
    for v in itertools.product(range(-classBound, classBound + 1), repeat=n):
        if not any(v):
            continue
        g = math.gcd(*v)
        tag = "o" + "_".join(str(x) for x in v) + ":"
        loc = local_orbit(g, "good", 0, prefix=tag, hAction=sum(x * x for x in v))
        gens += list(loc.complex.generators)
        bd.update({k: list(t) for k, t in loc.complex.boundary.items() if t})
        classes.append((v, g))
    c = EquivariantComplex(gens, bd, name=f"torus-{n}")
    ranks = {d: 2 ** (n - 1) for d in range(-50, 50)}
    expected = {"Rat": {"rank": 2 ** (n - 1), "top": ranks, "jp": ranks, "gw": ranks,
                        "bottom": ranks},
                "classes": classes}
    return ExampleBundle(f"torus-{n}", c, expected, "Rat", params={"n": n, "B": classBound})


# ---------------------------------------------------------------------------
# rank arithmetic for the surgery example


@dataclass
class RankReport:
    n: int
    d: int
    two_n: int
    kappa_injective: bool | None
    kappa_surjective: bool | None
    verdict: str

    def to_dict(self):
        return dict(self.__dict__)


def xn_rank_report(n: int) -> RankReport:
    """Compare ``d_n = 2 + 2n + 2*C(n,2)`` with ``2^n``.

    A map between free modules of ranks ``d`` and ``2^n`` over a principal
    ideal domain cannot be injective if ``d > 2^n`` nor surjective if
    ``d < 2^n``.
    """
    if n < 1:
        raise BadParams("need n >= 1")
    d = 2 + 2 * n + 2 * math.comb(n, 2)
    assert d == n * n + n + 2
    t = 2 ** n
    if d > t:
        return RankReport(n, d, t, False, None, "not injective")
    if d < t:
        return RankReport(n, d, t, None, False, "not surjective")
    return RankReport(n, d, t, None, None, "no verdict from ranks")


def all_bundles(K: int = 4) -> list:
    """A representative list of example bundles at horizon ``K``."""
    out = [rabinowitz_C(), rabinowitz_C(True), cn_complex(1, K), cn_complex(2, K),
           t_star_s2(K), t_star_s2(K, [2] + [4] * (K - 1))]
    out += [local_orbit(m, "good", s) for m, s in ((1, 0), (2, 1), (3, 0))]
    out += [local_orbit(2, "bad", 0), local_orbit(4, "bad", 1)]
    out += [torus(1, 2), torus(2, 1)]
    return out
