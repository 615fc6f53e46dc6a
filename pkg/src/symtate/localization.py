"""Localization of a linear map and Tate triples, in finite dimension.

For ``T: V -> V`` the localization ``V^T`` is the space of sequences
``(v_1, v_2, ...)`` with ``T v_(i+1) = v_i``.  In finite dimension it is
represented by the eventual image ``V_T`` on which ``T`` is bijective.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import HomologyData, RatMatrix, Ring, column_space, induced_map_on_homology, \
    solve
from .errors import NotTateTriple, ZeroVector
from .towers import Tower, inverse_limit


def _rat(m) -> RatMatrix:
    if isinstance(m, RatMatrix):
        return m
    if hasattr(m, "to_rational"):
        return m.to_rational()
    rows = [list(r) for r in m]
    return RatMatrix(rows, len(rows), len(rows[0]) if rows else 0)


class LinearEndoSpace:
    """``(V, T)`` with an optional boundary operator, ``V = Q^dim``."""

    def __init__(self, T, boundary=None, degrees=None):
        self.T = _rat(T)
        if self.T.rows != self.T.cols:
            raise ValueError("T must be square")
        self.boundary = None if boundary is None else _rat(boundary)
        self.degrees = list(degrees) if degrees is not None else None

    @property
    def dim(self) -> int:
        return self.T.rows

    def is_tate_triple(self) -> bool:
        d = self.boundary
        if d is None or d.shape != self.T.shape:
            return False
        return (d @ d).is_zero() and (d @ self.T) == (self.T @ d)


class LocallyFiniteSpace:
    """Space with a countable basis given by rules on finitely supported vectors.

    ``basis(N)`` lists the basis keys kept at truncation ``N``; ``T_rule`` and
    ``d_rule`` send a key to a dict ``{key: coefficient}``.  Terms leaving the
    truncation are dropped, so callers pick truncations closed under the rules.
    """

    def __init__(self, basis: Callable, T_rule: Callable, d_rule: Callable | None = None):
        self.basis = basis
        self.T_rule = T_rule
        self.d_rule = d_rule

    def truncate(self, N: int):
        keys = list(self.basis(N))
        index = {k: i for i, k in enumerate(keys)}

        def matrix(rule):
            rows = [[0] * len(keys) for _ in keys]
            for j, k in enumerate(keys):
                for t, c in rule(k).items():
                    if t in index:
                        rows[index[t]][j] += c
            return RatMatrix(rows, len(keys), len(keys))

        d = matrix(self.d_rule) if self.d_rule else None
        return keys, LinearEndoSpace(matrix(self.T_rule), d)


# ---------------------------------------------------------------------------
# eventual image and localization


@dataclass
class EventualImage:
    basis: list
    index: int
    T: RatMatrix

    @property
    def dim(self) -> int:
        return len(self.basis)


def _basis_matrix(basis, n) -> RatMatrix:
    return RatMatrix.from_columns(basis, n) if basis else RatMatrix.zeros(n, 0)


def _restrict(A: RatMatrix, basis, n) -> RatMatrix:
    """Matrix of ``A`` on the span of ``basis`` (assumed invariant)."""
    if not basis:
        return RatMatrix.zeros(0, 0)
    B = _basis_matrix(basis, n)
    X = solve(B, A @ B)
    if X is None:
        raise ValueError("subspace is not invariant")
    return X


def eventual_image(V, T=None, probeDepth: int | None = None) -> EventualImage:
    """``V_T``: the images of ``T^j`` until the dimension stops dropping."""
    if isinstance(V, LinearEndoSpace):
        T = V.T
        n = V.dim
    else:
        n = int(V)
        T = _rat(T)
    depth = n + 1 if probeDepth is None else probeDepth
    power = RatMatrix.identity(n)
    dim = n
    j = 0
    while j < depth:
        nxt = T @ power
        r = nxt.rank() if n else 0
        if r == dim:
            break
        power, dim, j = nxt, r, j + 1
    basis = column_space(power).columns() if dim else []
    return EventualImage(basis, j, _restrict(T, basis, n))


@dataclass
class LocalizationResult:
    V_T: EventualImage
    T_bar: RatMatrix
    P: RatMatrix
    P_injective: bool
    P_iso: bool | None
    T: RatMatrix | None = None
    V_k: dict = field(default_factory=dict)
    T_k: dict = field(default_factory=dict)
    Q_k: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.V_T.dim

    def intertwines(self) -> bool:
        """``P T_bar = T P``."""
        return self.T @ self.P == self.P @ self.T_bar

    def checks(self) -> dict:
        """Per ``k``: ``T Q_k = Q_k T_k``, ``Q_k`` injective, ``im Q_k = V_T``."""
        n = self.P.rows
        out = {}
        vt_rank = self.V_T.dim
        for k, Q in self.Q_k.items():
            r = Q.rank() if Q.cols else 0
            same = r == vt_rank and (not vt_rank or _basis_matrix(self.V_T.basis, n).hstack(
                Q).rank() == vt_rank)
            out[k] = {"intertwines": self.T @ Q == Q @ self.T_k[k],
                      "injective": r == Q.cols, "image_is_V_T": same}
        return out


def _sequence_space(T: RatMatrix, k: int, L: int):
    """Length-``k`` heads of the sequences ``(T^(L-1) w, ..., T w, w)``."""
    n = T.rows
    powers = [RatMatrix.identity(n)]
    for _ in range(L):
        powers.append(T @ powers[-1])
    blocks = [powers[L - 1 - i] for i in range(k)]
    stacked = blocks[0]
    for b in blocks[1:]:
        stacked = stacked.vstack(b)
    return column_space(stacked).columns() if stacked.rank() else []


def _block_diag(A: RatMatrix, k: int) -> RatMatrix:
    n = A.rows
    rows = [[Fraction(0)] * (n * k) for _ in range(n * k)]
    for b in range(k):
        for i in range(n):
            for j in range(n):
                rows[b * n + i][b * n + j] = A[i, j]
    return RatMatrix(rows, n * k, n * k)


def localize(V, T=None, kmax: int = 4) -> LocalizationResult:
    """Localization with the maps ``P``, ``Q_k`` and the quotients ``V^T_k`` for ``k <= kmax``."""
    if not isinstance(V, LinearEndoSpace):
        V = LinearEndoSpace(T)
    n = V.dim
    ev = eventual_image(V)
    B = _basis_matrix(ev.basis, n)
    p_inj = (B.rank() if B.cols else 0) == B.cols
    t_iso = (V.T.rank() if n else 0) == n
    p_iso = (p_inj and B.cols == n) if t_iso else None
    res = LocalizationResult(ev, ev.T, B, p_inj, p_iso, V.T)
    L = kmax + n + 1
    for k in range(1, kmax + 1):
        basis = _sequence_space(V.T, k, L)
        res.V_k[k] = basis
        res.T_k[k] = _restrict(_block_diag(V.T, k), basis, n * k)
        # Q_k reads off the last entry
        rows = [[b[(k - 1) * n + i] for b in basis] for i in range(n)]
        res.Q_k[k] = RatMatrix(rows, n, len(basis))
    return res


# ---------------------------------------------------------------------------
# Tate triples


def _homology(d: RatMatrix) -> HomologyData:
    return HomologyData(d, d, Ring.RAT)


@dataclass
class TripleComparison:
    left: int | None
    right: int | None
    equal: bool | None
    T_surjective: bool
    left_tower: list
    right_tower: list

    def to_dict(self):
        return {"left": self.left, "right": self.right, "equal": self.equal,
                "T_surjective": self.T_surjective}


def tate_triple_compare(V: LinearEndoSpace, kmax: int = 6) -> TripleComparison:
    """Compare ``lim_k H(V^T_k)`` with the localization of ``H(V)`` along ``HT``."""
    if not V.is_tate_triple():
        raise NotTateTriple("need a boundary with d^2 = 0 commuting with T")
    n = V.dim
    L = kmax + n + 1
    # left: homology of the explicit sequence spaces, projections drop the last entry
    groups, maps, datas, bases = [], [], [], []
    for k in range(1, kmax + 1):
        basis = _sequence_space(V.T, k, L)
        dk = _restrict(_block_diag(V.boundary, k), basis, n * k)
        h = _homology(dk)
        if bases:
            prev = bases[-1]
            # coordinates of the truncated sequences in the previous basis
            cols = []
            P = _basis_matrix(prev, n * (k - 1))
            for b in basis:
                x = solve(P, RatMatrix.from_columns([b[: n * (k - 1)]], n * (k - 1)))
                cols.append(x.col(0))
            pi = RatMatrix([[c[i] for c in cols] for i in range(len(prev))], len(prev),
                           len(basis)) if basis else RatMatrix.zeros(len(prev), 0)
            maps.append(induced_map_on_homology(pi, h, datas[-1], Ring.RAT))
        groups.append(h.group)
        datas.append(h)
        bases.append(basis)
    left = inverse_limit(Tower(groups, maps, "inverse", Ring.RAT))
    # right: localization of H(V) along HT
    hv = _homology(V.boundary)
    ht = induced_map_on_homology(V.T, hv, hv, Ring.RAT)
    rt = Tower([hv.group] * (kmax + 1), [ht] * kmax, "inverse", Ring.RAT)
    right = inverse_limit(rt)
    lv = left.value.freeRank if left.decided else None
    rv = right.value.freeRank if right.decided else None
    t_surj = (V.T.rank() if n else 0) == n
    eq = None if lv is None or rv is None else lv == rv
    return TripleComparison(lv, rv, eq, t_surj, [g.freeRank for g in groups],
                            [hv.group.freeRank] * (kmax + 1))


# ---------------------------------------------------------------------------
# the e/f example with non-surjective T


def shift_space() -> LocallyFiniteSpace:
    """Basis ``e_1, e_2, ...`` with ``T e_i = e_(i-1)`` and ``T e_1 = 0``."""
    return LocallyFiniteSpace(lambda N: list(range(1, N + 1)),
                              lambda i: {i - 1: 1} if i >= 2 else {})


def ef_space() -> LocallyFiniteSpace:
    """Basis ``e(i,j), f(i,j)`` with ``j >= i``; ``T`` lowers ``i``, ``d f(i,j) = e(i,j) + e(i,j+1)``.

    At truncation ``N`` the keys are ``e(i,j)`` with ``j <= N`` and ``f(i,j)``
    with ``j < N``, which is closed under both rules.
    """

    def basis(N):
        out = [("e", i, j) for j in range(1, N + 1) for i in range(1, j + 1)]
        out += [("f", i, j) for j in range(1, N) for i in range(1, j + 1)]
        return out

    def T_rule(key):
        kind, i, j = key
        return {(kind, i - 1, j): 1} if i >= 2 else {}

    def d_rule(key):
        kind, i, j = key
        if kind == "f":
            return {("e", i, j): 1, ("e", i, j + 1): 1}
        return {}

    return LocallyFiniteSpace(basis, T_rule, d_rule)


def counterexample_probe(N: int) -> dict:
    """Finite evidence that the comparison of localizations fails without surjectivity.

    Checks on the truncation at ``N``: the triple is valid; ``T^k E`` is
    spanned by the ``e(i,j)`` with ``j >= i + k``; the eventual image is 0;
    ``[e(i,j)] = (-1)^(j-i) [e(i,i)]``; ``HT`` shifts the classes
    ``eps_i = [e(i,i)]`` down (up to sign) as one Jordan block of size ``N``.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    keys, V = ef_space().truncate(N)
    idx = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    report = {"N": N, "tate_triple": V.is_tate_triple()}
    e_cols = [idx[k] for k in keys if k[0] == "e"]
    power = RatMatrix.identity(n)
    shifts = {}
    for k in range(1, N + 1):
        power = V.T @ power
        img = power.select_columns(e_cols)
        allowed = {idx[("e", i, j)] for (_, i, j) in keys if _ == "e" and j >= i + k}
        inside = all(img[r, c] == 0 for r in range(n) for c in range(img.cols)
                     if r not in allowed)
        want = len(allowed)
        spans = (img.rank() if img.cols else 0) == want
        shifts[k] = inside and spans
    report["TkE_pattern"] = shifts
    ev = eventual_image(V)
    report["V_T_dim"] = ev.dim
    h = _homology(V.boundary)
    eps = {i: h.coords(_unit(n, idx[("e", i, i)])) for i in range(1, N + 1)}
    same = True
    for (kind, i, j) in keys:
        if kind == "e":
            c = h.coords(_unit(n, idx[(kind, i, j)]))
            sign = (-1) ** (j - i)
            same = same and c == [sign * x for x in eps[i]]
    report["classes_agree_up_to_sign"] = same
    report["H_dim"] = h.group.freeRank
    ht = induced_map_on_homology(V.T, h, h, Ring.RAT)
    shift_ok = True
    for i in range(1, N + 1):
        img = [sum(Fraction(ht.matrix[r][c]) * eps[i][c] for c in range(ht.cols))
               for r in range(ht.rows)]
        want = [-x for x in eps[i - 1]] if i > 1 else [0] * ht.rows
        shift_ok = shift_ok and img == want
    report["HT_shift"] = shift_ok
    # depth of eps_1 under HT against the depth of e(1,1) under T
    M = RatMatrix(ht.matrix, ht.rows, ht.cols)
    depth_h, P = 0, RatMatrix.identity(M.rows)
    while depth_h < N:
        P = M @ P
        if solve(P, RatMatrix.from_columns([eps[1]], M.rows)) is None:
            break
        depth_h += 1
    depth_c, P = 0, RatMatrix.identity(n)
    while depth_c < N:
        P = V.T @ P
        if solve(P, RatMatrix.from_columns([_unit(n, idx[("e", 1, 1)])], n)) is None:
            break
        depth_c += 1
    report["homology_depth_eps1"] = depth_h
    report["chain_depth_e11"] = depth_c
    cmp = tate_triple_compare(V, kmax=min(N, 4))
    report["left"] = cmp.left
    report["right_rank_pattern"] = int(depth_h == N - 1)
    return report


def _unit(n, i):
    return [int(j == i) for j in range(n)]


def graded_degree(seq, d: int, degrees) -> int:
    """Degree of a compatible sequence ``(v_1, v_2, ...)``: ``deg(v_i) + i*d``."""
    values = set()
    for i, v in enumerate(seq, start=1):
        degs = {degrees[j] for j, x in enumerate(v) if x}
        if not degs:
            continue
        if len(degs) > 1:
            raise ValueError(f"entry {i} is not homogeneous")
        values.add(degs.pop() + i * d)
    if not values:
        raise ZeroVector("the zero sequence has no degree")
    if len(values) > 1:
        raise ValueError(f"inconsistent degrees {sorted(values)}")
    return values.pop()
