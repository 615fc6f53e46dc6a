"""Exact integer and rational linear algebra.

Matrices act on column vectors.  A boundary map ``C_n -> C_{n-1}`` is stored
with ``dim C_{n-1}`` rows and ``dim C_n`` columns.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import CompositionNonzero, NotChainMap


class Ring(Enum):
    INT = "Int"
    RAT = "Rat"

    @classmethod
    def parse(cls, value) -> "Ring":
        if isinstance(value, Ring):
            return value
        key = str(value).strip().lower()
        if key in ("int", "z", "integers"):
            return cls.INT
        if key in ("rat", "q", "rationals"):
            return cls.RAT
        raise ValueError(f"unknown coefficient ring {value!r}")

    @property
    def is_field(self) -> bool:
        return self is Ring.RAT


# ---------------------------------------------------------------------------
# matrices


class _Matrix:
    """Dense immutable matrix.  Subclasses fix the entry type."""

    __slots__ = ("rows", "cols", "_data")
    _coerce = staticmethod(int)

    def __init__(self, entries: Iterable[Iterable] = (), rows: int | None = None,
                 cols: int | None = None):
        data = tuple(tuple(self._coerce(x) for x in row) for row in entries)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if not data:
            data = tuple(tuple(self._coerce(0) for _ in range(cols)) for _ in range(rows))
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError("entry count does not match rows x cols")
        self.rows = rows
        self.cols = cols
        self._data = data

    @classmethod
    def zeros(cls, rows: int, cols: int):
        return cls((), rows, cols)

    @classmethod
    def identity(cls, n: int):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int):
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def tolist(self):
        return [list(r) for r in self._data]

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i):
        return list(self._data[i])

    def col(self, j):
        return [r[j] for r in self._data]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self):
        return type(self)([list(c) for c in zip(*self._data)] if self.rows else (),
                          self.cols, self.rows)

    def __eq__(self, other):
        if not isinstance(other, _Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        return f"{type(self).__name__}({self.tolist()!r}, {self.rows}, {self.cols})"

    def _result_type(self, other):
        if isinstance(self, RatMatrix) or isinstance(other, RatMatrix):
            return RatMatrix
        return type(self)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        # row-by-row with zero skipping; the matrices here are mostly sparse
        odata = other._data
        nz_other = [[(j, b) for j, b in enumerate(r) if b] for r in odata]
        out = []
        for r in self._data:
            acc = [0] * other.cols
            for k, a in enumerate(r):
                if a:
                    for j, b in nz_other[k]:
                        acc[j] += a * b
            out.append(acc)
        return self._result_type(other)(out, self.rows, other.cols)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        return self._result_type(other)(out, self.rows, self.cols)

    def __neg__(self):
        return type(self)([[-a for a in r] for r in self._data], self.rows, self.cols)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        kind = RatMatrix if isinstance(c, Fraction) else type(self)
        return kind([[c * a for a in r] for r in self._data], self.rows, self.cols)

    def apply(self, vec: Sequence):
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum(a * b for a, b in zip(r, vec)) for r in self._data]

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._data for a in r)

    def select_columns(self, idx: Sequence[int]):
        return type(self)([[r[j] for j in idx] for r in self._data], self.rows, len(idx))

    def select_rows(self, idx: Sequence[int]):
        return type(self)([self._data[i] for i in idx], len(idx), self.cols)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return self._result_type(other)([a + b for a, b in zip(self._data, other._data)],
                                        self.rows, self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("column mismatch")
        return self._result_type(other)(self._data + other._data,
                                        self.rows + other.rows, self.cols)

    def to_rational(self) -> "RatMatrix":
        return RatMatrix(self._data, self.rows, self.cols)

    def rank(self) -> int:
        return len(rref(self.to_rational())[1])

    def det(self):
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        a = [list(map(Fraction, r)) for r in self._data]
        n = self.rows
        d = Fraction(1)
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                return self._coerce(0)
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = -d
            d *= a[c][c]
            for i in range(c + 1, n):
                f = a[i][c] / a[c][c]
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[c])]
        return self._coerce(d)


def _to_int(x) -> int:
    if type(x) is int:
        return x
    if isinstance(x, numbers.Integral):
        return int(x)
    if isinstance(x, Fraction):
        if x.denominator != 1:
            raise ValueError(f"non-integer entry {x}")
        return x.numerator
    if isinstance(x, float) and x.is_integer():
        return int(x)
    raise TypeError(f"integer entry expected, got {x!r}")


class IntMatrix(_Matrix):
    """Matrix with arbitrary-precision integer entries."""

    __slots__ = ()
    _coerce = staticmethod(_to_int)


def _to_fraction(x) -> Fraction:
    return x if type(x) is Fraction else Fraction(x)


class RatMatrix(_Matrix):
    """Matrix with reduced ``Fraction`` entries."""

    __slots__ = ()
    _coerce = staticmethod(_to_fraction)

    def inverse(self) -> "RatMatrix":
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of a non-square matrix")
        aug = self.hstack(RatMatrix.identity(n))
        red, piv = rref(aug)
        if piv[:n] != list(range(n)):
            raise ZeroDivisionError("singular matrix")
        return red.select_columns(range(n, 2 * n))


def rref(m: _Matrix):
    """Reduced row echelon form over the rationals.

    Returns ``(R, pivots)`` with ``R`` a :class:`RatMatrix`.
    """
    # entries stay Python ints until a non-unit pivot forces fractions
    a = [[x.numerator if isinstance(x, Fraction) and x.denominator == 1 else x for x in r]
         for r in m.tolist()]
    rows, cols = m.rows, m.cols
    piv = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        pv = a[r][c]
        if pv == -1:
            a[r] = [-x for x in a[r]]
        elif pv != 1:
            inv = Fraction(1) / pv
            a[r] = [x * inv if x else 0 for x in a[r]]
        prow = a[r]
        nz = [j for j, y in enumerate(prow) if y]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                row = a[i]
                for j in nz:
                    row[j] = row[j] - f * prow[j]
        piv.append(c)
        r += 1
        if r == rows:
            break
    return RatMatrix(a, rows, cols), piv


def nullspace(m: _Matrix) -> RatMatrix:
    """Basis of the kernel as columns.

    Each basis vector has a 1 in one free-variable slot and 0 in the other
    free slots, so kernel coordinates can be read off those slots.
    """
    red, piv = rref(m)
    free = [j for j in range(m.cols) if j not in piv]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -red[i, f]
        basis.append(v)
    return RatMatrix.from_columns(basis, m.cols)


def column_space(m: _Matrix) -> RatMatrix:
    """A basis of the column space, chosen among the columns of ``m``."""
    _, piv = rref(m)
    return m.to_rational().select_columns(piv)


def solve(a: _Matrix, b: _Matrix) -> RatMatrix | None:
    """Some ``X`` with ``a @ X == b`` over the rationals, or ``None``."""
    aug = a.to_rational().hstack(b.to_rational())
    red, piv = rref(aug)
    if any(p >= a.cols for p in piv):
        return None
    x = [[Fraction(0)] * b.cols for _ in range(a.cols)]
    for i, p in enumerate(piv):
        for j in range(b.cols):
            x[p][j] = red[i, a.cols + j]
    return RatMatrix(x, a.cols, b.cols)


def in_column_space(a: _Matrix, vec: Sequence) -> bool:
    return solve(a, RatMatrix.from_columns([list(vec)], a.rows)) is not None


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    invariantFactors: tuple
    Uinv: IntMatrix
    Vinv: IntMatrix

    @property
    def rank(self) -> int:
        return len(self.invariantFactors)


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Smith normal form ``U A V = S`` with unimodular ``U`` and ``V``.

    The pivot is always a nonzero entry of smallest absolute value.

    >>> smith_normal_form(IntMatrix([[2, 4], [6, 8]])).invariantFactors
    (2, 4)
    """
    m, n = A.rows, A.cols
    S = A.tolist()
    U = IntMatrix.identity(m).tolist()
    Ui = IntMatrix.identity(m).tolist()
    V = IntMatrix.identity(n).tolist()
    Vi = IntMatrix.identity(n).tolist()

    def row_add(dst, src, c):
        # row_dst += c * row_src
        S[dst] = [x + c * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= c * r[dst]

    def col_add(dst, src, c):
        # col_dst += c * col_src
        for r in S:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]
        Vi[src] = [x - c * y for x, y in zip(Vi[src], Vi[dst])]

    def row_swap(i, j):
        if i != j:
            S[i], S[j] = S[j], S[i]
            U[i], U[j] = U[j], U[i]
            for r in Ui:
                r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        if i != j:
            for r in S:
                r[i], r[j] = r[j], r[i]
            for r in V:
                r[i], r[j] = r[j], r[i]
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_neg(i):
        S[i] = [-x for x in S[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = S[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            p = S[t][t]
            for i in range(t + 1, m):
                if S[i][t]:
                    row_add(i, t, -(S[i][t] // p))
            for j in range(t + 1, n):
                if S[t][j]:
                    col_add(j, t, -(S[t][j] // p))
            rest = [(abs(S[i][t]), i, t) for i in range(t + 1, m) if S[i][t]]
            rest += [(abs(S[t][j]), t, j) for j in range(t + 1, n) if S[t][j]]
            if rest:
                _, i, j = min(rest)
                row_swap(t, i)
                col_swap(t, j)
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if S[i][j] % p), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if S[t][t] < 0:
            row_neg(t)
        t += 1

    factors = tuple(S[i][i] for i in range(min(m, n)) if S[i][i])
    return SmithDecomposition(IntMatrix(U, m, m), IntMatrix(S, m, n), IntMatrix(V, n, n),
                              factors, IntMatrix(Ui, m, m), IntMatrix(Vi, n, n))


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FgAbGroup:
    """Finitely generated abelian group ``Z^freeRank + sum Z/d_i``.

    Always canonical: torsion entries exceed 1 and form a divisibility chain.
    """

    freeRank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        tors = tuple(int(d) for d in self.torsion)
        if self.freeRank < 0:
            raise ValueError("negative free rank")
        if any(d <= 1 for d in tors) or any(b % a for a, b in zip(tors, tors[1:])):
            tors = _canonical_torsion(tors)
        object.__setattr__(self, "torsion", tors)

    @classmethod
    def from_orders(cls, orders: Iterable[int], freeRank: int = 0) -> "FgAbGroup":
        """Direct sum of cyclic groups; an order of 0 means a copy of Z."""
        orders = list(orders)
        extra = sum(1 for d in orders if d == 0)
        return cls(freeRank + extra, _canonical_torsion([abs(d) for d in orders if d]))

    @property
    def is_zero(self) -> bool:
        return self.freeRank == 0 and not self.torsion

    @property
    def order_list(self) -> list:
        """Cyclic orders of the normal-form generators, torsion first (0 means Z)."""
        return list(self.torsion) + [0] * self.freeRank

    def ngens(self) -> int:
        return len(self.torsion) + self.freeRank

    def __str__(self):
        parts = []
        if self.freeRank == 1:
            parts.append("Z")
        elif self.freeRank:
            parts.append(f"Z^{self.freeRank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_dict(self):
        return {"freeRank": self.freeRank, "torsion": list(self.torsion)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["freeRank"], tuple(d["torsion"]))


def _canonical_torsion(orders) -> tuple:
    orders = [abs(int(d)) for d in orders if abs(int(d)) != 1]
    if any(d == 0 for d in orders):
        raise ValueError("zero order in torsion list")
    if not orders:
        return ()
    diag = IntMatrix([[orders[i] if i == j else 0 for j in range(len(orders))]
                      for i in range(len(orders))])
    return tuple(d for d in smith_normal_form(diag).invariantFactors if d > 1)


# ---------------------------------------------------------------------------
# homology of a composable pair


class HomologyData:
    """Homology ``ker(dOut) / im(dIn)`` with representatives and coordinates.

    ``generators`` are cycle vectors matching ``group.order_list``.
    """

    def __init__(self, dIn: _Matrix, dOut: _Matrix, ring=Ring.INT):
        ring = Ring.parse(ring)
        n = dIn.rows
        if dOut.cols != n:
            raise ValueError("dIn and dOut do not meet in a common chain group")
        if not (dOut @ dIn).is_zero():
            raise CompositionNonzero("dOut @ dIn is nonzero")
        self.ring = ring
        self.dim = n
        self.dIn = dIn
        self.dOut = dOut
        if ring is Ring.INT:
            self._init_int(IntMatrix(dIn.tolist(), dIn.rows, dIn.cols),
                           IntMatrix(dOut.tolist(), dOut.rows, dOut.cols))
        else:
            self._init_rat(dIn.to_rational(), dOut.to_rational())

    def _init_int(self, dIn, dOut):
        n = self.dim
        snf = smith_normal_form(dOut)
        r = snf.rank
        k = n - r
        kern = snf.V.select_columns(range(r, n))
        self._kcoord = snf.Vinv.select_rows(range(r, n))
        M = self._kcoord @ dIn
        snf2 = smith_normal_form(M)
        r2 = snf2.rank
        basis = kern @ snf2.Uinv
        self._basis_change = snf2.U
        tors_idx = [i for i in range(r2) if snf2.invariantFactors[i] > 1]
        self._slots = tors_idx + list(range(r2, k))
        self._mods = [snf2.invariantFactors[i] for i in tors_idx] + [0] * (k - r2)
        self.group = FgAbGroup(k - r2, tuple(snf2.invariantFactors[i] for i in tors_idx))
        self.generators = [basis.col(i) for i in self._slots]
        self._kernel = kern

    def _init_rat(self, dIn, dOut):
        if _integral(dIn) and _integral(dOut):
            # rational homology is the free part of the integral computation
            self._init_int(IntMatrix([[int(x) for x in r] for r in dIn.tolist()], dIn.rows,
                                     dIn.cols),
                           IntMatrix([[int(x) for x in r] for r in dOut.tolist()], dOut.rows,
                                     dOut.cols))
            keep = [i for i, m in enumerate(self._mods) if m == 0]
            self._slots = [self._slots[i] for i in keep]
            self._mods = [0] * len(keep)
            self.generators = [self.generators[i] for i in keep]
            self.group = FgAbGroup(len(keep))
            return
        kern = nullspace(dOut)
        k = kern.cols
        free = [j for j in range(self.dim) if j not in rref(dOut)[1]]
        self._kcoord = RatMatrix([[1 if j == f else 0 for j in range(self.dim)] for f in free],
                                 k, self.dim)
        M = self._kcoord @ dIn
        im_basis = column_space(M)
        cols = im_basis.columns()
        for i in range(k):
            e = [Fraction(int(i == j)) for j in range(k)]
            trial = RatMatrix.from_columns(cols + [e], k)
            if trial.rank() > len(cols):
                cols.append(e)
        change = RatMatrix.from_columns(cols, k) if k else RatMatrix.zeros(0, 0)
        r2 = im_basis.cols
        self._basis_change = change.inverse() if k else change
        self._slots = list(range(r2, k))
        self._mods = [0] * (k - r2)
        self.group = FgAbGroup(k - r2)
        basis = kern @ change if k else RatMatrix.zeros(self.dim, 0)
        self.generators = [basis.col(i) for i in self._slots]
        self._kernel = kern

    @property
    def kernel_basis(self):
        return self._kernel.columns()

    def is_cycle(self, z: Sequence) -> bool:
        return all(x == 0 for x in self.dOut.apply(list(z)))

    def coords(self, z: Sequence) -> list:
        """Coordinates of the class of the cycle ``z`` on ``generators``."""
        if not self.is_cycle(z):
            raise ValueError("vector is not a cycle")
        y = self._kcoord.apply(list(z))
        c = self._basis_change.apply(y)
        out = []
        for slot, mod in zip(self._slots, self._mods):
            v = c[slot]
            if self.ring is Ring.INT:
                v = _to_int(v)
                out.append(v % mod if mod else v)
            else:
                out.append(Fraction(v))
        return out

    def is_boundary(self, z: Sequence) -> bool:
        return self.is_cycle(z) and all(x == 0 for x in self.coords(z))


def _integral(m: _Matrix) -> bool:
    return all(isinstance(x, int) or (isinstance(x, Fraction) and x.denominator == 1)
               for r in m.tolist() for x in r)


def homology_of_pair(dIn: _Matrix, dOut: _Matrix, ring=Ring.INT):
    """``ker(dOut)/im(dIn)`` as ``(FgAbGroup, representatives)``."""
    h = HomologyData(dIn, dOut, ring)
    return h.group, h.generators


@dataclass(frozen=True)
class HomologyMorphism:
    """Homomorphism between normal forms, as a matrix on their generators."""

    source: FgAbGroup
    target: FgAbGroup
    matrix: tuple
    ring: Ring = Ring.INT

    @property
    def rows(self):
        return self.target.ngens()

    @property
    def cols(self):
        return self.source.ngens()

    def __matmul__(self, other: "HomologyMorphism") -> "HomologyMorphism":
        if other.target != self.source:
            raise ValueError("morphisms are not composable")
        prod = []
        for i in range(self.rows):
            prod.append([sum(self.matrix[i][k] * other.matrix[k][j] for k in range(self.cols))
                         for j in range(other.cols)])
        return HomologyMorphism(other.source, self.target, _reduce_rows(prod, self.target),
                                self.ring)

    @classmethod
    def identity(cls, group: FgAbGroup, ring=Ring.INT) -> "HomologyMorphism":
        n = group.ngens()
        return cls(group, group, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)),
                   Ring.parse(ring))

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup, ring=Ring.INT) -> "HomologyMorphism":
        return cls(source, target,
                   tuple(tuple(0 for _ in range(source.ngens())) for _ in range(target.ngens())),
                   Ring.parse(ring))

    def _relation_matrix(self) -> IntMatrix:
        # [M | -D] where D holds the target relations
        orders = self.target.order_list
        rows = []
        for i in range(self.rows):
            rel = [(-orders[i] if i == j else 0) for j in range(self.rows)]
            rows.append([int(v) for v in self.matrix[i]] + rel)
        return IntMatrix(rows, self.rows, self.cols + self.rows)

    def is_surjective(self) -> bool:
        if self.ring is Ring.RAT:
            m = RatMatrix(self.matrix, self.rows, self.cols)
            return m.rank() == self.rows
        rel = self._relation_matrix()
        snf = smith_normal_form(rel)
        return snf.rank == self.rows and all(d == 1 for d in snf.invariantFactors)

    def is_injective(self) -> bool:
        if self.ring is Ring.RAT:
            m = RatMatrix(self.matrix, self.rows, self.cols)
            return m.rank() == self.cols
        rel = self._relation_matrix()
        snf = smith_normal_form(rel)
        orders = self.source.order_list
        for j in range(snf.rank, rel.cols):
            x = snf.V.col(j)[:self.cols]
            for v, d in zip(x, orders):
                if (d == 0 and v != 0) or (d and v % d):
                    return False
        return True

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def is_zero(self) -> bool:
        return all(_reduce_entry(v, self.target, i) == 0
                   for i, row in enumerate(self.matrix) for v in row)

    def to_dict(self):
        return {"source": self.source.to_dict(), "target": self.target.to_dict(),
                "matrix": [[str(v) for v in row] for row in self.matrix],
                "ring": self.ring.value}

    def is_identity(self) -> bool:
        return self.source == self.target and all(
            self.matrix[i][j] == _reduce_entry(int(i == j), self.target, i)
            for i in range(self.rows) for j in range(self.cols))


def _reduce_entry(v, target: FgAbGroup, i: int):
    orders = target.order_list
    if isinstance(v, Fraction) and v.denominator != 1:
        return v
    return v % orders[i] if orders[i] else v


def _reduce_rows(mat, target: FgAbGroup) -> tuple:
    return tuple(tuple(_reduce_entry(v, target, i) for v in row) for i, row in enumerate(mat))


def induced_map_on_homology(f: _Matrix, source, target, ring=Ring.INT, f_prev=None,
                            f_next=None, check: bool = True) -> HomologyMorphism:
    """Matrix of the map induced by ``f`` between two homology groups.

    ``source`` and ``target`` are :class:`HomologyData` or ``(dIn, dOut)``
    pairs.  ``f_prev`` / ``f_next`` are the chain-map components one degree
    below / above; when given, the commuting squares are checked too.
    """
    if not isinstance(source, HomologyData):
        source = HomologyData(*source, ring=ring)
    if not isinstance(target, HomologyData):
        target = HomologyData(*target, ring=ring)
    if f.cols != source.dim or f.rows != target.dim:
        raise NotChainMap("chain map has the wrong shape")
    if f_prev is not None and target.dOut @ f != f_prev @ source.dOut:
        raise NotChainMap("f does not commute with the outgoing differentials")
    if f_next is not None and f @ source.dIn != target.dIn @ f_next:
        raise NotChainMap("f does not commute with the incoming differentials")
    for z in (source.kernel_basis if check else ()):
        if not target.is_cycle(f.apply(z)):
            raise NotChainMap("f sends a cycle to a non-cycle")
    for b in (source.dIn.columns() if check else ()):
        if not target.is_boundary(f.apply(b)):
            raise NotChainMap("f sends a boundary to a non-boundary class")
    cols = [target.coords(f.apply(g)) for g in source.generators]
    mat = [[c[i] for c in cols] for i in range(target.group.ngens())]
    return HomologyMorphism(source.group, target.group, _reduce_rows(mat, target.group),
                            target.ring)


# ---------------------------------------------------------------------------
# Laurent polynomials


class LaurentPoly:
    """Element of ``Z[u, u^-1]``; ``u`` has degree 2.

    >>> u = LaurentPoly.u()
    >>> (1 + u) * (1 - u)
    LaurentPoly('1 - u^2')
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs=None):
        coeffs = dict(coeffs or {})
        self._coeffs = tuple(sorted((int(e), int(c)) for e, c in coeffs.items() if c != 0))

    @classmethod
    def u(cls, power: int = 1) -> "LaurentPoly":
        return cls({power: 1})

    @classmethod
    def const(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    @staticmethod
    def _lift(x):
        return x if isinstance(x, LaurentPoly) else LaurentPoly({0: x})

    def __add__(self, other):
        other = self._lift(other)
        out = self.coeffs
        for e, c in other._coeffs:
            out[e] = out.get(e, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._coeffs})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out = {}
        for e1, c1 in self._coeffs:
            for e2, c2 in other._coeffs:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``u^k``."""
        return LaurentPoly({e + k: c for e, c in self._coeffs})

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(self._coeffs)

    def __str__(self):
        if not self._coeffs:
            return "0"
        out = ""
        for e, c in self._coeffs:
            mono = "" if e == 0 else ("u" if e == 1 else f"u^{e}")
            mag = abs(c)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
            if not out:
                out = ("-" if c < 0 else "") + body
            else:
                out += (" - " if c < 0 else " + ") + body
        return out

    def __repr__(self):
        return f"LaurentPoly('{self}')"


def laurent_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p + q


def laurent_multiply(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    return p * q


def laurent_shift(p: LaurentPoly, k: int) -> LaurentPoly:
    return p.shift(k)
