"""Exact linear algebra over Q and Z.

Rational matrices are plain lists of rows of :class:`fractions.Fraction`;
the heavy lifting (row reduction, kernels, Smith decomposition) is delegated
to sympy's ``DomainMatrix``. :class:`IntegerLattice` keeps an incrementally
maintained echelon basis of a sublattice of Z^n.
"""

from __future__ import annotations

from bisect import bisect_left
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from .utilities import gcdex

Matrix = list[list[Fraction]]


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def to_domain_matrix(rows: Sequence[Sequence], ncols: int) -> DomainMatrix:
    """Rational ``DomainMatrix`` with the given rows (``ncols`` fixes empty shapes)."""
    if not rows:
        return DomainMatrix.zeros((0, ncols), QQ).to_dense()
    data = [[QQ(int(Fraction(x).numerator), int(Fraction(x).denominator)) for x in row] for row in rows]
    return DomainMatrix(data, (len(rows), ncols), QQ)


def from_domain_matrix(dm: DomainMatrix) -> Matrix:
    return [[_to_fraction(x) for x in row] for row in dm.convert_to(QQ).to_list()]


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence], ncols: int) -> Matrix:
    inner = len(b)
    if not a:
        return []
    product = to_domain_matrix(a, inner) * to_domain_matrix(b, ncols)
    return from_domain_matrix(product)


def vec_mat(v: Sequence, m: Sequence[Sequence]) -> list[Fraction]:
    """Row vector times matrix."""
    if not m:
        return []
    out = [Fraction(0)] * len(m[0])
    for x, row in zip(v, m):
        if x:
            for j, y in enumerate(row):
                if y:
                    out[j] += x * y
    return out


def transpose(m: Sequence[Sequence], ncols: int) -> Matrix:
    return [[Fraction(m[i][j]) for i in range(len(m))] for j in range(ncols)]


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form with zero rows dropped, plus pivot columns."""
    if not rows:
        return [], ()
    reduced, pivots = to_domain_matrix(rows, ncols).to_sparse().rref()
    result = from_domain_matrix(reduced)[: len(pivots)]
    return result, tuple(pivots)


def nullspace(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis (as rows, in reduced echelon form) of ``{x : A x = 0}``."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    if ncols == 0:
        return []
    kernel = from_domain_matrix(to_domain_matrix(rows, ncols).nullspace())
    kernel = [row for row in kernel if any(row)]
    return rref(kernel, ncols)[0]


def left_kernel(rows: Sequence[Sequence], ncols: int) -> Matrix:
    """Basis of ``{v : v A = 0}``."""
    return nullspace(transpose(rows, ncols), len(rows))


def clear_denominators(vec: Sequence[Fraction]) -> tuple[list[int], int]:
    """Return ``(w, d)`` with ``w = d * vec`` integral and ``d`` minimal."""
    d = 1
    for x in vec:
        d = lcm(d, Fraction(x).denominator)
    return [int(Fraction(x) * d) for x in vec], d


def smith_decomposition(rows: Sequence[Sequence[int]], ncols: int) -> tuple[list[int], list[list[int]], list[list[int]]]:
    """Integer diagonal decomposition ``D = s * A * t`` with ``s, t`` unimodular.

    Returns the diagonal entries (length ``min(m, n)``, zeros last) and the
    matrices ``s`` (m x m) and ``t`` (n x n) as integer rows.
    """
    nrows = len(rows)
    if nrows == 0 or ncols == 0:
        eye_s = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
        eye_t = [[int(i == j) for j in range(ncols)] for i in range(ncols)]
        return [], eye_s, eye_t
    dm = DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (nrows, ncols), ZZ)
    smf, s, t = smith_normal_decomp(dm)
    diag_rows = smf.to_list()
    diagonal = [abs(int(diag_rows[i][i])) for i in range(min(nrows, ncols))]
    s_rows = [[int(x) for x in row] for row in s.to_list()]
    t_rows = [[int(x) for x in row] for row in t.to_list()]
    # Normalize signs so the diagonal is non-negative.
    for i in range(min(nrows, ncols)):
        if int(diag_rows[i][i]) < 0:
            s_rows[i] = [-x for x in s_rows[i]]
    return diagonal, s_rows, t_rows


def integer_left_kernel(rows: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Z-basis of ``{y in Z^m : y A = 0}`` for an integer matrix ``A``."""
    diagonal, s, _ = smith_decomposition(rows, ncols)
    rank = sum(1 for d in diagonal if d)
    return [row for row in s[rank:]]


def abelian_group_order(relations: Sequence[Sequence[int]], ncols: int) -> Optional[int]:
    """Order of ``Z^ncols / rowspan(relations)``, or ``None`` if infinite."""
    diagonal, _, _ = smith_decomposition(relations, ncols)
    if len(diagonal) < ncols or any(d == 0 for d in diagonal):
        return None
    order = 1
    for d in diagonal:
        order *= d
    return order


class IntegerLattice:
    """A sublattice of Z^n kept in row echelon form.

    Vectors are added one at a time; each insertion reduces the new vector
    against the existing pivots and merges pivot rows by extended gcd, so the
    basis stays echelon and spans exactly the lattice generated so far.
    """

    __slots__ = ("dimension", "basis", "pivot_row_of_column", "pivot_columns")

    def __init__(self, dimension: int, vectors: Iterable[Sequence[int]] = ()):
        self.dimension = dimension
        self.basis: list[list[int]] = []
        self.pivot_row_of_column: list[Optional[int]] = [None] * dimension
        self.pivot_columns: list[int] = []
        for vec in vectors:
            self.add_vector(vec)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def copy(self) -> "IntegerLattice":
        other = IntegerLattice(self.dimension)
        other.basis = [row.copy() for row in self.basis]
        other.pivot_row_of_column = self.pivot_row_of_column.copy()
        other.pivot_columns = self.pivot_columns.copy()
        return other

    def _reindex(self) -> None:
        self.pivot_row_of_column = [None] * self.dimension
        for i, j in enumerate(self.pivot_columns):
            self.pivot_row_of_column[j] = i

    def add_vector(self, vec0: Sequence[int]) -> bool:
        """Add a generator; return True when the lattice grew."""
        if len(vec0) != self.dimension:
            raise ValueError("vector has the wrong length")
        vec = [int(x) for x in vec0]
        n = self.dimension
        grew = False
        for j in range(n):
            if not vec[j]:
                continue
            p = self.pivot_row_of_column[j]
            if p is None:
                where = bisect_left(self.pivot_columns, j)
                self.basis.insert(where, vec)
                self.pivot_columns.insert(where, j)
                self._reindex()
                return True
            row = self.basis[p]
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                for jj in range(j, n):
                    vec[jj] -= q * row[jj]
            else:
                grew = True
                x, y, g = gcdex(a, b)
                ag, mbg = a // g, -b // g
                for jj in range(j, n):
                    aa, bb = row[jj], vec[jj]
                    row[jj] = x * aa + y * bb
                    vec[jj] = mbg * aa + ag * bb
        return grew

    def __contains__(self, vec0: Sequence[int]) -> bool:
        vec = [int(x) for x in vec0]
        n = self.dimension
        for j in range(n):
            if not vec[j]:
                continue
            p = self.pivot_row_of_column[j]
            if p is None:
                return False
            row = self.basis[p]
            if vec[j] % row[j]:
                return False
            q = vec[j] // row[j]
            for jj in range(j, n):
                vec[jj] -= q * row[jj]
        return True

    def coordinates(self, vec: Sequence) -> Optional[list[Fraction]]:
        """Rational coordinates of ``vec`` in the echelon basis, or None if outside the Q-span."""
        rest = [Fraction(x) for x in vec]
        coords = [Fraction(0)] * len(self.basis)
        for i, j in enumerate(self.pivot_columns):
            if not rest[j]:
                continue
            row = self.basis[i]
            c = rest[j] / row[j]
            coords[i] = c
            for jj in range(j, self.dimension):
                if row[jj]:
                    rest[jj] -= c * row[jj]
        if any(rest):
            return None
        return coords

    def hermite_basis(self) -> list[list[int]]:
        """Canonical basis: positive pivots, entries above each pivot reduced into [0, pivot)."""
        rows = [row.copy() for row in self.basis]
        for i, j in enumerate(self.pivot_columns):
            if rows[i][j] < 0:
                rows[i] = [-x for x in rows[i]]
            pivot = rows[i][j]
            for k in range(i):
                q = rows[k][j] // pivot
                if q:
                    rows[k] = [x - q * y for x, y in zip(rows[k], rows[i])]
        return rows

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntegerLattice):
            return NotImplemented
        return self.dimension == other.dimension and self.hermite_basis() == other.hermite_basis()

    def __hash__(self) -> int:
        return hash(tuple(map(tuple, self.hermite_basis())))

    def contains_lattice(self, other: "IntegerLattice") -> bool:
        return all(row in self for row in other.basis)

    def index_in(self, other: "IntegerLattice") -> Optional[int]:
        """``[other : self]`` when self is a full-rank sublattice of other."""
        if not other.contains_lattice(self) or self.rank != other.rank:
            return None
        coords = [other.coordinates(row) for row in self.basis]
        relations = [[int(c) for c in row] for row in coords]  # type: ignore[union-attr]
        return abelian_group_order(relations, other.rank)


def lattice_from_rational_rows(rows: Iterable[Sequence[Fraction]], dimension: int) -> tuple[IntegerLattice, int]:
    """Integer lattice ``d * span_Z(rows)`` together with the common denominator ``d``."""
    rows = [list(map(Fraction, r)) for r in rows]
    d = 1
    for row in rows:
        for x in row:
            d = lcm(d, x.denominator)
    lattice = IntegerLattice(dimension)
    for row in rows:
        lattice.add_vector([int(x * d) for x in row])
    return lattice, d
