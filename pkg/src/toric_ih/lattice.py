"""Exact integer-lattice linear algebra.

Matrices are tuples of row tuples of Python ints (arbitrary precision).  A
matrix with no rows cannot carry its column count, so functions that may see
one take the column count explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotSaturated

IntMatrix = tuple  # tuple[tuple[int, ...], ...]
Vector = tuple  # tuple[int, ...]


def as_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    if m and len({len(row) for row in m}) != 1:
        raise DimensionMismatch("ragged matrix")
    return m


def identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(m: IntMatrix, ncols: int | None = None) -> IntMatrix:
    if not m:
        return tuple(() for _ in range(ncols or 0))
    return tuple(zip(*m))


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def vecmat(v: Sequence[int], m: IntMatrix) -> Vector:
    """Row vector times matrix."""
    if not m:
        return ()
    return tuple(sum(v[i] * m[i][j] for i in range(len(m))) for j in range(len(m[0])))


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"length {len(u)} vs {len(v)}")
    return sum(x * y for x, y in zip(u, v))


def determinant(m: IntMatrix) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def smith_normal_form(m: IntMatrix, ncols: int | None = None):
    """Return ``(U, D, V)`` with ``U @ m @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with nonnegative entries
    and each diagonal entry divides the next.  Pivots are chosen as the
    smallest nonzero absolute value in the remaining block.

    >>> smith_normal_form(((2, 4), (6, 8)))[1]
    ((2, 0), (0, 4))
    """
    m = as_matrix(m)
    r = len(m)
    c = len(m[0]) if m else (ncols or 0)
    a = [list(row) for row in m]
    u = [list(row) for row in identity(r)]
    v = [list(row) for row in identity(c)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(r, c)):
        while True:
            best = None
            for i in range(t, r):
                for j in range(t, c):
                    x = a[i][j]
                    if x and (best is None or abs(x) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            for i in range(t + 1, r):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
            for j in range(t + 1, c):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
            if any(a[i][t] for i in range(t + 1, r)) or any(a[t][j] for j in range(t + 1, c)):
                continue
            bad = next(
                (i for i in range(t + 1, r) for j in range(t + 1, c) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if t < r and t < c and a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    return as_matrix(u), as_matrix(a) if a else (), as_matrix(v)


def diagonal(d: IntMatrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


def rank(m: IntMatrix, ncols: int | None = None) -> int:
    _, d, _ = smith_normal_form(m, ncols)
    return sum(1 for x in diagonal(d) if x)


def integer_kernel(m: IntMatrix, ncols: int) -> list[Vector]:
    """Basis of the integer vectors ``x`` with ``m @ x == 0``."""
    _, d, v = smith_normal_form(m, ncols)
    rk = sum(1 for x in diagonal(d) if x)
    return [tuple(v[i][j] for i in range(ncols)) for j in range(rk, ncols)]


def inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of a square integer matrix of determinant +-1."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    inv = [row[n:] for row in a]
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def hermite_form(rows: IntMatrix, ncols: int) -> IntMatrix:
    """Row Hermite normal form with the zero rows dropped.

    Two generating sets span the same lattice iff their forms agree.
    """
    a = [list(r) for r in rows]
    r = 0
    for c in range(ncols):
        while True:
            live = [i for i in range(r, len(a)) if a[i][c]]
            if not live:
                break
            p = min(live, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, len(a)):
                q = a[i][c] // a[r][c]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                if a[i][c]:
                    done = False
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
    return tuple(tuple(row) for row in a[:r])


@dataclass(frozen=True)
class Sublattice:
    """A sublattice of Z^n given by a Q-linearly independent basis."""

    ambient_rank: int
    basis: tuple

    def __post_init__(self):
        basis = as_matrix(self.basis)
        object.__setattr__(self, "basis", basis)
        for b in basis:
            if len(b) != self.ambient_rank:
                raise DimensionMismatch(f"basis vector {b} not in Z^{self.ambient_rank}")
        if basis and rank(basis) != len(basis):
            raise ValueError("sublattice basis must be linearly independent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def spanned_by(cls, vectors: Iterable[Sequence[int]], ambient_rank: int) -> "Sublattice":
        """The Z-span of an arbitrary generating set, in Hermite form."""
        gens = as_matrix(v for v in vectors if any(v))
        for g in gens:
            if len(g) != ambient_rank:
                raise DimensionMismatch(f"vector {g} not in Z^{ambient_rank}")
        return cls(ambient_rank, hermite_form(gens, ambient_rank))


def saturate(s: Sublattice) -> Sublattice:
    """Basis of ``span_Q(s) ∩ Z^n`` (Hermite form, so equal lattices compare equal)."""
    if s.rank == 0:
        return s
    _, d, v = smith_normal_form(s.basis, s.ambient_rank)
    w = inverse_unimodular(v)
    return Sublattice(s.ambient_rank, hermite_form(w[: s.rank], s.ambient_rank))


def is_saturated(s: Sublattice) -> bool:
    if s.rank == 0:
        return True
    _, d, _ = smith_normal_form(s.basis, s.ambient_rank)
    return all(x == 1 for x in diagonal(d))


def membership(v: Sequence[int], s: Sublattice) -> bool:
    """True iff ``v`` lies in the Z-span of ``s.basis``."""
    if len(v) != s.ambient_rank:
        raise DimensionMismatch(f"vector of length {len(v)} in Z^{s.ambient_rank}")
    if s.rank == 0:
        return not any(v)
    _, d, vv = smith_normal_form(s.basis, s.ambient_rank)
    rhs = vecmat(v, vv)
    diag = diagonal(d)
    for j, x in enumerate(rhs):
        dj = diag[j] if j < len(diag) else 0
        if dj == 0:
            if x:
                return False
        elif x % dj:
            return False
    return True


@dataclass(frozen=True)
class QuotientLattice:
    """Z^n / sub, presented by a complement completing ``sub.basis`` to a Z-basis."""

    ambient_rank: int
    sub: Sublattice
    complement_basis: tuple

    def __post_init__(self):
        comp = as_matrix(self.complement_basis)
        object.__setattr__(self, "complement_basis", comp)
        if self.sub.rank + len(comp) != self.ambient_rank:
            raise DimensionMismatch("sub and complement do not fill the ambient lattice")
        if abs(determinant(self.basis_matrix)) != 1:
            raise NotSaturated("sub basis and complement are not a Z-basis")

    @property
    def rank(self) -> int:
        return len(self.complement_basis)

    @property
    def basis_matrix(self) -> IntMatrix:
        return self.sub.basis + self.complement_basis

    @cached_property
    def _inverse(self) -> IntMatrix:
        return inverse_unimodular(self.basis_matrix)

    def coordinates(self, v: Sequence[int]) -> Vector:
        """Coordinates of ``v`` in the basis ``sub.basis + complement_basis``."""
        if len(v) != self.ambient_rank:
            raise DimensionMismatch(f"vector of length {len(v)} in Z^{self.ambient_rank}")
        return vecmat(v, self._inverse)

    def project(self, v: Sequence[int]) -> Vector:
        """Image of ``v`` in the quotient, in complement coordinates."""
        return self.coordinates(v)[self.sub.rank:]


def complete_basis(s: Sublattice) -> QuotientLattice:
    """Complete a saturated sublattice basis to a basis of Z^n.

    The completion is read off the Smith transform: the trailing rows of the
    inverse column transform.
    """
    n = s.ambient_rank
    if s.rank == 0:
        return QuotientLattice(n, s, identity(n))
    _, d, v = smith_normal_form(s.basis, n)
    if any(x != 1 for x in diagonal(d)):
        raise NotSaturated(f"Z^{n}/span{list(s.basis)} has torsion {diagonal(d)}")
    w = inverse_unimodular(v)
    return QuotientLattice(n, s, w[s.rank:])
