"""Cohomology of a compact torus (S^1)^k with a rank-one coefficient system.

Two independent routes: the closed form (the binomial Betti numbers when
the character is trivial, nothing otherwise) and an explicit Koszul complex
over the cyclotomic field Q(zeta_m), whose ranks are computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, lcm
from typing import Sequence

from .charsys import Character, is_trivial

Poly = tuple  # integer coefficients, constant term first


def _trim(p) -> tuple:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def _polymul(a, b) -> tuple:
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def _polydivmod(a, b):
    """Division by a polynomial whose leading coefficient is +-1 or a field element."""
    a = [Fraction(x) for x in a]
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(_trim(a)) >= len(b):
        a = list(_trim(a))
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, y in enumerate(b):
            a[i + shift] -= f * y
    return _trim(q), _trim(a)


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> Poly:
    """Phi_m, by exact division of x^m - 1 by Phi_d for the proper divisors d.

    >>> cyclotomic_polynomial(12)
    (1, 0, -1, 0, 1)
    """
    if m < 1:
        raise ValueError("m must be positive")
    num = (-1,) + (0,) * (m - 1) + (1,)
    for d in range(1, m):
        if m % d == 0:
            q, r = _polydivmod(num, cyclotomic_polynomial(d))
            assert not r
            num = q
    return tuple(int(x) for x in num)


def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


@dataclass(frozen=True)
class CyclotomicElement:
    """An element of Q(zeta_m) as a polynomial in zeta of degree < phi(m)."""

    order: int
    coeffs: tuple

    def __post_init__(self):
        _, r = _polydivmod(tuple(Fraction(c) for c in self.coeffs), cyclotomic_polynomial(self.order))
        r = tuple(r) + (Fraction(0),) * (euler_phi(self.order) - len(r))
        object.__setattr__(self, "coeffs", r)

    @classmethod
    def zeta_power(cls, m: int, a: int) -> "CyclotomicElement":
        a %= m
        return cls(m, (0,) * a + (1,))

    @classmethod
    def scalar(cls, m: int, x) -> "CyclotomicElement":
        return cls(m, (x,))

    def __add__(self, other):
        self._same(other)
        return CyclotomicElement(self.order, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._same(other)
        return CyclotomicElement(self.order, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return CyclotomicElement(self.order, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        self._same(other)
        return CyclotomicElement(self.order, _polymul(self.coeffs, other.coeffs) or (0,))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _same(self, other):
        if self.order != other.order:
            raise ValueError("elements of different cyclotomic fields")

    def multiplication_matrix(self) -> list[list[Fraction]]:
        """Matrix of x -> self * x in the power basis 1, zeta, ..., zeta^(phi-1).

        Columns are images of basis vectors (companion-matrix powers).
        """
        phi = euler_phi(self.order)
        cols = []
        for i in range(phi):
            img = self * CyclotomicElement.zeta_power(self.order, i)
            cols.append(img.coeffs)
        return [[cols[j][i] for j in range(phi)] for i in range(phi)]


@dataclass(frozen=True)
class GradedRanks:
    """Dimensions of a graded vector space; equality ignores zero degrees."""

    offset: int
    ranks: tuple

    def nonzero(self) -> dict:
        return {self.offset + i: r for i, r in enumerate(self.ranks) if r}

    def canonical(self) -> "GradedRanks":
        nz = self.nonzero()
        if not nz:
            return GradedRanks(0, ())
        lo, hi = min(nz), max(nz)
        return GradedRanks(lo, tuple(nz.get(d, 0) for d in range(lo, hi + 1)))

    def shifted(self, m: int) -> "GradedRanks":
        return GradedRanks(self.offset + m, self.ranks)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * r for d, r in self.nonzero().items())

    def __eq__(self, other):
        if not isinstance(other, GradedRanks):
            return NotImplemented
        return self.nonzero() == other.nonzero()

    def __hash__(self):
        return hash(tuple(sorted(self.nonzero().items())))


def torus_cohomology_closed_form(k: int, chi: Character) -> GradedRanks:
    if chi.ambient_rank != k:
        raise ValueError(f"character on Z^{chi.ambient_rank} for a rank-{k} torus")
    if is_trivial(chi):
        return GradedRanks(0, tuple(comb(k, q) for q in range(k + 1)))
    return GradedRanks(0, (0,) * (k + 1))


def rational_rank(rows: Sequence[Sequence]) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    if not rows or not rows[0]:
        return 0
    a = []
    for row in rows:
        if all(isinstance(x, int) for x in row):
            a.append(list(row))
            continue
        den = lcm(1, *(Fraction(x).denominator for x in row))
        a.append([int(Fraction(x) * den) for x in row])
    nr, nc = len(a), len(a[0])
    r, prev = 0, 1
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nr):
            for j in range(c + 1, nc):
                a[i][j] = (a[i][j] * p - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = p
        r += 1
        if r == nr:
            break
    return r


def koszul_differential(k: int, chi: Character, q: int) -> list[list[int]]:
    """The map Lambda^q -> Lambda^(q+1), v -> c ^ v, expanded over Q.

    c_j = zeta^(a_j) - 1 where chi_j = a_j / m.  Each field entry becomes a
    phi(m) x phi(m) block.
    """
    m = chi.order
    phi = euler_phi(m)
    one = CyclotomicElement.scalar(m, 1)
    c = [CyclotomicElement.zeta_power(m, int(v * m)) - one for v in chi.values]
    # zeta^a - 1 has integer coordinates since Phi_m is monic
    blocks = [None if cj.is_zero() else [[int(x) for x in row] for row in cj.multiplication_matrix()] for cj in c]
    src = list(combinations(range(k), q))
    dst = list(combinations(range(k), q + 1))
    dst_index = {s: i for i, s in enumerate(dst)}
    mat = [[0] * (phi * len(src)) for _ in range(phi * len(dst))]
    for col, s in enumerate(src):
        for j in range(k):
            block = blocks[j]
            if j in s or block is None:
                continue
            sign = -1 if sum(1 for i in s if i < j) % 2 else 1
            row = dst_index[tuple(sorted(s + (j,)))]
            for a in range(phi):
                for b in range(phi):
                    mat[row * phi + a][col * phi + b] += sign * block[a][b]
    return mat


def torus_cohomology_koszul_oracle(k: int, chi: Character) -> GradedRanks:
    """Ranks of H^q(Z^k, C_chi) from the Koszul complex over Q(zeta_m)."""
    if chi.ambient_rank != k:
        raise ValueError(f"character on Z^{chi.ambient_rank} for a rank-{k} torus")
    phi = euler_phi(chi.order)
    ranks_d = []
    for q in range(k):
        r = rational_rank(koszul_differential(k, chi, q))
        assert r % phi == 0
        ranks_d.append(r // phi)
    out = []
    for q in range(k + 1):
        into = ranks_d[q - 1] if q > 0 else 0
        outof = ranks_d[q] if q < k else 0
        out.append(comb(k, q) - outof - into)
    return GradedRanks(0, tuple(out))
