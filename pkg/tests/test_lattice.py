"""Integer lattice routines against independent oracles.

Invariant factors are cross-checked with sympy and with determinantal
divisors (gcd of k x k minors); saturation against brute-force enumeration
of small lattice points.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd

import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from toric_ih.charsys import Character, descend, pullback
from toric_ih.errors import DimensionMismatch, NotSaturated
from toric_ih.lattice import (
    QuotientLattice,
    Sublattice,
    complete_basis,
    determinant,
    diagonal,
    identity,
    is_saturated,
    matmul,
    membership,
    rank,
    saturate,
    smith_normal_form,
)


def determinantal_divisors(m):
    """Invariant factors via d_k = gcd of all k x k minors, d_k / d_(k-1)."""
    rows, cols = len(m), len(m[0])
    prev, out = 1, []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for ri in combinations(range(rows), k):
            for ci in combinations(range(cols), k):
                g = gcd(g, determinant(tuple(tuple(m[i][j] for j in ci) for i in ri)))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def in_rational_span(v, vectors):
    if not vectors:
        return not any(v)
    return rank(tuple(vectors) + (tuple(v),)) == rank(tuple(vectors))


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def test_snf_2x2_example():
    m = ((2, 4), (6, 8))
    u, d, v = smith_normal_form(m)
    assert d == ((2, 0), (0, 4))
    assert matmul(matmul(u, m), v) == d
    # independent routes: minors and sympy
    assert determinantal_divisors(m) == [2, 4]
    assert [abs(x) for x in diagonal(d)] == [2, 4]
    assert abs(determinant(m)) == 8 == 2 * 4
    s = sympy_snf(Matrix(m), domain=ZZ)
    assert sorted(abs(s[i, i]) for i in range(2)) == [2, 4]


def test_snf_identity_and_zero():
    i3 = identity(3)
    _, d, _ = smith_normal_form(i3)
    assert d == i3
    u, d, v = smith_normal_form(((0, 0), (0, 0)))
    assert d == ((0, 0), (0, 0))
    assert u == identity(2) and v == identity(2)


@given(matrices)
def test_snf_invariants(m):
    m = tuple(tuple(r) for r in m)
    u, d, v = smith_normal_form(m)
    assert matmul(matmul(u, m), v) == d
    assert abs(determinant(u)) == 1
    assert abs(determinant(v)) == 1
    diag = diagonal(d)
    for i, row in enumerate(d):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    nz = [abs(x) for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert nz == determinantal_divisors(m)


def test_saturate_examples():
    assert saturate(Sublattice.spanned_by([(2, 0)], 2)).basis == ((1, 0),)
    full = Sublattice.spanned_by([(1, 0), (0, 1)], 2)
    assert is_saturated(full)
    sat = saturate(full)
    assert all(membership(e, sat) for e in [(1, 0), (0, 1)])


def test_saturate_index_two_span_is_everything():
    """span{(2,2),(2,-2)} has rank 2, so its saturation is all of Z^2.

    Brute force: every small integer point lies in the rational span, and
    membership in the computed saturation agrees point by point.  Note that
    span{(1,1),(1,-1)} is itself of index 2 and is not the answer.
    """
    s = Sublattice.spanned_by([(2, 2), (2, -2)], 2)
    sat = saturate(s)
    for v in product(range(-3, 4), repeat=2):
        assert membership(v, sat) == in_rational_span(v, [(2, 2), (2, -2)])
    assert abs(determinant(sat.basis)) == 1
    assert not membership((1, 0), Sublattice.spanned_by([(1, 1), (1, -1)], 2))


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=1, max_size=3))
def test_saturate_brute_force_and_idempotent(vectors):
    vectors = [tuple(v) for v in vectors]
    s = Sublattice.spanned_by(vectors, 3)
    sat = saturate(s)
    assert saturate(sat) == sat
    assert is_saturated(sat)
    assert sat.rank == rank(tuple(vectors), 3)
    for v in product(range(-2, 3), repeat=3):
        assert membership(v, sat) == in_rational_span(v, vectors)


def test_complete_basis_examples():
    q = complete_basis(Sublattice.spanned_by([(1, 0)], 2))
    assert abs(determinant(q.basis_matrix)) == 1
    q = complete_basis(Sublattice.spanned_by([(1, 1)], 2))
    assert abs(determinant(((1, 1),) + q.complement_basis)) == 1
    # (0,1) is an admissible complement and the constructor accepts it
    QuotientLattice(2, Sublattice(2, ((1, 1),)), ((0, 1),))
    with pytest.raises(NotSaturated):
        complete_basis(Sublattice.spanned_by([(2, 0)], 2))


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=0, max_size=2))
def test_complete_basis_unimodular(vectors):
    sat = saturate(Sublattice.spanned_by([tuple(v) for v in vectors], 3))
    q = complete_basis(sat)
    assert len(q.basis_matrix) == 3
    assert abs(determinant(q.basis_matrix)) == 1


def test_membership_examples():
    assert membership((2, 0), Sublattice.spanned_by([(1, 0)], 2))
    assert not membership((1, 1), Sublattice.spanned_by([(1, 0)], 2))
    s = Sublattice.spanned_by([(1, 1), (1, -1)], 2)
    assert membership((3, 3), s)
    # oracle: solve x(1,1) + y(1,-1) = (3,3) over Q, check integrality
    x, y = Fraction(3 + 3, 2), Fraction(3 - 3, 2)
    assert x.denominator == 1 and y.denominator == 1
    assert not membership((1, 0), s)
    with pytest.raises(DimensionMismatch):
        membership((1, 0, 0), s)


def _random_unimodular(data, n):
    m = [list(r) for r in identity(n)]
    for _ in range(data.draw(st.integers(0, 6))):
        i = data.draw(st.integers(0, n - 1))
        j = data.draw(st.integers(0, n - 1))
        if i != j:
            c = data.draw(st.integers(-3, 3))
            m[i] = [a + c * b for a, b in zip(m[i], m[j])]
    return tuple(tuple(r) for r in m)


@given(st.data())
def test_completion_independence(data):
    """Two completions give the same quotient character (compared on Z^n)."""
    n = 3
    vecs = data.draw(st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=1, max_size=2))
    sat = saturate(Sublattice.spanned_by([tuple(v) for v in vecs], n))
    q1 = complete_basis(sat)
    # re-complete: mix the complement by a unimodular matrix and add sub vectors
    g = _random_unimodular(data, q1.rank) if q1.rank else ()
    comp = [list(r) for r in matmul(g, q1.complement_basis)] if q1.rank else []
    for row in comp:
        for b in sat.basis:
            c = data.draw(st.integers(-2, 2))
            row[:] = [x + c * y for x, y in zip(row, b)]
    q2 = QuotientLattice(n, sat, tuple(tuple(r) for r in comp))
    # a character trivial on sat: pull back a random quotient character
    vals = data.draw(st.lists(st.fractions(0, 1, max_denominator=12), min_size=q1.rank, max_size=q1.rank))
    chi = pullback(Character(tuple(vals)), q1)
    d1, d2 = descend(chi, q1), descend(chi, q2)
    assert pullback(d1, q1) == pullback(d2, q2) == chi
