"""Finite-order characters Z^n -> Q/Z and rank-one local systems built from them.

A character is stored by its values on the standard basis, each a reduced
fraction in [0, 1).  A local system on an orbit is modelled by the multiset
of its composition factors, each a character of the orbit's fundamental
group lattice.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, NotDescendable, ParseError
from .lattice import QuotientLattice, Sublattice


def _mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True, order=True)
class Character:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_mod1(v) for v in self.values))

    @property
    def ambient_rank(self) -> int:
        return len(self.values)

    @property
    def order(self) -> int:
        return lcm(1, *(v.denominator for v in self.values))

    @classmethod
    def trivial(cls, n: int) -> "Character":
        return cls((0,) * n)

    @classmethod
    def parse(cls, text: str) -> "Character":
        """Parse ``"1/2,1/3,0"``; values are reduced mod 1."""
        text = text.strip()
        if not text:
            return cls(())
        vals = []
        for pos, part in enumerate(text.split(",")):
            try:
                vals.append(Fraction(part.strip()))
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad character value {part.strip()!r}", 1, pos + 1) from None
        return cls(tuple(vals))

    def evaluate(self, v: Sequence[int]) -> Fraction:
        if len(v) != self.ambient_rank:
            raise DimensionMismatch(f"vector of length {len(v)} for character on Z^{self.ambient_rank}")
        return _mod1(sum(x * c for x, c in zip(v, self.values)))

    def __add__(self, other: "Character") -> "Character":
        if other.ambient_rank != self.ambient_rank:
            raise DimensionMismatch("characters on different lattices")
        return Character(tuple(a + b for a, b in zip(self.values, other.values)))

    def __str__(self):
        return ",".join(str(v) for v in self.values)


def is_trivial(chi: Character) -> bool:
    return not any(chi.values)


def restrict(chi: Character, s: Sublattice) -> Character:
    """Restriction to ``s``, in coordinates of ``s.basis``."""
    if s.ambient_rank != chi.ambient_rank:
        raise DimensionMismatch(f"character on Z^{chi.ambient_rank}, sublattice of Z^{s.ambient_rank}")
    return Character(tuple(chi.evaluate(b) for b in s.basis))


def descend(chi: Character, q: QuotientLattice) -> Character:
    """The character of Z^n/q.sub whose pullback is ``chi``.

    >>> from .lattice import Sublattice, complete_basis
    >>> q = complete_basis(Sublattice(2, ((1, 0),)))
    >>> str(descend(Character.parse("0,1/3"), q))
    '1/3'
    """
    if q.ambient_rank != chi.ambient_rank:
        raise DimensionMismatch(f"character on Z^{chi.ambient_rank}, quotient of Z^{q.ambient_rank}")
    res = restrict(chi, q.sub)
    if not is_trivial(res):
        raise NotDescendable(f"restriction {res} to the subgroup is nontrivial")
    return Character(tuple(chi.evaluate(b) for b in q.complement_basis))


def pullback(chi_bar: Character, q: QuotientLattice) -> Character:
    """Pull a quotient character back along Z^n -> Z^n/q.sub."""
    if chi_bar.ambient_rank != q.rank:
        raise DimensionMismatch(f"character on Z^{chi_bar.ambient_rank}, quotient of rank {q.rank}")
    n = q.ambient_rank
    unit = lambda j: tuple(int(i == j) for i in range(n))  # noqa: E731
    return Character(tuple(chi_bar.evaluate(q.project(unit(j))) for j in range(n)))


def dual(chi: Character) -> Character:
    return Character(tuple(-v for v in chi.values))


@dataclass(frozen=True)
class LocalSystemClass:
    """Semisimplified local system: characters with multiplicities."""

    quotient: QuotientLattice | None
    factors: Mapping[Character, int] = field(default_factory=dict)

    def __post_init__(self):
        counts = Counter()
        for chi, mult in dict(self.factors).items():
            if mult < 0:
                raise ValueError("negative multiplicity")
            if self.quotient is not None and chi.ambient_rank != self.quotient.rank:
                raise DimensionMismatch(f"factor {chi} does not live on the orbit lattice")
            if mult:
                counts[chi] += mult
        object.__setattr__(self, "factors", dict(sorted(counts.items())))

    @classmethod
    def of(cls, quotient, chars: Iterable[Character]) -> "LocalSystemClass":
        return cls(quotient, Counter(chars))

    @property
    def total_rank(self) -> int:
        return sum(self.factors.values())

    def __add__(self, other: "LocalSystemClass") -> "LocalSystemClass":
        """Multiset union: the semisimplification of an extension."""
        merged = Counter(self.factors)
        merged.update(other.factors)
        return LocalSystemClass(self.quotient if self.quotient is not None else other.quotient, merged)

    def __hash__(self):
        return hash((self.quotient, tuple(self.factors.items())))


def is_twisted(cls: LocalSystemClass) -> bool:
    """No composition factor is trivial (vacuously true for rank 0)."""
    return not any(is_trivial(chi) for chi in cls.factors)
