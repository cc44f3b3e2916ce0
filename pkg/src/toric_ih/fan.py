"""Rational polyhedral fans, their face posets and per-cone lattice data.

Cones are stored by their primitive ray generators.  Faces are found by
exact supporting-hyperplane tests on generator subsets, which is plenty for
the small fans this package deals with.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from math import gcd
from typing import Iterable, Mapping, Sequence

from .errors import DimensionMismatch, UnknownCone
from .lattice import (
    QuotientLattice,
    Sublattice,
    complete_basis,
    dot,
    integer_kernel,
    rank,
    saturate,
)


class FanWarning(UserWarning):
    """Input was normalized (duplicate cone, non-primitive or redundant generator)."""


def primitive(v: Sequence[int]) -> tuple:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise ValueError("the zero vector has no primitive direction")
    return tuple(int(x) // g for x in v)


def describe(gens) -> str:
    gens = sorted(gens)
    if not gens:
        return "zero cone"
    if len(gens) == 1:
        return "ray" + str(tuple(gens[0])).replace(" ", "")
    return "cone{" + ",".join(str(tuple(g)).replace(" ", "") for g in gens) + "}"


@dataclass(frozen=True)
class _ConeGeometry:
    dim: int
    facets: tuple  # (normal, frozenset of generators on the facet)
    equations: tuple  # integer vectors orthogonal to the span
    faces: frozenset  # frozensets of generators, including empty and full
    strongly_convex: bool
    extreme_rays: frozenset


@lru_cache(maxsize=None)
def _geometry(gens: frozenset, n: int) -> _ConeGeometry:
    gl = sorted(gens)
    equations = tuple(integer_kernel(tuple(gl), n)) if gl else tuple(
        tuple(int(i == j) for j in range(n)) for i in range(n))
    if not gl:
        return _ConeGeometry(0, (), equations, frozenset([frozenset()]), True, frozenset())
    span = saturate(Sublattice.spanned_by(gl, n)).basis
    d = len(span)
    facets = {}
    for sub in combinations(gl, d - 1):
        if sub and rank(tuple(sub)) != d - 1:
            continue
        a = tuple(tuple(dot(b, s) for b in span) for s in sub)
        (c,) = integer_kernel(a, d)
        u = tuple(sum(c[i] * span[i][j] for i in range(d)) for j in range(n))
        vals = [dot(u, g) for g in gl]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            u = tuple(-x for x in u)
        else:
            continue
        on = frozenset(g for g, x in zip(gl, vals) if x == 0)
        facets.setdefault(on, u)
    full = frozenset(gl)
    faces = {full}
    frontier = set(facets)
    while frontier:
        faces |= frontier
        frontier = {a & b for a in faces for b in facets} - faces
    minimal = full
    for f in facets:
        minimal &= f
    convex = not minimal
    rays = frozenset(next(iter(f)) for f in faces if len(f) == 1) if convex else frozenset()
    return _ConeGeometry(
        d,
        tuple((u, on) for on, u in sorted(facets.items(), key=lambda kv: sorted(kv[0]))),
        equations,
        frozenset(faces),
        convex,
        rays,
    )


@dataclass(frozen=True)
class Cone:
    id: int
    generators: tuple

    @property
    def dim(self) -> int:
        return _geometry(frozenset(self.generators), len(self.generators[0])).dim if self.generators else 0

    @property
    def key(self) -> frozenset:
        return frozenset(self.generators)

    def __str__(self):
        return describe(self.generators)


@dataclass(frozen=True)
class OrbitData:
    cone: Cone
    stab_lattice: Sublattice
    quotient: QuotientLattice

    @property
    def orbit_dim(self) -> int:
        return self.quotient.rank


@dataclass(frozen=True)
class Fan:
    """A collection of cones in Z^n with the induced face relation.

    Construction does not enforce the fan axioms; see :func:`validate_fan`
    and :func:`close_fan`.
    """

    ambient_rank: int
    cones: tuple
    names: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "cones", tuple(self.cones))
        for c in self.cones:
            for g in c.generators:
                if len(g) != self.ambient_rank:
                    raise DimensionMismatch(f"generator {g} of {c} not in Z^{self.ambient_rank}")

    @cached_property
    def _by_id(self) -> dict:
        return {c.id: c for c in self.cones}

    @cached_property
    def _by_key(self) -> dict:
        return {c.key: c for c in self.cones}

    def cone(self, cone_id: int) -> Cone:
        try:
            return self._by_id[cone_id]
        except KeyError:
            raise UnknownCone(f"no cone with id {cone_id}") from None

    def find(self, generators: Iterable[Sequence[int]]) -> Cone:
        key = frozenset(primitive(g) for g in generators)
        try:
            return self._by_key[key]
        except KeyError:
            raise UnknownCone(f"{describe(key)} is not in the fan") from None

    @property
    def zero_cone(self) -> Cone:
        return self.find(())

    def geometry(self, c: Cone) -> _ConeGeometry:
        return _geometry(c.key, self.ambient_rank)

    @cached_property
    def face_relation(self) -> frozenset:
        """Pairs ``(sigma.id, tau.id)`` with sigma a face of tau."""
        rel = set()
        for tau in self.cones:
            faces = self.geometry(tau).faces
            for sigma in self.cones:
                if sigma.key in faces:
                    rel.add((sigma.id, tau.id))
        return frozenset(rel)

    @cached_property
    def _orbit_cache(self) -> dict:
        return {}

    def _check(self, c: Cone) -> Cone:
        if self._by_id.get(c.id) != c:
            raise UnknownCone(f"{c} (id {c.id}) is not in the fan")
        return c


def _sort_key(gens) -> tuple:
    gl = sorted(gens)
    dim = _geometry(frozenset(gl), len(gl[0])).dim if gl else 0
    return (dim, gl)


def make_fan(ambient_rank: int, cones: Iterable[Iterable[Sequence[int]]], names: Mapping | None = None) -> Fan:
    """Build a Fan from generator lists exactly as given (no closure).

    Cone ids follow the order (dimension, sorted generator list).
    """
    keys = []
    for gens in cones:
        k = frozenset(primitive(g) for g in gens)
        if k not in keys:
            keys.append(k)
    keys.sort(key=_sort_key)
    out = tuple(Cone(i, tuple(sorted(k))) for i, k in enumerate(keys))
    id_names = {}
    for k, name in (names or {}).items():
        k = frozenset(k)
        for c in out:
            if c.key == k:
                id_names[c.id] = name
    return Fan(ambient_rank, out, id_names)


def close_fan(ambient_rank: int, cones: Iterable[Iterable[Sequence[int]]], names: Mapping | None = None) -> Fan:
    """Normalize generators, deduplicate, and add all missing faces.

    Non-primitive and redundant (non-extreme) generators are replaced with
    a :class:`FanWarning`.  Validation is left to the caller.
    """
    seen = {}
    named = {}
    name_list = list((names or {}).items())
    for idx, gens in enumerate(cones):
        gens = [tuple(int(x) for x in g) for g in gens]
        for g in gens:
            if len(g) != ambient_rank:
                raise DimensionMismatch(f"generator {g} not in Z^{ambient_rank}")
            if not any(g):
                raise ValueError("zero vector is not a valid generator")
        prim = []
        for g in gens:
            p = primitive(g)
            if p != g:
                warnings.warn(f"generator {g} normalized to primitive {p}", FanWarning, stacklevel=2)
            prim.append(p)
        key = frozenset(prim)
        geo = _geometry(key, ambient_rank)
        if geo.strongly_convex and geo.extreme_rays != key:
            warnings.warn(f"{describe(key)} reduced to its extreme rays", FanWarning, stacklevel=2)
            key = geo.extreme_rays
        if key in seen:
            warnings.warn(f"duplicate {describe(key)} removed", FanWarning, stacklevel=2)
        seen.setdefault(key, idx)
        for k, name in name_list:
            if k == idx:
                named[key] = name
    allkeys = set(seen)
    allkeys.add(frozenset())
    for key in list(seen):
        geo = _geometry(key, ambient_rank)
        if geo.strongly_convex:
            allkeys |= geo.faces
    return make_fan(ambient_rank, allkeys, named)


def _extreme_rays_of_intersection(a: _ConeGeometry, b: _ConeGeometry, n: int) -> frozenset:
    eqs = list(a.equations) + list(b.equations)
    ineqs = [u for u, _ in a.facets] + [u for u, _ in b.facets]
    rays = set()
    for size in range(0, min(len(ineqs), n - 1) + 1):
        for active in combinations(ineqs, size):
            rows = tuple(eqs) + tuple(active)
            if rows and rank(rows, n) != n - 1:
                continue
            if not rows and n != 1:
                continue
            ker = integer_kernel(rows, n) if rows else [(1,)]
            if len(ker) != 1:
                continue
            x = ker[0]
            for s in (x, tuple(-y for y in x)):
                if all(dot(u, s) >= 0 for u in ineqs):
                    rays.add(primitive(s))
    return frozenset(rays)


def validate_fan(f: Fan) -> list[str]:
    """Human-readable list of fan-axiom violations (empty iff valid)."""
    out = []
    n = f.ambient_rank
    keys = {c.key for c in f.cones}
    if frozenset() not in keys:
        out.append("zero cone missing")
    if len(keys) != len(f.cones):
        out.append("duplicate cone")
    for c in f.cones:
        for g in c.generators:
            if not any(g):
                out.append(f"zero generator in {c}")
            elif primitive(g) != tuple(g):
                out.append(f"generator {g} of {c} not primitive")
        geo = f.geometry(c)
        if not geo.strongly_convex:
            out.append(f"{c} is not strongly convex")
            continue
        if geo.extreme_rays != c.key:
            out.append(f"{c} has non-extreme generators")
        for face in sorted(geo.faces, key=lambda k: sorted(k)):
            if face not in keys:
                out.append(f"face missing: {describe(face)} of {c}")
    convex = [c for c in f.cones if f.geometry(c).strongly_convex]
    for s, t in combinations(convex, 2):
        gs, gt = f.geometry(s), f.geometry(t)
        inter = _extreme_rays_of_intersection(gs, gt, n)
        if inter not in gs.faces or inter not in gt.faces:
            out.append(f"intersection not a common face: {s} and {t}")
    rel = f.face_relation
    ids = [c.id for c in f.cones]
    for i in ids:
        if (i, i) not in rel:
            out.append(f"face relation not reflexive at cone {i}")
    for (a, b) in rel:
        if a != b and (b, a) in rel:
            out.append(f"face relation not antisymmetric at cones {a}, {b}")
        for (c, d) in rel:
            if b == c and (a, d) not in rel:
                out.append(f"face relation not transitive at cones {a}, {b}, {d}")
    return out


def faces_of(f: Fan, tau: Cone) -> list[Cone]:
    """All faces of ``tau`` in ``f``, including the zero cone and ``tau``."""
    f._check(tau)
    return [f.cone(s) for s in sorted(s for (s, t) in f.face_relation if t == tau.id)]


def orbit_data(f: Fan, sigma: Cone) -> OrbitData:
    """N_sigma = Z^n ∩ R·sigma and the orbit lattice Z^n / N_sigma."""
    f._check(sigma)
    cache = f._orbit_cache
    if sigma.id not in cache:
        stab = saturate(Sublattice.spanned_by(sigma.generators, f.ambient_rank))
        cache[sigma.id] = OrbitData(sigma, stab, complete_basis(stab))
    return cache[sigma.id]


def codim_filtration(f: Fan) -> list[list[Cone]]:
    """Level k holds the cones of dimension k (orbits of codimension k)."""
    levels = [[] for _ in range(f.ambient_rank + 1)]
    for c in f.cones:
        levels[c.dim].append(c)
    return levels
