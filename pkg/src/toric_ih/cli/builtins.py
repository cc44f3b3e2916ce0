"""Named standard fans used by the CLI and the acceptance corpus."""

from __future__ import annotations

from itertools import combinations

from ..errors import UnknownName
from ..fan import Fan, close_fan


def _unit(n, i):
    return tuple(int(i == j) for j in range(n))


def affine(n: int) -> Fan:
    return close_fan(n, [[_unit(n, i) for i in range(n)]])


def projective_space(n: int) -> Fan:
    rays = [_unit(n, i) for i in range(n)] + [tuple(-1 for _ in range(n))]
    return close_fan(n, [list(c) for c in combinations(rays, n)])


def p1xp1() -> Fan:
    return close_fan(2, [[(1, 0), (0, 1)], [(0, 1), (-1, 0)], [(-1, 0), (0, -1)], [(0, -1), (1, 0)]])


def hirzebruch(a: int) -> Fan:
    r = [(1, 0), (0, 1), (-1, a), (0, -1)]
    return close_fan(2, [[r[i], r[(i + 1) % 4]] for i in range(4)])


def weighted_p112() -> Fan:
    r = [(1, 0), (0, 1), (-1, -2)]
    return close_fan(2, [list(c) for c in combinations(r, 2)])


def cone_over_square() -> Fan:
    return close_fan(3, [[(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)]])


def a1_surface() -> Fan:
    return close_fan(2, [[(1, 0), (1, 2)]])


_PARAMETRIC = {"affine": affine, "projective_space": projective_space, "hirzebruch": hirzebruch}
_PLAIN = {
    "p1xp1": p1xp1,
    "weighted_p112": weighted_p112,
    "cone_over_square": cone_over_square,
    "a1_surface": a1_surface,
}

CORPUS = (
    "affine:1", "affine:2", "affine:3",
    "projective_space:1", "projective_space:2",
    "p1xp1", "hirzebruch:1", "hirzebruch:2",
    "weighted_p112", "a1_surface", "cone_over_square",
)


def builtin_fan(name: str) -> Fan:
    """``affine:n``, ``projective_space:n``, ``hirzebruch:a`` or a plain name."""
    base, _, arg = name.partition(":")
    if base in _PLAIN and not arg:
        return _PLAIN[base]()
    if base in _PARAMETRIC and arg:
        try:
            k = int(arg)
        except ValueError:
            raise UnknownName(f"unknown built-in fan {name!r}") from None
        if base != "hirzebruch" and k < 1:
            raise UnknownName(f"unknown built-in fan {name!r}")
        return _PARAMETRIC[base](k)
    raise UnknownName(f"unknown built-in fan {name!r}")
