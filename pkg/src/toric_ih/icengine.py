"""Deligne's construction of intersection complexes on a fan, in a split model.

A constructible complex is represented per cone by a list of entries: a
character of the orbit lattice N/N_sigma, a window of degrees it can occupy,
and per-degree rank bounds.  Entries produced by the pushforward from the
open orbit alone are exact; everything assembled from several orbits is an
over-approximation that keeps every character that could occur.

The pushforward rule across a face sigma < tau: restrict the character to
the image of N_tau in N/N_sigma; if that restriction is nontrivial the
contribution dies, otherwise the character descends to N/N_tau and the
degrees are smeared by the exterior algebra of rank dim tau - dim sigma.
"""

from __future__ import annotations

import math
import re
from collections import defaultdict
from dataclasses import dataclass, field, replace
from math import comb
from typing import Iterable, Mapping

from .charsys import (
    Character,
    LocalSystemClass,
    descend,
    dual,
    is_trivial,
    pullback,
    restrict,
)
from .errors import DimensionMismatch, ParseError, PerversityUndefined, SupportTooDeep
from .fan import Cone, Fan, codim_filtration, orbit_data
from .lattice import Sublattice

INF = math.inf


@dataclass(frozen=True)
class Perversity:
    """Integer function on codimensions 1..n; ``values[c - 1]`` is p(c)."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))

    def __call__(self, codim: int) -> int:
        if not 1 <= codim <= len(self.values):
            raise PerversityUndefined(f"perversity not defined in codimension {codim}")
        return self.values[codim - 1]

    @property
    def max_codim(self) -> int:
        return len(self.values)

    @classmethod
    def preset(cls, name: str, n: int) -> "Perversity":
        """``middle``, ``upper``, ``zero`` or ``top``; p(1) = 0 for all of them."""
        formulas = {
            "zero": lambda c: 0,
            "middle": lambda c: (c - 2) // 2,
            "upper": lambda c: (c - 1) // 2,
            "top": lambda c: c - 2,
        }
        if name not in formulas:
            raise PerversityUndefined(f"unknown perversity preset {name!r}")
        return cls(tuple(0 if c == 1 else formulas[name](c) for c in range(1, n + 1)))

    @classmethod
    def parse(cls, text: str, n: int) -> "Perversity":
        """A preset name or an explicit list ``p(1)=0,p(2)=0,...``."""
        text = text.strip()
        if re.fullmatch(r"[a-z]+", text):
            return cls.preset(text, n)
        vals = {}
        for pos, part in enumerate(filter(None, (s.strip() for s in text.split(",")))):
            m = re.fullmatch(r"p\((\d+)\)\s*=\s*(-?\d+)", part)
            if not m:
                raise ParseError(f"bad perversity term {part!r}", 1, pos + 1)
            vals[int(m.group(1))] = int(m.group(2))
        missing = [c for c in range(1, n + 1) if c not in vals]
        if missing:
            raise PerversityUndefined(f"perversity missing codimensions {missing}")
        return cls(tuple(vals[c] for c in range(1, n + 1)))

    def is_strict_gm(self) -> bool:
        """p(1) = p(2) = 0 and p(c) <= p(c+1) <= p(c) + 1."""
        v = self.values
        if v and v[0] != 0:
            return False
        if len(v) >= 2 and v[1] != 0:
            return False
        return all(v[i] <= v[i + 1] <= v[i] + 1 for i in range(len(v) - 1))

    def dual(self) -> "Perversity":
        """q(c) = c - 2 - p(c) for c >= 2, q(1) = 0."""
        if not self.is_strict_gm():
            raise PerversityUndefined(f"{self} is not a strict GM perversity; supply the dual explicitly")
        return Perversity(tuple(0 if c == 1 else c - 2 - self(c) for c in range(1, self.max_codim + 1)))

    def __str__(self):
        return ",".join(f"p({c})={v}" for c, v in enumerate(self.values, 1))


@dataclass(frozen=True)
class ComplexEntry:
    cone: Cone
    degree_low: int
    degree_high: float  # int, or INF before truncation
    factors: LocalSystemClass
    rank_bounds: tuple  # sorted (degree, rank) pairs
    exact: bool

    def __post_init__(self):
        if self.degree_low > self.degree_high:
            raise ValueError("empty degree window")
        if len(self.factors.factors) != 1:
            raise ValueError("an entry carries exactly one character")

    @property
    def character(self) -> Character:
        return next(iter(self.factors.factors))

    @property
    def ranks(self) -> dict:
        return dict(self.rank_bounds)

    @property
    def window(self) -> tuple:
        return (self.degree_low, self.degree_high)


def _entry(cone, low, high, chi, quotient, ranks: Mapping[int, int], exact) -> ComplexEntry:
    ranks = {d: r for d, r in ranks.items() if r}
    mult = max(ranks.values(), default=1)
    return ComplexEntry(
        cone, low, high, LocalSystemClass(quotient, {chi: mult}), tuple(sorted(ranks.items())), exact
    )


@dataclass(frozen=True)
class PropagationEvent:
    """One face-to-cone transfer attempted by a pushforward step."""

    step: int
    source: int
    target: int
    character: Character  # on N/N_source
    restricted: Character  # on the image of N_target in N/N_source
    result: Character | None  # on N/N_target, None when the transfer vanished


@dataclass(frozen=True)
class FanComplex:
    fan: Fan
    entries: tuple
    trace: tuple = field(default=(), compare=False)

    @property
    def support(self) -> frozenset:
        return frozenset(e.cone.id for e in self.entries)

    def entries_on(self, cone: Cone) -> list[ComplexEntry]:
        return [e for e in self.entries if e.cone.id == cone.id]


def _canonical(entries: Iterable[ComplexEntry]) -> tuple:
    """Merge same-cone, same-character entries whose windows overlap."""
    groups = defaultdict(list)
    for e in entries:
        groups[(e.cone.id, e.character)].append(e)
    out = []
    for key in sorted(groups):
        group = sorted(groups[key], key=lambda e: (e.degree_low, e.degree_high))
        cur = group[0]
        for e in group[1:]:
            if e.degree_low <= cur.degree_high:
                ranks = defaultdict(int, cur.ranks)
                for d, r in e.ranks.items():
                    ranks[d] += r
                cur = _entry(
                    cur.cone, cur.degree_low, max(cur.degree_high, e.degree_high), cur.character,
                    cur.factors.quotient, ranks, False,
                )
            else:
                out.append(cur)
                cur = e
        out.append(cur)
    return tuple(out)


def initial_complex(f: Fan, chi: Character) -> FanComplex:
    """The shifted rank-one system L[n] on the open orbit."""
    n = f.ambient_rank
    if chi.ambient_rank != n:
        raise DimensionMismatch(f"character on Z^{chi.ambient_rank} for a fan in Z^{n}")
    zero = f.zero_cone
    q = orbit_data(f, zero).quotient
    return FanComplex(f, (_entry(zero, -n, -n, chi, q, {-n: 1}, True),))


def shift(F: FanComplex, m: int) -> FanComplex:
    """F[m]: every degree moves down by m."""
    moved = tuple(
        replace(e, degree_low=e.degree_low - m, degree_high=e.degree_high - m,
                rank_bounds=tuple((d - m, r) for d, r in e.rank_bounds))
        for e in F.entries
    )
    return FanComplex(F.fan, moved, F.trace)


def truncate(F: FanComplex, cutoff: float) -> FanComplex:
    """tau_{<= cutoff}: drop entries starting above the cutoff, clip the rest."""
    if cutoff == INF:
        return F
    kept = []
    for e in F.entries:
        if e.degree_low > cutoff:
            continue
        ranks = {d: r for d, r in e.rank_bounds if d <= cutoff}
        kept.append(_entry(e.cone, e.degree_low, min(e.degree_high, cutoff), e.character,
                           e.factors.quotient, ranks, e.exact))
    return FanComplex(F.fan, tuple(kept), F.trace)


def image_lattice(f: Fan, sigma: Cone, tau: Cone) -> Sublattice:
    """The image of N_tau in N/N_sigma, in the orbit coordinates of sigma."""
    q = orbit_data(f, sigma).quotient
    gens = [q.project(b) for b in orbit_data(f, tau).stab_lattice.basis]
    return Sublattice.spanned_by(gens, q.rank)


def transfer(f: Fan, sigma: Cone, tau: Cone, chi: Character) -> tuple:
    """Push one character on O_sigma to the stalk at O_tau.

    Returns ``(restricted, result)``; ``result`` is None when the restriction
    to the image of N_tau is nontrivial (the stalk contribution vanishes).
    """
    res = restrict(chi, image_lattice(f, sigma, tau))
    if not is_trivial(res):
        return res, None
    lifted = pullback(chi, orbit_data(f, sigma).quotient)
    return res, descend(lifted, orbit_data(f, tau).quotient)


def pushforward_step(F: FanComplex, k: int) -> FanComplex:
    """Extend F across the orbits of codimension k."""
    f = F.fan
    deep = [e.cone for e in F.entries if e.cone.dim >= k]
    if deep:
        raise SupportTooDeep(f"complex already has entries on {deep[0]} (dim {deep[0].dim} >= {k})")
    levels = codim_filtration(f)
    targets = levels[k] if k < len(levels) else []
    new, events = [], []
    for tau in targets:
        sources = [e for e in F.entries if (e.cone.id, tau.id) in f.face_relation]
        single = len(sources) == 1 and sources[0].cone.dim == 0 and sources[0].exact
        for e in sources:
            d = tau.dim - e.cone.dim
            res, chi_t = transfer(f, e.cone, tau, e.character)
            events.append(PropagationEvent(k, e.cone.id, tau.id, e.character, res, chi_t))
            if chi_t is None:
                continue
            ranks = defaultdict(int)
            for a, r in e.rank_bounds:
                for j in range(d + 1):
                    ranks[a + j] += r * comb(d, j)
            new.append(_entry(tau, e.degree_low, e.degree_high + d, chi_t,
                              orbit_data(f, tau).quotient, ranks, single))
    return FanComplex(f, _canonical(F.entries + tuple(new)), F.trace + tuple(events))


def deligne_ic(f: Fan, chi: Character, p: Perversity) -> FanComplex:
    """tau_{<=p(n)-n} Rj_* ... tau_{<=p(1)-n} Rj_* L[n], one codimension at a time."""
    n = f.ambient_rank
    if p.max_codim < n:
        raise PerversityUndefined(f"perversity defined up to codimension {p.max_codim}, fan needs {n}")
    F = initial_complex(f, chi)
    for k in range(1, n + 1):
        F = pushforward_step(F, k)
        F = truncate(F, p(k) - n)
    return F


# -- certificates -----------------------------------------------------------

REASON_NONTRIVIAL = "nontrivial character: orbit cohomology with these coefficients vanishes"
REASON_VANISHED = "restriction to the stabilizer lattice nontrivial: stalk contribution vanishes"
REASON_EMPTY = "no entries on this orbit"


@dataclass(frozen=True)
class LogRecord:
    cone: int
    kind: str  # "entry" | "vanished" | "empty"
    character: Character | None = None
    window: tuple | None = None
    source: int | None = None
    trivial: bool = False
    reason: str = ""

    @property
    def is_witness(self) -> bool:
        return self.kind == "entry" and self.trivial


@dataclass(frozen=True)
class CertificateRun:
    character: Character | None
    perversity: Perversity | None
    twisted: bool
    records: tuple

    @property
    def witnesses(self) -> list[LogRecord]:
        return [r for r in self.records if r.is_witness]


def _witness_reason(r_cone: Cone, low, high) -> str:
    return f"trivial character reached at {r_cone}, degree window [{low},{high}]"


def twistedness_certificate(F: FanComplex) -> CertificateRun:
    """Per-orbit log of every entry's character; twisted iff none is trivial."""
    f = F.fan
    records = []
    for c in f.cones:
        here = []
        for e in F.entries_on(c):
            triv = is_trivial(e.character)
            reason = _witness_reason(c, e.degree_low, e.degree_high) if triv else REASON_NONTRIVIAL
            here.append(LogRecord(c.id, "entry", e.character, e.window, None, triv, reason))
        for ev in F.trace:
            if ev.target == c.id and ev.result is None:
                here.append(LogRecord(c.id, "vanished", ev.character, None, ev.source, False, REASON_VANISHED))
        if not here:
            here.append(LogRecord(c.id, "empty", reason=REASON_EMPTY))
        records.extend(here)
    twisted = not any(r.is_witness for r in records)
    return CertificateRun(None, None, twisted, tuple(records))


@dataclass(frozen=True)
class VanishingCertificate:
    verdict: str  # "Vanishes" | "Inconclusive"
    primal: CertificateRun
    dual_run: CertificateRun
    notes: tuple = ()

    @property
    def vanishes(self) -> bool:
        return self.verdict == VANISHES


VANISHES = "Vanishes"
INCONCLUSIVE = "Inconclusive"

CODIM1_NOTE = "codimension-1 orbits are handled by an initial step with the supplied p(1)"


def vanishing_verdict(f: Fan, chi: Character, p: Perversity, dual_perversity: Perversity | None = None):
    """Certify IH vanishing from twistedness of IC_p(chi) and of its Verdier dual IC_q(chi^-1)."""
    q = dual_perversity if dual_perversity is not None else p.dual()
    a = twistedness_certificate(deligne_ic(f, chi, p))
    b = twistedness_certificate(deligne_ic(f, dual(chi), q))
    a = replace(a, character=chi, perversity=p)
    b = replace(b, character=dual(chi), perversity=q)
    verdict = VANISHES if a.twisted and b.twisted else INCONCLUSIVE
    return VanishingCertificate(verdict, a, b, (CODIM1_NOTE,))


def replay_run(f: Fan, run: CertificateRun) -> list[str]:
    """Recheck a run's log against the fan; returns the problems found.

    Every propagated character pulls back to the run's character on N, so
    each entry is checked by descending that character afresh.
    """
    problems = []
    chi = run.character
    seen = {r.cone for r in run.records}
    for c in f.cones:
        if c.id not in seen:
            problems.append(f"no record for {c}")
    for r in run.records:
        c = f.cone(r.cone)
        od = orbit_data(f, c)
        if r.kind == "entry":
            try:
                expect = descend(chi, od.quotient)
            except Exception:
                problems.append(f"entry on {c} but the character does not descend there")
                continue
            if expect != r.character:
                problems.append(f"entry on {c}: logged {r.character}, recomputed {expect}")
            if r.trivial != is_trivial(r.character):
                problems.append(f"entry on {c}: triviality flag wrong")
        elif r.kind == "vanished":
            src = f.cone(r.source)
            res, out = transfer(f, src, c, r.character)
            if out is not None:
                problems.append(f"transfer {src} -> {c} logged as vanishing but restriction {res} is trivial")
            if pullback(r.character, orbit_data(f, src).quotient) != chi:
                problems.append(f"transfer {src} -> {c}: source character is not a descent of the run character")
        elif r.kind != "empty":
            problems.append(f"unknown record kind {r.kind!r}")
    if run.twisted != (not run.witnesses):
        problems.append("twisted flag disagrees with witnesses")
    return problems


def replay_certificate(f: Fan, cert: VanishingCertificate) -> tuple:
    """Return ``(verdict, problems)`` recomputed from the logs alone."""
    problems = replay_run(f, cert.primal) + replay_run(f, cert.dual_run)
    if cert.dual_run.character != dual(cert.primal.character):
        problems.append("dual run does not use the dual character")
    ok = cert.primal.twisted and cert.dual_run.twisted and not problems
    verdict = VANISHES if ok else INCONCLUSIVE
    if verdict != cert.verdict:
        problems.append(f"verdict {cert.verdict} does not replay (got {verdict})")
    return verdict, problems
