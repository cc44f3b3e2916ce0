"""Fan documents, run reports and certificate (de)serialization."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..charsys import Character, descend, is_trivial, restrict
from ..errors import DimensionMismatch, ParseError, PerversityUndefined, ValidationError
from ..fan import Fan, close_fan, orbit_data, validate_fan
from ..icengine import (
    CertificateRun,
    LogRecord,
    Perversity,
    VanishingCertificate,
    deligne_ic,
    vanishing_verdict,
)
from . import docfmt
from .builtins import builtin_fan


def parse_fan(text: str) -> Fan:
    """Parse a fan document, close it under faces and validate it.

    ::

        rank = 2
        cone "sigma" = [[1,0],[0,1]]
    """
    stmts, lines = docfmt.loads_with_lines(text)
    rank = None
    cones, names = [], {}
    for st, line in zip(stmts, lines):
        if st.key == "rank":
            if rank is not None:
                raise ParseError("rank given twice", line, 1)
            if not isinstance(st.value, int) or isinstance(st.value, bool) or st.value < 1:
                raise ParseError("rank must be a positive integer", line, 1)
            rank = st.value
        elif st.key == "cone":
            gens = st.value
            if not isinstance(gens, list) or not all(isinstance(g, list) for g in gens):
                raise ParseError("cone must be a list of integer vectors", line, 1)
            for g in gens:
                if not all(isinstance(x, int) and not isinstance(x, bool) for x in g):
                    raise ParseError(f"non-integer generator entry in {g}", line, 1)
            if st.label is not None:
                names[len(cones)] = st.label
            cones.append(gens)
        else:
            raise ParseError(f"unknown key {st.key!r}", line, 1)
    if rank is None:
        raise ParseError("missing 'rank = n'")
    for gens, line in zip(cones, (ln for st, ln in zip(stmts, lines) if st.key == "cone")):
        for g in gens:
            if len(g) != rank:
                raise ParseError(f"generator {g} has length {len(g)}, expected {rank}", line, 1)
            if not any(g):
                raise ParseError("zero vector is not a generator", line, 1)
    f = close_fan(rank, cones, names)
    problems = validate_fan(f)
    if problems:
        raise ValidationError(problems)
    return f


def fan_statements(f: Fan) -> list:
    out = [docfmt.Statement("rank", None, f.ambient_rank)]
    for c in f.cones:
        out.append(docfmt.Statement("cone", f.names.get(c.id), [list(g) for g in c.generators]))
    return out


def load_fan(source: str) -> Fan:
    """``builtin:<name>`` or a path to a fan document."""
    if source.startswith("builtin:"):
        return builtin_fan(source[len("builtin:"):])
    with open(source, encoding="utf-8") as fh:
        return parse_fan(fh.read())


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class OrbitRow:
    cone: int
    generators: tuple
    dim: int
    orbit_dim: int
    stab_basis: tuple
    restriction: Character
    descended: Character | None  # None: nontrivial restriction


@dataclass(frozen=True)
class EntryRow:
    cone: int
    window: tuple
    character: Character
    ranks: tuple
    exact: bool


@dataclass(frozen=True)
class RunReport:
    rank: int
    cones: tuple
    character: Character
    perversity: Perversity
    orbits: tuple
    entries: tuple
    certificate: VanishingCertificate
    timing_ms: int | None = field(default=None, compare=False)

    @property
    def exit_code(self) -> int:
        return 0 if self.certificate.vanishes else 2


def orbit_table(f: Fan, chi: Character) -> tuple:
    rows = []
    for c in f.cones:
        od = orbit_data(f, c)
        res = restrict(chi, od.stab_lattice)
        desc = descend(chi, od.quotient) if is_trivial(res) else None
        rows.append(OrbitRow(c.id, c.generators, c.dim, od.orbit_dim, od.stab_lattice.basis, res, desc))
    return tuple(rows)


def run_check(f: Fan, chi: Character, p: Perversity, dual_perversity: Perversity | None = None,
              strict_gm: bool = False, timing: bool = False) -> RunReport:
    if chi.ambient_rank != f.ambient_rank:
        raise DimensionMismatch(f"character has {chi.ambient_rank} values, fan lives in Z^{f.ambient_rank}")
    if strict_gm and not p.is_strict_gm():
        raise PerversityUndefined(f"{p} violates the strict GM conditions")
    t0 = time.perf_counter()
    cert = vanishing_verdict(f, chi, p, dual_perversity)
    F = deligne_ic(f, chi, p)
    entries = tuple(EntryRow(e.cone.id, e.window, e.character, e.rank_bounds, e.exact) for e in F.entries)
    elapsed = int((time.perf_counter() - t0) * 1000) if timing else None
    return RunReport(f.ambient_rank, tuple(c.generators for c in f.cones), chi, p,
                     orbit_table(f, chi), entries, cert, elapsed)


def _chr(c):
    return None if c is None else [Fraction(v) for v in c.values]


def _unchr(v):
    return None if v is None else Character(tuple(v))


def _record_doc(r: LogRecord) -> dict:
    d = {"cone": r.cone, "kind": r.kind}
    if r.character is not None:
        d["character"] = _chr(r.character)
    if r.window is not None:
        d["window"] = list(r.window)
    if r.source is not None:
        d["source"] = r.source
    d["trivial"] = r.trivial
    d["reason"] = r.reason
    return d


def _record_from(d: dict) -> LogRecord:
    return LogRecord(
        d["cone"], d["kind"], _unchr(d.get("character")),
        tuple(d["window"]) if "window" in d else None, d.get("source"), d["trivial"], d["reason"],
    )


def _run_doc(run: CertificateRun) -> dict:
    return {
        "character": _chr(run.character),
        "perversity": list(run.perversity.values),
        "twisted": run.twisted,
        "records": [_record_doc(r) for r in run.records],
    }


def _run_from(d: dict) -> CertificateRun:
    return CertificateRun(_unchr(d["character"]), Perversity(tuple(d["perversity"])), d["twisted"],
                          tuple(_record_from(r) for r in d["records"]))


def certificate_doc(cert: VanishingCertificate) -> dict:
    return {"verdict": cert.verdict, "notes": list(cert.notes),
            "primal": _run_doc(cert.primal), "dual": _run_doc(cert.dual_run)}


def certificate_from(d: dict) -> VanishingCertificate:
    return VanishingCertificate(d["verdict"], _run_from(d["primal"]), _run_from(d["dual"]), tuple(d["notes"]))


def report_statements(rep: RunReport) -> list:
    S = docfmt.Statement
    out = [S("rank", None, rep.rank)]
    out += [S("cone", None, [list(g) for g in gens]) for gens in rep.cones]
    out.append(S("character", None, _chr(rep.character)))
    out.append(S("perversity", None, list(rep.perversity.values)))
    for o in rep.orbits:
        out.append(S("orbit", None, {
            "cone": o.cone, "generators": [list(g) for g in o.generators], "dim": o.dim,
            "orbit_dim": o.orbit_dim, "stab_basis": [list(b) for b in o.stab_basis],
            "restriction": _chr(o.restriction),
            "descended": _chr(o.descended) if o.descended is not None else "nontrivial restriction",
        }))
    for e in rep.entries:
        out.append(S("entry", None, {
            "cone": e.cone, "window": list(e.window), "character": _chr(e.character),
            "ranks": [list(x) for x in e.ranks], "exact": e.exact,
        }))
    out.append(S("certificate", None, certificate_doc(rep.certificate)))
    if rep.timing_ms is not None:
        out.append(S("timing_ms", None, rep.timing_ms))
    return out


def dumps_report(rep: RunReport) -> str:
    return docfmt.dumps(report_statements(rep))


def loads_report(text: str) -> RunReport:
    stmts = docfmt.loads(text)
    by = {}
    for st in stmts:
        by.setdefault(st.key, []).append(st.value)
    try:
        orbits = tuple(
            OrbitRow(o["cone"], tuple(tuple(g) for g in o["generators"]), o["dim"], o["orbit_dim"],
                     tuple(tuple(b) for b in o["stab_basis"]), _unchr(o["restriction"]),
                     None if isinstance(o["descended"], str) else _unchr(o["descended"]))
            for o in by.get("orbit", [])
        )
        entries = tuple(
            EntryRow(e["cone"], tuple(e["window"]), _unchr(e["character"]),
                     tuple(tuple(x) for x in e["ranks"]), e["exact"])
            for e in by.get("entry", [])
        )
        return RunReport(
            by["rank"][0], tuple(tuple(tuple(g) for g in c) for c in by.get("cone", [])),
            _unchr(by["character"][0]), Perversity(tuple(by["perversity"][0])), orbits, entries,
            certificate_from(by["certificate"][0]), by.get("timing_ms", [None])[0],
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed report: {exc!r}") from None


def report_fan(rep: RunReport) -> Fan:
    """Rebuild the fan recorded in a report (ids are reproduced exactly)."""
    from ..fan import make_fan

    return make_fan(rep.rank, rep.cones)


def render_report(rep: RunReport) -> str:
    """Plain-text tables for terminals."""
    lines = [f"fan in Z^{rep.rank}, {len(rep.cones)} cones; character ({rep.character}); perversity {rep.perversity}", ""]
    lines.append("orbits")
    lines.append(f"  {'id':>3} {'dim':>3} {'orb':>3}  {'cone':<28} {'restriction':<18} descended")
    for o in rep.orbits:
        gens = ",".join(str(g).replace(" ", "") for g in o.generators) or "0"
        desc = str(o.descended) if o.descended is not None else "nontrivial restriction"
        lines.append(f"  {o.cone:>3} {o.dim:>3} {o.orbit_dim:>3}  {gens:<28} {str(o.restriction) or '-':<18} {desc or '-'}")
    lines.append("")
    lines.append("IC entries")
    for e in rep.entries:
        ranks = " ".join(f"{d}:{r}" for d, r in e.ranks)
        lines.append(f"  cone {e.cone:>3} window [{e.window[0]},{e.window[1]}] char ({e.character}) "
                     f"ranks {ranks} {'exact' if e.exact else 'bound'}")
    if not rep.entries:
        lines.append("  (none)")
    lines.append("")
    cert = rep.certificate
    for title, run in (("primal", cert.primal), ("dual", cert.dual_run)):
        lines.append(f"{title} run: character ({run.character}), {run.perversity}: "
                     f"{'twisted' if run.twisted else 'NOT twisted'}")
        for r in run.records:
            src = f" from cone {r.source}" if r.source is not None else ""
            lines.append(f"  cone {r.cone:>3} {r.kind:<8}{src}: {r.reason}")
    lines.append("")
    lines.append(f"verdict: {cert.verdict}")
    for note in cert.notes:
        lines.append(f"note: {note}")
    if rep.timing_ms is not None:
        lines.append(f"time: {rep.timing_ms} ms")
    return "\n".join(lines)
