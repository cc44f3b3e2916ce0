"""Seeded bulk checks: the oracle crosscheck and the acceptance corpus.

Every check is deterministic given its seed.  Each ``criterion_*`` function
returns a :class:`CriterionResult`; ``run_corpus`` runs them all, optionally
across worker processes, and reports them in criterion order.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import lcm

from ..charsys import (
    Character,
    LocalSystemClass,
    descend,
    dual,
    is_trivial,
    is_twisted,
    pullback,
    restrict,
)
from ..fan import Fan, orbit_data
from ..icengine import (
    INCONCLUSIVE,
    VANISHES,
    Perversity,
    deligne_ic,
    initial_complex,
    pushforward_step,
    replay_certificate,
    shift,
    truncate,
    vanishing_verdict,
)
from ..toruscoh import GradedRanks, torus_cohomology_closed_form, torus_cohomology_koszul_oracle
from .builtins import CORPUS, builtin_fan


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None = None

    @property
    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lim = f" (limit {self.limit:.0f}s)" if self.limit else ""
        return f"[{status}] {self.number}. {self.title}: {self.detail} [{self.seconds:.2f}s{lim}]"


# -- sampling ----------------------------------------------------------------


def random_character(rng: random.Random, n: int, max_order: int, twisted: bool = False) -> Character:
    while True:
        m = rng.randint(1, max_order)
        chi = Character(tuple(Fraction(rng.randrange(m), m) for _ in range(n)))
        if not (twisted and is_trivial(chi)):
            return chi


def all_characters(n: int, max_order: int):
    """Every character of Z^n whose order is at most ``max_order``."""
    vals = sorted({Fraction(a, d) for d in range(1, max_order + 1) for a in range(d)})
    for t in product(vals, repeat=n):
        if lcm(1, *(v.denominator for v in t)) <= max_order:
            yield Character(t)


def random_strict_gm(rng: random.Random, n: int) -> Perversity:
    vals = [0, 0][:n]
    while len(vals) < n:
        vals.append(vals[-1] + rng.randint(0, 1))
    return Perversity(tuple(vals))


def random_perversity(rng: random.Random, n: int) -> Perversity:
    return Perversity(tuple(rng.randint(-1, c) for c in range(1, n + 1)))


# -- oracle crosscheck ------------------------------------------------------------


@dataclass(frozen=True)
class CrosscheckSummary:
    total: int
    agree: int
    mismatches: tuple  # (k, character, closed form, oracle)

    @property
    def ok(self) -> bool:
        return self.total == self.agree


def run_oracle_crosscheck(max_rank: int, max_order: int, samples: int | None = None, seed: int = 1) -> CrosscheckSummary:
    """Closed form against the Koszul oracle.

    ``samples=None`` enumerates every character of order <= max_order on
    Z^k for k = 1..max_rank; otherwise ``samples`` seeded random cases.
    """
    if max_rank < 1 or max_order < 1 or (samples is not None and samples < 1):
        raise ValueError("bounds must be positive")
    if samples is None:
        cases = [(k, chi) for k in range(1, max_rank + 1) for chi in all_characters(k, max_order)]
    else:
        rng = random.Random(seed)
        cases = []
        for _ in range(samples):
            k = rng.randint(1, max_rank)
            cases.append((k, random_character(rng, k, max_order)))
    bad = []
    for k, chi in cases:
        a = torus_cohomology_closed_form(k, chi)
        b = torus_cohomology_koszul_oracle(k, chi)
        if a != b:
            bad.append((k, chi, a, b))
    return CrosscheckSummary(len(cases), len(cases) - len(bad), tuple(bad))


# -- acceptance criteria ----------------------------------------------------


def _timed(number, title, limit, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    if limit is not None and dt > limit:
        ok = False
        detail += f"; exceeded time limit {limit}s"
    return CriterionResult(number, title, ok, detail, dt, limit)


def criterion_torus_cohomology(seed: int = 1) -> CriterionResult:
    def body():
        ex = run_oracle_crosscheck(3, 6)
        rnd = run_oracle_crosscheck(5, 12, 200, seed)
        ok = ex.ok and rnd.ok and rnd.total == 200
        return ok, f"exhaustive {ex.agree}/{ex.total}, random {rnd.agree}/{rnd.total}"

    return _timed(1, "torus cohomology closed form = Koszul oracle", 30, body)


def _perversity_set(rng, n):
    return [Perversity.preset("middle", n), Perversity.preset("zero", n), Perversity.preset("top", n),
            random_strict_gm(rng, n)]


def criterion_vanishing(seed: int = 2, per_fan: int = 50) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        runs = inconclusive = bad_replay = 0
        for name in CORPUS:
            f = builtin_fan(name)
            n = f.ambient_rank
            perversities = _perversity_set(rng, n)
            for _ in range(per_fan):
                chi = random_character(rng, n, 12, twisted=True)
                for p in perversities:
                    cert = vanishing_verdict(f, chi, p)
                    runs += 1
                    if cert.verdict != VANISHES:
                        inconclusive += 1
                        continue
                    verdict, problems = replay_certificate(f, cert)
                    if verdict != VANISHES or problems:
                        bad_replay += 1
        ok = inconclusive == 0 and bad_replay == 0
        return ok, f"{runs} runs, {inconclusive} inconclusive, {bad_replay} certificates failing replay"

    return _timed(2, "twisted coefficients: IH vanishes on every built-in fan", 120, body)


def criterion_trivial_control() -> CriterionResult:
    def body():
        failures = []
        for name in CORPUS:
            f = builtin_fan(name)
            n = f.ambient_rank
            for pname in ("middle", "zero", "top"):
                cert = vanishing_verdict(f, Character.trivial(n), Perversity.preset(pname, n))
                deep = [r for r in cert.primal.witnesses if f.cone(r.cone).dim >= 1]
                if cert.verdict != INCONCLUSIVE or not deep:
                    failures.append(f"{name}/{pname}")
        return not failures, f"{3 * len(CORPUS) - len(failures)}/{3 * len(CORPUS)} inconclusive with codim>=1 witness" + (
            f"; failing {failures}" if failures else "")

    return _timed(3, "trivial coefficients never certified", 10, body)


def _stalk_characters(rng, f: Fan, tau, count: int):
    """Half free random characters, half pulled back from the orbit lattice of tau."""
    n = f.ambient_rank
    q = orbit_data(f, tau).quotient
    out = [random_character(rng, n, 12) for _ in range(count - count // 2)]
    out += [pullback(random_character(rng, q.rank, 12), q) for _ in range(count // 2)]
    return out


def check_stalk(f: Fan, tau, chi: Character) -> str | None:
    """Compare the one-step stalk at tau with the oracle; None when they agree."""
    n = f.ambient_rank
    od = orbit_data(f, tau)
    oracle = torus_cohomology_koszul_oracle(tau.dim, restrict(chi, od.stab_lattice)).shifted(-n)
    F = initial_complex(f, chi)
    if tau.dim > 0:
        F = pushforward_step(F, tau.dim)
    here = F.entries_on(tau)
    if not oracle.nonzero():
        return None if not here else f"{tau}: oracle zero, engine has {len(here)} entries"
    if len(here) != 1:
        return f"{tau}: expected one entry, found {len(here)}"
    e = here[0]
    got = GradedRanks(0, ()) if not e.rank_bounds else GradedRanks(
        e.rank_bounds[0][0], tuple(e.ranks.get(d, 0) for d in range(e.rank_bounds[0][0], e.rank_bounds[-1][0] + 1)))
    if got != oracle:
        return f"{tau}: ranks {e.ranks} vs oracle {oracle.nonzero()}"
    if not e.exact:
        return f"{tau}: single-orbit stalk not flagged exact"
    if e.character != descend(chi, od.quotient) or pullback(e.character, od.quotient) != chi:
        return f"{tau}: character {e.character} is not the descent of {chi}"
    return None


def criterion_stalk_exactness(seed: int = 4, per_cone: int = 20) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        checks, failures = 0, []
        for name in CORPUS:
            f = builtin_fan(name)
            for tau in f.cones:
                for chi in _stalk_characters(rng, f, tau, per_cone):
                    checks += 1
                    msg = check_stalk(f, tau, chi)
                    if msg:
                        failures.append(f"{name}: {msg}")
        return not failures, f"{checks - len(failures)}/{checks} stalks match" + (
            f"; first failure {failures[0]}" if failures else "")

    return _timed(4, "one-step stalk = Koszul oracle", 60, body)


def _random_complex(rng):
    f = builtin_fan(rng.choice(CORPUS))
    n = f.ambient_rank
    chi = random_character(rng, n, 12)
    return f, chi, deligne_ic(f, chi, random_perversity(rng, n))


def criterion_prop_suite(seed: int = 5, instances: int = 1000) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        fails = Counter()
        for _ in range(instances):
            # shift invariance
            _, _, F = _random_complex(rng)
            m = rng.randint(-5, 5)
            G = shift(F, m)
            twisted_before = [is_twisted(e.factors) for e in F.entries]
            twisted_after = [is_twisted(e.factors) for e in G.entries]
            if twisted_before != twisted_after or shift(G, -m).entries != F.entries:
                fails["shift"] += 1
            # truncation soundness
            f, chi, F = _random_complex(rng)
            cutoff = rng.randint(-f.ambient_rank - 1, 1)
            T = truncate(F, cutoff)
            chars_before = {(e.cone.id, e.character) for e in F.entries}
            kept = {(e.cone.id, e.character) for e in T.entries}
            removed = [e for e in F.entries if e.degree_low > cutoff]
            if not kept <= chars_before or len(removed) + len(T.entries) != len(F.entries):
                fails["truncate"] += 1
            if any(e.degree_low > cutoff or e.degree_high > cutoff for e in T.entries):
                fails["truncate"] += 1
            tau = rng.choice(f.cones)
            if tau.dim > 0:
                S = pushforward_step(initial_complex(f, chi), tau.dim)
                oracle = torus_cohomology_koszul_oracle(
                    tau.dim, restrict(chi, orbit_data(f, tau).stab_lattice)).shifted(-f.ambient_rank)
                for e in S.entries_on(tau):
                    if oracle.nonzero() and min(oracle.nonzero()) < e.degree_low:
                        fails["truncate"] += 1
            # two-out-of-three on multisets
            q = None
            a = LocalSystemClass.of(q, [random_character(rng, 2, 6) for _ in range(rng.randint(0, 4))])
            c = LocalSystemClass.of(q, [random_character(rng, 2, 6) for _ in range(rng.randint(0, 4))])
            b = a + c
            if is_twisted(b) != (is_twisted(a) and is_twisted(c)):
                fails["two-out-of-three"] += 1
            if is_twisted(a) and is_twisted(b) and not is_twisted(c):
                fails["two-out-of-three"] += 1
            if is_twisted(c) and is_twisted(b) and not is_twisted(a):
                fails["two-out-of-three"] += 1
        return not fails, f"{instances} instances x 3 properties, failures {dict(fails) or 0}"

    return _timed(5, "shift, truncation and two-out-of-three properties", None, body)


def criterion_duality(seed: int = 6, triples: int = 100) -> CriterionResult:
    def body():
        rng = random.Random(seed)
        bad = 0
        for _ in range(triples):
            f = builtin_fan(rng.choice(CORPUS))
            n = f.ambient_rank
            chi = random_character(rng, n, 12)
            p = random_strict_gm(rng, n)
            q = p.dual()
            if q.dual() != p or dual(dual(chi)) != chi:
                bad += 1
                continue
            if vanishing_verdict(f, chi, p).verdict != vanishing_verdict(f, dual(chi), q).verdict:
                bad += 1
        return bad == 0, f"{triples - bad}/{triples} triples consistent"

    return _timed(6, "duality involution", None, body)


def criterion_smooth_sanity() -> CriterionResult:
    def body():
        f = builtin_fan("affine:2")
        F = deligne_ic(f, Character.trivial(2), Perversity.preset("middle", 2))
        problems = []
        for ray in (f.find([(1, 0)]), f.find([(0, 1)])):
            es = F.entries_on(ray)
            if len(es) != 1 or es[0].ranks != {-2: 1} or not is_trivial(es[0].character) or not es[0].exact:
                problems.append(f"{ray}: {[(e.window, e.ranks, e.exact) for e in es]}")
        top = f.find([(1, 0), (0, 1)])
        es = F.entries_on(top)
        if not es or any(e.exact for e in es) or not any(e.degree_low <= -2 <= e.degree_high for e in es):
            problems.append(f"{top}: {[(e.window, e.exact) for e in es]}")
        return not problems, "rays rank 1 at degree -2, origin non-exact" if not problems else "; ".join(problems)

    return _timed(7, "constant coefficients on C^2", None, body)


CRITERIA = {
    1: criterion_torus_cohomology,
    2: criterion_vanishing,
    3: criterion_trivial_control,
    4: criterion_stalk_exactness,
    5: criterion_prop_suite,
    6: criterion_duality,
    7: criterion_smooth_sanity,
}


_UNSEEDED = {3, 7}


def _run_one(task) -> CriterionResult:
    number, seed = task
    if seed is None or number in _UNSEEDED:
        return CRITERIA[number]()
    return CRITERIA[number](seed=seed + number)


def run_corpus(numbers=None, workers: int = 1, seed: int | None = None) -> list[CriterionResult]:
    """Run the selected criteria; results come back in criterion order."""
    tasks = [(k, seed) for k in sorted(numbers or CRITERIA)]
    if workers <= 1:
        return [_run_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(_run_one, tasks))
    return sorted(results, key=lambda r: r.number)
