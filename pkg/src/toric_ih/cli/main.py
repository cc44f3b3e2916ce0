"""Command-line interface.

Exit status: 0 when a check certifies vanishing, 2 when it is inconclusive,
1 on any error.  ``oracle``, ``corpus`` and ``replay`` exit 0 on success
and 2 on a failed check.
"""

from __future__ import annotations

import argparse
import sys

from ..charsys import Character, restrict
from ..errors import ToricIHError
from ..fan import orbit_data
from ..icengine import Perversity, initial_complex, pushforward_step, replay_certificate
from ..toruscoh import torus_cohomology_closed_form, torus_cohomology_koszul_oracle
from . import docfmt
from .corpus import run_corpus, run_oracle_crosscheck
from .report import (
    dumps_report,
    fan_statements,
    load_fan,
    loads_report,
    orbit_table,
    render_report,
    report_fan,
    run_check,
)


def _character(args, n):
    chi = Character.parse(args.character)
    if chi.ambient_rank != n:
        raise ToricIHError(f"character has {chi.ambient_rank} values, fan lives in Z^{n}")
    return chi


def cmd_check(args) -> int:
    f = load_fan(args.fan)
    n = f.ambient_rank
    chi = _character(args, n)
    p = Perversity.parse(args.perversity, n)
    q = Perversity.parse(args.dual_perversity, n) if args.dual_perversity else None
    rep = run_check(f, chi, p, q, strict_gm=args.strict_gm, timing=args.timing)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(dumps_report(rep))
    if not args.quiet:
        print(render_report(rep))
    else:
        print(rep.certificate.verdict)
    return rep.exit_code


def _pick_cone(f, args):
    if args.cone_id is not None:
        return f.cone(args.cone_id)
    gens = [tuple(int(x) for x in part.split(",")) for part in args.cone.split(";") if part.strip()]
    return f.find(gens)


def cmd_stalk(args) -> int:
    f = load_fan(args.fan)
    n = f.ambient_rank
    chi = _character(args, n)
    tau = _pick_cone(f, args)
    od = orbit_data(f, tau)
    res = restrict(chi, od.stab_lattice)
    F = initial_complex(f, chi)
    if tau.dim:
        F = pushforward_step(F, tau.dim)
    print(f"cone {tau.id} {tau}: dim {tau.dim}, N_tau basis {list(od.stab_lattice.basis)}")
    print(f"restriction of ({chi}) to N_tau: ({res})")
    entries = F.entries_on(tau)
    if entries:
        for e in entries:
            print(f"exact rule: degrees {e.ranks} character ({e.character}) {'exact' if e.exact else 'bound'}")
    else:
        print("exact rule: stalk zero")
    oracle = torus_cohomology_koszul_oracle(tau.dim, res).shifted(-n)
    closed = torus_cohomology_closed_form(tau.dim, res).shifted(-n)
    print(f"Koszul oracle: {oracle.nonzero() or 'zero'}; closed form: {closed.nonzero() or 'zero'}")
    return 0


def cmd_orbits(args) -> int:
    f = load_fan(args.fan)
    chi = _character(args, f.ambient_rank) if args.character else Character.trivial(f.ambient_rank)
    print(f"{'id':>3} {'dim':>3} {'orb':>3}  {'cone':<28} {'N_sigma basis':<28} restriction -> descended")
    for o in orbit_table(f, chi):
        gens = ",".join(str(g).replace(" ", "") for g in o.generators) or "0"
        basis = ",".join(str(b).replace(" ", "") for b in o.stab_basis) or "-"
        desc = str(o.descended) if o.descended is not None else "nontrivial restriction"
        print(f"{o.cone:>3} {o.dim:>3} {o.orbit_dim:>3}  {gens:<28} {basis:<28} ({o.restriction}) -> ({desc})")
    if args.dump:
        print(docfmt.dumps(fan_statements(f)), end="")
    return 0


def cmd_oracle(args) -> int:
    samples = None if args.samples == "all" else int(args.samples)
    summary = run_oracle_crosscheck(args.max_rank, args.max_order, samples, args.seed)
    print(f"{summary.agree}/{summary.total} agree")
    for k, chi, a, b in summary.mismatches:
        print(f"  mismatch k={k} chi=({chi}): closed form {a.nonzero()} oracle {b.nonzero()}")
    return 0 if summary.ok else 2


def cmd_corpus(args) -> int:
    numbers = [int(x) for x in args.criteria.split(",")] if args.criteria else None
    results = run_corpus(numbers, workers=args.workers, seed=args.seed)
    for r in results:
        print(r.line)
    return 0 if all(r.passed for r in results) else 2


def cmd_replay(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        rep = loads_report(fh.read())
    verdict, problems = replay_certificate(report_fan(rep), rep.certificate)
    for p in problems:
        print(f"problem: {p}")
    print(f"replayed verdict: {verdict} (recorded {rep.certificate.verdict})")
    return 0 if not problems else 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toric-ih", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def fan_args(p, character=True):
        p.add_argument("--fan", required=True, help="builtin:<name> or a fan document path")
        if character:
            p.add_argument("--character", required=True, help='e.g. "1/2,1/3"')

    p = sub.add_parser("check", help="certify vanishing of intersection cohomology")
    fan_args(p)
    p.add_argument("--perversity", default="middle", help="middle, upper, zero, top or p(1)=..,p(2)=..")
    p.add_argument("--dual-perversity", help="explicit dual perversity (needed outside strict GM)")
    p.add_argument("--strict-gm", action="store_true", help="reject perversities violating the GM conditions")
    p.add_argument("--report", help="write the machine-readable report here")
    p.add_argument("--timing", action="store_true", help="record wall time in the report")
    p.add_argument("--quiet", action="store_true", help="print only the verdict")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("stalk", help="one-cone stalk by the exact rule and by the oracle")
    fan_args(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cone", help='generators, e.g. "1,0;0,1"')
    g.add_argument("--cone-id", type=int)
    p.set_defaults(func=cmd_stalk)

    p = sub.add_parser("orbits", help="orbit table")
    fan_args(p, character=False)
    p.add_argument("--character")
    p.add_argument("--dump", action="store_true", help="also print the face-closed fan document")
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("oracle", help="closed form vs Koszul oracle")
    p.add_argument("--max-rank", type=int, default=5)
    p.add_argument("--max-order", type=int, default=12)
    p.add_argument("--samples", default="200", help="a count, or 'all' for exhaustive")
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("corpus", help="run the acceptance corpus")
    p.add_argument("--criteria", help="comma-separated criterion numbers (default all)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int, help="base seed (default: the fixed per-criterion seeds)")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("replay", help="re-validate the certificate embedded in a report")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ToricIHError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
