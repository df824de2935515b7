"""Command-line front end.

    mapring build m01_pn_d2 --n 2
    mapring hilbert grassmannian_lines --n 3 --format table
    mapring verify example36 --n 2
    mapring verify --list
    mapring schedule --d 5 --m 0
    mapring invariants --n 2

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error,
3 convention pinning failed.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import presentations as pres
from . import strata
from .ideal import hilbert_function
from .invariants import VerificationReport, invariant_hilbert, swap_action
from .suites import SUITES

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PINNING = 0, 1, 2, 3


class UsageError(ValueError):
    pass


# what `build` and `hilbert` know how to make; each entry: (required params, factory)
BUILDERS = {
    "projective_space": (("n",), lambda a: pres.projective_space(a.n)),
    "grassmannian_lines": (("n",), lambda a: pres.grassmannian_lines(a.n)),
    "flag_d1": (("n",), lambda a: pres.flag_d1(a.n)),
    "m01_pn_d2": (("n",), lambda a: pres.m01_pn_d2(a.n)),
    "fiber_flag": (("n",), lambda a: pres.fiber_flag_ring(a.n)),
    "thm33": (("d",), lambda a: pres.thm33_relations(a.d, a.n)),
    "relation3": (("n",), lambda a: pres.thm33_relation3_d2(a.n, pres.pin_convention()[0].I)),
    "thm_m": (("d", "m"), lambda a: pres.thm_m_relations(a.d, a.m)),
    "psi_sum": (("d", "m", "k"), lambda a: pres.psi_sum_relations(a.d, a.m, a.k)),
    "lemma31": (("d",), lambda a: _lemma31_bundle(a.d)),
}

PRESENTATIONS = ("projective_space", "grassmannian_lines", "flag_d1", "m01_pn_d2", "fiber_flag")


def _lemma31_bundle(d):
    R = pres.lemma31_R(d)
    return pres.RelationBundle(f"lemma31(d={d})", R.ring, [("R", R)], {"d": d},
                               provenance="codimension-two class R in psi, kappa and boundary classes")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mapring", description="Exact presentations and relation checks.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp, *names):
        for n in names:
            sp.add_argument(f"--{n}", type=int, default=None)
        sp.add_argument("--format", choices=("json", "table"), default="json")
        sp.add_argument("--out", default=None, help="write output to this path instead of stdout")
        return sp

    sp = common(sub.add_parser("build", help="emit a presentation or relation bundle"), "d", "m", "n", "k")
    sp.add_argument("name", nargs="?", choices=sorted(BUILDERS))
    sp.add_argument("--list", action="store_true")
    sp = common(sub.add_parser("hilbert", help="Hilbert function of a presentation"), "n")
    sp.add_argument("name", choices=PRESENTATIONS)
    sp = common(sub.add_parser("verify", help="run a verification suite"), "d", "m", "n", "k")
    sp.add_argument("suite", nargs="?")
    sp.add_argument("--list", action="store_true")
    sp.add_argument("--timings", action="store_true", help="include wall times (ms) in the report")
    sp = common(sub.add_parser("schedule", help="blow-up schedule of the forgetful tower"), "d", "m", "k")
    sp = common(sub.add_parser("invariants", help="swap-invariant Hilbert function of the degree-2 ring"), "n")
    return p


def _need(args, *names):
    for n in names:
        v = getattr(args, n, None)
        if v is None:
            raise UsageError(f"--{n} is required")
        if v < 0:
            raise UsageError(f"--{n} must be nonnegative")


def _table(header, rows) -> str:
    rows = [tuple(str(c) for c in r) for r in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in rows)) if rows else len(str(h)) for i, h in enumerate(header)]
    line = lambda r: "  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip()
    return "\n".join([line(header), line(["-" * w for w in widths])] + [line(r) for r in rows])


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def cmd_build(args):
    if args.list:
        return EXIT_OK, _dump({k: list(v[0]) for k, v in sorted(BUILDERS.items())}) if args.format == "json" else \
            _table(("name", "parameters"), [(k, " ".join("--" + x for x in v[0])) for k, v in sorted(BUILDERS.items())])
    if not args.name:
        raise UsageError("build needs a name (see build --list)")
    need, make = BUILDERS[args.name]
    _need(args, *need)
    obj = make(args)
    data = obj.to_json()
    if args.format == "json":
        return EXIT_OK, _dump(data)
    if isinstance(obj, pres.RelationBundle):
        rows = [(l, p.to_text()) for l, p in obj.relations]
        extra = "".join(f"\nplaceholder: {x}" for x in obj.placeholders)
        return EXIT_OK, f"{obj.name}\n" + _table(("relation", "polynomial"), rows) + extra
    rows = [(f"r{i}", r.to_text()) for i, r in enumerate(obj.relations)]
    rows += [(name, p.to_text()) for name, p in obj.derived.items()]
    gens = ", ".join(f"{g.name}:{g.degree}" for g in obj.ring.generators)
    return EXIT_OK, f"{obj.name}  [{gens}]\n" + _table(("name", "polynomial"), rows)


def cmd_hilbert(args):
    _need(args, "n")
    P = BUILDERS[args.name][1](args)
    hf = hilbert_function(P.quotient())
    if args.format == "json":
        return EXIT_OK, _dump({"name": P.name, "hilbert": hf.to_list(), "total": hf.total})
    return EXIT_OK, f"{P.name}\n" + _table(("degree", "dim"), list(enumerate(hf)))


def cmd_verify(args):
    if args.list:
        rows = [(s.name, " ".join(f"{k}={v}" for k, v in s.defaults.items()), s.summary)
                for s in SUITES.values()]
        if args.format == "json":
            return EXIT_OK, _dump([{"suite": n, "defaults": SUITES[n].defaults, "summary": SUITES[n].summary}
                                   for n in SUITES])
        return EXIT_OK, _table(("suite", "defaults", "summary"), rows)
    if not args.suite:
        raise UsageError("verify needs a suite name (see verify --list)")
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r} (see verify --list)")
    s = SUITES[args.suite]
    kwargs = {}
    for flag in ("d", "m", "n", "k"):
        v = getattr(args, flag)
        if v is None:
            continue
        if flag not in s.params:
            raise UsageError(f"suite {s.name} does not take --{flag}")
        if v < 0:
            raise UsageError(f"--{flag} must be nonnegative")
        kwargs[flag] = v
    report: VerificationReport = s.run(**kwargs)
    code = EXIT_OK if report.passed else EXIT_FAIL
    if args.format == "json":
        out = {"suite": report.name, "passed": report.passed, "checks": report.to_json(args.timings)}
        return code, _dump(out)
    rows = report.rows()
    header = ("check", "verdict", "witness")
    if args.timings:
        rows = [r + (f"{x.ms:.1f}",) for r, x in zip(rows, report.results)]
        header += ("ms",)
    summary = f"{sum(r.passed for r in report)}/{len(report)} checks pass"
    return code, f"{report.name}\n" + _table(header, rows) + f"\n{summary}"


def cmd_schedule(args):
    _need(args, "d")
    d, m = args.d, args.m or 0
    sched = strata.schedule_m0(d) if m == 0 else strata.schedule_m(d, m)
    stages = sched.stages
    if args.k is not None:
        stages = tuple(s for s in stages if s.k == args.k)
        if not stages:
            raise UsageError(f"no stage k={args.k} (stages run 1..{sched.stages[-1].k})")
    if args.format == "json":
        data = sched.to_json()
        data["stages"] = [s.to_json() for s in stages]
        data["blow_downs"] = len(sched.blow_downs)
        return EXIT_OK, _dump(data)
    rows = [(str(s.k), s.kind, ", ".join(s.contracted) or "-") for s in stages]
    return EXIT_OK, f"schedule d={d} m={m}\n" + _table(("k", "kind", "contracted"), rows)


def cmd_invariants(args):
    _need(args, "n")
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    P = pres.m01_pn_d2(args.n)
    q = P.quotient()
    full = hilbert_function(q)
    inv = invariant_hilbert(q, swap_action(P), len(full) - 1)
    if args.format == "json":
        return EXIT_OK, _dump({"name": P.name, "group": "swap D1 <-> D2", "hilbert": full.to_list(),
                               "invariant_hilbert": inv.to_list(), "palindromic": inv.is_palindromic()})
    rows = [(D, a, b) for D, (a, b) in enumerate(zip(full, inv))]
    return EXIT_OK, f"{P.name} under swap D1 <-> D2\n" + _table(("degree", "dim", "invariant"), rows)


COMMANDS = {"build": cmd_build, "hilbert": cmd_hilbert, "verify": cmd_verify,
            "schedule": cmd_schedule, "invariants": cmd_invariants}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        code, text = COMMANDS[args.verb](args)
    except ValueError as e:  # UsageError, or a builder rejecting its parameters
        print(f"mapring: error: {e}", file=stderr)
        return EXIT_USAGE
    except pres.ConventionPinningError as e:
        print(_dump({"error": "convention pinning failed", "message": str(e),
                     "candidates": [{"convention": l, "passed": ok} for l, ok, _ in e.results]}), file=stderr)
        return EXIT_PINNING
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text, file=stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
