"""Command line interface: ``gsemo run | verify | diagnose | opt``.

Exit codes: 0 success, 1 failed verification, 2 instance parse error,
3 guard or parameter error, 4 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import _backend, harness, instances, verify
from .diagnostics import Landscape, diagnose
from .errors import GuardError, InstanceParseError, InvariantError

EXIT_FAILED, EXIT_PARSE, EXIT_PARAM, EXIT_INVARIANT = 1, 2, 3, 4


def _instance_args(p: argparse.ArgumentParser, with_perturb: bool = True) -> None:
    p.add_argument("--problem", choices=harness.PROBLEMS, required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="instance file")
    src.add_argument("--builtin", metavar="NAME", choices=sorted(instances.BUILTIN),
                     help="fixed-seed built-in instance")
    p.add_argument("--header", action="store_true", help="regression CSV has a header row")
    p.add_argument("--epsilon", type=float, help="perturbation or local-search epsilon")
    p.add_argument("--perturb", choices=("additive", "multiplicative"))
    p.add_argument("--perturb-seed", type=int, default=0)
    p.add_argument("--guard-override", action="store_true",
                   help="allow exhaustive enumeration beyond the default size limit")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gsemo", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an algorithm over one or more seeds")
    _instance_args(run)
    run.add_argument("--algo", choices=harness.ALGORITHMS, default="gsemo")
    run.add_argument("--k", type=int, help="size bound (default: unbounded)")
    run.add_argument("--budget", type=int, default=1000, help="iterations per run")
    run.add_argument("--seeds", default="1", help="list '1,2,5' or range '1..20'")
    run.add_argument("--out", metavar="PATH", help="JSON result file")
    run.add_argument("--trace", metavar="PATH",
                     help="CSV trace; '{seed}' in the name is replaced, otherwise suffixed per seed")
    run.add_argument("--trace-every", type=int, default=100)
    run.add_argument("--jobs", type=int, default=1, help="worker processes across seeds")
    run.add_argument("--backend", choices=("compiled", "python"))
    run.add_argument("--with-opt", action="store_true", help="also compute OPT by brute force")

    ver = sub.add_parser("verify", help="run acceptance checks on built-in instances")
    ver.add_argument("--suite", choices=sorted(verify.SUITES), default="core")
    ver.add_argument("--backend", choices=("compiled", "python"))
    ver.add_argument("--details", action="store_true", help="print per-instance details")

    dia = sub.add_parser("diagnose", help="exhaustive OPT, gamma_min, additive epsilon, flags and bounds")
    _instance_args(dia)
    dia.add_argument("--k", type=int)
    dia.add_argument("--out", metavar="PATH", help="JSON report (default: stdout)")

    opt = sub.add_parser("opt", help="brute-force optimum")
    _instance_args(opt)
    opt.add_argument("--k", type=int)
    return ap


def _spec(args, algorithm="gsemo", **extra) -> harness.ExperimentSpec:
    return harness.ExperimentSpec(
        problem=args.problem, algorithm=algorithm, input=args.input, builtin=args.builtin,
        epsilon=args.epsilon, perturb=args.perturb, perturb_seed=args.perturb_seed,
        header=args.header, guard_override=args.guard_override, **extra)


def _cmd_run(args) -> int:
    if args.jobs < 1:
        raise ValueError("--jobs must be >= 1")
    spec = _spec(args, args.algo, k=args.k, budget=args.budget,
                 seeds=tuple(harness.parse_seeds(args.seeds)), trace_every=args.trace_every,
                 with_opt=args.with_opt, backend=_backend.resolve(args.backend))
    record = harness.run_experiment(spec, jobs=args.jobs, trace=args.trace)
    if args.out:
        record.save(args.out)
    for note in record.notes:
        print(f"note: {note}")
    print(record.summary())
    return 0


def _cmd_verify(args) -> int:
    results = verify.run_suite(args.suite, backend=args.backend)
    for r in results:
        print(r.line())
        if args.details or not r.passed:
            for d in r.details:
                print(f"    {d}")
    return 0 if all(r.passed for r in results) else EXIT_FAILED


def _cmd_diagnose(args) -> int:
    f = harness.load_oracle(_spec(args))
    eps = 1.0 if args.epsilon is None else args.epsilon
    report = diagnose(f, args.k, local_eps=eps, guard_override=args.guard_override)
    text = json.dumps(report.to_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_opt(args) -> int:
    f = harness.load_oracle(_spec(args))
    value, arg = Landscape(f, args.guard_override).opt(args.k)
    print(f"OPT = {value!r}")
    print(f"subset = {list(arg.indices())} ({arg.to_bitstring()})")
    return 0


COMMANDS = {"run": _cmd_run, "verify": _cmd_verify, "diagnose": _cmd_diagnose, "opt": _cmd_opt}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except InstanceParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (GuardError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
