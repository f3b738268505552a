"""Command-line front end.  Every subcommand prints one JSON CommandResult.

Exit codes: 0 success, 2 usage or precondition error, 3 capability limit,
4 a checked inequality or property came out false.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Callable, TextIO

from . import __version__
from . import constructions as cons
from .counting import METHODS, auto_method, count, is_valid, log2_count, minimal_set_bound, monochromatic_chain
from .errors import CapabilityError, EngineFault, PreconditionError, UsageError, VerificationFailure
from .familyio import family_to_dict, parse_family
from .lattice import SetFamily, elements_of, height, linear_extension, mirsky_decompose
from .partition import partition
from .search import exhaustive_search, local_search
from .supersaturation import (
    comparable_pairs,
    comparable_pairs_scan,
    family_weight,
    kleitman_required,
    lym_sum,
    parse_rational,
    rational_json,
    supersat_check,
)

EXIT_OK, EXIT_USAGE, EXIT_CAPABILITY, EXIT_VERIFY = 0, 2, 3, 4


class Outcome:
    """Payload plus exit code; ``text`` replaces the JSON envelope (CSV output)."""

    def __init__(self, payload: dict, code: int = EXIT_OK, text: str | None = None):
        self.payload, self.code, self.text = payload, code, text


# -- helpers -------------------------------------------------------------------------

def _family(args) -> SetFamily:
    if args.family is None:
        raise UsageError("--family is required")
    return parse_family(args.family, args.n)


def _need(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _frac(q) -> dict:
    return rational_json(q)


def _no_csv(args) -> None:
    if args.csv:
        raise UsageError(f"--csv is only available for search, not {args.command}")


# -- subcommands ---------------------------------------------------------------------

def cmd_count(args) -> Outcome:
    _no_csv(args)
    _need(args, "r", "k")
    fam = _family(args)
    method = args.method
    used = auto_method(fam, args.r, args.k) if method == "auto" else method
    value = count(fam, args.r, args.k, method, workers=args.threads, strict=args.strict,
                  budget=args.budget or 2**32)
    return Outcome({"count": str(value), "method": used, "family_size": len(fam),
                    "log2": None if value == 0 else round(log2_count(value), 9),
                    "minimal_set_bound": str(minimal_set_bound(fam)) if args.r == 2 and args.k == 2 else None})


def cmd_validate(args) -> Outcome:
    _no_csv(args)
    _need(args, "r", "k", "colouring")
    fam = _family(args)
    try:
        cols = [int(c) for c in args.colouring.split(",")] if args.colouring else []
    except ValueError:
        raise UsageError("--colouring must be a comma-separated list of colours") from None
    if len(cols) != len(fam):
        raise UsageError(f"colouring lists {len(cols)} colours for {len(fam)} sets")
    if any(not 0 <= c < args.r for c in cols):
        raise UsageError(f"colours must lie in 0..{args.r - 1}")
    ok = is_valid(fam, cols, args.k)
    chain = None if ok else [elements_of(m) for m in monochromatic_chain(fam, cols, args.k)]
    return Outcome({"valid": ok, "monochromatic_chain": chain}, EXIT_OK if ok else EXIT_VERIFY)


def cmd_cp(args) -> Outcome:
    _no_csv(args)
    fam = _family(args)
    fast, scan = comparable_pairs(fam), comparable_pairs_scan(fam)
    if fast != scan:
        raise VerificationFailure("comparable-pair counters disagree", {"degree_sum": fast, "scan": scan})
    return Outcome({"comparable_pairs": fast, "family_size": len(fam)})


def cmd_kleitman(args) -> Outcome:
    _no_csv(args)
    fam = _family(args)
    pairs, need = comparable_pairs(fam), kleitman_required(fam.n, len(fam))
    return Outcome({"family_size": len(fam), "comparable_pairs": pairs, "required": need, "holds": pairs >= need},
                   EXIT_OK if pairs >= need else EXIT_VERIFY)


def cmd_lym(args) -> Outcome:
    _no_csv(args)
    value = lym_sum(_family(args))
    return Outcome({"sum": _frac(value), "holds": value <= 1}, EXIT_OK if value <= 1 else EXIT_VERIFY)


def cmd_weight(args) -> Outcome:
    _no_csv(args)
    _need(args, "k")
    fam = _family(args)
    payload = {"weight": _frac(family_weight(fam, args.k)), "k": args.k}
    code = EXIT_OK
    if args.delta is not None:
        rep = supersat_check(fam, args.k, parse_rational(args.delta))
        payload["supersaturation"] = rep.to_dict()
        if rep.hypothesis_met and not rep.holds:
            code = EXIT_VERIFY
    return Outcome(payload, code)


def cmd_mirsky(args) -> Outcome:
    _no_csv(args)
    fam = _family(args)
    dec = mirsky_decompose(fam)
    return Outcome({
        "height": height(fam),
        "parts": [[elements_of(fam.members[i]) for i in part] for part in dec.parts],
        "linear_extension": [elements_of(fam.members[i]) for i in linear_extension(fam).order],
    })


def cmd_partition(args) -> Outcome:
    _no_csv(args)
    _need(args, "k")
    fam = _family(args)
    eps = parse_rational(args.epsilon) if args.epsilon is not None else None
    exact = count(fam, 2, args.k) if args.verify else None
    res = partition(fam, args.k, epsilon=eps, omega=args.omega, paranoid=args.paranoid, true_count=exact)
    payload = res.to_dict()
    if not args.trace:
        payload.pop("ledger", None)
    else:
        payload["trace"] = list(res.state.trace)
    code = EXIT_OK
    if args.verify:
        payload["exact_count"] = str(exact)
        ledger = res.ledger.checks()
        scale_free = [n for n in ("step_fractions", "colour_steps", "conservation") if n in ledger and not ledger[n].passed]
        payload["verified"] = res.qualities.passed and res.properties.passed and not scale_free
        if not payload["verified"]:
            code = EXIT_VERIFY
    return Outcome(payload, code)


def cmd_search(args) -> Outcome:
    _need(args, "n", "r", "k")
    if args.exhaustive == args.local:
        raise UsageError("choose exactly one of --exhaustive or --local")
    if args.exhaustive:
        rep = exhaustive_search(args.n, args.r, args.k, workers=args.threads)
    else:
        rep = local_search(args.n, args.r, args.k, budget=args.budget or 2000, seed=args.seed,
                           start=args.start, restarts=args.restarts)
    return Outcome(rep.to_dict(), text=rep.to_csv() if args.csv else None)


def cmd_construct(args) -> Outcome:
    _no_csv(args)
    if args.kind == "paired":
        _need(args, "n")
        fam = cons.paired_four_colouring_family(args.n)
        exact = count(fam, 4, 2)
        return Outcome({"kind": "paired", "family": family_to_dict(fam), "exact_count": str(exact),
                        "paired_distinct": str(cons.paired_construction_size(args.n)),
                        "antichain_count": str(4 ** len(cons.level(args.n, args.n // 2)))})
    if args.kind == "levels":
        _need(args, "r", "k")
        la = cons.level_assignment(args.r, args.k)
        payload = {"kind": "levels", "r": args.r, "k": args.k,
                   "colours_of_level": [sorted(c) for c in la.colours_of_level],
                   "levels_of_colour": [sorted(lv) for lv in la.levels_of_colour],
                   "problems": la.check()}
        code = EXIT_OK if not payload["problems"] else EXIT_VERIFY
        if args.n is not None:
            fam = la.family(args.n)
            samples = la.sample_colourings(fam, args.samples, args.seed)
            valid = sum(is_valid(fam, row.tolist(), args.k) for row in samples)
            payload.update(family=family_to_dict(fam), samples=args.samples, samples_valid=int(valid))
            if valid != args.samples:
                code = EXIT_VERIFY
        return Outcome(payload, code)
    _need(args, "n")
    j = args.levels if args.levels is not None else (args.k - 1 if args.k else 1)
    fam = cons.middle_levels(args.n, j, upper=args.upper)
    return Outcome({"kind": "middle", "levels": j, "family": family_to_dict(fam), "size": len(fam)})


def cmd_report(args) -> Outcome:
    _no_csv(args)
    from . import acceptance

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    index = []
    for res in acceptance.run_all(quick=args.quick) + [acceptance.determinism()]:
        name = f"criterion_{res.number:02d}.json"
        (out / name).write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True, default=str) + "\n")
        index.append({"criterion": res.number, "name": res.name, "passed": res.passed, "file": name,
                      "line": res.line()})
    (out / "index.json").write_text(json.dumps({"version": __version__, "criteria": index}, indent=2) + "\n")
    ok = all(e["passed"] for e in index)
    payload = {"out": str(out), "passed": sum(e["passed"] for e in index), "total": len(index),
               "criteria": [{k: e[k] for k in ("criterion", "passed", "file")} for e in index]}
    return Outcome(payload, EXIT_OK if ok else EXIT_VERIFY)


COMMANDS: dict[str, Callable] = {
    "count": cmd_count, "validate": cmd_validate, "cp": cmd_cp, "kleitman": cmd_kleitman,
    "lym": cmd_lym, "weight": cmd_weight, "mirsky": cmd_mirsky, "partition": cmd_partition,
    "search": cmd_search, "construct": cmd_construct, "report": cmd_report,
}


# -- parser ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="ground-set size")
    common.add_argument("--family", help="all | level:j | middle:j[,upper] | random:p,seed | file:PATH")
    common.add_argument("--r", type=int, help="number of colours")
    common.add_argument("--k", type=int, help="forbidden chain length")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, help="brute-force assignments, or local-search evaluations")
    common.add_argument("--threads", type=int, default=1, help="worker processes; output does not depend on it")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (default)")
    fmt.add_argument("--csv", action="store_true", help="CSV summary (search only)")

    parser = argparse.ArgumentParser(prog="chaincolour", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[common], help="exact number of (r,k)-colourings")
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--strict", action="store_true", help="fail instead of falling back when --method does not apply")
    p = sub.add_parser("validate", parents=[common], help="check one colouring (colours in family order)")
    p.add_argument("--colouring", help="comma-separated colours, one per set")
    sub.add_parser("cp", parents=[common], help="number of comparable pairs")
    sub.add_parser("kleitman", parents=[common], help="comparable pairs against the forced minimum")
    sub.add_parser("lym", parents=[common], help="LYM-type sum, which must be at most 1")
    p = sub.add_parser("weight", parents=[common], help="capped inverse-binomial weight")
    p.add_argument("--delta", help="also run the supersaturation check with this delta, e.g. 1/6")
    sub.add_parser("mirsky", parents=[common], help="antichain decomposition and linear extension")
    p = sub.add_parser("partition", parents=[common], help="run the four-stage partition engine")
    p.add_argument("--epsilon", help="rational such as 1/2000")
    p.add_argument("--omega", type=int)
    p.add_argument("--verify", action="store_true", help="check qualities and properties against the exact count")
    p.add_argument("--trace", action="store_true", help="include the operation ledger and trace")
    p.add_argument("--paranoid", action="store_true", help="also recheck colouring conservation")
    p = sub.add_parser("search", parents=[common], help="families with the most colourings")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--local", action="store_true")
    p.add_argument("--start", choices=("middle", "random"), default="middle")
    p.add_argument("--restarts", type=int, default=3)
    p = sub.add_parser("construct", parents=[common], help="explicit families and colour assignments")
    p.add_argument("--kind", choices=("middle", "paired", "levels"), default="middle")
    p.add_argument("--levels", type=int, help="number of middle levels (default k-1)")
    p.add_argument("--upper", action="store_true", help="take the upper block when two tie")
    p.add_argument("--samples", type=int, default=1000)
    p = sub.add_parser("report", parents=[common], help="run the acceptance sweep into a directory")
    p.add_argument("--out", required=True)
    p.add_argument("--quick", action="store_true", help="smaller random samples")
    return parser


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "json", "csv") and v is not None}


def run(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        outcome = COMMANDS[args.command](args)
    except (UsageError, PreconditionError) as exc:
        outcome = Outcome({"error": type(exc).__name__, "message": str(exc),
                           "witness": getattr(exc, "witness", None)}, EXIT_USAGE)
    except CapabilityError as exc:
        outcome = Outcome({"error": "CapabilityError", "message": str(exc)}, EXIT_CAPABILITY)
    except VerificationFailure as exc:
        outcome = Outcome({"error": "VerificationFailure", "message": str(exc), "details": exc.details}, EXIT_VERIFY)
    except EngineFault as exc:
        outcome = Outcome({"error": "EngineFault", "message": str(exc), "dump": exc.dump}, EXIT_VERIFY)
    if outcome.code == EXIT_USAGE or "error" in outcome.payload:
        print(f"chaincolour {args.command}: {outcome.payload.get('message', 'failed')}", file=err)
    if outcome.text is not None:
        out.write(outcome.text)
    else:
        result = {"command": args.command, "parameters": _params(args), "payload": outcome.payload,
                  "wall_time": round(time.perf_counter() - start, 6), "version": __version__}
        out.write(json.dumps(result, indent=2, sort_keys=True, default=str) + "\n")
    return outcome.code


def main() -> int:
    return run(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
