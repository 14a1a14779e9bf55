"""Command-line interface.

Exit codes: 0 success, 1 a verification suite failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .conversion import verify_conversion
from .errors import CohconcError
from .harness import DEFAULT_BUDGETS, SUITES, theorem_suites
from .io import dumps, load_state, save_state
from .monotones import (COHERENCE_K, ENTANGLEMENT_K, FAMILIES, K_FAMILIES, L1, QI, MonotoneId,
                        evaluate_pure, l1_coherence)
from .multislit import SWEEP_HEADER, distinguishability, load_config, sweep_rows
from .roof import coherence_number_estimate, minimize_roof, RoofProblem
from .states import BipartitePureState, DensityMatrix, PureState, random_mixed, random_pure

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
COHERENCE_NUMBER = "coherence_number"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _global_flags(p: argparse.ArgumentParser, top: bool):
    # subcommands accept the flags too; SUPPRESS keeps them from resetting the top-level value
    default = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    p.add_argument("--output", choices=("json", "csv"), default=default("json"), help="output format")
    p.add_argument("--quiet", action="store_true", default=default(False), help="print nothing on success")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cohconc", description="Coherence concurrence monotones, convex roofs and checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _global_flags(p, True)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp, False)
        return sp

    sp = cmd("monotone", "closed-form monotone of a pure state, or C_l1 of any state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--measure", required=True, choices=FAMILIES)
    sp.add_argument("--k", type=int)

    sp = cmd("roof", "convex-roof estimate for a mixed state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--measure", required=True, choices=(COHERENCE_K, QI, ENTANGLEMENT_K, COHERENCE_NUMBER))
    sp.add_argument("--k", type=int)
    sp.add_argument("--restarts", type=int, default=16)
    sp.add_argument("--ensemble", type=int, help="ensemble size m (default rank^2)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--threshold", type=float, default=1e-4, help="coherence_number classification threshold")

    sp = cmd("convert", "coherence-to-entanglement conversion check")
    sp.add_argument("--state", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)

    sp = cmd("multislit", "path distinguishability of a quanton-detector configuration")
    sp.add_argument("--config", required=True)
    sp.add_argument("--sweep", metavar="PARAM:LO:HI:STEPS",
                    help="PARAM is overlap or phi<i> (success amplitude modulus of slit i)")
    sp.add_argument("--seed", type=int, default=0)

    sp = cmd("verify", "run verification suites; one JSON line per suite")
    sp.add_argument("--suite", action="append", choices=tuple(SUITES), help="repeatable; default all")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, help="override every suite's sample budget")

    sp = cmd("random", "write a seeded random state file")
    sp.add_argument("--dim", type=int, required=True)
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    return p


def _monotone_id(measure: str, k: Optional[int]) -> MonotoneId:
    if measure in K_FAMILIES and k is None:
        raise UsageError(f"--k is required for {measure}")
    return MonotoneId(measure, k if measure in K_FAMILIES else None)


def _as_pure(state):
    if isinstance(state, DensityMatrix):
        if state.rank() != 1:
            raise UsageError("state is mixed; use the roof subcommand for this measure")
        lam, vecs = np.linalg.eigh(state.entries)
        return PureState(vecs[:, -1])
    return state


def _emit(args, payload: dict, csv_rows: Optional[List[Sequence]] = None, header: Optional[Sequence] = None):
    if args.quiet:
        return
    if args.output == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if csv_rows is None:
            flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
            w.writerow(list(flat))
            w.writerow(list(flat.values()))
        else:
            w.writerow(header)
            w.writerows(csv_rows)
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(dumps(dict({"schema": SCHEMA}, **payload)) + "\n")


def _cmd_monotone(args) -> int:
    state = load_state(args.state)
    mid = _monotone_id(args.measure, args.k)
    if mid.family == L1:
        value = l1_coherence(state)
    else:
        value = evaluate_pure(mid, _as_pure(state))
    _emit(args, {"measure": mid.family, "k": mid.k, "value": value})
    return EXIT_OK


def _cmd_roof(args) -> int:
    state = load_state(args.state)
    if isinstance(state, BipartitePureState):
        state = PureState(state.vector)
    rho = state.density() if isinstance(state, PureState) else state
    opts = dict(restarts=args.restarts, seed=args.seed, tol=args.tol, ensemble_size=args.ensemble)
    if args.measure == COHERENCE_NUMBER:
        est = coherence_number_estimate(rho, args.threshold, **opts)
        _emit(args, est.to_dict())
        return EXIT_OK
    mid = _monotone_id(args.measure, args.k)
    est = minimize_roof(RoofProblem(rho, mid, **opts))
    payload = est.to_dict()
    if args.output == "csv":
        payload = {k: v for k, v in payload.items() if k not in ("restart_values", "certificate")}
    _emit(args, payload)
    return EXIT_OK


def _cmd_convert(args) -> int:
    state = load_state(args.state)
    res = verify_conversion(state, args.k, seed=args.seed)
    payload = dict(res.to_dict(), k=args.k)
    if res.coherence_estimate is not None:
        payload["converged"] = bool(res.coherence_estimate.converged and res.entanglement_estimate.converged)
    _emit(args, payload)
    return EXIT_OK


def _parse_sweep(spec: str):
    parts = spec.split(":")
    if len(parts) != 4:
        raise UsageError("--sweep expects PARAM:LO:HI:STEPS")
    try:
        return parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError(f"--sweep bounds must be numbers: {spec!r}") from None


def _cmd_multislit(args) -> int:
    quanton, detector = load_config(args.config)
    if args.sweep:
        param, lo, hi, steps = _parse_sweep(args.sweep)
        rows = sweep_rows(quanton, detector, param, lo, hi, steps, seed=args.seed)
        _emit(args, {"sweep": [dict(zip(SWEEP_HEADER, r)) for r in rows]}, rows, SWEEP_HEADER)
        return EXIT_OK
    rep = distinguishability(quanton, detector, seed=args.seed)
    payload = rep.to_dict()
    if args.output == "csv":
        b1, b2, roof = rep.q_lower_bounds
        payload = {"d_q": rep.d_q, "l1_bound": rep.l1_bound, "bound1": b1, "bound2": b2,
                   "roof": roof, "slits": rep.slit_count}
    _emit(args, payload)
    return EXIT_OK


def _cmd_verify(args) -> int:
    names = args.suite or list(SUITES)
    budgets = dict(DEFAULT_BUDGETS)
    if args.samples is not None:
        if args.samples < 1:
            raise UsageError("--samples must be >= 1")
        budgets = {n: args.samples for n in budgets}
    reports = theorem_suites(args.seed, budgets, names)
    if not args.quiet:
        if args.output == "csv":
            rows = [(r.suite, r.passed, r.samples, r.max_defect, len(r.violations)) for r in reports]
            _emit(args, {}, rows, ("suite", "passed", "samples", "max_defect", "violations"))
        else:
            for r in reports:
                sys.stdout.write(dumps(dict({"schema": SCHEMA, "seed": args.seed}, **r.to_dict())) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _cmd_random(args) -> int:
    if args.rank == 1:
        state = random_pure(args.dim, args.seed)
    else:
        state = random_mixed(args.dim, args.rank, args.seed)
    save_state(state, args.out)
    _emit(args, {"path": args.out, "dim": args.dim, "rank": args.rank,
                 "kind": "pure" if args.rank == 1 else "mixed"})
    return EXIT_OK


COMMANDS = {
    "monotone": _cmd_monotone,
    "roof": _cmd_roof,
    "convert": _cmd_convert,
    "multislit": _cmd_multislit,
    "verify": _cmd_verify,
    "random": _cmd_random,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cohconc: error: {exc}", file=sys.stderr)
    except (CohconcError, ValueError) as exc:
        print(f"cohconc: error: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}",
              file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
