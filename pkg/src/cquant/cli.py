"""Command-line front end: solve instances, emit closed forms, run error-decay
sweeps, and export plot-ready CSV/JSON.

Exit codes: 0 ok, 2 bad input, 3 solver domain error, 4 unsupported closed
form.  The env var CQ_SEED overrides the default rng seed; --seed overrides
both; --config points at a JSON file with solver settings.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .asymptotics import ErrorSequence, build_report, csv_rows
from .closed_form import FAMILY_IDS, UnsupportedClosedForm, family_setup
from .distortion import Codebook, distortion
from .geometry import UniformMeasure, curve_from_json
from .solver import SolverConfig, solve, solve_sequence

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_SOLVER = 3
EXIT_NO_CLOSED_FORM = 4

_FAMILY_PARAM_KEYS = ("a", "b", "m", "c", "d", "e")


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(payload: dict, output: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("CQ_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise CliError(EXIT_BAD_INPUT, f"CQ_SEED is not an integer: {env!r}") from exc
    return 0


def _solver_config(args) -> SolverConfig:
    overrides = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                overrides = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(EXIT_BAD_INPUT, f"cannot read solver config: {exc}") from exc
        if not isinstance(overrides, dict):
            raise CliError(EXIT_BAD_INPUT, "solver config must be a JSON object")
    if getattr(args, "starts", None) is not None:
        overrides["starts"] = args.starts
    overrides["seed"] = _resolve_seed(args)
    try:
        return SolverConfig(**overrides)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_BAD_INPUT, f"bad solver config: {exc}") from exc


def _family_params(args) -> dict:
    return {k: getattr(args, k) for k in _FAMILY_PARAM_KEYS if getattr(args, k, None) is not None}


def _problem_geometry(args):
    """(measure, constraint, window, setup-or-None) from --family or explicit JSON."""
    has_family = args.family is not None
    has_explicit = getattr(args, "support", None) is not None
    if has_family == has_explicit:
        raise CliError(EXIT_BAD_INPUT, "provide exactly one of --family or --support/--constraint")
    if has_family:
        try:
            setup = family_setup(args.family, **_family_params(args))
        except ValueError as exc:
            raise CliError(EXIT_BAD_INPUT, str(exc)) from exc
        return setup.measure, setup.constraint, setup.window, setup
    if getattr(args, "constraint", None) is None:
        raise CliError(EXIT_BAD_INPUT, "--support requires --constraint")
    try:
        support = curve_from_json(json.loads(args.support))
        constraint = curve_from_json(json.loads(args.constraint))
    except (json.JSONDecodeError, ValueError) as exc:
        raise CliError(EXIT_BAD_INPUT, f"invalid geometry JSON: {exc}") from exc
    window = tuple(args.window) if args.window else None
    return UniformMeasure(support), constraint, window, None


def cmd_solve(args) -> int:
    measure, constraint, window, _ = _problem_geometry(args)
    cfg = _solver_config(args)
    try:
        result = solve(measure, constraint, window, args.n, cfg)
    except ValueError as exc:
        raise CliError(EXIT_SOLVER, f"solver domain error: {exc}") from exc
    _emit(result.to_json(), args.output)
    return EXIT_OK


def cmd_closed_form(args) -> int:
    try:
        setup = family_setup(args.family, **_family_params(args))
    except ValueError as exc:
        raise CliError(EXIT_BAD_INPUT, str(exc)) from exc
    try:
        codebook, value = setup.closed_form(args.n)
    except UnsupportedClosedForm as exc:
        raise CliError(EXIT_NO_CLOSED_FORM, f"{exc} (try: cquant solve --family {args.family})") from exc
    except ValueError as exc:
        raise CliError(EXIT_BAD_INPUT, str(exc)) from exc
    payload = {
        "family": args.family,
        "n": args.n,
        "params": list(codebook.params),
        "points": [list(p) for p in codebook.points],
        "value": value,
    }
    if args.verify:
        recomputed = distortion(setup.measure, codebook).value
        payload["verified_value"] = recomputed
        payload["verify_discrepancy"] = abs(recomputed - value)
    _emit(payload, args.output)
    return EXIT_OK


def _write_csv(path: str, rows) -> None:
    fields = ["n", "V_n", "gap", "local_slope", "scaled_gap"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            out = []
            for key in fields:
                v = row[key]
                if v is None:
                    out.append("")
                elif isinstance(v, float):
                    out.append(f"{v:.17g}")
                else:
                    out.append(str(v))
            writer.writerow(out)


def cmd_asymptotics(args) -> int:
    measure, constraint, window, setup = _problem_geometry(args)
    ns = list(range(args.n_min, args.n_max + 1))
    if len(ns) < 4:
        raise CliError(EXIT_BAD_INPUT, "n-range must contain at least 4 values")
    if args.exact:
        if setup is None or setup.error_fn is None:
            raise CliError(EXIT_BAD_INPUT, "--exact requires a --family with closed forms")
        try:
            entries = [(n, setup.error_fn(n)) for n in ns]
        except UnsupportedClosedForm as exc:
            raise CliError(EXIT_NO_CLOSED_FORM, f"{exc} (drop --exact to use the solver)") from exc
    else:
        cfg = _solver_config(args)
        try:
            results = solve_sequence(measure, constraint, window, args.n_max, cfg)
        except ValueError as exc:
            raise CliError(EXIT_SOLVER, f"solver domain error: {exc}") from exc
        entries = [(r.n, r.value) for r in results if r.n >= args.n_min]
    try:
        seq, report = build_report(entries, kappa=args.kappa)
    except ValueError as exc:
        raise CliError(EXIT_BAD_INPUT, f"asymptotics failed: {exc}") from exc
    if args.csv:
        _write_csv(args.csv, csv_rows(seq, report.kappa or 1.0))
    payload = {"family": args.family, "entries": [[n, v] for n, v in entries]}
    payload.update(report.to_json())
    _emit(payload, args.output)
    return EXIT_OK


def _add_geometry_args(p: argparse.ArgumentParser, need_n: bool) -> None:
    p.add_argument("--family", choices=FAMILY_IDS, help="named problem family")
    for key in _FAMILY_PARAM_KEYS:
        p.add_argument(f"--{key}", type=float, help=f"family parameter {key}")
    p.add_argument("--support", help="support curve JSON (with --constraint)")
    p.add_argument("--constraint", help="constraint curve JSON")
    p.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"),
                   help="constraint parameter window")
    if need_n:
        p.add_argument("--n", type=int, required=True, help="codebook size")
    p.add_argument("--seed", type=int, help="rng seed (overrides CQ_SEED)")
    p.add_argument("--config", help="JSON file with solver settings")
    p.add_argument("--starts", type=int, help="multi-start count override")
    p.add_argument("--output", help="write JSON here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cquant",
                                     description="Optimal constrained quantizers on plane curves")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="numerically solve one instance")
    _add_geometry_args(p_solve, need_n=True)
    p_solve.set_defaults(func=cmd_solve)

    p_cf = sub.add_parser("closed-form", help="emit a closed-form codebook")
    p_cf.add_argument("--family", choices=FAMILY_IDS, required=True)
    for key in _FAMILY_PARAM_KEYS:
        p_cf.add_argument(f"--{key}", type=float, help=f"family parameter {key}")
    p_cf.add_argument("--n", type=int, required=True)
    p_cf.add_argument("--verify", action="store_true",
                      help="re-evaluate through the distortion integral")
    p_cf.add_argument("--output", help="write JSON here instead of stdout")
    p_cf.set_defaults(func=cmd_closed_form)

    p_asym = sub.add_parser("asymptotics", help="error-decay sweep and limit estimates")
    _add_geometry_args(p_asym, need_n=False)
    p_asym.add_argument("--n-min", type=int, default=1)
    p_asym.add_argument("--n-max", type=int, required=True)
    p_asym.add_argument("--exact", action="store_true",
                        help="use closed-form values instead of the solver")
    p_asym.add_argument("--kappa", type=float,
                        help="coefficient order (default: estimated dimension)")
    p_asym.add_argument("--csv", help="write per-n CSV here")
    p_asym.set_defaults(func=cmd_asymptotics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
