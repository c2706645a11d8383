"""Command-line front door.

Subcommands: cw, bounds, decode, verify, simulate, gen. Exit codes: 0 on
success, 1 on domain errors (reported as one-line JSON on stderr), 2 on
usage errors. Numeric output uses 17 significant digits so identical flags
and seeds reproduce identical bytes; --threads only changes scheduling,
never results.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import experiments, verify
from .decoders import decode_ml, decode_net
from .errors import InvalidInputError, MMVError
from .model import (
    ProblemConfig,
    SignalValueMatrix,
    default_epsilon,
    dump_instance,
    generate_instance,
    load_instance,
    load_values_csv,
)
from .output import csv_lines, dumps
from .threshold import bounds_table, c_of_w


class _Parser(argparse.ArgumentParser):
    """argparse with JSON usage diagnostics on stderr (exit code 2)."""

    def error(self, message):
        print(dumps({"error": "usage", "message": message}), file=sys.stderr)
        raise SystemExit(2)


def _env_threads():
    raw = os.environ.get("MMV_THREADS", "").strip()
    if raw.isdigit() and int(raw) >= 1:
        return int(raw)
    return 1


def build_parser() -> _Parser:
    parser = _Parser(prog="mmvsr", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads (default: MMV_THREADS or 1); results never depend on it",
    )
    common.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command")

    p_cw = sub.add_parser(
        "cw", parents=[common], help="recovery threshold of a value matrix"
    )
    p_cw.add_argument("w_csv", help="value matrix CSV, one row per line")
    p_cw.add_argument("--sigma-a2", type=float, required=True)
    p_cw.add_argument("--sigma-z2", type=float, required=True)
    p_cw.add_argument("--mode", choices=("strict", "generalized"), default="strict")

    p_bounds = sub.add_parser(
        "bounds", parents=[common], help="single- vs multiple-vector bound table"
    )
    p_bounds.add_argument("--k", type=int, required=True)
    p_bounds.add_argument("--n", type=int, required=True)
    p_bounds.add_argument("--m", type=int, required=True)
    p_bounds.add_argument("--sigma-a2", type=float, required=True)
    p_bounds.add_argument("--sigma-z2", type=float, required=True)

    p_decode = sub.add_parser(
        "decode", parents=[common], help="decode one instance JSON file"
    )
    p_decode.add_argument("instance", help="instance JSON (see gen)")
    p_decode.add_argument("--decoder", choices=("ml", "net"), default="ml")
    p_decode.add_argument("--epsilon", type=float, default=None)
    p_decode.add_argument("--budget", type=int, default=10**8)

    p_verify = sub.add_parser(
        "verify", parents=[common], help="run one supporting-fact check"
    )
    p_verify.add_argument(
        "--lemma",
        choices=("1", "2", "3", "hadamard"),
        required=True,
        help="1: Gaussian tail bound; 2: net consistency; 3: determinant lower bound",
    )
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.add_argument("--seed", type=int, default=0)

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="run a phase-transition schedule"
    )
    p_sim.add_argument("--config", required=True, help="schedule JSON file")
    p_sim.add_argument("--out", default=None, help="also write the CSV here")

    p_gen = sub.add_parser(
        "gen", parents=[common], help="generate one instance JSON file"
    )
    p_gen.add_argument("w_csv")
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--sigma-a2", type=float, required=True)
    p_gen.add_argument("--sigma-z2", type=float, required=True)
    p_gen.add_argument("--epsilon", type=float, default=None)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--mode", choices=("strict", "generalized"), default="strict")
    p_gen.add_argument("--out", default=None, help="output path (default stdout)")

    return parser


def _cmd_cw(args) -> int:
    w = load_values_csv(args.w_csv, mode=args.mode)
    report = c_of_w(w, args.sigma_a2, args.sigma_z2)
    doc = {
        "c_of_w": report.c_of_w,
        "argmin_subset": list(report.argmin_subset),
        "per_subset": [
            {"subset": list(subset), "value": value}
            for subset, value in report.per_subset.items()
        ],
    }
    print(dumps(doc))
    return 0


def _cmd_bounds(args) -> int:
    rows = bounds_table(args.k, args.n, args.m, args.sigma_a2, args.sigma_z2)
    table = [
        (
            row.label,
            row.lower_bound_n if row.applicable else None,
            row.upper_bound_m if row.applicable else None,
        )
        for row in rows
    ]
    sys.stdout.write(csv_lines(("label", "lower_bound_n", "upper_bound_m"), table))
    return 0


def _cmd_decode(args) -> int:
    with open(args.instance, "r", encoding="utf-8") as fh:
        inst, cfg = load_instance(fh.read())
    k = len(inst.support)
    if args.decoder == "ml":
        result = decode_ml(inst.Y, inst.A, k, budget=args.budget)
    else:
        result = decode_net(
            inst.Y, inst.A, k, cfg, epsilon=args.epsilon, budget=args.budget
        )
    doc = {
        "support": [s + 1 for s in result.support],
        "status": result.status,
        "residual": result.residual,
    }
    print(dumps(doc))
    return 0


def _report_doc(report: verify.CheckReport) -> dict:
    return {
        "name": report.name,
        "trials": report.trials,
        "violations": report.violations,
        "worst_margin": report.worst_margin,
        "seed": report.seed,
    }


def _cmd_verify(args) -> int:
    seed = args.seed
    if args.lemma == "1":
        trials = args.trials if args.trials is not None else 20000
        reports = [
            verify.check_tail_bound(
                cfg["B"], cfg["theta"], cfg["gamma"], trials, seed=seed
            )
            for cfg in verify.tail_bound_configs()
        ]
        reports.append(verify.check_tail_bound_stationarity(seed=seed))
    elif args.lemma == "2":
        trials = args.trials if args.trials is not None else 200
        reports = [verify.check_net_consistency(trials=trials, seed=seed)]
    elif args.lemma == "3":
        trials = args.trials if args.trials is not None else 1000
        reports = [verify.sweep_det_lower_bound(trials, seed=seed)]
    else:
        trials = args.trials if args.trials is not None else 1000
        reports = [verify.sweep_hadamard(trials, seed=seed)]
    total = sum(r.violations for r in reports)
    print(dumps({"checks": [_report_doc(r) for r in reports], "violations": total}))
    return 0 if total == 0 else 1


def _load_schedule(path) -> experiments.Schedule:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise InvalidInputError(f"schedule file is not valid JSON: {exc}") from exc
    mode = doc.get("mode", "strict")
    if "w" in doc:
        w = SignalValueMatrix(np.array(doc["w"], dtype=np.float64), mode=mode)
    elif "w_csv" in doc:
        w = load_values_csv(doc["w_csv"], mode=mode)
    else:
        raise InvalidInputError("schedule needs 'w' (inline rows) or 'w_csv' (path)")
    try:
        return experiments.Schedule(
            w=w,
            alpha=float(doc["alpha"]),
            m_grid=tuple(int(m) for m in doc["m_grid"]),
            ratio=float(doc["ratio"]),
            trials_per_point=int(doc["trials_per_point"]),
            decoder=doc.get("decoder", "ml"),
            master_seed=int(doc.get("master_seed", 0)),
            epsilon=doc.get("epsilon"),
            budget=int(doc.get("budget", 10**8)),
            fixed_a=bool(doc.get("fixed_a", False)),
        )
    except KeyError as exc:
        raise InvalidInputError(f"schedule is missing required field {exc}") from exc


def curve_csv(curve: experiments.PhaseCurve) -> str:
    header = ("m", "n", "trials", "errors", "error_rate", "wilson_halfwidth", "status")
    rows = [
        (p.m, p.n, p.trials, p.errors, p.error_rate, p.wilson_halfwidth, p.status)
        for p in curve.points
    ]
    return csv_lines(header, rows)


def _cmd_simulate(args, threads: int) -> int:
    schedule = _load_schedule(args.config)
    curve = experiments.run_phase(schedule, threads=threads)
    text = curve_csv(curve)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _cmd_gen(args) -> int:
    w = load_values_csv(args.w_csv, mode=args.mode)
    epsilon = (
        args.epsilon
        if args.epsilon is not None
        else default_epsilon(args.sigma_a2, args.sigma_z2)
    )
    cfg = ProblemConfig(
        m=args.m,
        n=args.n,
        sigma_a_sq=args.sigma_a2,
        sigma_z_sq=args.sigma_z2,
        epsilon=epsilon,
        seed=args.seed,
    )
    inst = generate_instance(w, cfg)
    text = dump_instance(inst, cfg)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.error("a subcommand is required (cw, bounds, decode, verify, simulate, gen)")
    if args.verbose:
        logging.basicConfig(level=logging.INFO if args.verbose == 1 else logging.DEBUG)
    threads = args.threads if args.threads is not None else _env_threads()
    if threads < 1:
        parser.error("--threads must be at least 1")
    try:
        if args.command == "cw":
            return _cmd_cw(args)
        if args.command == "bounds":
            return _cmd_bounds(args)
        if args.command == "decode":
            return _cmd_decode(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "simulate":
            return _cmd_simulate(args, threads)
        if args.command == "gen":
            return _cmd_gen(args)
        parser.error(f"unknown subcommand {args.command!r}")
    except MMVError as exc:
        print(dumps({"error": exc.code, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
