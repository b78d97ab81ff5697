"""Command line entry point: ``qtomo simulate | estimate | sweep | metrics``.

Exit codes: 0 success, 1 config/validation error, 2 I/O error,
3 numerical-consistency error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .errors import NumericalConsistencyError, QTomoError, ValidationError
from .fileio import read_density, read_json, read_record, write_density, write_json, write_record
from .harness import derive_seed, derived_seed, load_config, run_sweep, write_csv
from .measure import basis_set_from_descriptor, simulate_counts
from .metrics import concurrence, concurrence_unclamped, hs_distance
from .mle import AnnealConfig, anneal
from .states import StateSpec

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


def _state_from_args(args) -> StateSpec:
    return StateSpec(kind=args.state, parameter=args.param, label=args.label, n_qubits=args.qubits)


def cmd_simulate(args) -> int:
    spec = _state_from_args(args)
    rng = derive_seed(args.seed, "cli/simulate", 0)
    truth = spec.build(rng)
    basis = basis_set_from_descriptor(args.scheme, spec.n_qubits)
    record = simulate_counts(truth, basis, args.N, rng, args.count_model)
    write_record(args.out, record)
    if args.truth_out:
        write_density(args.truth_out, truth)
    return EXIT_OK


def cmd_estimate(args) -> int:
    record = read_record(args.record)
    config = AnnealConfig.from_dict(read_json(args.config)) if args.config else AnnealConfig()
    report = anneal(record, config, derive_seed(args.seed, "cli/estimate", 0))
    write_density(args.out, report.estimate)
    summary = report.summary() | {"seed": args.seed, "anneal": config.to_dict()}
    if args.report:
        write_json(args.report, summary)
    else:
        json.dump(summary, sys.stdout, indent=2)
        sys.stdout.write("\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.out is not None:
        changes["output_path"] = args.out
    if changes:
        config = config.replace(**changes)
    rows = run_sweep(config, workers=args.workers)
    write_csv(rows, config.output_path, config)
    logging.getLogger(__name__).info("wrote %d rows to %s", len(rows), config.output_path)
    return EXIT_OK


def cmd_metrics(args) -> int:
    a, b = read_density(args.a), read_density(args.b)
    out = {"hs_distance": hs_distance(a, b)}
    if a.n_qubits == 2:
        for label, rho in (("a", a), ("b", b)):
            out[f"concurrence_{label}"] = concurrence(rho)
            out[f"concurrence_unclamped_{label}"] = concurrence_unclamped(rho)
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtomo", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate counts for a state and basis scheme")
    s.add_argument("--state", default="random", choices=["bell_diagonal", "werner", "pure_named", "random"])
    s.add_argument("--param", type=float, help="b (bell_diagonal) or q (werner)")
    s.add_argument("--label", help="product label for pure_named, e.g. '+L'")
    s.add_argument("--qubits", type=int, default=2)
    s.add_argument("--scheme", default="overcomplete", help="standard | overcomplete | standard:<4 letters> | table1:<m>")
    s.add_argument("-N", type=int, required=True, help="total number of copies")
    s.add_argument("--count-model", default="binomial", choices=["binomial", "poisson"])
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.add_argument("--truth-out", help="also write the simulated true state")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="reconstruct a state from a count record")
    e.add_argument("record")
    e.add_argument("--config", help="JSON file with anneal settings")
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True, help="density-matrix output file")
    e.add_argument("--report", help="write the estimate report here instead of stdout")
    e.set_defaults(func=cmd_estimate)

    w = sub.add_parser("sweep", help="run an experiment sweep from a config file")
    w.add_argument("--config", required=True)
    w.add_argument("--seed", type=int, help="override master_seed")
    w.add_argument("--out", help="override output_path")
    w.add_argument("--trials", type=int, help="override trials")
    w.add_argument("--workers", type=int, default=1)
    w.set_defaults(func=cmd_sweep)

    m = sub.add_parser("metrics", help="compare two density-matrix files")
    m.add_argument("a")
    m.add_argument("b")
    m.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except NumericalConsistencyError as exc:
        print(f"qtomo: numerical consistency error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValidationError, QTomoError) as exc:
        print(f"qtomo: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qtomo: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
