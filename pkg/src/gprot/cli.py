"""Command-line interface.

Subcommands:
  rotate    rotate a loading matrix read from CSV
  simulate  run the simulation grid and write reports
  report    regenerate tables/figure data from a stored cells.csv

Exit codes: 0 success; 1 invalid input or config; 2 numerical failure;
3 I/O failure.
"""

import argparse
import csv
import json
import sys

import numpy as np

from .errors import InvalidInputError, NumericalError
from .multistart import StartSpec, multi_start_rotate
from .normalize import kaiser_normalize
from .pairwise import PairwiseParams, pairwise_varimax
from .rotation import GprParams, gpr_rotate
from .rotation import varimax_criterion
from .study import StudyConfig, run_study, regenerate_reports

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3


def _read_loadings_csv(path):
    """Read a loading matrix: one row per variable, comma-separated
    decimals, optional single header line."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if row and any(s.strip() for s in row)]
    if not rows:
        raise InvalidInputError(f"{path} holds no data rows")
    try:
        [float(tok) for tok in rows[0]]
        start = 0
    except ValueError:
        start = 1  # first line is a header
    if start == 1 and len(rows) == 1:
        raise InvalidInputError(f"{path} holds a header but no data rows")
    width = len(rows[start])
    data = []
    for row in rows[start:]:
        if len(row) != width:
            raise InvalidInputError(f"inconsistent column count in {path}")
        try:
            data.append([float(tok) for tok in row])
        except ValueError as exc:
            raise InvalidInputError(f"non-numeric value in {path}: {exc}") from exc
    return np.asarray(data, dtype=np.float64)


def _write_loadings_csv(path, loadings):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in np.asarray(loadings):
            writer.writerow([repr(float(x)) for x in row])


def _cmd_rotate(args):
    a = _read_loadings_csv(args.input)
    kaiser = args.kaiser == "on"
    work = kaiser_normalize(a)[0] if kaiser else a
    if args.method == "pairwise":
        sol = pairwise_varimax(work, PairwiseParams())
        q_used = None
    elif args.starts == "identity":
        sol = gpr_rotate(work, np.eye(a.shape[1]), GprParams())
        q_used = None
    else:
        result = multi_start_rotate(
            work, StartSpec(kind="random", q=args.q), GprParams(), rng=args.seed
        )
        sol = result.best
        q_used = result.q_used
    loadings = a @ sol.transform  # original scale regardless of normalization
    _write_loadings_csv(args.output, loadings)
    summary = (
        f"criterion_v={varimax_criterion(loadings):.6f} "
        f"iterations={sol.iterations} "
        f"converged={'true' if sol.converged else 'false'}"
    )
    if q_used is not None:
        summary += f" q={q_used}"
    print(summary)
    return EXIT_OK


def _cmd_simulate(args):
    overrides = {}
    if args.config is not None:
        with open(args.config, encoding="utf-8") as fh:
            try:
                overrides = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(overrides, dict):
            raise InvalidInputError("config must be a JSON object of StudyConfig fields")
    if args.full_scale:
        overrides["replications"] = 1000
        overrides["population_cases"] = None
    config = StudyConfig.from_mapping(overrides)
    run_study(
        config,
        out_dir=args.output_dir,
        cache_populations=args.cache_populations,
        log=print,
    )
    print(f"reports written to {args.output_dir}")
    return EXIT_OK


def _cmd_report(args):
    written = regenerate_reports(args.input_dir)
    for path in written:
        print(path)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gprot",
        description="Gradient projection rotation and its multi-start simulation grid",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rot = sub.add_parser("rotate", help="rotate a loading matrix from CSV")
    rot.add_argument("--input", required=True, help="CSV, one row per variable")
    rot.add_argument("--method", choices=("gpr", "pairwise"), default="gpr")
    rot.add_argument("--starts", choices=("identity", "random"), default="random",
                     help="start strategy (gpr only; pairwise ignores it)")
    rot.add_argument("--q", type=int, default=10,
                     help="random starts for --starts random (gpr only)")
    rot.add_argument("--kaiser", choices=("on", "off"), default="off")
    rot.add_argument("--seed", type=int, default=0)
    rot.add_argument("--output", required=True, help="CSV for rotated loadings")
    rot.set_defaults(func=_cmd_rotate)

    sim = sub.add_parser("simulate", help="run the simulation grid")
    sim.add_argument("--config", default=None,
                     help="JSON file of StudyConfig fields (defaults when omitted)")
    sim.add_argument("--output-dir", required=True)
    sim.add_argument("--full-scale", action="store_true",
                     help="1000 replications and populations of 1000*n cases")
    sim.add_argument("--cache-populations", action="store_true",
                     help="persist generated populations under output-dir/populations")
    sim.set_defaults(func=_cmd_simulate)

    rep = sub.add_parser("report", help="regenerate tables from cells.csv")
    rep.add_argument("--input-dir", required=True)
    rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
