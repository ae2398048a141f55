"""Simulation grid: how many random starts does multi-start rotation need?

Runs the full crossed design (components k, sample size n, Kaiser on/off,
start strategy, number of random starts q) against generated populations,
scores every cell by congruence with the population components, criterion
value, and RMSE, and applies two cut-off rules per condition:

* stationarity: the smallest q whose mean results change by no more than
  .001 (congruence) and .0001 (criterion) when q is increased to the next
  schedule value;
* benchmark: the smallest q at which the multi-start results are within
  those same margins of the classic pairwise rotation on identical samples.

The design is fully paired: for a given (k, n, replication) every cell sees
the byte-identical sample and, across q and Kaiser conditions, the identical
nested start sequence. All streams derive from base_seed, so a study is a
pure function of its StudyConfig.
"""

import csv
import io
import os
from dataclasses import dataclass, fields

import numpy as np

from .errors import InvalidInputError
from .metrics import match_components, mean_congruence, rmse_loadings
from .multistart import draw_starts, rotate_from_starts
from .normalize import kaiser_normalize
from .pairwise import PairwiseParams, pairwise_varimax
from .pca import correlation_matrix, pca_loadings
from .population import (
    PopulationSpec,
    draw_sample,
    generate_population,
    load_population,
    population_cache_key,
    save_population,
)
from .rotation import GprParams, gpr_rotate, varimax_criterion
from .seeding import derive_rng, derive_seed_sequence

__all__ = [
    "StudyConfig",
    "Condition",
    "CellResult",
    "ScanOutcome",
    "StationarityRow",
    "StationarityReport",
    "StudyResults",
    "run_cell",
    "run_study",
    "stationarity_scan",
    "benchmark_scan",
    "build_report",
    "emit_reports",
    "load_cells_csv",
]

# cut-offs for "performance stopped changing" (congruence / criterion)
STATIONARY_DELTA_C = 1e-3
STATIONARY_DELTA_V = 1e-4

CELL_CSV_HEADER = (
    "k,n,kaiser,method,start_type,q,replications,"
    "mean_c,se_c,mean_v,se_v,mean_rmse,se_rmse"
)


@dataclass(frozen=True)
class StudyConfig:
    """Grid definition. population_cases=None sizes each population at
    1000*n (the full-scale ratio); the desk-scale default 50,000 keeps
    generation fast without moving the population loadings."""

    k_list: tuple = (3, 6, 9, 12)
    n_list: tuple = (100, 300)
    kaiser_list: tuple = (False, True)
    start_types: tuple = ("identity", "random")
    q_schedule: tuple = (1, 10, 50, 100, 500, 1000)
    replications: int = 100
    base_seed: int = 20260818
    main_loading: float = 0.5
    population_cases: int | None = 50_000

    def __post_init__(self):
        q = tuple(int(x) for x in self.q_schedule)
        if len(q) == 0 or q[0] < 1 or any(b <= a for a, b in zip(q, q[1:])):
            raise InvalidInputError("q_schedule must be strictly increasing, first >= 1")
        object.__setattr__(self, "q_schedule", q)
        object.__setattr__(self, "k_list", tuple(int(k) for k in self.k_list))
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "kaiser_list", tuple(bool(b) for b in self.kaiser_list))
        object.__setattr__(self, "start_types", tuple(self.start_types))
        if len(self.k_list) == 0 or any(k < 1 for k in self.k_list):
            raise InvalidInputError("k_list must hold positive integers")
        if len(self.n_list) == 0 or any(n < 2 for n in self.n_list):
            raise InvalidInputError("n_list entries must be >= 2")
        if len(self.kaiser_list) == 0:
            raise InvalidInputError("kaiser_list must be non-empty")
        for s in self.start_types:
            if s not in ("identity", "random"):
                raise InvalidInputError(f"unknown start type {s!r}")
        if self.replications < 2:
            raise InvalidInputError("replications must be >= 2")
        if not (0.0 < self.main_loading < 1.0):
            raise InvalidInputError("main_loading must be in (0, 1)")
        if self.population_cases is not None and self.population_cases < 1:
            raise InvalidInputError("population_cases must be positive or None")

    def cases_for(self, n):
        return self.population_cases if self.population_cases is not None else 1000 * n

    @classmethod
    def from_mapping(cls, mapping):
        """Build from a config-file dict; unknown keys are errors."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise InvalidInputError(f"unknown config key(s): {', '.join(unknown)}")
        return cls(**mapping)


@dataclass(frozen=True)
class Condition:
    """One grid cell's coordinates. q is 0 for identity-start and pairwise
    cells (no random starts involved)."""

    k: int
    n: int
    kaiser: bool
    method: str = "gpr"  # "gpr" | "pairwise"
    start_type: str = "random"  # "identity" | "random" (gpr only)
    q: int = 0

    def __post_init__(self):
        if self.method not in ("gpr", "pairwise"):
            raise InvalidInputError(f"unknown method {self.method!r}")
        if self.start_type not in ("identity", "random"):
            raise InvalidInputError(f"unknown start type {self.start_type!r}")
        if self.method == "gpr" and self.start_type == "random" and self.q < 1:
            raise InvalidInputError("random-start gpr condition needs q >= 1")


@dataclass(frozen=True)
class CellResult:
    k: int
    n: int
    kaiser: bool
    method: str
    start_type: str
    q: int
    replications: int
    mean_c: float
    se_c: float
    mean_v: float
    se_v: float
    mean_rmse: float
    se_rmse: float


@dataclass(frozen=True)
class ScanOutcome:
    """min_q is the smallest qualifying schedule value, or None when no
    consecutive pair (stationarity) or no schedule point (benchmark)
    qualified; reference_q then anchors the 'greater than' label."""

    min_q: int | None
    reference_q: int

    def label(self):
        return str(self.min_q) if self.min_q is not None else f">{self.reference_q}"


@dataclass(frozen=True)
class StationarityRow:
    k: int
    n: int
    kaiser: bool
    stationary: ScanOutcome
    benchmark: ScanOutcome


@dataclass(frozen=True)
class StationarityReport:
    rows: tuple


@dataclass(frozen=True)
class StudyResults:
    config: StudyConfig
    cells: tuple
    report: StationarityReport


def _pop_seed(config, k, n):
    ss = derive_seed_sequence(config.base_seed, "population", k, n)
    return int(ss.generate_state(1, np.uint64)[0])


def _population_for(config, k, n, cache_dir=None):
    spec = PopulationSpec(
        k=k,
        cases=config.cases_for(n),
        main_loading=config.main_loading,
        seed=_pop_seed(config, k, n),
    )
    if cache_dir is not None:
        path = os.path.join(cache_dir, f"pop_{population_cache_key(spec)}.npz")
        if os.path.exists(path):
            pop = load_population(path)
            if pop.spec == spec:
                return pop
        pop = generate_population(spec)
        os.makedirs(cache_dir, exist_ok=True)
        save_population(pop, path)
        return pop
    return generate_population(spec)


def _sample_loadings(pop, k, n, r, base_seed):
    rng = derive_rng(base_seed, "sample", k, n, r)
    sample = draw_sample(pop, n, rng)
    return pca_loadings(correlation_matrix(sample), k)


def _score(raw_loadings, pop):
    matching = match_components(raw_loadings, pop.component_loadings)
    c = mean_congruence(matching)
    v = varimax_criterion(raw_loadings)
    rmse = rmse_loadings(raw_loadings, pop.component_loadings, matching)
    return c, v, rmse


def _aggregate(cond, reps, cs, vs, rs):
    def se(x):
        return float(np.std(x, ddof=1) / np.sqrt(len(x)))

    return CellResult(
        k=cond.k, n=cond.n, kaiser=cond.kaiser, method=cond.method,
        start_type=cond.start_type, q=cond.q, replications=reps,
        mean_c=float(np.mean(cs)), se_c=se(cs),
        mean_v=float(np.mean(vs)), se_v=se(vs),
        mean_rmse=float(np.mean(rs)), se_rmse=se(rs),
    )


def run_cell(condition, pop, config):
    """Compute one cell of the grid.

    Every replication draws its sample and start sequence from streams keyed
    only on (base_seed, k, n, replication), so the identical inputs are seen
    by every cell that shares those coordinates regardless of q, Kaiser, or
    method (paired design). A replication that fails numerically aborts the
    cell; failures of individual random starts inside the multi-start were
    already excluded at that level.
    """
    if pop.spec.k != condition.k:
        raise InvalidInputError(
            f"population has k={pop.spec.k}, condition wants k={condition.k}"
        )
    params = GprParams()
    reps = config.replications
    cs = np.empty(reps)
    vs = np.empty(reps)
    rs = np.empty(reps)
    for r in range(reps):
        a = _sample_loadings(pop, condition.k, condition.n, r, config.base_seed)
        work = kaiser_normalize(a)[0] if condition.kaiser else a
        if condition.method == "pairwise":
            t = pairwise_varimax(work, PairwiseParams()).transform
        elif condition.start_type == "identity":
            t = gpr_rotate(work, np.eye(condition.k), params).transform
        else:
            rng = derive_rng(config.base_seed, "starts", condition.k, condition.n, r)
            starts = draw_starts(condition.k, condition.q, rng)
            transforms = rotate_from_starts(work, starts, params)[1]
            # select on the reported scale: keeps best-of-q exactly monotone
            # in q even when normalized and raw criteria order ties differently
            sel = [varimax_criterion(a @ cand) for cand in transforms]
            t = transforms[int(np.argmax(sel))]
        # metrics always on the raw-scale rotated loadings
        cs[r], vs[r], rs[r] = _score(a @ t, pop)
    return _aggregate(condition, reps, cs, vs, rs)


def run_study(config, out_dir=None, cache_populations=False, log=None):
    """Run the full grid and (optionally) write reports to out_dir.

    Shares per-replication work across cells: each (k, n, replication)
    computes its sample loadings and full nested start sequence once, then
    every Kaiser condition, q prefix, identity start, and the pairwise
    benchmark are evaluated from it. Results are identical to calling
    run_cell per cell (same streams), just without redundant recomputation.
    """
    say = log if log is not None else (lambda msg: None)
    params = GprParams()
    q_schedule = config.q_schedule
    q_max = q_schedule[-1]
    do_identity = "identity" in config.start_types
    do_random = "random" in config.start_types
    cache_dir = os.path.join(out_dir, "populations") if (
        out_dir is not None and cache_populations
    ) else None

    cells = []
    for k in config.k_list:
        for n in config.n_list:
            pop = _population_for(config, k, n, cache_dir)
            say(f"k={k} n={n}: population of {pop.spec.cases} cases ready")
            points = []  # (method, start_type, q) in output order
            for kaiser in config.kaiser_list:
                if do_identity:
                    points.append((kaiser, "gpr", "identity", 0))
                if do_random:
                    points.extend((kaiser, "gpr", "random", q) for q in q_schedule)
                points.append((kaiser, "pairwise", "identity", 0))
            acc = {p: (np.empty(config.replications), np.empty(config.replications),
                       np.empty(config.replications)) for p in points}

            for r in range(config.replications):
                a = _sample_loadings(pop, k, n, r, config.base_seed)
                if do_random:
                    rng = derive_rng(config.base_seed, "starts", k, n, r)
                    starts = draw_starts(k, q_max, rng)
                for kaiser in config.kaiser_list:
                    work = kaiser_normalize(a)[0] if kaiser else a
                    if do_identity:
                        t = gpr_rotate(work, np.eye(k), params).transform
                        row = _score(a @ t, pop)
                        for arr, val in zip(acc[(kaiser, "gpr", "identity", 0)], row):
                            arr[r] = val
                    if do_random:
                        transforms = rotate_from_starts(work, starts, params)[1]
                        sel = np.array(
                            [varimax_criterion(a @ cand) for cand in transforms]
                        )
                        for q in q_schedule:
                            t = transforms[int(np.argmax(sel[:q]))]
                            row = _score(a @ t, pop)
                            for arr, val in zip(acc[(kaiser, "gpr", "random", q)], row):
                                arr[r] = val
                    t = pairwise_varimax(work, PairwiseParams()).transform
                    row = _score(a @ t, pop)
                    for arr, val in zip(acc[(kaiser, "pairwise", "identity", 0)], row):
                        arr[r] = val
            for kaiser, method, start_type, q in points:
                cond = Condition(k=k, n=n, kaiser=kaiser, method=method,
                                 start_type=start_type, q=q)
                cs, vs, rs = acc[(kaiser, method, start_type, q)]
                cells.append(_aggregate(cond, config.replications, cs, vs, rs))
            say(f"k={k} n={n}: {config.replications} replications done")

    report = build_report(cells)
    results = StudyResults(config=config, cells=tuple(cells), report=report)
    if out_dir is not None:
        emit_reports(results, out_dir)
    return results


def _cell_key(cell):
    return (cell.k, cell.n, cell.kaiser)


def stationarity_scan(cells):
    """Smallest q whose mean results stop changing (both cut-offs) when q
    moves to the next schedule point. `cells` must be the random-start cells
    of a single condition in ascending q order; with no qualifying pair the
    outcome references the final pair's lower q.
    """
    cells = list(cells)
    if len(cells) < 2:
        raise InvalidInputError("stationarity scan needs at least two q points")
    if len({_cell_key(c) for c in cells}) != 1:
        raise InvalidInputError("cells mix conditions")
    qs = [c.q for c in cells]
    if any(b <= a for a, b in zip(qs, qs[1:])):
        raise InvalidInputError("cells must be in strictly ascending q order")
    for lo, hi in zip(cells, cells[1:]):
        if (
            abs(hi.mean_c - lo.mean_c) <= STATIONARY_DELTA_C
            and abs(hi.mean_v - lo.mean_v) <= STATIONARY_DELTA_V
        ):
            return ScanOutcome(min_q=lo.q, reference_q=lo.q)
    return ScanOutcome(min_q=None, reference_q=cells[-2].q)


def benchmark_scan(gpr_cells, pairwise_cell):
    """Smallest q at which the multi-start results sit within the cut-offs
    of the pairwise benchmark computed on the same samples; otherwise
    'greater than' the largest q scanned.
    """
    gpr_cells = list(gpr_cells)
    if not gpr_cells:
        raise InvalidInputError("benchmark scan needs at least one gpr cell")
    keys = {_cell_key(c) for c in gpr_cells} | {_cell_key(pairwise_cell)}
    if len(keys) != 1:
        raise InvalidInputError("cells mix conditions")
    if pairwise_cell.method != "pairwise":
        raise InvalidInputError("pairwise_cell must come from the pairwise method")
    for cell in sorted(gpr_cells, key=lambda c: c.q):
        if (
            abs(cell.mean_c - pairwise_cell.mean_c) <= STATIONARY_DELTA_C
            and abs(cell.mean_v - pairwise_cell.mean_v) <= STATIONARY_DELTA_V
        ):
            return ScanOutcome(min_q=cell.q, reference_q=cell.q)
    return ScanOutcome(min_q=None, reference_q=max(c.q for c in gpr_cells))


def build_report(cells):
    """Apply both scans to every (k, n, kaiser) condition that has
    random-start cells at two or more q points plus a pairwise cell."""
    by_cond = {}
    for c in cells:
        by_cond.setdefault(_cell_key(c), []).append(c)
    rows = []
    for key in sorted(by_cond, key=lambda t: (t[0], t[1], t[2])):
        group = by_cond[key]
        randoms = sorted(
            (c for c in group if c.method == "gpr" and c.start_type == "random"),
            key=lambda c: c.q,
        )
        pw = [c for c in group if c.method == "pairwise"]
        if len(randoms) < 2 or not pw:
            continue
        rows.append(
            StationarityRow(
                k=key[0], n=key[1], kaiser=key[2],
                stationary=stationarity_scan(randoms),
                benchmark=benchmark_scan(randoms, pw[0]),
            )
        )
    return StationarityReport(rows=tuple(rows))


def _fmt_bool(b):
    return "true" if b else "false"


def _cell_row(cell):
    return [
        str(cell.k), str(cell.n), _fmt_bool(cell.kaiser), cell.method,
        cell.start_type, str(cell.q), str(cell.replications),
        repr(cell.mean_c), repr(cell.se_c), repr(cell.mean_v),
        repr(cell.se_v), repr(cell.mean_rmse), repr(cell.se_rmse),
    ]


def write_cells_csv(cells, path):
    if not cells:
        raise InvalidInputError("refusing to write an empty cell table")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(CELL_CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for cell in cells:
            writer.writerow(_cell_row(cell))


def load_cells_csv(path):
    """Read a cells.csv written by write_cells_csv back into CellResults."""
    cells = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or ",".join(header) != CELL_CSV_HEADER:
            raise InvalidInputError(f"unexpected cell CSV header in {path}")
        for row in reader:
            if len(row) != 13:
                raise InvalidInputError(f"malformed cell row: {row!r}")
            if row[2] not in ("true", "false"):
                raise InvalidInputError(f"bad kaiser value {row[2]!r}")
            cells.append(
                CellResult(
                    k=int(row[0]), n=int(row[1]), kaiser=row[2] == "true",
                    method=row[3], start_type=row[4], q=int(row[5]),
                    replications=int(row[6]),
                    mean_c=float(row[7]), se_c=float(row[8]),
                    mean_v=float(row[9]), se_v=float(row[10]),
                    mean_rmse=float(row[11]), se_rmse=float(row[12]),
                )
            )
    if not cells:
        raise InvalidInputError(f"no cell rows in {path}")
    return cells


def _series(cells):
    """(n, kaiser) series present, in sorted order."""
    return sorted({(c.n, c.kaiser) for c in cells})


def _points(cells):
    """x-axis points: identity, ascending q, pairwise (those present)."""
    pts = []
    if any(c.method == "gpr" and c.start_type == "identity" for c in cells):
        pts.append(("gpr", "identity", 0))
    for q in sorted({c.q for c in cells if c.method == "gpr" and c.start_type == "random"}):
        pts.append(("gpr", "random", q))
    if any(c.method == "pairwise" for c in cells):
        pts.append(("pairwise", "identity", 0))
    return pts


def _point_label(method, start_type, q):
    if method == "pairwise":
        return "pairwise"
    return "identity" if start_type == "identity" else f"random_q{q}"


def write_figure_data(cells, out_dir):
    """One CSV per (k, metric): rows are start-strategy points, column pairs
    are mean/se per (n, kaiser) series. Mirrors the study's figure layout."""
    by_k = {}
    for c in cells:
        by_k.setdefault(c.k, []).append(c)
    index = {(c.k, c.n, c.kaiser, c.method, c.start_type, c.q): c for c in cells}
    written = []
    for k in sorted(by_k):
        group = by_k[k]
        series = _series(group)
        points = _points(group)
        for metric in ("c", "v", "rmse"):
            path = os.path.join(out_dir, f"figure_k{k}_{metric}.csv")
            with open(path, "w", newline="", encoding="utf-8") as fh:
                cols = ["point", "start_type", "q"]
                for n, kaiser in series:
                    tag = f"n{n}_{'kaiser' if kaiser else 'raw'}"
                    cols += [f"mean_{tag}", f"se_{tag}"]
                fh.write(",".join(cols) + "\n")
                writer = csv.writer(fh, lineterminator="\n")
                for method, start_type, q in points:
                    row = [_point_label(method, start_type, q), start_type, str(q)]
                    for n, kaiser in series:
                        cell = index.get((k, n, kaiser, method, start_type, q))
                        if cell is None:
                            row += ["", ""]
                        else:
                            row += [
                                repr(getattr(cell, f"mean_{metric}")),
                                repr(getattr(cell, f"se_{metric}")),
                            ]
                    writer.writerow(row)
            written.append(path)
    return written


def _aligned_table(title, rows, header):
    buf = io.StringIO()
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    buf.write(title + "\n")
    for r in [header] + rows:
        buf.write(
            "  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip() + "\n"
        )
    return buf.getvalue()


def render_report_text(report):
    """Aligned-text analogs of the two scan tables."""
    conds = sorted({(r.n, r.kaiser) for r in report.rows})
    ks = sorted({r.k for r in report.rows})
    by = {(r.k, r.n, r.kaiser): r for r in report.rows}
    header = ["k"] + [f"n={n} {'kaiser' if kai else 'raw'}" for n, kai in conds]

    def table(attr):
        rows = []
        for k in ks:
            row = [k]
            for n, kai in conds:
                r = by.get((k, n, kai))
                row.append(getattr(r, attr).label() if r else "-")
            rows.append(row)
        return rows

    parts = [
        _aligned_table(
            "Minimum random starts q for stationary performance "
            f"(|dc| <= {STATIONARY_DELTA_C:g} and |dv| <= {STATIONARY_DELTA_V:g} "
            "to the next schedule point)",
            table("stationary"), header,
        ),
        _aligned_table(
            "Minimum random starts q to reach the pairwise benchmark "
            f"(|dc| <= {STATIONARY_DELTA_C:g} and |dv| <= {STATIONARY_DELTA_V:g})",
            table("benchmark"), header,
        ),
    ]
    return "\n".join(parts)


def write_report_tables(report, out_dir):
    if not report.rows:
        raise InvalidInputError("refusing to write an empty report")
    csv_path = os.path.join(out_dir, "scan_tables.csv")
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        fh.write("k,n,kaiser,min_q_stationary,min_q_benchmark\n")
        writer = csv.writer(fh, lineterminator="\n")
        for r in report.rows:
            writer.writerow(
                [r.k, r.n, _fmt_bool(r.kaiser), r.stationary.label(), r.benchmark.label()]
            )
    txt_path = os.path.join(out_dir, "scan_tables.txt")
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(render_report_text(report))
    return [csv_path, txt_path]


def emit_reports(results, out_dir):
    """Write cells.csv, scan tables (CSV + aligned text), and per-(k, metric)
    figure data under out_dir. Refuses an empty result set."""
    cells = list(results.cells)
    if not cells:
        raise InvalidInputError("refusing to write reports for an empty result set")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    cells_path = os.path.join(out_dir, "cells.csv")
    write_cells_csv(cells, cells_path)
    written.append(cells_path)
    if results.report.rows:
        written.extend(write_report_tables(results.report, out_dir))
    written.extend(write_figure_data(cells, out_dir))
    return written


def regenerate_reports(input_dir):
    """Rebuild scan tables and figure data from input_dir/cells.csv."""
    cells = load_cells_csv(os.path.join(input_dir, "cells.csv"))
    report = build_report(cells)
    written = []
    if report.rows:
        written.extend(write_report_tables(report, input_dir))
    written.extend(write_figure_data(cells, input_dir))
    return written
