"""Grid sweeps, bound-ratio fitting, dominance comparisons, and the stable
table format shared by the library and the command line.

A sweep cell is one (n, mu, lambda) configuration; its replicate batch is
seeded from the master seed and the cell's row index, so tables are
reproducible byte for byte regardless of worker count or grid slicing order.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass

from scipy.stats import mannwhitneyu

from .bounds import master_bound
from .engines import EaConfig, TiePolicy, Variant, run_batch
from .genotype import ConfigError, make_fitness
from .rng import mix64
from .stats import SampleStats, summarize

#: column order of every emitted table; "lambda" is the offspring count
CSV_COLUMNS = ("n", "mu", "lambda", "variant", "replicates",
               "mean_T", "stderr_T", "median_T", "q10", "q90",
               "exhausted", "bound_total", "ratio")


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian grid over n, mu, lambda at a fixed variant and benchmark."""

    ns: tuple
    mus: tuple
    lams: tuple
    variant: Variant = Variant.PLUS
    fitness: str = "onemax"
    k: int | None = None                      # multiopt zero-budget
    c: float = 1.0
    tie_policy: TiePolicy = TiePolicy.OFFSPRING_FIRST_RANDOM
    replicates: int = 100
    seed: int = 0
    budget_mult: float = 10.0

    def validate(self) -> None:
        if not (self.ns and self.mus and self.lams):
            raise ConfigError("grid axes must be nonempty")
        if self.replicates < 1:
            raise ConfigError("replicates must be >= 1")
        if not self.budget_mult > 0:
            raise ConfigError("budget_mult must be positive")
        if self.fitness.lower() not in ("onemax", "multiopt"):
            raise ConfigError("sweeps support fitness 'onemax' or 'multiopt'")

    def cells(self):
        return itertools.product(self.ns, self.mus, self.lams)


@dataclass(frozen=True)
class ExperimentRow:
    """One sweep cell. Iteration statistics cover completed replicates only;
    exhausted counts the censored ones. ratio = mean_T / bound_total.

    error is set (and the numeric fields are NaN) when the cell's
    configuration failed validation; skew_warned flags mean outside [q10, q90].
    Both extras appear in JSON output but not in the fixed CSV columns.
    """

    n: int
    mu: int
    lam: int
    variant: str
    replicates: int
    mean_T: float
    stderr_T: float
    median_T: float
    q10: float
    q90: float
    exhausted: int
    bound_total: float
    ratio: float
    skew_warned: bool = False
    error: str | None = None


@dataclass(frozen=True)
class ExperimentTable:
    rows: tuple

    def __len__(self):
        return len(self.rows)

    def completed_samples(self) -> int:
        return sum(r.replicates - r.exhausted for r in self.rows
                   if r.error is None)


def _skew_warned(mean: float, q10: float, q90: float) -> bool:
    return math.isfinite(mean) and not (q10 <= mean <= q90)


def _stats_row(n, mu, lam, variant, replicates, stats: SampleStats,
               bound_total: float) -> ExperimentRow:
    ratio = stats.mean / bound_total if math.isfinite(stats.mean) else float("nan")
    return ExperimentRow(
        n=n, mu=mu, lam=lam, variant=variant.value, replicates=replicates,
        mean_T=stats.mean, stderr_T=stats.stderr, median_T=stats.median,
        q10=stats.q10, q90=stats.q90, exhausted=stats.exhausted,
        bound_total=bound_total, ratio=ratio,
        skew_warned=_skew_warned(stats.mean, stats.q10, stats.q90))


def _error_row(n, mu, lam, variant, replicates, message: str) -> ExperimentRow:
    nan = float("nan")
    return ExperimentRow(n=n, mu=mu, lam=lam, variant=variant.value,
                         replicates=replicates, mean_T=nan, stderr_T=nan,
                         median_T=nan, q10=nan, q90=nan, exhausted=0,
                         bound_total=nan, ratio=nan, error=message)


def summarize_runs(results) -> SampleStats:
    """Censoring summary of a run_batch result list: completed iteration
    counts are averaged, exhausted runs only counted."""
    completed = [r.iterations_to_opt for r in results if not r.exhausted]
    return summarize(completed, exhausted=sum(1 for r in results if r.exhausted))


def run_cell(config: EaConfig, f, replicates: int,
             workers: int | None = None) -> ExperimentRow:
    """Measure one configuration and format it as a table row."""
    stats = summarize_runs(run_batch(config, f, replicates, workers))
    bound = master_bound(max(config.n, 2), config.mu, config.lam).total
    return _stats_row(config.n, config.mu, config.lam, config.variant,
                      replicates, stats, bound)


def sweep(spec: SweepSpec, workers: int | None = None) -> ExperimentTable:
    """Run the whole grid. A cell whose configuration is invalid (say comma
    selection with lambda < mu) becomes an error row; it never aborts the
    sweep."""
    spec.validate()
    rows = []
    for idx, (n, mu, lam) in enumerate(spec.cells()):
        cell_seed = mix64(spec.seed, idx)
        try:
            f = make_fitness(spec.fitness, n, k=spec.k)
            bound = master_bound(max(n, 2), mu, lam).total
            budget = int(math.ceil(spec.budget_mult * bound))
            config = EaConfig(n, mu, lam, spec.variant, spec.c,
                              spec.tie_policy, budget, cell_seed)
            config.validate()
        except ConfigError as exc:
            rows.append(_error_row(n, mu, lam, spec.variant,
                                   spec.replicates, str(exc)))
            continue
        stats = summarize_runs(run_batch(config, f, spec.replicates, workers))
        rows.append(_stats_row(n, mu, lam, spec.variant, spec.replicates,
                               stats, bound))
    return ExperimentTable(tuple(rows))


@dataclass(frozen=True)
class RatioFit:
    """Spread of measured-over-bound ratios across the usable rows of a table.

    Rows with errors, exhausted replicates, or non-finite ratios are excluded;
    no_data is set when nothing usable remains.
    """

    min_ratio: float
    max_ratio: float
    spread: float
    rows_used: int
    no_data: bool


def fit_ratio(table: ExperimentTable) -> RatioFit:
    ratios = [r.ratio for r in table.rows
              if r.error is None and r.exhausted == 0 and math.isfinite(r.ratio)]
    if not ratios:
        nan = float("nan")
        return RatioFit(nan, nan, nan, 0, True)
    lo, hi = min(ratios), max(ratios)
    return RatioFit(lo, hi, hi / lo, len(ratios), False)


@dataclass(frozen=True)
class DominanceReport:
    """Two configurations on the same benchmark, same n/mu/lambda.

    p_value is the one-sided Mann-Whitney probability for the alternative
    that A's iteration counts are stochastically smaller than B's, computed
    on completed replicates. NaN when either side completed nothing.
    """

    variant_a: str
    variant_b: str
    stats_a: SampleStats
    stats_b: SampleStats
    mean_diff: float
    pooled_se: float
    u_statistic: float
    p_value: float


def compare_dominance(config_a: EaConfig, config_b: EaConfig, f,
                      replicates: int, workers: int | None = None) -> DominanceReport:
    """Paired measurement of two variants at identical (n, mu, lambda)."""
    if (config_a.n, config_a.mu, config_a.lam) != (config_b.n, config_b.mu, config_b.lam):
        raise ConfigError("dominance comparison needs identical n, mu, lambda")
    config_a.validate()
    config_b.validate()
    runs_a = run_batch(config_a, f, replicates, workers)
    runs_b = run_batch(config_b, f, replicates, workers)
    stats_a = summarize_runs(runs_a)
    stats_b = summarize_runs(runs_b)
    samples_a = [r.iterations_to_opt for r in runs_a if not r.exhausted]
    samples_b = [r.iterations_to_opt for r in runs_b if not r.exhausted]
    if samples_a and samples_b:
        u, p = mannwhitneyu(samples_a, samples_b, alternative="less")
        u, p = float(u), float(p)
    else:
        u, p = float("nan"), float("nan")
    mean_diff = stats_a.mean - stats_b.mean
    pooled = math.sqrt(stats_a.stderr ** 2 + stats_b.stderr ** 2) \
        if math.isfinite(stats_a.stderr) and math.isfinite(stats_b.stderr) \
        else float("nan")
    return DominanceReport(config_a.variant.value, config_b.variant.value,
                           stats_a, stats_b, mean_diff, pooled, u, p)


def _cell_text(value) -> str:
    # repr keeps every float bit, so parse(emit(t)) round-trips exactly
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _row_values(row: ExperimentRow):
    return (row.n, row.mu, row.lam, row.variant, row.replicates,
            row.mean_T, row.stderr_T, row.median_T, row.q10, row.q90,
            row.exhausted, row.bound_total, row.ratio)


def _row_record(row: ExperimentRow) -> dict:
    record = dict(zip(CSV_COLUMNS, _row_values(row)))
    record["skew_warned"] = row.skew_warned
    record["error"] = row.error
    return record


def emit(table: ExperimentTable, fmt: str = "csv") -> bytes:
    """Serialize a table: UTF-8, '.' decimal separator, '\\n' line ends.

    CSV carries exactly CSV_COLUMNS with a mandatory header; JSON mirrors the
    same numbers (identical floats) plus the skew_warned and error extras.
    """
    fmt = fmt.lower()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in table.rows:
            writer.writerow([_cell_text(v) for v in _row_values(row)])
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        payload = {"columns": list(CSV_COLUMNS),
                   "rows": [_row_record(row) for row in table.rows]}
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    raise ConfigError(f"unknown table format {fmt!r}")


def _row_from_record(record: dict, stored_extras: bool) -> ExperimentRow:
    mean = float(record["mean_T"])
    q10 = float(record["q10"])
    q90 = float(record["q90"])
    if stored_extras:
        skew = bool(record.get("skew_warned", False))
        error = record.get("error")
    else:
        skew = _skew_warned(mean, q10, q90)
        error = None
    return ExperimentRow(
        n=int(record["n"]), mu=int(record["mu"]), lam=int(record["lambda"]),
        variant=str(record["variant"]), replicates=int(record["replicates"]),
        mean_T=mean, stderr_T=float(record["stderr_T"]),
        median_T=float(record["median_T"]), q10=q10, q90=q90,
        exhausted=int(record["exhausted"]),
        bound_total=float(record["bound_total"]), ratio=float(record["ratio"]),
        skew_warned=skew, error=error)


def parse_table(data, fmt: str = "csv") -> ExperimentTable:
    """Inverse of emit for both formats. CSV does not carry the JSON-only
    extras, so skew_warned is recomputed and error rows come back as None."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    fmt = fmt.lower()
    if fmt == "csv":
        reader = csv.reader(io.StringIO(data))
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError("empty table: missing CSV header") from None
        if header != list(CSV_COLUMNS):
            raise ConfigError(f"unexpected CSV header {header!r}")
        rows = [_row_from_record(dict(zip(CSV_COLUMNS, line)), False)
                for line in reader if line]
        return ExperimentTable(tuple(rows))
    if fmt == "json":
        payload = json.loads(data)
        rows = [_row_from_record(rec, True) for rec in payload["rows"]]
        return ExperimentTable(tuple(rows))
    raise ConfigError(f"unknown table format {fmt!r}")
