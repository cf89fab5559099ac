"""Seeded, parallel Monte Carlo engine for the power studies.

Two rejection-rate criteria are computed per (test, design, n) cell:

* PowA rejects when the statistic strictly exceeds the asymptotic one-sided
  normal critical value.
* Pow rejects when the statistic strictly exceeds an empirical threshold
  taken from the matched null design: with k = floor(alpha * reps), the
  threshold is the (reps - k)-th order statistic of the null statistic
  vector.  On the null vector itself this rejects exactly k of reps
  replications, so a null design's Pow equals k/reps by construction, and
  the rejection indicators are invariant under strictly increasing
  transforms of the statistic.  The interpolated type-7 quantile (exposed
  as null_quantile) has neither exactness property and is not used for the
  indicators.

Reproducibility contract: replications are produced in fixed-size chunks,
and chunk c of a cell draws from the stream path (table, index, hypothesis,
n, c).  Chunk content therefore depends only on the root seed and the cell
coordinates, never on the worker schedule, and rates are reduced from
integer rejection counts, so any thread count yields identical output.

The bootstrap test has no scalar statistic (its threshold is resampled per
replication), so its Pow is defined as PowA; the signed-rank rows of the
reported tables follow the same convention.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from . import _kernels
from .designs import DesignId, RandomStream, design_params, sample_design_matrix

__all__ = [
    "CHUNK",
    "PowerEstimate",
    "StudyPlan",
    "TableReport",
    "TableRow",
    "default_a_grid",
    "default_mu_grid",
    "estimate_power",
    "null_quantile",
    "pow_indicators",
    "render_table",
    "reproduce_table",
    "statistic_sample",
    "table_grid",
    "toy_power_curve",
    "toy_three_obs_powers",
]

CHUNK = 4096

# Tests, sample sizes and design families of each reported table, in the
# row/column order of the reports.
_TABLE_TESTS = {"1": ("To", "TN", "TB"), "2": ("W", "To", "TN"), "3": ("W", "To", "T1", "TN")}
_TABLE_NS = {"1": (150, 200, 250, 300, 350), "2": (25, 50, 75), "3": (50, 150)}
_TABLE_INDICES = {"1": (1, 2, 3, 4), "2": (1, 2), "3": (1, 2, 3, 4)}


def table_grid(table: str) -> dict:
    """Tests, sample sizes and design indices of one reported table."""
    table = str(table)
    if table not in _TABLE_TESTS:
        raise ValueError(f"no such table: {table!r} (expected 1, 2 or 3)")
    return {
        "tests": _TABLE_TESTS[table],
        "ns": _TABLE_NS[table],
        "indices": _TABLE_INDICES[table],
    }


@dataclass(frozen=True)
class PowerEstimate:
    """Monte Carlo rejection rates of one (test, design, n) cell."""

    powa: float
    pow: float
    reps: int
    degenerate_count: int
    mc_se_powa: float
    mc_se_pow: float
    null_quantile_used: float

    def __post_init__(self):
        if not 0.0 <= self.powa <= 1.0 or not 0.0 <= self.pow <= 1.0:
            raise ValueError("rates must lie in [0, 1]")
        if not 0 <= self.degenerate_count <= self.reps:
            raise ValueError("degenerate_count must lie in [0, reps]")


@dataclass(frozen=True)
class StudyPlan:
    """One power study: a test, a matched design pair, and sample sizes.

    design_null must be the hypothesis-0 member of the pair; design_alt may
    equal design_null, in which case the study measures size rather than
    power and the empirical-threshold rate is k/reps exactly.
    """

    test: str
    design_null: DesignId
    design_alt: DesignId
    ns: tuple
    reps: int
    root_seed: int
    alpha: float = 0.05
    moment_variant: str = "quartic"
    bootstrap_b: int = 1000

    def __post_init__(self):
        if self.design_null.table not in _TABLE_TESTS:
            raise ValueError("plans cover the scalar table designs only")
        if self.test not in _TABLE_TESTS[self.design_null.table]:
            raise ValueError(
                f"test {self.test!r} is not part of table {self.design_null.table}"
            )
        if self.design_null.hypothesis != 0:
            raise ValueError("design_null must have hypothesis 0")
        if (self.design_alt.table, self.design_alt.index) != (
            self.design_null.table,
            self.design_null.index,
        ):
            raise ValueError("design pair must share table and index")
        ns = tuple(int(n) for n in self.ns)
        if not ns or any(n < 10 for n in ns):
            raise ValueError("sample sizes must be >= 10")
        object.__setattr__(self, "ns", ns)
        if self.reps < 1000:
            raise ValueError("reps must be >= 1000 for reportable output")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie strictly between 0 and 1")
        if int(math.floor(self.alpha * self.reps + 1e-9)) < 1:
            raise ValueError("alpha * reps must be at least 1")
        if self.moment_variant not in ("quartic", "quadratic"):
            raise ValueError("moment_variant must be 'quartic' or 'quadratic'")
        if self.bootstrap_b < 100:
            raise ValueError("bootstrap_b must be >= 100")
        if self.root_seed < 0:
            raise ValueError("root_seed must be non-negative")


# ---------------------------------------------------------------------------
# Cell simulation.


@dataclass(frozen=True)
class _CellSpec:
    design: DesignId
    n: int
    tests: tuple


class _CellOut:
    """Mutable per-cell accumulator: statistic vector, degeneracy mask, and
    (bootstrap only) decision vector."""

    __slots__ = ("stats", "degen", "reject")

    def __init__(self, reps, with_stats, with_reject):
        self.stats = np.empty(reps, dtype=float) if with_stats else None
        self.degen = np.zeros(reps, dtype=bool)
        self.reject = np.zeros(reps, dtype=bool) if with_reject else None


def _chunks(reps):
    return [
        (c, c * CHUNK, min((c + 1) * CHUNK, reps))
        for c in range((reps + CHUNK - 1) // CHUNK)
    ]


def _chunk_statistics(spec, rows, chunk_idx, root_seed, variant, alpha, bootstrap_b):
    """All requested statistics for one chunk of one cell.

    Returns {test: (stats | None, degen, reject | None)} for rows
    replications drawn from the chunk's own stream path.
    """
    did = spec.design
    stream = RandomStream(
        root_seed, (did.table, did.index, did.hypothesis, spec.n, chunk_idx)
    )
    x = sample_design_matrix(did, rows, spec.n, stream)
    out = {}
    if did.table == "1":
        # Known-sigma mean tests; sigma comes from the matched null design
        # (the alternatives are pure location shifts of it).
        sigma = design_params(DesignId(did.table, 0, did.index)).sigma
        for t in spec.tests:
            if t == "To":
                out[t] = (_kernels.mean_to(x, sigma), np.zeros(rows, dtype=bool), None)
            elif t == "TN":
                stats, degen = _kernels.mean_tn(x, sigma, variant)
                out[t] = (stats, degen, None)
            else:
                degen = np.ptp(x, axis=1) <= 0.0
                bgen = stream.child(1).generator()
                reject, _ = _kernels.bootstrap_mean_reject(x, sigma, alpha, bootstrap_b, bgen)
                out[t] = (None, degen, reject & ~degen)
    else:
        pieces = None
        if any(t != "W" for t in spec.tests):
            pieces = _kernels.median_pieces(x)
        for t in spec.tests:
            if t == "W":
                z = _kernels.wilcoxon_z(x)
                degen = ~np.isfinite(z)
                out[t] = (np.where(degen, -np.inf, z), degen, None)
            elif t == "To":
                stats, degen = (
                    _kernels.median_to(pieces)
                    if did.table == "2"
                    else _kernels.sym_to(pieces)
                )
                out[t] = (stats, degen, None)
            elif t == "T1":
                stats, degen = _kernels.sym_t1(pieces)
                out[t] = (stats, degen, None)
            else:
                stats, degen = (
                    _kernels.median_tn(pieces)
                    if did.table == "2"
                    else _kernels.sym_tn(pieces)
                )
                out[t] = (stats, degen, None)
    return out


def _run_cells(cell_specs, reps, root_seed, variant, alpha, bootstrap_b, threads):
    """Simulate every cell; returns {key: {test: _CellOut}}.

    Work is split into (cell, chunk) tasks whose content is fixed by the
    stream path, then slotted into preallocated arrays by replication index,
    so the thread count cannot change the result.
    """
    store = {
        key: {
            t: _CellOut(reps, with_stats=(t != "TB"), with_reject=(t == "TB"))
            for t in spec.tests
        }
        for key, spec in cell_specs.items()
    }
    tasks = [
        (key, c, lo, hi) for key in cell_specs for (c, lo, hi) in _chunks(reps)
    ]

    def work(task):
        key, c, lo, hi = task
        out = _chunk_statistics(
            cell_specs[key], hi - lo, c, root_seed, variant, alpha, bootstrap_b
        )
        return key, lo, hi, out

    def slot(key, lo, hi, out):
        for t, (stats, degen, reject) in out.items():
            cell = store[key][t]
            if stats is not None:
                cell.stats[lo:hi] = stats
            cell.degen[lo:hi] = degen
            if reject is not None:
                cell.reject[lo:hi] = reject

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for key, lo, hi, out in pool.map(work, tasks):
                slot(key, lo, hi, out)
    else:
        for task in tasks:
            slot(*work(task))
    return store


# ---------------------------------------------------------------------------
# Estimates.


def _rejection_rank_threshold(null_stats, alpha):
    """The (reps - k)-th order statistic of the null vector, k = floor(alpha reps).

    Strictly exceeding it selects exactly the k highest null replications
    (ties aside), which pins the null rejection rate at k/reps.
    """
    reps = null_stats.size
    k = int(math.floor(alpha * reps + 1e-9))
    if k < 1:
        raise ValueError("alpha * reps is below one rejection rank")
    if not np.any(np.isfinite(null_stats)):
        raise RuntimeError("all matched-null replications are degenerate")
    return float(np.partition(null_stats, reps - k - 1)[reps - k - 1])


def pow_indicators(stats, null_stats, alpha):
    """Empirical-threshold rejection indicator vector.

    Applying the same strictly increasing transform to both vectors leaves
    the indicators unchanged, because only ranks enter the threshold.
    """
    stats = np.asarray(stats, dtype=float)
    thr = _rejection_rank_threshold(np.asarray(null_stats, dtype=float), alpha)
    return stats > thr


def _mc_se(p, reps):
    return math.sqrt(p * (1.0 - p) / reps)


def _finish(powa_count, pow_count, reps, degen_count, threshold):
    powa = powa_count / reps
    pw = pow_count / reps
    return PowerEstimate(
        powa=powa,
        pow=pw,
        reps=reps,
        degenerate_count=degen_count,
        mc_se_powa=_mc_se(powa, reps),
        mc_se_pow=_mc_se(pw, reps),
        null_quantile_used=threshold,
    )


def _check_not_all_degenerate(cell):
    if cell.degen.all():
        raise RuntimeError("all replications are degenerate")


def _estimate_quantile(cell, null_cell, alpha):
    _check_not_all_degenerate(cell)
    z = norm.ppf(1.0 - alpha)
    thr = _rejection_rank_threshold(null_cell.stats, alpha)
    powa_count = int(np.count_nonzero(cell.stats > z))
    pow_count = int(np.count_nonzero(cell.stats > thr))
    return _finish(powa_count, pow_count, cell.stats.size, int(cell.degen.sum()), thr)


def _estimate_asymptotic(cell, alpha):
    _check_not_all_degenerate(cell)
    z = norm.ppf(1.0 - alpha)
    count = int(np.count_nonzero(cell.stats > z))
    return _finish(count, count, cell.stats.size, int(cell.degen.sum()), math.nan)


def _estimate_decision(cell):
    _check_not_all_degenerate(cell)
    count = int(np.count_nonzero(cell.reject))
    return _finish(count, count, cell.degen.size, int(cell.degen.sum()), math.nan)


def estimate_power(plan: StudyPlan, threads: int = 1) -> dict:
    """PowerEstimate of plan.design_alt per sample size, keyed by n.

    Pow thresholds come from replications of plan.design_null drawn on the
    null design's own stream paths, so they are independent of the evaluated
    replications whenever the pair differs; when the pair coincides, the
    evaluated vector is its own threshold source and Pow is exact.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    same = plan.design_alt == plan.design_null
    cells = {}
    for n in plan.ns:
        cells[(0, n)] = _CellSpec(plan.design_null, n, (plan.test,))
        if not same:
            cells[(1, n)] = _CellSpec(plan.design_alt, n, (plan.test,))
    store = _run_cells(
        cells, plan.reps, plan.root_seed, plan.moment_variant, plan.alpha,
        plan.bootstrap_b, threads,
    )
    out = {}
    for n in plan.ns:
        null_cell = store[(0, n)][plan.test]
        eval_cell = null_cell if same else store[(1, n)][plan.test]
        if plan.test == "TB":
            out[n] = _estimate_decision(eval_cell)
        else:
            out[n] = _estimate_quantile(eval_cell, null_cell, plan.alpha)
    return out


def statistic_sample(
    test: str,
    design: DesignId,
    n: int,
    reps: int,
    root_seed: int,
    moment_variant: str = "quartic",
):
    """Raw statistic vector and degeneracy mask for one cell.

    Replications are drawn exactly as the table engine draws them (same
    stream paths), which makes this the hook for cross-checking the batched
    kernels against the per-sample reference tests and for transform
    invariance checks.  The bootstrap test has no scalar statistic.
    """
    if design.table not in _TABLE_TESTS:
        raise ValueError("scalar table designs only")
    if test == "TB":
        raise ValueError("the bootstrap decision has no scalar statistic")
    if test not in _TABLE_TESTS[design.table]:
        raise ValueError(f"test {test!r} is not part of table {design.table}")
    if reps < 1 or n < 10:
        raise ValueError("need reps >= 1 and n >= 10")
    spec = _CellSpec(design, int(n), (test,))
    store = _run_cells({0: spec}, int(reps), root_seed, moment_variant, 0.05, 1000, 1)
    cell = store[0][test]
    return cell.stats.copy(), cell.degen.copy()


def null_quantile(
    test: str, null_design: DesignId, n: int, reps: int, alpha: float, seed: int
) -> float:
    """Type-7 empirical (1 - alpha) quantile of the null statistic.

    Degenerate replications contribute -inf, so they can only lower the
    quantile, never raise it.  This interpolated value is reported for
    reference; the rejection engine uses the rank threshold instead.
    """
    if null_design.hypothesis != 0:
        raise ValueError("null_quantile needs a hypothesis-0 design")
    if reps < 1000:
        raise ValueError("reps must be >= 1000")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    stats, degen = statistic_sample(test, null_design, n, reps, seed)
    if degen.all():
        raise RuntimeError("all replications are degenerate")
    return float(np.quantile(stats, 1.0 - alpha))


# ---------------------------------------------------------------------------
# Table reports.


@dataclass(frozen=True)
class TableRow:
    design: DesignId
    test: str
    estimates: tuple  # ((n, PowerEstimate), ...) in column order


@dataclass(frozen=True)
class TableReport:
    table: str
    reps: int
    root_seed: int
    alpha: float
    moment_variant: str
    bootstrap_b: int
    ns: tuple
    rows: tuple

    def cell(self, design_label: str, test: str, n: int) -> PowerEstimate:
        for row in self.rows:
            if row.design.label == design_label and row.test == test:
                for nn, est in row.estimates:
                    if nn == n:
                        return est
        raise KeyError((design_label, test, n))


def reproduce_table(
    table,
    reps: int,
    seed: int,
    moment_variant: str = "quartic",
    alpha: float = 0.05,
    bootstrap_b: int = 1000,
    threads: int = 1,
) -> TableReport:
    """Full PowA/Pow grid of one reported table.

    Row order is design-family major, null before alternative, tests in the
    table's column order.  Signed-rank and bootstrap rows report Pow = PowA
    (neither has a usable scalar null quantile: the bootstrap threshold is
    per-replication, and the table convention treats the signed-rank test
    the same way).  Each family's single null statistic vector provides both
    the null row's evaluations and every row's empirical thresholds, which
    keeps null-row Pow exact and alternative-row thresholds independent.
    """
    grid = table_grid(table)
    table = str(table)
    if reps < 1000:
        raise ValueError("reps must be >= 1000")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    if int(math.floor(alpha * reps + 1e-9)) < 1:
        raise ValueError("alpha * reps must be at least 1")
    if moment_variant not in ("quartic", "quadratic"):
        raise ValueError("moment_variant must be 'quartic' or 'quadratic'")
    if bootstrap_b < 100:
        raise ValueError("bootstrap_b must be >= 100")
    if threads < 1:
        raise ValueError("threads must be >= 1")

    cells = {}
    for m in grid["indices"]:
        for hyp in (0, 1):
            for n in grid["ns"]:
                cells[(m, hyp, n)] = _CellSpec(DesignId(table, hyp, m), n, grid["tests"])
    store = _run_cells(cells, reps, seed, moment_variant, alpha, bootstrap_b, threads)

    rows = []
    for m in grid["indices"]:
        for hyp in (0, 1):
            did = DesignId(table, hyp, m)
            for t in grid["tests"]:
                ests = []
                for n in grid["ns"]:
                    cell = store[(m, hyp, n)][t]
                    if t == "TB":
                        est = _estimate_decision(cell)
                    elif t == "W":
                        est = _estimate_asymptotic(cell, alpha)
                    else:
                        est = _estimate_quantile(cell, store[(m, 0, n)][t], alpha)
                    ests.append((n, est))
                rows.append(TableRow(design=did, test=t, estimates=tuple(ests)))
    return TableReport(
        table=table,
        reps=reps,
        root_seed=seed,
        alpha=alpha,
        moment_variant=moment_variant,
        bootstrap_b=bootstrap_b,
        ns=tuple(grid["ns"]),
        rows=tuple(rows),
    )


def render_table(report: TableReport, fmt: str = "csv") -> str:
    """Stable text rendering: Design, Test, then PowA/Pow per sample size,
    three decimals."""
    header = ["design", "test"]
    for n in report.ns:
        header += [f"powa_n{n}", f"pow_n{n}"]
    body = []
    for row in report.rows:
        cells = [row.design.label, row.test]
        for _, est in row.estimates:
            cells += [f"{est.powa:.3f}", f"{est.pow:.3f}"]
        body.append(cells)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(body)
        return buf.getvalue()
    if fmt == "markdown":
        lines = [
            "| " + " | ".join(header) + " |",
            "| " + " | ".join("---" for _ in header) + " |",
        ]
        lines += ["| " + " | ".join(cells) + " |" for cells in body]
        return "\n".join(lines) + "\n"
    raise ValueError("format must be 'csv' or 'markdown'")


# ---------------------------------------------------------------------------
# Closed-form toy power curves (no simulation).


def default_a_grid():
    """Mixing-weight grid for the two-observation curve, step 0.01."""
    return np.linspace(-0.01, 0.90, 92)


def default_mu_grid():
    """Mean grid for the three-observation curves."""
    return np.linspace(0.0, 5.0, 101)


def toy_power_curve(a_grid, mu1=5.0, sigma1=1.0, sigma2=4.0, alpha=0.05):
    """Power gain of T + a(X1 - X2) over T for two heteroscedastic normals.

    T is the plain two-observation mean; adding a(X1 - X2) keeps the mean
    (the coefficients still sum to 1) and changes only the variance, so the
    exact-size normal test has closed-form power.  Columns: a, P(a) - P(0),
    and the covariance of T with the added ancillary difference, whose root
    marks the maximal-power weight.
    """
    if sigma1 <= 0 or sigma2 <= 0:
        raise ValueError("standard deviations must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    a = np.asarray(a_grid, dtype=float)
    v1, v2 = sigma1**2, sigma2**2
    z = norm.ppf(1.0 - alpha)
    sd = np.sqrt((0.5 + a) ** 2 * v1 + (0.5 - a) ** 2 * v2)
    sd0 = math.sqrt(0.25 * (v1 + v2))
    power = norm.sf(z - mu1 / sd)
    p0 = norm.sf(z - mu1 / sd0)
    cov = 0.5 * (v1 - v2) + a * (v1 + v2)
    return np.column_stack([a, power - p0, cov])


def toy_three_obs_powers(mu_grid, sigma1=1.0, sigma2=4.0, sigma3=3.0, alpha=0.05):
    """Closed-form powers of three unit-coefficient-sum mean statistics.

    Columns: mu, then the powers of the plain mean, of the mean decorrelated
    from X1 - X2, and of the precision-weighted mean.  All three statistics
    are normal with mean mu and known variance, so power is a normal tail
    probability and the variance ordering gives the pointwise power ordering
    weighted >= decorrelated >= plain.
    """
    for s in (sigma1, sigma2, sigma3):
        if s <= 0:
            raise ValueError("standard deviations must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    mu = np.asarray(mu_grid, dtype=float)
    v1, v2, v3 = sigma1**2, sigma2**2, sigma3**2
    z = norm.ppf(1.0 - alpha)
    sd_plain = math.sqrt((v1 + v2 + v3) / 9.0)
    gamma = (v2 - v1) / (3.0 * (v1 + v2))
    sd_decor = math.sqrt(
        (1.0 / 3.0 + gamma) ** 2 * v1 + (1.0 / 3.0 - gamma) ** 2 * v2 + v3 / 9.0
    )
    sd_weighted = math.sqrt(1.0 / (1.0 / v1 + 1.0 / v2 + 1.0 / v3))

    def p(sd):
        return norm.sf(z - mu / sd)

    return np.column_stack([mu, p(sd_plain), p(sd_decor), p(sd_weighted)])
