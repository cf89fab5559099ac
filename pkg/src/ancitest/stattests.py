"""Location tests: the known-sigma mean test and its skewness-corrected
modification, median tests built on a kernel density estimate, tests for a
center of symmetry, the signed-rank baseline, a bootstrap mean test, and a
variance-stabilizing monotone transform.

All rejection rules use strict inequality at the threshold.  Statistics that
are undefined for a particular sample raise DegenerateStatistic with a named
reason; simulation callers score such replications as non-rejections.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2, norm, rankdata

from .designs import RandomStream
from .empirical import bandwidth_nrd0, kde_at, sample_median, sample_moments

__all__ = [
    "DegenerateStatistic",
    "TestOutcome",
    "ONE_SIDED_UPPER",
    "TWO_SIDED_CHI2",
    "bootstrap_t_test",
    "median_test_To",
    "median_test_TN",
    "modified_mean_test",
    "symmetry_test",
    "t_test_known_sigma",
    "thomas_transform",
    "two_sided",
    "wilcoxon_signed_rank",
]

ONE_SIDED_UPPER = "one_sided_upper"
TWO_SIDED_CHI2 = "two_sided_chi2"


class DegenerateStatistic(ArithmeticError):
    """The statistic is undefined for this sample.

    The reason attribute names the failed condition so that simulation
    drivers can tally degeneracy modes separately.
    """

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class TestOutcome:
    statistic: float
    threshold: float
    side: str
    reject: bool
    p_value: float
    components: dict = field(default_factory=dict)


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")


def _one_sided_outcome(stat, alpha, components):
    z = float(norm.isf(alpha))
    return TestOutcome(
        statistic=float(stat),
        threshold=z,
        side=ONE_SIDED_UPPER,
        reject=bool(stat > z),
        p_value=float(norm.sf(stat)),
        components=components,
    )


def _clean(x, min_n):
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("sample must be one-dimensional")
    if arr.size < min_n:
        raise ValueError(f"test requires at least {min_n} observations")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample contains non-finite values")
    return arr


def t_test_known_sigma(x, sigma: float, alpha: float = 0.05) -> TestOutcome:
    """Upper-tail mean test sqrt(n) * mean / sigma against the normal quantile."""
    arr = _clean(x, 2)
    _check_alpha(alpha)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    stat = math.sqrt(arr.size) * float(np.mean(arr)) / sigma
    return _one_sided_outcome(stat, alpha, {})


def modified_mean_test(x, sigma: float, alpha: float = 0.05, variant: str = "quartic") -> TestOutcome:
    """Skewness-corrected mean test with known sigma.

    The third sample moment drives a correction that subtracts the scaled
    covariate S^2 - sigma^2 from the base statistic; the result is
    standardized by the estimated variance of the corrected statistic.  On
    exactly symmetric samples (zero third moment) this reduces to
    t_test_known_sigma.  The moment variant selects the centering constant of
    the squared-deviation variance estimators, see sample_moments.
    """
    arr = _clean(x, 3)
    _check_alpha(alpha)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    n = arr.size
    m_known = sample_moments(arr, sigma_known=sigma, variant=variant)
    m_self = sample_moments(arr, variant=variant)
    s2, mu3 = m_known.s2, m_known.mu3_hat
    if s2 <= 0:
        raise DegenerateStatistic("constant sample")
    if m_known.var_sq_hat <= 0:
        raise DegenerateStatistic("zero squared-deviation variance (known sigma)")
    if m_self.var_sq_hat <= 0:
        raise DegenerateStatistic("zero squared-deviation variance")
    delta_hat = 1.0 - mu3**2 / (s2 * m_self.var_sq_hat)
    if delta_hat <= 0:
        raise DegenerateStatistic("nonpositive standardizer")
    to = math.sqrt(n) * m_known.mean / sigma
    correction = mu3 * math.sqrt(n) * (s2 - sigma**2) / (sigma * m_known.var_sq_hat)
    stat = (to - correction) / math.sqrt(delta_hat)
    return _one_sided_outcome(
        stat,
        alpha,
        {
            "to": to,
            "mu3_hat": mu3,
            "s2": s2,
            "delta_hat": delta_hat,
            "correction": correction,
        },
    )


def bootstrap_t_test(
    x,
    sigma: float,
    alpha: float = 0.05,
    n_boot: int = 1000,
    stream: RandomStream | None = None,
) -> TestOutcome:
    """Centered bootstrap version of the known-sigma mean test.

    Draws n_boot resamples with replacement, forms the centered statistics
    T*_b = sqrt(n) (mean*_b - mean) / sigma, and rejects when the observed
    statistic exceeds their empirical (1 - alpha) quantile.  The p-value is
    the fraction of T*_b at or above the observed statistic.
    """
    arr = _clean(x, 2)
    _check_alpha(alpha)
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if n_boot < 100:
        raise ValueError("n_boot must be at least 100")
    if stream is None:
        raise ValueError("a RandomStream is required for resampling")
    n = arr.size
    gen = stream.generator()
    xbar = float(np.mean(arr))
    to = math.sqrt(n) * xbar / sigma
    idx = gen.integers(0, n, size=(n_boot, n))
    tstar = math.sqrt(n) * (arr[idx].mean(axis=1) - xbar) / sigma
    q = float(np.quantile(tstar, 1.0 - alpha))
    return TestOutcome(
        statistic=to,
        threshold=q,
        side=ONE_SIDED_UPPER,
        reject=bool(to > q),
        p_value=float(np.mean(tstar >= to)),
        components={"bootstrap_quantile": q, "n_boot": n_boot},
    )


def _median_pieces_scalar(arr):
    med = sample_median(arr)
    try:
        h = bandwidth_nrd0(arr)
    except ValueError as exc:
        raise DegenerateStatistic("constant sample") from exc
    fhat = kde_at(arr, med, h)
    s2 = float(np.var(arr, ddof=1))
    w = float(np.mean(np.abs(arr - med)))
    mean = float(np.mean(arr))
    return med, fhat, math.sqrt(s2), w, mean


def median_test_To(x, alpha: float = 0.05) -> TestOutcome:
    """Upper-tail median test 2 sqrt(n) median fhat(median)."""
    arr = _clean(x, 4)
    _check_alpha(alpha)
    med, fhat, s, w, mean = _median_pieces_scalar(arr)
    stat = 2.0 * math.sqrt(arr.size) * med * fhat
    return _one_sided_outcome(stat, alpha, {"fhat_median": fhat})


def median_test_TN(x, alpha: float = 0.05) -> TestOutcome:
    """Median test decorrelated from the studentized mean.

    Scales the base median statistic by S / w_hat, subtracts the studentized
    mean, and standardizes by sqrt(S^2 / w_hat^2 - 1).
    """
    arr = _clean(x, 4)
    _check_alpha(alpha)
    med, fhat, s, w, mean = _median_pieces_scalar(arr)
    n = arr.size
    if w <= 0:
        raise DegenerateStatistic("zero mean absolute deviation")
    if s * s <= w * w:
        raise DegenerateStatistic("variance not above squared mean deviation")
    to = 2.0 * math.sqrt(n) * med * fhat
    stat = (to * s / w - math.sqrt(n) * mean / s) / math.sqrt(s * s / (w * w) - 1.0)
    return _one_sided_outcome(
        stat,
        alpha,
        {"fhat_median": fhat, "s": s, "w_hat": w, "ancillary_term": math.sqrt(n) * mean / s},
    )


def symmetry_test(x, which: str = "TN", alpha: float = 0.05) -> TestOutcome:
    """Upper-tail tests for a positive center of symmetry.

    which selects the statistic: "To" is the studentized mean
    sqrt(n) mean / S, "T1" is the median statistic 2 sqrt(n) median
    fhat(median), and "TN" combines them through the mean-median contrast:

        TN = { To + delta sqrt(n) (mean - median) / sqrt(D) } / sqrt(V)

    with D = S^2 - w/fhat + 1/(4 fhat^2), delta = (w/(2 S fhat) - S)/sqrt(D)
    and V = 1 - delta^2 (the expanded forms of V reduce to this).
    """
    arr = _clean(x, 4)
    _check_alpha(alpha)
    if which not in ("To", "T1", "TN"):
        raise ValueError("which must be one of 'To', 'T1', 'TN'")
    med, fhat, s, w, mean = _median_pieces_scalar(arr)
    n = arr.size
    if which == "To":
        if s <= 0:
            raise DegenerateStatistic("constant sample")
        return _one_sided_outcome(math.sqrt(n) * mean / s, alpha, {"s": s})
    if which == "T1":
        stat = 2.0 * math.sqrt(n) * med * fhat
        return _one_sided_outcome(stat, alpha, {"fhat_median": fhat})
    if s <= 0:
        raise DegenerateStatistic("constant sample")
    dhat = s * s - w / fhat + 1.0 / (4.0 * fhat * fhat)
    if dhat <= 0:
        raise DegenerateStatistic("nonpositive dispersion gap")
    delta = (w / (2.0 * s * fhat) - s) / math.sqrt(dhat)
    v = 1.0 - delta * delta
    if v <= 0:
        raise DegenerateStatistic("nonpositive variance factor")
    to = math.sqrt(n) * mean / s
    stat = (to + delta * math.sqrt(n) * (mean - med) / math.sqrt(dhat)) / math.sqrt(v)
    return _one_sided_outcome(
        stat,
        alpha,
        {"d_hat": dhat, "delta": delta, "v": v, "fhat_median": fhat, "to": to},
    )


def two_sided(outcome: TestOutcome, alpha: float = 0.05) -> TestOutcome:
    """Square a normal-referenced one-sided outcome into a chi-square rule."""
    _check_alpha(alpha)
    if outcome.side != ONE_SIDED_UPPER:
        raise ValueError("two_sided requires a one-sided normal-referenced outcome")
    stat = outcome.statistic**2
    threshold = float(chi2.isf(alpha, df=1))
    components = dict(outcome.components)
    components["signed_statistic"] = outcome.statistic
    return TestOutcome(
        statistic=float(stat),
        threshold=threshold,
        side=TWO_SIDED_CHI2,
        reject=bool(stat > threshold),
        p_value=float(chi2.sf(stat, df=1)),
        components=components,
    )


def wilcoxon_signed_rank(x, side: str = ONE_SIDED_UPPER, alpha: float = 0.05) -> TestOutcome:
    """Signed-rank test via the normal approximation.

    Exact zeros are removed; at least five nonzero observations are
    required.  Ties in the absolute values receive mid-ranks and the
    approximation variance gets the usual tie correction.  No continuity
    correction is applied.
    """
    arr = _clean(x, 1)
    _check_alpha(alpha)
    if side not in (ONE_SIDED_UPPER, "two_sided"):
        raise ValueError("side must be 'one_sided_upper' or 'two_sided'")
    nz = arr[arr != 0.0]
    if nz.size == 0:
        raise ValueError("all observations are zero")
    if nz.size < 5:
        raise ValueError("need at least 5 nonzero observations")
    n = nz.size
    absx = np.abs(nz)
    ranks = rankdata(absx)
    wplus = float(ranks[nz > 0].sum())
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, counts = np.unique(absx, return_counts=True)
    tie_corr = float(np.sum(counts.astype(float) ** 3 - counts) / 48.0)
    var -= tie_corr
    z = (wplus - mean) / math.sqrt(var)
    components = {"w_plus": wplus, "n_used": n, "tie_correction": tie_corr}
    one_sided = _one_sided_outcome(z, alpha, components)
    if side == ONE_SIDED_UPPER:
        return one_sided
    return two_sided(one_sided, alpha)


def thomas_transform(t_squared, n: int):
    """Monotone map t^2 -> -n log(1 - t^2 / n), defined on [0, n).

    Strictly increasing on its domain and tending to t^2 as n grows, so any
    rank-based thresholding of the squared statistic is unchanged by it.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    arr = np.asarray(t_squared, dtype=float)
    if np.any(arr < 0.0) or np.any(arr >= n):
        raise ValueError("t_squared must lie in [0, n)")
    out = -n * np.log1p(-arr / n)
    if np.isscalar(t_squared) or arr.ndim == 0:
        return float(out)
    return out
