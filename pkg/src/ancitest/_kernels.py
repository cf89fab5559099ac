"""Vectorized statistic kernels over replication matrices.

Every kernel maps an (R, n) matrix of samples (one replication per row) to a
length-R vector of statistic values plus, where the statistic can be
undefined, a boolean degeneracy mask.  The per-sample public tests wrap these
kernels; the Monte Carlo engine and the resampling study consume them
directly.  Rows flagged degenerate carry unusable values and must be scored
as non-rejections by callers.

The kernels assume continuous data (no ties, no exact zeros); the public
signed-rank test handles ties and zeros separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def mean_to(x: np.ndarray, sigma: float) -> np.ndarray:
    n = x.shape[1]
    return math.sqrt(n) * x.mean(axis=1) / sigma


def mean_tn(x: np.ndarray, sigma: float, variant: str = "quartic"):
    """Skewness-corrected mean statistic with known sigma.

    Returns (statistic, degenerate_mask).  The correction subtracts the
    scaled covariate S^2 - sigma^2 and standardizes by the estimated variance
    of the corrected statistic.
    """
    if variant not in ("quartic", "quadratic"):
        raise ValueError("variant must be 'quartic' or 'quadratic'")
    rows, n = x.shape
    mean = x.mean(axis=1)
    d = x - mean[:, None]
    dd = d * d
    s2 = dd.sum(axis=1) / (n - 1)
    mu3 = (dd * d).mean(axis=1)
    c_known = sigma**4 if variant == "quartic" else sigma**2
    var_known = ((dd - c_known) ** 2).mean(axis=1)
    c_s = s2**2 if variant == "quartic" else s2
    var_s = ((dd - c_s[:, None]) ** 2).mean(axis=1)
    degen = (s2 <= 0.0) | (var_known <= 0.0) | (var_s <= 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = 1.0 - mu3**2 / (s2 * var_s)
        degen |= ~np.isfinite(delta) | (delta <= 0.0)
        to = math.sqrt(n) * mean / sigma
        tn = (to - mu3 * math.sqrt(n) * (s2 - sigma**2) / (sigma * var_known)) / np.sqrt(delta)
    tn = np.where(degen, -np.inf, tn)
    return tn, degen


@dataclass(frozen=True)
class MedianPieces:
    """Shared per-row summaries for the median and symmetry statistics."""

    n: int
    mean: np.ndarray
    median: np.ndarray
    s: np.ndarray  # sqrt of the unbiased variance
    w: np.ndarray  # mean absolute deviation about the median
    fhat: np.ndarray  # Gaussian KDE at the median, rule-of-thumb bandwidth
    degenerate: np.ndarray  # rows with no usable scale


def median_pieces(x: np.ndarray) -> MedianPieces:
    rows, n = x.shape
    mean = x.mean(axis=1)
    med = np.median(x, axis=1)
    sd = x.std(axis=1, ddof=1)
    q1, q3 = np.quantile(x, [0.25, 0.75], axis=1)
    iqr = q3 - q1
    spread = np.where(iqr > 0.0, np.minimum(sd, iqr / 1.34), sd)
    degen = spread <= 0.0
    h = 0.9 * np.where(degen, 1.0, spread) * n ** (-0.2)
    u = (med[:, None] - x) / h[:, None]
    fhat = np.exp(-0.5 * u * u).mean(axis=1) / (h * _SQRT_2PI)
    w = np.abs(x - med[:, None]).mean(axis=1)
    return MedianPieces(n=n, mean=mean, median=med, s=sd, w=w, fhat=fhat, degenerate=degen)


def median_to(p: MedianPieces):
    stat = 2.0 * math.sqrt(p.n) * p.median * p.fhat
    stat = np.where(p.degenerate, -np.inf, stat)
    return stat, p.degenerate.copy()


def median_tn(p: MedianPieces):
    """Median statistic decorrelated from the studentized mean."""
    degen = p.degenerate | (p.w <= 0.0) | (p.s**2 <= p.w**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        to = 2.0 * math.sqrt(p.n) * p.median * p.fhat
        tn = (to * p.s / p.w - math.sqrt(p.n) * p.mean / p.s) / np.sqrt(p.s**2 / p.w**2 - 1.0)
    tn = np.where(degen, -np.inf, tn)
    return tn, degen


def sym_to(p: MedianPieces):
    degen = p.s <= 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        stat = math.sqrt(p.n) * p.mean / p.s
    stat = np.where(degen, -np.inf, stat)
    return stat, degen


def sym_t1(p: MedianPieces):
    return median_to(p)


def sym_tn(p: MedianPieces):
    """Symmetry-point statistic combining the studentized mean with the
    scaled mean-median contrast.  V simplifies to 1 - delta^2; the expanded
    algebraic forms are checked against this in the tests."""
    with np.errstate(divide="ignore", invalid="ignore"):
        dhat = p.s**2 - p.w / p.fhat + 1.0 / (4.0 * p.fhat**2)
        degen_d = p.degenerate | (p.s <= 0.0) | ~np.isfinite(dhat) | (dhat <= 0.0)
        dhat_safe = np.where(degen_d, 1.0, dhat)
        delta = (p.w / (2.0 * p.s * p.fhat) - p.s) / np.sqrt(dhat_safe)
        v = 1.0 - delta * delta
        degen = degen_d | ~np.isfinite(v) | (v <= 0.0)
        to = math.sqrt(p.n) * p.mean / p.s
        tn = (to + delta * math.sqrt(p.n) * (p.mean - p.median) / np.sqrt(dhat_safe)) / np.sqrt(v)
    tn = np.where(degen, -np.inf, tn)
    return tn, degen


def wilcoxon_z(x: np.ndarray) -> np.ndarray:
    """Normal-approximation signed-rank statistic, mid-ranks, no continuity
    correction.  Assumes continuous rows (ties and zeros have measure zero)."""
    rows, n = x.shape
    ranks = rankdata(np.abs(x), axis=1)
    wplus = np.where(x > 0.0, ranks, 0.0).sum(axis=1)
    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    return (wplus - mean) / math.sqrt(var)


def bootstrap_mean_reject(
    x: np.ndarray,
    sigma: float,
    alpha: float,
    n_boot: int,
    gen: np.random.Generator,
    max_elems: int = 1 << 22,
):
    """Centered bootstrap-t with known sigma, one decision per row.

    For each row, draws n_boot resamples with replacement, forms
    T*_b = sqrt(n) (mean*_b - mean) / sigma, and rejects when the observed
    statistic exceeds the empirical (1 - alpha) quantile of the T*_b.
    Returns (reject, p_value) arrays.  Resampling indices are drawn in fixed
    row-block order, so results depend only on (x, gen state).
    """
    rows, n = x.shape
    xbar = x.mean(axis=1)
    to = math.sqrt(n) * xbar / sigma
    reject = np.empty(rows, dtype=bool)
    pval = np.empty(rows, dtype=float)
    block = max(1, max_elems // (n_boot * n))
    for lo in range(0, rows, block):
        hi = min(lo + block, rows)
        idx = gen.integers(0, n, size=(hi - lo, n_boot, n))
        resampled = x[lo:hi][np.arange(hi - lo)[:, None, None], idx]
        tstar = math.sqrt(n) * (resampled.mean(axis=2) - xbar[lo:hi, None]) / sigma
        q = np.quantile(tstar, 1.0 - alpha, axis=1)
        reject[lo:hi] = to[lo:hi] > q
        pval[lo:hi] = (tstar >= to[lo:hi, None]).mean(axis=1)
    return reject, pval
