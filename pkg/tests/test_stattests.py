"""Scalar test statistics: hand-worked oracles, algebraic identities, and
agreement between the scalar implementations and the batched kernels.

The batched kernels in _kernels are the simulation engine's fast path; every
statistic they produce must match the scalar definitions row by row, so the
two routes are never collapsed here.
"""

import math

import numpy as np
import pytest
from scipy import stats as sps

from ancitest import (
    DegenerateStatistic,
    RandomStream,
    bootstrap_t_test,
    kde_at,
    median_test_TN,
    median_test_To,
    modified_mean_test,
    sample_median,
    sample_moments,
    symmetry_test,
    t_test_known_sigma,
    thomas_transform,
    two_sided,
    wilcoxon_signed_rank,
)
from ancitest import _kernels as ker
from ancitest.empirical import bandwidth_nrd0

Z95 = sps.norm.isf(0.05)


def test_t_test_known_sigma_oracle():
    x = np.array([0.0, 0.0, 0.0, 4.0])
    out = t_test_known_sigma(x, sigma=1.0)
    assert out.statistic == pytest.approx(2.0, abs=1e-14)
    assert out.threshold == pytest.approx(Z95, abs=1e-12)
    assert out.reject is True
    assert out.p_value == pytest.approx(sps.norm.sf(2.0), rel=1e-12)
    with pytest.raises(ValueError):
        t_test_known_sigma(np.array([1.0]), sigma=1.0)
    with pytest.raises(ValueError):
        t_test_known_sigma(x, sigma=0.0)


def test_modified_mean_test_hand_oracle_both_variants():
    # x = {0, 0, 0, 4}, sigma = 1: mean 1, S^2 = 4, mu3_hat = 6, To = 2.
    # Quartic centering (sigma^4 and S^4):
    #   var_known = 16, correction = 6*2*3/16 = 2.25,
    #   var_s = 181, delta = 1 - 36/(4*181) = 172/181,
    #   TN = (2 - 2.25) / sqrt(172/181).
    x = np.array([0.0, 0.0, 0.0, 4.0])
    out = modified_mean_test(x, sigma=1.0)
    want = -0.25 / math.sqrt(172.0 / 181.0)
    assert out.statistic == pytest.approx(want, rel=1e-12)
    assert out.components["to"] == pytest.approx(2.0, abs=1e-14)
    assert out.components["mu3_hat"] == pytest.approx(6.0, rel=1e-13)
    assert out.components["delta_hat"] == pytest.approx(172.0 / 181.0, rel=1e-12)
    assert out.components["correction"] == pytest.approx(2.25, rel=1e-13)
    assert out.reject is False

    # Corrected centering (sigma^2 and S^2): var_s = 13, delta = 4/13,
    #   TN = (2 - 2.25) / sqrt(4/13) = -0.25 sqrt(13) / 2.
    out_c = modified_mean_test(x, sigma=1.0, variant="quadratic")
    assert out_c.statistic == pytest.approx(-0.25 * math.sqrt(13.0) / 2.0, rel=1e-12)
    assert out_c.components["delta_hat"] == pytest.approx(4.0 / 13.0, rel=1e-12)


def test_modified_mean_test_pseudo_observation_route():
    # The statistic can also be built from the decorrelated pseudo
    # observations Y_i = (X_i - mu3_hat (n (X_i - mean)^2/(n-1) - sigma^2)
    # / var_known) / sqrt(delta): TN = sqrt(n) mean(Y) / sigma.
    gen = np.random.default_rng(42)
    for _ in range(25):
        n = int(gen.integers(5, 40))
        x = gen.gamma(2.0, 1.5, size=n) - 3.0
        sigma = float(gen.uniform(0.5, 2.0))
        try:
            out = modified_mean_test(x, sigma=sigma)
        except DegenerateStatistic:
            continue
        m = sample_moments(x, sigma_known=sigma)
        mk = sample_moments(x, sigma_known=sigma)
        d = x - x.mean()
        y = x - m.mu3_hat * (d**2 * n / (n - 1.0) - sigma**2) / mk.var_sq_hat
        tn_y = math.sqrt(n) * y.mean() / sigma / math.sqrt(out.components["delta_hat"])
        assert out.statistic == pytest.approx(tn_y, rel=1e-11)


def test_modified_mean_test_reduces_to_t_test_when_mu3_zero():
    x = np.array([-2.0, -1.0, 1.0, 2.0])
    out = modified_mean_test(x, sigma=1.3)
    plain = t_test_known_sigma(x, sigma=1.3)
    assert out.statistic == pytest.approx(plain.statistic, abs=1e-12)
    assert out.components["correction"] == pytest.approx(0.0, abs=1e-13)


def test_modified_mean_test_degenerate_square_lattice():
    # Two-point sample symmetric in the squares: squared deviations are
    # constant, so the quartic centering has zero fourth-moment spread.
    x = np.array([-0.75, -0.75, 0.75, 0.75])
    with pytest.raises(DegenerateStatistic) as exc:
        modified_mean_test(x, sigma=1.0)
    assert "squared-deviation" in exc.value.reason
    out = modified_mean_test(x, sigma=1.0, variant="quadratic")
    assert out.statistic == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(DegenerateStatistic):
        modified_mean_test(np.array([3.0, 3.0, 3.0, 3.0]), sigma=1.0)


def test_bootstrap_t_test_contract():
    x = np.array([0.4, -0.2, 1.3, 0.8, -0.5, 0.1, 2.0, -1.1])
    a = bootstrap_t_test(x, sigma=1.0, stream=RandomStream(5, ("boot",)))
    b = bootstrap_t_test(x, sigma=1.0, stream=RandomStream(5, ("boot",)))
    assert a == b
    c = bootstrap_t_test(x, sigma=1.0, stream=RandomStream(6, ("boot",)))
    assert c.threshold != a.threshold
    assert a.statistic == pytest.approx(
        math.sqrt(8) * x.mean() / 1.0, rel=1e-13
    )
    assert a.threshold == a.components["bootstrap_quantile"]
    assert 0.0 <= a.p_value <= 1.0
    with pytest.raises(ValueError):
        bootstrap_t_test(x, sigma=1.0)
    with pytest.raises(ValueError):
        bootstrap_t_test(x, sigma=1.0, n_boot=50, stream=RandomStream(5))


def test_bootstrap_scalar_matches_batched_kernel():
    x = np.array([0.4, -0.2, 1.3, 0.8, -0.5, 0.1, 2.0, -1.1])
    out = bootstrap_t_test(x, sigma=0.9, alpha=0.05, n_boot=400, stream=RandomStream(9, ("k",)))
    rej, pval = ker.bootstrap_mean_reject(
        x[None, :], 0.9, 0.05, 400, RandomStream(9, ("k",)).generator()
    )
    assert bool(rej[0]) == out.reject
    assert pval[0] == pytest.approx(out.p_value, abs=1e-15)


def test_median_test_To_composition_oracle():
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    med = sample_median(x)
    fhat = kde_at(x, med, bandwidth_nrd0(x))
    out = median_test_To(x)
    assert out.statistic == pytest.approx(2.0 * math.sqrt(5) * med * fhat, rel=1e-12)
    assert out.components["fhat_median"] == pytest.approx(fhat, rel=1e-12)
    with pytest.raises(ValueError):
        median_test_To(np.array([1.0, 2.0, 3.0]))


def test_median_test_TN_formula_from_pieces():
    x = np.array([0.3, -1.2, 0.8, 2.4, -0.6, 1.1, 0.05])
    med = sample_median(x)
    fhat = kde_at(x, med, bandwidth_nrd0(x))
    s = math.sqrt(np.var(x, ddof=1))
    w = float(np.mean(np.abs(x - med)))
    to = 2.0 * math.sqrt(x.size) * med * fhat
    want = (to * s / w - math.sqrt(x.size) * x.mean() / s) / math.sqrt(
        s**2 / w**2 - 1.0
    )
    out = median_test_TN(x)
    assert out.statistic == pytest.approx(want, rel=1e-12)
    assert out.components["s"] == pytest.approx(s, rel=1e-12)
    assert out.components["w_hat"] == pytest.approx(w, rel=1e-12)


def test_median_test_TN_degenerate_reasons():
    # Constant samples have no usable bandwidth.  The variance-gap guard is
    # defensive only: with ddof=1, s^2 strictly exceeds w^2 for any
    # non-constant sample, so it cannot fire on real data.
    with pytest.raises(DegenerateStatistic) as exc:
        median_test_TN(np.zeros(6))
    assert exc.value.reason == "constant sample"
    out = median_test_TN(np.array([-1.0, -1.0, 1.0, 1.0]))
    assert np.isfinite(out.statistic)


def test_two_sided_wraps_one_sided():
    x = np.array([0.1, -0.3, 0.25, -3.4, 0.6, -0.2])
    one = t_test_known_sigma(x, sigma=1.0)
    two = two_sided(one, alpha=0.05)
    assert two.statistic == pytest.approx(one.statistic**2, rel=1e-14)
    assert two.threshold == pytest.approx(sps.chi2.isf(0.05, 1), rel=1e-12)
    assert two.threshold == pytest.approx(sps.norm.isf(0.025) ** 2, rel=1e-9)
    assert two.p_value == pytest.approx(sps.chi2.sf(one.statistic**2, 1), rel=1e-12)
    assert two.components["signed_statistic"] == one.statistic
    # A large negative mean is invisible one-sided but rejected two-sided.
    y = np.array([-2.0, -2.5, -1.5, -2.2])
    assert t_test_known_sigma(y, sigma=1.0).reject is False
    assert two_sided(t_test_known_sigma(y, sigma=1.0), 0.05).reject is True
    with pytest.raises(ValueError):
        two_sided(two, alpha=0.05)


def test_symmetry_variance_factor_identities():
    # The printed variance factor admits two equivalent closed forms; both
    # must agree with 1 - delta^2 once the dispersion-gap term is expressed
    # over sqrt(D). Checked on random samples to 1e-12.
    gen = np.random.default_rng(7)
    checked = 0
    for _ in range(40):
        n = int(gen.integers(8, 60))
        x = gen.standard_t(6, size=n)
        try:
            out = symmetry_test(x, which="TN")
        except DegenerateStatistic:
            continue
        comp = out.components
        d_hat, delta, v = comp["d_hat"], comp["delta"], comp["v"]
        fhat = comp["fhat_median"]
        s = math.sqrt(np.var(x, ddof=1))
        w = float(np.mean(np.abs(x - sample_median(x))))
        form1 = 1.0 + delta**2 + 2.0 * delta * s / math.sqrt(d_hat) - delta * w / (
            math.sqrt(d_hat) * s * fhat
        )
        form2 = (
            1.0
            + 2.0 * w / (d_hat * fhat)
            - (w / (2.0 * s * fhat) + s) ** 2 / d_hat
        )
        assert v == pytest.approx(1.0 - delta**2, rel=1e-12)
        assert form1 == pytest.approx(v, rel=1e-10, abs=1e-12)
        assert form2 == pytest.approx(v, rel=1e-10, abs=1e-12)
        checked += 1
    assert checked >= 30


def test_symmetry_test_variants_and_composition():
    x = np.array([0.5, -0.1, 1.7, 2.3, -0.9, 0.2, 1.1, -2.2, 0.7])
    n = x.size
    to = symmetry_test(x, which="To")
    assert to.statistic == pytest.approx(
        math.sqrt(n) * x.mean() / math.sqrt(np.var(x, ddof=1)), rel=1e-12
    )
    t1 = symmetry_test(x, which="T1")
    med = sample_median(x)
    fhat = kde_at(x, med, bandwidth_nrd0(x))
    assert t1.statistic == pytest.approx(2.0 * math.sqrt(n) * med * fhat, rel=1e-12)
    with pytest.raises(ValueError):
        symmetry_test(x, which="T2")
    with pytest.raises(DegenerateStatistic):
        symmetry_test(np.zeros(8), which="TN")


def test_wilcoxon_matches_scipy_normal_approximation():
    gen = np.random.default_rng(11)
    for _ in range(20):
        n = int(gen.integers(6, 40))
        x = np.round(gen.standard_normal(n) * 3.0, 1)
        x = x[x != 0.0]
        if x.size < 5:
            continue
        out = wilcoxon_signed_rank(x, side="one_sided_upper")
        ref = sps.wilcoxon(
            x,
            zero_method="wilcox",
            correction=False,
            alternative="greater",
            method="approx",
        )
        # scipy reports min(W+, W-); ours reports the positive-rank sum.
        assert out.p_value == pytest.approx(ref.pvalue, rel=1e-10, abs=1e-12)


def test_wilcoxon_hand_oracle_and_components():
    x = np.array([1.0, 2.0, -3.0, 4.0, 5.0])
    # |x| ranks are 1..5; positive ranks are {1, 2, 4, 5} so W+ = 12,
    # mean = 15/2, var = 5*6*11/24 = 13.75 with no ties.
    out = wilcoxon_signed_rank(x)
    assert out.components["w_plus"] == 12.0
    assert out.components["n_used"] == 5
    assert out.components["tie_correction"] == 0.0
    assert out.statistic == pytest.approx((12.0 - 7.5) / math.sqrt(13.75), rel=1e-13)

    # Zeros are dropped before ranking.
    out0 = wilcoxon_signed_rank(np.array([0.0, 1.0, 2.0, -3.0, 4.0, 5.0, 0.0]))
    assert out0.components["n_used"] == 5
    assert out0.statistic == pytest.approx(out.statistic, rel=1e-13)

    # Tied magnitudes trigger the tie correction, matching scipy.
    xt = np.array([1.0, 1.0, -1.0, 2.0, 2.0, -3.0, 4.0])
    outt = wilcoxon_signed_rank(xt)
    assert outt.components["tie_correction"] > 0.0
    ref = sps.wilcoxon(
        xt, zero_method="wilcox", correction=False, alternative="greater", method="approx"
    )
    assert outt.p_value == pytest.approx(ref.pvalue, rel=1e-10)


def test_wilcoxon_antisymmetry_and_two_sided():
    x = np.array([0.8, -0.4, 1.6, 2.2, -1.3, 0.9, 0.3, -2.7])
    up = wilcoxon_signed_rank(x, side="one_sided_upper")
    down = wilcoxon_signed_rank(-x, side="one_sided_upper")
    assert up.statistic == pytest.approx(-down.statistic, abs=1e-12)
    two = wilcoxon_signed_rank(x, side="two_sided")
    assert two.statistic == pytest.approx(up.statistic**2, rel=1e-12)
    assert two.p_value == pytest.approx(sps.chi2.sf(up.statistic**2, 1), rel=1e-12)


def test_wilcoxon_guards():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank(np.zeros(10))
    with pytest.raises(ValueError):
        wilcoxon_signed_rank(np.array([1.0, -2.0, 3.0, 4.0]))
    with pytest.raises(ValueError):
        wilcoxon_signed_rank(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), side="lower")


def test_thomas_transform_oracle():
    assert thomas_transform(1.0, 100) == pytest.approx(-100.0 * math.log(0.99), rel=1e-13)
    # Vectorized and strictly increasing on [0, n).
    grid = np.linspace(0.0, 40.0, 200)
    vals = thomas_transform(grid, 50)
    assert vals.shape == grid.shape
    assert np.all(np.diff(vals) > 0)
    assert thomas_transform(0.0, 10) == 0.0
    # Approaches the identity for large n.
    assert thomas_transform(4.0, 10**9) == pytest.approx(4.0, rel=1e-6)
    with pytest.raises(ValueError):
        thomas_transform(10.0, 10)
    with pytest.raises(ValueError):
        thomas_transform(-0.5, 10)


def _random_rows(gen, rows, n):
    kind = gen.integers(0, 3)
    if kind == 0:
        return gen.standard_normal((rows, n))
    if kind == 1:
        return gen.exponential(1.0, (rows, n)) - 1.0
    return gen.laplace(0.4, 1.0, (rows, n))


def test_mean_kernels_match_scalar():
    gen = np.random.default_rng(2024)
    x = _random_rows(gen, 50, 21)
    sigma = 1.1
    to = ker.mean_to(x, sigma)
    for variant in ("quartic", "quadratic"):
        tn, degen = ker.mean_tn(x, sigma, variant)
        for i in range(x.shape[0]):
            assert to[i] == pytest.approx(
                t_test_known_sigma(x[i], sigma).statistic, rel=1e-11
            )
            if degen[i]:
                with pytest.raises(DegenerateStatistic):
                    modified_mean_test(x[i], sigma, variant=variant)
            else:
                want = modified_mean_test(x[i], sigma, variant=variant).statistic
                assert tn[i] == pytest.approx(want, rel=1e-10, abs=1e-12)


def test_median_kernels_match_scalar():
    gen = np.random.default_rng(2025)
    x = gen.laplace(0.2, 1.0, (40, 25))
    pieces = ker.median_pieces(x)
    to, to_degen = ker.median_to(pieces)
    tn, tn_degen = ker.median_tn(pieces)
    assert not to_degen.any()
    for i in range(x.shape[0]):
        assert to[i] == pytest.approx(median_test_To(x[i]).statistic, rel=1e-10)
        if tn_degen[i]:
            with pytest.raises(DegenerateStatistic):
                median_test_TN(x[i])
        else:
            assert tn[i] == pytest.approx(median_test_TN(x[i]).statistic, rel=1e-10)


def test_symmetry_kernels_match_scalar():
    gen = np.random.default_rng(2026)
    x = gen.standard_t(5, (40, 30)) + 0.1
    pieces = ker.median_pieces(x)
    to, _ = ker.sym_to(pieces)
    t1, _ = ker.sym_t1(pieces)
    tn, degen = ker.sym_tn(pieces)
    for i in range(x.shape[0]):
        assert to[i] == pytest.approx(symmetry_test(x[i], "To").statistic, rel=1e-10)
        assert t1[i] == pytest.approx(symmetry_test(x[i], "T1").statistic, rel=1e-10)
        if degen[i]:
            with pytest.raises(DegenerateStatistic):
                symmetry_test(x[i], "TN")
        else:
            assert tn[i] == pytest.approx(symmetry_test(x[i], "TN").statistic, rel=1e-10)


def test_wilcoxon_kernel_matches_scalar_on_tie_free_rows():
    gen = np.random.default_rng(2027)
    x = gen.standard_normal((30, 26)) + 0.2  # continuous, ties negligible
    z = ker.wilcoxon_z(x)
    for i in range(x.shape[0]):
        assert z[i] == pytest.approx(
            wilcoxon_signed_rank(x[i]).statistic, rel=1e-11
        )
