"""Exhaustive verification of the most-powerful-test characterization on
finite discrete models.

Continuous density identities reduce to exact point-mass identities on a
finite outcome space, so every claim here is checked by enumeration, with a
1e-12 tolerance absorbing floating-point error only.  Exact size alpha on a
discrete space requires randomizing at the boundary level of the statistic;
best_level_power implements that randomized threshold test.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DiscreteModel",
    "FiniteStatistic",
    "best_level_power",
    "check_prop_1_1",
    "check_prop_2_1",
    "check_prop_2_2",
    "check_prop_2_3",
    "check_prop_2_4",
    "check_prop_2_5",
    "check_prop_3_1",
    "coarsening_counter_model",
    "default_alpha_grid",
    "likelihood_ratio",
    "product_model",
    "random_model",
    "random_statistic",
    "singleton_indicators",
    "verify_propositions",
]

TOL = 1e-12


@dataclass(frozen=True)
class DiscreteModel:
    """Finite outcome space with strictly positive null and alternative
    probability vectors."""

    f0: tuple
    f1: tuple

    def __post_init__(self):
        f0 = np.asarray(self.f0, dtype=float)
        f1 = np.asarray(self.f1, dtype=float)
        if f0.shape != f1.shape or f0.ndim != 1:
            raise ValueError("f0 and f1 must be vectors of equal length")
        m = f0.size
        if not 2 <= m <= 12:
            raise ValueError("outcome count must lie in [2, 12]")
        if np.any(f0 <= 0) or np.any(f1 <= 0):
            raise ValueError("probabilities must be strictly positive")
        if abs(f0.sum() - 1.0) > TOL or abs(f1.sum() - 1.0) > TOL:
            raise ValueError("probability vectors must sum to 1")
        object.__setattr__(self, "f0", tuple(float(v) for v in f0))
        object.__setattr__(self, "f1", tuple(float(v) for v in f1))

    @property
    def m(self) -> int:
        return len(self.f0)

    def arrays(self):
        return np.array(self.f0), np.array(self.f1)


@dataclass(frozen=True)
class FiniteStatistic:
    """Real-valued statistic on the outcome space, one value per outcome."""

    values: tuple

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("statistic needs one value per outcome")
        if not np.all(np.isfinite(vals)):
            raise ValueError("statistic values must be finite")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))

    def array(self):
        return np.array(self.values)


def likelihood_ratio(model: DiscreteModel) -> FiniteStatistic:
    f0, f1 = model.arrays()
    return FiniteStatistic(tuple(f1 / f0))


def default_alpha_grid():
    return np.linspace(0.01, 0.99, 99)


def _levels(values: np.ndarray):
    """Unique values ascending with their outcome masks."""
    uniq = np.unique(values)
    return [(u, values == u) for u in uniq]


def best_level_power(model: DiscreteModel, t: FiniteStatistic, alpha: float) -> float:
    """Power of the exact size-alpha randomized threshold test based on t.

    Outcomes are taken level by level in decreasing t order; the boundary
    level is accepted with the fractional probability that makes the null
    rejection mass exactly alpha.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie strictly between 0 and 1")
    f0, f1 = model.arrays()
    values = t.array()
    if values.size != f0.size:
        raise ValueError("statistic length does not match the model")
    power = 0.0
    size = 0.0
    for u, mask in reversed(_levels(values)):
        p0 = f0[mask].sum()
        p1 = f1[mask].sum()
        if size + p0 <= alpha:
            power += p1
            size += p0
        else:
            power += (alpha - size) / p0 * p1
            return float(power)
    return float(power)


def check_prop_1_1(model: DiscreteModel) -> dict:
    """Level-mass identity for the likelihood ratio: P1(L = u) = u P0(L = u)."""
    f0, f1 = model.arrays()
    lam = likelihood_ratio(model).array()
    worst = 0.0
    for u, mask in _levels(lam):
        worst = max(worst, abs(f1[mask].sum() - u * f0[mask].sum()))
    return {"max_violation": float(worst)}


def check_prop_2_1(model: DiscreteModel, a: FiniteStatistic) -> dict:
    """Joint version of the level-mass identity for (likelihood ratio, A)."""
    f0, f1 = model.arrays()
    lam = likelihood_ratio(model).array()
    avals = a.array()
    worst = 0.0
    for u, mask_u in _levels(lam):
        for _, mask_v in _levels(avals):
            mask = mask_u & mask_v
            if mask.any():
                worst = max(worst, abs(f1[mask].sum() - u * f0[mask].sum()))
    return {"max_violation": float(worst)}


def check_prop_2_2(model: DiscreteModel, t: FiniteStatistic, alpha_grid=None) -> dict:
    """Value-calibration condition versus attained most-powerful power.

    condition_holds tests f1 = t f0 outcome-wise (taking A as the identity
    statistic, which decides the condition for every A on a finite space).
    is_mp tests power equality with the likelihood ratio across the grid.
    The condition implies MP; the converse can fail for statistics that
    order outcomes like the likelihood ratio but carry different values.
    """
    if np.any(t.array() < 0):
        raise ValueError("statistic must be non-negative for the calibration condition")
    if alpha_grid is None:
        alpha_grid = default_alpha_grid()
    f0, f1 = model.arrays()
    tv = t.array()
    condition_violation = float(np.max(np.abs(f1 - tv * f0)))
    lam = likelihood_ratio(model)
    power_gap = max(
        abs(best_level_power(model, t, a) - best_level_power(model, lam, a))
        for a in alpha_grid
    )
    return {
        "condition_holds": condition_violation <= TOL,
        "is_mp": power_gap <= TOL,
        "condition_violation": condition_violation,
        "max_power_gap": float(power_gap),
    }


def singleton_indicators(m: int):
    """Indicator statistics of each single outcome, the decisive test family."""
    eye = np.eye(m)
    return [FiniteStatistic(tuple(row)) for row in eye]


def check_prop_2_3(model: DiscreteModel, t: FiniteStatistic, g_family) -> bool:
    """Moment identity E1 g(D) = E0 g(D) t(D) over a family of [0, 1] functions.

    The family must contain every singleton indicator; those alone force
    t to equal the likelihood ratio pointwise when the identity holds.
    """
    f0, f1 = model.arrays()
    tv = t.array()
    m = f0.size
    found = [False] * m
    for g in g_family:
        gv = g.array()
        if np.any(gv < -TOL) or np.any(gv > 1.0 + TOL):
            raise ValueError("family functions must map into [0, 1]")
        for i in range(m):
            if gv[i] == 1.0 and np.all(np.delete(gv, i) == 0.0):
                found[i] = True
    if not all(found):
        raise ValueError("family must include all singleton indicator functions")
    for g in g_family:
        gv = g.array()
        if abs(np.dot(gv, f1) - np.dot(gv * tv, f0)) > TOL:
            return False
    return True


def check_prop_2_4(
    model: DiscreteModel, t1: FiniteStatistic, t2: FiniteStatistic, alpha_grid=None
) -> dict:
    """Power dominance of t1 over t2 under the joint calibration hypothesis.

    The hypothesis requires P1(t1 = u, t2 = v) = u P0(t1 = u, t2 = v) on all
    attained level pairs.  When it fails the dominance claim does not apply
    and the report says so.
    """
    if np.any(t1.array() < 0):
        raise ValueError("t1 must be non-negative")
    if alpha_grid is None:
        alpha_grid = default_alpha_grid()
    f0, f1 = model.arrays()
    v1 = t1.array()
    v2 = t2.array()
    worst = 0.0
    for u, mask_u in _levels(v1):
        for _, mask_v in _levels(v2):
            mask = mask_u & mask_v
            if mask.any():
                worst = max(worst, abs(f1[mask].sum() - u * f0[mask].sum()))
    if worst > TOL:
        return {"applicable": False, "hypothesis_violation": float(worst), "dominates": None}
    gap = min(
        best_level_power(model, t1, a) - best_level_power(model, t2, a) for a in alpha_grid
    )
    return {
        "applicable": True,
        "hypothesis_violation": float(worst),
        "dominates": gap >= -TOL,
        "min_power_gap": float(gap),
    }


def check_prop_2_5(model: DiscreteModel, t: FiniteStatistic, alpha_grid=None) -> dict:
    """Sufficiency plus level-ratio calibration versus most-powerful power.

    sufficient: within each t level the conditional outcome distribution is
    the same under both hypotheses.  calibrated: the level mass ratio
    P1(t = u)/P0(t = u) equals u.  is_mp: power equality with the likelihood
    ratio on the grid.
    """
    if alpha_grid is None:
        alpha_grid = default_alpha_grid()
    f0, f1 = model.arrays()
    tv = t.array()
    sufficient = True
    calibrated = True
    for u, mask in _levels(tv):
        p0 = f0[mask].sum()
        p1 = f1[mask].sum()
        cond0 = f0[mask] / p0
        cond1 = f1[mask] / p1
        if np.max(np.abs(cond0 - cond1)) > TOL:
            sufficient = False
        if abs(p1 / p0 - u) > TOL:
            calibrated = False
    lam = likelihood_ratio(model)
    power_gap = max(
        abs(best_level_power(model, t, a) - best_level_power(model, lam, a))
        for a in alpha_grid
    )
    return {
        "sufficient": sufficient,
        "calibrated": calibrated,
        "is_mp": power_gap <= TOL,
        "max_power_gap": float(power_gap),
    }


def check_prop_3_1(
    model: DiscreteModel,
    t: FiniteStatistic,
    a: FiniteStatistic,
    tn: FiniteStatistic,
    alpha_grid=None,
) -> dict:
    """Dominance of a decorrelated statistic over the statistic it refines.

    Premises, each verified before the claim is evaluated: a is ancillary
    (same distribution under both hypotheses); tn and a are independent
    under both hypotheses; t is a function of the (tn, a) pair; the level
    ratio of tn is monotone in its value.  A failed premise is named and the
    claim is not evaluated.
    """
    if alpha_grid is None:
        alpha_grid = default_alpha_grid()
    f0, f1 = model.arrays()
    av = a.array()
    tnv = tn.array()
    tv = t.array()

    for _, mask in _levels(av):
        if abs(f0[mask].sum() - f1[mask].sum()) > TOL:
            return {"premises_ok": False, "failed_premise": "ancillarity", "dominates": None}

    for f in (f0, f1):
        for u, mask_u in _levels(tnv):
            pu = f[mask_u].sum()
            for v, mask_v in _levels(av):
                pv = f[mask_v].sum()
                joint = f[mask_u & mask_v].sum()
                if abs(joint - pu * pv) > TOL:
                    return {
                        "premises_ok": False,
                        "failed_premise": "independence",
                        "dominates": None,
                    }

    for _, mask_u in _levels(tnv):
        for _, mask_v in _levels(av):
            mask = mask_u & mask_v
            if mask.any() and np.ptp(tv[mask]) > TOL:
                return {
                    "premises_ok": False,
                    "failed_premise": "factorization",
                    "dominates": None,
                }

    ratios = []
    for u, mask in _levels(tnv):
        ratios.append(f1[mask].sum() / f0[mask].sum())
    if any(ratios[i + 1] < ratios[i] - TOL for i in range(len(ratios) - 1)):
        return {"premises_ok": False, "failed_premise": "monotone_ratio", "dominates": None}

    gap = min(
        best_level_power(model, tn, al) - best_level_power(model, t, al) for al in alpha_grid
    )
    return {"premises_ok": True, "failed_premise": None, "dominates": gap >= -TOL,
            "min_power_gap": float(gap)}


# ---------------------------------------------------------------------------
# Model and statistic generators.


def random_model(gen: np.random.Generator, m: int) -> DiscreteModel:
    """Random model with probabilities bounded away from zero."""
    f0 = gen.random(m) + 0.05
    f1 = gen.random(m) + 0.05
    return DiscreteModel(tuple(f0 / f0.sum()), tuple(f1 / f1.sum()))


def random_statistic(gen: np.random.Generator, m: int) -> FiniteStatistic:
    return FiniteStatistic(tuple(gen.random(m)))


def coarsening_counter_model():
    """Three-outcome model with a statistic that merges distinct ratio levels.

    The merged statistic loses the ordering information of the likelihood
    ratio, so both the calibration condition and most-powerful power fail.
    """
    model = DiscreteModel((1 / 3, 1 / 3, 1 / 3), (1 / 6, 1 / 3, 1 / 2))
    merged = FiniteStatistic((1.0, 0.9, 1.0))
    return model, merged


def product_model(gen: np.random.Generator, i_size: int, j_size: int):
    """Two-component model whose second coordinate is shared noise.

    Returns (model, t, a, tn) where a reads the noise coordinate, tn is the
    likelihood ratio of the informative coordinate, and t is an arbitrary
    function of the (tn, a) pair.
    """
    p0 = gen.random(i_size) + 0.05
    p0 /= p0.sum()
    p1 = gen.random(i_size) + 0.05
    p1 /= p1.sum()
    q = gen.random(j_size) + 0.05
    q /= q.sum()
    f0 = np.outer(p0, q).ravel()
    f1 = np.outer(p1, q).ravel()
    lam_i = p1 / p0
    tn = np.repeat(lam_i, j_size)
    a = np.tile(np.arange(j_size, dtype=float), i_size)
    # Any deterministic combination of (tn, a) qualifies as the coarser statistic.
    t = tn + 0.25 * np.sin(a + 1.0)
    return (
        DiscreteModel(tuple(f0), tuple(f1)),
        FiniteStatistic(tuple(t)),
        FiniteStatistic(tuple(a)),
        FiniteStatistic(tuple(tn)),
    )


# ---------------------------------------------------------------------------
# Verification driver.


def verify_propositions(seed: int = 20260815, n_models: int = 100, n_pairs: int = 1000):
    """Run the full certification suite; returns one report row per claim.

    Each row carries name, passed, max_violation, and cases.  Identity checks
    use n_models random models; the dominance oracle uses n_pairs random
    (model, statistic) pairs on the default alpha grid.
    """
    gen = np.random.default_rng(seed)
    grid = default_alpha_grid()
    rows = []

    def add(name, passed, violation, cases, detail=""):
        rows.append(
            {
                "name": name,
                "passed": bool(passed),
                "max_violation": float(violation),
                "cases": cases,
                "detail": detail,
            }
        )

    models = [random_model(gen, int(gen.integers(2, 9))) for _ in range(n_models)]

    worst = max(check_prop_1_1(mod)["max_violation"] for mod in models)
    add("ratio-level-identity", worst <= TOL, worst, n_models)

    worst = max(
        check_prop_2_1(mod, random_statistic(gen, mod.m))["max_violation"] for mod in models
    )
    add("joint-level-identity", worst <= TOL, worst, n_models)

    ok = True
    for mod in models:
        lam = likelihood_ratio(mod)
        family = singleton_indicators(mod.m) + [FiniteStatistic((1.0,) * mod.m)]
        if not check_prop_2_3(mod, lam, family):
            ok = False
        bumped = np.array(lam.values)
        bumped[0] += 1e-6
        if check_prop_2_3(mod, FiniteStatistic(tuple(bumped)), family):
            ok = False
    add("moment-identity", ok, 0.0 if ok else 1.0, n_models,
        "ratio passes, pointwise perturbation fails")

    ok = True
    counter_model, merged = coarsening_counter_model()
    for mod in models[:20]:
        rep = check_prop_2_2(mod, likelihood_ratio(mod), grid)
        ok &= rep["condition_holds"] and rep["is_mp"]
    rep = check_prop_2_2(counter_model, merged, grid)
    ok &= (not rep["condition_holds"]) and (not rep["is_mp"])
    lam_c = likelihood_ratio(counter_model)
    doubled = FiniteStatistic(tuple(2.0 * v for v in lam_c.values))
    rep = check_prop_2_2(counter_model, doubled, grid)
    # Doubling preserves the ordering (still MP) but breaks the value
    # calibration; the condition is about values, not ranks.
    ok &= (not rep["condition_holds"]) and rep["is_mp"]
    add("mp-condition", ok, 0.0 if ok else 1.0, 23)

    ok = True
    for mod in models[:20]:
        rep = check_prop_2_5(mod, likelihood_ratio(mod), grid)
        ok &= rep["sufficient"] and rep["calibrated"] and rep["is_mp"]
    rep = check_prop_2_5(counter_model, merged, grid)
    ok &= (not rep["sufficient"]) and (not rep["is_mp"])
    relabel = FiniteStatistic((10.0, 20.0, 30.0))
    rep = check_prop_2_5(counter_model, relabel, grid)
    ok &= rep["sufficient"] and (not rep["calibrated"])
    add("sufficiency-calibration", ok, 0.0 if ok else 1.0, 22)

    ok = True
    for mod in models[:20]:
        lam = likelihood_ratio(mod)
        rep = check_prop_2_4(mod, lam, random_statistic(gen, mod.m), grid)
        ok &= rep["applicable"] and rep["dominates"]
        rep = check_prop_2_4(mod, lam, lam, grid)
        ok &= rep["applicable"] and rep["dominates"]
    rep = check_prop_2_4(counter_model, doubled, merged, grid)
    ok &= not rep["applicable"]
    add("conditional-dominance", ok, 0.0 if ok else 1.0, 41)

    ok = True
    for _ in range(20):
        i_size = int(gen.integers(2, 5))
        j_size = int(gen.integers(2, 4))
        mod, t, a, tn = product_model(gen, i_size, j_size)
        rep = check_prop_3_1(mod, t, a, tn, grid)
        ok &= rep["premises_ok"] and rep["dominates"]
    bad = check_prop_3_1(
        counter_model,
        merged,
        likelihood_ratio(counter_model),
        likelihood_ratio(counter_model),
        grid,
    )
    ok &= (not bad["premises_ok"]) and bad["failed_premise"] == "ancillarity"
    add("ancillary-refinement", ok, 0.0 if ok else 1.0, 21)

    worst_gap = 0.0
    for _ in range(n_pairs):
        mod = random_model(gen, int(gen.integers(2, 9)))
        t = random_statistic(gen, mod.m)
        lam = likelihood_ratio(mod)
        for al in grid:
            gap = best_level_power(mod, t, al) - best_level_power(mod, lam, al)
            worst_gap = max(worst_gap, gap)
    add("np-dominance", worst_gap <= TOL, worst_gap, n_pairs,
        "likelihood ratio attains maximal power at every level")

    return rows
