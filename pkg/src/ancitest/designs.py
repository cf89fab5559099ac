"""Data-generating designs for the simulation studies, plus reproducible streams.

Every design used by the power studies is registered here together with its
exact population quantities (mean, variance, third/fourth central moments,
median, density at the median, mean absolute deviation about the median).
Samplers are deterministic given a RandomStream and use inverse-CDF or exact
transforms wherever the platform's normal generator is not involved.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DesignId",
    "DesignParams",
    "RandomStream",
    "UnknownDesignError",
    "design_params",
    "list_designs",
    "sample_design",
    "sample_design_matrix",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LN2 = math.log(2.0)
_E = math.e


class UnknownDesignError(ValueError):
    """Raised when a (table, hypothesis, index) triple names no registered design."""


def _spawn_words(path):
    """Map a mixed int/str path to a flat tuple of uint32 spawn-key words.

    Strings are hashed with sha256 so the mapping is stable across runs and
    platforms; built-in hash() is salted per process and must not be used here.
    """
    words = []
    for item in path:
        if isinstance(item, bool):
            raise TypeError("path elements must be int or str, not bool")
        if isinstance(item, int):
            if item < 0:
                raise ValueError("path integers must be non-negative")
            words.extend((1, item & 0xFFFFFFFF, (item >> 32) & 0xFFFFFFFF))
        elif isinstance(item, str):
            digest = hashlib.sha256(item.encode("utf-8")).digest()
            words.extend(
                (2, int.from_bytes(digest[:4], "big"), int.from_bytes(digest[4:8], "big"))
            )
        else:
            raise TypeError(f"unsupported path element type: {type(item)!r}")
    return tuple(words)


@dataclass(frozen=True)
class RandomStream:
    """Value-like handle for a deterministic, independent random stream.

    Two streams with the same (root_seed, path) produce identical output;
    distinct paths give statistically independent output.  Streams are cheap
    to create and safe to send across threads.
    """

    root_seed: int
    path: tuple = ()

    def child(self, *more) -> "RandomStream":
        return RandomStream(self.root_seed, self.path + tuple(more))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.root_seed, spawn_key=_spawn_words(self.path))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class DesignParams:
    """Exact population quantities of a scalar design."""

    mean: float
    sigma: float
    mu3: float
    mu4: float
    median: float
    density_at_median: float
    mean_abs_dev_about_median: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.density_at_median > 0:
            raise ValueError("density at median must be positive")
        if not self.mean_abs_dev_about_median > 0:
            raise ValueError("mean absolute deviation must be positive")
        # Jensen: E(X-mu)^4 >= (E(X-mu)^2)^2.
        if self.mu4 < self.sigma**4 - 1e-12:
            raise ValueError("mu4 violates the fourth-moment lower bound")
        for v in (self.mean, self.mu3, self.mu4, self.median):
            if not math.isfinite(v):
                raise ValueError("all population quantities must be finite")
        # Mean absolute deviation cannot exceed the root mean square deviation.
        rms = math.sqrt(self.sigma**2 + (self.mean - self.median) ** 2)
        if self.mean_abs_dev_about_median > rms + 1e-12:
            raise ValueError("mean absolute deviation exceeds its RMS bound")


# ---------------------------------------------------------------------------
# Primitive samplers.  Each takes a target shape and a Generator and consumes
# the stream in a documented, fixed order; tests pin this order via snapshots.


def _exp1(shape, gen):
    # Inverse CDF with u in [0, 1): -log(1 - u) is finite and >= 0.
    return -np.log1p(-gen.random(shape))


def _std_normal(shape, gen):
    return gen.standard_normal(shape)


def _laplace(shape, gen):
    # Difference of two independent unit exponentials.
    return _exp1(shape, gen) - _exp1(shape, gen)


def _one_minus_exp(shape, gen):
    return 1.0 - _exp1(shape, gen)


def _exp_minus_one(shape, gen):
    return _exp1(shape, gen) - 1.0


def _weibull_1_2_centered(shape, gen):
    # Shape 1, scale 2 is the exponential with mean 2; (x - 2)/2 recenters.
    return (2.0 * _exp1(shape, gen) - 2.0) / 2.0


def _exphalf_minus_lognormal(shape, gen):
    return math.exp(0.5) - np.exp(_std_normal(shape, gen))


def _uniform_m1_1(shape, gen):
    return 2.0 * gen.random(shape) - 1.0


def _arcsine_centered(shape, gen):
    # Inverse CDF of the arcsine law on [0, 1]: F^{-1}(u) = sin^2(pi u / 2).
    return np.sin(0.5 * np.pi * gen.random(shape)) ** 2 - 0.5


# ---------------------------------------------------------------------------
# Population quantities.

_NORMAL_PARAMS = dict(
    sigma=1.0,
    mu3=0.0,
    mu4=3.0,
    density_at_median=1.0 / _SQRT_2PI,
    mean_abs_dev_about_median=math.sqrt(2.0 / math.pi),
)


def _normal_params(shift):
    return DesignParams(mean=shift, median=shift, **_NORMAL_PARAMS)


def _one_minus_exp_params(shift):
    # X = 1 - E + shift with E unit exponential: left tail long, median above mean.
    return DesignParams(
        mean=shift,
        sigma=1.0,
        mu3=-2.0,
        mu4=9.0,
        median=1.0 - _LN2 + shift,
        density_at_median=0.5,
        mean_abs_dev_about_median=_LN2,
    )


def _exp_minus_one_params(shift):
    return DesignParams(
        mean=shift,
        sigma=1.0,
        mu3=2.0,
        mu4=9.0,
        median=_LN2 - 1.0 + shift,
        density_at_median=0.5,
        mean_abs_dev_about_median=_LN2,
    )


def _laplace_params(shift):
    return DesignParams(
        mean=shift,
        sigma=math.sqrt(2.0),
        mu3=0.0,
        mu4=24.0,
        median=shift,
        density_at_median=0.5,
        mean_abs_dev_about_median=1.0,
    )


def _normal_sd2_params():
    return DesignParams(
        mean=0.0,
        sigma=2.0,
        mu3=0.0,
        mu4=48.0,
        median=0.0,
        density_at_median=1.0 / (2.0 * _SQRT_2PI),
        mean_abs_dev_about_median=2.0 * math.sqrt(2.0 / math.pi),
    )


def _exphalf_minus_lognormal_params():
    # X = e^{1/2} - L with L lognormal(0, 1): E L^k = e^{k^2/2}.
    from scipy.stats import norm

    m1 = math.exp(0.5)
    var = (_E - 1.0) * _E
    mu3_l = math.exp(4.5) - 3.0 * math.exp(2.5) + 2.0 * math.exp(1.5)
    mu4_l = math.exp(8.0) - 4.0 * math.exp(5.0) + 6.0 * math.exp(3.0) - 3.0 * math.exp(2.0)
    return DesignParams(
        mean=0.0,
        sigma=math.sqrt(var),
        mu3=-mu3_l,
        mu4=mu4_l,
        median=m1 - 1.0,
        # Density of e^{1/2} - L at its median equals the lognormal density at 1.
        density_at_median=1.0 / _SQRT_2PI,
        # E|L - 1| = e^{1/2} (2 Phi(1) - 1).
        mean_abs_dev_about_median=m1 * (2.0 * norm.cdf(1.0) - 1.0),
    )


def _uniform_params(shift):
    return DesignParams(
        mean=shift,
        sigma=math.sqrt(1.0 / 3.0),
        mu3=0.0,
        mu4=0.2,
        median=shift,
        density_at_median=0.5,
        mean_abs_dev_about_median=0.5,
    )


def _arcsine_params(shift):
    return DesignParams(
        mean=shift,
        sigma=math.sqrt(0.125),
        mu3=0.0,
        mu4=3.0 / 128.0,
        median=shift,
        density_at_median=2.0 / math.pi,
        mean_abs_dev_about_median=1.0 / math.pi,
    )


# ---------------------------------------------------------------------------
# Registry.  Keys are (table, hypothesis, index); entries carry the base
# sampler of the index-m family, an additive location shift, the description,
# and the population quantities.  For a given table and index the two
# hypotheses share the base sampler whenever the alternative is a pure shift,
# which makes the shift structure exact under a common stream.


@dataclass(frozen=True)
class _Entry:
    base: object  # callable(shape, gen) -> ndarray
    shift: float
    description: str
    params: DesignParams | None
    vector_dim: int = 0  # nonzero only for the fixed-dimension toy designs


def _toy_two_obs(mu):
    def draw(shape, gen):
        rows = shape[0] if isinstance(shape, tuple) else shape
        z = gen.standard_normal((rows, 2))
        return mu + z * np.array([1.0, 4.0])

    return draw


def _toy_three_obs(mu):
    def draw(shape, gen):
        rows = shape[0] if isinstance(shape, tuple) else shape
        z = gen.standard_normal((rows, 3))
        return mu + z * np.array([1.0, 4.0, 3.0])

    return draw


_REGISTRY: dict = {}


def _register(table, hyp, index, base, shift, description, params, vector_dim=0):
    _REGISTRY[(table, hyp, index)] = _Entry(base, shift, description, params, vector_dim)


def _build_registry():
    # Location-shift tables: the alternative adds the stated shift to the
    # same base draw, so hypothesis pairs share base samplers.
    for k in (0, 1):
        s = 0.1 * k
        _register("1", k, 1, _std_normal, s, f"normal, mean {s:g}, sd 1", _normal_params(s))
        _register(
            "1", k, 2, _one_minus_exp, s,
            f"1 - standard exponential{' + 0.1' if k else ''} (left skewed)",
            _one_minus_exp_params(s),
        )
        _register(
            "1", k, 3, _exp_minus_one, s,
            f"standard exponential - 1{' + 0.1' if k else ''} (right skewed)",
            _exp_minus_one_params(s),
        )
        s4 = 0.2 * k
        _register(
            "1", k, 4, _weibull_1_2_centered, s4,
            f"(weibull(shape 1, scale 2) - 2)/2{' + 0.2' if k else ''}",
            _exp_minus_one_params(s4),
        )

    # Median-test table: the alternatives are not shifts of their nulls.
    _register("2", 0, 1, _laplace, 0.0,
              "difference of two unit exponentials (laplace)", _laplace_params(0.0))
    _register("2", 1, 1, _one_minus_exp, 0.0,
              "1 - standard exponential (zero mean, positive median)",
              _one_minus_exp_params(0.0))
    _register("2", 0, 2, lambda shape, gen: 2.0 * _std_normal(shape, gen), 0.0,
              "normal, mean 0, sd 2", _normal_sd2_params())
    _register("2", 1, 2, _exphalf_minus_lognormal, 0.0,
              "exp(1/2) - lognormal(0, 1) (zero mean, positive median)",
              _exphalf_minus_lognormal_params())

    # Symmetric-location table.
    for k in (0, 1):
        s = 0.1 * k
        _register("3", k, 1, _std_normal, s, f"normal, mean {s:g}, sd 1", _normal_params(s))
        _register("3", k, 2, _laplace, s,
                  f"laplace{' + 0.1' if k else ''}", _laplace_params(s))
        _register("3", k, 3, _uniform_m1_1, s,
                  f"uniform on (-1, 1){' + 0.1' if k else ''}", _uniform_params(s))
        _register("3", k, 4, _arcsine_centered, s,
                  f"arcsine on (0, 1) centered{' + 0.1' if k else ''}", _arcsine_params(s))

    # Toy heteroscedastic designs: fixed-dimension observation vectors used by
    # the closed-form power curves; draws return one vector per replication.
    for k, mu in ((0, 0.0), (1, 5.0)):
        _register("toy", k, 1, _toy_two_obs(mu), 0.0,
                  f"two independent normals, common mean {mu:g}, sds (1, 4)",
                  None, vector_dim=2)
        _register("toy", k, 2, _toy_three_obs(mu), 0.0,
                  f"three independent normals, common mean {mu:g}, sds (1, 4, 3)",
                  None, vector_dim=3)


_build_registry()


@dataclass(frozen=True)
class DesignId:
    """Name of a registered design: (table, hypothesis, index)."""

    table: str
    hypothesis: int
    index: int

    def __post_init__(self):
        key = (str(self.table), self.hypothesis, self.index)
        if key not in _REGISTRY:
            raise UnknownDesignError(f"no such design: {key}")
        object.__setattr__(self, "table", str(self.table))

    @property
    def label(self) -> str:
        return f"D_{self.hypothesis}{self.index}"

    def __str__(self):
        prefix = "toy" if self.table == "toy" else f"table {self.table}"
        return f"{prefix} {self.label}"


def _entry(design: DesignId) -> _Entry:
    return _REGISTRY[(design.table, design.hypothesis, design.index)]


def list_designs():
    """All registered designs with descriptions, in stable table/row order.

    Returns a list of (DesignId, description) pairs.  Within a table the
    order is index-major with the null listed before the alternative, which
    matches the row order of the reported tables.
    """
    out = []
    for table in ("1", "2", "3", "toy"):
        indices = sorted({key[2] for key in _REGISTRY if key[0] == table})
        for index in indices:
            for hyp in (0, 1):
                did = DesignId(table, hyp, index)
                out.append((did, _entry(did).description))
    return out


def design_params(design: DesignId) -> DesignParams:
    """Exact population quantities for a scalar design.

    The toy designs are observation vectors with per-coordinate scales; they
    have no single scalar parameter set and raise ValueError here.
    """
    entry = _entry(design)
    if entry.params is None:
        raise ValueError(
            f"{design} is a fixed-dimension observation vector; "
            "its power curves are closed form and use no scalar parameters"
        )
    return entry.params


def sample_design_matrix(design: DesignId, rows: int, n: int, stream: RandomStream):
    """Draw a (rows, n) matrix of independent samples, one replication per row.

    The whole matrix is produced by vectorized primitive draws in a fixed
    order, so the result depends only on (design, rows, n, stream).
    """
    if rows < 1:
        raise ValueError("rows must be >= 1")
    entry = _entry(design)
    if entry.vector_dim:
        raise ValueError(f"{design} draws observation vectors; use sample_design")
    if n < 2:
        raise ValueError("n must be >= 2")
    gen = stream.generator()
    x = entry.base((rows, n), gen)
    if entry.shift:
        x = x + entry.shift
    return x


def sample_design(design: DesignId, n: int, stream: RandomStream):
    """Draw n independent observations from the named design.

    For scalar designs the result is a length-n vector.  For the toy designs
    each draw is an observation vector, and the result has shape (n, dim).
    """
    entry = _entry(design)
    if entry.vector_dim:
        if n < 1:
            raise ValueError("n must be >= 1")
        gen = stream.generator()
        return entry.base((n, entry.vector_dim), gen)
    if n < 2:
        raise ValueError("n must be >= 2")
    gen = stream.generator()
    x = entry.base(n, gen)
    if entry.shift:
        x = x + entry.shift
    return x
