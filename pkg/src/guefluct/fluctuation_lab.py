"""Monte Carlo checks of the eigenvalue central limit theorems.

An :class:`ExperimentConfig` fixes the experiment completely; running it twice
gives bit-identical reports.  Replicate ``r`` always draws from
``SeedSpec(master_seed, r)`` and replicates are processed in fixed-size
chunks whose results are concatenated in replicate order, so the thread count
never changes the numbers.

Thresholds
----------
The limit theorems come without convergence rates, so every Monte Carlo
tolerance below is a pilot-calibrated choice rather than a derived bound.
Each verdict carries a provenance string saying so.
"""

from __future__ import annotations

import enum
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError
from .sampler import (
    RNG_METADATA,
    SeedSpec,
    gue_tridiagonal_model,
    make_generator,
    sample_gue_dense,
)
from .eigensolver import bisect_eigenvalues_batch
from .semicircle import (
    CovarianceModel,
    IndexExponents,
    bulk_indices,
    bulk_standardization,
    covariance_bulk,
    covariance_edge,
    edge_indices,
    edge_standardization,
    hermite_zero_estimate,
    mosteller_correlation,
)

__all__ = [
    "Mode",
    "SamplerChoice",
    "ExperimentConfig",
    "Verdict",
    "ExperimentReport",
    "normal_cdf",
    "ks_statistic",
    "run",
    "run_single",
    "run_joint",
    "run_mosteller",
    "mosteller_contrast",
    "SCHEMA_VERSION",
    "MIN_REPLICATES",
]

SCHEMA_VERSION = 1
MIN_REPLICATES = 100
CHUNK = 250

PILOT = "pilot-calibrated Monte Carlo tolerance; the limit theorem gives no rate"
FORMULA = "limit value from the covariance formula; tolerance pilot-calibrated"


class Mode(enum.Enum):
    BULK_SINGLE = "bulk_single"
    EDGE_SINGLE = "edge_single"
    BULK_JOINT = "bulk_joint"
    EDGE_JOINT = "edge_joint"
    MOSTELLER = "mosteller"


class SamplerChoice(enum.Enum):
    DENSE = "dense"
    TRIDIAGONAL = "tridiagonal"


_DEFAULT_THRESHOLDS = {
    Mode.BULK_SINGLE: {"ks": 0.05, "mean": 0.1, "var": 0.2},
    Mode.EDGE_SINGLE: {"ks": 0.08},
    Mode.BULK_JOINT: {"corr": 0.1},
    Mode.EDGE_JOINT: {"corr": 0.15},
    Mode.MOSTELLER: {"corr": 0.05, "ks": 0.03},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one Monte Carlo experiment.

    Parameters
    ----------
    mode : Mode or str
    n : int
        Matrix dimension (sample size for the Mosteller baseline).
    replicates : int
        At least 100.
    master_seed : int
    sampler : SamplerChoice or str
        ``dense`` is limited to ``n <= 2000``.
    k : int, optional
        Single modes: 1-based index.  Bulk uses ``x_k``; edge uses ``x_{n-k}``.
        Defaults to ``n // 2`` (bulk) and ``ceil(sqrt(n))`` (edge).
    ks : tuple of int, optional
        Joint modes: explicit ascending indices.  Built from the exponents
        when omitted.
    thetas : tuple of float
        Joint modes: gap exponents between consecutive indices.
    gamma : float, optional
        Edge joint mode: ``k_1 = ceil(n^gamma)``.
    lambdas : tuple of float
        Mosteller mode: ascending quantile levels.
    thresholds : dict, optional
        Overrides for the pass/fail tolerances.
    threads : int
        Worker threads; does not affect results.
    """

    mode: Mode
    n: int
    replicates: int = 5000
    master_seed: int = 0
    sampler: SamplerChoice = SamplerChoice.TRIDIAGONAL
    k: int | None = None
    ks: tuple | None = None
    thetas: tuple = ()
    gamma: float | None = None
    lambdas: tuple = ()
    thresholds: dict = field(default_factory=dict)
    threads: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "mode", Mode(self.mode))
            object.__setattr__(self, "sampler", SamplerChoice(self.sampler))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "thetas", tuple(float(t) for t in self.thetas))
        object.__setattr__(self, "lambdas", tuple(float(t) for t in self.lambdas))
        if self.ks is not None:
            object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if int(self.n) != self.n or self.n < 2:
            raise ConfigError(f"n must be an integer >= 2, got {self.n}")
        if self.replicates < MIN_REPLICATES:
            raise ConfigError(f"replicates must be at least {MIN_REPLICATES}, got {self.replicates}")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        unknown = set(self.thresholds) - set(_DEFAULT_THRESHOLDS[self.mode])
        if unknown:
            raise ConfigError(f"unknown thresholds {sorted(unknown)} for mode {self.mode.value}")
        if self.mode is Mode.EDGE_SINGLE and self.k is not None and self.k < 2:
            raise ConfigError("edge index k must be at least 2")
        if self.mode is Mode.MOSTELLER and not self.lambdas:
            raise ConfigError("Mosteller mode needs quantile levels")

    def threshold(self, name):
        return float(self.thresholds.get(name, _DEFAULT_THRESHOLDS[self.mode][name]))

    def to_dict(self):
        out = asdict(self)
        out["mode"] = self.mode.value
        out["sampler"] = self.sampler.value
        out["thresholds"] = {k: self.threshold(k) for k in _DEFAULT_THRESHOLDS[self.mode]}
        # the thread count never changes results, so it stays out of the echo
        del out["threads"]
        return out


@dataclass(frozen=True)
class Verdict:
    """One pass/fail check: ``|value - target| <= threshold``."""

    name: str
    value: float
    target: float
    threshold: float
    provenance: str

    @property
    def passed(self):
        return bool(abs(self.value - self.target) <= self.threshold)

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class ExperimentReport:
    """Standardized samples, their moments and the verdicts of one experiment."""

    config: ExperimentConfig
    indices: tuple
    standardized_samples: np.ndarray
    sample_mean: np.ndarray
    sample_cov: np.ndarray
    ks_stat: np.ndarray
    target_cov: CovarianceModel | None
    verdicts: list
    diagnostics: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    @property
    def sample_corr(self):
        sd = np.sqrt(np.diag(self.sample_cov))
        return self.sample_cov / np.outer(sd, sd)

    def to_dict(self):
        return {
            "schema": SCHEMA_VERSION,
            "tool": "guefluct",
            "version": __version__,
            "config": self.config.to_dict(),
            "rng": RNG_METADATA,
            "indices": list(self.indices),
            "replicates": int(self.standardized_samples.shape[0]),
            "sample_mean": self.sample_mean.tolist(),
            "sample_cov": self.sample_cov.tolist(),
            "sample_corr": self.sample_corr.tolist(),
            "ks_stat": self.ks_stat.tolist(),
            "target_cov": None if self.target_cov is None else self.target_cov.lam.tolist(),
            "verdicts": [v.to_dict() for v in self.verdicts],
            "passed": self.passed,
            "diagnostics": self.diagnostics,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self):
        m = self.standardized_samples.shape[1]
        lines = [",".join(f"z{i + 1}" for i in range(m))]
        lines.extend(",".join(repr(float(v)) for v in row) for row in self.standardized_samples)
        return "\n".join(lines) + "\n"


def normal_cdf(x):
    """Standard normal CDF via the complementary error function."""
    return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))


def ks_statistic(samples, cdf=normal_cdf):
    """Kolmogorov distance between the empirical CDF of ``samples`` and ``cdf``.

    Evaluated exactly at the sample points using both one-sided limits of the
    empirical CDF.
    """
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 2:
        raise DomainError("ks_statistic needs at least two samples")
    f = np.array([cdf(v) for v in x])
    above = np.arange(1, n + 1) / n - f
    below = f - np.arange(0, n) / n
    return float(max(above.max(), below.max()))


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _chunks(replicates):
    return [(s, min(replicates, s + CHUNK)) for s in range(0, replicates, CHUNK)]


def _map_chunks(fn, config, progress=None):
    chunks = _chunks(config.replicates)
    parts = []
    if config.threads == 1:
        results = (fn(a, b) for a, b in chunks)
        for part, (_, b) in zip(results, chunks):
            parts.append(part)
            if progress is not None:
                progress(b, config.replicates)
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            for part, (_, b) in zip(pool.map(lambda ab: fn(*ab), chunks), chunks):
                parts.append(part)
                if progress is not None:
                    progress(b, config.replicates)
    return np.concatenate(parts, axis=0)


def _gue_eigenvalues(config, indices, progress=None):
    """Rows of ``x_k`` (1-based ascending ``indices``), one row per replicate."""
    n = config.n
    ranks = [k - 1 for k in indices]
    seed = config.master_seed

    if config.sampler is SamplerChoice.DENSE:
        def work(a, b):
            out = np.empty((b - a, len(ranks)))
            for r in range(a, b):
                out[r - a] = sample_gue_dense(n, SeedSpec(seed, r)).eigenvalues[ranks]
            return out
    else:
        def work(a, b):
            d = np.empty((b - a, n))
            e = np.empty((b - a, n - 1))
            for r in range(a, b):
                d[r - a], e[r - a] = gue_tridiagonal_model(n, SeedSpec(seed, r))
            return bisect_eigenvalues_batch(d, e, ranks)

    return _map_chunks(work, config, progress)


def _uniform_order_values(config, positions, progress=None):
    n = config.n
    cols = [p - 1 for p in positions]

    def work(a, b):
        out = np.empty((b - a, len(cols)))
        for r in range(a, b):
            u = np.sort(make_generator(SeedSpec(config.master_seed, r)).random(n))
            out[r - a] = u[cols]
        return out

    return _map_chunks(work, config, progress)


def _moments(z):
    mean = np.array([np.sum(col) / col.size for col in z.T])
    centered = z - mean
    cov = centered.T @ centered / (z.shape[0] - 1)
    cov = 0.5 * (cov + cov.T)
    return mean, cov


def _report(config, indices, z, target, verdicts, diagnostics):
    mean, cov = _moments(z)
    ks = np.array([ks_statistic(z[:, j]) for j in range(z.shape[1])])
    return ExperimentReport(config, tuple(indices), z, mean, cov, ks, target, verdicts, diagnostics)


def _corr_verdicts(config, z, target):
    _, cov = _moments(z)
    sd = np.sqrt(np.diag(cov))
    corr = cov / np.outer(sd, sd)
    tol = config.threshold("corr")
    out = []
    m = target.dim
    for i in range(m):
        for j in range(i + 1, m):
            out.append(Verdict(f"corr[{i + 1},{j + 1}]", float(corr[i, j]), float(target.lam[i, j]), tol, FORMULA))
    return out


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------

def _single_index(config):
    n = config.n
    if config.mode is Mode.BULK_SINGLE:
        k = n // 2 if config.k is None else config.k
        if not 1 <= k <= n - 1:
            raise ConfigError(f"bulk index k={k} outside 1..{n - 1}")
        return k, k
    k = int(math.ceil(math.sqrt(n))) if config.k is None else config.k
    if not 2 <= k <= n - 1:
        raise ConfigError(f"edge index k={k} outside 2..{n - 1}")
    return k, n - k


def run_single(config, progress=None):
    """Distribution of one standardized eigenvalue against N(0, 1).

    Bulk mode standardizes ``x_k`` with :func:`bulk_standardization`; edge
    mode standardizes ``x_{n-k}`` with :func:`edge_standardization`.
    """
    if config.mode not in (Mode.BULK_SINGLE, Mode.EDGE_SINGLE):
        raise ConfigError(f"run_single does not handle mode {config.mode.value}")
    k, position = _single_index(config)
    try:
        if config.mode is Mode.BULK_SINGLE:
            std = bulk_standardization(config.n, k)
        else:
            std = edge_standardization(config.n, k)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    raw = _gue_eigenvalues(config, [position], progress)
    z = std.apply(raw)
    mean, cov = _moments(z)
    ks = ks_statistic(z[:, 0])
    verdicts = [Verdict("ks", ks, 0.0, config.threshold("ks"), PILOT)]
    if config.mode is Mode.BULK_SINGLE:
        verdicts.append(Verdict("mean", float(mean[0]), 0.0, config.threshold("mean"), PILOT))
        verdicts.append(Verdict("variance", float(cov[0, 0]), 1.0, config.threshold("var"), PILOT))
    diagnostics = {"center": std.center, "scale": std.scale, "eigenvalue_index": position}
    if config.mode is Mode.BULK_SINGLE and 10 <= k <= config.n - 10:
        # same scale, centered at the estimated location of the k-th Hermite zero
        zc, _ = hermite_zero_estimate(config.n, k)
        alt = (raw[:, 0] - zc) / std.scale
        diagnostics["zero_centered"] = {
            "center": zc,
            "mean": float(np.mean(alt)),
            "variance": float(np.var(alt, ddof=1)),
            "ks": ks_statistic(alt),
        }
    return _report(config, [position], z, None, verdicts, diagnostics)


def _joint_indices(config):
    n = config.n
    if config.mode is Mode.BULK_JOINT:
        if config.ks is not None:
            ks = config.ks
        else:
            ks = bulk_indices(n, config.thetas)
        exps = IndexExponents(config.thetas, ks=ks)
        return ks, list(ks), covariance_bulk(exps)
    if config.gamma is None:
        raise ConfigError("edge joint mode needs gamma")
    ks = config.ks if config.ks is not None else edge_indices(n, config.gamma, config.thetas)
    exps = IndexExponents(config.thetas, gamma=config.gamma, ks=ks)
    return ks, sorted(n - k for k in ks), covariance_edge(exps)


def run_joint(config, progress=None):
    """Joint standardized eigenvalues from one spectrum per replicate.

    The empirical correlation matrix is compared with ``covariance_bulk`` or
    ``covariance_edge`` of the configured exponents.
    """
    if config.mode not in (Mode.BULK_JOINT, Mode.EDGE_JOINT):
        raise ConfigError(f"run_joint does not handle mode {config.mode.value}")
    if not config.thetas:
        raise ConfigError("joint modes need at least one gap exponent")
    try:
        ks, positions, target = _joint_indices(config)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if len(ks) != len(config.thetas) + 1 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise ConfigError(f"indices {ks} must be ascending with one more entry than thetas")
    n = config.n
    if config.mode is Mode.BULK_JOINT:
        stds = [bulk_standardization(n, k) for k in ks]
    else:
        stds = [edge_standardization(n, k) for k in ks]
    raw = _gue_eigenvalues(config, positions, progress)
    if config.mode is Mode.EDGE_JOINT:
        # positions ascend as k descends; reorder columns to match ks
        raw = raw[:, ::-1]
    z = np.column_stack([s.apply(raw[:, j]) for j, s in enumerate(stds)])
    verdicts = _corr_verdicts(config, z, target)
    diagnostics = {"ks": list(ks), "eigenvalue_indices": [n - k for k in ks] if config.mode is Mode.EDGE_JOINT else list(ks)}
    return _report(config, ks, z, target, verdicts, diagnostics)


def run_mosteller(config, progress=None):
    """Sample quantiles of Uniform(0, 1) at the configured levels.

    The quantile at level ``lambda`` is order statistic ``floor(lambda n) + 1``,
    standardized by mean ``lambda`` and variance ``lambda (1 - lambda) / n``.
    """
    if config.mode is not Mode.MOSTELLER:
        raise ConfigError("run_mosteller needs Mosteller mode")
    try:
        target = mosteller_correlation(config.lambdas)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    n = config.n
    positions = [int(math.floor(lam * n)) + 1 for lam in config.lambdas]
    if any(p > n for p in positions):
        raise ConfigError("quantile level too close to 1 for this n")
    raw = _uniform_order_values(config, positions, progress)
    z = np.column_stack(
        [(raw[:, j] - lam) / math.sqrt(lam * (1.0 - lam) / n) for j, lam in enumerate(config.lambdas)]
    )
    if len(config.lambdas) == 1:
        verdicts = [Verdict("ks", ks_statistic(z[:, 0]), 0.0, config.threshold("ks"), PILOT)]
    else:
        verdicts = _corr_verdicts(config, z, target)
    return _report(config, positions, z, target, verdicts, {"order_statistics": positions})


def run(config, progress=None):
    """Dispatch on ``config.mode``.

    ``progress(done, total)`` is called after each chunk of replicates.
    """
    if config.mode in (Mode.BULK_SINGLE, Mode.EDGE_SINGLE):
        return run_single(config, progress)
    if config.mode in (Mode.BULK_JOINT, Mode.EDGE_JOINT):
        return run_joint(config, progress)
    return run_mosteller(config, progress)


def mosteller_contrast(gue_report, mosteller_report, i=0, j=1):
    """``(gue_corr, mosteller_corr, holds)`` with ``holds`` meaning GUE < Mosteller."""
    g = float(gue_report.sample_corr[i, j])
    m = float(mosteller_report.sample_corr[i, j])
    return g, m, g < m


def default_threads():
    return os.cpu_count() or 1
