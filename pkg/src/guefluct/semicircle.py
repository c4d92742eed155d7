"""Semicircle law, eigenvalue standardizations and limiting covariance models.

The semicircle CDF on [-1, 1] is ``G(t) = (2/pi) int_{-1}^t sqrt(1 - x^2) dx``.
Raw GUE eigenvalues (density ``exp(-tr H^2)``) fill ``[-sqrt(2n), sqrt(2n)]``.

Index conventions: eigenvalues are 1-based and ascending, ``x_1 < ... < x_n``.
Joint index sequences are always ascending; edge experiments count ``k`` from
the top, so edge index ``k`` refers to eigenvalue ``x_{n-k}``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "semicircle_cdf",
    "semicircle_density",
    "semicircle_quantile",
    "Standardization",
    "bulk_standardization",
    "edge_standardization",
    "CovarianceModel",
    "IndexExponents",
    "covariance_bulk",
    "covariance_edge",
    "max_exponent_between",
    "bulk_indices",
    "edge_indices",
    "hermite_zero_estimate",
    "hermite_zero_simple",
    "fit_zero_constant",
    "mosteller_correlation",
]

QUANTILE_TOL = 1e-13
PSD_TOL = 1e-10


def semicircle_cdf(t):
    """``G(t) = (arcsin t + t sqrt(1 - t^2)) / pi + 1/2`` for ``-1 <= t <= 1``.

    Raises
    ------
    DomainError
        If ``|t| > 1``.
    """
    t = float(t)
    if not -1.0 <= t <= 1.0:
        raise DomainError(f"semicircle_cdf needs |t| <= 1, got {t}")
    return (math.asin(t) + t * math.sqrt(1.0 - t * t)) / math.pi + 0.5


def semicircle_density(t):
    """``G'(t) = (2/pi) sqrt(1 - t^2)``, zero outside [-1, 1]."""
    t = float(t)
    if abs(t) >= 1.0:
        return 0.0
    return 2.0 / math.pi * math.sqrt(1.0 - t * t)


def semicircle_quantile(a):
    """The unique ``t`` in [-1, 1] with ``G(t) = a``.

    Newton's method from an arcsine-law starting point; any step that leaves
    the current bracket is replaced by bisection.  Stops when the residual
    ``|G(t) - a|`` is at most 1e-13.
    """
    a = float(a)
    if not 0.0 < a < 1.0:
        raise DomainError(f"semicircle_quantile needs 0 < a < 1, got {a}")
    lo, hi = -1.0, 1.0
    t = -math.cos(math.pi * a)
    for _ in range(200):
        r = semicircle_cdf(t) - a
        if abs(r) <= QUANTILE_TOL:
            return t
        if r > 0.0:
            hi = t
        else:
            lo = t
        d = semicircle_density(t)
        step = t - r / d if d > 0.0 else math.nan
        t = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo < 1e-16:
            break
    return t


@dataclass(frozen=True)
class Standardization:
    """Affine map ``x -> (x - center) / scale`` in raw eigenvalue units."""

    center: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0.0:
            raise DomainError(f"scale must be positive, got {self.scale}")

    def apply(self, x):
        return (np.asarray(x, dtype=float) - self.center) / self.scale


def bulk_standardization(n, k):
    """Centering and scale for the ``k``-th smallest eigenvalue in the bulk.

    ``center = t sqrt(2n)`` with ``t = G^{-1}(k/n)`` and
    ``scale = sqrt(log n / (4 (1 - t^2) n))``.

    Warns when ``k/n`` is outside [0.01, 0.99].
    """
    if not 1 <= k <= n - 1:
        raise DomainError(f"bulk index needs 1 <= k <= n-1, got k={k}, n={n}")
    ratio = k / n
    if ratio < 0.01 or ratio > 0.99:
        warnings.warn(f"k/n = {ratio:.4f} is close to the spectrum edge", RuntimeWarning, stacklevel=2)
    t = semicircle_quantile(ratio)
    center = t * math.sqrt(2.0 * n)
    scale = math.sqrt(math.log(n) / (4.0 * (1.0 - t * t) * n))
    return Standardization(center, scale)


def edge_standardization(n, k):
    """Centering and scale for ``x_{n-k}``, the ``k``-th eigenvalue from the top.

    ``center = sqrt(2n) (1 - (3 pi k / (4 sqrt(2) n))^(2/3))`` and
    ``scale = ((1/(12 pi))^(2/3) log k / (n^(1/3) k^(2/3)))^(1/2)``.

    Raises
    ------
    DomainError
        If ``k < 2`` (``log k <= 0``) or ``k >= n``.
    """
    if k < 2:
        raise DomainError(f"edge index needs k >= 2, got {k}")
    if k >= n:
        raise DomainError(f"edge index needs k < n, got k={k}, n={n}")
    if k / n > 0.2:
        warnings.warn(f"k/n = {k / n:.3f} is far from the edge regime", RuntimeWarning, stacklevel=2)
    center = math.sqrt(2.0 * n) * (1.0 - (3.0 * math.pi * k / (4.0 * math.sqrt(2.0) * n)) ** (2.0 / 3.0))
    scale = math.sqrt((1.0 / (12.0 * math.pi)) ** (2.0 / 3.0) * math.log(k) / (n ** (1.0 / 3.0) * k ** (2.0 / 3.0)))
    return Standardization(center, scale)


@dataclass(frozen=True)
class CovarianceModel:
    """Symmetric positive semidefinite matrix with unit diagonal."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.array(self.lam, dtype=float)
        if lam.ndim != 2 or lam.shape[0] != lam.shape[1]:
            raise DomainError("covariance must be a square matrix")
        if not np.allclose(lam, lam.T, atol=0.0):
            raise DomainError("covariance must be symmetric")
        if not np.allclose(np.diag(lam), 1.0):
            raise DomainError("covariance must have unit diagonal")
        if lam.size and np.linalg.eigvalsh(lam)[0] < -PSD_TOL:
            raise DomainError("covariance is not positive semidefinite")
        lam.setflags(write=False)
        object.__setattr__(self, "lam", lam)

    @property
    def dim(self):
        return self.lam.shape[0]


@dataclass(frozen=True)
class IndexExponents:
    """Gap exponents ``theta_i`` between consecutive indices, with edge ``gamma``.

    Bulk requires ``0 < theta_i <= 1``; edge requires ``0 < theta_i < gamma < 1``.
    ``ks`` optionally pins the concrete finite-n indices.
    """

    thetas: tuple
    gamma: float | None = None
    ks: tuple | None = None

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        object.__setattr__(self, "thetas", thetas)
        if self.ks is not None:
            object.__setattr__(self, "ks", tuple(int(k) for k in self.ks))
        if self.gamma is None:
            if any(not 0.0 < t <= 1.0 for t in thetas):
                raise DomainError(f"bulk exponents must lie in (0, 1], got {thetas}")
        else:
            g = float(self.gamma)
            if not 0.0 < g < 1.0:
                raise DomainError(f"gamma must lie in (0, 1), got {g}")
            if any(not 0.0 < t < g for t in thetas):
                raise DomainError(f"edge exponents must lie in (0, gamma={g}), got {thetas}")
            object.__setattr__(self, "gamma", g)

    @property
    def dim(self):
        return len(self.thetas) + 1


def max_exponent_between(thetas, i, j):
    """``max{theta_k : i <= k < j}`` for 0-based ``i < j``.

    ``theta_k`` is the exponent of the gap between indices ``k`` and ``k + 1``,
    so this is the widest gap separating the two eigenvalues.
    """
    return max(thetas[i:j])


def _lambda(thetas, divisor):
    m = len(thetas) + 1
    lam = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            lam[i, j] = lam[j, i] = 1.0 - max_exponent_between(thetas, i, j) / divisor
    return lam


def covariance_bulk(exponents):
    """Bulk limit covariance ``Lambda_ij = 1 - max_{i<=k<j} theta_k``."""
    if exponents.gamma is not None:
        raise DomainError("covariance_bulk needs bulk exponents (gamma unset)")
    return CovarianceModel(_lambda(exponents.thetas, 1.0))


def covariance_edge(exponents):
    """Edge limit covariance ``Lambda_ij = 1 - max_{i<=k<j} theta_k / gamma``."""
    if exponents.gamma is None:
        raise DomainError("covariance_edge needs gamma")
    return CovarianceModel(_lambda(exponents.thetas, exponents.gamma))


def bulk_indices(n, thetas, base=None):
    """Ascending bulk indices ``k_1 = base``, ``k_{i+1} = k_i + ceil(n^theta_i)``.

    ``base`` defaults to ``n // 2`` when every ``theta < 1``.  A gap with
    ``theta = 1`` is taken as ``ceil(n / 4)`` so that the pair stays in the bulk
    with distinct limits ``k/n``.
    """
    if base is None:
        base = n // 4 if any(t >= 1.0 for t in thetas) else n // 2
    ks = [int(base)]
    for t in thetas:
        gap = int(math.ceil(n / 4)) if t >= 1.0 else int(math.ceil(n ** t))
        ks.append(ks[-1] + gap)
    if ks[0] < 1 or ks[-1] > n - 1:
        raise DomainError(f"bulk indices {ks} leave [1, n-1] for n={n}")
    return tuple(ks)


def edge_indices(n, gamma, thetas):
    """Ascending edge indices ``k_1 = ceil(n^gamma)``, ``k_{i+1} = k_i + ceil(n^theta_i)``.

    Index ``k`` designates eigenvalue ``x_{n-k}``.
    """
    ks = [int(math.ceil(n ** gamma))]
    for t in thetas:
        ks.append(ks[-1] + int(math.ceil(n ** t)))
    if ks[0] < 2 or ks[-1] >= n:
        raise DomainError(f"edge indices {ks} invalid for n={n}")
    return tuple(ks)


def hermite_zero_estimate(n, k, k0=10, constant=1.0):
    """Location estimate for the ``k``-th zero of ``H_n``, with its error bound.

    With ``alpha = k/n`` and ``s = G^{-1}(alpha)``,

        z_k / sqrt(2n) ~ G^{-1}(alpha - arcsin(s) / (2 pi n) - 1/(2n))

    and the error bound is ``constant / (n^2 (alpha (1 - alpha))^(4/3))`` in
    the same scaled units.  Both are returned multiplied by ``sqrt(2n)`` so they
    compare directly with raw zeros.  The ``-1/(2n)`` shift is what makes the
    estimate accurate to ``O(n^-2)``; a ``+1/(2n)`` shift would miss by a full
    zero spacing.

    Raises
    ------
    DomainError
        Unless ``k0 <= k <= n - k0``.
    """
    if not k0 <= k <= n - k0:
        raise DomainError(f"zero index needs {k0} <= k <= n-{k0}, got k={k}, n={n}")
    alpha = k / n
    s = semicircle_quantile(alpha)
    arg = alpha - math.asin(s) / (2.0 * math.pi * n) - 1.0 / (2.0 * n)
    root = math.sqrt(2.0 * n)
    bound = constant / (n * n * (alpha * (1.0 - alpha)) ** (4.0 / 3.0))
    return semicircle_quantile(arg) * root, bound * root


def hermite_zero_simple(n, k):
    """The cruder location ``sqrt(2n) G^{-1}(k/n)``."""
    return math.sqrt(2.0 * n) * semicircle_quantile(k / n)


def fit_zero_constant(n, zeros, lo_frac=0.2, hi_frac=0.8):
    """Smallest ``C`` with ``|z_k - sqrt(2n) G^{-1}(k/n)| <= C / sqrt(n)`` over bulk ``k``.

    Parameters
    ----------
    zeros : array_like
        Ascending zeros ``z_1 < ... < z_n``.
    """
    zeros = np.asarray(zeros, dtype=float)
    ks = range(max(1, int(math.ceil(lo_frac * n))), int(math.floor(hi_frac * n)) + 1)
    return max(abs(zeros[k - 1] - hermite_zero_simple(n, k)) * math.sqrt(n) for k in ks)


def mosteller_correlation(lambdas):
    """Limit correlations of sample quantiles at levels ``lambda_1 < ... < lambda_m``.

    ``rho_jj' = sqrt(lambda_j (1 - lambda_j') / (lambda_j' (1 - lambda_j)))``
    for ``j <= j'``.
    """
    lam = [float(x) for x in lambdas]
    if any(not 0.0 < x < 1.0 for x in lam):
        raise DomainError(f"quantile levels must lie in (0, 1), got {lam}")
    if any(b < a for a, b in zip(lam, lam[1:])):
        raise DomainError(f"quantile levels must be ascending, got {lam}")
    m = len(lam)
    rho = np.eye(m)
    for i in range(m):
        for j in range(i + 1, m):
            rho[i, j] = rho[j, i] = math.sqrt(lam[i] * (1.0 - lam[j]) / (lam[j] * (1.0 - lam[i])))
    return CovarianceModel(rho)
