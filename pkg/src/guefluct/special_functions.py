"""Weighted Hermite functions, the Airy function and large-n Hermite asymptotics.

Conventions
-----------
``h_i`` are the Hermite polynomials orthonormal with respect to ``exp(-x**2)``.
Everything here works with the *weighted* functions

    phi_i(x) = h_i(x) * exp(-x**2 / 2),

which are orthonormal in plain L2(R) and satisfy

    phi_{i+1}(x) = sqrt(2/(i+1)) * x * phi_i(x) - sqrt(i/(i+1)) * phi_{i-1}(x),
    phi_0(x) = pi**(-1/4) * exp(-x**2/2).

In the rescaled variable ``x -> sqrt(2n) x`` the spectrum of an n x n GUE matrix
fills [-1, 1]; the asymptotic formulas below are written in that variable, so
``hermite_asymptotic(n, x, ...)`` approximates ``phi_n(sqrt(2n) x)``.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import RegimeMismatch

__all__ = [
    "HermiteRegime",
    "AiryPair",
    "hermite_weighted",
    "hermite_pair",
    "hermite_triple",
    "hermite_table",
    "hermite_rows",
    "airy",
    "airy_ai",
    "classify_regime",
    "hermite_asymptotic",
    "hermite_envelope",
    "edge_phase",
    "edge_turning",
    "edge_turning_derivative",
    "density_asymptotic",
    "DEFAULT_DELTA",
    "AIRY_SWITCH",
]

DEFAULT_DELTA = 0.1

_PI_M14 = math.pi ** -0.25
_SQRT2 = math.sqrt(2.0)

# Mantissa/exponent split for the recurrence: the seed exp(-x^2/2) underflows
# for |x| > 38.6 long before the functions themselves become negligible.
_RESCALE_BITS = 512
_BIG = 2.0 ** _RESCALE_BITS
_TINY = 2.0 ** -_RESCALE_BITS
_LOG_BIG = _RESCALE_BITS * math.log(2.0)


def _check_period(xmax):
    # per-step growth is at most sqrt(2)|x| + 1; keep |p| < 2**(512 + 480)
    growth_bits = math.log2(_SQRT2 * xmax + 2.0)
    return max(1, int(480 // growth_bits))


def hermite_rows(n, x):
    """Yield ``phi_0(x), phi_1(x), ..., phi_n(x)`` one row at a time.

    ``x`` may be a scalar or an array; every yielded row has the shape of ``x``.
    The recurrence runs on mantissas with a separate per-point scale factor so
    that neither the Gaussian seed nor intermediate growth leaves double range.
    """
    x = np.array(x, dtype=float, copy=True)
    logf = -0.5 * x * x
    f = np.exp(logf)
    p = np.full_like(x, _PI_M14)
    yield p * f
    if n == 0:
        return
    p_prev, p = p, _SQRT2 * x * p
    yield p * f
    period = _check_period(float(np.max(np.abs(x), initial=0.0)))
    for i in range(1, n):
        p_prev, p = p, math.sqrt(2.0 / (i + 1)) * x * p - math.sqrt(i / (i + 1)) * p_prev
        if i % period == 0:
            big = np.abs(p) > _BIG
            if big.any():
                p = np.where(big, p * _TINY, p)
                p_prev = np.where(big, p_prev * _TINY, p_prev)
                logf = np.where(big, logf + _LOG_BIG, logf)
                f = np.exp(logf)
        yield p * f


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


def hermite_weighted(n, x):
    """Weighted orthonormal Hermite function ``h_n(x) exp(-x^2/2)``.

    Parameters
    ----------
    n : int
        Degree, ``n >= 0``.
    x : float or ndarray
        Evaluation point(s).

    Returns
    -------
    float or ndarray
        ``phi_n(x)``, same shape as ``x``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    row = None
    for row in hermite_rows(n, x):
        pass
    return _scalar_or_array(row, x)


def hermite_pair(n, x):
    """Return ``(phi_{n-1}(x), phi_n(x))`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("hermite_pair needs n >= 1")
    prev = cur = None
    for row in hermite_rows(n, x):
        prev, cur = cur, row
    return _scalar_or_array(prev, x), _scalar_or_array(cur, x)


def hermite_triple(n, x):
    """Return ``(phi_{n-1}(x), phi_n(x), phi_{n+1}(x))`` for ``n >= 1``."""
    if n < 1:
        raise ValueError("hermite_triple needs n >= 1")
    a = b = c = None
    for row in hermite_rows(n + 1, x):
        a, b, c = b, c, row
    return _scalar_or_array(a, x), _scalar_or_array(b, x), _scalar_or_array(c, x)


def hermite_table(n, x):
    """Stack ``phi_0 .. phi_n`` at ``x`` into an array of shape ``(n + 1,) + x.shape``."""
    return np.stack(list(hermite_rows(n, x)))


# ---------------------------------------------------------------------------
# Airy function
# ---------------------------------------------------------------------------

class AiryPair(tuple):
    """``(ai, ai_prime)`` with attribute access."""

    __slots__ = ()

    def __new__(cls, ai, ai_prime):
        return super().__new__(cls, (ai, ai_prime))

    @property
    def ai(self):
        return self[0]

    @property
    def ai_prime(self):
        return self[1]

    def __repr__(self):
        return f"AiryPair(ai={self[0]!r}, ai_prime={self[1]!r})"


AIRY_SWITCH = 5.5
# On the negative axis the asymptotic series only reaches 1e-12 below about -8,
# while the Maclaurin series degrades past -6; the gap is bridged by Taylor
# expansions re-centred at -6.5 and -7.5.
_AIRY_NEG_SERIES = -6.0
_AIRY_NEG_ASYMPTOTIC = -8.0
_AIRY_CENTRES = (-6.5, -7.5)

_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_AIP0 = -(3.0 ** (-1.0 / 3.0)) / math.gamma(1.0 / 3.0)
_MACLAURIN_TERMS = 48
_TAYLOR_TERMS = 40


def _asymptotic_coefficients(count):
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return np.array(u), np.array(v)


_U, _V = _asymptotic_coefficients(40)


def _airy_maclaurin(x):
    # Ai = Ai(0) f(x) + Ai'(0) g(x) with f, g the two power-series solutions.
    x3 = x * x * x
    tf = np.ones_like(x)
    tg = x.copy()
    f = np.zeros_like(x)
    g = np.zeros_like(x)
    fp = np.zeros_like(x)
    gp = np.zeros_like(x)
    # derivative terms: d/dx x^(3k) = 3k x^(3k-1), d/dx x^(3k+1) = (3k+1) x^(3k)
    dtf = np.zeros_like(x)
    dtg = np.ones_like(x)
    for k in range(_MACLAURIN_TERMS):
        f += tf
        g += tg
        fp += dtf
        gp += dtg
        dtf = tf * x * x / (3 * k + 2)
        dtg = tg * x * x / (3 * k + 3)
        tf = tf * x3 / ((3 * k + 2) * (3 * k + 3))
        tg = tg * x3 / ((3 * k + 3) * (3 * k + 4))
    return _AI0 * f + _AIP0 * g, _AI0 * fp + _AIP0 * gp


def _airy_taylor(c, ai_c, aip_c, h):
    # Taylor series about c from y'' = x y:  a_{k+2} = (c a_k + a_{k-1}) / ((k+1)(k+2))
    a = [ai_c, aip_c, c * ai_c / 2.0]
    for k in range(1, _TAYLOR_TERMS):
        a.append((c * a[k] + a[k - 1]) / ((k + 2) * (k + 1)))
    value = np.zeros_like(h)
    deriv = np.zeros_like(h)
    for k in range(len(a) - 1, 0, -1):
        value = value * h + a[k]
        deriv = deriv * h + k * a[k]
    value = value * h + a[0]
    return value, deriv


def _airy_positive_asymptotic(x):
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    s = np.zeros_like(x)
    sp = np.zeros_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(len(_U)):
        t = (-1) ** k * _U[k] / zeta ** k
        tp = (-1) ** k * _V[k] / zeta ** k
        active &= np.abs(t) < prev
        s = np.where(active, s + t, s)
        sp = np.where(active, sp + tp, sp)
        prev = np.where(active, np.abs(t), prev)
    e = np.exp(-zeta)
    root = x ** 0.25
    ai = e / (2.0 * math.sqrt(math.pi) * root) * s
    aip = -root * e / (2.0 * math.sqrt(math.pi)) * sp
    return ai, aip


def _airy_negative_asymptotic(x):
    r = -x
    zeta = 2.0 / 3.0 * r * np.sqrt(r)
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    pp = np.zeros_like(x)
    qp = np.zeros_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(len(_U) // 2):
        t0 = _U[2 * k] / zeta ** (2 * k)
        t1 = _U[2 * k + 1] / zeta ** (2 * k + 1)
        active &= t0 < prev
        sign = (-1) ** k
        p = np.where(active, p + sign * t0, p)
        q = np.where(active, q + sign * t1, q)
        pp = np.where(active, pp + sign * _V[2 * k] / zeta ** (2 * k), pp)
        qp = np.where(active, qp + sign * _V[2 * k + 1] / zeta ** (2 * k + 1), qp)
        prev = np.where(active, t1, prev)
    theta = zeta - math.pi / 4.0
    c, s = np.cos(theta), np.sin(theta)
    root = r ** 0.25
    ai = (c * p + s * q) / (math.sqrt(math.pi) * root)
    aip = root / math.sqrt(math.pi) * (s * pp - c * qp)
    return ai, aip


def _taylor_centres():
    # seed from the negative asymptotic branch at -8.5, then step upward
    start = np.array([-8.5])
    ai, aip = _airy_negative_asymptotic(start)
    values = {}
    here, a0, a1 = -8.5, ai, aip
    for c in sorted(_AIRY_CENTRES):
        a0, a1 = _airy_taylor(here, float(a0[0]), float(a1[0]), np.array([c - here]))
        values[c] = (float(a0[0]), float(a1[0]))
        here = c
    return values


_CENTRE_VALUES = _taylor_centres()


def airy(x):
    """Airy function and its derivative.

    Branches: Maclaurin series on ``[-6, 5.5)``, the exponentially decaying
    asymptotic expansion on ``[5.5, inf)``, the oscillatory asymptotic
    expansion on ``(-inf, -8]`` and Taylor expansions about -6.5 and -7.5 in
    between.  Absolute error is below 1e-12 on ``[-20, 20]``.

    Returns
    -------
    AiryPair
        ``(Ai(x), Ai'(x))``; scalars for scalar input, arrays otherwise.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    ai = np.empty_like(xa)
    aip = np.empty_like(xa)

    m = xa >= AIRY_SWITCH
    if m.any():
        ai[m], aip[m] = _airy_positive_asymptotic(xa[m])
    m = (xa >= _AIRY_NEG_SERIES) & (xa < AIRY_SWITCH)
    if m.any():
        ai[m], aip[m] = _airy_maclaurin(xa[m])
    m = xa <= _AIRY_NEG_ASYMPTOTIC
    if m.any():
        ai[m], aip[m] = _airy_negative_asymptotic(xa[m])
    m = (xa > _AIRY_NEG_ASYMPTOTIC) & (xa < _AIRY_NEG_SERIES)
    if m.any():
        xs = xa[m]
        centre = np.where(xs >= -7.0, -6.5, -7.5)
        va = np.empty_like(xs)
        vp = np.empty_like(xs)
        for c in _AIRY_CENTRES:
            sel = centre == c
            if sel.any():
                a0, a1 = _CENTRE_VALUES[c]
                va[sel], vp[sel] = _airy_taylor(c, a0, a1, xs[sel] - c)
        ai[m], aip[m] = va, vp

    nan = np.isnan(xa)
    ai[nan] = np.nan
    aip[nan] = np.nan
    if np.ndim(x) == 0:
        return AiryPair(float(ai[0]), float(aip[0]))
    shape = np.shape(x)
    return AiryPair(ai.reshape(shape), aip.reshape(shape))


def airy_ai(x):
    """``Ai(x)`` alone."""
    return airy(x)[0]


# ---------------------------------------------------------------------------
# Large-n asymptotics in the rescaled variable
# ---------------------------------------------------------------------------

class HermiteRegime(enum.Enum):
    """Validity ranges of the Plancherel-Rotach type formulas (x >= 0 side).

    Bulk ``|x| < 1 - delta``, EdgeInside ``[1 - delta, 1)``,
    EdgeOutside ``[1, 1 + delta)``, FarOutside ``[1 + delta, inf)``.
    """

    BULK = "bulk"
    EDGE_INSIDE = "edge_inside"
    EDGE_OUTSIDE = "edge_outside"
    FAR_OUTSIDE = "far_outside"

    def contains(self, x, delta=DEFAULT_DELTA):
        """Closed validity range; neighbouring ranges share their endpoints."""
        if self is HermiteRegime.BULK:
            return abs(x) <= 1.0 - delta
        if self is HermiteRegime.EDGE_INSIDE:
            return 1.0 - delta <= x <= 1.0
        if self is HermiteRegime.EDGE_OUTSIDE:
            return 1.0 <= x <= 1.0 + delta
        return x >= 1.0 + delta


def classify_regime(x, delta=DEFAULT_DELTA):
    """The unique regime whose left-closed range ``[a, b)`` contains ``x``.

    The ranges are ``[0, 1-delta)``, ``[1-delta, 1)``, ``[1, 1+delta)`` and
    ``[1+delta, inf)``; negative ``x`` is accepted only inside the bulk.
    """
    if abs(x) < 1.0 - delta:
        return HermiteRegime.BULK
    if x < 0.0:
        raise RegimeMismatch(f"x={x} is left of the bulk range for delta={delta}")
    if x < 1.0:
        return HermiteRegime.EDGE_INSIDE
    if x < 1.0 + delta:
        return HermiteRegime.EDGE_OUTSIDE
    return HermiteRegime.FAR_OUTSIDE


_F_SERIES_RADIUS = 0.05


def _edge_phase_series(x):
    # sqrt(|1 - y^2|) = sqrt(2s) sqrt(1 -+ s/2) with s = |1 - y|; integrate the
    # binomial series termwise to avoid the cancellation in the closed forms
    h = abs(1.0 - x)
    sign = -1.0 if x < 1.0 else 1.0
    total = 0.0
    coef = 1.0
    for j in range(30):
        total += coef * h ** (j + 1.5) / (2.0 ** j * (j + 1.5))
        coef *= sign * (0.5 - j) / (j + 1)
    return math.sqrt(2.0) * total


def edge_phase(x):
    """``F(x) = |int_x^1 sqrt|1 - y^2|| dy|`` in closed form.

    Inside ``[-1, 1]`` this is ``(arccos x - x sqrt(1 - x^2)) / 2``; to the right of
    1 it is ``(x sqrt(x^2 - 1) - arccosh x) / 2``.  Left of -1 the quarter-disc
    area ``pi/2`` is added to the outer piece.
    """
    x = float(x)
    if abs(x - 1.0) < _F_SERIES_RADIUS:
        return _edge_phase_series(x)
    if x > 1.0:
        return 0.5 * (x * math.sqrt(x * x - 1.0) - math.acosh(x))
    if x >= -1.0:
        return 0.5 * (math.acos(x) - x * math.sqrt(max(0.0, 1.0 - x * x)))
    ax = -x
    return 0.5 * math.pi + 0.5 * (ax * math.sqrt(ax * ax - 1.0) - math.acosh(ax))


def edge_turning(n, x):
    """Signed edge variable ``Phi``: ``-(3nF)^(2/3)`` left of 1, ``+(3nF)^(2/3)`` right of it."""
    value = (3.0 * n * edge_phase(x)) ** (2.0 / 3.0)
    return -value if x <= 1.0 else value


def edge_turning_derivative(n, x):
    """``d Phi / dx``; positive on both sides, equal to ``2 n^(2/3)`` at ``x = 1``."""
    if x == 1.0:
        return 2.0 * n ** (2.0 / 3.0)
    s = 3.0 * n * edge_phase(x)
    return 2.0 * n * math.sqrt(abs(1.0 - x * x)) * s ** (-1.0 / 3.0)


def hermite_envelope(n, x):
    """Bulk amplitude ``sqrt(2 / (pi sqrt(2n))) (1 - x^2)^(-1/4)`` of ``phi_n(sqrt(2n) x)``."""
    return math.sqrt(2.0 / (math.pi * math.sqrt(2.0 * n))) / (1.0 - x * x) ** 0.25


def hermite_asymptotic(n, x, regime, delta=DEFAULT_DELTA):
    """Leading-order approximation of ``phi_n(sqrt(2n) x)``.

    Bulk is the cosine form, the two edge regimes are Airy forms, and
    FarOutside returns the magnitude bound ``n^(-1/4) exp(-n F(x))`` (unit
    constant) rather than a value.

    Raises
    ------
    RegimeMismatch
        If ``x`` lies outside ``regime`` for this ``delta``.
    """
    regime = HermiteRegime(regime)
    if not regime.contains(x, delta):
        raise RegimeMismatch(f"x={x} is not in regime {regime.value} (delta={delta})")
    F = edge_phase(x)
    if regime is HermiteRegime.BULK:
        return hermite_envelope(n, x) * math.cos(2.0 * n * F - 0.5 * math.asin(x))
    if regime is HermiteRegime.FAR_OUTSIDE:
        return n ** -0.25 * math.exp(-n * F)

    pref = (2.0 * n) ** -0.25
    if x == 1.0:
        a0, a1 = airy(0.0)
        s = (2.0 * _SQRT2 * n) ** (1.0 / 6.0) * 2.0 ** 0.25
        return pref * (s * a0 - a1 / s)
    s = 3.0 * n * F
    if regime is HermiteRegime.EDGE_INSIDE:
        ai, aip = airy(-s ** (2.0 / 3.0))
        ratio = (1.0 + x) / (1.0 - x)
    else:
        ai, aip = airy(s ** (2.0 / 3.0))
        ratio = (x + 1.0) / (x - 1.0)
    return pref * (ratio ** 0.25 * s ** (1.0 / 6.0) * ai - ratio ** -0.25 * s ** (-1.0 / 6.0) * aip)


def _gamma_log_derivative(x):
    # real logarithmic derivative of ((x-1)/(x+1))^(1/4)
    return 0.25 * (1.0 / (x - 1.0) - 1.0 / (x + 1.0))


def _edge_density(n, x):
    phi = edge_turning(n, x)
    dphi = edge_turning_derivative(n, x)
    ai, aip = airy(phi)
    return (dphi / (4.0 * phi) - _gamma_log_derivative(x)) * (2.0 * ai * aip) + dphi * (aip * aip - phi * ai * ai)


def density_asymptotic(n, x, mode, delta=DEFAULT_DELTA):
    """Asymptotic scaled eigenvalue density ``n rho_n(x)``.

    ``n rho_n(x) = sqrt(2n) K_n(sqrt(2n) x, sqrt(2n) x)`` integrates to ``n``.

    Parameters
    ----------
    mode : {"bulk", "edge"}
        Bulk uses the semicircle plus its first oscillatory correction and
        needs ``|x| <= 1 - delta``.  Edge uses the Airy expression and needs
        ``0 <= x <= 1 + delta``.
    """
    mode = str(mode).lower()
    if mode == "bulk":
        if abs(x) > 1.0 - delta:
            raise RegimeMismatch(f"bulk density needs |x| <= {1 - delta}, got {x}")
        lead = n * 2.0 / math.pi * math.sqrt(1.0 - x * x)
        amp = (1.0 / (4.0 * math.pi)) * (1.0 / (x - 1.0) - 1.0 / (x + 1.0))
        # one full oscillation per eigenvalue: phase 2*pi * n * (2/pi) * F(x)
        return lead + amp * math.cos(4.0 * n * edge_phase(x))
    if mode == "edge":
        if not 0.0 <= x <= 1.0 + delta:
            raise RegimeMismatch(f"edge density needs 0 <= x <= {1 + delta}, got {x}")
        if abs(x - 1.0) < 1e-7:
            # the two O(1/(x-1)) pieces cancel; average across the removable point
            h = 1e-5
            return 0.5 * (_edge_density(n, 1.0 - h) + _edge_density(n, 1.0 + h))
        return _edge_density(n, x)
    raise ValueError(f"unknown density mode {mode!r}")
