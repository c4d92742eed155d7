"""Closed forms for tail integrals of Airy products, with a quadrature oracle.

Every closed form follows from ``Ai'' = x Ai`` and is evaluated through
:func:`guefluct.special_functions.airy`, so agreement with the oracle also
exercises the Airy implementation end to end.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .errors import DomainError
from .quadrature import integrate
from .special_functions import airy

__all__ = [
    "AiryIntegralKind",
    "airy_integral_closed",
    "airy_integral_oracle",
    "airy_integrand",
    "ualpha_cross_integral",
    "ualpha_cross_oracle",
    "ORACLE_UPPER",
]

ORACLE_UPPER = 40.0
ORACLE_TOL = 1e-10


class AiryIntegralKind(enum.Enum):
    """Integrand of ``int_x^inf``: Ai^2, y Ai^2, Ai'^2, y^2 Ai^2 or y Ai'^2."""

    AI2 = "Ai2"
    YAI2 = "YAi2"
    AIP2 = "Aip2"
    Y2AI2 = "Y2Ai2"
    YAIP2 = "YAip2"


def airy_integrand(kind, y):
    """The literal integrand of ``kind`` at ``y`` (vectorized)."""
    kind = AiryIntegralKind(kind)
    ai, aip = airy(y)
    if kind is AiryIntegralKind.AI2:
        return ai * ai
    if kind is AiryIntegralKind.YAI2:
        return y * ai * ai
    if kind is AiryIntegralKind.AIP2:
        return aip * aip
    if kind is AiryIntegralKind.Y2AI2:
        return y * y * ai * ai
    return y * aip * aip


def _check_x(x):
    if not math.isfinite(x) or abs(x) > 20.0:
        raise DomainError(f"Airy integrals are supported for |x| <= 20, got {x}")


def airy_integral_closed(kind, x):
    """``int_x^inf`` of the ``kind`` integrand in closed form.

    =======  ==========================================================
    Ai2      ``Ai'^2 - x Ai^2``
    YAi2     ``(x Ai'^2 - x^2 Ai^2 - Ai Ai') / 3``
    Aip2     ``(x^2 Ai^2 - x Ai'^2 - 2 Ai Ai') / 3``
    Y2Ai2    ``(x^2 Ai'^2 - x^3 Ai^2 - 2 x Ai Ai' + Ai^2) / 5``
    YAip2    ``(x^3 Ai^2 - x^2 Ai'^2 - 3 x Ai Ai' + 3/2 Ai^2) / 5``
    =======  ==========================================================
    """
    kind = AiryIntegralKind(kind)
    x = float(x)
    _check_x(x)
    a, b = airy(x)
    a2, b2, ab = a * a, b * b, a * b
    if kind is AiryIntegralKind.AI2:
        return b2 - x * a2
    if kind is AiryIntegralKind.YAI2:
        return (x * b2 - x * x * a2 - ab) / 3.0
    if kind is AiryIntegralKind.AIP2:
        return (x * x * a2 - x * b2 - 2.0 * ab) / 3.0
    if kind is AiryIntegralKind.Y2AI2:
        return (x * x * b2 - x ** 3 * a2 - 2.0 * x * ab + a2) / 5.0
    return (x ** 3 * a2 - x * x * b2 - 3.0 * x * ab + 1.5 * a2) / 5.0


def _airy_breaks(x, upper=ORACLE_UPPER):
    # panels of one local wavelength 2 pi / sqrt|y| on the oscillatory side
    pts = [x]
    y = x
    while y < -1.0:
        y = min(-1.0, y + 2.0 * math.pi / math.sqrt(-y))
        pts.append(y)
    pts.extend(v for v in np.arange(math.floor(y) + 1.0, upper, 1.0) if v > y)
    if pts[-1] < upper:
        pts.append(upper)
    return np.array(pts)


def airy_integral_oracle(kind, x, tol=ORACLE_TOL):
    """Adaptive Gauss-Legendre quadrature of the ``kind`` integrand on ``[x, 40]``.

    The truncated tail beyond 40 is below 1e-300.
    """
    kind = AiryIntegralKind(kind)
    x = float(x)
    _check_x(x)
    return integrate(lambda y: airy_integrand(kind, y), _airy_breaks(x), tol=tol).value


def ualpha_cross_integral(a, alpha, beta):
    """``int_a^inf x Ai(alpha x) Ai(beta x) dx`` for ``alpha != beta``.

    With ``u_c(x) = Ai(c x)`` the Wronskian-type identity
    ``(u_a' u_b - u_a u_b')' = x (alpha^3 - beta^3) u_a u_b`` gives

        (u_alpha(a) u_beta'(a) - u_alpha'(a) u_beta(a)) / (alpha^3 - beta^3).

    As ``alpha, beta -> 1`` this tends to the ``YAi2`` closed form.
    """
    if alpha <= 0.0 or beta <= 0.0:
        raise DomainError("alpha and beta must be positive")
    if alpha == beta:
        raise DomainError("alpha and beta must differ")
    ua, dua = airy(alpha * a)
    ub, dub = airy(beta * a)
    dua *= alpha
    dub *= beta
    return (ua * dub - dua * ub) / (alpha ** 3 - beta ** 3)


def ualpha_cross_oracle(a, alpha, beta, tol=ORACLE_TOL):
    """Direct quadrature of ``x Ai(alpha x) Ai(beta x)`` on ``[a, 40]``."""
    scale = max(alpha, beta)
    breaks = _airy_breaks(a * scale, ORACLE_UPPER * scale) / scale
    return integrate(lambda y: y * airy(alpha * y)[0] * airy(beta * y)[0], breaks, tol=tol).value
