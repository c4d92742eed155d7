"""Symmetric tridiagonal eigensolvers and Hermitian tridiagonalization (numba).

* :func:`tql_eigenvalues` and :func:`tql_eigensystem`: implicit QL with
  Wilkinson shifts, at most 50 iterations per eigenvalue.
* :func:`hermitian_tridiagonalize`: Householder reduction of a complex
  Hermitian matrix to a *real* symmetric tridiagonal (the complex
  off-diagonals are rotated to their moduli by a diagonal unitary).
* :func:`sturm_count` and :func:`bisect_eigenvalues`: selected eigenvalues by
  Sturm-sequence bisection, used when only a few eigenvalues per spectrum are
  needed.

Tridiagonals are passed as ``(d, e)`` with ``d`` of length n and ``e`` of
length n - 1 holding the sub-diagonal.
"""

from __future__ import annotations

import math

import numba
import numpy as np

from .errors import EigensolverFailure

__all__ = [
    "MAX_ITERATIONS",
    "tql_eigenvalues",
    "tql_eigensystem",
    "hermitian_tridiagonalize",
    "sturm_count",
    "bisect_eigenvalues",
    "bisect_eigenvalues_batch",
]

MAX_ITERATIONS = 50


@numba.njit(cache=True, nogil=True)
def _tql(d, e, z, want_vectors):
    # d, e are overwritten; e has length n with e[n-1] = 0 as workspace.
    # Returns 0 on success or 1 + index of the eigenvalue that failed.
    n = d.shape[0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            if it == MAX_ITERATIONS:
                return l + 1
            it += 1
            # Wilkinson shift from the leading 2x2 block
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0.0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                if want_vectors:
                    for k in range(n):
                        f = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * f
                        z[k, i] = c * z[k, i] - s * f
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def _prepare(d, e):
    d = np.array(d, dtype=np.float64, copy=True)
    n = d.shape[0]
    work = np.zeros(n)
    if n > 1:
        work[: n - 1] = np.asarray(e, dtype=np.float64)
    return d, work


def tql_eigenvalues(d, e):
    """Ascending eigenvalues of the symmetric tridiagonal ``(d, e)``.

    Raises
    ------
    EigensolverFailure
        If an eigenvalue needs more than 50 QL iterations.
    """
    d, work = _prepare(d, e)
    status = _tql(d, work, np.zeros((1, 1)), False)
    if status:
        raise EigensolverFailure(f"QL did not converge for eigenvalue {status - 1}")
    d.sort()
    return d


def tql_eigensystem(d, e):
    """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
    d, work = _prepare(d, e)
    z = np.eye(d.shape[0])
    status = _tql(d, work, z, True)
    if status:
        raise EigensolverFailure(f"QL did not converge for eigenvalue {status - 1}")
    order = np.argsort(d, kind="stable")
    return d[order], z[:, order]


@numba.njit(cache=True, nogil=True)
def _householder(a):
    # In-place reduction of the Hermitian matrix a (lower triangle used).
    n = a.shape[0]
    d = np.empty(n)
    e = np.zeros(max(n - 1, 0))
    v = np.empty(n, dtype=np.complex128)
    p = np.empty(n, dtype=np.complex128)
    for k in range(n - 2):
        m = n - k - 1
        norm2 = 0.0
        for i in range(k + 1, n):
            norm2 += a[i, k].real ** 2 + a[i, k].imag ** 2
        xnorm = math.sqrt(norm2)
        d[k] = a[k, k].real
        if xnorm == 0.0:
            e[k] = 0.0
            continue
        x0 = a[k + 1, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0.0 else 1.0 + 0.0j
        alpha = -phase * xnorm
        # v = x - alpha e_1, normalized
        for i in range(m):
            v[i] = a[k + 1 + i, k]
        v[0] -= alpha
        vn = 0.0
        for i in range(m):
            vn += v[i].real ** 2 + v[i].imag ** 2
        vn = math.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        # p = 2 A v using the lower triangle of the trailing block
        for i in range(m):
            p[i] = 0.0
        for i in range(m):
            ri = k + 1 + i
            acc = a[ri, ri].real * v[i]
            vi = v[i]
            for j in range(i):
                aij = a[ri, k + 1 + j]
                acc += aij * v[j]
                p[j] += aij.conjugate() * vi
            p[i] += acc
        for i in range(m):
            p[i] *= 2.0
        kk = 0.0j
        for i in range(m):
            kk += v[i].conjugate() * p[i]
        # w = p - (v^H p) v ; A <- A - v w^H - w v^H
        for i in range(m):
            p[i] -= kk * v[i]
        for i in range(m):
            ri = k + 1 + i
            vi = v[i]
            wi = p[i]
            for j in range(i + 1):
                a[ri, k + 1 + j] -= vi * p[j].conjugate() + wi * v[j].conjugate()
        e[k] = xnorm
    if n >= 2:
        d[n - 2] = a[n - 2, n - 2].real
        e[n - 2] = abs(a[n - 1, n - 2])
    if n >= 1:
        d[n - 1] = a[n - 1, n - 1].real
    return d, e


def hermitian_tridiagonalize(h):
    """Real symmetric tridiagonal ``(d, e)`` unitarily similar to Hermitian ``h``.

    Only the lower triangle of ``h`` is read; ``h`` is not modified.
    """
    a = np.array(h, dtype=np.complex128, copy=True, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    return _householder(a)


@numba.njit(cache=True, nogil=True)
def _sturm(d, e2, x):
    # number of eigenvalues strictly below x (LDL^T pivot signs)
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


def sturm_count(d, e, x):
    """Number of eigenvalues of ``(d, e)`` strictly below ``x``."""
    e = np.asarray(e, dtype=np.float64)
    return int(_sturm(np.asarray(d, dtype=np.float64), e * e, float(x)))


@numba.njit(cache=True, nogil=True)
def _bisect(d, e2, lo, hi, ranks, out):
    # out[j] = eigenvalue of 0-based rank ranks[j]
    for j in range(ranks.shape[0]):
        k = ranks[j]
        a = lo
        b = hi
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if _sturm(d, e2, mid) > k:
                b = mid
            else:
                a = mid
        out[j] = 0.5 * (a + b)


@numba.njit(cache=True, nogil=True)
def _gershgorin(d, e):
    n = d.shape[0]
    lo = np.inf
    hi = -np.inf
    for i in range(n):
        r = 0.0
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    pad = 1e-12 * max(abs(lo), abs(hi), 1.0)
    return lo - pad, hi + pad


def bisect_eigenvalues(d, e, ranks):
    """Eigenvalues of the given 0-based ascending ``ranks`` by Sturm bisection.

    Bisection runs until the bracket cannot be split in floating point.
    """
    d = np.asarray(d, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    ranks = np.asarray(ranks, dtype=np.int64)
    lo, hi = _gershgorin(d, e)
    out = np.empty(ranks.shape[0])
    _bisect(d, e * e, lo, hi, ranks, out)
    return out


@numba.njit(cache=True, nogil=True)
def _bisect_batch(dd, ee2, ee, ranks, out):
    for r in range(dd.shape[0]):
        lo, hi = _gershgorin(dd[r], ee[r])
        _bisect(dd[r], ee2[r], lo, hi, ranks, out[r])


def bisect_eigenvalues_batch(d, e, ranks):
    """Row-wise :func:`bisect_eigenvalues` for stacked tridiagonals.

    Parameters
    ----------
    d : ndarray, shape (replicates, n)
    e : ndarray, shape (replicates, n - 1)
    ranks : sequence of int
        0-based ascending ranks, shared by every row.
    """
    d = np.ascontiguousarray(d, dtype=np.float64)
    e = np.ascontiguousarray(e, dtype=np.float64)
    ranks = np.asarray(ranks, dtype=np.int64)
    out = np.empty((d.shape[0], ranks.shape[0]))
    _bisect_batch(d, e * e, e, ranks, out)
    return out
