"""GUE spectrum samplers, Hermite zeros and uniform order statistics.

Scale: the GUE here has density proportional to ``exp(-tr H^2)``, i.e.
``H_ii ~ N(0, 1/2)`` and ``Re H_ij, Im H_ij ~ N(0, 1/4)`` for ``i < j``; the
spectrum fills ``[-sqrt(2n), sqrt(2n)]``.

Tridiagonal model: the symmetric tridiagonal matrix with

    d_i ~ N(0, 1/2),        e_k = sqrt(Gamma(shape = n - k, scale = 1) / 2),  k = 1..n-1

has joint eigenvalue density proportional to
``prod |x_i - x_j|^2 exp(-sum x_i^2)``, the same as the dense model.  (This is
the beta = 2 Hermite model ``chi_{2(n-k)} / 2`` on the off-diagonal.)

Random streams: ``SeedSpec(master_seed, stream_index)`` maps to
``numpy.random.Generator(Philox(SeedSequence(master_seed, spawn_key=(stream_index,))))``.
Normal variates use numpy's ziggurat and gamma variates Marsaglia-Tsang; see
:data:`RNG_METADATA`.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass

import numpy as np

from .eigensolver import (
    bisect_eigenvalues_batch,
    hermitian_tridiagonalize,
    tql_eigenvalues,
)
from .errors import DomainError

__all__ = [
    "SeedSpec",
    "Spectrum",
    "RNG_METADATA",
    "make_generator",
    "sample_gue_matrix",
    "sample_gue_dense",
    "gue_tridiagonal_model",
    "sample_gue_tridiagonal",
    "sample_gue_tridiagonal_selected",
    "hermite_zeros",
    "sample_uniform_order_stats",
    "write_spectra_csv",
    "write_spectra_binary",
    "read_spectra_binary",
    "DENSE_MAX_N",
]

DENSE_MAX_N = 2000
HERMITE_ZEROS_MAX_N = 2000

RNG_METADATA = {
    "bit_generator": "Philox4x64-10",
    "seeding": "SeedSequence(master_seed, spawn_key=(stream_index,))",
    "normal": "ziggurat (numpy Generator.standard_normal)",
    "gamma": "Marsaglia-Tsang (numpy Generator.standard_gamma)",
    "numpy": np.__version__,
}

_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    """A reproducible random stream: ``(master_seed, stream_index)``, both unsigned 64-bit."""

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_index"):
            value = getattr(self, name)
            if int(value) != value or not 0 <= value <= _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value}")
            object.__setattr__(self, name, int(value))

    def child(self, index):
        """The stream with the same master seed and ``stream_index = index``."""
        return SeedSpec(self.master_seed, index)


def make_generator(seed):
    """numpy ``Generator`` for ``seed``."""
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.stream_index,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues of one sampled matrix."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1 or ev.size == 0:
            raise DomainError("a spectrum needs at least one eigenvalue")
        if not np.all(np.isfinite(ev)):
            raise DomainError("spectrum contains non-finite values")
        if np.any(np.diff(ev) < 0.0):
            raise DomainError("spectrum must be ascending")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def n(self):
        return self.eigenvalues.size

    def __getitem__(self, k):
        """1-based access ``x_k``."""
        if not 1 <= k <= self.n:
            raise IndexError(f"eigenvalue index {k} out of range 1..{self.n}")
        return float(self.eigenvalues[k - 1])


def _check_n(n, limit=None):
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if limit is not None and n > limit:
        raise DomainError(f"n = {n} exceeds the limit {limit}")


def sample_gue_matrix(n, seed):
    """A dense GUE matrix with density proportional to ``exp(-tr H^2)``."""
    _check_n(n)
    rng = make_generator(seed)
    diag = rng.standard_normal(n) * np.sqrt(0.5)
    re = rng.standard_normal((n, n)) * 0.5
    im = rng.standard_normal((n, n)) * 0.5
    lower = np.tril(re + 1j * im, -1)
    h = lower + lower.conj().T
    h[np.diag_indices(n)] = diag
    return h


def sample_gue_dense(n, seed):
    """Spectrum of :func:`sample_gue_matrix` via Householder reduction and QL.

    Limited to ``n <= 2000``.
    """
    _check_n(n, DENSE_MAX_N)
    h = sample_gue_matrix(n, seed)
    d, e = hermitian_tridiagonalize(h)
    return Spectrum(tql_eigenvalues(d, e))


def gue_tridiagonal_model(n, seed, replicates=None):
    """Diagonal and off-diagonal of the tridiagonal GUE model.

    With ``replicates`` set, returns stacked arrays of shape
    ``(replicates, n)`` and ``(replicates, n - 1)`` drawn from a single stream.
    """
    _check_n(n)
    rng = make_generator(seed)
    shape = (n - 1,) if replicates is None else (replicates, n - 1)
    dshape = (n,) if replicates is None else (replicates, n)
    d = rng.standard_normal(dshape) * np.sqrt(0.5)
    shapes = np.arange(n - 1, 0, -1, dtype=float)
    e = np.sqrt(rng.standard_gamma(np.broadcast_to(shapes, shape)) * 0.5)
    return d, e


def sample_gue_tridiagonal(n, seed):
    """Full spectrum of the tridiagonal GUE model (QL, O(n^2))."""
    d, e = gue_tridiagonal_model(n, seed)
    return Spectrum(tql_eigenvalues(d, e))


def sample_gue_tridiagonal_selected(n, seed, indices, replicates=1):
    """Selected eigenvalues ``x_k`` (1-based ascending) of tridiagonal GUE spectra.

    All ``replicates`` spectra come from the stream ``seed``; row ``r`` of the
    result holds ``x_k`` for each requested ``k`` in spectrum ``r``.  Uses Sturm
    bisection, so the cost is O(n) per requested eigenvalue and bisection step.
    """
    indices = [int(k) for k in indices]
    if any(not 1 <= k <= n for k in indices):
        raise DomainError(f"indices {indices} out of range 1..{n}")
    d, e = gue_tridiagonal_model(n, seed, replicates=replicates)
    return bisect_eigenvalues_batch(d, e, [k - 1 for k in indices])


def hermite_zeros(n):
    """Ascending zeros of ``H_n`` as eigenvalues of its Jacobi matrix.

    The Jacobi matrix has zero diagonal and off-diagonals ``sqrt(k/2)``,
    ``k = 1..n-1``.
    """
    _check_n(n, HERMITE_ZEROS_MAX_N)
    e = np.sqrt(np.arange(1, n, dtype=float) / 2.0)
    z = tql_eigenvalues(np.zeros(n), e)
    # exact symmetry about zero
    z = 0.5 * (z - z[::-1])
    return z


def sample_uniform_order_stats(n, seed, replicates=None):
    """Sorted i.i.d. Uniform(0, 1) samples; shape ``(n,)`` or ``(replicates, n)``."""
    _check_n(n)
    rng = make_generator(seed)
    shape = (n,) if replicates is None else (replicates, n)
    return np.sort(rng.random(shape), axis=-1)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

_MAGIC = b"GUESPEC\0"
_VERSION = 1
_HEADER = struct.Struct("<8sIQQQ")


def write_spectra_csv(path, spectra):
    """One row per replicate, eigenvalues in ascending order, ``repr`` precision."""
    spectra = np.atleast_2d(np.asarray(spectra, dtype=float))
    buf = io.StringIO()
    buf.write(",".join(f"x{k}" for k in range(1, spectra.shape[1] + 1)) + "\n")
    for row in spectra:
        buf.write(",".join(repr(float(v)) for v in row) + "\n")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())


def write_spectra_binary(path, spectra, master_seed):
    """Little-endian float64 rows after a header (magic, version, n, replicates, master_seed)."""
    spectra = np.atleast_2d(np.asarray(spectra, dtype="<f8"))
    reps, n = spectra.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, n, reps, int(master_seed)))
        fh.write(np.ascontiguousarray(spectra).tobytes())


def read_spectra_binary(path):
    """Inverse of :func:`write_spectra_binary`; returns ``(spectra, master_seed)``."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        magic, version, n, reps, seed = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise ValueError("not a spectrum file")
        if version != _VERSION:
            raise ValueError(f"unsupported spectrum file version {version}")
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n * reps:
        raise ValueError("truncated spectrum file")
    return data.reshape(reps, n).astype(float), seed
