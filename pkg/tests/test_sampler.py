import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from guefluct.errors import DomainError
from guefluct.fluctuation_lab import ks_statistic
from guefluct.sampler import (
    SeedSpec,
    Spectrum,
    gue_tridiagonal_model,
    hermite_zeros,
    read_spectra_binary,
    sample_gue_dense,
    sample_gue_matrix,
    sample_gue_tridiagonal,
    sample_gue_tridiagonal_selected,
    sample_uniform_order_stats,
    write_spectra_binary,
    write_spectra_csv,
)
from guefluct.semicircle import semicircle_cdf
from guefluct.special_functions import hermite_weighted


def test_determinism():
    a = sample_gue_tridiagonal(200, SeedSpec(11, 3)).eigenvalues
    b = sample_gue_tridiagonal(200, SeedSpec(11, 3)).eigenvalues
    c = sample_gue_tridiagonal(200, SeedSpec(11, 4)).eigenvalues
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    np.testing.assert_array_equal(sample_gue_dense(50, SeedSpec(2)).eigenvalues, sample_gue_dense(50, SeedSpec(2)).eigenvalues)


def test_seed_validation():
    with pytest.raises(DomainError):
        SeedSpec(-1)
    with pytest.raises(DomainError):
        SeedSpec(1, 2 ** 64)
    assert SeedSpec(5).child(7) == SeedSpec(5, 7)


def test_matrix_hermitian_and_dense_spectrum():
    h = sample_gue_matrix(30, SeedSpec(1))
    np.testing.assert_array_equal(h, h.conj().T)
    np.testing.assert_allclose(sample_gue_dense(30, SeedSpec(1)).eigenvalues, np.linalg.eigvalsh(h), atol=1e-11)


def test_n1_variance_half():
    v = np.array([sample_gue_tridiagonal(1, SeedSpec(0, r))[1] for r in range(4000)])
    assert v.var() == pytest.approx(0.5, abs=0.04)


@pytest.mark.parametrize("sampler", [sample_gue_dense, sample_gue_tridiagonal])
def test_trace_moment(sampler):
    # E tr H^2 = n^2 / 2
    n = 40
    tr2 = [np.sum(sampler(n, SeedSpec(4, r)).eigenvalues ** 2) for r in range(300)]
    assert np.mean(tr2) == pytest.approx(n * n / 2, rel=0.02)


@pytest.mark.parametrize("sampler", [sample_gue_dense, sample_gue_tridiagonal])
def test_semicircle_shape(sampler):
    n = 400
    x = sampler(n, SeedSpec(8)).eigenvalues / math.sqrt(2 * n)
    assert ks_statistic(x, semicircle_cdf) < 0.02


def test_dense_and_tridiagonal_agree_in_law():
    n = 20
    a = [sample_gue_dense(n, SeedSpec(1, r))[n] for r in range(600)]
    b = [sample_gue_tridiagonal(n, SeedSpec(2, r))[n] for r in range(600)]
    assert abs(np.mean(a) - np.mean(b)) < 0.1
    assert np.var(a) == pytest.approx(np.var(b), rel=0.25)


def test_symmetric_in_law():
    top = np.array([sample_gue_tridiagonal(30, SeedSpec(6, r))[30] for r in range(800)])
    bottom = np.array([sample_gue_tridiagonal(30, SeedSpec(6, r))[1] for r in range(800)])
    assert abs(top.mean() + bottom.mean()) < 0.1


def test_max_eigenvalue_near_edge():
    n = 2000
    x = sample_gue_tridiagonal_selected(n, SeedSpec(3), [n], replicates=200)[:, 0]
    # Tracy-Widom (beta = 2) scaling; its mean is about -1.771 and sd 0.90
    tw = (x / math.sqrt(2 * n) - 1) * 2 * n ** (2 / 3)
    assert tw.mean() == pytest.approx(-1.771, abs=0.25)


def test_selected_matches_full():
    n = 300
    d, e = gue_tridiagonal_model(n, SeedSpec(9), replicates=2)
    sel = sample_gue_tridiagonal_selected(n, SeedSpec(9), [1, 150, 300], replicates=2)
    for r in range(2):
        full = np.linalg.eigvalsh(np.diag(d[r]) + np.diag(e[r], 1) + np.diag(e[r], -1))
        np.testing.assert_allclose(sel[r], full[[0, 149, 299]], atol=1e-12)
    with pytest.raises(DomainError):
        sample_gue_tridiagonal_selected(n, SeedSpec(0), [0])


def test_spectrum_indexing():
    s = Spectrum(np.array([-1.0, 0.5, 2.0]))
    assert s[1] == -1.0 and s[3] == 2.0
    with pytest.raises(IndexError):
        s[0]
    with pytest.raises(DomainError):
        Spectrum(np.array([1.0, 0.0]))


class TestHermiteZeros:
    def test_small(self):
        assert hermite_zeros(1).tolist() == [0.0]
        np.testing.assert_allclose(hermite_zeros(2), [-math.sqrt(0.5), math.sqrt(0.5)], rtol=1e-15)

    def test_residual(self):
        z = hermite_zeros(50)
        assert np.max(np.abs(hermite_weighted(50, z))) < 1e-12

    def test_symmetric_and_interlacing(self):
        a, b = hermite_zeros(40), hermite_zeros(41)
        np.testing.assert_array_equal(a, -a[::-1])
        assert np.all(b[:-1] < a) and np.all(a < b[1:])

    def test_limit(self):
        with pytest.raises(DomainError):
            hermite_zeros(2001)


def test_uniform_order_stats():
    u = sample_uniform_order_stats(99, SeedSpec(1), replicates=2000)
    assert np.all(np.diff(u, axis=1) >= 0)
    # E U_(k) = k / (n + 1)
    assert u[:, 24].mean() == pytest.approx(0.25, abs=0.005)


@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2 ** 64 - 1))
def test_binary_round_trip(reps, n, seed):
    import tempfile, os

    data = np.sort(np.random.default_rng(seed % 1000).normal(size=(reps, n)), axis=1)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "s.bin")
        write_spectra_binary(path, data, seed)
        back, s = read_spectra_binary(path)
    np.testing.assert_array_equal(back, data)
    assert s == seed


def test_csv_round_trip(tmp_path):
    data = np.array([[-1.0 / 3.0, 0.1, 2.0 ** 0.5]])
    write_spectra_csv(tmp_path / "s.csv", data)
    back = np.loadtxt(tmp_path / "s.csv", delimiter=",", skiprows=1, ndmin=2)
    np.testing.assert_array_equal(back, data)


def test_binary_rejects_garbage(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"\0" * 40)
    with pytest.raises(ValueError):
        read_spectra_binary(p)
