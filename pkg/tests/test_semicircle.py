import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from guefluct.errors import DomainError
from guefluct.sampler import hermite_zeros
from guefluct.semicircle import (
    CovarianceModel,
    IndexExponents,
    bulk_indices,
    bulk_standardization,
    covariance_bulk,
    covariance_edge,
    edge_indices,
    edge_standardization,
    fit_zero_constant,
    hermite_zero_estimate,
    max_exponent_between,
    mosteller_correlation,
    semicircle_cdf,
    semicircle_quantile,
)

# mpmath quadrature of (2/pi) int_{-1}^{0.5} sqrt(1 - x^2) dx
G_HALF = 0.80449889052211467904
# mpmath root of G(t) = 1/4 at 50 digits
G_INV_QUARTER = -0.40397275329951720932
# n = 10^6, k = 10^3 edge standardization at 50 digits
EDGE_1E6_CENTER = 1394.3383204634832836
EDGE_1E6_SCALE = 0.0078383520513796312444


class TestCdfQuantile:
    def test_values(self):
        assert semicircle_cdf(0.0) == pytest.approx(0.5, abs=1e-16)
        assert semicircle_cdf(1.0) == 1.0
        assert semicircle_cdf(-1.0) == 0.0
        assert semicircle_cdf(0.5) == pytest.approx(G_HALF, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            semicircle_cdf(1.0000001)
        for a in (0.0, 1.0, -0.1):
            with pytest.raises(DomainError):
                semicircle_quantile(a)

    def test_quantiles(self):
        assert semicircle_quantile(0.5) == pytest.approx(0.0, abs=1e-13)
        assert semicircle_quantile(0.25) == pytest.approx(G_INV_QUARTER, abs=1e-12)
        assert semicircle_cdf(semicircle_quantile(0.3)) == pytest.approx(0.3, abs=1e-12)

    @given(st.floats(1e-9, 1 - 1e-9))
    def test_inverse(self, a):
        assert abs(semicircle_cdf(semicircle_quantile(a)) - a) <= 1e-12

    @given(st.floats(-1, 1), st.floats(-1, 1))
    def test_monotone(self, a, b):
        assume(b - a > 1e-12)
        assert semicircle_cdf(a) < semicircle_cdf(b)


class TestStandardization:
    def test_bulk_median(self):
        s = bulk_standardization(100, 50)
        assert s.center == pytest.approx(0.0, abs=1e-12)
        assert s.scale == pytest.approx(math.sqrt(math.log(100) / 400), rel=1e-14)
        assert s.scale == pytest.approx(0.10730, abs=1e-5)
        assert bulk_standardization(4, 2).center == pytest.approx(0.0, abs=1e-12)

    def test_bulk_quarter(self):
        s = bulk_standardization(1000, 250)
        assert s.center == pytest.approx(G_INV_QUARTER * math.sqrt(2000), rel=1e-12)

    def test_bulk_errors_and_warnings(self):
        for k in (0, 100):
            with pytest.raises(DomainError):
                bulk_standardization(100, k)
        with pytest.warns(RuntimeWarning):
            bulk_standardization(1000, 5)

    def test_edge_formula(self):
        n, k = 10000, 100
        s = edge_standardization(n, k)
        center = math.sqrt(2 * n) * (1 - (3 * math.pi * k / (4 * math.sqrt(2) * n)) ** (2 / 3))
        scale = math.sqrt((1 / (12 * math.pi)) ** (2 / 3) * math.log(k) / (n ** (1 / 3) * k ** (2 / 3)))
        assert s.center == pytest.approx(center, rel=1e-15)
        assert s.scale == pytest.approx(scale, rel=1e-15)

    def test_edge_pinned(self):
        s = edge_standardization(10 ** 6, 10 ** 3)
        assert s.center == pytest.approx(EDGE_1E6_CENTER, rel=1e-14)
        assert s.scale == pytest.approx(EDGE_1E6_SCALE, rel=1e-13)

    def test_edge_monotone_in_k(self):
        assert edge_standardization(10 ** 4, 200).center < edge_standardization(10 ** 4, 100).center

    def test_edge_errors(self):
        with pytest.raises(DomainError):
            edge_standardization(100, 1)
        with pytest.warns(RuntimeWarning):
            edge_standardization(100, 30)

    def test_edge_scale_shrinks(self):
        scales = [edge_standardization(n, math.ceil(math.sqrt(n))).scale for n in (1024, 2048, 4096, 8192, 16384)]
        assert all(b < a for a, b in zip(scales, scales[1:]))

    def test_apply(self):
        s = bulk_standardization(100, 50)
        assert s.apply(s.center + 2 * s.scale) == pytest.approx(2.0)


class TestCovariance:
    def test_bulk_examples(self):
        assert covariance_bulk(IndexExponents((), )).lam.tolist() == [[1.0]]
        assert covariance_bulk(IndexExponents((1.0,))).lam[0, 1] == 0.0
        lam = covariance_bulk(IndexExponents((0.5, 0.25))).lam
        assert lam[0, 1] == pytest.approx(0.5)
        assert lam[1, 2] == pytest.approx(0.75)
        assert lam[0, 2] == pytest.approx(0.5)

    def test_edge_examples(self):
        assert covariance_edge(IndexExponents((0.25,), gamma=0.5)).lam[0, 1] == pytest.approx(0.5)
        assert covariance_edge(IndexExponents((0.4999999,), gamma=0.5)).lam[0, 1] == pytest.approx(0.0, abs=1e-6)
        lam = covariance_edge(IndexExponents((0.3, 0.12), gamma=0.6)).lam
        assert lam[0, 1] == pytest.approx(0.5)
        assert lam[1, 2] == pytest.approx(0.8)
        assert lam[0, 2] == pytest.approx(0.5)

    def test_validation(self):
        for thetas in ((0.0,), (1.2,)):
            with pytest.raises(DomainError):
                IndexExponents(thetas)
        with pytest.raises(DomainError):
            IndexExponents((0.6,), gamma=0.5)
        with pytest.raises(DomainError):
            CovarianceModel(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_index_set_includes_last_pair(self):
        # the last pair (j = m) is valid and uses theta_{m-1}
        assert max_exponent_between((0.1, 0.2, 0.7), 2, 3) == 0.7

    @given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=6))
    def test_bulk_model_properties(self, thetas):
        lam = covariance_bulk(IndexExponents(tuple(thetas))).lam
        assert np.all(np.diag(lam) == 1.0)
        np.testing.assert_array_equal(lam, lam.T)
        assert np.all((lam >= 0) & (lam <= 1))
        assert np.linalg.eigvalsh(lam)[0] >= -1e-10

    @given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5), st.data())
    def test_bulk_monotone_in_theta(self, thetas, data):
        k = data.draw(st.integers(0, len(thetas) - 1))
        bigger = list(thetas)
        bigger[k] = data.draw(st.floats(thetas[k], 1.0))
        a = covariance_bulk(IndexExponents(tuple(thetas))).lam
        b = covariance_bulk(IndexExponents(tuple(bigger))).lam
        for i in range(k + 1):
            for j in range(k + 1, len(thetas) + 1):
                assert b[i, j] <= a[i, j] + 1e-15

    @given(st.floats(0.05, 0.95), st.lists(st.floats(0.01, 0.99), min_size=1, max_size=5))
    def test_edge_model_properties(self, gamma, fractions):
        lam = covariance_edge(IndexExponents(tuple(f * gamma for f in fractions), gamma=gamma)).lam
        assert np.linalg.eigvalsh(lam)[0] >= -1e-10
        assert np.all((lam >= 0) & (lam <= 1))

    def test_indices(self):
        assert bulk_indices(4096, (0.5,)) == (2048, 2112)
        assert bulk_indices(4096, (1.0,)) == (1024, 2048)
        assert edge_indices(4096, 0.5, (0.25,)) == (64, 72)


class TestMosteller:
    def test_examples(self):
        assert mosteller_correlation((0.25, 0.75)).lam[0, 1] == pytest.approx(1 / 3)
        assert mosteller_correlation((0.4, 0.4)).lam[0, 1] == pytest.approx(1.0)
        assert mosteller_correlation((0.1, 0.5, 0.9)).lam[0, 2] == pytest.approx(1 / 9)

    def test_errors(self):
        with pytest.raises(DomainError):
            mosteller_correlation((0.5, 0.25))
        with pytest.raises(DomainError):
            mosteller_correlation((0.0, 0.5))

    @given(st.lists(st.floats(0.01, 0.99), min_size=2, max_size=6, unique=True))
    def test_psd(self, lams):
        lam = mosteller_correlation(sorted(lams)).lam
        assert np.linalg.eigvalsh(lam)[0] >= -1e-10


class TestHermiteZeroEstimate:
    def test_median_value(self):
        # at the median arcsin(G^{-1}(1/2)) = 0, leaving G^{-1}(1/2 - 1/(2n))
        n = 50
        est, _ = hermite_zero_estimate(n, n // 2)
        assert est == pytest.approx(semicircle_quantile(0.5 - 1 / (2 * n)) * math.sqrt(2 * n), rel=1e-13)

    def test_matches_jacobi_zero(self):
        n = 50
        z = hermite_zeros(n)
        est, _ = hermite_zero_estimate(n, 25)
        assert abs(z[24] - est) < 0.01
        spacing = z[25] - z[24]
        wrong_sign = semicircle_quantile(0.5 + 1 / (2 * n)) * math.sqrt(2 * n)
        assert abs(z[24] - wrong_sign) > 0.8 * spacing

    def test_error_scales_like_n_minus_two(self):
        scaled = []
        for n in (100, 200, 400, 800):
            z = hermite_zeros(n)
            worst = 0.0
            for k in range(n // 5, 4 * n // 5 + 1):
                est, _ = hermite_zero_estimate(n, k)
                worst = max(worst, abs(z[k - 1] - est) / math.sqrt(2 * n))
            scaled.append(worst * n * n)
        assert max(scaled) / min(scaled) < 2.0

    def test_bound_within_fitted_constant(self):
        n = 200
        z = hermite_zeros(n)
        for k in range(20, 181, 7):
            est, bound = hermite_zero_estimate(n, k, constant=1.0)
            assert abs(z[k - 1] - est) <= bound

    def test_index_range(self):
        with pytest.raises(DomainError):
            hermite_zero_estimate(100, 5)
        hermite_zero_estimate(100, 5, k0=5)

    def test_simple_location_constant(self):
        consts = [fit_zero_constant(n, hermite_zeros(n)) for n in (50, 100, 200, 400, 800)]
        assert max(consts) / min(consts) <= 2.0
