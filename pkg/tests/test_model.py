import numpy as np
import pytest

from specreg import (
    ArCoefficientField,
    HyperParameters,
    InvalidArgumentError,
    RangeBinDataset,
    SpectralMatrix,
    WindowingForm,
    ar_psd,
    build_design,
    reg_criterion,
    sobolev_distance,
    sobolev_smoothness,
)
from specreg.model import POLE_CEILING_FACTOR


class TestArPsd:
    def test_zero_coefficients_flat(self, rng):
        nu = rng.uniform(0, 1, 17)
        vals = ar_psd(np.zeros(4, dtype=complex), 3.0, nu)
        assert np.allclose(vals, 3.0)

    def test_first_order_closed_forms(self):
        assert ar_psd([0.5], 1.0, [0.0])[0] == pytest.approx(4.0, rel=1e-14)
        assert ar_psd([0.5], 1.0, [0.5])[0] == pytest.approx(1 / 2.25, rel=1e-14)

    def test_pole_on_grid_is_clamped_and_flagged(self):
        vals, hit = ar_psd([1.0], 2.0, [0.0, 0.25], return_poles=True)
        assert hit
        assert vals[0] == POLE_CEILING_FACTOR * 2.0
        assert np.all(np.isfinite(vals))

    def test_near_pole_stays_below_ceiling(self):
        vals, hit = ar_psd([1.0 - 1e-9], 1.0, np.arange(64) / 64, return_poles=True)
        assert np.all(vals <= POLE_CEILING_FACTOR)
        assert np.all(np.isfinite(vals))

    def test_invalid_err_power(self):
        with pytest.raises(InvalidArgumentError):
            ar_psd([0.5], 0.0, [0.1])


class TestSobolev:
    def test_identity_case(self, rng):
        a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        assert sobolev_distance(a, a, SpectralMatrix(1.0, 3)) == 0.0

    def test_unit_difference_example(self):
        delta = SpectralMatrix(1.0, 3)
        a = np.array([1.0, 1.0, 1.0], dtype=complex)
        assert sobolev_distance(a, np.zeros(3), delta) == pytest.approx(14.0)

    def test_diagonal_expansion_example(self):
        delta = SpectralMatrix(1.0, 2)
        assert sobolev_distance([1, 0], [0, 1j], delta) == pytest.approx(5.0)

    def test_smoothness_examples(self):
        assert sobolev_smoothness(np.zeros(5), SpectralMatrix(2.0, 5)) == 0.0
        a = np.array([2.0, 1.0])
        assert sobolev_smoothness(a, SpectralMatrix(1.0, 2)) == pytest.approx(8.0)

    def test_k_zero_is_euclidean(self, rng):
        a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        assert sobolev_smoothness(a, SpectralMatrix(0.0, 4)) == pytest.approx(
            float(np.sum(np.abs(a) ** 2)))

    def test_symmetry_and_positivity(self, rng):
        delta = SpectralMatrix(1.5, 4)
        for _ in range(20):
            a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            d_ab = sobolev_distance(a, b, delta)
            assert d_ab == pytest.approx(sobolev_distance(b, a, delta))
            assert d_ab >= 0
            assert d_ab == pytest.approx(sobolev_smoothness(a - b, delta))
            if not np.allclose(a, b):
                assert d_ab > 0

    def test_fractional_k_diag(self):
        delta = SpectralMatrix(0.75, 3)
        assert np.allclose(delta.diag, [1.0, 2.0**1.5, 3.0**1.5])

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            sobolev_distance([1, 2], [1, 2, 3], SpectralMatrix(1.0, 2))


class TestQuadratureConsistency:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_matches_derivative_energy_integral(self, k, rng):
        # the quadratic form equals the integrated squared k-th derivative of
        # the transfer-polynomial difference, up to the (2 pi)^{2k} constant
        q = 4096
        nu = np.arange(q + 1) / q
        for _ in range(5):
            p = int(rng.integers(1, 5))
            a = rng.standard_normal(p) + 1j * rng.standard_normal(p)
            b = rng.standard_normal(p) + 1j * rng.standard_normal(p)
            lags = np.arange(1, p + 1)
            diff = (a - b) * (-2j * np.pi * lags) ** k
            vals = np.exp(-2j * np.pi * np.outer(nu, lags)) @ diff
            integral = np.trapezoid(np.abs(vals) ** 2, nu)
            expected = (2 * np.pi) ** (2 * k) * sobolev_distance(a, b, SpectralMatrix(k, p))
            assert integral == pytest.approx(expected, rel=1e-6)


class TestRegCriterion:
    def _zeros(self, m, p):
        return ArCoefficientField(np.zeros((m, p), complex), np.ones(m))

    def test_all_zero(self):
        data = RangeBinDataset(np.zeros((2, 4), complex))
        hp = HyperParameters(1.0, 1.0, 1.0, 2)
        val = reg_criterion(self._zeros(2, 2), data, hp, WindowingForm.PRE_WINDOWED,
                            np.ones(2))
        assert val == 0.0

    def test_zero_field_keeps_only_fidelity(self, rng):
        bins = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        data = RangeBinDataset(bins)
        weights = rng.uniform(0.5, 2.0, 3)
        hp = HyperParameters(2.0, 3.0, 1.0, 2)
        val = reg_criterion(self._zeros(3, 2), data, hp, WindowingForm.PRE_WINDOWED, weights)
        expected = float(np.sum(np.abs(bins) ** 2, axis=1) @ (1 / weights))
        assert val == pytest.approx(expected, rel=1e-12)

    def test_matches_hand_expansion(self, rng):
        # independent summation of the three terms for a random M=2, P=1 case
        bins = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        data = RangeBinDataset(bins)
        coeffs = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
        field = ArCoefficientField(coeffs, np.ones(2))
        weights = np.array([1.3, 0.7])
        hp = HyperParameters(lambda_s=2.5, lambda_d=0.4, k=1.0, order=1)
        form = WindowingForm.NON_WINDOWED

        expected = 0.0
        for m in range(2):
            pair = build_design(bins[m], 1, form)
            resid = pair.yvec - pair.ymat @ coeffs[m]
            expected += float(np.sum(np.abs(resid) ** 2)) / weights[m]
            expected += 2.5 * float(np.abs(coeffs[m, 0]) ** 2)
        expected += 0.4 * float(np.abs(coeffs[0, 0] - coeffs[1, 0]) ** 2)

        val = reg_criterion(field, data, hp, form, weights)
        assert val == pytest.approx(expected, rel=1e-12)

    def test_conjugation_invariance(self, rng):
        bins = rng.standard_normal((3, 6)) + 1j * rng.standard_normal((3, 6))
        coeffs = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        weights = rng.uniform(0.5, 2.0, 3)
        hp = HyperParameters(0.8, 1.7, 1.0, 2)
        form = WindowingForm.DOUBLE_WINDOWED
        plain = reg_criterion(ArCoefficientField(coeffs, np.ones(3)),
                              RangeBinDataset(bins), hp, form, weights)
        conj = reg_criterion(ArCoefficientField(coeffs.conj(), np.ones(3)),
                             RangeBinDataset(bins.conj()), hp, form, weights)
        assert plain == pytest.approx(conj, rel=1e-12)

    def test_nonpositive_weight_rejected(self, rng):
        data = RangeBinDataset(rng.standard_normal((2, 4)) + 0j)
        hp = HyperParameters(1.0, 1.0, 1.0, 1)
        with pytest.raises(InvalidArgumentError):
            reg_criterion(self._zeros(2, 1), data, hp, WindowingForm.PRE_WINDOWED,
                          np.array([1.0, 0.0]))
