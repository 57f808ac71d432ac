"""
Tests for CDFs, slope fits, spectral rejection and the swap/crossing detectors
"""

import unittest

import numpy as np
from numpy.testing import assert_allclose
from scipy import stats

from analysis.statistics import (
    Cdf, band_rejection, column_correlation, count_crossings, detect_swaps, distribution_compare,
    empirical_cdf, oob_rejection, rayleigh_slope, selection_equivalence,
)
from models.doppler import Spectrum
from models.eigenmodel import generate
from models.types import ModelConfig
from utils.errors import AnalysisError


class TestEmpiricalCdf(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(2024)
        self.rayleigh = np.abs(rng.standard_normal(200_000) + 1j * rng.standard_normal(200_000))

    def test_staircase_shape(self):
        """Test that the CDF is non-decreasing on a 0.05 dB grid and ends at one"""
        cdf = empirical_cdf(self.rayleigh)
        self.assertEqual(cdf.sample_count, 200_000)
        self.assertTrue(np.all(np.diff(cdf.prob) >= 0))
        self.assertEqual(cdf.prob[-1], 1.0)
        assert_allclose(np.diff(cdf.levels_db), 0.05, atol=1e-9)

    def test_rayleigh_slope(self):
        """Test that Rayleigh magnitudes give about 10 dB per decade"""
        slope = rayleigh_slope(empirical_cdf(self.rayleigh))
        self.assertAlmostEqual(slope, 10.0, delta=1.0)

    def test_matches_rayleigh_distribution(self):
        """Test the staircase against the Rayleigh CDF"""
        cdf = empirical_cdf(self.rayleigh)
        levels = np.array([-20.0, -10.0, -3.0, 0.0, 3.0])
        radius = np.sqrt(2.0) * 10 ** (levels / 20)
        assert_allclose(cdf.at(levels), stats.rayleigh.cdf(radius), atol=0.01)

    def test_reference_rms_shifts_levels(self):
        """Test that a shared reference moves the curve by the RMS ratio"""
        own = empirical_cdf(self.rayleigh)
        shifted = empirical_cdf(self.rayleigh, reference_rms=10.0 * np.sqrt(np.mean(self.rayleigh ** 2)))
        self.assertAlmostEqual(own.at(-2.975), shifted.at(-22.975), delta=1e-3)

    def test_reading_the_staircase(self):
        """Test Cdf.at below, inside and above the grid"""
        cdf = Cdf(levels_db=np.array([0.0, 1.0, 2.0]), prob=np.array([0.2, 0.5, 1.0]), sample_count=10)
        assert_allclose(cdf.at([-1.0, 0.0, 1.5, 9.0]), [0.0, 0.2, 0.5, 1.0])

    def test_rejects_bad_samples(self):
        """Test that short, empty, zero and negative inputs raise"""
        for bad in (np.ones(50), np.array([]), np.zeros(200), -np.ones(200)):
            with self.assertRaises(AnalysisError):
                empirical_cdf(bad)

    def test_slope_needs_points(self):
        """Test that a degenerate or badly windowed fit raises"""
        cdf = empirical_cdf(np.ones(200))
        with self.assertRaises(AnalysisError):
            rayleigh_slope(cdf)
        with self.assertRaises(AnalysisError):
            rayleigh_slope(cdf, 0.2, 0.1)


class TestDistributionCompare(unittest.TestCase):
    def test_identical_and_shifted(self):
        """Test the sup distance for equal and disjoint samples"""
        rng = np.random.default_rng(0)
        x = np.abs(rng.standard_normal(5000))
        a = empirical_cdf(x, reference_rms=1.0)
        self.assertEqual(distribution_compare(a, a), 0.0)
        b = empirical_cdf(2.0 * x, reference_rms=1.0)
        self.assertGreater(distribution_compare(a, b), 0.1)

    def test_agrees_with_two_sample_ks(self):
        """Test that the grid distance tracks the two-sample KS statistic"""
        rng = np.random.default_rng(1)
        x = np.abs(rng.standard_normal(5000) + 1j * rng.standard_normal(5000))
        y = 1.2 * np.abs(rng.standard_normal(5000) + 1j * rng.standard_normal(5000))
        reference = float(np.sqrt(np.mean(np.concatenate([x, y]) ** 2)))
        ours = distribution_compare(empirical_cdf(x, reference), empirical_cdf(y, reference))
        self.assertAlmostEqual(ours, stats.ks_2samp(x, y).statistic, delta=0.02)

    def test_disjoint_ranges(self):
        """Test that CDFs without a common range raise"""
        a = empirical_cdf(np.ones(200), reference_rms=1.0)
        b = empirical_cdf(100.0 * np.ones(200), reference_rms=1.0)
        with self.assertRaises(AnalysisError):
            distribution_compare(a, b)


class TestSpectralRejection(unittest.TestCase):
    def setUp(self):
        self.spec = Spectrum(bin_freqs=np.array([-2.0, -1.0, 0.0, 1.0, 2.0]),
                             psd_db=np.array([-50.0, -10.0, 0.0, -10.0, -60.0]), resolution=1.0, f_d=1.0)

    def test_band_rejection(self):
        """Test peak minus the strongest bin beyond the edge"""
        self.assertEqual(band_rejection(self.spec, 1.5), 50.0)
        self.assertEqual(band_rejection(self.spec, 0.5), 10.0)

    def test_oob_guard(self):
        """Test that the out-of-band check skips the band edge bin"""
        self.assertEqual(oob_rejection(self.spec, 1.0), 50.0)
        with self.assertRaises(AnalysisError):
            band_rejection(self.spec, 3.0)


class TestSwapsAndCrossings(unittest.TestCase):
    def test_count_crossings(self):
        """Test that ranking changes are reported at the sample before them"""
        values = np.array([[2.0, 1.0], [2.0, 1.0], [1.0, 2.0], [1.0, 2.0], [3.0, 0.5]])
        self.assertEqual(count_crossings(values), [1, 3])

    def test_detect_swaps(self):
        """Test that a column permutation is flagged and a smooth path is not"""
        U = np.tile(np.eye(2, dtype=np.complex128), (6, 1, 1))
        U[4:] = U[4:][:, :, ::-1]
        self.assertEqual(detect_swaps(U), [3])
        assert_allclose(column_correlation(U[:4]), 1.0)

    def test_natural_path_has_no_swaps(self):
        """Test that a generated class V trace never swaps"""
        trace = generate(ModelConfig(n=2, m=2, n_sam=500, s_f=20.0, seed=5))
        self.assertEqual(detect_swaps(trace.U), [])

    def test_detector_input_checks(self):
        """Test that too-short series and bad thresholds raise"""
        with self.assertRaises(AnalysisError):
            column_correlation(np.eye(2)[None])
        with self.assertRaises(AnalysisError):
            detect_swaps(np.tile(np.eye(2), (3, 1, 1)), threshold=1.5)
        with self.assertRaises(AnalysisError):
            count_crossings(np.ones(5))


class TestSelectionEquivalence(unittest.TestCase):
    def test_sorted_gains_match_channel_svd(self):
        """Test that sorting a trace's gains reproduces the assembled channel's SVD"""
        trace = generate(ModelConfig(n=4, m=4, n_sam=200, seed=9))
        self.assertLess(selection_equivalence(trace), 1e-10)


if __name__ == '__main__':
    unittest.main()
