"""
Tests for the acceptance suite plumbing and its fast criteria
"""

import unittest

from analysis.acceptance import PROFILE_QUICK, PROFILES, AcceptanceRunner, run_acceptance
from utils.errors import ConfigError


class TestAcceptance(unittest.TestCase):
    def test_fast_criteria_pass(self):
        """Test normalization, perfect-CSI SIR and the property suites"""
        report = run_acceptance(PROFILE_QUICK, [4, 7, 12])
        self.assertEqual([r.criterion for r in report.results], [4, 7, 12])
        for result in report.results:
            with self.subTest(criterion=result.criterion):
                self.assertTrue(result.passed, f"{result.name}: {result.value} {result.detail}")
        self.assertTrue(report.passed)

    def test_report_layout(self):
        """Test the JSON form of a report"""
        data = run_acceptance(PROFILE_QUICK, [4]).to_dict()
        self.assertEqual(data["profile"], "quick")
        self.assertEqual(set(data["criteria"]), {"4"})
        self.assertEqual(set(data["criteria"]["4"]), {"criterion", "name", "passed", "value", "threshold", "detail"})

    def test_unknown_inputs(self):
        """Test that unknown profiles and criteria are refused"""
        with self.assertRaises(ConfigError):
            run_acceptance("overnight")
        with self.assertRaises(ConfigError):
            run_acceptance(PROFILE_QUICK, [0])

    def test_every_criterion_is_registered(self):
        """Test that criteria 1-12 are all available and both profiles share the fixed seed"""
        self.assertEqual(sorted(AcceptanceRunner.CRITERIA), list(range(1, 13)))
        self.assertEqual({p.seed for p in PROFILES.values()}, {2024})



class TestQuickProfile(unittest.TestCase):
    """The full quick profile, run once and checked criterion by criterion"""

    @classmethod
    def setUpClass(cls):
        cls.report = run_acceptance(PROFILE_QUICK)
        cls.by_number = {r.criterion: r for r in cls.report.results}

    def assertCriteriaPass(self, *numbers):
        for number in numbers:
            result = self.by_number[number]
            with self.subTest(criterion=number):
                self.assertTrue(result.passed, f"{result.name}: {result.value} {result.detail}")

    def test_rayleigh_slope(self):
        """Test that element CDFs rise at 10 dB per decade"""
        self.assertCriteriaPass(1)

    def test_out_of_band_rejection(self):
        """Test that the assembled 2x2 and 4x4 channels stay inside the Doppler band"""
        self.assertCriteriaPass(2, 3)

    def test_unitarity_and_capping(self):
        """Test unitarity of long traces and the vector capping rate"""
        self.assertCriteriaPass(5, 6)

    def test_forced_swap_alternation(self):
        """Test that forced swaps alternate the SIR between blocks"""
        self.assertCriteriaPass(8)

    def test_sorted_comparisons(self):
        """Test the comparisons between the natural and the sorted decomposition"""
        self.assertCriteriaPass(9, 10, 11)

    def test_whole_profile(self):
        """Test that every criterion is reported and passes"""
        self.assertEqual(sorted(self.by_number), list(range(1, 13)))
        self.assertTrue(self.report.passed, [r.name for r in self.report.failures])

if __name__ == '__main__':
    unittest.main()
