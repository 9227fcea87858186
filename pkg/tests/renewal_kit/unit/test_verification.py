# Copyright 2020 BULL SAS All rights reserved
"""Module for unit testing of the verification suite.
"""
import unittest

from renewal_kit.distributions import (
    GeometricDistribution,
    HarmonicDistribution,
)
from renewal_kit.reports import CheckResult, Report
from renewal_kit.verification import check_brackets, run_verification_suite
from tests.renewal_kit.unit.random_laws import random_rational_law


class TestVerificationSuite(unittest.TestCase):
    """Tests that the whole suite passes on the reference laws."""

    def check_suite(self, d):
        suite = run_verification_suite(d, upto=60, m_max=10)
        self.assertTrue(
            suite.passed,
            msg=f"{[check.to_record() for check in suite.failures]}")
        return suite

    def test_two_steps(self):
        suite = self.check_suite(["0", "1/2", "1/2"])
        titles = [report.title for report in suite.reports]
        self.assertIn("tail generating function", titles)
        self.assertNotIn("H continuity at 1", titles)

    def test_geometric(self):
        self.check_suite(GeometricDistribution("1/2"))

    def test_harmonic(self):
        """Tests the suite on the infinite-mean law, which replaces the
        tail generating function by the vanishing of H."""
        suite = self.check_suite(HarmonicDistribution())
        titles = [report.title for report in suite.reports]
        self.assertIn("H continuity at 1", titles)
        self.assertNotIn("tail generating function", titles)

    def test_random_law(self):
        suite = self.check_suite(random_rational_law(11))
        records = suite.to_records()
        self.assertTrue(all(record["passed"] for record in records))
        self.assertEqual(
            set(records[0]),
            {"report", "check", "passed", "worst", "tolerance", "location",
             "detail"})

    def test_brackets(self):
        report = check_brackets(GeometricDistribution("1/3"), 50)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.checks), 3)
        self.assertEqual(len(check_brackets(HarmonicDistribution(), 50)
                             .checks), 1)


class TestReports(unittest.TestCase):
    """Tests the pass/fail records."""

    def test_report(self):
        report = Report(title="example")
        report.add(CheckResult(name="holds", passed=True))
        report.add(CheckResult(name="fails", passed=False, worst=0.5,
                               tolerance=0.1, location="n=3"))
        self.assertFalse(report.passed)
        self.assertEqual([check.name for check in report.failures],
                         ["fails"])
        self.assertEqual(report["fails"].location, "n=3")
        with self.assertRaises(KeyError):
            report["missing"]
        record = report.to_records()[1]
        self.assertEqual(record["report"], "example")
        self.assertEqual(record["worst"], "0.5")
        self.assertEqual(report.to_records()[0]["tolerance"], "")

    def test_extend(self):
        first = Report(title="first", checks=[CheckResult("a", True)])
        second = Report(title="second", checks=[CheckResult("b", False)])
        self.assertIs(first.extend(second), first)
        self.assertEqual(len(first.checks), 2)
        self.assertFalse(first.passed)


if __name__ == "__main__":
    unittest.main(verbosity=2)
