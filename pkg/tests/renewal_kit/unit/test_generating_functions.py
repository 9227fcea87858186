# Copyright 2020 BULL SAS All rights reserved
"""Module for unit testing of the generating functions on the closed unit
disk and of the grid checks.
"""
import math
import unittest

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from renewal_kit.distributions import (
    GeometricDistribution,
    HarmonicDistribution,
)
from renewal_kit.exceptions import FiniteMean, InfiniteMean
from renewal_kit.generating_functions import (
    PolarGrid,
    PolarPoint,
    check_fp_identity,
    check_fQ_identity,
    check_G,
    check_H_bound,
    check_strict_cos_bound,
    decomposition_check,
    default_grid,
    eval_fp,
    eval_fq,
    eval_fQ,
    eval_G,
    eval_H,
    find_continuity_radius,
    one_minus_z,
)
from renewal_kit.renewal import compute_renewal
from tests.renewal_kit.unit.random_laws import random_rational_laws

TWO_STEPS = ["0", "1/2", "1/2"]
HARMONIC_RADIUS = 2.0 ** -5


def grid_laws():
    return random_rational_laws(10, first_seed=500) + [
        GeometricDistribution("1/2"),
        HarmonicDistribution(),
    ]


class TestPoints(unittest.TestCase):
    """Tests the points and grids of the disk."""

    def test_polar_point_range(self):
        with self.assertRaises(ValueError):
            PolarPoint(0.0, 0.0)
        with self.assertRaises(ValueError):
            PolarPoint(1.5, 0.0)
        with self.assertRaises(ValueError):
            PolarPoint(0.5, 4.0)
        self.assertTrue(PolarPoint(1.0, 0.0).is_singular)
        self.assertAlmostEqual(PolarPoint(1.0, math.pi / 2).z, 1j)

    def test_default_grid(self):
        """Tests that the default grid has every radius and excludes
        z = 1."""
        grid = default_grid()
        self.assertEqual(len(grid), 4 * 512)
        self.assertFalse(np.any(grid.singular))
        assert_allclose(np.unique(grid.r), [0.5, 0.9, 0.99, 1.0])
        grid = default_grid(radii=[1.0], angles=5)
        self.assertEqual(len(grid), 4)

    def test_one_minus_z(self):
        r = np.array([0.5, 1.0, 1.0])
        theta = np.array([1.0, 1e-3, -2.0])
        assert_allclose(
            one_minus_z(r, theta), 1 - r * np.exp(1j * theta), atol=1e-15)

    def test_grid_validation(self):
        with self.assertRaises(ValueError):
            PolarGrid(np.array([0.5, 0.6]), np.array([0.0]))
        with self.assertRaises(ValueError):
            PolarGrid(np.array([-0.5]), np.array([0.0]))


class TestEvaluation(unittest.TestCase):
    """Tests the evaluation of f_q, f_Q, f_p, G and H."""

    def test_fq_finite_support(self):
        """Tests f_q(1/2) = 3/8 for q = (0, 1/2, 1/2)."""
        value = eval_fq(TWO_STEPS, PolarPoint(0.5, 0.0))
        self.assertAlmostEqual(value.value, 0.375, places=15)
        self.assertEqual(value.error_bound, 0.0)

    def test_fq_truncation_bound(self):
        """Tests that a truncated series stays within its error bound of
        the closed form."""
        d = GeometricDistribution("1/2")
        point = PolarPoint(0.99, 0.3)
        closed = eval_fq(d, point)
        truncated = eval_fq(d, point, budget=20)
        self.assertGreater(truncated.error_bound, 0)
        self.assertLessEqual(
            abs(truncated.value - closed.value), truncated.error_bound)

    def test_fQ_geometric(self):
        """Tests f_Q(z) = 1/(1 - a z), truncated or not."""
        d = GeometricDistribution("1/2")
        point = PolarPoint(1.0, 2.0)
        expected = 1 / (1 - 0.5 * point.z)
        self.assertAlmostEqual(eval_fQ(d, point).value, expected, places=14)
        truncated = eval_fQ(d, point, budget=60)
        self.assertLessEqual(
            abs(truncated.value - expected), truncated.error_bound + 1e-14)

    def test_fQ_infinite_mean(self):
        with self.assertRaises(InfiniteMean):
            eval_fQ(HarmonicDistribution(), PolarPoint(0.5, 0.0))

    def test_fp(self):
        """Tests f_p(1/2) = 1/(1 - f_q(1/2)) = 8/5 for q = (0, 1/2, 1/2)."""
        renewal = compute_renewal(TWO_STEPS, 80)
        value = eval_fp(renewal, PolarPoint(0.5, 0.0))
        self.assertAlmostEqual(value.value, 1.6, places=12)
        self.assertLess(value.error_bound, 1e-20)

    def test_H_at_one(self):
        """Tests that H(1, 0) is exactly 0 and H is small nearby for the
        harmonic law."""
        d = HarmonicDistribution()
        self.assertEqual(abs(eval_H(d, PolarPoint(1.0, 0.0))), 0.0)
        self.assertLess(abs(eval_H(d, PolarPoint(1.0, 1e-6))), 1e-6)

    def test_G_at_zero(self):
        self.assertEqual(eval_G(0.0), 0.5)
        self.assertEqual(eval_G(np.zeros(3)).tolist(), [0.5, 0.5, 0.5])

    def test_G_identity(self):
        """Tests |x^2 G(x) - (1 - cos x)| <= 1e-14 on 1000 samples."""
        x = np.random.default_rng(7).uniform(-math.pi, math.pi, 1000)
        gaps = np.abs(x * x * eval_G(x) - (1 - np.cos(x)))
        self.assertLessEqual(gaps.max(), 1e-14)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=-math.pi, max_value=math.pi))
    def test_G_is_even_and_bounded(self, x):
        value = eval_G(x)
        self.assertEqual(value, eval_G(-x))
        self.assertGreater(value, 0.0)
        self.assertLessEqual(value, 0.5)


class TestGridChecks(unittest.TestCase):
    """Tests the inequalities and identities checked on grids."""

    def test_strict_cos_bound(self):
        for d in grid_laws():
            report = check_strict_cos_bound(d)
            self.assertTrue(report.passed, msg=f"{d!r}: {report.failures}")

    def test_disk_ratio_bound(self):
        """Tests the ratio bound on the default grid and its tightness on
        the real axis."""
        for d in grid_laws():
            report = check_H_bound(d)
            self.assertTrue(report.passed, msg=f"{d!r}: {report.failures}")
            self.assertLessEqual(
                report["equality on the real axis"].worst, 1e-12)

    def test_grids_must_exclude_one(self):
        grid = PolarGrid(np.array([1.0]), np.array([0.0]))
        with self.assertRaises(ValueError):
            check_strict_cos_bound(TWO_STEPS, grid)
        with self.assertRaises(ValueError):
            check_H_bound(TWO_STEPS, grid)

    def test_decompositions(self):
        points = [
            PolarPoint(1.0, math.pi),
            PolarPoint(0.5, 0.0),
            PolarPoint(0.9, -2.5),
            PolarPoint(1.0, 1e-4),
        ]
        for d in (TWO_STEPS, GeometricDistribution("1/3"),
                  HarmonicDistribution()):
            for point in points:
                report = decomposition_check(d, point)
                self.assertTrue(report.passed, msg=f"{report.failures}")

    def test_fp_identity(self):
        for d in random_rational_laws(3, first_seed=40) + [
            HarmonicDistribution()
        ]:
            report = check_fp_identity(compute_renewal(d, 300, exact=False))
            self.assertTrue(report.passed, msg=f"{report.failures}")

    def test_fQ_identity(self):
        for d in random_rational_laws(3, first_seed=60) + [
            GeometricDistribution("1/2")
        ]:
            report = check_fQ_identity(d)
            self.assertTrue(report.passed, msg=f"{report.failures}")
        with self.assertRaises(InfiniteMean):
            check_fQ_identity(HarmonicDistribution())

    def test_G_checks(self):
        self.assertTrue(check_G().passed)


class TestContinuityRadius(unittest.TestCase):
    """Tests the vanishing of H at z = 1 for infinite-mean laws."""

    def test_harmonic_radius(self):
        """Tests that |H| <= 1e-2 is reached within the radius 2^-5."""
        radius = find_continuity_radius(HarmonicDistribution(), 1e-2)
        self.assertTrue(radius.found)
        self.assertEqual(radius.delta, HARMONIC_RADIUS)
        self.assertEqual(len(radius.max_abs_H), 5)
        self.assertGreater(radius.max_abs_H[-2], 1e-2)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=HARMONIC_RADIUS),
        st.floats(min_value=-1.0, max_value=1.0),
    )
    def test_harmonic_H_small_near_one(self, gap, fraction):
        """Tests |H(r, theta)| <= 1e-2 whenever (1 - r) + |theta| is at
        most the radius found, away from the rounding floor at z = 1."""
        theta = fraction * (HARMONIC_RADIUS - gap)
        assume(gap + abs(theta) >= 1e-6)
        point = PolarPoint(1.0 - gap, theta)
        self.assertLessEqual(abs(eval_H(HarmonicDistribution(), point)),
                             1e-2)

    def test_finite_mean_refused(self):
        with self.assertRaises(FiniteMean):
            find_continuity_radius(GeometricDistribution("1/2"))


if __name__ == "__main__":
    unittest.main(verbosity=2)
