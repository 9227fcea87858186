# Copyright 2020 BULL SAS All rights reserved
"""Module for unit testing of the increment laws.
"""
import math
import unittest
from fractions import Fraction

import numpy as np
from numpy.testing import assert_allclose

from renewal_kit.distributions import (
    CustomSeriesDistribution,
    DistributionKind,
    ExplicitDistribution,
    ExtendedReal,
    GeometricDistribution,
    HarmonicDistribution,
    validate,
)
from renewal_kit.exceptions import (
    DistributionError,
    ExactModeRequired,
    NegativeWeight,
    NonzeroAtZero,
    NotNormalized,
    Periodic,
)


class TestValidation(unittest.TestCase):
    """Tests that every hypothesis on the increment law is checked."""

    def test_valid_explicit_law(self):
        """Tests the attributes of the law (0, 1/2, 1/2)."""
        d = validate(["0", "1/2", "1/2"])
        self.assertIsInstance(d, ExplicitDistribution)
        self.assertTrue(d.is_rational)
        self.assertEqual(d.support_bound, 2)
        self.assertEqual(d.support_gcd, 1)
        self.assertEqual(d.mean.value, Fraction(3, 2))
        self.assertEqual(d.mean.reciprocal(), Fraction(2, 3))

    def test_nonzero_at_zero(self):
        with self.assertRaises(NonzeroAtZero) as context:
            validate(["1/2", "1/2"])
        self.assertEqual(context.exception.clause, "q_0=0")

    def test_negative_weight(self):
        with self.assertRaises(NegativeWeight) as context:
            validate([0, "3/2", "-1/2"])
        self.assertEqual(context.exception.clause, "q_n>=0")

    def test_not_normalized(self):
        with self.assertRaises(NotNormalized) as context:
            validate([0, "1/2", "1/4"])
        self.assertEqual(context.exception.clause, "sum q_n=1")

    def test_periodic(self):
        """Tests that a support {2, 4} is rejected with the gcd clause."""
        with self.assertRaises(Periodic) as context:
            validate({"explicit": ["0", "0", "1/2", "0", "1/2"]})
        self.assertEqual(context.exception.clause, "gcd")
        self.assertIn("[gcd]", str(context.exception))

    def test_distribution_errors_are_value_errors(self):
        with self.assertRaises(ValueError):
            validate([0, "1/3"])
        self.assertTrue(issubclass(Periodic, DistributionError))

    def test_float_weights_are_normalized(self):
        """Tests that float weights within the tolerance are adjusted to
        unit mass and that the adjustment is reported."""
        d = validate([0.0, 0.1, 0.2, 0.7 + 1e-14])
        self.assertFalse(d.is_rational)
        self.assertLess(abs(d.normalization_adjustment + 1e-14), 1e-15)
        self.assertAlmostEqual(
            math.fsum(d.weight(n) for n in range(4)), 1.0, places=15)
        with self.assertRaises(NotNormalized):
            validate([0.0, 0.5, 0.4])

    def test_unknown_family(self):
        with self.assertRaises(ValueError):
            validate({"family": "poisson"})

    def test_validate_passes_laws_through(self):
        d = HarmonicDistribution()
        self.assertIs(validate(d), d)


class TestFamilies(unittest.TestCase):
    """Tests the named families of laws."""

    def test_geometric(self):
        """Tests weights, tails and mean of geometric(1/2)."""
        d = validate({"family": "geometric", "a": "1/2"})
        self.assertEqual(d.kind, DistributionKind.geometric)
        self.assertEqual(d.weight(0), 0)
        self.assertEqual(d.weight(3), Fraction(1, 8))
        self.assertEqual(d.tail(3), Fraction(1, 8))
        self.assertEqual(d.mean.value, 2)
        self.assertIsNone(d.support_bound)
        assert_allclose(
            d.weights(4, exact=False).terms,
            [0.0, 0.5, 0.25, 0.125, 0.0625])
        self.assertEqual(
            d.tails(3).tolist(),
            [1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])

    def test_geometric_parameter_range(self):
        with self.assertRaises(NotNormalized):
            GeometricDistribution("1")
        with self.assertRaises(NegativeWeight):
            GeometricDistribution("-1/2")
        self.assertEqual(GeometricDistribution(0).support_bound, 1)

    def test_harmonic(self):
        """Tests that Q_n = 1/(n+1) and that the mean is infinite."""
        d = HarmonicDistribution()
        self.assertEqual(d.weight(1), Fraction(1, 2))
        self.assertEqual(d.weight(3), Fraction(1, 12))
        self.assertEqual(d.tail(3), Fraction(1, 4))
        self.assertTrue(d.mean.is_infinite)
        self.assertFalse(d.has_finite_mean)
        self.assertEqual(d.mean.reciprocal(), 0)
        self.assertEqual(str(d.mean), "inf")
        assert_allclose(
            d.tails(3, exact=False).terms, [1, 1 / 2, 1 / 3, 1 / 4])

    def test_tails_sum_the_weights(self):
        """Tests Q_n = 1 - sum_{i<=n} q_i on every family."""
        for d in (
            validate(["0", "1/3", "0", "2/3"]),
            GeometricDistribution("2/3"),
            HarmonicDistribution(),
        ):
            weights = d.weights(20)
            tails = d.tails(20)
            for n in range(21):
                self.assertEqual(
                    tails[n], 1 - sum(weights.terms[: n + 1], Fraction(0)))

    def test_tail_bounds(self):
        """Tests that the tail bounds dominate the exact tails and are the
        closest floats doing so."""
        for d in (
            validate(["0", "1/3", "0", "2/3"]),
            GeometricDistribution("2/3"),
            GeometricDistribution("1/3"),
            HarmonicDistribution(),
        ):
            for n in range(200):
                bound = d.tail_bound(n)
                self.assertGreaterEqual(Fraction(bound), d.tail(n))
                below = float(np.nextafter(bound, -np.inf))
                self.assertLess(Fraction(below), d.tail(n))
        self.assertEqual(HarmonicDistribution().tail_bound(9), 0.1)
        self.assertEqual(validate(["0", "1/3", "0", "2/3"]).tail_bound(3), 0)

    def test_geometric_tail_bounds_far_out(self):
        """Tests the tail bounds of the geometric law beyond the exactly
        rounded range, down to the underflow."""
        d = GeometricDistribution("2/3")
        for n in (1025, 1500, 1800, 5000):
            self.assertGreaterEqual(Fraction(d.tail_bound(n)), d.tail(n))
        self.assertLess(d.tail_bound(1500), 2 * float(d.tail(1500)))
        self.assertGreater(d.tail_bound(5000), 0)
        self.assertGreaterEqual(
            Fraction(GeometricDistribution(0.5).tail_bound(2000)),
            Fraction(1, 2 ** 2000))

    def test_truncation_index(self):
        """Tests that the truncation index is the smallest N with
        Q_N <= tolerance."""
        self.assertEqual(
            GeometricDistribution("1/2").truncation_index(1e-3), 10)
        self.assertEqual(HarmonicDistribution().truncation_index(0.01), 99)
        self.assertEqual(
            HarmonicDistribution().truncation_index(1e-12, max_terms=1024),
            1024)
        self.assertEqual(validate([0, 1]).truncation_index(), 1)

    def test_closed_forms_match_series(self):
        """Tests the closed forms of f_q against the power series inside
        the disk."""
        z = np.array([0.3, -0.6 + 0.2j, 0.9j, 0.45])
        for d in (GeometricDistribution("1/3"), HarmonicDistribution()):
            weights = d.weights(400, exact=False).terms
            series = np.polynomial.polynomial.polyval(z, weights)
            closed = d.fq_closed_form(z, 1 - z)
            assert_allclose(closed, series, atol=1e-12)

    def test_exact_mode_required(self):
        """Tests that exact weights are refused to float laws."""
        d = validate([0.0, 0.5, 0.5])
        with self.assertRaises(ExactModeRequired):
            d.weights(3, exact=True)

    def test_spec_round_trip(self):
        """Tests that to_spec rebuilds an equal law."""
        for d in (
            validate(["0", "1/2", "1/2"]),
            GeometricDistribution("1/3"),
            HarmonicDistribution(),
        ):
            self.assertEqual(validate(d.to_spec()), d)
            self.assertEqual(hash(validate(d.to_spec())), hash(d))

    def test_extended_real(self):
        self.assertEqual(float(ExtendedReal.infinity()), math.inf)
        self.assertEqual(ExtendedReal(2.0).reciprocal(), 0.5)


class TestCustomSeries(unittest.TestCase):
    """Tests the laws defined by a weight function."""

    def test_custom_geometric(self):
        """Tests a law equal to geometric(1/2) given as a function."""
        d = CustomSeriesDistribution(
            weight_function=lambda n: 0.0 if n == 0 else 0.5 ** n,
            tail_bound_function=lambda n: 0.5 ** n,
            mean=2.0,
        )
        self.assertEqual(d.kind, DistributionKind.custom_series)
        self.assertAlmostEqual(d.tail(3), 0.125)
        self.assertAlmostEqual(float(d.mean), 2.0)
        self.assertNotEqual(d, GeometricDistribution("1/2"))

    def test_custom_periodic(self):
        with self.assertRaises(Periodic):
            CustomSeriesDistribution(
                weight_function=lambda n: (
                    0.5 ** (n // 2) if n and n % 2 == 0 else 0.0),
                tail_bound_function=lambda n: 0.5 ** (n // 2),
                mean=4.0,
            )

    def test_custom_not_normalized(self):
        with self.assertRaises(NotNormalized):
            CustomSeriesDistribution(
                weight_function=lambda n: 0.0 if n == 0 else 0.25 ** n,
                tail_bound_function=lambda n: 0.25 ** n,
                mean=1.5,
            )


if __name__ == "__main__":
    unittest.main(verbosity=2)
