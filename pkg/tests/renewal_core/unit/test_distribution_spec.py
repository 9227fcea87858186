# Copyright 2020 BULL SAS All rights reserved
"""
Tests the parsing of the distribution specifications.
"""
import unittest
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from renewal_core.models.distribution_spec import DistributionSpec, FamilyEnum
from renewal_kit.distributions import (
    ExplicitDistribution,
    GeometricDistribution,
    HarmonicDistribution,
)
from renewal_kit.exceptions import Periodic

TEST_DATA = Path(__file__).parent / "test_distribution_spec"

TWO_STEPS = TEST_DATA / "two_steps.yaml"
GEOMETRIC = TEST_DATA / "geometric.json"
PERIODIC = TEST_DATA / "periodic.yaml"
BOTH_KINDS = TEST_DATA / "both_kinds.yaml"


class TestDistributionSpec(unittest.TestCase):
    """
    Tests that the specifications are parsed into increment laws.
    """

    def test_inline_explicit(self):
        """Tests that "num/den" strings give an exact law."""
        spec = DistributionSpec.from_json('{"explicit": ["0", "1/2", "1/2"]}')
        d = spec.to_distribution()
        self.assertIsInstance(d, ExplicitDistribution)
        self.assertTrue(d.is_rational)
        self.assertEqual(d.weight(2), Fraction(1, 2))

    def test_float_weights(self):
        """Tests that JSON floats switch the law to float mode."""
        spec = DistributionSpec.from_json('{"explicit": [0, 0.5, 0.5]}')
        self.assertEqual(spec.explicit, [0, 0.5, 0.5])
        self.assertFalse(spec.to_distribution().is_rational)

    def test_inline_yaml(self):
        """Tests that the YAML flow syntax is accepted as well."""
        spec = DistributionSpec.from_json("{family: harmonic}")
        self.assertEqual(spec.family, FamilyEnum.harmonic)
        self.assertEqual(spec.to_distribution(), HarmonicDistribution())

    def test_load_yaml_file(self):
        spec = DistributionSpec.from_any(str(TWO_STEPS))
        self.assertEqual(spec.explicit, ["0", "1/2", "1/2"])

    def test_load_json_file(self):
        spec = DistributionSpec.from_file(GEOMETRIC)
        self.assertEqual(
            spec.to_distribution(), GeometricDistribution("1/2"))

    def test_periodic_file(self):
        """Tests that a valid specification of a periodic law only fails
        when the law is built."""
        spec = DistributionSpec.from_file(PERIODIC)
        with self.assertRaises(Periodic):
            spec.to_distribution()

    def test_both_kinds(self):
        with self.assertRaises(ValidationError):
            DistributionSpec.from_file(BOTH_KINDS)

    def test_missing_kind(self):
        with self.assertRaises(ValidationError):
            DistributionSpec.from_json("{}")

    def test_geometric_parameter(self):
        """Tests that the parameter a is required by the geometric family and
        refused by the others."""
        with self.assertRaises(ValidationError):
            DistributionSpec(family="geometric")
        with self.assertRaises(ValidationError):
            DistributionSpec(family="harmonic", a="1/2")
        with self.assertRaises(ValidationError):
            DistributionSpec(family="poisson")

    def test_not_rational(self):
        with self.assertRaises(ValidationError):
            DistributionSpec(explicit=["0", "half", "1/2"])
        with self.assertRaises(ValidationError):
            DistributionSpec(explicit=["0", "1/0"])

    def test_extra_key(self):
        with self.assertRaises(ValidationError):
            DistributionSpec(family="harmonic", scale=2)

    def test_not_an_object(self):
        with self.assertRaises(ValueError):
            DistributionSpec.from_json('["0", "1"]')

    def test_from_distribution(self):
        """Tests that a law is rebuilt from its specification."""
        for d in (
            GeometricDistribution("1/3"),
            HarmonicDistribution(),
            ExplicitDistribution(["0", "1/4", "3/4"]),
        ):
            spec = DistributionSpec.from_distribution(d)
            self.assertEqual(spec.to_distribution(), d)


if __name__ == "__main__":
    unittest.main(verbosity=2)
