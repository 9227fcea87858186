# Copyright 2020 BULL SAS All rights reserved
"""Numerical toolkit for the discrete renewal theorem: renewal sequences,
limit brackets, generating functions, Fourier representations and Monte
Carlo cross-validation."""
from renewal_kit.distributions import (
    CustomSeriesDistribution,
    ExplicitDistribution,
    GeometricDistribution,
    HarmonicDistribution,
    IncrementDistribution,
    validate,
)
from renewal_kit.renewal import (
    RenewalSequence,
    check_identities,
    compute_renewal,
    estimate_limit,
    limit_bracket,
)
from renewal_kit.sequences import Sequence, convolve, delta
from renewal_kit.verification import run_verification_suite

__all__ = [
    "CustomSeriesDistribution",
    "ExplicitDistribution",
    "GeometricDistribution",
    "HarmonicDistribution",
    "IncrementDistribution",
    "RenewalSequence",
    "Sequence",
    "check_identities",
    "compute_renewal",
    "convolve",
    "delta",
    "estimate_limit",
    "limit_bracket",
    "run_verification_suite",
    "validate",
]
