# Copyright 2020 BULL SAS All rights reserved
"""Exceptions raised by the renewal-kit library.

Distribution errors carry the clause of the increment law hypotheses they
violate, so that front-ends can report it verbatim:

- q_0=0
- q_n>=0
- sum q_n=1
- gcd
"""


class RenewalKitError(Exception):
    """Parent class of every error raised by the library."""


class DistributionError(RenewalKitError, ValueError):
    """An increment law violates one of its hypotheses."""

    clause = ""

    def __init__(self, message: str):
        super().__init__(f"[{self.clause}] {message}")
        self.message = message


class NonzeroAtZero(DistributionError):
    clause = "q_0=0"


class NegativeWeight(DistributionError):
    clause = "q_n>=0"


class NotNormalized(DistributionError):
    clause = "sum q_n=1"


class Periodic(DistributionError):
    clause = "gcd"


class SequenceIndexError(RenewalKitError, IndexError):
    """Indexing outside of a stored prefix."""


class InsufficientPrefix(SequenceIndexError):
    """A sequence is too short for the requested operation."""


class ExactModeRequired(RenewalKitError):
    """The operation needs rational weights and rational tails."""


class InfiniteMean(RenewalKitError):
    """The operation needs a finite mean increment."""


class FiniteMean(RenewalKitError):
    """The operation needs an infinite mean increment."""


class MismatchedDistribution(RenewalKitError):
    """Two results computed for different increment laws were combined."""


class BudgetExhausted(RenewalKitError):
    """An adaptive search ran out of budget before converging.

    The best result found so far is available as the partial attribute.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
