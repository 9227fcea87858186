# Copyright 2020 BULL SAS All rights reserved
"""This module contains the increment laws q driving the renewal process, that
is the probability weights of the step sizes. Every law satisfies:

- q_0 = 0 and q_n >= 0,
- sum_n q_n = 1,
- gcd{n >= 1 | q_n != 0} = 1 (aperiodicity).

Each law exposes its weights q_n, its tail sequence Q_n = sum_{i>n} q_i, an
upper bound on Q_n used to choose truncation budgets, and its mean
mu = sum_n n q_n as an extended real (1/infinity is defined as 0).

The available laws are:

- explicit: finitely supported weights, exact when given as rationals.
- geometric(a): q_n = (1-a) a^(n-1), Q_n = a^n, mu = 1/(1-a).
- harmonic: q_n = 1/(n(n+1)), Q_n = 1/(n+1), mu = infinity.
- custom-series: user supplied weights, tail bound and mean.

All of them are registered in the __families__ dictionary used by validate.
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import reduce
from typing import Callable, Dict, Iterable, Optional, Union

import mpmath
import numpy as np
from loguru import logger

from renewal_core.config import NumericsConfig
from renewal_kit.exceptions import (
    ExactModeRequired,
    NegativeWeight,
    NonzeroAtZero,
    NotNormalized,
    Periodic,
)
from renewal_kit.sequences import Scalar, Sequence, format_scalar, to_fraction

numerics = NumericsConfig()

EPS = float(np.finfo(float).eps)
TINY = float(np.finfo(float).tiny)
# Up to this index rational geometric tails are rounded up exactly
_EXACT_TAIL_INDEX = 1024

# Below this modulus, the harmonic generating function is summed directly
_HARMONIC_SERIES_RADIUS = 0.5
_HARMONIC_SERIES_TERMS = 64


def float_above(value: Scalar) -> float:
    """Returns the smallest float greater than or equal to value."""
    approximation = float(value)
    if isinstance(value, Fraction) and Fraction(approximation) < value:
        approximation = float(np.nextafter(approximation, np.inf))
    return approximation


def _to_mpf(value):
    """Converts a weight to an mpmath number in the working precision."""
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return mpmath.mpf(value)


class DistributionKind(str, Enum):
    """Kinds of increment laws."""

    explicit = "explicit"
    geometric = "geometric"
    harmonic = "harmonic"
    custom_series = "custom-series"


@dataclass(frozen=True)
class ExtendedReal:
    """A nonnegative real number or +infinity (value set to None)."""

    value: Optional[Scalar] = None

    @classmethod
    def infinity(cls) -> "ExtendedReal":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def reciprocal(self) -> Scalar:
        """Returns 1/value, with 1/infinity = 0."""
        if self.is_infinite:
            return Fraction(0)
        if isinstance(self.value, Fraction):
            return 1 / self.value
        return 1.0 / self.value

    def __float__(self) -> float:
        return math.inf if self.is_infinite else float(self.value)

    def __str__(self) -> str:
        return "inf" if self.is_infinite else format_scalar(self.value)


class IncrementDistribution:
    """Abstract parent class of the increment laws.

    Children classes must implement weight, tail and to_spec, and set the
    attributes kind, mean, support_bound and is_rational. They override
    tail_bound when rounding the exact tail up is too costly.
    """

    kind: DistributionKind
    # Largest index with a nonzero weight, None for infinite support
    support_bound: Optional[int] = None
    # Whether weights and tails are exact rationals
    is_rational: bool = False
    # Correction applied to the largest weight to reach unit mass
    normalization_adjustment: float = 0.0
    support_gcd: int = 1
    mean: ExtendedReal

    def weight(self, n: int) -> Scalar:
        """Returns q_n."""
        raise NotImplementedError

    def tail(self, n: int) -> Scalar:
        """Returns Q_n = sum_{i>n} q_i."""
        raise NotImplementedError

    def tail_bound(self, n: int) -> float:
        """Returns a float upper bound on Q_n, the exact tail rounded up."""
        return float_above(self.tail(n))

    def to_spec(self) -> Dict:
        """Returns the JSON distribution spec describing the law."""
        raise NotImplementedError

    @property
    def has_finite_mean(self) -> bool:
        return not self.mean.is_infinite

    def _resolve_exact(self, exact: Optional[bool]) -> bool:
        if exact is None:
            return self.is_rational
        if exact and not self.is_rational:
            raise ExactModeRequired(
                f"The {self.kind.value} law has no exact rational weights."
            )
        return exact

    def weights(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        """Returns q_0, ..., q_upto as a sequence."""
        exact = self._resolve_exact(exact)
        return Sequence(
            [self.weight(n) for n in range(upto + 1)], exact=exact)

    def tails(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        """Returns Q_0, ..., Q_upto as a sequence."""
        exact = self._resolve_exact(exact)
        return Sequence([self.tail(n) for n in range(upto + 1)], exact=exact)

    def truncation_index(self, tolerance: Optional[float] = None,
                         max_terms: Optional[int] = None) -> int:
        """Returns the smallest N with tail_bound(N) <= tolerance, capped at
        max_terms.

        The search doubles N and then bisects, tail bounds being
        nonincreasing.
        """
        if tolerance is None:
            tolerance = numerics.truncation_tolerance
        if max_terms is None:
            max_terms = numerics.max_series_terms
        if self.support_bound is not None:
            return self.support_bound
        if self.tail_bound(0) <= tolerance:
            return 0
        upper = 1
        while self.tail_bound(upper) > tolerance:
            if upper >= max_terms:
                logger.debug(
                    f"Truncation of the {self.kind.value} law capped at "
                    f"{max_terms} terms, tail bound "
                    f"{self.tail_bound(max_terms):.3g}"
                )
                return max_terms
            upper = min(2 * upper, max_terms)
        lower = upper // 2
        while upper - lower > 1:
            middle = (lower + upper) // 2
            if self.tail_bound(middle) <= tolerance:
                upper = middle
            else:
                lower = middle
        return upper

    def fq_closed_form(self, z: np.ndarray,
                       one_minus_z: np.ndarray) -> Optional[np.ndarray]:
        """Closed form of f_q on an array of points of the closed disk, or
        None when the law has none. one_minus_z holds 1 - z computed without
        cancellation."""
        return None

    def fQ_closed_form(self, z: np.ndarray,
                       one_minus_z: np.ndarray) -> Optional[np.ndarray]:
        """Closed form of f_Q, or None when the law has none."""
        return None

    def fq_mpmath(self, z):
        """Evaluates f_q at the mpmath complex z in the working precision of
        mpmath, summing the series up to the truncation index."""
        upto = self.truncation_index()
        coefficients = [_to_mpf(self.weight(n)) for n in range(upto + 1)]
        return mpmath.polyval(coefficients[::-1], z)

    def key(self):
        return (self.kind, repr(sorted(self.to_spec().items())))

    def __eq__(self, other) -> bool:
        if not isinstance(other, IncrementDistribution):
            return False
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_spec()})"


class ExplicitDistribution(IncrementDistribution):
    """Finitely supported law given by the list q_0, ..., q_K."""

    kind = DistributionKind.explicit

    def __init__(self, weights: Iterable,
                 normalization_tolerance: Optional[float] = None):
        """Validates the weights and precomputes tails, mean and gcd.

        Weights given as integers, Fractions or "num/den" strings are kept
        exact. As soon as a float is present the law is in float mode: the
        largest weight is then adjusted so that the weights sum to 1, and the
        adjustment is stored in normalization_adjustment.

        Args:
            weights (iterable): the weights q_0, ..., q_K.
            normalization_tolerance (float): the largest deviation of float
                weights from unit mass before NotNormalized is raised.

        Raises:
            NonzeroAtZero, NegativeWeight, NotNormalized, Periodic
        """
        if normalization_tolerance is None:
            normalization_tolerance = numerics.normalization_tolerance
        raw = list(weights)
        if not raw:
            raise NotNormalized("The law has no weight at all.")
        self.is_rational = not any(
            isinstance(value, (float, np.floating)) for value in raw
        )
        if self.is_rational:
            values = [to_fraction(value) for value in raw]
        else:
            values = [float(to_fraction(value)) for value in raw]
        if values[0] != 0:
            raise NonzeroAtZero(f"q_0 = {format_scalar(values[0])}.")
        negative = [n for n, value in enumerate(values) if value < 0]
        if negative:
            raise NegativeWeight(f"Negative weights at indices {negative}.")
        if self.is_rational:
            total = sum(values, Fraction(0))
            if total != 1:
                raise NotNormalized(
                    f"The weights sum to {format_scalar(total)}.")
        else:
            total = math.fsum(values)
            if abs(total - 1.0) > normalization_tolerance:
                raise NotNormalized(
                    f"The weights sum to {total!r}, more than "
                    f"{normalization_tolerance} away from 1."
                )
            largest = int(np.argmax(values))
            adjustment = 1.0 - total
            values[largest] = values[largest] + adjustment
            self.normalization_adjustment = adjustment
            if adjustment:
                logger.debug(
                    f"Weight q_{largest} adjusted by {adjustment:.3g} to "
                    "reach unit mass."
                )
        support = [n for n, value in enumerate(values) if value != 0]
        self.support_gcd = reduce(math.gcd, support)
        if self.support_gcd != 1:
            raise Periodic(
                f"gcd of the support {support} is {self.support_gcd}.")
        self.support_bound = support[-1]
        self._weights = values[: self.support_bound + 1]
        zero = Fraction(0) if self.is_rational else 0.0
        tails = []
        remaining = zero
        for value in reversed(self._weights):
            tails.append(remaining)
            remaining = remaining + value
        self._tails = list(reversed(tails))
        self._tails[0] = Fraction(1) if self.is_rational else 1.0
        self._zero = zero
        self.mean = ExtendedReal(
            sum((n * value for n, value in enumerate(self._weights)), zero)
        )

    def weight(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Weights are indexed from 0.")
        if n > self.support_bound:
            return self._zero
        return self._weights[n]

    def tail(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Tails are indexed from 0.")
        if n >= self.support_bound:
            return self._zero
        return self._tails[n]

    def to_spec(self) -> Dict:
        return {"explicit": [format_scalar(value) for value in self._weights]}


class GeometricDistribution(IncrementDistribution):
    """Law with q_n = (1-a) a^(n-1) for n >= 1, hence Q_n = a^n."""

    kind = DistributionKind.geometric

    def __init__(self, a: Union[str, Fraction, float]):
        if isinstance(a, (float, np.floating)):
            self.a = float(a)
            self.is_rational = False
        else:
            self.a = to_fraction(a)
            self.is_rational = True
        if self.a < 0:
            raise NegativeWeight(f"a = {format_scalar(self.a)} is negative.")
        if self.a >= 1:
            raise NotNormalized(
                f"a = {format_scalar(self.a)} leaves no mass on finite steps."
            )
        # q_1 = 1 - a > 0 certifies the gcd
        self.support_gcd = 1
        self.support_bound = 1 if self.a == 0 else None
        self.mean = ExtendedReal(1 / (1 - self.a))

    def weight(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Weights are indexed from 0.")
        if n == 0:
            return Fraction(0) if self.is_rational else 0.0
        return (1 - self.a) * self.a ** (n - 1)

    def tail(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Tails are indexed from 0.")
        return self.a ** n

    def tail_bound(self, n: int) -> float:
        if self.is_rational and n <= _EXACT_TAIL_INDEX:
            return float_above(self.tail(n))
        # float(a) is within eps/2 of a and pow within one ulp of float(a)^n
        bound = float(self.a) ** n * (1 + (n + 2) * EPS)
        if bound < TINY:
            bound = 2 * TINY
        return float(np.nextafter(bound, np.inf))

    def weights(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        if self._resolve_exact(exact):
            return super().weights(upto, exact=True)
        a = float(self.a)
        n = np.arange(upto + 1, dtype=float)
        values = (1.0 - a) * np.power(a, np.maximum(n - 1.0, 0.0))
        values[0] = 0.0
        return Sequence(values, exact=False)

    def tails(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        if self._resolve_exact(exact):
            return super().tails(upto, exact=True)
        return Sequence(
            np.power(float(self.a), np.arange(upto + 1, dtype=float)),
            exact=False)

    def fq_closed_form(self, z, one_minus_z):
        a = float(self.a)
        return (1.0 - a) * z / (1.0 - a * z)

    def fQ_closed_form(self, z, one_minus_z):
        return 1.0 / (1.0 - float(self.a) * z)

    def fq_mpmath(self, z):
        a = _to_mpf(self.a)
        return (1 - a) * z / (1 - a * z)

    def to_spec(self) -> Dict:
        return {"family": "geometric", "a": format_scalar(self.a)}


class HarmonicDistribution(IncrementDistribution):
    """Law with q_n = 1/(n(n+1)), hence Q_n = 1/(n+1) and an infinite
    mean."""

    kind = DistributionKind.harmonic
    is_rational = True
    # q_1 = 1/2 > 0 certifies the gcd
    support_gcd = 1

    def __init__(self):
        self.support_bound = None
        self.mean = ExtendedReal.infinity()

    def weight(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Weights are indexed from 0.")
        if n == 0:
            return Fraction(0)
        return Fraction(1, n * (n + 1))

    def tail(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Tails are indexed from 0.")
        return Fraction(1, n + 1)

    def weights(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        if self._resolve_exact(exact):
            return super().weights(upto, exact=True)
        n = np.arange(upto + 1, dtype=float)
        values = np.zeros(upto + 1)
        values[1:] = 1.0 / (n[1:] * (n[1:] + 1.0))
        return Sequence(values, exact=False)

    def tails(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        if self._resolve_exact(exact):
            return super().tails(upto, exact=True)
        return Sequence(
            1.0 / np.arange(1, upto + 2, dtype=float), exact=False)

    def fq_closed_form(self, z, one_minus_z):
        """f_q(z) = 1 + (1-z) log(1-z) / z, summed directly near 0."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(one_minus_z, dtype=complex)
        values = np.empty(z.shape, dtype=complex)
        small = np.abs(z) < _HARMONIC_SERIES_RADIUS
        n = np.arange(1, _HARMONIC_SERIES_TERMS + 1, dtype=float)
        coefficients = np.concatenate(([0.0], 1.0 / (n * (n + 1.0))))
        values[small] = np.polynomial.polynomial.polyval(
            z[small], coefficients)
        large = ~small
        at_one = large & (w == 0)
        regular = large & (w != 0)
        values[at_one] = 1.0
        values[regular] = 1.0 + w[regular] * np.log(w[regular]) / z[regular]
        return values

    def fQ_closed_form(self, z, one_minus_z):
        """f_Q(z) = -log(1-z) / z, infinite at z = 1."""
        z = np.asarray(z, dtype=complex)
        w = np.asarray(one_minus_z, dtype=complex)
        values = np.empty(z.shape, dtype=complex)
        small = np.abs(z) < _HARMONIC_SERIES_RADIUS
        n = np.arange(_HARMONIC_SERIES_TERMS + 1, dtype=float)
        values[small] = np.polynomial.polynomial.polyval(
            z[small], 1.0 / (n + 1.0))
        large = ~small
        at_one = large & (w == 0)
        regular = large & (w != 0)
        values[at_one] = complex(math.inf, 0.0)
        values[regular] = -np.log(w[regular]) / z[regular]
        return values

    def fq_mpmath(self, z):
        if z == 0:
            return mpmath.mpc(0)
        return 1 + (1 - z) * mpmath.log(1 - z) / z

    def to_spec(self) -> Dict:
        return {"family": "harmonic"}


class CustomSeriesDistribution(IncrementDistribution):
    """Law given by a weight function, with a user supplied tail bound.

    The mean must be declared (math.inf for an infinite mean), since it can't
    be certified from finitely many weights. Tails default to
    1 - sum_{i<=n} q_i in float arithmetic.
    """

    kind = DistributionKind.custom_series
    is_rational = False

    def __init__(
        self,
        weight_function: Callable[[int], float],
        tail_bound_function: Callable[[int], float],
        mean: float,
        tail_function: Optional[Callable[[int], float]] = None,
        name: str = "custom",
        normalization_tolerance: Optional[float] = None,
    ):
        """Validates the law on the prefix where its tail bound exceeds the
        truncation tolerance.

        Raises:
            NonzeroAtZero, NegativeWeight, NotNormalized, Periodic
        """
        if normalization_tolerance is None:
            normalization_tolerance = numerics.normalization_tolerance
        self.name = name
        self._weight_function = weight_function
        self._tail_bound_function = tail_bound_function
        self._tail_function = tail_function
        self.support_bound = None
        self.mean = (
            ExtendedReal.infinity()
            if math.isinf(mean)
            else ExtendedReal(float(mean))
        )
        if weight_function(0) != 0:
            raise NonzeroAtZero(f"q_0 = {weight_function(0)!r}.")
        cutoff = self.truncation_index()
        prefix = np.array(
            [float(weight_function(n)) for n in range(cutoff + 1)])
        if np.any(prefix < 0):
            raise NegativeWeight(
                f"Negative weights at indices "
                f"{np.flatnonzero(prefix < 0).tolist()}."
            )
        missing = 1.0 - math.fsum(prefix.tolist())
        if not -normalization_tolerance <= missing <= (
            self.tail_bound(cutoff) + normalization_tolerance
        ):
            raise NotNormalized(
                f"The first {cutoff + 1} weights leave a mass of {missing!r},"
                f" incompatible with the tail bound "
                f"{self.tail_bound(cutoff)!r}."
            )
        support = np.flatnonzero(prefix).tolist()
        self.support_gcd = reduce(math.gcd, support) if support else 0
        if self.support_gcd != 1:
            # gcd of a prefix of the support is a multiple of the full gcd
            raise Periodic(
                f"The support gcd can't be certified: the first {cutoff + 1}"
                f" weights have gcd {self.support_gcd}."
            )

    def weight(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Weights are indexed from 0.")
        return float(self._weight_function(n))

    def tail(self, n: int) -> Scalar:
        if n < 0:
            raise ValueError("Tails are indexed from 0.")
        if self._tail_function is not None:
            return float(self._tail_function(n))
        return max(
            1.0 - math.fsum(self.weight(i) for i in range(n + 1)), 0.0)

    def tail_bound(self, n: int) -> float:
        return float(self._tail_bound_function(n))

    def tails(self, upto: int, exact: Optional[bool] = None) -> Sequence:
        self._resolve_exact(exact)
        if self._tail_function is not None:
            return super().tails(upto, exact=False)
        cumulative = np.cumsum(self.weights(upto, exact=False).terms)
        return Sequence(np.clip(1.0 - cumulative, 0.0, 1.0), exact=False)

    def to_spec(self) -> Dict:
        return {"family": "custom-series", "name": self.name}

    def key(self):
        return (self.kind, id(self))


__families__ = {
    DistributionKind.geometric.value: GeometricDistribution,
    DistributionKind.harmonic.value: HarmonicDistribution,
}


def validate(raw_weights) -> IncrementDistribution:
    """Builds a validated increment law from a weight specification.

    Args:
        raw_weights: either an already validated law, a list of explicit
            weights, or a distribution spec dictionary:
            {"explicit": ["0", "1/2", "1/2"]},
            {"family": "geometric", "a": "1/2"} or {"family": "harmonic"}.

    Returns:
        IncrementDistribution: the validated law.

    Raises:
        DistributionError: naming the violated clause of the hypotheses.
        ValueError: if the specification itself can't be understood.
    """
    if isinstance(raw_weights, IncrementDistribution):
        return raw_weights
    if isinstance(raw_weights, dict):
        if "explicit" in raw_weights:
            return ExplicitDistribution(raw_weights["explicit"])
        family = raw_weights.get("family")
        parameters = {
            key: value for key, value in raw_weights.items()
            if key != "family"
        }
        try:
            family_class = __families__[family]
        except KeyError:
            raise ValueError(
                f"{family} is not among possible families. "
                f"You can choose among {list(__families__.keys())}"
            )
        return family_class(**parameters)
    return ExplicitDistribution(raw_weights)
