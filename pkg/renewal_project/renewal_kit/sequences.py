# Copyright 2020 BULL SAS All rights reserved
"""This module implements the sequence algebra the rest of the library is
built on. A Sequence is an immutable finite prefix a_0, ..., a_N of a real or
complex sequence, stored either:

- exactly, as a numpy object array of fractions.Fraction (exact mode), in
    which case every operation is free of rounding,
- or as an IEEE double (or complex double) numpy array (float mode), in which
    case each operation documents its error budget.

The available operations are:

- Cauchy convolution (a*b)_n = sum_{i<=n} a_i b_{n-i}, computed on prefixes.
- The difference operator Delta and its powers.
- The prefix sum, inverse of Delta on prefixes.
- The distinguished sequences I (convolution identity) and 1 (all ones).

Indexing outside of the stored prefix is an error and never an implicit
zero.
"""

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Optional, Union

import numpy as np

from renewal_core.config import RuntimeConfig
from renewal_kit.exceptions import InsufficientPrefix, SequenceIndexError

Scalar = Union[Fraction, float, complex]

runtime_settings = RuntimeConfig()


def to_fraction(value) -> Fraction:
    """Converts an integer, a fraction, a float or a "num/den" string into a
    Fraction, without any rounding."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, np.integer):
        return Fraction(int(value))
    if isinstance(value, (Rational, float)):
        return Fraction(value)
    if isinstance(value, np.floating):
        return Fraction(float(value))
    raise TypeError(f"Can't convert {value!r} to an exact rational.")


def _is_rational(value) -> bool:
    return isinstance(value, (Rational, np.integer)) and not isinstance(
        value, bool
    )


class Sequence:
    """Immutable prefix a_0..a_N of a sequence, in exact or float mode."""

    __slots__ = ("_terms", "_exact")

    def __init__(self, terms: Iterable, exact: Optional[bool] = None):
        """Builds a sequence from its terms.

        Args:
            terms (iterable or numpy array): the values a_0, ..., a_N.
            exact (bool): whether to store exact rationals. Defaults to
                exact mode when every term is an integer or a Fraction.

        Raises:
            ValueError: if there is no term at all.
        """
        if isinstance(terms, Sequence):
            terms = terms.terms
        if isinstance(terms, np.ndarray):
            values = terms
        else:
            values = list(terms)
        if len(values) == 0:
            raise ValueError("A sequence holds at least the term a_0.")
        if exact is None:
            if isinstance(values, np.ndarray) and values.dtype != object:
                exact = values.dtype.kind in "iu"
            else:
                exact = all(_is_rational(value) for value in values)
        if exact:
            array = np.empty(len(values), dtype=object)
            array[:] = [to_fraction(value) for value in values]
        else:
            array = np.asarray(values)
            if array.dtype == object or array.dtype.kind in "iub":
                is_complex = any(isinstance(v, complex) for v in array)
                array = array.astype(complex if is_complex else float)
            elif array.dtype.kind not in "fc":
                raise TypeError(f"Unsupported dtype {array.dtype}.")
            array = np.array(array, copy=True)
        if array.ndim != 1:
            raise ValueError("A sequence is one-dimensional.")
        array.flags.writeable = False
        self._terms = array
        self._exact = bool(exact)

    @classmethod
    def from_values(cls, *values, exact: Optional[bool] = None):
        """Builds a sequence from its terms given as arguments, such as
        Sequence.from_values(1, "1/2", "3/4")."""
        if exact is None:
            exact = not any(
                isinstance(value, (float, complex)) for value in values
            )
        if exact:
            values = [to_fraction(value) for value in values]
        return cls(values, exact=exact)

    @property
    def terms(self) -> np.ndarray:
        """Read-only view of the stored terms."""
        return self._terms

    @property
    def exact(self) -> bool:
        return self._exact

    @property
    def upto(self) -> int:
        """Index N of the last stored term."""
        return len(self._terms) - 1

    def __len__(self) -> int:
        return len(self._terms)

    def __getitem__(self, index: int) -> Scalar:
        if isinstance(index, slice):
            raise TypeError("Use prefix() or terms to slice a sequence.")
        index = int(index)
        if not 0 <= index <= self.upto:
            raise SequenceIndexError(
                f"Index {index} outside of the stored prefix [0, {self.upto}]."
            )
        value = self._terms[index]
        return value if self._exact else value.item()

    def __iter__(self):
        for index in range(len(self)):
            yield self[index]

    def tolist(self) -> list:
        return list(self)

    def prefix(self, upto: int) -> "Sequence":
        """Returns the prefix a_0..a_upto."""
        if not 0 <= upto <= self.upto:
            raise InsufficientPrefix(
                f"Prefix up to {upto} requested from a sequence stored up "
                f"to {self.upto}."
            )
        return Sequence(self._terms[: upto + 1], exact=self._exact)

    def as_float(self) -> "Sequence":
        """Returns the float mode copy of the sequence."""
        if not self._exact:
            return self
        return Sequence(self._terms.astype(float), exact=False)

    def as_exact(self) -> "Sequence":
        """Returns the exact copy of the sequence: floats are converted to the
        rationals they represent."""
        if self._exact:
            return self
        if self._terms.dtype.kind == "c":
            raise TypeError("Complex sequences have no exact mode.")
        return Sequence(self._terms.tolist(), exact=True)

    def _coerce(self, other: "Sequence"):
        if not isinstance(other, Sequence):
            return NotImplemented
        if len(other) != len(self):
            raise InsufficientPrefix(
                f"Sequences of lengths {len(self)} and {len(other)} "
                "can't be combined termwise."
            )
        exact = self._exact and other._exact
        left = self if exact else self.as_float()
        right = other if exact else other.as_float()
        return left._terms, right._terms, exact

    def __add__(self, other: "Sequence") -> "Sequence":
        coerced = self._coerce(other)
        if coerced is NotImplemented:
            return coerced
        left, right, exact = coerced
        return Sequence(left + right, exact=exact)

    def __sub__(self, other: "Sequence") -> "Sequence":
        coerced = self._coerce(other)
        if coerced is NotImplemented:
            return coerced
        left, right, exact = coerced
        return Sequence(left - right, exact=exact)

    def __neg__(self) -> "Sequence":
        return Sequence(-self._terms, exact=self._exact)

    def scale(self, factor: Scalar) -> "Sequence":
        """Multiplies every term by factor, staying exact when both the
        sequence and the factor are rational."""
        if self._exact and _is_rational(factor):
            return Sequence(self._terms * to_fraction(factor), exact=True)
        return Sequence(self.as_float()._terms * factor, exact=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Sequence) or len(other) != len(self):
            return False
        return bool(np.all(self._terms == other._terms))

    def __hash__(self):
        return hash((self._exact, tuple(self._terms.tolist())))

    def __repr__(self) -> str:
        shown = ", ".join(str(value) for value in self._terms[:8])
        more = ", ..." if len(self) > 8 else ""
        mode = "exact" if self._exact else "float"
        return f"Sequence<{mode}>({shown}{more})"


def identity_seq(upto: int, exact: bool = True) -> Sequence:
    """Returns the convolution identity I (I_0 = 1, I_n = 0) up to upto."""
    if upto < 0:
        raise ValueError("upto must be nonnegative.")
    if exact:
        return Sequence([1] + [0] * upto, exact=True)
    terms = np.zeros(upto + 1)
    terms[0] = 1.0
    return Sequence(terms, exact=False)


def ones_seq(upto: int, exact: bool = True) -> Sequence:
    """Returns the constant sequence 1 up to upto."""
    if upto < 0:
        raise ValueError("upto must be nonnegative.")
    if exact:
        return Sequence([1] * (upto + 1), exact=True)
    return Sequence(np.ones(upto + 1), exact=False)


def convolve(a: Sequence, b: Sequence, upto: int) -> Sequence:
    """Computes the prefix of the Cauchy product a*b up to index upto.

    In exact mode the result is exact; zero terms are skipped, which keeps
    products with finitely supported laws linear in upto. In float mode the
    direct (non-FFT) numpy convolution is used, and each output term c_n
    carries an error of at most (n+1) eps sum_i |a_i| |b_{n-i}|.

    Args:
        a (Sequence): the left factor.
        b (Sequence): the right factor.
        upto (int): the last index to compute.

    Returns:
        Sequence: (a*b)_0, ..., (a*b)_upto.

    Raises:
        InsufficientPrefix: if a or b is shorter than upto+1 terms.
    """
    if upto < 0:
        raise ValueError("upto must be nonnegative.")
    for name, sequence in (("left", a), ("right", b)):
        if len(sequence) < upto + 1:
            raise InsufficientPrefix(
                f"The {name} factor holds {len(sequence)} terms, "
                f"{upto + 1} are needed."
            )
    if a.exact and b.exact:
        left = a.terms[: upto + 1]
        right = b.terms[: upto + 1]
        result = [Fraction(0)] * (upto + 1)
        nonzero_right = [(j, w) for j, w in enumerate(right) if w]
        for i, v in enumerate(left):
            if not v:
                continue
            for j, w in nonzero_right:
                if i + j > upto:
                    break
                result[i + j] += v * w
        return Sequence(result, exact=True)
    left = a.as_float().terms[: upto + 1]
    right = b.as_float().terms[: upto + 1]
    return Sequence(np.convolve(left, right)[: upto + 1], exact=False)


def delta(a: Sequence, k: int = 1) -> Sequence:
    """Applies the difference operator k times.

    Delta[a]_0 = a_0 and Delta[a]_n = a_n - a_{n-1}; Delta^0[a] = a. The
    result lives on the same index range as a.
    """
    if k < 0:
        raise ValueError("The order of the difference operator must be >= 0.")
    terms = a.terms
    for _ in range(k):
        terms = np.concatenate((terms[:1], terms[1:] - terms[:-1]))
    return Sequence(terms, exact=a.exact)


def prefix_sum(a: Sequence) -> Sequence:
    """Returns the cumulative sums a_0, a_0 + a_1, ...; inverse of delta."""
    if a.exact:
        return Sequence(np.cumsum(a.terms, dtype=object), exact=True)
    return Sequence(np.cumsum(a.terms), exact=False)


def compensated_dot(x: np.ndarray, y: np.ndarray,
                    block_size: Optional[int] = None) -> float:
    """Dot product of two float vectors with compensated summation.

    The products are summed pairwise inside blocks of block_size terms, and
    the block partials are then added with math.fsum, which is exactly
    rounded. The rounding error is at most
    (ceil(log2(block_size)) + 2) eps sum_i |x_i y_i|.
    """
    if block_size is None:
        block_size = runtime_settings.summation_block_size
    products = np.multiply(x, y)
    if products.size == 0:
        return 0.0
    starts = np.arange(0, products.size, block_size)
    return math.fsum(np.add.reduceat(products, starts).tolist())


def format_scalar(value: Scalar) -> str:
    """Serializes a scalar: rationals as "num/den" strings, floats with 17
    significant digits so that they round-trip."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if _is_rational(value):
        return str(int(value))
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return f"{float(value):.17g}"
