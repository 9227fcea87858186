# Copyright 2020 BULL SAS All rights reserved
"""This module computes the differences Delta^l[p]_m of the renewal sequence
as Fourier coefficients, independently of the recurrence:

- inside the disk, for 0 < r < 1 and l in {0, 1, 2},
    2 pi Delta^l[p]_m r^m = int_{-pi}^{pi} (1 - r e^{i theta})^l /
    (1 - f_q(r e^{i theta})) e^{-i m theta} d theta,
- on the unit circle for a finite mean,
    2 pi Delta[p]_m = int_{-pi}^{pi} e^{-i m theta} / f_Q(e^{i theta})
    d theta,
- on the unit circle for an infinite mean,
    2 pi Delta^2[p]_m = int_{-pi}^{pi} H(1, theta) e^{-i m theta} d theta.

The integrals are computed with the composite trapezoid rule on K panels
theta_j = -pi + 2 pi j / K, which is spectrally accurate for smooth
periodic integrands. The error estimate is the difference with the rule on
K/2 panels, obtained from every other sample. Integrands inside the disk can
also be sampled in extended precision with mpmath.

It also provides the decay tables of Delta^k[p]_m along growing m that
illustrate the vanishing of Fourier coefficients of continuous functions.
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import mpmath
import numpy as np
from loguru import logger

from renewal_core.config import NumericsConfig
from renewal_kit.distributions import validate
from renewal_kit.exceptions import FiniteMean, InfiniteMean
from renewal_kit.generating_functions import (
    ComplexValue,
    H_array,
    fQ_array,
    fq_array,
    one_minus_z,
)
from renewal_kit.renewal import RenewalSequence, compute_renewal
from renewal_kit.reports import CheckResult, Report

numerics = NumericsConfig()

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a Fourier integral.

    Attributes:
        value (ComplexValue): the integral, with a bound on the error coming
            from the truncation of the series in the integrand.
        panels (int): the number of panels K.
        est_error (float): |I_K - I_{K/2}|, a convergence estimate and not a
            rigorous bound.
        integrand_id (str): the integrand, such as "disk(l=1, r=0.9)",
            "finite_case_inv_fQ" or "infinite_case_H1".
        m (int): the index of the Fourier coefficient.
        scale (float): the factor relating the integral to the coefficient
            Delta^l[p]_m, 2 pi r^m inside the disk and 2 pi on the circle.
    """

    value: ComplexValue
    panels: int
    est_error: float
    integrand_id: str
    m: int
    scale: float = TWO_PI

    @property
    def coefficient(self) -> complex:
        """The integral divided by its scale, an estimate of
        Delta^l[p]_m."""
        return self.value.value / self.scale

    @property
    def coefficient_error(self) -> float:
        return self.est_error / self.scale


def _check_panels(panels: Optional[int]) -> int:
    panels = numerics.default_panels if panels is None else panels
    if panels < 2 or panels % 2:
        raise ValueError(
            f"The number of panels must be a positive even number, "
            f"got {panels}.")
    return panels


def _angles(panels: int) -> np.ndarray:
    return -math.pi + TWO_PI * np.arange(panels) / panels


def _trapezoid(samples: np.ndarray, theta: np.ndarray, m_values):
    """Trapezoid sums on K and K/2 panels of samples e^{-i m theta} for
    every m."""
    panels = samples.size
    m_values = np.asarray(m_values, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(m_values, theta))
    weighted = phases * samples
    full = TWO_PI / panels * weighted.sum(axis=1)
    half = TWO_PI / (panels // 2) * weighted[:, ::2].sum(axis=1)
    return full, half


def _mp_disk(d, l: int, r: float, m_values, panels: int, precision: int):
    """Trapezoid sums of the integrand inside the disk, sampled and summed
    with precision decimal digits."""
    full, half = [], []
    with mpmath.workdps(precision):
        radius = mpmath.mpf(r)
        theta = [
            -mpmath.pi + 2 * mpmath.pi * j / panels for j in range(panels)
        ]
        samples = []
        for angle in theta:
            z = radius * mpmath.expj(angle)
            samples.append((1 - z) ** l / (1 - d.fq_mpmath(z)))
        for m in m_values:
            terms = [
                sample * mpmath.expj(-m * angle)
                for sample, angle in zip(samples, theta)
            ]
            full_sum = 2 * mpmath.pi / panels * mpmath.fsum(terms)
            half_sum = 4 * mpmath.pi / panels * mpmath.fsum(terms[::2])
            full.append(complex(full_sum))
            half.append(complex(half_sum))
    return np.array(full), np.array(half)


def disk_coefficients(d, l: int, r: float, m_max: int,
                      panels: Optional[int] = None,
                      precision: Optional[int] = None
                      ) -> List[QuadratureResult]:
    """Computes the integrals of (1 - z)^l / (1 - f_q(z)) e^{-i m theta}
    on the circle of radius r for every m = 0..m_max from a single set of
    samples.

    Args:
        d (IncrementDistribution or spec): the increment law.
        l (int): the order of the difference, 0, 1 or 2.
        r (float): the radius, in (0, 1).
        m_max (int): the largest index.
        panels (int): the number of panels, 4096 by default.
        precision (int): when given, the number of decimal digits used by
            mpmath to sample and sum the integrand. In double precision the
            rounding of the integral, about 1e-16, is divided by r^m when
            recovering the coefficient, so small radii and large m call for
            extended precision.

    Returns:
        list of QuadratureResult: the integrals for m = 0..m_max.
    """
    d = validate(d)
    if l not in (0, 1, 2):
        raise ValueError(f"The order l must be 0, 1 or 2, got {l}.")
    if not 0 < r < 1:
        raise ValueError(f"The radius must lie in (0, 1), got {r}.")
    if m_max < 0:
        raise ValueError("The index m must be nonnegative.")
    panels = _check_panels(panels)
    m_values = list(range(m_max + 1))
    identifier = f"disk(l={l}, r={r!r})"
    if precision is None:
        theta = _angles(panels)
        radius = np.full(panels, float(r))
        fq, fq_errors = fq_array(d, radius, theta)
        denominator = 1 - fq
        samples = one_minus_z(radius, theta) ** l / denominator
        sample_errors = np.abs(samples) * fq_errors / np.abs(denominator)
        full, half = _trapezoid(samples, theta, m_values)
        error_bound = TWO_PI * float(np.max(sample_errors))
    else:
        logger.debug(
            f"Sampling {identifier} with {precision} digits on {panels} "
            "panels")
        full, half = _mp_disk(d, l, r, m_values, panels, precision)
        error_bound = 0.0
    return [
        QuadratureResult(
            value=ComplexValue.from_complex(full[m], error_bound),
            panels=panels,
            est_error=float(abs(full[m] - half[m])),
            integrand_id=identifier,
            m=m,
            scale=TWO_PI * float(r) ** m,
        )
        for m in m_values
    ]


def disk_integral(d, l: int, m: int, r: float,
                  panels: Optional[int] = None,
                  precision: Optional[int] = None) -> QuadratureResult:
    """Computes int_{-pi}^{pi} (1 - r e^{i theta})^l / (1 - f_q(r e^{i
    theta})) e^{-i m theta} d theta, which equals 2 pi Delta^l[p]_m r^m.

    See disk_coefficients for the arguments.
    """
    if m < 0:
        raise ValueError("The index m must be nonnegative.")
    return disk_coefficients(d, l, r, m, panels, precision)[m]


def _circle_integral(samples: np.ndarray, sample_errors: np.ndarray,
                     theta: np.ndarray, m: int,
                     identifier: str) -> QuadratureResult:
    full, half = _trapezoid(samples, theta, [m])
    return QuadratureResult(
        value=ComplexValue.from_complex(
            full[0], TWO_PI * float(np.max(sample_errors))),
        panels=samples.size,
        est_error=float(abs(full[0] - half[0])),
        integrand_id=identifier,
        m=m,
    )


def finite_case_integral(d, m: int,
                         panels: Optional[int] = None) -> QuadratureResult:
    """Computes int_{-pi}^{pi} e^{-i m theta} / f_Q(e^{i theta}) d theta,
    which equals 2 pi Delta[p]_m when the mean is finite.

    Raises:
        InfiniteMean: if the mean of the law is infinite.
    """
    d = validate(d)
    if not d.has_finite_mean:
        raise InfiniteMean(
            "1/f_Q vanishes at z=1 for an infinite mean, use "
            "infinite_case_integral.")
    if m < 0:
        raise ValueError("The index m must be nonnegative.")
    panels = _check_panels(panels)
    theta = _angles(panels)
    fQ, fQ_errors = fQ_array(d, np.ones(panels), theta)
    samples = 1 / fQ
    sample_errors = fQ_errors / np.abs(fQ) ** 2
    return _circle_integral(
        samples, sample_errors, theta, m, "finite_case_inv_fQ")


def infinite_case_integral(d, m: int,
                           panels: Optional[int] = None) -> QuadratureResult:
    """Computes int_{-pi}^{pi} H(1, theta) e^{-i m theta} d theta, which
    equals 2 pi Delta^2[p]_m when the mean is infinite. The sample at
    theta = 0 takes the value H(1, 0) = 0.

    Raises:
        FiniteMean: if the mean of the law is finite.
    """
    d = validate(d)
    if d.has_finite_mean:
        raise FiniteMean(
            "H does not vanish at z=1 for a finite mean, use "
            "finite_case_integral.")
    if m < 0:
        raise ValueError("The index m must be nonnegative.")
    panels = _check_panels(panels)
    theta = _angles(panels)
    samples, sample_errors = H_array(d, np.ones(panels), theta)
    return _circle_integral(
        samples, sample_errors, theta, m, "infinite_case_H1")


def radial_limit_check(d, m_values: Iterable[int], r: float = 0.999,
                       panels: Optional[int] = None,
                       tolerance: float = 1e-4) -> Report:
    """Checks that the integral on the unit circle agrees with the integral
    of (1 - z) / (1 - f_q(z)) e^{-i m theta} on the circle of radius r,
    divided by r^m, for a finite-mean law.

    Raises:
        InfiniteMean: if the mean of the law is infinite.
    """
    d = validate(d)
    m_values = sorted(set(int(m) for m in m_values))
    inside = disk_coefficients(d, 1, r, m_values[-1], panels)
    gaps = []
    for m in m_values:
        boundary = finite_case_integral(d, m, panels).value.value
        scaled = inside[m].value.value / r ** m
        gaps.append(abs(boundary - scaled))
    index = int(np.argmax(gaps))
    report = Report(title="radial limit")
    report.add(
        CheckResult(
            name=f"circle integral = radius {r!r} integral / r^m",
            passed=max(gaps) <= tolerance,
            worst=float(max(gaps)),
            tolerance=tolerance,
            location=f"m={m_values[index]}",
            detail=f"{len(m_values)} indices",
        )
    )
    return report


@dataclass
class QuadratureComparison:
    """One row of a recurrence against quadrature comparison."""

    l: int
    m: int
    r: float
    recurrence_value: float
    integral_value: float
    abs_diff: float
    est_error: float

    def to_record(self) -> dict:
        return {
            "l": self.l,
            "m": self.m,
            "r": self.r,
            "recurrence_value": self.recurrence_value,
            "integral_value": self.integral_value,
            "abs_diff": self.abs_diff,
            "est_error": self.est_error,
        }


def compare_quadrature(d, orders: Iterable[int], m_max: int,
                       radii: Iterable[float],
                       panels: Optional[int] = None,
                       precision: Optional[int] = None,
                       renewal: Optional[RenewalSequence] = None
                       ) -> List[QuadratureComparison]:
    """Compares Delta^l[p]_m from the recurrence with the integrals inside
    the disk divided by 2 pi r^m, for every order, radius and m <= m_max.
    Radius 1 rows use the circle integrals, finite_case_integral for a
    finite mean (order 1 only) and infinite_case_integral for an infinite
    mean (order 2 only)."""
    d = validate(d)
    if renewal is None or renewal.upto < m_max:
        renewal = compute_renewal(d, m_max)
    rows = []
    for r in radii:
        for l in orders:
            differences = renewal.delta(l)
            if r < 1:
                results = disk_coefficients(
                    d, l, r, m_max, panels, precision)
            elif d.has_finite_mean and l == 1:
                results = [
                    finite_case_integral(d, m, panels)
                    for m in range(m_max + 1)
                ]
            elif not d.has_finite_mean and l == 2:
                results = [
                    infinite_case_integral(d, m, panels)
                    for m in range(m_max + 1)
                ]
            else:
                logger.debug(f"No circle integral for l={l} and {d!r}")
                continue
            for result in results:
                expected = float(differences[result.m])
                computed = result.coefficient.real
                rows.append(
                    QuadratureComparison(
                        l=l,
                        m=result.m,
                        r=float(r),
                        recurrence_value=expected,
                        integral_value=computed,
                        abs_diff=abs(computed - expected),
                        est_error=result.coefficient_error,
                    )
                )
    return rows


@dataclass
class DecayTable:
    """|Delta^k[p]_m| along a list of indices m."""

    order: int
    rows: List[tuple] = field(default_factory=list)

    @property
    def values(self) -> List:
        return [value for _, value in self.rows]

    def strictly_decreasing(self) -> bool:
        values = self.values
        return all(a > b for a, b in zip(values, values[1:]))

    def nonincreasing(self, tolerance: float = 0.0) -> bool:
        values = self.values
        return all(b <= a + tolerance for a, b in zip(values, values[1:]))


def riemann_lebesgue_probe(d, k: int, m_values: Iterable[int],
                           exact: Optional[bool] = None,
                           renewal: Optional[RenewalSequence] = None
                           ) -> DecayTable:
    """Tabulates |Delta^k[p]_m| at the given indices, computing p by the
    recurrence.

    Delta[p] is the sequence of Fourier coefficients of 1/f_Q on the circle
    when the mean is finite, and Delta^2[p] the one of H(1, .) when it is
    infinite. Probing k = 1 on an infinite-mean law is allowed, but nothing
    forces the decay then and a warning is logged.

    Args:
        d (IncrementDistribution or spec): the increment law.
        k (int): the order of the difference.
        m_values (iterable of int): the indices, increasing.
        exact (bool): whether to compute p with exact rationals. Defaults to
            exact mode for rational laws up to index 1000.
        renewal (RenewalSequence): an already computed sequence to reuse.
    """
    d = validate(d)
    if k < 0:
        raise ValueError("The order must be nonnegative.")
    m_values = sorted(set(int(m) for m in m_values))
    if not m_values:
        return DecayTable(order=k)
    if k == 1 and not d.has_finite_mean:
        logger.warning(
            f"Delta[p] is not a Fourier coefficient sequence of a continuous "
            f"function for the infinite-mean law {d!r}; decay is not "
            "guaranteed")
    upto = m_values[-1]
    if renewal is None or renewal.upto < upto:
        if exact is None:
            exact = d.is_rational and upto <= 1000
        renewal = compute_renewal(d, upto, exact=exact)
    differences = renewal.delta(k)
    return DecayTable(
        order=k, rows=[(m, abs(differences[m])) for m in m_values])
