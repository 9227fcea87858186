# Copyright 2020 BULL SAS All rights reserved
"""This module evaluates the generating functions f_a(z) = sum_n a_n z^n of
the sequences attached to an increment law on the closed unit disk, with
z = r e^{i theta}, 0 < r <= 1, -pi <= theta <= pi:

- f_q, defined on the whole closed disk since sum q_n = 1,
- f_Q, defined on the closed disk when the mean is finite,
- f_p, defined on the open disk, from a computed renewal sequence,

the auxiliary functions

- G(x) = (1 - cos x) / x^2, extended by 1/2 at 0,
- H(r, theta) = (1 - z)^2 / (1 - f_q(z)), extended by 0 at z = 1,

and checks on grids of the disk the inequalities and identities relating
them: sum q_n r^n cos(n theta) < 1 away from z = 1, the bound
|(1 - z)^2 / (1 - f_q(z))| <= (1 + r^2 - 2 r cos theta) /
(1 - sum q_n r^n cos(n theta)), the decomposition of 1 - sum q_n r^n cos(n
theta), f_p (1 - f_q) = 1 on the open disk, (1 - z) f_Q = 1 - f_q and the
vanishing of H at z = 1 for infinite-mean laws.

Every series is either summed in closed form, or truncated at an index N
whose remainder is bounded through the tail bound of the law, the bound
being returned along with the value.
"""

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from renewal_core.config import NumericsConfig
from renewal_kit.distributions import IncrementDistribution, validate
from renewal_kit.exceptions import FiniteMean, InfiniteMean
from renewal_kit.renewal import RenewalSequence
from renewal_kit.reports import CheckResult, Report

numerics = NumericsConfig()

EPS = float(np.finfo(float).eps)
# Number of powers z^n evaluated at once per grid point
_SERIES_CHUNK = 512


@dataclass(frozen=True)
class PolarPoint:
    """The point z = r e^{i theta} of the closed unit disk."""

    r: float
    theta: float

    def __post_init__(self):
        if not 0 < self.r <= 1:
            raise ValueError(f"The modulus r={self.r} is not in (0, 1].")
        if not -math.pi <= self.theta <= math.pi:
            raise ValueError(
                f"The argument theta={self.theta} is not in [-pi, pi].")

    @property
    def is_singular(self) -> bool:
        """Whether the point is z = 1."""
        return self.r == 1 and self.theta == 0

    @property
    def z(self) -> complex:
        return complex(
            self.r * math.cos(self.theta), self.r * math.sin(self.theta))


@dataclass(frozen=True)
class ComplexValue:
    """A computed complex number with a bound on its truncation error."""

    re: float
    im: float
    error_bound: float = 0.0

    @classmethod
    def from_complex(cls, value: complex,
                     error_bound: float = 0.0) -> "ComplexValue":
        value = complex(value)
        return cls(value.real, value.imag, float(error_bound))

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class PolarGrid:
    """A set of points of the closed disk stored as two flat arrays."""

    r: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        r = np.atleast_1d(np.asarray(self.r, dtype=float))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float))
        if r.shape != theta.shape:
            raise ValueError("r and theta must have the same shape.")
        if np.any(r <= 0) or np.any(r > 1):
            raise ValueError("Every modulus must lie in (0, 1].")
        if np.any(np.abs(theta) > math.pi):
            raise ValueError("Every argument must lie in [-pi, pi].")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_points(cls, points) -> "PolarGrid":
        points = list(points)
        return cls(
            np.array([point.r for point in points], dtype=float),
            np.array([point.theta for point in points], dtype=float),
        )

    def __len__(self) -> int:
        return self.r.size

    @property
    def singular(self) -> np.ndarray:
        return (self.r == 1) & (self.theta == 0)

    def without_singular_point(self) -> "PolarGrid":
        keep = ~self.singular
        return PolarGrid(self.r[keep], self.theta[keep])

    def select(self, mask: np.ndarray) -> "PolarGrid":
        return PolarGrid(self.r[mask], self.theta[mask])


Points = Union[PolarPoint, PolarGrid]


def _as_grid(points: Points) -> PolarGrid:
    if isinstance(points, PolarPoint):
        return PolarGrid(np.array([points.r]), np.array([points.theta]))
    return points


def default_grid(radii: Optional[List[float]] = None,
                 angles: Optional[int] = None) -> PolarGrid:
    """Tensor grid of the given radii and equispaced angles of [-pi, pi],
    minus the point z = 1.

    Args:
        radii (list of float): the moduli, [0.5, 0.9, 0.99, 1.0] by default.
        angles (int): the number of angles, 512 by default.
    """
    radii = numerics.grid_radii if radii is None else radii
    angles = numerics.grid_angles if angles is None else angles
    r, theta = np.meshgrid(
        np.asarray(radii, dtype=float),
        np.linspace(-math.pi, math.pi, angles),
        indexing="ij",
    )
    return PolarGrid(r.ravel(), theta.ravel()).without_singular_point()


def one_minus_z(r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Computes 1 - r e^{i theta} without cancellation near z = 1, as
    (1 - r) + 2 r sin^2(theta / 2) - i r sin(theta)."""
    half = np.sin(theta / 2)
    return (1 - r) + 2 * r * half * half - 1j * r * np.sin(theta)


def squared_distance_to_one(r: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Computes |1 - z|^2 = (1 - r)^2 + 4 r sin^2(theta / 2)."""
    half = np.sin(theta / 2)
    return (1 - r) ** 2 + 4 * r * half * half


def power_series(coefficients: np.ndarray, r: np.ndarray,
                 theta: np.ndarray) -> np.ndarray:
    """Sums sum_n c_n r^n e^{i n theta} at every point, by chunks of
    powers computed as exp(n (log r + i theta))."""
    coefficients = np.asarray(coefficients)
    log_z = np.log(r) + 1j * theta
    total = np.zeros(r.shape, dtype=complex)
    for start in range(0, coefficients.size, _SERIES_CHUNK):
        block = coefficients[start: start + _SERIES_CHUNK]
        powers = np.arange(start, start + block.size, dtype=float)
        total += np.exp(np.multiply.outer(log_z, powers)) @ block
    return total


def _first_index(predicate: Callable[[int], bool], max_terms: int) -> int:
    """Smallest N <= max_terms with predicate(N), predicate being monotone;
    max_terms when there is none."""
    if predicate(0):
        return 0
    upper = 1
    while not predicate(upper):
        if upper >= max_terms:
            return max_terms
        upper = min(2 * upper, max_terms)
    lower = upper // 2
    while upper - lower > 1:
        middle = (lower + upper) // 2
        if predicate(middle):
            upper = middle
        else:
            lower = middle
    return upper


def _radial_index(bound: Callable[[int], float], r_max: float,
                  tolerance: float) -> int:
    return _first_index(
        lambda n: bound(n) * r_max ** (n + 1) <= tolerance,
        numerics.max_series_terms,
    )


def fq_array(d, r: np.ndarray, theta: np.ndarray,
             budget: Optional[int] = None,
             tolerance: Optional[float] = None
             ) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluates f_q at every point of the arrays r, theta.

    A finitely supported law is summed in full. Otherwise, with an explicit
    budget N the series is truncated at N and the remainder is bounded by
    Q_N r^{N+1}; without budget the closed form of the family is used when
    there is one, and else the series is truncated where the bound falls
    below tolerance.

    Returns:
        tuple of numpy arrays: the values and their error bounds.
    """
    d = validate(d)
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    zeros = np.zeros(r.shape)
    if d.support_bound is None and budget is None:
        z = r * np.exp(1j * theta)
        closed = d.fq_closed_form(z, one_minus_z(r, theta))
        if closed is not None:
            return np.asarray(closed, dtype=complex), zeros
    if tolerance is None:
        tolerance = numerics.truncation_tolerance
    if d.support_bound is not None:
        upto = d.support_bound
    elif budget is not None:
        upto = budget
    else:
        upto = _radial_index(d.tail_bound, float(np.max(r)), tolerance)
        logger.debug(f"f_q of {d!r} truncated at {upto}")
    values = power_series(d.weights(upto, exact=False).terms, r, theta)
    if d.support_bound is not None:
        return values, zeros
    return values, d.tail_bound(upto) * r ** (upto + 1)


def _mean_remainder(d: IncrementDistribution, upto: int) -> float:
    """Upper bound on sum_{i>upto} Q_i = mu - sum_{i<=upto} Q_i."""
    partial = math.fsum(d.tails(upto, exact=False).terms.tolist())
    return max(float(d.mean) - partial, 0.0)


def fQ_array(d, r: np.ndarray, theta: np.ndarray,
             budget: Optional[int] = None,
             tolerance: Optional[float] = None
             ) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluates f_Q at every point of the arrays r, theta, with error
    bounds. Truncations follow the rules of fq_array, the remainder being
    bounded by r^{N+1} sum_{i>N} Q_i.

    Raises:
        InfiniteMean: if the mean of the law is infinite.
    """
    d = validate(d)
    if not d.has_finite_mean:
        raise InfiniteMean(
            f"f_Q diverges at z=1 for the infinite-mean law {d!r}.")
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    zeros = np.zeros(r.shape)
    if d.support_bound is None and budget is None:
        z = r * np.exp(1j * theta)
        closed = d.fQ_closed_form(z, one_minus_z(r, theta))
        if closed is not None:
            return np.asarray(closed, dtype=complex), zeros
    if tolerance is None:
        tolerance = numerics.truncation_tolerance
    if d.support_bound is not None:
        upto = d.support_bound
    elif budget is not None:
        upto = budget
    else:
        r_max = float(np.max(r))
        if r_max < 1:
            upto = _radial_index(
                lambda n: d.tail_bound(n) / (1 - r_max), r_max, tolerance)
        else:
            upto = _first_index(
                lambda n: _mean_remainder(d, n) <= tolerance,
                numerics.max_series_terms,
            )
        logger.debug(f"f_Q of {d!r} truncated at {upto}")
    values = power_series(d.tails(upto, exact=False).terms, r, theta)
    if d.support_bound is not None:
        return values, zeros
    return values, _mean_remainder(d, upto) * r ** (upto + 1)


def fp_array(renewal: RenewalSequence, r: np.ndarray,
             theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluates the truncation of f_p to the computed prefix p_0..p_N. As
    0 <= p_n <= 1 the remainder is at most r^{N+1} / (1 - r), infinite on
    the unit circle."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    values = power_series(renewal.terms.as_float().terms, r, theta)
    with np.errstate(divide="ignore"):
        errors = np.where(
            r < 1, r ** (renewal.upto + 1) / (1 - r), np.inf)
    return values, errors


def H_array(d, r: np.ndarray, theta: np.ndarray,
            budget: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluates H = (1 - z)^2 / (1 - f_q(z)), set to exactly 0 at z = 1.

    The error bounds are first order propagations of the truncation errors
    of f_q."""
    d = validate(d)
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    singular = (r == 1) & (theta == 0)
    values = np.zeros(r.shape, dtype=complex)
    errors = np.zeros(r.shape)
    regular = ~singular
    if np.any(regular):
        fq, fq_errors = fq_array(d, r[regular], theta[regular], budget)
        denominator = 1 - fq
        numerator = one_minus_z(r[regular], theta[regular]) ** 2
        values[regular] = numerator / denominator
        errors[regular] = (
            np.abs(values[regular]) * fq_errors / np.abs(denominator))
    return values, errors


def _single(arrays: Tuple[np.ndarray, np.ndarray]) -> ComplexValue:
    values, errors = arrays
    return ComplexValue.from_complex(values[0], errors[0])


def eval_fq(d, point: PolarPoint,
            budget: Optional[int] = None) -> ComplexValue:
    """Evaluates f_q(r e^{i theta}) with a bound on its truncation error."""
    return _single(fq_array(d, [point.r], [point.theta], budget))


def eval_fQ(d, point: PolarPoint,
            budget: Optional[int] = None) -> ComplexValue:
    """Evaluates f_Q(r e^{i theta}) with a bound on its truncation error.

    Raises:
        InfiniteMean: if the mean of the law is infinite.
    """
    return _single(fQ_array(d, [point.r], [point.theta], budget))


def eval_fp(renewal: RenewalSequence, point: PolarPoint) -> ComplexValue:
    return _single(fp_array(renewal, [point.r], [point.theta]))


def eval_H(d, point: PolarPoint,
           budget: Optional[int] = None) -> ComplexValue:
    """Evaluates H(r, theta); H(1, 0) is exactly 0."""
    if point.is_singular:
        return ComplexValue(0.0, 0.0, 0.0)
    return _single(H_array(d, [point.r], [point.theta], budget))


def eval_G(x, threshold: Optional[float] = None):
    """Evaluates G(x) = (1 - cos x) / x^2, G(0) = 1/2.

    Below threshold in absolute value the truncated series
    1/2 - x^2/24 + x^4/720 is used, elsewhere the equivalent form
    2 sin^2(x/2) / x^2, both free of cancellation.

    Args:
        x (float or numpy array): the abscissae.
        threshold (float): the switch between both branches, 1e-4 by
            default.

    Returns:
        float or numpy array: G(x), with the shape of x.
    """
    if threshold is None:
        threshold = numerics.g_series_threshold
    values = np.asarray(x, dtype=float)
    square = values * values
    small = np.abs(values) < threshold
    safe = np.where(small, 1.0, values)
    half = np.sin(safe / 2)
    result = np.where(
        small,
        0.5 - square / 24 + square * square / 720,
        2 * half * half / (safe * safe),
    )
    if np.ndim(x) == 0:
        return float(result)
    return result


def _worst(values: np.ndarray, grid: PolarGrid) -> Tuple[float, str]:
    index = int(np.argmax(values))
    return float(values[index]), (
        f"r={grid.r[index]:.17g}, theta={grid.theta[index]:.17g}")


def check_strict_cos_bound(d, grid: Optional[PolarGrid] = None,
                           budget: Optional[int] = None) -> Report:
    """Checks sum_n q_n r^n cos(n theta) < 1 at every point of the grid,
    with a margin covering truncation and rounding errors."""
    d = validate(d)
    grid = default_grid() if grid is None else grid
    if np.any(grid.singular):
        raise ValueError("The grid must exclude the point z = 1.")
    fq, errors = fq_array(d, grid.r, grid.theta, budget)
    margin = errors + 64 * EPS
    excess = fq.real + margin - 1
    worst, location = _worst(fq.real + margin, grid)
    report = Report(title="strict cosine bound")
    report.add(
        CheckResult(
            name="sum q_n r^n cos(n theta)<1",
            passed=bool(np.all(excess < 0)),
            worst=worst,
            tolerance=1.0,
            location=location,
            detail=f"{len(grid)} points",
        )
    )
    return report


def check_H_bound(d, grid: Optional[PolarGrid] = None,
                  budget: Optional[int] = None,
                  relative_tolerance: float = 1e-12) -> Report:
    """Checks |(1 - z)^2 / (1 - f_q(z))| <= (1 + r^2 - 2 r cos theta) /
    (1 - sum q_n r^n cos(n theta)) on the grid, and its equality on the
    real segment theta = 0, r < 1 of the grid radii.

    The left-hand side only differs from the right-hand side by replacing
    |1 - f_q| with its real part, which is why the real axis, where f_q is
    real, gives an equality.
    """
    d = validate(d)
    grid = default_grid() if grid is None else grid
    if np.any(grid.singular):
        raise ValueError("The grid must exclude the point z = 1.")
    report = Report(title="disk ratio bound")

    def sides(points: PolarGrid):
        fq, errors = fq_array(d, points.r, points.theta, budget)
        denominator = 1 - fq
        distance = squared_distance_to_one(points.r, points.theta)
        lhs = distance / np.abs(denominator)
        rhs = distance / denominator.real
        slack = relative_tolerance + 2 * errors / np.abs(denominator.real)
        return lhs, rhs, slack

    lhs, rhs, slack = sides(grid)
    excess = (lhs - rhs) / rhs - slack
    worst, location = _worst((lhs - rhs) / rhs, grid)
    report.add(
        CheckResult(
            name="|(1-z)^2/(1-f_q)|<=(1+r^2-2r cos)/(1-Re f_q)",
            passed=bool(np.all(rhs > 0) and np.all(excess <= 0)),
            worst=worst,
            tolerance=relative_tolerance,
            location=location,
            detail=f"{len(grid)} points, relative excess",
        )
    )
    radii = np.unique(grid.r[grid.r < 1])
    if radii.size:
        axis = PolarGrid(radii, np.zeros(radii.size))
        lhs, rhs, slack = sides(axis)
        gap = np.abs(lhs - rhs) / rhs
        worst, location = _worst(gap, axis)
        report.add(
            CheckResult(
                name="equality on the real axis",
                passed=bool(np.all(gap <= slack)),
                worst=worst,
                tolerance=relative_tolerance,
                location=location,
                detail=f"{radii.size} radii",
            )
        )
    return report


def decomposition_check(d, point: PolarPoint,
                        budget: Optional[int] = None) -> Report:
    """Checks at one point the two decompositions

    - 1 + r^2 - 2 r cos theta = (1 - r)^2 + 4 r sin^2(theta / 2),
    - 1 - sum q_n r^n cos(n theta) = (1 - r) sum q_n (1 + r + ... + r^{n-1})
        + theta^2 sum n^2 q_n r^n G(n theta).

    The first one holds to machine precision. Both sides of the second one
    are truncated at N, which changes them by at most Q_N each.
    """
    d = validate(d)
    r, theta = point.r, point.theta
    report = Report(title="cosine decomposition")

    left = 1 + r * r - 2 * r * math.cos(theta)
    right = (1 - r) ** 2 + 4 * r * math.sin(theta / 2) ** 2
    report.add(
        CheckResult(
            name="1+r^2-2r cos theta=(1-r)^2+4r sin^2(theta/2)",
            passed=abs(left - right) <= 16 * EPS,
            worst=abs(left - right),
            tolerance=16 * EPS,
            location=f"r={r!r}, theta={theta!r}",
        )
    )

    if d.support_bound is not None:
        upto, remainder = d.support_bound, 0.0
    else:
        upto = d.truncation_index() if budget is None else budget
        remainder = d.tail_bound(upto)
    weights = d.weights(upto, exact=False).terms
    n = np.arange(upto + 1, dtype=float)
    powers = r ** n
    # 1 + r + ... + r^{n-1}
    geometric_sums = np.concatenate(([0.0], np.cumsum(powers[:-1])))
    cosine_sum = math.fsum((weights * powers * np.cos(n * theta)).tolist())
    radial = (1 - r) * math.fsum((weights * geometric_sums).tolist())
    angular = theta * theta * math.fsum(
        (n * n * weights * powers * eval_G(n * theta)).tolist())
    gap = abs((1 - cosine_sum) - (radial + angular))
    tolerance = 2 * remainder + 1e-12
    report.add(
        CheckResult(
            name="1-sum q_n r^n cos(n theta)=radial+angular",
            passed=gap <= tolerance,
            worst=gap,
            tolerance=tolerance,
            location=f"r={r!r}, theta={theta!r}",
            detail=f"truncated at {upto}",
        )
    )
    return report


def check_fp_identity(renewal: RenewalSequence,
                      grid: Optional[PolarGrid] = None,
                      r_max: float = 0.9) -> Report:
    """Checks f_p(z) (1 - f_q(z)) = 1 on the points of the grid with
    r <= r_max, within the truncation bounds of both series."""
    grid = default_grid() if grid is None else grid
    grid = grid.select(grid.r <= r_max)
    report = Report(title="renewal generating function")
    if not len(grid):
        return report
    fp, fp_errors = fp_array(renewal, grid.r, grid.theta)
    fq, fq_errors = fq_array(renewal.distribution, grid.r, grid.theta)
    gap = np.abs(fp * (1 - fq) - 1)
    tolerance = (
        2 * fp_errors + np.abs(fp) * fq_errors
        + 1e-12 * (renewal.upto + 1)
    )
    worst, location = _worst(gap, grid)
    report.add(
        CheckResult(
            name="f_p(1-f_q)=1",
            passed=bool(np.all(gap <= tolerance)),
            worst=worst,
            tolerance=float(np.max(tolerance)),
            location=location,
            detail=f"{len(grid)} points, N={renewal.upto}",
        )
    )
    return report


def check_fQ_identity(d, grid: Optional[PolarGrid] = None,
                      budget: Optional[int] = None) -> Report:
    """Checks (1 - z) f_Q(z) = 1 - f_q(z) and f_Q(z) != 0 on the grid,
    unit circle included.

    Raises:
        InfiniteMean: if the mean of the law is infinite.
    """
    d = validate(d)
    grid = default_grid() if grid is None else grid
    fQ, fQ_errors = fQ_array(d, grid.r, grid.theta, budget)
    fq, fq_errors = fq_array(d, grid.r, grid.theta, budget)
    distance = one_minus_z(grid.r, grid.theta)
    gap = np.abs(distance * fQ - (1 - fq))
    tolerance = np.abs(distance) * fQ_errors + fq_errors + 1e-12
    report = Report(title="tail generating function")
    worst, location = _worst(gap, grid)
    report.add(
        CheckResult(
            name="(1-z)f_Q=1-f_q",
            passed=bool(np.all(gap <= tolerance)),
            worst=worst,
            tolerance=float(np.max(tolerance)),
            location=location,
            detail=f"{len(grid)} points",
        )
    )
    modulus = np.abs(fQ) - fQ_errors
    index = int(np.argmin(modulus))
    report.add(
        CheckResult(
            name="f_Q!=0",
            passed=bool(np.all(modulus > 0)),
            worst=float(modulus[index]),
            tolerance=0.0,
            location=(
                f"r={grid.r[index]:.17g}, theta={grid.theta[index]:.17g}"),
            detail="smallest modulus",
        )
    )
    return report


def check_G(samples: int = 1000, seed: int = 0,
            threshold: Optional[float] = None) -> Report:
    """Checks G(0) = 1/2, the evenness of G, 0 < G <= 1/2 and
    x^2 G(x) = 1 - cos x on sampled x in [-pi, pi], plus the continuity of
    G across the switch between its two branches."""
    if threshold is None:
        threshold = numerics.g_series_threshold
    rng = np.random.default_rng(seed)
    x = rng.uniform(-math.pi, math.pi, samples)
    values = eval_G(x, threshold)
    report = Report(title="G checks")
    report.add(
        CheckResult(
            name="G(0)=1/2",
            passed=eval_G(0.0, threshold) == 0.5,
            worst=abs(eval_G(0.0, threshold) - 0.5),
            tolerance=0.0,
        )
    )
    asymmetry = np.abs(values - eval_G(-x, threshold))
    report.add(
        CheckResult(
            name="G(-x)=G(x)",
            passed=bool(np.all(asymmetry == 0)),
            worst=float(np.max(asymmetry)),
            tolerance=0.0,
            detail=f"{samples} samples",
        )
    )
    report.add(
        CheckResult(
            name="0<G<=1/2",
            passed=bool(np.all(values > 0) and np.all(values <= 0.5)),
            worst=float(np.max(values)),
            tolerance=0.5,
            detail=f"{samples} samples",
        )
    )
    gap = np.abs(x * x * values - (1 - np.cos(x)))
    report.add(
        CheckResult(
            name="x^2 G(x)=1-cos x",
            passed=bool(np.all(gap <= 1e-14)),
            worst=float(np.max(gap)),
            tolerance=1e-14,
            detail=f"{samples} samples",
        )
    )
    around = threshold * np.array([1 - 1e-9, 1 + 1e-9])
    jump = abs(eval_G(around[0], threshold) - eval_G(around[1], threshold))
    report.add(
        CheckResult(
            name="G continuous at the branch switch",
            passed=jump <= 1e-12,
            worst=float(jump),
            tolerance=1e-12,
            location=f"x={threshold!r}",
        )
    )
    return report


@dataclass
class ContinuityRadius:
    """Outcome of the shrinking-grid search around z = 1.

    Attributes:
        delta (float): the radius found, None if the search failed.
        epsilon (float): the target bound on |H|.
        max_abs_H (list of float): the largest |H| found at each radius
            tried, by decreasing radius.
    """

    delta: Optional[float]
    epsilon: float
    max_abs_H: List[float]

    @property
    def found(self) -> bool:
        return self.delta is not None


def _diamond(delta: float, radial: int, angular: int) -> PolarGrid:
    """Points with (1 - r) + |theta| <= delta and r <= 1, minus z = 1."""
    gaps = np.linspace(0.0, delta, radial)
    fractions = np.linspace(-1.0, 1.0, angular)
    gap, fraction = np.meshgrid(gaps, fractions, indexing="ij")
    r = 1 - gap
    theta = fraction * (delta - gap)
    keep = (r > 0) & ~((r == 1) & (theta == 0))
    return PolarGrid(r[keep], theta[keep])


def find_continuity_radius(d, epsilon: float = 1e-2, max_halvings: int = 40,
                           radial: int = 17, angular: int = 33,
                           budget: Optional[int] = None) -> ContinuityRadius:
    """Searches delta = 2^-k, k = 1, 2, ..., such that |H(r, theta)| <=
    epsilon at every point of a grid of the region (1 - r) + |theta| <=
    delta.

    Raises:
        FiniteMean: if the mean of the law is finite, H then having a
            nonzero limit at z = 1.
    """
    d = validate(d)
    if d.has_finite_mean:
        raise FiniteMean(
            f"H does not vanish at z=1 for the finite-mean law {d!r}.")
    maxima = []
    for halvings in range(1, max_halvings + 1):
        delta = 2.0 ** -halvings
        grid = _diamond(delta, radial, angular)
        values, _ = H_array(d, grid.r, grid.theta, budget)
        maxima.append(float(np.max(np.abs(values))))
        logger.debug(f"max |H| over the radius {delta}: {maxima[-1]:.3g}")
        if maxima[-1] <= epsilon:
            logger.info(f"|H| <= {epsilon} within the radius {delta}")
            return ContinuityRadius(delta, epsilon, maxima)
    logger.warning(f"No radius found with |H| <= {epsilon}")
    return ContinuityRadius(None, epsilon, maxima)
