# Copyright 2020 BULL SAS All rights reserved
"""This module computes the renewal sequence p of an increment law q, defined
by the recurrence

    p_0 = 1,  p_n = sum_{i=1}^{n} q_i p_{n-i},

that is the probability that the walk started at 0 and increased by i with
probability q_i ever visits level n. It also provides:

- the exact check of the convolution identities satisfied by p, q and the
    tail sequence Q: p = I + p*q, p*(I-q) = I, (I-q)*1 = Q and p*Q = 1,
- the sandwich bracket [lo, hi] of lim p_n at a cutoff M, with
    hi = 1 / sum_{i<=M} Q_i and lo = (1 - sum_{i>M} Q_i) / sum_{i<=M} Q_i,
- windowed sup norms of the differences Delta^k[p],
- an adaptive estimation of the limit 1/mu, growing M and the horizon N
    together until the stop criteria are met.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np
from loguru import logger

from renewal_core.config import RuntimeConfig
from renewal_kit.distributions import IncrementDistribution, validate
from renewal_kit.exceptions import (
    BudgetExhausted,
    ExactModeRequired,
    InsufficientPrefix,
)
from renewal_kit.reports import CheckResult, Report
from renewal_kit.sequences import (
    Scalar,
    Sequence,
    compensated_dot,
    convolve,
    delta,
    format_scalar,
    identity_seq,
    ones_seq,
    prefix_sum,
)
from renewal_kit.stop_criteria import (
    BracketWidthCriterion,
    StopCriterion,
    WindowOscillationCriterion,
)

runtime_settings = RuntimeConfig()

EPS = float(np.finfo(float).eps)


def _summation_constant(block_size: int) -> int:
    return math.ceil(math.log2(max(block_size, 2))) + 2


@dataclass(frozen=True)
class RenewalSequence:
    """The prefix p_0, ..., p_N of the renewal sequence of a law.

    Attributes:
        distribution (IncrementDistribution): the increment law q.
        terms (Sequence): p_0, ..., p_N.
        error_bound (float): bound on the rounding error of each term, 0 in
            exact mode.
    """

    distribution: IncrementDistribution
    terms: Sequence
    error_bound: float = 0.0

    @property
    def upto(self) -> int:
        return self.terms.upto

    @property
    def exact(self) -> bool:
        return self.terms.exact

    def __getitem__(self, n: int) -> Scalar:
        return self.terms[n]

    def __len__(self) -> int:
        return len(self.terms)

    def delta(self, k: int = 1) -> Sequence:
        """Returns Delta^k[p] on [0, N]."""
        return delta(self.terms, k)

    def extend(self, upto: int) -> "RenewalSequence":
        """Continues the recurrence up to index upto, reusing the stored
        terms."""
        if upto <= self.upto:
            return self
        return _run_recurrence(
            self.distribution, self.terms.terms, upto, self.exact
        )

    def window_oscillation(self, start: Optional[int] = None,
                           end: Optional[int] = None) -> Scalar:
        """Returns max p_n - min p_n over [start, end], which defaults to the
        dyadic window [N/2, N]."""
        end = self.upto if end is None else end
        start = end // 2 if start is None else start
        if not 0 <= start <= end <= self.upto:
            raise InsufficientPrefix(
                f"Window [{start}, {end}] outside of [0, {self.upto}]."
            )
        window = self.terms.terms[start: end + 1]
        return max(window) - min(window)

    def check_bound(self) -> CheckResult:
        """Checks 0 <= p_n <= 1 termwise, up to the rounding budget in float
        mode."""
        values = self.terms.terms
        tolerance = self.error_bound
        below = [-value for value in values]
        above = [value - 1 for value in values]
        excess = [max(low, high) for low, high in zip(below, above)]
        worst_index = max(range(len(excess)), key=lambda n: excess[n])
        worst = max(excess[worst_index], 0)
        return CheckResult(
            name="0<=p_n<=1",
            passed=worst <= tolerance,
            worst=worst,
            tolerance=tolerance,
            location=f"n={worst_index}",
            detail=f"{len(values)} terms",
        )


def _run_recurrence(d: IncrementDistribution, initial, upto: int,
                    exact: bool,
                    block_size: Optional[int] = None) -> RenewalSequence:
    """Runs the recurrence from the given first terms up to upto."""
    if block_size is None:
        block_size = runtime_settings.summation_block_size
    width = upto if d.support_bound is None else min(d.support_bound, upto)
    weights = d.weights(max(width, 0), exact=exact).terms
    start = len(initial)
    if exact:
        terms = list(initial)
        nonzero = [(i, w) for i, w in enumerate(weights) if i and w]
        for n in range(start, upto + 1):
            total = Fraction(0)
            for i, w in nonzero:
                if i > n:
                    break
                total += w * terms[n - i]
            terms.append(total)
        return RenewalSequence(d, Sequence(terms, exact=True), 0.0)
    terms = np.empty(upto + 1)
    terms[:start] = np.asarray(initial, dtype=float)
    for n in range(start, upto + 1):
        span = min(n, width)
        terms[n] = compensated_dot(
            weights[1: span + 1], terms[n - span: n][::-1], block_size
        )
    error_bound = upto * _summation_constant(block_size) * EPS
    return RenewalSequence(d, Sequence(terms, exact=False), error_bound)


def compute_renewal(d, upto: int, exact: Optional[bool] = None,
                    block_size: Optional[int] = None) -> RenewalSequence:
    """Computes p_0, ..., p_upto by the renewal recurrence.

    In exact mode every term is an exact rational. In float mode each inner
    sum uses compensated summation; since p_n is a convex combination of its
    predecessors the rounding errors add up to at most
    upto * (ceil(log2(block_size)) + 2) * eps per term, which is reported as
    the error_bound of the result.

    Args:
        d (IncrementDistribution or spec): the increment law.
        upto (int): the horizon N.
        exact (bool): whether to compute with exact rationals. Defaults to
            exact mode for laws with rational weights.
        block_size (int): block length of the compensated dot products.

    Returns:
        RenewalSequence: the computed prefix.
    """
    d = validate(d)
    if upto < 0:
        raise ValueError("The horizon must be nonnegative.")
    if exact is None:
        exact = d.is_rational
    logger.debug(
        f"Renewal recurrence of {d!r} up to {upto} in "
        f"{'exact' if exact else 'float'} mode"
    )
    initial = [Fraction(1)] if exact else [1.0]
    return _run_recurrence(d, initial, upto, exact, block_size)


def check_identities(renewal: RenewalSequence) -> Report:
    """Checks bit-exactly the convolution identities of the renewal sequence
    on its whole prefix:

    - p = I + p*q,
    - p*(I-q) = I,
    - (I-q)*1 = Q,
    - (p*Q)_n = 1 for every n,

    plus the bound 0 <= p_n <= 1.

    Raises:
        ExactModeRequired: if the sequence was computed in float mode or the
            law has no rational weights.
    """
    d = renewal.distribution
    if not renewal.exact or not d.is_rational:
        raise ExactModeRequired(
            "The identity suite is checked bit-exactly and needs a renewal "
            "sequence computed with exact rationals."
        )
    upto = renewal.upto
    p = renewal.terms
    q = d.weights(upto, exact=True)
    tails = d.tails(upto, exact=True)
    identity = identity_seq(upto)
    complement = identity - q

    report = Report(title="renewal identities")
    pairs = [
        ("p=I+p*q", p, identity + convolve(p, q, upto)),
        ("p*(I-q)=I", convolve(p, complement, upto), identity),
        ("(I-q)*1=Q", convolve(complement, ones_seq(upto), upto), tails),
        ("p*Q=1", convolve(p, tails, upto), ones_seq(upto)),
    ]
    for name, left, right in pairs:
        report.add(_exact_comparison(name, left, right))
    report.add(renewal.check_bound())
    return report


def _exact_comparison(name: str, left: Sequence,
                      right: Sequence) -> CheckResult:
    differences = [abs(a - b) for a, b in zip(left.terms, right.terms)]
    mismatches = [n for n, value in enumerate(differences) if value]
    worst = max(differences)
    return CheckResult(
        name=name,
        passed=not mismatches,
        worst=worst,
        tolerance=0.0,
        location=f"n={mismatches[0]}" if mismatches else "",
        detail=f"{len(differences)} terms",
    )


def tail(d, n: int) -> Scalar:
    """Returns Q_n = sum_{i>n} q_i."""
    if n < 0:
        raise ValueError("Tails are indexed from 0.")
    return validate(d).tail(n)


def tail_sum(d, upto: int, exact: Optional[bool] = None) -> Scalar:
    """Returns sum_{i=0}^{upto} Q_i, which tends to the mean as upto grows."""
    if upto < 0:
        raise ValueError("upto must be nonnegative.")
    d = validate(d)
    if exact is None:
        exact = d.is_rational
    tails = d.tails(upto, exact=exact).terms
    if exact:
        return sum(tails, Fraction(0))
    return math.fsum(tails.tolist())


@dataclass(frozen=True)
class LimitBracket:
    """Two-sided bound lo <= lim p_n <= hi obtained at cutoff M.

    lo is only defined for laws with a finite mean, lo_valid records it.
    """

    cutoff: int
    window_start: int
    hi: Scalar
    lo: Optional[Scalar] = None
    hi_valid: bool = True
    lo_valid: bool = False

    @property
    def width(self) -> Scalar:
        """hi - lo, or hi when only the upper end is available."""
        return self.hi - self.lo if self.lo_valid else self.hi

    def midpoint(self) -> Scalar:
        lower = self.lo if self.lo_valid else 0 * self.hi
        return (lower + self.hi) / 2

    def to_record(self) -> dict:
        return {
            "M": self.cutoff,
            "window_start": self.window_start,
            "lo": format_scalar(self.lo) if self.lo_valid else "",
            "hi": format_scalar(self.hi),
            "lo_valid": self.lo_valid,
            "hi_valid": self.hi_valid,
        }


def _bracket(d: IncrementDistribution, cutoff: int, window_start: int,
             partial_sum: Scalar) -> LimitBracket:
    hi = 1 / partial_sum
    if d.has_finite_mean:
        remainder = d.mean.value - partial_sum
        lo = (1 - remainder) / partial_sum
        return LimitBracket(cutoff, window_start, hi, lo, True, True)
    return LimitBracket(cutoff, window_start, hi, None, True, False)


def limit_bracket(d, cutoff: int, window_start: Optional[int] = None,
                  exact: Optional[bool] = None) -> LimitBracket:
    """Computes the sandwich bracket of lim p_n at cutoff M.

    The tail beyond M is sum_{i>M} Q_i = mu - sum_{i<=M} Q_i, so the lower
    end is available when the mean is finite and may be negative for small
    M. For a finitely supported law and M at least its support bound, lo and
    hi both equal 1/mu.

    Args:
        d (IncrementDistribution or spec): the increment law.
        cutoff (int): the cutoff M.
        window_start (int): the horizon N from which p is compared to the
            bracket, 10 M by default.
        exact (bool): whether to compute with exact rationals.

    Returns:
        LimitBracket: the bracket at cutoff M.
    """
    if cutoff < 0:
        raise ValueError("The cutoff must be nonnegative.")
    d = validate(d)
    if window_start is None:
        window_start = 10 * cutoff
    return _bracket(d, cutoff, window_start, tail_sum(d, cutoff, exact))


def bracket_trace(d, cutoffs: Iterable[int],
                  exact: Optional[bool] = None) -> List[LimitBracket]:
    """Computes the brackets at several cutoffs with running tail sums.

    Returns:
        list of LimitBracket: one bracket per distinct cutoff, by increasing
            cutoff.
    """
    d = validate(d)
    cutoffs = sorted(set(int(cutoff) for cutoff in cutoffs))
    if not cutoffs:
        return []
    if cutoffs[0] < 0:
        raise ValueError("Cutoffs must be nonnegative.")
    if exact is None:
        exact = d.is_rational
    sums = prefix_sum(d.tails(cutoffs[-1], exact=exact))
    return [
        _bracket(d, cutoff, 10 * cutoff, sums[cutoff]) for cutoff in cutoffs
    ]


@dataclass(frozen=True)
class DecayReport:
    """Windowed sup norm of Delta^k[p]."""

    order: int
    window: Tuple[int, int]
    sup: Scalar
    argmax: int


def decay_report(renewal: RenewalSequence, k: int,
                 window: Tuple[int, int]) -> DecayReport:
    """Returns sup |Delta^k[p]_n| over n in the window [N1, N2].

    Raises:
        InsufficientPrefix: if N2 is beyond the computed prefix.
    """
    start, end = window
    if not 0 <= start <= end:
        raise ValueError(f"Invalid window [{start}, {end}].")
    if end > renewal.upto:
        raise InsufficientPrefix(
            f"Window ends at {end}, p is computed up to {renewal.upto}."
        )
    values = [abs(value) for value in renewal.delta(k).terms[start: end + 1]]
    position = max(range(len(values)), key=lambda n: values[n])
    return DecayReport(k, (start, end), values[position], start + position)


@dataclass
class LimitEstimate:
    """Result of the adaptive limit search.

    Attributes:
        estimate: the midpoint of the last bracket.
        bracket (LimitBracket): the last bracket.
        n_used (int): the horizon N reached.
        converged (bool): whether every stop criterion was met.
        window_oscillation: max p_n - min p_n over [N/2, N].
        trace (list of LimitBracket): every bracket computed.
        oscillations (list): the window oscillation at every bracket.
    """

    estimate: Scalar
    bracket: LimitBracket
    n_used: int
    converged: bool
    window_oscillation: Scalar
    trace: List[LimitBracket] = field(default_factory=list)
    oscillations: List[Scalar] = field(default_factory=list)


def estimate_limit(d, tol: float, budget: int,
                   exact: Optional[bool] = None,
                   stop_criteria: Optional[List[StopCriterion]] = None,
                   raise_on_budget: bool = True) -> LimitEstimate:
    """Estimates lim p_n = 1/mu by growing the cutoff M along 0, 1, 2, 4, ...
    with the horizon N = 10 M, until the bracket is narrower than tol (its
    upper end below tol for an infinite mean) and p oscillates less than tol
    over [N/2, N].

    Args:
        d (IncrementDistribution or spec): the increment law.
        tol (float): the target accuracy, positive.
        budget (int): the largest admissible horizon N.
        exact (bool): whether to compute with exact rationals. Defaults to
            exact mode for finitely supported rational laws only.
        stop_criteria (list of StopCriterion): overrides the two default
            criteria. The search stops once none of them asks to go on.
        raise_on_budget (bool): whether to raise BudgetExhausted or return
            the unconverged estimate when the budget is exhausted.

    Returns:
        LimitEstimate: the estimate with its bracket.

    Raises:
        BudgetExhausted: carrying the unconverged estimate as partial.
    """
    if tol <= 0:
        raise ValueError("The tolerance must be positive.")
    if budget < 0:
        raise ValueError("The budget must be nonnegative.")
    d = validate(d)
    if exact is None:
        exact = d.is_rational and d.support_bound is not None
    if stop_criteria is None:
        stop_criteria = [
            BracketWidthCriterion(tol),
            WindowOscillationCriterion(tol),
        ]
    renewal = compute_renewal(d, 0, exact=exact)
    history = {"brackets": [], "renewal": renewal}
    oscillations = []
    cutoff = 0
    converged = False
    while 10 * cutoff <= budget:
        horizon = 10 * cutoff
        renewal = renewal.extend(horizon)
        history["renewal"] = renewal
        history["brackets"].append(
            limit_bracket(d, cutoff, horizon, exact=exact))
        oscillations.append(renewal.window_oscillation())
        go_on = [criterion.stop_rule(history) for criterion in stop_criteria]
        if not any(go_on):
            converged = True
            break
        cutoff = 1 if cutoff == 0 else 2 * cutoff
    bracket = history["brackets"][-1]
    result = LimitEstimate(
        estimate=bracket.midpoint(),
        bracket=bracket,
        n_used=renewal.upto,
        converged=converged,
        window_oscillation=oscillations[-1],
        trace=list(history["brackets"]),
        oscillations=oscillations,
    )
    if converged:
        logger.info(
            f"Limit of p estimated at {format_scalar(result.estimate)} with "
            f"M={bracket.cutoff}, N={renewal.upto}"
        )
        return result
    message = (
        f"No convergence to {tol} within a horizon of {budget}: last bracket "
        f"width {format_scalar(bracket.width)}, oscillation "
        f"{format_scalar(result.window_oscillation)}"
    )
    if raise_on_budget:
        raise BudgetExhausted(message, partial=result)
    logger.warning(message)
    return result
