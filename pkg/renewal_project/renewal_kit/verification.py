# Copyright 2020 BULL SAS All rights reserved
"""This module gathers every check of the library into a single suite run on
one increment law:

- the convolution identities of the renewal sequence, bit-exactly for
    rational laws, and the bound 0 <= p_n <= 1,
- the monotonicity of the sandwich brackets and their consistency with 1/mu,
- the strict cosine bound and the disk ratio bound on the default grid,
- the cosine decompositions at a few points,
- the identities f_p (1 - f_q) = 1 and, for a finite mean,
    (1 - z) f_Q = 1 - f_q with f_Q != 0,
- the properties of G and, for an infinite mean, the vanishing of H at 1,
- the agreement of the quadratures with the recurrence.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from loguru import logger

from renewal_kit.distributions import IncrementDistribution, validate
from renewal_kit.fourier import compare_quadrature
from renewal_kit.generating_functions import (
    PolarPoint,
    check_fp_identity,
    check_fQ_identity,
    check_G,
    check_H_bound,
    check_strict_cos_bound,
    decomposition_check,
    find_continuity_radius,
)
from renewal_kit.renewal import (
    bracket_trace,
    check_identities,
    compute_renewal,
)
from renewal_kit.reports import CheckResult, Report

# Points where both cosine decompositions are checked
DECOMPOSITION_POINTS = [
    PolarPoint(1.0, math.pi),
    PolarPoint(0.5, 0.0),
    PolarPoint(0.9, 1.0),
    PolarPoint(0.99, -0.1),
    PolarPoint(1.0, 1e-3),
]


@dataclass
class SuiteReport:
    """Reports of every check run on a law."""

    distribution: IncrementDistribution
    reports: List[Report] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    @property
    def failures(self) -> List[CheckResult]:
        return [
            check for report in self.reports for check in report.failures
        ]

    def to_records(self) -> List[dict]:
        return [
            record for report in self.reports
            for record in report.to_records()
        ]


def check_brackets(d, upto: int) -> Report:
    """Checks that hi(M) is nonincreasing, lo(M) nondecreasing and, for a
    finite mean, lo(M) <= 1/mu <= hi(M) for M = 0..upto."""
    d = validate(d)
    brackets = bracket_trace(d, range(upto + 1))
    report = Report(title="sandwich brackets")
    highs = [bracket.hi for bracket in brackets]
    rises = [
        m for m in range(1, len(highs)) if highs[m] > highs[m - 1]
    ]
    report.add(
        CheckResult(
            name="hi(M) nonincreasing",
            passed=not rises,
            location=f"M={rises[0]}" if rises else "",
            detail=f"M=0..{upto}",
        )
    )
    if d.has_finite_mean:
        lows = [bracket.lo for bracket in brackets]
        drops = [m for m in range(1, len(lows)) if lows[m] < lows[m - 1]]
        report.add(
            CheckResult(
                name="lo(M) nondecreasing",
                passed=not drops,
                location=f"M={drops[0]}" if drops else "",
                detail=f"M=0..{upto}",
            )
        )
        limit = d.mean.reciprocal()
        outside = [
            bracket.cutoff for bracket in brackets
            if not bracket.lo <= limit <= bracket.hi
        ]
        report.add(
            CheckResult(
                name="lo<=1/mu<=hi",
                passed=not outside,
                location=f"M={outside[0]}" if outside else "",
                detail=f"M=0..{upto}",
            )
        )
    return report


def check_quadrature(d, m_max: int = 20, panels: Optional[int] = None,
                     renewal=None, tolerance: float = 1e-8,
                     circle_tolerance: float = 1e-4) -> Report:
    """Compares the Fourier integrals with the recurrence for l = 0, 1, 2
    at r = 0.5 and r = 0.9, and the circle integral of the law."""
    d = validate(d)
    report = Report(title="quadrature against recurrence")
    rows = compare_quadrature(
        d, [0, 1, 2], m_max, [0.5, 0.9], panels=panels, renewal=renewal)
    worst = max(rows, key=lambda row: row.abs_diff)
    report.add(
        CheckResult(
            name="disk integrals / 2 pi r^m = Delta^l[p]_m",
            passed=worst.abs_diff <= tolerance,
            worst=worst.abs_diff,
            tolerance=tolerance,
            location=f"l={worst.l}, m={worst.m}, r={worst.r}",
            detail=f"{len(rows)} coefficients",
        )
    )
    order = 1 if d.has_finite_mean else 2
    rows = compare_quadrature(
        d, [order], m_max, [1.0], panels=panels, renewal=renewal)
    excess = [
        row.abs_diff - max(circle_tolerance, 10 * row.est_error)
        for row in rows
    ]
    index = int(np.argmax(excess))
    report.add(
        CheckResult(
            name=f"circle integrals / 2 pi = Delta^{order}[p]_m",
            passed=max(excess) <= 0,
            worst=rows[index].abs_diff,
            tolerance=circle_tolerance,
            location=f"m={rows[index].m}",
            detail=f"{len(rows)} coefficients",
        )
    )
    return report


def run_verification_suite(d, upto: int = 200, m_max: int = 20,
                           panels: Optional[int] = None,
                           epsilon: float = 1e-2) -> SuiteReport:
    """Runs every check of the library on one law.

    Args:
        d (IncrementDistribution or spec): the increment law.
        upto (int): the horizon of the renewal sequence and the largest
            cutoff of the brackets.
        m_max (int): the largest Fourier index compared.
        panels (int): the number of trapezoid panels.
        epsilon (float): the bound on |H| sought around z = 1 for an
            infinite mean.

    Returns:
        SuiteReport: the reports of every check.
    """
    d = validate(d)
    suite = SuiteReport(distribution=d)
    logger.info(f"Running the verification suite on {d!r}")

    renewal = compute_renewal(d, upto)
    if renewal.exact:
        suite.reports.append(check_identities(renewal))
    else:
        bound = Report(title="renewal bound")
        bound.add(renewal.check_bound())
        suite.reports.append(bound)
    suite.reports.append(check_brackets(d, upto))
    suite.reports.append(check_strict_cos_bound(d))
    suite.reports.append(check_H_bound(d))
    decompositions = Report(title="cosine decomposition")
    for point in DECOMPOSITION_POINTS:
        decompositions.extend(decomposition_check(d, point))
    suite.reports.append(decompositions)
    suite.reports.append(check_fp_identity(renewal))
    if d.has_finite_mean:
        suite.reports.append(check_fQ_identity(d))
    suite.reports.append(check_G())
    if not d.has_finite_mean:
        radius = find_continuity_radius(d, epsilon)
        continuity = Report(title="H continuity at 1")
        continuity.add(
            CheckResult(
                name=f"|H|<={epsilon} near z=1",
                passed=radius.found,
                worst=radius.max_abs_H[-1],
                tolerance=epsilon,
                detail=f"delta={radius.delta}",
            )
        )
        suite.reports.append(continuity)
    suite.reports.append(
        check_quadrature(d, min(m_max, upto), panels, renewal))
    if suite.passed:
        logger.info("Every check passed")
    else:
        logger.warning(f"{len(suite.failures)} checks failed")
    return suite
