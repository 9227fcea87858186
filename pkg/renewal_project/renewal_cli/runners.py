# Copyright 2020 BULL SAS All rights reserved
"""Execution of the subcommands of the command line application.

Each runner takes the validated increment law and the parameters of its
subcommand, and returns a RunResult holding:

- the table written in the output, with a fixed column schema,
- a dictionary of results added to the JSON output,
- the exit status: 0 on success, 2 when a check failed and 3 when an
    adaptive search exhausted its budget.

Column schemas:

- compute: n, p_n, delta1, delta2
- limit: M, lo, hi, window_osc
- verify: report, check, passed, worst, tolerance, location, detail
- quadrature: l, m, r, recurrence_value, integral_value, abs_diff, est_error
- simulate: n, hits, p_hat, half_width, p_n, abs_diff, threshold, passed
"""
from dataclasses import dataclass, field
from typing import Dict

import pandas as pd
from loguru import logger

from renewal_core.models.run_spec import (
    ComputeParameters,
    LimitParameters,
    QuadratureParameters,
    SimulateParameters,
    Subcommand,
    VerifyParameters,
)
from renewal_kit.distributions import IncrementDistribution
from renewal_kit.fourier import compare_quadrature
from renewal_kit.renewal import compute_renewal, estimate_limit
from renewal_kit.sequences import format_scalar
from renewal_kit.simulation import SimConfig, compare_with_recurrence, simulate
from renewal_kit.verification import run_verification_suite

SUCCESS = 0
VALIDATION_ERROR = 1
CHECK_FAILURE = 2
BUDGET_EXHAUSTED = 3


@dataclass
class RunResult:
    """Table, results and exit status of a subcommand."""

    table: pd.DataFrame
    results: Dict = field(default_factory=dict)
    status: int = SUCCESS


def _cell(value):
    """Rationals are written as "num/den" strings, floats are kept as
    numbers."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return value
    return format_scalar(value)


def run_compute(d: IncrementDistribution,
                parameters: ComputeParameters) -> RunResult:
    """Tabulates p_n, Delta[p]_n and Delta^2[p]_n for n = 0..N."""
    renewal = compute_renewal(
        d, parameters.n, exact=parameters.arithmetic.exact_flag)
    first, second = renewal.delta(1), renewal.delta(2)
    table = pd.DataFrame(
        {
            "n": range(parameters.n + 1),
            "p_n": [_cell(value) for value in renewal.terms],
            "delta1": [_cell(value) for value in first],
            "delta2": [_cell(value) for value in second],
        }
    )
    return RunResult(
        table=table,
        results={
            "exact": renewal.exact,
            "error_bound": renewal.error_bound,
            "mean": str(d.mean),
        },
    )


def run_limit(d: IncrementDistribution,
              parameters: LimitParameters) -> RunResult:
    """Traces the brackets of the limit search and its estimate."""
    estimate = estimate_limit(
        d,
        parameters.tol,
        parameters.budget,
        exact=parameters.arithmetic.exact_flag,
        raise_on_budget=False,
    )
    table = pd.DataFrame(
        {
            "M": [bracket.cutoff for bracket in estimate.trace],
            "lo": [
                _cell(bracket.lo) if bracket.lo_valid else ""
                for bracket in estimate.trace
            ],
            "hi": [_cell(bracket.hi) for bracket in estimate.trace],
            "window_osc": [_cell(value) for value in estimate.oscillations],
        }
    )
    bracket = estimate.bracket
    results = {
        "estimate": format_scalar(estimate.estimate),
        "lo": format_scalar(bracket.lo) if bracket.lo_valid else None,
        "hi": format_scalar(bracket.hi),
        "lo_valid": bracket.lo_valid,
        "hi_valid": bracket.hi_valid,
        "M": bracket.cutoff,
        "n_used": estimate.n_used,
        "converged": estimate.converged,
        "window_oscillation": format_scalar(estimate.window_oscillation),
    }
    status = SUCCESS if estimate.converged else BUDGET_EXHAUSTED
    return RunResult(table=table, results=results, status=status)


def run_verify(d: IncrementDistribution,
               parameters: VerifyParameters) -> RunResult:
    """Runs the full verification suite."""
    suite = run_verification_suite(
        d,
        upto=parameters.n,
        m_max=parameters.m_max,
        panels=parameters.panels,
        epsilon=parameters.epsilon,
    )
    table = pd.DataFrame(suite.to_records())
    results = {
        "passed": suite.passed,
        "failures": [check.name for check in suite.failures],
    }
    status = SUCCESS if suite.passed else CHECK_FAILURE
    return RunResult(table=table, results=results, status=status)


def run_quadrature(d: IncrementDistribution,
                   parameters: QuadratureParameters) -> RunResult:
    """Compares the Fourier integrals with the recurrence."""
    rows = compare_quadrature(
        d,
        parameters.l,
        parameters.m_max,
        parameters.r,
        panels=parameters.panels,
        precision=parameters.precision,
    )
    table = pd.DataFrame([row.to_record() for row in rows])
    failed = [
        row for row in rows
        if row.abs_diff > max(parameters.tolerance, 10 * row.est_error)
    ]
    if failed:
        logger.warning(
            f"{len(failed)} of {len(rows)} coefficients off by more than "
            f"{parameters.tolerance}")
    results = {"rows": len(rows), "failed": len(failed)}
    status = CHECK_FAILURE if failed else SUCCESS
    return RunResult(table=table, results=results, status=status)


def run_simulate(d: IncrementDistribution,
                 parameters: SimulateParameters) -> RunResult:
    """Simulates the walks and compares the frequencies with the
    recurrence."""
    config = SimConfig(
        dist=d,
        n_max=parameters.n_max,
        trials=parameters.trials,
        seed=parameters.seed,
        block_size=parameters.block_size,
    )
    estimate = simulate(config, confidence_multiplier=parameters.z)
    renewal = compute_renewal(d, parameters.n_max)
    report = compare_with_recurrence(estimate, renewal, parameters.z)
    records = report.to_records()
    for record, hit_record in zip(records, estimate.to_records()):
        record["hits"] = hit_record["hits"]
        record["half_width"] = hit_record["half_width"]
    table = pd.DataFrame(records)[
        ["n", "hits", "p_hat", "half_width", "p_n", "abs_diff", "threshold",
         "passed"]
    ]
    results = {
        "trials": parameters.trials,
        "failures": report.failures,
        "pass_fraction": report.pass_fraction,
        "expected_failures": report.expected_failures,
        "confidence": estimate.confidence,
        "insufficient_trials": report.insufficient_trials,
        "truncation_bias": estimate.truncation_bias,
    }
    status = SUCCESS if report.passed else CHECK_FAILURE
    return RunResult(table=table, results=results, status=status)


__runners__ = {
    Subcommand.compute: run_compute,
    Subcommand.limit: run_limit,
    Subcommand.verify: run_verify,
    Subcommand.quadrature: run_quadrature,
    Subcommand.simulate: run_simulate,
}
