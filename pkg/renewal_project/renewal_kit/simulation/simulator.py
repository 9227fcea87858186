# Copyright 2020 BULL SAS All rights reserved
"""This module simulates the renewal process: x starts at 0 and is increased
by i with probability q_i, and p_n is the probability that x = n occurs.

Each trial walks x from 0 past n_max and marks every level it visits. Since
q_0 = 0 a level is visited at most once per trial, so that the hit count of
every level is at most the number of trials. The trials are split in blocks
simulated concurrently, each block drawing from its own random stream, and
the integer hit counts of the blocks are summed, which makes the estimate
independent of the schedule.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from loguru import logger
from scipy.stats import norm

from renewal_core.config import NumericsConfig, RuntimeConfig
from renewal_kit.distributions import IncrementDistribution, validate
from renewal_kit.exceptions import InsufficientPrefix, MismatchedDistribution
from renewal_kit.renewal import RenewalSequence
from renewal_kit.simulation.rngs import StepSampler, block_generator

runtime_settings = RuntimeConfig()
numerics = NumericsConfig()


@dataclass
class SimConfig:
    """Parameters of a simulation, which fully determine its output.

    Attributes:
        dist (IncrementDistribution): the increment law.
        n_max (int): the last observed level.
        trials (int): the number of walks, at least 1.
        seed (int): a 64-bit seed.
        block_size (int): the number of walks per random stream.
    """

    dist: IncrementDistribution
    n_max: int
    trials: int
    seed: int = 0
    block_size: Optional[int] = None

    def __post_init__(self):
        self.dist = validate(self.dist)
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative.")
        if self.trials < 1:
            raise ValueError("At least one trial is needed.")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("The seed must be a 64-bit unsigned integer.")
        if self.block_size is None:
            self.block_size = runtime_settings.simulation_block_size
        if self.block_size < 1:
            raise ValueError("The block size must be at least 1.")

    @property
    def blocks(self) -> int:
        return math.ceil(self.trials / self.block_size)

    def block_trials(self, block: int) -> int:
        return min(self.block_size, self.trials - block * self.block_size)


@dataclass
class HitEstimate:
    """Hit counts of the levels 0..n_max and the derived estimates.

    Attributes:
        config (SimConfig): the simulation parameters.
        hits (numpy array): hits_n, the number of walks visiting n.
        confidence_multiplier (float): the multiplier z of the confidence
            half-widths.
        truncation_bias (float): bound on the bias due to the sampling of
            the steps, 0 with the overflow table.
    """

    config: SimConfig
    hits: np.ndarray
    confidence_multiplier: float = field(
        default_factory=lambda: numerics.confidence_multiplier)
    truncation_bias: float = 0.0

    @property
    def trials(self) -> int:
        return self.config.trials

    @property
    def estimates(self) -> np.ndarray:
        """p_hat_n = hits_n / trials."""
        return self.hits / self.trials

    @property
    def standard_errors(self) -> np.ndarray:
        estimates = self.estimates
        return np.sqrt(estimates * (1 - estimates) / self.trials)

    @property
    def half_widths(self) -> np.ndarray:
        """Normal approximation half-widths z sqrt(p_hat (1 - p_hat) / T)."""
        return self.confidence_multiplier * self.standard_errors

    @property
    def confidence(self) -> float:
        """Two-sided level of the confidence intervals."""
        return float(1 - 2 * norm.sf(self.confidence_multiplier))

    def to_records(self):
        return [
            {
                "n": n,
                "hits": int(self.hits[n]),
                "p_hat": float(estimate),
                "half_width": float(half_width),
            }
            for n, (estimate, half_width) in enumerate(
                zip(self.estimates, self.half_widths))
        ]


def _simulate_block(sampler: StepSampler, config: SimConfig,
                    block: int) -> np.ndarray:
    """Walks the trials of one block and returns their hit counts."""
    generator = block_generator(config.seed, block)
    trials = config.block_trials(block)
    hits = np.zeros(config.n_max + 1, dtype=np.int64)
    hits[0] = trials
    positions = np.zeros(trials, dtype=np.int64)
    while positions.size:
        positions = positions + sampler.sample(generator, positions.size)
        positions = positions[positions <= config.n_max]
        hits += np.bincount(positions, minlength=config.n_max + 1)
    return hits


def simulate(config: SimConfig,
             confidence_multiplier: Optional[float] = None,
             threads: Optional[int] = None) -> HitEstimate:
    """Estimates p_0, ..., p_{n_max} as the frequencies of visits of every
    level over config.trials walks.

    The steps are drawn by inversion of the cumulative table of q_1, ...,
    q_{n_max} completed by Q_{n_max}, which is exact for every law.

    Args:
        config (SimConfig): the simulation parameters.
        confidence_multiplier (float): z for the confidence half-widths, 4
            by default.
        threads (int): the number of worker threads, RENEWAL_KIT_THREADS by
            default (0 meaning one per CPU).

    Returns:
        HitEstimate: the hit counts and estimates.
    """
    if confidence_multiplier is None:
        confidence_multiplier = numerics.confidence_multiplier
    if threads is None:
        threads = runtime_settings.worker_threads
    d = config.dist
    weights = d.weights(config.n_max, exact=False).terms[1:]
    overflow = float(d.tail(config.n_max))
    sampler = StepSampler(weights, overflow)
    logger.debug(
        f"Simulating {config.trials} walks of {d!r} up to {config.n_max} in "
        f"{config.blocks} blocks on {threads} threads"
    )
    hits = np.zeros(config.n_max + 1, dtype=np.int64)
    with ThreadPoolExecutor(max_workers=max(threads, 1)) as executor:
        for block_hits in executor.map(
            lambda block: _simulate_block(sampler, config, block),
            range(config.blocks),
        ):
            hits += block_hits
    return HitEstimate(
        config=config,
        hits=hits,
        confidence_multiplier=confidence_multiplier,
    )


@dataclass
class SimulationReport:
    """Level by level comparison of a simulation with the recurrence.

    Attributes:
        levels (numpy array): 0..n_max.
        expected (numpy array): p_n from the recurrence.
        estimates (numpy array): p_hat_n.
        deviations (numpy array): |p_hat_n - p_n|.
        thresholds (numpy array): z sigma_hat_n.
        passed_levels (numpy array of bool): deviations <= thresholds.
        confidence_multiplier (float): z.
        expected_failures (float): the number of levels expected to fail by
            chance, 2 (n_max + 1) P(N(0, 1) > z).
        insufficient_trials (bool): whether there are too few trials for the
            normal approximation to mean anything.
        min_pass_fraction (float): the fraction of levels that must pass.
    """

    levels: np.ndarray
    expected: np.ndarray
    estimates: np.ndarray
    deviations: np.ndarray
    thresholds: np.ndarray
    passed_levels: np.ndarray
    confidence_multiplier: float
    expected_failures: float
    insufficient_trials: bool
    min_pass_fraction: float = 0.999

    @property
    def failures(self) -> int:
        return int(np.count_nonzero(~self.passed_levels))

    @property
    def pass_fraction(self) -> float:
        return float(np.mean(self.passed_levels))

    @property
    def passed(self) -> bool:
        return (not self.insufficient_trials
                and self.pass_fraction >= self.min_pass_fraction)

    def to_records(self):
        return [
            {
                "n": int(n),
                "p_n": float(p),
                "p_hat": float(p_hat),
                "abs_diff": float(deviation),
                "threshold": float(threshold),
                "passed": bool(passed),
            }
            for n, p, p_hat, deviation, threshold, passed in zip(
                self.levels, self.expected, self.estimates, self.deviations,
                self.thresholds, self.passed_levels)
        ]


def compare_with_recurrence(estimate: HitEstimate, renewal: RenewalSequence,
                            z: Optional[float] = None,
                            min_trials: Optional[int] = None,
                            min_pass_fraction: float = 0.999
                            ) -> SimulationReport:
    """Checks |p_hat_n - p_n| <= z sigma_hat_n at every level.

    Args:
        estimate (HitEstimate): the simulation.
        renewal (RenewalSequence): p computed by the recurrence, at least up
            to n_max, for the same law.
        z (float): the multiplier, the one of the estimate by default.
        min_trials (int): below this number of trials the report is flagged
            as insufficient, 30 by default.
        min_pass_fraction (float): the fraction of levels that must pass.

    Raises:
        MismatchedDistribution: if the laws differ.
        InsufficientPrefix: if p is not computed up to n_max.
    """
    config = estimate.config
    if config.dist != renewal.distribution:
        raise MismatchedDistribution(
            f"Simulated law {config.dist!r} differs from the law "
            f"{renewal.distribution!r} of the renewal sequence.")
    if renewal.upto < config.n_max:
        raise InsufficientPrefix(
            f"p is computed up to {renewal.upto}, the simulation observes "
            f"levels up to {config.n_max}.")
    if z is None:
        z = estimate.confidence_multiplier
    if min_trials is None:
        min_trials = numerics.min_trials
    levels = np.arange(config.n_max + 1)
    expected = renewal.terms.as_float().terms[: config.n_max + 1]
    estimates = estimate.estimates
    deviations = np.abs(estimates - expected)
    thresholds = z * estimate.standard_errors
    insufficient = config.trials < min_trials
    if insufficient:
        logger.warning(
            f"{config.trials} trials are too few for normal confidence "
            "intervals")
    report = SimulationReport(
        levels=levels,
        expected=expected,
        estimates=estimates,
        deviations=deviations,
        thresholds=thresholds,
        passed_levels=deviations <= thresholds,
        confidence_multiplier=float(z),
        expected_failures=float(2 * levels.size * norm.sf(z)),
        insufficient_trials=insufficient,
        min_pass_fraction=min_pass_fraction,
    )
    logger.info(
        f"{report.failures} of {levels.size} levels outside of "
        f"{z} sigma, {report.expected_failures:.3g} expected by chance")
    return report
