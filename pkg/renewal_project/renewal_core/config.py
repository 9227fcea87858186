# Copyright 2020 BULL SAS All rights reserved
"""Module containing the configuration data for the renewal-kit project.
Configuration deals with:

- The runtime behavior (parallelism, block sizes)
- The numerical defaults (tolerances, truncation budgets, grids)

Every value can be set using keyword arguments at instantiation or through
environment variables prefixed with RENEWAL_KIT_.
"""
import os
from typing import List

from pydantic import BaseSettings, validator


class RenewalKitConfig(BaseSettings):
    """Parent class for configuration classes."""

    class Config:
        case_sensitive = False
        env_prefix = "RENEWAL_KIT_"


class RuntimeConfig(RenewalKitConfig):
    """This class sets values describing how computations are scheduled."""

    # Cap on the worker threads, 0 meaning one per available CPU
    threads: int = 0
    # Number of trials sharing a single random stream
    simulation_block_size: int = 65536
    # Block length of the pairwise partial sums in compensated dot products
    summation_block_size: int = 1024

    @validator("threads")
    def check_threads(cls, value):
        """Checks that the number of threads is not negative."""
        if value < 0:
            raise ValueError("The number of threads can't be negative.")
        return value

    @validator("simulation_block_size", "summation_block_size")
    def check_block_size(cls, value):
        """Checks that block sizes are positive."""
        if value < 1:
            raise ValueError("Block sizes must be positive.")
        return value

    @property
    def worker_threads(self) -> int:
        """Returns the resolved number of worker threads."""
        if self.threads:
            return self.threads
        return os.cpu_count() or 1


class NumericsConfig(RenewalKitConfig):
    """This class sets the default tolerances and budgets of the numerical
    routines."""

    # Largest deviation of float weights from unit mass before rejection
    normalization_tolerance: float = 1e-12
    # Target tail mass when choosing a series truncation
    truncation_tolerance: float = 1e-10
    # Hard cap on the number of terms of a truncated series
    max_series_terms: int = 2 ** 20
    # Radii and number of angles of the default evaluation grid
    grid_radii: List[float] = [0.5, 0.9, 0.99, 1.0]
    grid_angles: int = 512
    # Below this magnitude G is evaluated through its Taylor series
    g_series_threshold: float = 1e-4
    # Default number of trapezoid panels
    default_panels: int = 4096
    # Default sigma multiplier of the Monte Carlo confidence bands
    confidence_multiplier: float = 4.0
    # Below this number of trials the confidence bands are flagged
    min_trials: int = 30
