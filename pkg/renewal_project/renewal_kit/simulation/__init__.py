# Copyright 2020 BULL SAS All rights reserved
"""Monte Carlo estimation of the renewal sequence, as the probability that a
walk started at 0 and increased by i with probability q_i visits level n."""

from renewal_kit.simulation.simulator import (
    HitEstimate,
    SimConfig,
    SimulationReport,
    compare_with_recurrence,
    simulate,
)

__all__ = [
    "HitEstimate",
    "SimConfig",
    "SimulationReport",
    "compare_with_recurrence",
    "simulate",
]
