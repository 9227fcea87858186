# Copyright 2020 BULL SAS All rights reserved
"""Random streams of the simulation.

Trials are simulated by blocks, and the block of index b draws from its own
Philox stream, seeded by the sequence (seed, b). The draws of a block thus
only depend on the seed and the block index, and not on the thread that
simulates it nor on the order in which blocks are scheduled.
"""

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Returns the generator of the block of index block.

    Args:
        seed (int): the 64-bit seed of the simulation.
        block (int): the index of the block of trials.
    """
    sequence = np.random.SeedSequence(seed & _MASK64, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(sequence))


class StepSampler:
    """Inverse-CDF sampler of the steps of the walk, over a table of the
    steps 1, ..., n_max plus one overflow entry.

    The overflow entry, of probability Q_{n_max}, stands for every step
    larger than n_max: such a step ends the walk beyond the last observed
    level, so its exact size is irrelevant and no truncation bias arises.
    """

    def __init__(self, weights: np.ndarray, overflow: float):
        """
        Args:
            weights (numpy array): q_1, ..., q_{n_max}.
            overflow (float): Q_{n_max}.
        """
        probabilities = np.append(np.asarray(weights, dtype=float), overflow)
        self.cumulative = np.cumsum(probabilities)
        # u is drawn in [0, 1), the last entry must not fall below it
        self.cumulative[-1] = 1.0
        self.overflow_step = probabilities.size

    def sample(self, generator: np.random.Generator, size: int) -> np.ndarray:
        """Draws size steps, overflow steps being reported as n_max + 1."""
        uniforms = generator.random(size)
        return np.searchsorted(self.cumulative, uniforms, side="right") + 1
