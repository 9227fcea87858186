# Copyright 2020 BULL SAS All rights reserved
"""This module contains different classes to implement a stop criterion for
the limit estimation. These criteria take as input the history of the search
(the brackets computed so far and the current renewal sequence) and output a
boolean indicating if the cutoff M and the horizon N should keep growing.

The implemented criteria are:
- Bracket based: the search continues while the last bracket is wider than
    a threshold t (finite mean), or while its upper end is above t (infinite
    mean, the lower end being 0).
- Oscillation based: the search continues while max p_n - min p_n over the
    dyadic window [N/2, N] is above a threshold t.
"""

from loguru import logger

from renewal_kit.sequences import format_scalar


class StopCriterion:
    """
    Abstract parent class for stop rules, that all implementations of stop
    criterion should inherit from.
    """

    def stop_rule(self, history):
        """Given the search history, returns False if the search should stop,
        and else should evaluate to True.

        Args:
            history (dict): A dictionary with the keys "brackets" (list of
                LimitBracket, by increasing cutoff) and "renewal" (the
                current RenewalSequence).

        Returns:
            bool: whether or not the search should go on.
        """
        raise NotImplementedError


class BracketWidthCriterion(StopCriterion):
    """Continues while the sandwich bracket is not tight enough."""

    def __init__(self, tolerance, *args, **kwargs):
        """
        Args:
            tolerance (float): The largest admissible width hi - lo, or the
                largest admissible hi when the lower end is not available.
        """
        self.tolerance = tolerance

    def stop_rule(self, history):
        brackets = history["brackets"]
        if not brackets:
            return True
        width = brackets[-1].width
        logger.debug(
            f"Bracket width at M={brackets[-1].cutoff}: "
            f"{format_scalar(width)}"
        )
        return width > self.tolerance


class WindowOscillationCriterion(StopCriterion):
    """Continues while p oscillates more than a threshold over the window
    [N/2, N]."""

    def __init__(self, tolerance, *args, **kwargs):
        """
        Args:
            tolerance (float): The largest admissible oscillation.
        """
        self.tolerance = tolerance

    def stop_rule(self, history):
        renewal = history.get("renewal")
        if renewal is None:
            return True
        oscillation = renewal.window_oscillation()
        logger.debug(
            f"Oscillation over [{renewal.upto // 2}, {renewal.upto}]: "
            f"{format_scalar(oscillation)}"
        )
        return oscillation > self.tolerance
