# Copyright 2020 BULL SAS All rights reserved
"""Pass/fail records shared by every verification routine of the library.

A CheckResult describes a single identity or inequality check, a Report
gathers the checks run on a given law.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from loguru import logger

from renewal_kit.sequences import format_scalar


@dataclass
class CheckResult:
    """Outcome of one check.

    Attributes:
        name (str): the identity or inequality checked.
        passed (bool): whether it holds.
        worst (float or Fraction): the largest violation (or discrepancy)
            observed, 0 for bit-exact successes.
        tolerance (float): the tolerance the worst value was compared to.
        location (str): where the worst value was observed.
        detail (str): free text, such as the number of points checked.
    """

    name: str
    passed: bool
    worst: object = 0
    tolerance: Optional[float] = None
    location: str = ""
    detail: str = ""

    def to_record(self) -> Dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "worst": format_scalar(self.worst),
            "tolerance": (
                "" if self.tolerance is None
                else format_scalar(self.tolerance)
            ),
            "location": self.location,
            "detail": self.detail,
        }


@dataclass
class Report:
    """A named list of checks."""

    title: str
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, check: CheckResult) -> CheckResult:
        if not check.passed:
            logger.warning(
                f"{self.title}: check {check.name} failed, worst value "
                f"{format_scalar(check.worst)} at {check.location}"
            )
        self.checks.append(check)
        return check

    def extend(self, other: "Report") -> "Report":
        for check in other.checks:
            self.checks.append(check)
        return self

    def __getitem__(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_records(self) -> List[Dict]:
        return [
            {"report": self.title, **check.to_record()}
            for check in self.checks
        ]
