# Copyright 2020 BULL SAS All rights reserved
"""Pydantic models describing a run of the command line application.

A RunSpec holds the subcommand, the distribution specification, the fully
resolved parameters of the subcommand and the output settings. It is echoed
in every output, so that the run can be replayed identically.
"""
import json
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, root_validator, validator

from renewal_core.config import RuntimeConfig
from renewal_core.models.distribution_spec import DistributionSpec


class Subcommand(str, Enum):
    """Defines an enumeration for the subcommands. Possible values are:
    - compute
    - limit
    - verify
    - quadrature
    - simulate
    """

    compute = "compute"
    limit = "limit"
    verify = "verify"
    quadrature = "quadrature"
    simulate = "simulate"


class OutputFormat(str, Enum):
    """Defines an enumeration for the output formats."""

    csv = "csv"
    json = "json"


class Arithmetic(str, Enum):
    """Defines an enumeration for the arithmetic of the recurrence:
    - auto: exact for rational laws, float otherwise
    - exact: exact rationals
    - float: IEEE doubles
    """

    auto = "auto"
    exact = "exact"
    float = "float"

    @property
    def exact_flag(self) -> Optional[bool]:
        return {"auto": None, "exact": True, "float": False}[self.value]


class ComputeParameters(BaseModel):
    """Contains the parameters of the compute subcommand."""

    n: int
    arithmetic: Arithmetic = Arithmetic.auto

    @validator("n")
    def check_n(cls, value):
        if value < 0:
            raise ValueError("The horizon must be nonnegative.")
        return value


class LimitParameters(BaseModel):
    """Contains the parameters of the limit subcommand."""

    tol: float
    budget: int = 10 ** 6
    arithmetic: Arithmetic = Arithmetic.auto

    @validator("tol")
    def check_tol(cls, value):
        if value <= 0:
            raise ValueError("The tolerance must be positive.")
        return value


class VerifyParameters(BaseModel):
    """Contains the parameters of the verify subcommand."""

    n: int = 200
    m_max: int = 20
    panels: int = 4096
    epsilon: float = 1e-2


class QuadratureParameters(BaseModel):
    """Contains the parameters of the quadrature subcommand."""

    l: List[int] = [0, 1, 2]
    m_max: int = 50
    r: List[float] = [0.5, 0.9]
    panels: int = 4096
    precision: Optional[int] = None
    tolerance: float = 1e-8

    @validator("l", each_item=True)
    def check_order(cls, value):
        if value not in (0, 1, 2):
            raise ValueError("The order l must be 0, 1 or 2.")
        return value

    @validator("r", each_item=True)
    def check_radius(cls, value):
        if not 0 < value <= 1:
            raise ValueError("Radii must lie in (0, 1].")
        return value


class SimulateParameters(BaseModel):
    """Contains the parameters of the simulate subcommand."""

    n_max: int
    trials: int
    seed: int = 0
    z: float = 4.0
    # Walks per random stream, part of the definition of the streams
    block_size: Optional[int] = None

    @validator("trials")
    def check_trials(cls, value):
        if value < 1:
            raise ValueError("At least one trial is needed.")
        return value

    @validator("block_size", always=True)
    def resolve_block_size(cls, value):
        """Resolves the block size from RENEWAL_KIT_SIMULATION_BLOCK_SIZE
        when it is not given, so that it is echoed with the run."""
        if value is None:
            return RuntimeConfig().simulation_block_size
        if value < 1:
            raise ValueError("The block size must be at least 1.")
        return value


__parameters__ = {
    Subcommand.compute: ComputeParameters,
    Subcommand.limit: LimitParameters,
    Subcommand.verify: VerifyParameters,
    Subcommand.quadrature: QuadratureParameters,
    Subcommand.simulate: SimulateParameters,
}


class RunSpec(BaseModel):
    """Contains the full description of a run."""

    subcommand: Subcommand
    dist: DistributionSpec
    params: Dict[str, Any] = {}
    output: Optional[Path] = None
    format: OutputFormat = OutputFormat.csv

    @root_validator
    def resolve_parameters(cls, values):
        """Validates the parameters against the subcommand and fills in
        their defaults."""
        subcommand = values.get("subcommand")
        if subcommand is None:
            return values
        model = __parameters__[subcommand]
        values["params"] = model(**values.get("params", {})).dict()
        return values

    @property
    def parameters(self) -> BaseModel:
        """The parameters parsed by the model of the subcommand."""
        return __parameters__[self.subcommand](**self.params)

    @classmethod
    def from_output(cls, path) -> "RunSpec":
        """Loads the run specification echoed in a JSON output."""
        return cls.parse_obj(json.loads(Path(path).read_text())["run_spec"])
