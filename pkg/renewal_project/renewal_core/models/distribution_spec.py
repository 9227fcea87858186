# Copyright 2020 BULL SAS All rights reserved
"""Pydantic model for parsing the distribution specification.

A distribution is specified by a JSON (or YAML) object, either:

- {"explicit": ["0", "1/2", "1/2"]}, rationals being given as "num/den"
    strings (integers and decimal strings are also exact, JSON floats switch
    the law to float mode),
- {"family": "geometric", "a": "1/2"},
- {"family": "harmonic"}.
"""
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Union

import yaml
from pydantic import (
    BaseModel,
    StrictFloat,
    StrictInt,
    StrictStr,
    root_validator,
    validator,
)

from renewal_kit.distributions import validate

Weight = Union[StrictStr, StrictInt, StrictFloat]


class FamilyEnum(str, Enum):
    """Defines an enumeration for the named families of increment laws.
    Possible values are:
    - geometric
    - harmonic
    """

    geometric = "geometric"
    harmonic = "harmonic"


class DistributionSpec(BaseModel):
    """Contains the specification of an increment law."""

    explicit: Optional[List[Weight]] = None
    family: Optional[FamilyEnum] = None
    a: Optional[Weight] = None

    class Config:
        extra = "forbid"

    @validator("explicit", each_item=True)
    def check_weight(cls, value):
        """Checks that string weights are rationals."""
        if isinstance(value, str):
            try:
                Fraction(value.strip())
            except (ValueError, ZeroDivisionError):
                raise ValueError(f"{value!r} is not a rational number.")
        return value

    @root_validator
    def check_kind(cls, values):
        """Checks that exactly one kind of law is specified, with the
        parameters of its family."""
        explicit, family = values.get("explicit"), values.get("family")
        if (explicit is None) == (family is None):
            raise ValueError(
                "Specify either explicit weights or a family, not both.")
        if family == FamilyEnum.geometric and values.get("a") is None:
            raise ValueError("The geometric family needs its parameter a.")
        if family != FamilyEnum.geometric and values.get("a") is not None:
            raise ValueError("Only the geometric family takes a parameter.")
        return values

    @classmethod
    def from_json(cls, text: str) -> "DistributionSpec":
        """Parses an inline JSON specification. YAML flow syntax is accepted
        as well."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = yaml.load(text, Loader=yaml.SafeLoader)
        if not isinstance(data, dict):
            raise ValueError(f"{text!r} is not a distribution specification.")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "DistributionSpec":
        """Loads the JSON or YAML file located at path."""
        return cls.from_json(Path(path).read_text())

    @classmethod
    def from_any(cls, value: str) -> "DistributionSpec":
        """Parses value as a file path when such a file exists, and as an
        inline specification otherwise."""
        candidate = Path(value)
        try:
            is_file = candidate.is_file()
        except OSError:
            is_file = False
        if is_file:
            return cls.from_file(candidate)
        return cls.from_json(value)

    @classmethod
    def from_distribution(cls, distribution) -> "DistributionSpec":
        return cls(**distribution.to_spec())

    def to_distribution(self):
        """Builds and validates the increment law.

        Raises:
            DistributionError: naming the violated hypothesis.
        """
        return validate(self.dict(exclude_none=True))
