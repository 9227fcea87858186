# Copyright 2020 BULL SAS All rights reserved
"""Serialization of the run results.

Both formats echo the fully resolved RunSpec:

- csv: two comment lines "# run_spec: {...}" and "# results: {...}", then
    the table, floats being written with 17 significant digits,
- json: an object {"run_spec": {...}, "results": {..., "table": [...]}},
    floats being written with their shortest round-trip representation.

Rationals are always written as "num/den" strings.
"""
import io
import json
from pathlib import Path

import numpy as np
from typer import echo

from renewal_core.models.run_spec import OutputFormat, RunSpec


def _to_native(value):
    """Converts numpy scalars for the json module."""
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    raise TypeError(f"Object of type {type(value)} is not JSON serializable")


def _dumps(payload, **kwargs) -> str:
    return json.dumps(payload, default=_to_native, **kwargs)


def to_csv(spec: RunSpec, result) -> str:
    """Formats the result as a CSV document with its header."""
    buffer = io.StringIO()
    buffer.write(f"# run_spec: {spec.json()}\n")
    buffer.write(f"# results: {_dumps(result.results)}\n")
    result.table.to_csv(buffer, index=False, float_format="%.17g")
    return buffer.getvalue()


def to_json(spec: RunSpec, result) -> str:
    """Formats the result as a JSON document."""
    payload = {
        "run_spec": json.loads(spec.json()),
        "results": {
            **result.results,
            "table": result.table.to_dict(orient="records"),
        },
    }
    return _dumps(payload, indent=2)


__writers__ = {OutputFormat.csv: to_csv, OutputFormat.json: to_json}


def write_result(spec: RunSpec, result) -> str:
    """Writes the result to spec.output, or to stdout when no output path is
    given.

    Returns:
        str: the written document.
    """
    document = __writers__[spec.format](spec, result)
    if spec.output is None:
        echo(document, nl=False)
    else:
        path = Path(spec.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(document)
    return document
