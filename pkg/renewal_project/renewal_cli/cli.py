# Copyright 2020 BULL SAS All rights reserved
"""This script is the entrypoint of renewal-kit. It ties together the
distribution specification, the numerical library and the output writers.

Every subcommand builds a RunSpec, runs it and exits with:

- 0 on success,
- 1 when the distribution or the parameters are invalid, the violated clause
    of the increment law hypotheses being named in the message,
- 2 when a check failed,
- 3 when an adaptive search exhausted its budget (the partial result is
    still written).
"""
from pathlib import Path
from typing import List, Optional

import yaml
from loguru import logger
from pydantic import ValidationError
from typer import Argument, Exit, Option, Typer, echo

from renewal_cli.runners import (
    BUDGET_EXHAUSTED,
    VALIDATION_ERROR,
    __runners__,
)
from renewal_cli.writers import write_result
from renewal_core.logger import setup_logger
from renewal_core.models.distribution_spec import DistributionSpec
from renewal_core.models.run_spec import (
    Arithmetic,
    OutputFormat,
    RunSpec,
    Subcommand,
)
from renewal_kit.exceptions import (
    BudgetExhausted,
    DistributionError,
    RenewalKitError,
)

cli = Typer(add_completion=False)

DIST_HELP = (
    "The increment law: a JSON (or YAML) file, or an inline specification "
    'such as \'{"explicit": ["0", "1/2", "1/2"]}\'.'
)
OUTPUT_HELP = "The path of the output file (stdout when omitted)."
FORMAT_HELP = "The format of the output."


def run(spec: RunSpec) -> int:
    """Runs the subcommand described by spec and writes its output.

    Args:
        spec (RunSpec): the fully resolved description of the run.

    Returns:
        int: the exit status of the run.
    """
    logger.debug(f"Running {spec.subcommand.value} with {spec.params}")
    distribution = spec.dist.to_distribution()
    runner = __runners__[spec.subcommand]
    result = runner(distribution, spec.parameters)
    write_result(spec, result)
    logger.debug(f"Run ended with status {result.status}")
    return result.status


def _execute(build) -> None:
    """Builds the RunSpec, runs it and exits with the mapped status."""
    try:
        status = run(build())
    except DistributionError as error:
        echo(f"Invalid distribution [{error.clause}]: {error.message}",
             err=True)
        raise Exit(VALIDATION_ERROR)
    except BudgetExhausted as error:
        echo(f"Budget exhausted: {error}", err=True)
        raise Exit(BUDGET_EXHAUSTED)
    except (ValidationError, ValueError, yaml.YAMLError, OSError,
            RenewalKitError) as error:
        echo(f"Invalid run specification: {error}", err=True)
        raise Exit(VALIDATION_ERROR)
    raise Exit(status)


def _spec_builder(subcommand: Subcommand, dist: str, params: dict,
                  output: Optional[Path], output_format: OutputFormat):
    """Defers the parsing of the run specification to _execute, so that
    parse errors are mapped to exit codes."""
    return lambda: RunSpec(
        subcommand=subcommand,
        dist=DistributionSpec.from_any(dist),
        params={key: value for key, value in params.items()
                if value is not None},
        output=output,
        format=output_format,
    )


def compute(
    dist: str = Option(..., help=DIST_HELP),
    n: int = Option(..., help="The horizon N of the renewal sequence."),
    arithmetic: Arithmetic = Option(
        Arithmetic.auto, help="The arithmetic of the recurrence."),
    output: Optional[Path] = Option(None, help=OUTPUT_HELP),
    output_format: OutputFormat = Option(
        OutputFormat.csv, "--format", help=FORMAT_HELP),
) -> None:
    """Tabulate p_n and its first two differences for n = 0..N."""
    _execute(_spec_builder(
        Subcommand.compute, dist, {"n": n, "arithmetic": arithmetic},
        output, output_format))


def limit(
    dist: str = Option(..., help=DIST_HELP),
    tol: float = Option(..., help="The target accuracy on lim p_n."),
    budget: int = Option(
        None, help="The largest horizon the search may use."),
    arithmetic: Arithmetic = Option(
        Arithmetic.auto, help="The arithmetic of the recurrence."),
    output: Optional[Path] = Option(None, help=OUTPUT_HELP),
    output_format: OutputFormat = Option(
        OutputFormat.csv, "--format", help=FORMAT_HELP),
) -> None:
    """Bracket and estimate the limit of p_n, which is 1/mu."""
    _execute(_spec_builder(
        Subcommand.limit, dist,
        {"tol": tol, "budget": budget, "arithmetic": arithmetic},
        output, output_format))


def verify(
    dist: str = Option(..., help=DIST_HELP),
    n: int = Option(None, help="The horizon of the identity checks."),
    m_max: int = Option(None, help="The largest Fourier index compared."),
    panels: int = Option(
        None, help="The number of trapezoid panels (even)."),
    epsilon: float = Option(
        None, help="The bound on |H| sought near z = 1 (infinite mean)."),
    output: Optional[Path] = Option(None, help=OUTPUT_HELP),
    output_format: OutputFormat = Option(
        OutputFormat.csv, "--format", help=FORMAT_HELP),
) -> None:
    """Run every identity and inequality check on the law."""
    _execute(_spec_builder(
        Subcommand.verify, dist,
        {"n": n, "m_max": m_max, "panels": panels, "epsilon": epsilon},
        output, output_format))


def quadrature(
    dist: str = Option(..., help=DIST_HELP),
    l: List[int] = Option(
        None, "--l", help="The difference orders, repeatable."),
    m_max: int = Option(None, help="The largest Fourier index."),
    r: List[float] = Option(
        None, "--r", help="The radii in (0, 1], repeatable."),
    panels: int = Option(
        None, help="The number of trapezoid panels (even)."),
    precision: int = Option(
        None, help="Decimal digits of extended precision quadrature."),
    tolerance: float = Option(
        None, help="The admissible distance to the recurrence."),
    output: Optional[Path] = Option(None, help=OUTPUT_HELP),
    output_format: OutputFormat = Option(
        OutputFormat.csv, "--format", help=FORMAT_HELP),
) -> None:
    """Compare the Fourier integrals with the recurrence."""
    _execute(_spec_builder(
        Subcommand.quadrature, dist,
        {
            "l": list(l) if l else None,
            "m_max": m_max,
            "r": list(r) if r else None,
            "panels": panels,
            "precision": precision,
            "tolerance": tolerance,
        },
        output, output_format))


def simulate(
    dist: str = Option(..., help=DIST_HELP),
    n_max: int = Option(..., help="The highest level tracked."),
    trials: int = Option(..., help="The number of simulated walks."),
    seed: int = Option(0, help="The seed of the random streams."),
    z: float = Option(
        None, help="The confidence multiplier of the comparison."),
    block_size: int = Option(
        None, help="The number of walks per random stream "
        "(RENEWAL_KIT_SIMULATION_BLOCK_SIZE by default)."),
    output: Optional[Path] = Option(None, help=OUTPUT_HELP),
    output_format: OutputFormat = Option(
        OutputFormat.csv, "--format", help=FORMAT_HELP),
) -> None:
    """Estimate p_n by simulation and compare with the recurrence."""
    _execute(_spec_builder(
        Subcommand.simulate, dist,
        {"n_max": n_max, "trials": trials, "seed": seed, "z": z,
         "block_size": block_size},
        output, output_format))


def rerun(
    run_output: Path = Argument(
        ..., help="A JSON output of a previous run."),
    output: Optional[Path] = Option(None, help=OUTPUT_HELP),
) -> None:
    """Replay the run echoed in a JSON output."""

    def build():
        spec = RunSpec.from_output(run_output)
        return spec.copy(update={"output": output})

    _execute(build)


@cli.callback()
def main() -> None:
    """Numerical toolkit for the discrete renewal theorem."""
    setup_logger()


cli.command()(compute)
cli.command()(limit)
cli.command()(verify)
cli.command()(quadrature)
cli.command()(simulate)
cli.command()(rerun)
