"""
Command-line entry point
"""

import click
import structlog
from rich.console import Console

from liftfunnel.config import settings
from liftfunnel.core.errors import ConfigError, InstanceFailed, LiftFunnelError, ValidationError
from liftfunnel.experiments.example1 import validate_example1
from liftfunnel.experiments.generator import generate_joint, instance_rng, write_joint
from liftfunnel.experiments.manager import run_sweep
from liftfunnel.experiments.report import aggregate_table, ell_one_over_chi_sq, example1_table, read_aggregate
from liftfunnel.schemas import ExperimentConfig
from liftfunnel.utils.logging import setup_logging
from liftfunnel.utils.validation import parse_float_list

logger = structlog.get_logger()
console = Console()

EXIT_VALIDATION_FAILED = 1
EXIT_INPUT_ERROR = 2


def fail(ctx: click.Context, message: str):
    click.echo(f"Error: {message}", err=True)
    ctx.exit(EXIT_INPUT_ERROR)


@click.group()
@click.version_option(settings.app_version, prog_name=settings.app_name)
def cli():
    """Privacy mechanisms for the privacy funnel and lift-based leakage measures."""
    setup_logging()


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False), help="key=value experiment file")
@click.option("--output", "output_path", default=None, help="Override output_path from the config")
@click.pass_context
def sweep(ctx, config_path, output_path):
    """Run max-lift and ladder mechanisms over random instances and write CSV."""
    try:
        cfg = ExperimentConfig.from_file(config_path)
        if output_path:
            cfg = cfg.model_copy(update={"output_path": output_path})
        result = run_sweep(cfg)
    except (ConfigError, ValidationError) as e:
        fail(ctx, str(e))
    except InstanceFailed as e:
        fail(ctx, f"{e} (rerun with seed={e.seed})")
    except OSError as e:
        fail(ctx, f"I/O error: {e}")
    else:
        console.print(f"Wrote {len(result.rows)} rows to {result.rows_path}")
        console.print(f"Wrote aggregate to {result.aggregate_path}")


@cli.command("validate-example1")
@click.option("--eps", "eps_text", default="0.005,0.01,0.015,0.02,0.025,0.03,0.035,0.04,0.045,0.05,0.055,0.06,0.065,0.07",
              show_default=True, help="Comma separated budgets in (0, 0.07]")
@click.pass_context
def validate_example1_command(ctx, eps_text):
    """Compare the chi-square ladder heuristic with the closed-form Example 1 mechanism."""
    try:
        report = validate_example1(parse_float_list(eps_text))
    except (ValueError, ValidationError) as e:
        fail(ctx, str(e))
    else:
        console.print(example1_table(report))
        if not report.passed:
            ctx.exit(EXIT_VALIDATION_FAILED)


@cli.command()
@click.option("--s", "s_size", type=int, default=4, show_default=True, help="|S|")
@click.option("--x", "x_size", type=int, default=7, show_default=True, help="|X|")
@click.option("--seed", type=click.IntRange(0, 2 ** 64 - 1), default=0, show_default=True)
@click.option("--instance", "instance_id", type=click.IntRange(0), default=0, show_default=True,
              help="Instance index within the seed's stream")
@click.option("--out", "out_path", required=True, help="Destination of the plain-text matrix")
@click.pass_context
def gen(ctx, s_size, x_size, seed, instance_id, out_path):
    """Draw one random joint distribution P_SX."""
    try:
        joint = generate_joint(s_size, x_size, instance_rng(seed, instance_id))
        write_joint(joint, out_path)
    except LiftFunnelError as e:
        fail(ctx, str(e))
    except OSError as e:
        fail(ctx, f"I/O error: {e}")
    else:
        logger.info("Joint written", path=out_path, s_size=s_size, x_size=x_size, seed=seed)


@cli.command()
@click.argument("aggregate_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def summarize(ctx, aggregate_path):
    """Render an aggregate CSV and check l1 utility against chi-square utility."""
    try:
        aggregate = read_aggregate(aggregate_path)
        table = aggregate_table(aggregate)
        check = ell_one_over_chi_sq(aggregate)
    except (KeyError, AttributeError, ValueError) as e:
        # pandas parse errors are ValueErrors
        fail(ctx, f"{aggregate_path} is not an aggregate CSV: {e!r}")
    except OSError as e:
        fail(ctx, f"I/O error: {e}")
    console.print(table)
    if check.compared:
        status = "[green]holds[/green]" if check.passed else "[red]fails[/red]"
        console.print(
            f"l1 >= chi-square utility {status}: {len(check.violations)} of {check.compared} epsilons below"
        )
        for eps in check.violations:
            console.print(f"  violation at epsilon={eps:g}")


def main():
    cli()


if __name__ == "__main__":
    main()
